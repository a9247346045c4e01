import numpy as np
import pytest

from lamp_oracles import tictactoe_fimi
from services.transaction_db import parse_fimi, parse_labels


@pytest.fixture
def rng():
    return np.random.default_rng(20160512)


@pytest.fixture
def tiny_db():
    return parse_fimi("1 2\n1 2\n3\n")


@pytest.fixture(scope="session")
def tictactoe_text():
    return tictactoe_fimi()


@pytest.fixture(scope="session")
def tictactoe(tictactoe_text):
    data, labels = tictactoe_text
    db = parse_fimi(data)
    return db, parse_labels(labels, db.num_transactions)


@pytest.fixture
def tictactoe_files(tmp_path, tictactoe_text):
    data, labels = tictactoe_text
    data_path = tmp_path / "tictactoe.dat"
    label_path = tmp_path / "tictactoe.lab"
    data_path.write_text(data)
    label_path.write_text(labels)
    return data_path, label_path
