import math

import pytest

from services.bonferroni import compare_factors
from services.lamp_engine import SignificantPattern
from services.reporting import (
    RunSummary,
    format_log_prob,
    read_patterns_tsv,
    read_summary_json,
    render_compare_table,
    write_compare_tsv,
    write_model_json,
    write_patterns_tsv,
)


def _summary(**overrides):
    fields = dict(
        dataset="toy.dat",
        N=10,
        P=4,
        n=3,
        alpha=0.05,
        strategy="incremental",
        tail="one",
        sigma_rt=3,
        num_testable=0,
        delta=0.0,
        log_delta=float("-inf"),
        num_significant=0,
        miner_invocations=3,
        wall_time_ms=1.5,
        label_orientation="as-given",
        threads=1,
        version="1.0.0",
    )
    fields.update(overrides)
    return RunSummary(**fields)


def test_format_log_prob():
    assert format_log_prob(math.log(0.5), 12) == "0.5"
    assert format_log_prob(0.0, 12) == "1"
    assert format_log_prob(float("-inf"), 12) == "0"
    tiny = format_log_prob(-2000.0, 6)
    assert tiny.endswith("e-869")
    assert float(tiny.split("e")[0]) == pytest.approx(10 ** (-2000.0 / math.log(10) + 869), rel=1e-5)


def test_patterns_tsv_layout(tmp_path):
    patterns = [
        SignificantPattern(items=(3, 7), support=12, positive_count=11, p_value=math.log(1e-6)),
        SignificantPattern(items=(5,), support=20, positive_count=15, p_value=math.log(2e-4)),
    ]
    path = write_patterns_tsv(tmp_path / "patterns.tsv", patterns)
    lines = path.read_text().splitlines()
    assert lines[0] == "items\tsupport\ta\tp_value\tlog10_p"
    assert len(lines) == 3
    rows = read_patterns_tsv(path)
    assert rows[0]["items"] == "3 7"
    assert rows[0]["a"] == "11"
    assert float(rows[0]["p_value"]) == pytest.approx(1e-6)
    assert float(rows[1]["log10_p"]) == pytest.approx(math.log10(2e-4), abs=1e-6)


def test_summary_round_trip_keeps_negative_infinity(tmp_path):
    summary = _summary()
    path = write_model_json(tmp_path / "summary.json", summary)
    assert "-Infinity" in path.read_text()
    assert read_summary_json(path) == summary


def test_summary_rejects_more_significant_than_testable():
    with pytest.raises(ValueError):
        _summary(num_testable=2, num_significant=3)


def test_compare_outputs(tmp_path):
    rows = compare_factors(3460, 18, [3, 5])
    table = render_compare_table(rows)
    assert table.splitlines()[0] == "correction\tmax_order\tfactor\tlog10_factor"
    assert "tarone\tall\t3.46e+03" in table
    assert "naive\tall\t2.62e+05" in table

    exact = render_compare_table(rows, exact=True)
    assert "naive\tall\t262143\t" in exact

    path = write_compare_tsv(tmp_path / "compare.tsv", rows, exact=True)
    assert path.read_text().splitlines() == exact.splitlines()
