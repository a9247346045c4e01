import pytest

from lamp_oracles import count_frequent, exhaustive_supports, random_database
from services.errors import DomainError
from services.itemset_miner import ItemsetMiner, MinerBudget, mine_count_capped, mine_enumerate
from services.transaction_db import TransactionDatabase, parse_fimi


def _as_dict(itemsets):
    return {itemset.items: itemset.support for itemset in itemsets}


def test_small_database_count(tiny_db):
    assert mine_count_capped(tiny_db, 2) == (3, False)
    found = _as_dict(mine_enumerate(tiny_db, 2))
    assert found == {(1,): 2, (2,): 2, (1, 2): 2}


def test_enumeration_matches_exhaustive_supports(rng):
    for _ in range(60):
        db = random_database(rng, max_transactions=30, max_items=8)
        supports = exhaustive_supports(db)
        for sigma in range(1, db.num_transactions + 2):
            expected = {items: support for items, support in supports.items() if support >= sigma}
            found = list(mine_enumerate(db, sigma))
            assert len(found) == len(expected)
            assert _as_dict(found) == expected


def test_tidsets_describe_supporting_transactions(rng):
    db = random_database(rng, max_transactions=30, max_items=6)
    for itemset in mine_enumerate(db, 1):
        expected = sum(1 << tid for tid, row in enumerate(db.transactions) if set(itemset.items) <= set(row))
        assert itemset.tidset == expected
        assert itemset.tidset.bit_count() == itemset.support


def test_cap_semantics(rng):
    for _ in range(40):
        db = random_database(rng, max_transactions=25, max_items=8)
        sigma = int(rng.integers(1, 4))
        exact, stopped = mine_count_capped(db, sigma)
        assert not stopped
        for cap in (0, 1, exact - 1, exact, exact + 5):
            if cap < 0:
                continue
            count, stopped = mine_count_capped(db, sigma, MinerBudget(cap=cap))
            if exact <= cap:
                assert (count, stopped) == (exact, False)
            else:
                assert stopped
                assert cap < count <= exact


def test_count_is_anti_monotone_in_sigma(rng):
    db = random_database(rng, max_transactions=30, max_items=8)
    counts = [mine_count_capped(db, sigma)[0] for sigma in range(1, db.num_transactions + 2)]
    assert all(later <= earlier for earlier, later in zip(counts, counts[1:]))
    assert counts[-1] == 0


def test_count_ignores_transaction_and_item_order(rng):
    db = random_database(rng, max_transactions=30, max_items=8)
    order = rng.permutation(db.num_transactions)
    relabel = rng.permutation(db.num_items)
    shuffled = TransactionDatabase(
        ([int(relabel[item]) for item in db.transactions[int(tid)]] for tid in order),
        num_items=db.num_items,
    )
    for sigma in (1, 2, 3, 5):
        assert mine_count_capped(db, sigma) == mine_count_capped(shuffled, sigma)


def test_duplicating_rows_scales_supports(rng):
    db = random_database(rng, max_transactions=20, max_items=7)
    tripled = TransactionDatabase([row for row in db.transactions for _ in range(3)], num_items=db.num_items)
    for sigma in (1, 2, 4):
        assert mine_count_capped(tripled, 3 * sigma) == mine_count_capped(db, sigma)


@pytest.mark.parametrize("threads", [2, 4, 8])
def test_threads_give_the_same_itemsets(rng, threads):
    db = random_database(rng, max_transactions=40, max_items=10)
    for sigma in (1, 3):
        serial = _as_dict(mine_enumerate(db, sigma))
        parallel = _as_dict(mine_enumerate(db, sigma, threads=threads))
        assert parallel == serial
        assert mine_count_capped(db, sigma, threads=threads) == (len(serial), False)


def test_threaded_count_respects_cap():
    db = TransactionDatabase([list(range(12))] * 10, num_items=12)
    count, stopped = mine_count_capped(db, 1, MinerBudget(cap=50), threads=4)
    assert stopped
    assert count > 50


def test_threaded_count_spans_several_batches():
    # 2**14 - 1 itemsets, far more than one flush batch per worker
    db = TransactionDatabase([list(range(14))] * 5, num_items=14)
    assert mine_count_capped(db, 1, threads=4) == (2**14 - 1, False)
    count, stopped = mine_count_capped(db, 1, MinerBudget(cap=5000), threads=4)
    assert stopped
    assert 5000 < count <= 2**14 - 1


def test_counting_does_the_same_work_as_enumeration(rng):
    db = random_database(rng, max_transactions=30, max_items=9)
    for sigma in (1, 2, 4):
        miner = ItemsetMiner(db)
        itemsets = list(miner.enumerate(sigma))
        enumerated = miner.last_stats
        assert miner.count(sigma) == (len(itemsets), False)
        assert miner.last_stats == enumerated


def test_early_stopping_bounds_the_work():
    # every subset of 25 items is frequent: 2**25 - 1 itemsets uncapped
    num_items, cap = 25, 1000
    db = TransactionDatabase([list(range(num_items))] * 30, num_items=num_items)
    miner = ItemsetMiner(db)
    count, stopped = miner.count(1, MinerBudget(cap=cap))
    assert stopped
    assert count == cap + 1
    assert miner.last_stats.expansions <= 2 * (cap + 1 + num_items)
    assert miner.last_stats.intersections <= (cap + 1) * num_items


def test_empty_and_itemless_databases():
    assert mine_count_capped(parse_fimi(""), 1) == (0, False)
    assert mine_count_capped(parse_fimi("\n\n"), 1) == (0, False)
    assert list(mine_enumerate(parse_fimi("\n\n"), 1)) == []


def test_invalid_arguments():
    db = parse_fimi("1 2\n")
    with pytest.raises(DomainError):
        mine_enumerate(db, 0)
    with pytest.raises(DomainError):
        mine_count_capped(db, 0)
    with pytest.raises(DomainError):
        ItemsetMiner(db, threads=0)
    with pytest.raises(ValueError):
        MinerBudget(cap=-1)


def test_sigma_above_every_support_finds_nothing(rng):
    db = random_database(rng)
    supports = exhaustive_supports(db)
    sigma = db.num_transactions + 1
    assert count_frequent(supports, sigma) == 0
    assert mine_count_capped(db, sigma) == (0, False)
