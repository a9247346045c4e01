import math

import numpy as np
import pytest

from lamp_oracles import random_database
from services.errors import DomainError
from services.lamp_engine import incremental_search
from services.subsample import (
    SubsampleEstimate,
    draw_subsample,
    estimate_root,
    repeat_estimates,
    spawn_seeds,
    summarize_estimates,
)
from services.transaction_db import pattern_support, parse_fimi


def test_draw_is_deterministic_per_seed(rng):
    db = random_database(rng, max_transactions=50, max_items=8)
    first = draw_subsample(db, 3, seed=11)
    assert draw_subsample(db, 3, seed=11) == first
    assert first.num_transactions == db.num_transactions // 3
    assert first.num_items == db.num_items
    assert set(first.transactions) <= set(db.transactions)


def test_draw_keeps_file_ids():
    db = parse_fimi("10 20\n20\n30\n10\n", remap=True)
    sample = draw_subsample(db, 2, seed=5)
    assert sample.item_labels == db.item_labels


def test_draw_rejects_bad_ratios(rng):
    db = random_database(rng, max_transactions=10)
    with pytest.raises(DomainError):
        draw_subsample(db, 0, seed=1)
    with pytest.raises(DomainError):
        draw_subsample(db, db.num_transactions + 1, seed=1)
    with pytest.raises(DomainError):
        repeat_estimates(db, db.num_transactions + 1, 2, 0.05, reps=3, seed=0)


def test_spawned_seeds_are_reproducible():
    seeds = spawn_seeds(42, 5)
    assert seeds == spawn_seeds(42, 5)
    assert len(set(seeds)) == 5


def test_subsampled_support_is_unbiased():
    generator = np.random.default_rng(3)
    rows = [np.flatnonzero(generator.random(8) < 0.5).tolist() for _ in range(400)]
    db = parse_fimi("\n".join(" ".join(map(str, row)) for row in rows) + "\n")
    K, reps = 4, 1000
    size = db.num_transactions // K
    patterns = [
        sorted(generator.choice(db.num_items, size=int(generator.integers(1, 4)), replace=False).tolist())
        for _ in range(20)
    ]
    samples = [draw_subsample(db, K, seed) for seed in spawn_seeds(9, reps)]

    for items in patterns:
        p = pattern_support(db, items) / db.num_transactions
        draws = [pattern_support(sample, items) for sample in samples]
        standard_error = math.sqrt(size * p * (1 - p) / reps)
        assert abs(np.mean(draws) - size * p) <= 4 * standard_error + 1e-12, items


def test_full_database_with_unit_ratio_is_exact(rng):
    for _ in range(10):
        db = random_database(rng, max_transactions=30, max_items=8)
        n = max(1, db.num_transactions // 3)
        exact = incremental_search(db, n, 0.05)
        estimate = repeat_estimates(db, 1, n, 0.05, reps=1, seed=0, resample=False)[0]
        assert estimate.sigma_hat == exact.sigma_rt
        assert estimate.estimated_testable == exact.num_testable


def test_estimates_have_resolution_k(rng):
    db = random_database(rng, max_transactions=40, max_items=8)
    n = db.num_transactions // 4
    for K in (1, 2, 3, 5):
        if K > db.num_transactions:
            continue
        for estimate in repeat_estimates(db, K, n, 0.05, reps=4, seed=K):
            assert estimate.sigma_hat % K == 0
            assert estimate.sigma_hat >= K
            assert estimate.approximate


def test_empty_subsample_is_degenerate():
    db = parse_fimi("\n\n\n\n")
    estimate = estimate_root(db, 2, 1, 8, 0.05, seed=4)
    assert estimate.degenerate
    assert (estimate.sigma_prime, estimate.sigma_hat, estimate.estimated_testable) == (1, 2, 0)


def test_estimate_model_checks_scaling():
    with pytest.raises(ValueError):
        SubsampleEstimate(K=3, sigma_prime=2, sigma_hat=5, estimated_testable=0)
    with pytest.raises(ValueError):
        SubsampleEstimate(K=3, sigma_prime=0, sigma_hat=0, estimated_testable=0)


def test_summary_statistics():
    estimates = [
        SubsampleEstimate(K=2, sigma_prime=s, sigma_hat=2 * s, estimated_testable=t)
        for s, t in [(5, 100), (6, 80), (6, 90)]
    ]
    summary = summarize_estimates(estimates, seed=1)
    assert summary.reps == 3
    assert summary.sigma_hat_mean == pytest.approx(34 / 3)
    assert summary.sigma_hat_std == pytest.approx(float(np.std([10, 12, 12])))
    assert summary.estimated_testable_mean == pytest.approx(90.0)
    assert summary.rng == "PCG64"
    with pytest.raises(DomainError):
        summarize_estimates([], seed=1)


def test_tictactoe_half_subsamples(tictactoe):
    db, labels = tictactoe
    estimates = repeat_estimates(db, 2, labels.n, 0.05, reps=10, seed=2016)
    summary = summarize_estimates(estimates, seed=2016)
    assert [estimate.sigma_hat for estimate in estimates] == [12] * 10
    assert summary.sigma_hat_std == 0.0
    exact = 3460
    assert exact / 3 < summary.estimated_testable_mean < exact * 3


def test_tictactoe_tiny_subsamples(tictactoe):
    db, labels = tictactoe
    estimates = repeat_estimates(db, 100, labels.n, 0.05, reps=5, seed=1)
    assert {estimate.sigma_hat for estimate in estimates} == {100}


def test_unit_or_larger_ratio_is_required(rng):
    db = random_database(rng, max_transactions=20, max_items=6)
    with pytest.raises(DomainError):
        repeat_estimates(db, 0, 2, 0.05, reps=1, seed=0, resample=False)
    with pytest.raises(DomainError):
        estimate_root(db, 0, 2, db.num_transactions, 0.05)


@pytest.mark.parametrize("K", [4, 8, 10, 50])
def test_tictactoe_ratio_sweep(tictactoe, K):
    db, labels = tictactoe
    estimates = repeat_estimates(db, K, labels.n, 0.05, reps=2, seed=K)
    assert all(estimate.sigma_hat % K == 0 for estimate in estimates)
    if K == 50:
        # 19 rows can never exceed alpha / Psi(50)
        assert {estimate.sigma_hat for estimate in estimates} == {50}
