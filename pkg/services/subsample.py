"""
Root frequency estimation from with-replacement subsamples of the transactions
"""

import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from config.settings import settings
from .errors import DomainError
from .lamp_engine import incremental_search
from .transaction_db import TransactionDatabase

logger = logging.getLogger(__name__)


class SubsampleEstimate(BaseModel):
    """One approximate estimate; sigma_hat has resolution K"""

    model_config = ConfigDict(frozen=True)

    K: int
    sigma_prime: int
    sigma_hat: int
    estimated_testable: int
    seed: Optional[int] = None
    rng: str = settings.RNG_ALGORITHM
    miner_invocations: int = 0
    degenerate: bool = False
    approximate: bool = True

    @model_validator(mode="after")
    def _scaled(self) -> "SubsampleEstimate":
        if self.sigma_prime < 1:
            raise ValueError("sigma_prime must be at least 1")
        if self.sigma_hat != self.K * self.sigma_prime:
            raise ValueError("sigma_hat must equal K * sigma_prime")
        return self


class EstimateSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    K: int
    reps: int
    seed: int
    rng: str
    resampled: bool
    sigma_hat_mean: float
    sigma_hat_std: float
    estimated_testable_mean: float
    estimated_testable_std: float
    estimates: List[SubsampleEstimate]
    approximate: bool = True


def _check_ratio(K: int, N: int) -> None:
    if K < 1:
        raise DomainError(f"K must be at least 1, got {K}")
    if K > N:
        raise DomainError(f"K={K} exceeds the number of transactions N={N}")


def spawn_seeds(seed: int, reps: int) -> List[int]:
    """Independent per-repetition seeds derived from one master seed"""
    state = np.random.SeedSequence(seed).generate_state(reps, dtype=np.uint64)
    return [int(value) for value in state]


def draw_subsample(db: TransactionDatabase, K: int, seed: int) -> TransactionDatabase:
    """
    Draw floor(N / K) transactions uniformly with replacement.

    The item universe and id map of the original database are kept.
    """
    _check_ratio(K, db.num_transactions)
    rng = np.random.Generator(np.random.PCG64(seed))
    picks = rng.integers(0, db.num_transactions, size=db.num_transactions // K)
    rows = db.transactions
    return TransactionDatabase(
        (rows[int(index)] for index in picks),
        num_items=db.num_items,
        item_labels=db.item_labels,
    )


def estimate_root(
    db_sub: TransactionDatabase,
    K: int,
    n: int,
    N: int,
    alpha: float,
    seed: Optional[int] = None,
    threads: int = 1,
) -> SubsampleEstimate:
    """
    Incremental search on a subsample with Psi evaluated at K-scaled supports.

    Args:
        db_sub: subsample drawn with ratio K
        K: subsampling ratio
        n: positive class size of the original database
        N: size of the original database
        alpha: target family-wise error rate
        seed: seed the subsample was drawn with, recorded in the estimate

    Returns:
        SubsampleEstimate with sigma_hat = K * sigma_prime
    """
    _check_ratio(K, N)
    if db_sub.is_empty:
        logger.warning("Subsample contains no items; reporting sigma_prime=1 with no testable patterns")
        return SubsampleEstimate(
            K=K, sigma_prime=1, sigma_hat=K, estimated_testable=0, seed=seed, degenerate=True
        )

    result = incremental_search(db_sub, n, alpha, threads=threads, scale=K, total=N)
    return SubsampleEstimate(
        K=K,
        sigma_prime=result.sigma_rt,
        sigma_hat=K * result.sigma_rt,
        estimated_testable=result.num_testable,
        seed=seed,
        miner_invocations=result.miner_invocations,
    )


def repeat_estimates(
    db: TransactionDatabase,
    K: int,
    n: int,
    alpha: float,
    reps: int,
    seed: int,
    resample: bool = True,
    threads: int = 1,
) -> List[SubsampleEstimate]:
    """Run draw_subsample + estimate_root once per derived seed"""
    if reps < 1:
        raise DomainError(f"reps must be at least 1, got {reps}")
    _check_ratio(K, db.num_transactions)

    estimates = []
    for rep, rep_seed in enumerate(spawn_seeds(seed, reps), start=1):
        sample = draw_subsample(db, K, rep_seed) if resample else db
        estimate = estimate_root(sample, K, n, db.num_transactions, alpha, seed=rep_seed, threads=threads)
        logger.info(f"Repetition {rep}/{reps}: sigma_hat={estimate.sigma_hat}, testable~{estimate.estimated_testable}")
        estimates.append(estimate)
    return estimates


def summarize_estimates(
    estimates: List[SubsampleEstimate],
    seed: int,
    resampled: bool = True,
) -> EstimateSummary:
    if not estimates:
        raise DomainError("no estimates to summarise")
    sigma_hat = np.array([estimate.sigma_hat for estimate in estimates], dtype=np.float64)
    testable = np.array([estimate.estimated_testable for estimate in estimates], dtype=np.float64)
    return EstimateSummary(
        K=estimates[0].K,
        reps=len(estimates),
        seed=seed,
        rng=settings.RNG_ALGORITHM,
        resampled=resampled,
        sigma_hat_mean=float(sigma_hat.mean()),
        sigma_hat_std=float(sigma_hat.std()),
        estimated_testable_mean=float(testable.mean()),
        estimated_testable_std=float(testable.std()),
        estimates=estimates,
    )
