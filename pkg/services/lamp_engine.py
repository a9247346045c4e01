"""
Tarone-corrected significant itemset search.

Finds the root frequency sigma_rt, the smallest support threshold at which the
number of frequent itemsets no longer exceeds alpha / Psi(sigma), then tests the
itemsets with support >= sigma_rt at the corrected level alpha / |T(sigma_rt)|.
"""

import bisect
import logging
import math
from collections import Counter
from enum import Enum
from itertools import combinations
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, model_validator

from config.settings import settings
from .errors import DegenerateLabelsError, DomainError, RefusalError
from .itemset_miner import FrequentItemset, ItemsetMiner, MinerBudget
from .stat_kernel import (
    NEG_INF,
    LogProb,
    approx_min_pvalue,
    count_cap,
    exceeds_bound,
    fisher_pvalue_counts,
    log_support_bound,
    min_attainable_pvalue,
)
from .transaction_db import LabelVector, TransactionDatabase

logger = logging.getLogger(__name__)


class SearchStrategy(str, Enum):
    INCREMENTAL = "incremental"
    DECREMENTAL = "decremental"
    BRUTE_FORCE = "brute-force"


class Tail(str, Enum):
    ONE = "one"
    TWO = "two"


class TaroneResult(BaseModel):
    """Root frequency, Bonferroni factor and corrected threshold of one search"""

    model_config = ConfigDict(frozen=True, ser_json_inf_nan="constants")

    sigma_rt: int
    num_testable: int
    log_delta: LogProb
    alpha: float
    miner_invocations: int
    strategy: SearchStrategy
    n: int
    N: int
    support_scale: int = 1

    @property
    def delta(self) -> float:
        return math.exp(self.log_delta)


class SignificantPattern(BaseModel):
    model_config = ConfigDict(frozen=True)

    items: Tuple[int, ...]
    support: int
    positive_count: int
    p_value: LogProb


class SignificanceReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    patterns: List[SignificantPattern]
    result: TaroneResult
    tail: Tail
    notice: Optional[str] = None

    @model_validator(mode="after")
    def _fits_testables(self) -> "SignificanceReport":
        if len(self.patterns) > self.result.num_testable:
            raise ValueError("more significant patterns than testable hypotheses")
        return self


def _check_inputs(n: int, total: int, alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if n < 1:
        raise DegenerateLabelsError("degenerate labels: n=0")
    if n > total - n:
        raise DomainError(f"n={n} exceeds N - n={total - n}; the positive class must be the minority")


def _make_result(
    sigma_rt: int,
    num_testable: int,
    alpha: float,
    invocations: int,
    strategy: SearchStrategy,
    n: int,
    total: int,
    scale: int = 1,
) -> TaroneResult:
    log_delta = math.log(alpha) - math.log(num_testable) if num_testable > 0 else NEG_INF
    return TaroneResult(
        sigma_rt=sigma_rt,
        num_testable=num_testable,
        log_delta=log_delta,
        alpha=alpha,
        miner_invocations=invocations,
        strategy=strategy,
        n=n,
        N=total,
        support_scale=scale,
    )


def _climb(
    miner: ItemsetMiner,
    sigma: int,
    n: int,
    total: int,
    alpha: float,
    scale: int,
) -> Tuple[int, int, int]:
    """Raise sigma until the capped count fits; returns (sigma, count, invocations)"""
    invocations = 0
    while True:
        log_bound = log_support_bound(sigma, n, total, alpha, scale)
        count, stopped = miner.count(sigma, MinerBudget(cap=count_cap(log_bound)))
        invocations += 1
        if logger.isEnabledFor(logging.DEBUG):
            support = scale * sigma
            logger.debug(
                f"sigma={sigma}: count={count}{'+' if stopped else ''}, ln bound={log_bound:.4f}, "
                f"ln Psi={min_attainable_pvalue(support, n, total):.4f} "
                f"(approx {approx_min_pvalue(support, n, total):.4f})"
            )
        if not stopped:
            return sigma, count, invocations
        sigma += 1


def incremental_search(
    db: TransactionDatabase,
    n: int,
    alpha: float,
    threads: int = 1,
    scale: int = 1,
    total: Optional[int] = None,
) -> TaroneResult:
    """
    Incremental root search with early stopping.

    Starts at sigma = 1 and counts frequent itemsets only up to alpha / Psi(sigma);
    the first sigma whose count fits is the root.

    Args:
        db: transaction database
        n: positive (minority) class size
        alpha: target family-wise error rate
        threads: miner worker threads
        scale: Psi is evaluated at scale * sigma (subsampled databases)
        total: N used for Psi; defaults to the database size
    """
    total = db.num_transactions if total is None else total
    _check_inputs(n, total, alpha)
    miner = ItemsetMiner(db, threads=threads)
    sigma_rt, num_testable, invocations = _climb(miner, 1, n, total, alpha, scale)
    logger.info(f"Incremental search: sigma_rt={sigma_rt}, testable={num_testable}, invocations={invocations}")
    return _make_result(sigma_rt, num_testable, alpha, invocations, SearchStrategy.INCREMENTAL, n, total, scale)


def decremental_search(db: TransactionDatabase, n: int, alpha: float, threads: int = 1) -> TaroneResult:
    """
    Decremental root search: full enumeration from sigma = n downwards until the
    frequent itemset count exceeds alpha / Psi(sigma).

    The sigma = 0 step is a sentinel that always ends the descent and counts as
    one iteration. When sigma = n is already over-full the root lies above n,
    where Psi is constant, and the search climbs from n + 1 instead.
    """
    total = db.num_transactions
    _check_inputs(n, total, alpha)
    miner = ItemsetMiner(db, threads=threads)
    budget = MinerBudget.unbounded()

    sigma = n + 1
    previous: Optional[int] = None
    invocations = 0
    while True:
        sigma -= 1
        invocations += 1
        if sigma == 0:
            break
        count, _ = miner.count(sigma, budget)
        log_bound = log_support_bound(sigma, n, total, alpha)
        logger.debug(f"sigma={sigma}: count={count}, ln bound={log_bound:.4f}")
        if exceeds_bound(count, log_bound):
            break
        previous = count

    if previous is None:
        sigma_rt, num_testable, climbed = _climb(miner, n + 1, n, total, alpha, 1)
        invocations += climbed
    else:
        sigma_rt, num_testable = sigma + 1, previous

    logger.info(f"Decremental search: sigma_rt={sigma_rt}, testable={num_testable}, invocations={invocations}")
    return _make_result(sigma_rt, num_testable, alpha, invocations, SearchStrategy.DECREMENTAL, n, total)


def brute_force_root(db: TransactionDatabase, n: int, alpha: float) -> TaroneResult:
    """
    Root frequency from the supports of every itemset, counted row by row.

    Small-instance oracle; refuses databases with more than BRUTE_FORCE_MAX_ITEMS items.
    """
    if db.num_items > settings.BRUTE_FORCE_MAX_ITEMS:
        raise RefusalError(
            f"brute force needs P <= {settings.BRUTE_FORCE_MAX_ITEMS}, database has P={db.num_items}"
        )
    total = db.num_transactions
    _check_inputs(n, total, alpha)

    supports: Counter = Counter()
    for row in db.transactions:
        for size in range(1, len(row) + 1):
            supports.update(combinations(row, size))
    ordered = sorted(supports.values())

    sigma = 1
    while True:
        count = len(ordered) - bisect.bisect_left(ordered, sigma)
        if not exceeds_bound(count, log_support_bound(sigma, n, total, alpha)):
            break
        sigma += 1
    return _make_result(sigma, count, alpha, 0, SearchStrategy.BRUTE_FORCE, n, total)


def search_root(
    db: TransactionDatabase,
    n: int,
    alpha: float,
    strategy: SearchStrategy = SearchStrategy.INCREMENTAL,
    threads: int = 1,
) -> TaroneResult:
    strategy = SearchStrategy(strategy)
    if strategy is SearchStrategy.INCREMENTAL:
        return incremental_search(db, n, alpha, threads=threads)
    if strategy is SearchStrategy.DECREMENTAL:
        return decremental_search(db, n, alpha, threads=threads)
    return brute_force_root(db, n, alpha)


def verify_root(db: TransactionDatabase, result: TaroneResult, threads: int = 1) -> bool:
    """Re-check both inequalities that define sigma_rt against fresh mining runs"""
    miner = ItemsetMiner(db, threads=threads)
    sigma_rt = result.sigma_rt

    count, _ = miner.count(sigma_rt)
    bound = log_support_bound(sigma_rt, result.n, result.N, result.alpha, result.support_scale)
    if count != result.num_testable or exceeds_bound(count, bound):
        return False
    if sigma_rt == 1:
        return True

    below = log_support_bound(sigma_rt - 1, result.n, result.N, result.alpha, result.support_scale)
    _, over_full = miner.count(sigma_rt - 1, MinerBudget(cap=count_cap(below)))
    return over_full


def positive_count(
    db: TransactionDatabase,
    itemset: FrequentItemset,
    positive_bits: int,
    reuse_tidset: bool = True,
) -> int:
    """a_S: occurrences of the itemset in the positive class"""
    if reuse_tidset and itemset.tidset:
        bits = itemset.tidset
    else:
        bits = (1 << db.num_transactions) - 1
        for item in itemset.items:
            bits &= db.item_bits(item)
    return (bits & positive_bits).bit_count()


def find_significant(
    db: TransactionDatabase,
    labels: LabelVector,
    alpha: float,
    strategy: SearchStrategy = SearchStrategy.INCREMENTAL,
    tail: Tail = Tail.ONE,
    threads: int = 1,
) -> SignificanceReport:
    """
    Run the root search, then test every itemset with support >= sigma_rt.

    Returns:
        SignificanceReport with the patterns whose p-value is <= delta, sorted by
        p-value then items, and the TaroneResult of the search
    """
    if labels.num_transactions != db.num_transactions:
        raise DomainError(
            f"{labels.num_transactions} labels for {db.num_transactions} transactions"
        )
    tail = Tail(tail)
    result = search_root(db, labels.n, alpha, strategy=strategy, threads=threads)
    if result.num_testable == 0:
        logger.warning("No testable hypotheses; nothing to test")
        return SignificanceReport(patterns=[], result=result, tail=tail, notice="no testable hypotheses")

    positive_bits = labels.positive_bits
    total = db.num_transactions
    # one-tailed p-values never fall below Psi(x), so such supports are skipped untested
    floor_cache: Dict[int, LogProb] = {}
    patterns: List[SignificantPattern] = []
    for itemset in ItemsetMiner(db, threads=threads).enumerate(result.sigma_rt):
        if tail is Tail.ONE:
            floor = floor_cache.get(itemset.support)
            if floor is None:
                floor = floor_cache[itemset.support] = min_attainable_pvalue(itemset.support, labels.n, total)
            if floor > result.log_delta:
                continue
        a = positive_count(db, itemset, positive_bits)
        p_value = fisher_pvalue_counts(a, itemset.support, labels.n, total, tail.value)
        if p_value <= result.log_delta:
            patterns.append(
                SignificantPattern(
                    items=db.labels_for(itemset.items),
                    support=itemset.support,
                    positive_count=a,
                    p_value=p_value,
                )
            )

    patterns.sort(key=lambda pattern: (pattern.p_value, pattern.items))
    logger.info(f"{len(patterns)} significant of {result.num_testable} testable at delta={result.delta:.3e}")
    return SignificanceReport(patterns=patterns, result=result, tail=tail)
