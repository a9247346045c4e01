"""
Exact discrete statistics for 2x2 contingency tables, evaluated in natural-log space
"""

import math
import threading
from functools import lru_cache
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator
from scipy.special import gammaln, logsumexp

from config.settings import settings
from .errors import DomainError

# Natural logarithm of a probability; -inf encodes probability 0.
LogProb = float

NEG_INF: LogProb = float("-inf")
LN2 = math.log(2.0)

# e**60 is far above any itemset count a miner could reach.
_UNBOUNDED_LOG = 60.0


class LogFactorialTable:
    """Shared table of ln(k!) for k = 0..size, grown on demand"""

    def __init__(self, size: int):
        self._lock = threading.Lock()
        self._values = self._build(max(size, 1))
        self._list: List[float] = self._values.tolist()

    @staticmethod
    def _build(size: int) -> np.ndarray:
        return gammaln(np.arange(size + 1, dtype=np.float64) + 1.0)

    @property
    def size(self) -> int:
        return len(self._list) - 1

    @property
    def values(self) -> np.ndarray:
        return self._values

    def ensure(self, size: int) -> None:
        """Grow the table so that ln(size!) is a lookup"""
        if size <= self.size:
            return
        with self._lock:
            if size > self.size:
                values = self._build(max(size, 2 * self.size))
                self._values = values
                self._list = values.tolist()

    def __call__(self, k: int) -> float:
        if k <= self.size:
            return self._list[k]
        return float(gammaln(k + 1.0))


log_factorial = LogFactorialTable(settings.LOG_FACTORIAL_TABLE_SIZE)


class ContingencyTable(BaseModel):
    """
    Counts of one pattern's association test.

    a: transactions containing the pattern in the positive class
    x: pattern support (column marginal)
    n: positive class size (row marginal)
    N: total number of transactions
    """

    model_config = ConfigDict(frozen=True)

    a: int
    x: int
    n: int
    N: int

    @model_validator(mode="after")
    def _check_cells(self) -> "ContingencyTable":
        _check_marginals(self.x, self.n, self.N)
        lower, upper = support_bounds(self.x, self.n, self.N)
        if not lower <= self.a <= upper:
            raise DomainError(
                f"cell a={self.a} outside [{lower}, {upper}] for x={self.x}, n={self.n}, N={self.N}"
            )
        return self


def _check_marginals(x: int, n: int, N: int) -> None:
    if x < 0 or n < 0 or N < 0:
        raise DomainError(f"marginals must be non-negative, got x={x}, n={n}, N={N}")
    if x > N or n > N:
        raise DomainError(f"marginals exceed N: x={x}, n={n}, N={N}")


def support_bounds(x: int, n: int, N: int) -> tuple:
    """Range of the cell a for fixed marginals"""
    return max(0, x + n - N), min(x, n)


def log_binomial(n: int, k: int) -> float:
    """ln C(n, k); -inf when k > n"""
    if n < 0 or k < 0:
        raise DomainError(f"log_binomial needs non-negative arguments, got ({n}, {k})")
    if k > n:
        return NEG_INF
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k)


def hypergeom_pmf(a: int, x: int, n: int, N: int) -> LogProb:
    """
    Log probability of cell a under the hypergeometric null.

    Args:
        a: positive-class occurrences of the pattern
        x: pattern support
        n: positive class size
        N: number of transactions

    Returns:
        ln(C(n,a) C(N-n,x-a) / C(N,x)), or -inf outside the support of a
    """
    _check_marginals(x, n, N)
    lower, upper = support_bounds(x, n, N)
    if a < lower or a > upper:
        return NEG_INF
    return (log_binomial(n, a) + log_binomial(N - n, x - a)) - log_binomial(N, x)


def _log_pmf_range(lo: int, hi: int, x: int, n: int, N: int) -> np.ndarray:
    # Same operation order as hypergeom_pmf so single terms agree bit for bit.
    log_factorial.ensure(N)
    lf = log_factorial.values
    k = np.arange(lo, hi + 1)
    left = lf[n] - lf[k] - lf[n - k]
    right = lf[N - n] - lf[x - k] - lf[N - n - x + k]
    total = lf[N] - lf[x] - lf[N - x]
    return (left + right) - total


@lru_cache(maxsize=1 << 16)
def _log_tail(a: int, x: int, n: int, N: int, upper_tail: bool) -> LogProb:
    lower, upper = support_bounds(x, n, N)
    if upper_tail:
        if a <= lower:
            return 0.0
        if a == upper:
            return hypergeom_pmf(a, x, n, N)
        terms = _log_pmf_range(a, upper, x, n, N)
    else:
        if a >= upper:
            return 0.0
        if a == lower:
            return hypergeom_pmf(a, x, n, N)
        terms = _log_pmf_range(lower, a, x, n, N)
    return min(0.0, float(logsumexp(terms)))


def fisher_pvalue_one_tailed(table: ContingencyTable) -> LogProb:
    """Log of the upper-tail probability P(A >= a) for the table's marginals"""
    return _log_tail(table.a, table.x, table.n, table.N, True)


def fisher_pvalue_two_tailed(table: ContingencyTable) -> LogProb:
    """Smaller tail doubled and capped at one, in log space"""
    upper = _log_tail(table.a, table.x, table.n, table.N, True)
    lower = _log_tail(table.a, table.x, table.n, table.N, False)
    return min(0.0, LN2 + min(upper, lower))


def fisher_pvalue(table: ContingencyTable, tail: str = "one") -> LogProb:
    return fisher_pvalue_counts(table.a, table.x, table.n, table.N, tail)


def fisher_pvalue_counts(a: int, x: int, n: int, N: int, tail: str = "one") -> LogProb:
    """fisher_pvalue for cells the caller already knows to be consistent, such as mined counts"""
    upper = _log_tail(a, x, n, N, True)
    if tail == "one":
        return upper
    if tail == "two":
        return min(0.0, LN2 + min(upper, _log_tail(a, x, n, N, False)))
    raise DomainError(f"unknown tail {tail!r}; expected 'one' or 'two'")


def min_attainable_pvalue(x: int, n: int, N: int) -> LogProb:
    """
    Log of the smallest p-value Fisher's exact test can reach for support x.

    Requires n to be the minority class. For x > n the value is held at
    1 / C(N, n), which is a lower bound on every attainable p-value there.
    """
    if x < 0 or n < 0 or N < 0:
        raise DomainError(f"arguments must be non-negative, got x={x}, n={n}, N={N}")
    if n > N - n:
        raise DomainError(
            f"n={n} is the majority class of N={N}; swap the labels so the positive class is the minority"
        )
    if x <= n:
        return log_binomial(n, x) - log_binomial(N, x)
    return -log_binomial(N, n)


def approx_min_pvalue(sigma: int, n: int, N: int) -> LogProb:
    """sigma * ln(n/N); close to the exact value only while sigma << n"""
    if sigma < 0:
        raise DomainError(f"sigma must be non-negative, got {sigma}")
    if sigma == 0:
        return 0.0
    if n == 0:
        return NEG_INF
    return sigma * math.log(n / N)


def log_support_bound(sigma: int, n: int, N: int, alpha: float, scale: int = 1) -> float:
    """ln(alpha / Psi(scale * sigma, n, N)), the log of the largest admissible pattern count"""
    return math.log(alpha) - min_attainable_pvalue(scale * sigma, n, N)


def exceeds_bound(count: int, log_bound: float) -> bool:
    """True when count > exp(log_bound), compared in log space"""
    return count > 0 and math.log(count) > log_bound


def count_cap(log_bound: float) -> Optional[int]:
    """
    Largest integer c with exceeds_bound(c, log_bound) false.

    Returns None when the bound is beyond any reachable count.
    """
    if log_bound >= _UNBOUNDED_LOG:
        return None
    if log_bound < 0.0:
        return 0
    # bisection keeps exceeds_bound(low) false and exceeds_bound(high) true
    low, high = 0, max(1, int(math.exp(log_bound)))
    while not exceeds_bound(high, log_bound):
        low, high = high, 2 * high
    while high - low > 1:
        middle = (low + high) // 2
        if exceeds_bound(middle, log_bound):
            high = middle
        else:
            low = middle
    return low
