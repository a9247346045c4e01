"""
Naive Bonferroni correction factors for comparison with the Tarone factor
"""

import math
from typing import List, Optional, Sequence

from pydantic import BaseModel, ConfigDict

from .errors import DomainError


class FactorRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    correction: str
    max_order: Optional[int]
    factor: int


def naive_bonferroni_factor(num_items: int, max_order: int) -> int:
    """Number of itemsets of size 1..max_order over num_items items, as an exact integer"""
    if max_order < 1:
        raise DomainError(f"max_order must be at least 1, got {max_order}")
    if max_order > num_items:
        raise DomainError(f"max_order={max_order} exceeds the number of items P={num_items}")
    if max_order == num_items:
        return (1 << num_items) - 1
    return sum(math.comb(num_items, size) for size in range(1, max_order + 1))


def compare_factors(num_testable: int, num_items: int, orders: Sequence[int]) -> List[FactorRow]:
    """The Tarone factor next to naive factors for each order <= P and for all orders"""
    rows = [FactorRow(correction="tarone", max_order=None, factor=num_testable)]
    for order in orders:
        if order <= num_items:
            rows.append(
                FactorRow(
                    correction="naive",
                    max_order=order,
                    factor=naive_bonferroni_factor(num_items, order),
                )
            )
    if num_items > 0:
        rows.append(FactorRow(correction="naive", max_order=None, factor=(1 << num_items) - 1))
    return rows


def log10_int(value: int) -> float:
    if value <= 0:
        return float("-inf")
    return math.log10(value)


def format_big_int(value: int, digits: int = 3) -> str:
    """Scientific notation that works for integers far beyond float range"""
    if value == 0:
        return "0"
    if value < 10 ** 15:
        return f"{float(value):.{digits - 1}e}"
    exponent = int(math.floor(log10_int(value)))
    mantissa = round(10 ** (log10_int(value) - exponent), digits - 1)
    if mantissa >= 10:
        mantissa /= 10
        exponent += 1
    return f"{mantissa:.{digits - 1}f}e+{exponent:02d}"
