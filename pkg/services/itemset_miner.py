"""
Depth-first frequent itemset mining over bit-vector occurrence sets
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, field_validator

from .errors import DomainError
from .transaction_db import TransactionDatabase

logger = logging.getLogger(__name__)

# (item, occurrence bits, support)
Extension = Tuple[int, int, int]

# Nodes counted between updates of the shared total in threaded counts
_COUNT_BATCH = 1024


class MinerBudget(BaseModel):
    """Maximum number of frequent itemsets to count before aborting; None is unbounded"""

    model_config = ConfigDict(frozen=True)

    cap: Optional[int] = None

    @field_validator("cap")
    @classmethod
    def _non_negative(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and value < 0:
            raise ValueError(f"cap must be non-negative, got {value}")
        return value

    @classmethod
    def unbounded(cls) -> "MinerBudget":
        return cls()

    def exceeded_by(self, count: int) -> bool:
        return self.cap is not None and count > self.cap


@dataclass(frozen=True)
class FrequentItemset:
    items: Tuple[int, ...]
    support: int
    tidset: int = field(default=0, repr=False, compare=False)


@dataclass
class MinerStats:
    """Work counters of one mining call"""

    emitted: int = 0
    expansions: int = 0
    intersections: int = 0

    def merge(self, other: "MinerStats") -> None:
        self.emitted += other.emitted
        self.expansions += other.expansions
        self.intersections += other.intersections


class ItemsetMiner:
    """
    Enumerates itemsets with support >= sigma in a lexicographic set-enumeration
    tree. Items are ordered by ascending support; each node carries the
    occurrence bits of its itemset and the frequent extensions left to it.
    """

    def __init__(self, db: TransactionDatabase, threads: int = 1):
        if threads < 1:
            raise DomainError(f"threads must be at least 1, got {threads}")
        self.db = db
        self.threads = threads
        self.last_stats = MinerStats()

    def _roots(self, sigma: int) -> List[Extension]:
        if sigma < 1:
            raise DomainError(f"sigma must be at least 1, got {sigma}")
        frequent = [
            (item, len(tids))
            for item, tids in enumerate(self.db.occurrences)
            if len(tids) >= sigma
        ]
        frequent.sort(key=lambda entry: (entry[1], entry[0]))
        return [(item, self.db.item_bits(item), support) for item, support in frequent]

    def _walk(self, roots: List[Extension], index: int, sigma: int, stats: MinerStats) -> Iterator[FrequentItemset]:
        """Itemsets of the subtree rooted at roots[index]; nodes are expanded only after being yielded"""
        item, bits, support = roots[index]
        stack = [((item,), bits, support, roots[index + 1:])]
        while stack:
            items, bits, support, tail = stack.pop()
            stats.emitted += 1
            yield FrequentItemset(items=tuple(sorted(items)), support=support, tidset=bits)

            stats.expansions += 1
            stats.intersections += len(tail)
            children: List[Extension] = []
            for other, other_bits, _ in tail:
                joined = bits & other_bits
                joined_support = joined.bit_count()
                if joined_support >= sigma:
                    children.append((other, joined, joined_support))
            for position in range(len(children) - 1, -1, -1):
                child, child_bits, child_support = children[position]
                stack.append((items + (child,), child_bits, child_support, children[position + 1:]))

    def _count_walk(
        self,
        roots: List[Extension],
        index: int,
        sigma: int,
        stats: MinerStats,
        limit: Optional[int] = None,
        flush: Optional[Callable[[int], bool]] = None,
    ) -> Tuple[int, bool]:
        """
        Node count of the subtree rooted at roots[index], without building itemsets.

        Stops as soon as the count exceeds limit. flush, when given, receives the
        count in batches and returns True once the shared total is over budget.

        Returns:
            (count, stopped)
        """
        stack = [(roots[index][1], [entry[1] for entry in roots[index + 1:]])]
        count = pending = expansions = intersections = 0
        stopped = False
        while stack:
            bits, tail = stack.pop()
            count += 1
            pending += 1
            if flush is not None and pending == _COUNT_BATCH:
                pending = 0
                if flush(_COUNT_BATCH):
                    stopped = True
                    break
            if limit is not None and count > limit:
                stopped = True
                break

            expansions += 1
            intersections += len(tail)
            children = [joined for joined in (bits & other for other in tail) if joined.bit_count() >= sigma]
            for position in range(len(children) - 1, -1, -1):
                stack.append((children[position], children[position + 1:]))

        if flush is not None and pending:
            flush(pending)
        stats.emitted += count
        stats.expansions += expansions
        stats.intersections += intersections
        return count, stopped

    def enumerate(self, sigma: int) -> Iterator[FrequentItemset]:
        """
        Yield every itemset with support >= sigma exactly once.

        Emission order is deterministic for a given thread count but callers
        must not rely on it.
        """
        roots = self._roots(sigma)
        self.last_stats = MinerStats()
        if self.threads == 1 or len(roots) < 2:
            for index in range(len(roots)):
                yield from self._walk(roots, index, sigma, self.last_stats)
            return

        def project(index: int) -> Tuple[List[FrequentItemset], MinerStats]:
            stats = MinerStats()
            return list(self._walk(roots, index, sigma, stats)), stats

        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            for itemsets, stats in pool.map(project, range(len(roots))):
                self.last_stats.merge(stats)
                yield from itemsets

    def count(self, sigma: int, budget: Optional[MinerBudget] = None) -> Tuple[int, bool]:
        """
        Count frequent itemsets, aborting once the count exceeds the budget cap.

        Returns:
            (count, stopped_early). When stopped_early is False the count is exact;
            otherwise it is some value above the cap.
        """
        budget = budget or MinerBudget.unbounded()
        roots = self._roots(sigma)
        self.last_stats = MinerStats()

        if self.threads == 1 or len(roots) < 2:
            total = 0
            for index in range(len(roots)):
                limit = None if budget.cap is None else budget.cap - total
                count, stopped = self._count_walk(roots, index, sigma, self.last_stats, limit=limit)
                total += count
                if stopped:
                    return total, True
            return total, False

        lock = threading.Lock()
        stop = threading.Event()
        shared = {"total": 0}

        def flush(count: int) -> bool:
            with lock:
                shared["total"] += count
                if budget.exceeded_by(shared["total"]):
                    stop.set()
            return stop.is_set()

        def project(index: int) -> MinerStats:
            stats = MinerStats()
            if not stop.is_set():
                self._count_walk(roots, index, sigma, stats, limit=budget.cap, flush=flush)
            return stats

        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            for stats in pool.map(project, range(len(roots))):
                self.last_stats.merge(stats)

        total = shared["total"]
        return total, budget.exceeded_by(total)


def mine_count_capped(
    db: TransactionDatabase,
    sigma: int,
    budget: Optional[MinerBudget] = None,
    threads: int = 1,
) -> Tuple[int, bool]:
    return ItemsetMiner(db, threads=threads).count(sigma, budget)


def mine_enumerate(db: TransactionDatabase, sigma: int, threads: int = 1) -> Iterator[FrequentItemset]:
    if sigma < 1:
        raise DomainError(f"sigma must be at least 1, got {sigma}")
    return ItemsetMiner(db, threads=threads).enumerate(sigma)
