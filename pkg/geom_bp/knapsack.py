"""Exact solvers for the knapsack pricing sub-problems."""

import logging
import math
import sys
import typing as tp

from geom_bp import consts
from geom_bp import structs
from geom_bp import types as itp

LOGGER = logging.getLogger(__name__)


class _BranchAndBound:
    """Depth-first branch-and-bound over items sorted by decreasing profit/weight ratio.

    Pruning uses the fractional (Dantzig) bound. With `profit_limit` set, partial
    solutions whose committed profit exceeds the limit are abandoned and the
    incumbent is updated only below the limit. Count vectors in `excluded` never
    become the incumbent.

    A second pass walks the items in index order and returns the lexicographically
    largest pattern whose profit ties with the optimum.
    """

    def __init__(
        self,
        profits: tp.Sequence[float],
        weights: tp.Sequence[int],
        bounds: tp.Sequence[int],
        capacity: int,
        profit_limit: tp.Optional[float] = None,
        excluded: tp.AbstractSet[itp.CountsVector] = frozenset(),
    ) -> None:
        # items with non-positive profit never improve a maximizer unless they lead
        # away from an excluded pattern
        eligible = [
            i
            for i in range(len(weights))
            if (profits[i] > 0 or excluded) and bounds[i] > 0 and weights[i] <= capacity
        ]
        self.order = sorted(eligible, key=lambda i: (-profits[i] / weights[i], i))
        self._p = [profits[i] for i in self.order]
        self._w = [weights[i] for i in self.order]
        self._u = [min(bounds[i], capacity // weights[i]) for i in self.order]
        self._n = len(weights)
        self._capacity = capacity
        self._limit = profit_limit
        self._excluded = excluded
        self._counts = [0] * len(self.order)

        # index order of the eligible items, with ratio-sorted suffixes for bounding
        ratio_pos = {i: pos for pos, i in enumerate(self.order)}
        self._lex_pos = [ratio_pos[i] for i in eligible]
        self._lex_tails = [sorted(self._lex_pos[k:]) for k in range(len(eligible) + 1)]
        self._lex_counts = [0] * len(eligible)
        self._tie_budget = 0

        self.best_profit = 0.0
        self.best_counts = [0] * len(self.order)
        self.nodes = 0

    def _to_original(self, counts_at: tp.Callable[[int], int]) -> tp.List[int]:
        counts = [0] * self._n
        for pos, i in enumerate(self.order):
            counts[i] = counts_at(pos)
        return counts

    def _is_excluded(self, counts_at: tp.Callable[[int], int]) -> bool:
        return bool(self._excluded) and tuple(self._to_original(counts_at)) in self._excluded

    def _dantzig(self, positions: tp.Iterable[int], residual: int) -> float:
        bound = 0.0
        for j in positions:
            if self._p[j] <= 0:
                break
            weight = self._w[j]
            take = min(self._u[j], residual // weight)
            bound += take * self._p[j]
            residual -= take * weight
            if take < self._u[j]:
                return bound + residual * self._p[j] / weight
        return bound

    def _search(self, level: int, residual: int, profit: float) -> None:
        self.nodes += 1
        if profit > self.best_profit + consts.PROFIT_TOL and not self._is_excluded(
            self._counts.__getitem__
        ):
            self.best_profit = profit
            self.best_counts = list(self._counts)
        if level == len(self._w):
            return

        bound = profit + self._dantzig(range(level, len(self._w)), residual)
        if self._limit is not None:
            bound = min(bound, self._limit)
        if bound <= self.best_profit + consts.PROFIT_TOL:
            return

        item_profit = self._p[level]
        item_weight = self._w[level]
        for take in range(min(self._u[level], residual // item_weight), -1, -1):
            new_profit = profit + take * item_profit
            if self._limit is not None and new_profit > self._limit:
                continue
            self._counts[level] = take
            self._search(level + 1, residual - take * item_weight, new_profit)
        self._counts[level] = 0

    def _lex_search(self, k: int, residual: int, profit: float, target: float) -> bool:
        """Fill `_lex_counts` with the first pattern reaching `target`, largest counts first."""
        self._tie_budget -= 1
        if self._tie_budget < 0:
            return False
        if k == len(self._lex_pos):
            if profit < target:
                return False
            by_ratio = dict(zip(self._lex_pos, self._lex_counts))
            return not self._is_excluded(by_ratio.__getitem__)

        if profit + self._dantzig(self._lex_tails[k], residual) < target:
            return False
        j = self._lex_pos[k]
        for take in range(min(self._u[j], residual // self._w[j]), -1, -1):
            new_profit = profit + take * self._p[j]
            if self._limit is not None and new_profit > self._limit:
                continue
            self._lex_counts[k] = take
            if self._lex_search(k + 1, residual - take * self._w[j], new_profit, target):
                return True
        self._lex_counts[k] = 0
        return False

    def run(self) -> tp.List[int]:
        """Return the best counts, indexed like the original items."""
        depth_needed = len(self.order) + 50
        if sys.getrecursionlimit() < depth_needed:
            sys.setrecursionlimit(depth_needed)
        self._search(level=0, residual=self._capacity, profit=0.0)
        if self.best_profit <= 0.0 or len(self.order) < 2:
            return self._to_original(self.best_counts.__getitem__)

        self._tie_budget = consts.TIE_BREAK_NODE_CAP
        target = self.best_profit - consts.PROFIT_TOL
        if not self._lex_search(k=0, residual=self._capacity, profit=0.0, target=target):
            LOGGER.debug("Tie-breaking pass ran out of nodes, keeping the first optimum found")
            return self._to_original(self.best_counts.__getitem__)
        by_ratio = dict(zip(self._lex_pos, self._lex_counts))
        return self._to_original(by_ratio.__getitem__)


def _solve(
    p: structs.PricingProblem,
    bounds: tp.Sequence[int],
    excluded: tp.AbstractSet[itp.CountsVector] = frozenset(),
) -> structs.KnapsackResult:
    profit_limit = None
    if p.profit_cap is not None:
        profit_limit = p.profit_cap + 1.0 + consts.CAP_TOL

    bnb = _BranchAndBound(
        profits=p.profits,
        weights=p.weights,
        bounds=bounds,
        capacity=p.capacity,
        profit_limit=profit_limit,
        excluded=excluded,
    )
    pattern = structs.Pattern(counts=tuple(bnb.run()))
    LOGGER.debug(f"Knapsack with {p.n} items solved in {bnb.nodes} nodes")
    return structs.KnapsackResult(counts=pattern, profit=p.profit_of(pattern))


def solve_bounded(p: structs.PricingProblem) -> structs.KnapsackResult:
    """Maximize the profit with `0 <= x_i <= u_i` replications of every item."""
    if p.profit_cap is not None:
        msg = "Use `solve_2d_decrement` for problems with a profit cap."
        raise AssertionError(msg)
    return _solve(p, bounds=p.bounds)


def solve_binary(p: structs.PricingProblem) -> structs.KnapsackResult:
    """Maximize the profit using at most one replication of every item."""
    if p.profit_cap is not None:
        msg = "Use `solve_2d_decrement` for problems with a profit cap."
        raise AssertionError(msg)
    return _solve(p, bounds=[min(u, 1) for u in p.bounds])


def solve_2d_decrement(p: structs.PricingProblem) -> structs.KnapsackResult:
    """Maximize the profit subject to the decrement constraint `profit - 1 <= profit_cap`.

    Returns the zero pattern when no non-empty pattern respects the cap.
    """
    if p.profit_cap is None:
        msg = "The decrement-constrained problem needs a profit cap."
        raise AssertionError(msg)
    if math.isinf(p.profit_cap) and p.profit_cap > 0:
        return _solve(p.with_cap(None), bounds=p.bounds)
    return _solve(p, bounds=p.bounds)


def solve_excluding(
    p: structs.PricingProblem, excluded: tp.AbstractSet[structs.Pattern]
) -> structs.KnapsackResult:
    """Maximize the profit over the bounded patterns that are not in `excluded`.

    Patterns tying with an excluded optimum stay eligible.
    """
    if p.profit_cap is not None:
        msg = "Use `solve_2d_decrement` for problems with a profit cap."
        raise AssertionError(msg)
    return _solve(p, bounds=p.bounds, excluded=frozenset(e.counts for e in excluded))


def solve_subset_sum(
    weights: tp.Sequence[int], bounds: tp.Sequence[int], capacity: int
) -> structs.Pattern:
    """Find the fullest filling of `capacity` with at most `bounds[i]` copies of every weight.

    Reachable fills are kept as a Python integer bitset; bounded copies are split
    into power-of-two chunks.

    Args:
        weights: Positive item weights.
        bounds: Maximal number of copies of every item.
        capacity: A capacity to fill.

    Returns:
        structs.Pattern: Counts of the fullest filling.
    """
    n = len(weights)
    if capacity <= 0:
        return structs.Pattern.zero(n)

    mask = (1 << (capacity + 1)) - 1
    chunks: tp.List[tp.Tuple[int, int]] = []
    for i, (weight, bound) in enumerate(zip(weights, bounds)):
        remaining = min(bound, capacity // weight)
        size = 1
        while remaining > 0:
            take = min(size, remaining)
            chunks.append((i, take))
            remaining -= take
            size *= 2

    reach = 1
    history = []
    for i, take in chunks:
        history.append(reach)
        reach = (reach | (reach << (weights[i] * take))) & mask

    target = reach.bit_length() - 1
    counts = [0] * n
    for (i, take), before in zip(reversed(chunks), reversed(history)):
        if (before >> target) & 1:
            continue
        counts[i] += take
        target -= weights[i] * take

    return structs.Pattern(counts=tuple(counts))
