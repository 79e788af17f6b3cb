import math
import random
import typing as tp

import pytest

from geom_bp import knapsack
from geom_bp import structs
from tests import oracles

RANDOM_SEEDS = range(500)


def _problem(
    weights: tp.Sequence[int],
    profits: tp.Sequence[float],
    capacity: int = 100,
    bounds: tp.Optional[tp.Sequence[int]] = None,
    profit_cap: tp.Optional[float] = None,
) -> structs.PricingProblem:
    return structs.PricingProblem(
        profits=tuple(profits),
        weights=tuple(weights),
        capacity=capacity,
        bounds=tuple(bounds if bounds is not None else [1] * len(weights)),
        profit_cap=profit_cap,
    )


def _random_problem(seed: int) -> structs.PricingProblem:
    """Up to 12 items with at most 3 copies each; a bin holds a handful of units."""
    rng = random.Random(seed)
    capacity = rng.randint(10, 100)
    n = rng.randint(1, 12)
    return _problem(
        weights=[rng.randint(max(1, capacity // 5), capacity) for __ in range(n)],
        profits=[round(rng.uniform(-0.2, 1.0), 4) for __ in range(n)],
        capacity=capacity,
        bounds=[rng.randint(0, 3) for __ in range(n)],
    )


def _binary(p: structs.PricingProblem) -> structs.PricingProblem:
    return _problem(
        weights=p.weights,
        profits=p.profits,
        capacity=p.capacity,
        bounds=[min(u, 1) for u in p.bounds],
    )


def _check_feasible(p: structs.PricingProblem, result: structs.KnapsackResult) -> None:
    assert result.counts.weight(p.weights) <= p.capacity
    assert result.counts.fits_within(p.bounds)
    assert result.profit == pytest.approx(p.profit_of(result.counts))


class TestSolveBounded:
    def test_picks_best_subset(self):
        result = knapsack.solve_bounded(_problem([60, 50, 40], [0.6, 0.5, 0.4]))
        assert result.counts.counts == (1, 0, 1)
        assert result.profit == pytest.approx(1.0)

    def test_nothing_profitable(self):
        result = knapsack.solve_bounded(_problem([60, 50, 40], [0.0, 0.0, 0.0]))
        assert result.counts.is_zero
        assert result.reduced_cost == pytest.approx(-1.0)

    def test_capacity_limits_copies(self):
        result = knapsack.solve_bounded(_problem([72], [0.9], bounds=[2]))
        assert result.counts.counts == (1,)
        assert result.profit == pytest.approx(0.9)

    def test_ties_prefer_larger_items(self):
        result = knapsack.solve_bounded(_problem([60, 40, 30], [0.5, 0.5, 0.5]))
        assert result.counts.counts == (1, 1, 0)
        assert result.profit == pytest.approx(1.0)

    def test_ties_prefer_the_largest_item(self):
        # 2x25 and 1x30 + 1x20 give the same profit
        result = knapsack.solve_bounded(
            _problem([30, 25, 20], [0.3, 0.25, 0.2], capacity=50, bounds=[1, 2, 1])
        )
        assert result.counts.counts == (1, 0, 1)

    def test_rejects_profit_cap(self):
        with pytest.raises(AssertionError):
            knapsack.solve_bounded(_problem([60], [0.6], profit_cap=0.0))

    @pytest.mark.parametrize("seed", RANDOM_SEEDS)
    def test_matches_enumeration(self, seed: int):
        p = _random_problem(seed)
        result = knapsack.solve_bounded(p)
        _check_feasible(p, result)
        expected = oracles.brute_knapsack(p.profits, p.weights, p.bounds, p.capacity)
        assert result.profit == pytest.approx(expected, abs=1e-9)
        assert result.counts.counts == oracles.brute_knapsack_pattern(
            p.profits, p.weights, p.bounds, p.capacity
        )


class TestSolveBinary:
    def test_picks_best_subset(self):
        result = knapsack.solve_binary(_problem([60, 50, 40], [0.6, 0.5, 0.4], bounds=[3, 3, 3]))
        assert result.counts.counts == (1, 0, 1)
        assert result.profit == pytest.approx(1.0)

    def test_zero_bounds(self):
        result = knapsack.solve_binary(_problem([60, 50], [0.6, 0.5], bounds=[0, 0]))
        assert result.counts.is_zero

    def test_full_item(self):
        result = knapsack.solve_binary(_problem([100], [0.3]))
        assert result.counts.counts == (1,)
        assert result.profit == pytest.approx(0.3)

    def test_rejects_profit_cap(self):
        with pytest.raises(AssertionError):
            knapsack.solve_binary(_problem([60], [0.6], profit_cap=0.0))

    @pytest.mark.parametrize("seed", RANDOM_SEEDS)
    def test_matches_enumeration(self, seed: int):
        p = _random_problem(seed)
        result = knapsack.solve_binary(p)
        binary = _binary(p)
        _check_feasible(binary, result)
        expected = oracles.brute_knapsack(p.profits, p.weights, binary.bounds, p.capacity)
        assert result.profit == pytest.approx(expected, abs=1e-9)
        assert result.profit <= knapsack.solve_bounded(p).profit + 1e-9
        assert result.counts.counts == oracles.brute_knapsack_pattern(
            p.profits, p.weights, binary.bounds, p.capacity
        )


class TestSolveSubsetSum:
    def test_fullest_fill(self):
        fill = knapsack.solve_subset_sum([54, 34, 33, 19, 18], [1] * 5, 100)
        assert fill.weight([54, 34, 33, 19, 18]) == 91
        assert fill.counts == (1, 0, 0, 1, 1)

    def test_zero_capacity(self):
        assert knapsack.solve_subset_sum([5, 3], [2, 2], 0).is_zero

    def test_bounded_copies(self):
        fill = knapsack.solve_subset_sum([7], [3], 20)
        assert fill.counts == (2,)

    @pytest.mark.parametrize("seed", RANDOM_SEEDS)
    def test_matches_enumeration(self, seed: int):
        p = _random_problem(seed)
        fill = knapsack.solve_subset_sum(p.weights, p.bounds, p.capacity)
        assert fill.fits_within(p.bounds)
        assert fill.weight(p.weights) == oracles.brute_subset_sum(
            p.weights, p.bounds, p.capacity
        )


class TestSolve2dDecrement:
    def test_excludes_capped_pattern(self):
        p = _problem([60, 50, 40], [0.6, 0.5, 0.4], profit_cap=-1e-5)
        result = knapsack.solve_2d_decrement(p)
        assert result.counts.counts == (0, 1, 1)
        assert result.profit == pytest.approx(0.9)

    def test_cap_below_everything(self):
        p = _problem([60, 50, 40], [0.6, 0.5, 0.4], profit_cap=-0.7)
        assert knapsack.solve_2d_decrement(p).counts.is_zero

    def test_infinite_cap(self):
        p = _problem([60, 50, 40], [0.6, 0.5, 0.4], bounds=[2, 2, 2])
        capped = knapsack.solve_2d_decrement(p.with_cap(math.inf))
        assert capped == knapsack.solve_bounded(p)

    def test_requires_cap(self):
        with pytest.raises(AssertionError):
            knapsack.solve_2d_decrement(_problem([60], [0.6]))

    @pytest.mark.parametrize("seed", RANDOM_SEEDS)
    def test_matches_enumeration(self, seed: int):
        base = _random_problem(seed)
        unconstrained = knapsack.solve_bounded(base)
        # cap just below the unconstrained optimum forces the next best pattern
        cap = unconstrained.reduced_cost - 1e-5
        p = base.with_cap(cap)
        result = knapsack.solve_2d_decrement(p)
        _check_feasible(p, result)
        assert result.reduced_cost <= cap + 1e-9 or result.counts.is_zero
        if not unconstrained.counts.is_zero:
            assert result.counts != unconstrained.counts
        expected = oracles.brute_knapsack(
            p.profits, p.weights, p.bounds, p.capacity, profit_cap=cap
        )
        assert result.profit == pytest.approx(expected, abs=1e-9)
        assert result.counts.counts == oracles.brute_knapsack_pattern(
            p.profits, p.weights, p.bounds, p.capacity, profit_cap=cap
        )


class TestSolveExcluding:
    def test_tie_with_excluded_optimum(self):
        # the second item has no profit, yet only it leads away from the excluded bin
        p = _problem([5, 3], [1.0, 0.0], capacity=10)
        result = knapsack.solve_excluding(p, excluded={structs.Pattern(counts=(1, 0))})
        assert result.counts.counts == (1, 1)
        assert result.profit == pytest.approx(1.0)

    def test_negative_profit_item(self):
        p = _problem([5, 3], [1.0, -0.4], capacity=10)
        result = knapsack.solve_excluding(p, excluded={structs.Pattern(counts=(1, 0))})
        assert result.counts.counts == (1, 1)
        assert result.profit == pytest.approx(0.6)

    def test_everything_excluded(self):
        p = _problem([60, 50], [0.6, 0.5])
        excluded = {structs.Pattern(counts=c) for c in [(1, 0), (0, 1)]}
        assert knapsack.solve_excluding(p, excluded=excluded).counts.is_zero

    def test_rejects_profit_cap(self):
        with pytest.raises(AssertionError):
            knapsack.solve_excluding(_problem([60], [0.6], profit_cap=0.0), excluded=set())

    @pytest.mark.parametrize("seed", range(200))
    def test_matches_enumeration(self, seed: int):
        p = _random_problem(seed)
        top = knapsack.solve_bounded(p).counts
        excluded = {top} if not top.is_zero else {structs.Pattern.singleton(p.n, 0)}
        result = knapsack.solve_excluding(p, excluded=excluded)
        _check_feasible(p, result)
        assert result.counts not in excluded
        assert result.counts.counts == oracles.brute_knapsack_pattern(
            p.profits,
            p.weights,
            p.bounds,
            p.capacity,
            excluded={e.counts for e in excluded},
        )
