"""Upper bound heuristics and combinatorial lower bounds."""

import dataclasses
import logging
import typing as tp

from geom_bp import instance_tools
from geom_bp import knapsack
from geom_bp import structs

LOGGER = logging.getLogger(__name__)


def _residual_demands(
    inst: structs.Instance, demands: tp.Optional[tp.Sequence[int]]
) -> tp.Tuple[int, ...]:
    if demands is None:
        return inst.demands
    if len(demands) != inst.n:
        msg = f"Got {len(demands)} residual demands for {inst.n} items."
        raise AssertionError(msg)
    return tuple(demands)


def _half_or_more(inst: structs.Instance) -> tp.List[int]:
    """Return indices of items with weight at least `ceil(c / 2)`."""
    half = (inst.capacity + 1) // 2
    return [i for i, w in enumerate(inst.weights) if w >= half]


class _OpenBin:
    __slots__ = ("counts", "residual")

    def __init__(self, n: int, capacity: int) -> None:
        self.counts = [0] * n
        self.residual = capacity

    def put(self, item: int, weight: int, count: int = 1) -> None:
        self.counts[item] += count
        self.residual -= weight * count

    def to_pattern(self) -> structs.Pattern:
        return structs.Pattern(counts=tuple(self.counts))


def _to_solution(bins: tp.Iterable[_OpenBin]) -> structs.Solution:
    return instance_tools.group_bins(b.to_pattern() for b in bins)


def best_fit_decreasing(
    inst: structs.Instance, demands: tp.Optional[tp.Sequence[int]] = None
) -> structs.Solution:
    """Pack units by decreasing weight, each into the fullest bin where it still fits.

    Args:
        inst: A canonical instance.
        demands: Residual demands to pack instead of the instance demands (optional).

    Returns:
        structs.Solution: The packing.
    """
    residual = _residual_demands(inst, demands)
    bins: tp.List[_OpenBin] = []
    for i, (weight, demand) in enumerate(zip(inst.weights, residual)):
        for __ in range(demand):
            fitting = [b for b in bins if b.residual >= weight]
            if fitting:
                target = min(fitting, key=lambda b: b.residual)
            else:
                target = _OpenBin(n=inst.n, capacity=inst.capacity)
                bins.append(target)
            target.put(item=i, weight=weight)
    return _to_solution(bins)


def first_fit_n(
    inst: structs.Instance, demands: tp.Optional[tp.Sequence[int]] = None
) -> structs.Solution:
    """First fit with pre-allocated large items.

    Every unit of an item weighing at least `ceil(c / 2)` opens its own bin, then
    the remaining units go first-fit into the bins in opening order.
    """
    residual = list(_residual_demands(inst, demands))
    bins: tp.List[_OpenBin] = []
    for i in _half_or_more(inst):
        for __ in range(residual[i]):
            seeded = _OpenBin(n=inst.n, capacity=inst.capacity)
            seeded.put(item=i, weight=inst.weights[i])
            bins.append(seeded)
        residual[i] = 0

    for i, (weight, demand) in enumerate(zip(inst.weights, residual)):
        for __ in range(demand):
            target = next((b for b in bins if b.residual >= weight), None)
            if target is None:
                target = _OpenBin(n=inst.n, capacity=inst.capacity)
                bins.append(target)
            target.put(item=i, weight=weight)
    return _to_solution(bins)


def subset_sum_n_heuristic(
    inst: structs.Instance, demands: tp.Optional[tp.Sequence[int]] = None
) -> structs.Solution:
    """Pre-allocate large items, then fill bins one at a time by subset-sum.

    Seeded bins are filled first, largest residual capacity first; fresh bins of
    full capacity follow until every unit is packed.
    """
    remaining = list(_residual_demands(inst, demands))
    bins: tp.List[_OpenBin] = []
    for i in _half_or_more(inst):
        for __ in range(remaining[i]):
            seeded = _OpenBin(n=inst.n, capacity=inst.capacity)
            seeded.put(item=i, weight=inst.weights[i])
            bins.append(seeded)
        remaining[i] = 0

    def _fill(target: _OpenBin) -> None:
        fill = knapsack.solve_subset_sum(
            weights=inst.weights, bounds=remaining, capacity=target.residual
        )
        for i, count in enumerate(fill.counts):
            if count:
                target.put(item=i, weight=inst.weights[i], count=count)
                remaining[i] -= count

    for seeded in sorted(bins, key=lambda b: -b.residual):
        if not any(remaining):
            break
        _fill(seeded)

    while any(remaining):
        fresh = _OpenBin(n=inst.n, capacity=inst.capacity)
        _fill(fresh)
        bins.append(fresh)

    return _to_solution(bins)


def lower_bound(inst: structs.Instance, demands: tp.Optional[tp.Sequence[int]] = None) -> int:
    """Return the largest of the L1, Martello-Toth L2 and single-size lower bounds.

    L2 is maximized over the threshold `k`, scanning `0` and every distinct weight
    not larger than `c / 2`. The single-size bound counts the bins needed by the
    units of one item alone.
    """
    residual = _residual_demands(inst, demands)
    capacity = inst.capacity
    units = [(w, d) for w, d in zip(inst.weights, residual) if d > 0]
    if not units:
        return 0

    total = sum(w * d for w, d in units)
    l1 = -(-total // capacity)

    best_l2 = 0
    thresholds = [0] + sorted({w for w, __ in units if 2 * w <= capacity})
    for k in thresholds:
        n_large = 0
        n_mid = 0
        mid_slack = 0
        small_weight = 0
        for w, d in units:
            if w > capacity - k:
                n_large += d
            elif 2 * w > capacity:
                n_mid += d
                mid_slack += (capacity - w) * d
            elif w >= k:
                small_weight += w * d
        overflow = small_weight - mid_slack
        l2_k = n_large + n_mid + max(0, -(-overflow // capacity))
        best_l2 = max(best_l2, l2_k)

    single_size = max(-(-d // (capacity // w)) for w, d in units)
    return max(l1, best_l2, single_size)


def compute_bounds(
    inst: structs.Instance, demands: tp.Optional[tp.Sequence[int]] = None
) -> structs.BoundPair:
    """Compute the combinatorial lower bound and the best heuristic packing.

    Args:
        inst: A canonical instance.
        demands: Residual demands to pack instead of the instance demands (optional).

    Returns:
        structs.BoundPair: The bounds with the best packing found.
    """
    residual = _residual_demands(inst, demands)
    residual_inst = dataclasses.replace(inst, demands=residual)

    candidates = [
        ("BFD", best_fit_decreasing(inst, demands=residual)),
        ("FF-n", first_fit_n(inst, demands=residual)),
        ("subset-sum-n", subset_sum_n_heuristic(inst, demands=residual)),
    ]
    for name, sol in candidates:
        verification = instance_tools.verify_solution(residual_inst, sol)
        if not verification:
            msg = f"Heuristic {name} produced an invalid packing: {verification.reasons}"
            raise AssertionError(msg)

    best_name, best_sol = min(candidates, key=lambda c: c[1].objective)
    lb = lower_bound(inst, demands=residual)
    LOGGER.debug(
        f"Bounds: lb={lb}, "
        + ", ".join(f"{name}={sol.objective}" for name, sol in candidates)
        + f" (best {best_name})"
    )
    return structs.BoundPair(lb=lb, ub=best_sol.objective, ub_solution=best_sol)
