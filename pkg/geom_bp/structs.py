import dataclasses
import typing as tp

from geom_bp import consts
from geom_bp import types as itp


@dataclasses.dataclass(frozen=True, order=True)
class Item:
    weight: int
    demand: int


@dataclasses.dataclass(frozen=True, order=True)
class Pattern:
    """A single bin: replication count of every item, in canonical item order."""

    counts: itp.CountsVector

    @classmethod
    def zero(cls, n: int) -> "Pattern":
        return cls(counts=(0,) * n)

    @classmethod
    def singleton(cls, n: int, item: int, count: int = 1) -> "Pattern":
        counts = [0] * n
        counts[item] = count
        return cls(counts=tuple(counts))

    @property
    def is_zero(self) -> bool:
        return not any(self.counts)

    @property
    def units(self) -> int:
        return sum(self.counts)

    def weight(self, weights: tp.Sequence[int]) -> int:
        return sum(w * x for w, x in zip(weights, self.counts))

    def fits_within(self, bounds: tp.Sequence[int]) -> bool:
        return all(0 <= x <= u for x, u in zip(self.counts, bounds))

    def expanded_weights(self, weights: tp.Sequence[int]) -> tp.List[int]:
        """Return the multiset of item weights packed in the bin."""
        return [w for w, x in zip(weights, self.counts) for __ in range(x)]


@dataclasses.dataclass(frozen=True, order=True)
class Instance:
    """Cutting stock view of a bin packing instance.

    Weights are pairwise distinct and strictly decreasing; every module indexes
    items in this order.
    """

    capacity: int
    weights: itp.CountsVector
    demands: itp.CountsVector
    name: str = dataclasses.field(default="", compare=False)

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def items(self) -> tp.Tuple[Item, ...]:
        return tuple(Item(weight=w, demand=d) for w, d in zip(self.weights, self.demands))

    @property
    def total_units(self) -> int:
        return sum(self.demands)

    @property
    def total_weight(self) -> int:
        return sum(w * d for w, d in zip(self.weights, self.demands))

    def is_feasible(self, pattern: Pattern) -> bool:
        """Check capacity and per-item demand bounds of a pattern."""
        return (
            len(pattern.counts) == self.n
            and pattern.fits_within(self.demands)
            and pattern.weight(self.weights) <= self.capacity
        )


@dataclasses.dataclass(frozen=True, order=True)
class Bin:
    pattern: Pattern
    load: int


@dataclasses.dataclass(frozen=True, order=True)
class Solution:
    bins: tp.Tuple[Bin, ...] = ()

    @property
    def objective(self) -> int:
        return sum(b.load for b in self.bins)

    def coverage(self, n: int) -> itp.CountsVector:
        """Return the number of packed units of every item."""
        covered = [0] * n
        for b in self.bins:
            for i, x in enumerate(b.pattern.counts):
                covered[i] += x * b.load
        return tuple(covered)


@dataclasses.dataclass(frozen=True)
class Verification:
    ok: bool
    reasons: tp.Tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


@dataclasses.dataclass(frozen=True)
class PricingProblem:
    """Knapsack pricing sub-problem.

    `profit_cap` is set only for the decrement-constrained problem, where it bounds
    the reduced cost `profit - 1` from above.
    """

    profits: itp.RealVector
    weights: itp.CountsVector
    capacity: int
    bounds: itp.CountsVector
    profit_cap: tp.Optional[float] = None

    @property
    def n(self) -> int:
        return len(self.weights)

    def with_cap(self, profit_cap: tp.Optional[float]) -> "PricingProblem":
        return dataclasses.replace(self, profit_cap=profit_cap)

    def profit_of(self, pattern: Pattern) -> float:
        return sum(p * x for p, x in zip(self.profits, pattern.counts))


@dataclasses.dataclass(frozen=True)
class KnapsackResult:
    counts: Pattern
    profit: float

    @property
    def reduced_cost(self) -> float:
        return self.profit - 1.0


@dataclasses.dataclass(frozen=True)
class LpSolution:
    """Result of a restricted master solve.

    For an infeasible master, `objective` is the remaining phase 1 infeasibility and
    `duals` are the phase 1 duals.
    """

    status: consts.LpStatus
    objective: float
    columns: tp.Tuple[Pattern, ...]
    primal: itp.RealVector
    duals: itp.RealVector

    @property
    def is_optimal(self) -> bool:
        return self.status == consts.LpStatus.OPTIMAL

    def support(self, tol: float = consts.EPS_INT) -> tp.List[tp.Tuple[Pattern, float]]:
        """Return columns with value above `tol`, in pool order."""
        return [(p, v) for p, v in zip(self.columns, self.primal) if v > tol]

    def is_integral(self, tol: float = consts.EPS_INT) -> bool:
        return all(abs(v - round(v)) <= tol for v in self.primal)


@dataclasses.dataclass(frozen=True)
class ColGenStats:
    columns_generated: int = 0
    exact_pricing_calls: int = 0
    decrement_solves: int = 0
    iterations: int = 0
    pricing_time: float = 0.0


@dataclasses.dataclass(frozen=True)
class ColGenOutcome:
    z_lp: float
    lower_bound: int
    lp_solution: LpSolution
    proven_optimal: bool
    stats: ColGenStats
    infeasible: bool = False

    @property
    def premature(self) -> bool:
        return not self.proven_optimal


@dataclasses.dataclass(frozen=True)
class BoundPair:
    lb: int
    ub: int
    ub_solution: Solution


@dataclasses.dataclass(frozen=True)
class BatchSelection:
    chosen: tp.Tuple[Pattern, ...]
    mode: consts.BatchMode
    objective: float = 0.0
    optimal: bool = True
    fell_back: bool = False

    def coverage(self, n: int) -> itp.CountsVector:
        covered = [0] * n
        for p in self.chosen:
            for i, x in enumerate(p.counts):
                covered[i] += x
        return tuple(covered)


@dataclasses.dataclass(frozen=True)
class NodeState:
    residual: itp.CountsVector
    fixed_bins: tp.Tuple[Bin, ...] = ()
    forbidden: tp.FrozenSet[Pattern] = frozenset()
    depth: int = 0
    parent_bound: int = 0
    premature: bool = False
    # columns inherited from the parent master (copy-on-branch)
    pool: tp.Tuple[Pattern, ...] = ()

    @property
    def fixed_count(self) -> int:
        return sum(b.load for b in self.fixed_bins)

    @property
    def is_leaf(self) -> bool:
        return not any(self.residual)


@dataclasses.dataclass(frozen=True)
class NodeBound:
    value: int
    certifying: bool


@dataclasses.dataclass(frozen=True)
class SolveReport:
    optimum: int
    solution: Solution
    proved_optimal: bool
    lower_bound: int
    root_z_lp: float
    n_col_root: int = 0
    n_exact_root: int = 0
    n_total_node: int = 0
    n_poll_node: int = 0
    wall_time: float = 0.0
    pricing_time: float = 0.0
    timed_out: bool = False

    @property
    def gap(self) -> int:
        return self.optimum - self.lower_bound


@dataclasses.dataclass(frozen=True)
class RunRecord:
    instance_name: str
    class_label: str
    optimum: tp.Optional[int] = None
    lower_bound: tp.Optional[int] = None
    proved: bool = False
    wall_time: float = 0.0
    n_col_root: int = 0
    n_exact_root: int = 0
    n_total_node: int = 0
    n_poll_node: int = 0
    trivial: bool = False
    error: str = ""

    @property
    def failed(self) -> bool:
        return bool(self.error)


@dataclasses.dataclass(frozen=True)
class SolverConfig:
    criterion: consts.Criterion = consts.Criterion.L2
    delta0: float = consts.DELTA0
    delta_max: float = consts.DELTA_MAX
    time_limit: float = consts.DEFAULT_TIME_LIMIT
    # batch diving runs at depths divisible by the stride; 0 disables it
    batch_stride: int = consts.DEFAULT_BATCH_STRIDE
    batch_mode: consts.BatchMode = consts.BatchMode.INEQUALITY
    # False restores the literal `min` objective of the batch selection model
    batch_maximize: bool = True
    batch_node_cap: int = consts.BATCH_NODE_CAP
    sectional: bool = True
    # False stops after the root node
    branching: bool = True
    pool_cap: tp.Optional[int] = None
    max_colgen_iterations: tp.Optional[int] = None
    plunge_rounds: int = consts.DEFAULT_PLUNGE_ROUNDS
