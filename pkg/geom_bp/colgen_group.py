"""Group of methods for column generation."""

import dataclasses
import logging
import math
import time
import typing as tp

from geom_bp import consts
from geom_bp import heuristics
from geom_bp import knapsack
from geom_bp import simplex
from geom_bp import structs
from geom_bp import types as itp

LOGGER = logging.getLogger(__name__)


@dataclasses.dataclass
class _Counters:
    columns_generated: int = 0
    exact_pricing_calls: int = 0
    decrement_solves: int = 0
    iterations: int = 0
    pricing_time: float = 0.0

    def freeze(self) -> structs.ColGenStats:
        return structs.ColGenStats(**dataclasses.asdict(self))


@dataclasses.dataclass(frozen=True)
class _Priced:
    """Result of one pricing round.

    `pattern` is None when no improving column was found. `certified` is False when
    the verdict depends on a decrement chain or a grown decrement.
    """

    pattern: tp.Optional[structs.Pattern]
    certified: bool


class ColGenGroup:
    def __init__(self, solver_obj: "itp.GeomBP") -> None:
        self._solver_obj = solver_obj

    def initialize_pool(
        self, inst: structs.Instance, demands: tp.Optional[tp.Sequence[int]] = None
    ) -> simplex.RestrictedMaster:
        """Create a restricted master seeded with singleton and subset-sum-ñ columns.

        Args:
            inst: A canonical instance.
            demands: Residual demands used as the right-hand side (optional).

        Returns:
            simplex.RestrictedMaster: A feasible restricted master.
        """
        residual = tuple(inst.demands if demands is None else demands)
        columns = [
            structs.Pattern.singleton(inst.n, i, min(d, inst.capacity // inst.weights[i]))
            for i, d in enumerate(residual)
            if d > 0
        ]
        heuristic_sol = heuristics.subset_sum_n_heuristic(inst, demands=residual)
        columns.extend(b.pattern for b in heuristic_sol.bins)

        master = simplex.RestrictedMaster(
            instance=inst,
            rhs=residual,
            columns=dict.fromkeys(columns),
            pool_cap=self._solver_obj.config.pool_cap,
        )
        LOGGER.debug(f"Initial pool of {master.num_columns} columns for {master.num_rows} rows")
        return master

    def _decrement_chain(
        self,
        problem: structs.PricingProblem,
        start: structs.KnapsackResult,
        column_cost: float,
        forbidden: tp.AbstractSet[structs.Pattern],
        counters: _Counters,
    ) -> _Priced:
        """Walk below a forbidden optimum with decrement-constrained knapsack solves."""
        config = self._solver_obj.config
        delta = config.delta0
        value = start.profit - column_cost
        repeats = 0
        grew = False

        while True:
            counters.decrement_solves += 1
            # the cap bounds `profit - 1`, the value is `profit - column_cost`
            cap = value - delta + column_cost - 1.0
            result = knapsack.solve_2d_decrement(problem.with_cap(cap))
            new_value = result.profit - column_cost
            LOGGER.debug(f"Decrement step: delta={delta:g}, cap={cap:.9f}, value={new_value:.9f}")

            if result.counts.is_zero or new_value <= consts.EPS_RC:
                if column_cost == 0.0:
                    return self._exclusion_price(problem, forbidden=forbidden, counters=counters)
                return _Priced(pattern=None, certified=False)
            if result.counts not in forbidden:
                return _Priced(pattern=result.counts, certified=not grew)

            value = new_value
            repeats += 1
            if repeats >= consts.DELTA_REPEATS and delta < config.delta_max:
                delta = min(delta * consts.DELTA_GROWTH, config.delta_max)
                repeats = 0
                grew = True
                LOGGER.debug(f"Growing the decrement to {delta:g}")

    def _exclusion_price(
        self,
        problem: structs.PricingProblem,
        forbidden: tp.AbstractSet[structs.Pattern],
        counters: _Counters,
    ) -> _Priced:
        """Settle phase 1 pricing exactly once the decrement chain bottoms out.

        The chain skips patterns tying with a forbidden optimum, which may be the
        only ones able to repair the master.
        """
        counters.exact_pricing_calls += 1
        result = knapsack.solve_excluding(problem, excluded=forbidden)
        LOGGER.debug(f"Phase 1 pricing without forbidden bins: profit={result.profit:.9f}")
        if result.counts.is_zero or result.profit <= consts.EPS_RC:
            return _Priced(pattern=None, certified=True)
        return _Priced(pattern=result.counts, certified=True)

    def _price(
        self,
        master: simplex.RestrictedMaster,
        lp: structs.LpSolution,
        forbidden: tp.AbstractSet[structs.Pattern],
        counters: _Counters,
    ) -> _Priced:
        inst = master.instance
        # phase 1 duals price columns of zero cost
        column_cost = 1.0 if lp.is_optimal else 0.0
        problem = structs.PricingProblem(
            profits=lp.duals,
            weights=inst.weights,
            capacity=inst.capacity,
            bounds=master.rhs,
        )

        if self._solver_obj.config.sectional and lp.is_optimal:
            section = knapsack.solve_binary(problem)
            if (
                section.profit - column_cost > consts.EPS_RC
                and section.counts not in forbidden
                and section.counts not in master
            ):
                return _Priced(pattern=section.counts, certified=True)

        counters.exact_pricing_calls += 1
        exact = knapsack.solve_bounded(problem)
        if exact.counts.is_zero or exact.profit - column_cost <= consts.EPS_RC:
            return _Priced(pattern=None, certified=True)
        if exact.counts not in forbidden:
            return _Priced(pattern=exact.counts, certified=True)

        LOGGER.debug(f"Pricing regenerated the forbidden bin {exact.counts.counts}")
        return self._decrement_chain(
            problem=problem,
            start=exact,
            column_cost=column_cost,
            forbidden=forbidden,
            counters=counters,
        )

    def generate_columns(
        self,
        master: simplex.RestrictedMaster,
        forbidden: tp.AbstractSet[structs.Pattern] = frozenset(),
        deadline: tp.Optional[float] = None,
    ) -> structs.ColGenOutcome:
        """Solve the master LP by column generation.

        Binary (sectional) pricing runs first, the bounded knapsack proves that no
        column prices out. Forbidden optima are bypassed by a decrement chain, which
        makes the outcome premature when it cannot certify the LP bound.

        Args:
            master: A restricted master, already free of forbidden columns.
            forbidden: Patterns that must not enter the master.
            deadline: A `time.perf_counter()` value after which the loop stops (optional).

        Returns:
            structs.ColGenOutcome: The LP bound with the proof flag and counters.
        """
        inst = master.instance
        config = self._solver_obj.config
        max_iterations = config.max_colgen_iterations or 50 * inst.n + 1000
        counters = _Counters()
        certified = True
        verdict_certified = True
        stop_reason = ""
        last_z = math.inf

        lp = master.solve()
        while True:
            if counters.iterations >= max_iterations:
                stop_reason = f"iteration cap {max_iterations}"
                break
            if deadline is not None and time.perf_counter() > deadline:
                stop_reason = "time limit"
                break
            counters.iterations += 1

            if lp.is_optimal:
                if lp.objective > last_z + consts.FEAS_TOL:
                    LOGGER.debug(f"Master objective rose from {last_z} to {lp.objective}")
                last_z = lp.objective

            pricing_start = time.perf_counter()
            priced = self._price(master, lp=lp, forbidden=forbidden, counters=counters)
            counters.pricing_time += time.perf_counter() - pricing_start
            certified = certified and priced.certified
            verdict_certified = priced.certified

            if priced.pattern is None:
                break
            if not master.add_column(priced.pattern):
                stop_reason = "pricing stall"
                break
            counters.columns_generated += 1
            lp = master.solve()

        if stop_reason:
            certified = False
            LOGGER.warning(
                f"Column generation stopped prematurely ({stop_reason}) after "
                f"{counters.iterations} iterations"
            )

        stats = counters.freeze()
        if not lp.is_optimal:
            if not verdict_certified and not stop_reason:
                LOGGER.warning("Infeasibility of the master is not certified")
            return structs.ColGenOutcome(
                z_lp=math.inf,
                lower_bound=0,
                lp_solution=lp,
                proven_optimal=verdict_certified and not stop_reason,
                stats=stats,
                infeasible=True,
            )

        lower_bound = math.ceil(lp.objective - consts.EPS_INT)
        if any(master.rhs):
            lower_bound = max(lower_bound, 1)
        LOGGER.debug(
            f"Column generation: z_lp={lp.objective:.6f}, certified={certified}, "
            f"columns={stats.columns_generated}, exact calls={stats.exact_pricing_calls}, "
            f"decrement solves={stats.decrement_solves}"
        )
        return structs.ColGenOutcome(
            z_lp=lp.objective,
            lower_bound=lower_bound,
            lp_solution=lp,
            proven_optimal=certified,
            stats=stats,
        )
