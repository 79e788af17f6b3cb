"""Helper functions for `GeomBP`."""

import dataclasses
import logging
import time
import typing as tp

from geom_bp import consts
from geom_bp import diving
from geom_bp import heuristics
from geom_bp import instance_tools
from geom_bp import simplex
from geom_bp import structs
from geom_bp import types as itp

LOGGER = logging.getLogger(__name__)


@dataclasses.dataclass
class SearchState:
    """Mutable bookkeeping of one branch-and-price run."""

    instance: structs.Instance
    incumbent: structs.Solution
    lower_bound: int
    deadline: float
    n_total_node: int = 0
    n_poll_node: int = 0
    pricing_time: float = 0.0
    # False once a node is dropped without a proof
    complete: bool = True
    timed_out: bool = False

    @property
    def closed(self) -> bool:
        return self.incumbent.objective <= self.lower_bound

    def past_deadline(self) -> bool:
        return time.perf_counter() > self.deadline


def _subtract(
    residual: tp.Sequence[int], pattern: structs.Pattern, load: int = 1
) -> itp.CountsVector:
    return tuple(d - load * x for d, x in zip(residual, pattern.counts))


def _filter_pool(
    pool: tp.Iterable[structs.Pattern],
    residual: tp.Sequence[int],
    forbidden: tp.AbstractSet[structs.Pattern] = frozenset(),
) -> tp.List[structs.Pattern]:
    """Drop columns that exceed the residual demands, are forbidden or are empty on it."""
    kept = []
    for pattern in pool:
        if pattern in forbidden or not pattern.fits_within(residual):
            continue
        if not any(x and d for x, d in zip(pattern.counts, residual)):
            continue
        kept.append(pattern)
    return kept


def _lp_to_bins(lp: structs.LpSolution) -> tp.List[structs.Bin]:
    """Round an integral LP solution to bins."""
    bins = []
    for pattern, value in lp.support(consts.EPS_INT):
        load = round(value)
        if load > 0:
            bins.append(structs.Bin(pattern=pattern, load=load))
    return bins


def _offer_incumbent(state: SearchState, sol: structs.Solution, source: str) -> bool:
    """Replace the incumbent by a verified better solution."""
    if sol.objective >= state.incumbent.objective:
        return False

    verification = instance_tools.verify_solution(state.instance, sol)
    if not verification:
        LOGGER.warning(f"Discarding an invalid {source} solution: {verification.reasons}")
        return False

    LOGGER.info(f"New incumbent with {sol.objective} bins from {source}")
    state.incumbent = sol
    return True


def _plunge(
    solver_obj: "itp.GeomBP",
    state: SearchState,
    node: structs.NodeState,
    outcome: structs.ColGenOutcome,
) -> None:
    """Dive from a node by repeated batch selections, offering the result as incumbent.

    Each round fixes the selected batch (or the top ranked bin when the batch is
    empty) and re-optimizes the residual problem without forbidden bins. A
    remainder left after the last round is packed by subset-sum-ñ.
    """
    config = solver_obj.config
    inst = state.instance
    fixed = list(node.fixed_bins)
    residual = node.residual
    lp = outcome.lp_solution

    for __ in range(config.plunge_rounds):
        if not any(residual) or state.past_deadline():
            break

        selection = diving.batch_dive(
            lp,
            residual=residual,
            crit=solver_obj.criterion,
            weights=inst.weights,
            mode=config.batch_mode,
            maximize=config.batch_maximize,
            node_cap=config.batch_node_cap,
        )
        chosen = selection.chosen
        if not chosen:
            ranking = diving.score_bins(lp, crit=solver_obj.criterion, weights=inst.weights)
            if not ranking:
                break
            chosen = (ranking[0][0],)

        for pattern in chosen:
            fixed.append(structs.Bin(pattern=pattern, load=1))
            residual = _subtract(residual, pattern)
        if not any(residual):
            break

        master = simplex.RestrictedMaster(
            instance=inst,
            rhs=residual,
            columns=_filter_pool(lp.columns, residual),
            pool_cap=config.pool_cap,
        )
        dive_outcome = solver_obj.g_colgen.generate_columns(master, deadline=state.deadline)
        if dive_outcome.infeasible:
            break
        lp = dive_outcome.lp_solution
        if lp.is_integral():
            for sol_bin in _lp_to_bins(lp):
                fixed.append(sol_bin)
                residual = _subtract(residual, sol_bin.pattern, load=sol_bin.load)
            break

    remainder: tp.Tuple[structs.Bin, ...] = ()
    if any(residual):
        remainder = heuristics.subset_sum_n_heuristic(inst, demands=residual).bins
    sol = instance_tools.merge_solutions(fixed, remainder)
    LOGGER.debug(f"Plunge from depth {node.depth} packed {sol.objective} bins")
    _offer_incumbent(state, sol, source=f"a plunge at depth {node.depth}")
