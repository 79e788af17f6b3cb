"""Wrapper for the branch-and-price solver."""

import dataclasses
import logging
import time
import typing as tp

from geom_bp import colgen_group
from geom_bp import consts
from geom_bp import diving
from geom_bp import heuristics
from geom_bp import instance_tools
from geom_bp import simplex
from geom_bp import solver_helpers
from geom_bp import structs

LOGGER = logging.getLogger(__name__)


class GeomBP:
    """Exact bin packing and cutting stock solver based on branch-and-price.

    Nodes are explored depth-first. Every node solves its master LP by column
    generation, then branches on the bin ranked first by the diving criterion: the
    LEFT child packs the bin once, the RIGHT child forbids it.

    Attributes:
        config: Solver configuration.
        criterion: A diving criterion used for branching and batch diving.
    """

    def __init__(self, config: tp.Optional[structs.SolverConfig] = None, **overrides: tp.Any):
        self.config = config or structs.SolverConfig()
        if overrides:
            self.config = dataclasses.replace(self.config, **overrides)
        # enum fields may be given by value
        self.config = dataclasses.replace(
            self.config,
            criterion=consts.Criterion(self.config.criterion),
            batch_mode=consts.BatchMode(self.config.batch_mode),
        )
        self.criterion = diving.DivingCriterion(kind=self.config.criterion)

        # Groups of methods
        self._colgen_group: tp.Optional[colgen_group.ColGenGroup] = None

    @property
    def g_colgen(self) -> colgen_group.ColGenGroup:
        """Column generation group."""
        if not self._colgen_group:
            self._colgen_group = colgen_group.ColGenGroup(solver_obj=self)
        return self._colgen_group

    def node_bound(
        self, node: structs.NodeState, outcome: tp.Optional[structs.ColGenOutcome]
    ) -> structs.NodeBound:
        """Return the lower bound of a node.

        The bound is the fixed bin count plus the rounded-up LP value. It is not
        usable for pruning when column generation terminated prematurely.
        """
        if node.is_leaf or outcome is None:
            return structs.NodeBound(value=node.fixed_count, certifying=True)
        value = node.fixed_count + outcome.lower_bound
        if outcome.premature:
            return structs.NodeBound(value=value, certifying=False)
        return structs.NodeBound(value=max(value, node.parent_bound), certifying=True)

    def root_gap_check(
        self,
        inst: structs.Instance,
        root_outcome: tp.Optional[structs.ColGenOutcome],
        incumbent: int,
    ) -> consts.GapStatus:
        """Check whether the incumbent already meets the rounded root LP bound."""
        if root_outcome is None:
            root_bound = 0
        elif root_outcome.premature or root_outcome.infeasible:
            return consts.GapStatus.OPEN
        else:
            root_bound = root_outcome.lower_bound

        status = consts.GapStatus.CLOSED if incumbent <= root_bound else consts.GapStatus.OPEN
        LOGGER.debug(
            f"Root gap of `{inst.name}`: incumbent {incumbent}, bound {root_bound}, {status.value}"
        )
        return status

    def _node_master(
        self, inst: structs.Instance, node: structs.NodeState
    ) -> simplex.RestrictedMaster:
        if not node.pool:
            master = self.g_colgen.initialize_pool(inst, demands=node.residual)
        else:
            master = simplex.RestrictedMaster(
                instance=inst,
                rhs=node.residual,
                columns=solver_helpers._filter_pool(node.pool, node.residual, node.forbidden),
                pool_cap=self.config.pool_cap,
            )
        if node.forbidden:
            master.remove_columns(lambda p: p in node.forbidden)
        return master

    def _process_node(
        self, state: solver_helpers.SearchState, node: structs.NodeState
    ) -> tp.Tuple[tp.Optional[structs.ColGenOutcome], tp.List[structs.NodeState]]:
        inst = state.instance
        state.n_total_node += 1

        if node.is_leaf:
            leaf_sol = instance_tools.merge_solutions(node.fixed_bins)
            solver_helpers._offer_incumbent(state, leaf_sol, source="a leaf node")
            return None, []

        master = self._node_master(inst, node)
        outcome = self.g_colgen.generate_columns(
            master, forbidden=node.forbidden, deadline=state.deadline
        )
        state.pricing_time += outcome.stats.pricing_time
        if outcome.stats.decrement_solves:
            state.n_poll_node += 1

        if outcome.infeasible:
            if not outcome.proven_optimal:
                state.complete = False
            LOGGER.debug(f"Node at depth {node.depth} is infeasible")
            return outcome, []

        bound = self.node_bound(node, outcome)
        LOGGER.debug(
            f"Node #{state.n_total_node} at depth {node.depth}: z_lp={outcome.z_lp:.6f}, "
            f"bound={bound.value} ({'certified' if bound.certifying else 'premature'}), "
            f"incumbent={state.incumbent.objective}, forbidden={len(node.forbidden)}"
            f"{', under a premature parent' if node.premature else ''}"
        )
        if bound.certifying and bound.value >= state.incumbent.objective:
            return outcome, []

        lp = outcome.lp_solution
        if lp.is_integral():
            int_sol = instance_tools.merge_solutions(
                node.fixed_bins, solver_helpers._lp_to_bins(lp)
            )
            solver_helpers._offer_incumbent(state, int_sol, source="an integral node LP")
            if outcome.proven_optimal:
                return outcome, []

        stride = self.config.batch_stride
        if stride and node.depth % stride == 0:
            solver_helpers._plunge(solver_obj=self, state=state, node=node, outcome=outcome)
            if bound.certifying and bound.value >= state.incumbent.objective:
                return outcome, []

        if not self.config.branching:
            state.complete = False
            return outcome, []

        ranking = diving.score_bins(lp, crit=self.criterion, weights=inst.weights)
        if not ranking:
            LOGGER.warning(f"No bin to branch on at depth {node.depth}")
            state.complete = False
            return outcome, []

        top = ranking[0][0]
        child_bound = bound.value if bound.certifying else node.parent_bound
        pool = tuple(master.columns)
        left = structs.NodeState(
            residual=solver_helpers._subtract(node.residual, top),
            fixed_bins=(*node.fixed_bins, structs.Bin(pattern=top, load=1)),
            forbidden=node.forbidden,
            depth=node.depth + 1,
            parent_bound=child_bound,
            premature=outcome.premature,
            pool=pool,
        )
        right = dataclasses.replace(
            left,
            residual=node.residual,
            fixed_bins=node.fixed_bins,
            forbidden=node.forbidden | {top},
        )
        return outcome, [left, right]

    def solve(
        self, inst: structs.Instance, time_limit: tp.Optional[float] = None
    ) -> structs.SolveReport:
        """Solve an instance to proven optimality or until the time limit.

        Args:
            inst: A canonical instance.
            time_limit: A limit in seconds (optional, `config.time_limit` by default).

        Returns:
            structs.SolveReport: The best packing with its bound certificates and counters.
        """
        start = time.perf_counter()
        limit = self.config.time_limit if time_limit is None else time_limit

        bounds = heuristics.compute_bounds(inst)
        state = solver_helpers.SearchState(
            instance=inst,
            incumbent=bounds.ub_solution,
            lower_bound=bounds.lb,
            deadline=start + limit,
        )
        LOGGER.info(
            f"Solving `{inst.name}`: {inst.n} items, {inst.total_units} units, "
            f"capacity {inst.capacity}, lb={bounds.lb}, ub={bounds.ub}"
        )

        root_outcome: tp.Optional[structs.ColGenOutcome] = None
        stack = [structs.NodeState(residual=inst.demands)]
        while stack:
            if state.n_total_node and state.closed:
                break
            if state.past_deadline():
                state.timed_out = True
                break

            node = stack.pop()
            outcome, children = self._process_node(state, node)
            if state.n_total_node == 1:
                root_outcome = outcome
                if outcome and not outcome.premature and not outcome.infeasible:
                    state.lower_bound = max(state.lower_bound, outcome.lower_bound)
                gap = self.root_gap_check(inst, outcome, incumbent=state.incumbent.objective)
                if gap == consts.GapStatus.CLOSED:
                    LOGGER.info(f"Root bound closes the gap of `{inst.name}`")
                    break
            # LEFT child on top of the stack
            stack.extend(reversed(children))

        proved = state.closed or (not state.timed_out and state.complete and not stack)
        optimum = state.incumbent.objective
        root_stats = root_outcome.stats if root_outcome else structs.ColGenStats()
        report = structs.SolveReport(
            optimum=optimum,
            solution=state.incumbent,
            proved_optimal=proved,
            lower_bound=optimum if proved else state.lower_bound,
            root_z_lp=root_outcome.z_lp if root_outcome else 0.0,
            n_col_root=root_stats.columns_generated,
            n_exact_root=root_stats.exact_pricing_calls,
            n_total_node=state.n_total_node,
            n_poll_node=state.n_poll_node,
            wall_time=time.perf_counter() - start,
            pricing_time=state.pricing_time,
            timed_out=state.timed_out,
        )
        LOGGER.info(
            f"Solved `{inst.name}`: {optimum} bins, proved={proved}, lb={report.lower_bound}, "
            f"nodes={report.n_total_node}, polluted={report.n_poll_node}, "
            f"time={report.wall_time:.3f}s"
        )
        return report

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__}: criterion={self.criterion.kind.value}>"
