import dataclasses
import itertools
import logging
import time

import pytest

from geom_bp import consts
from geom_bp import heuristics
from geom_bp import instance_tools
from geom_bp import solver_helpers
from geom_bp import solver_klass
from geom_bp import structs
from tests import oracles
from tests.oracles import pattern_of

CONFIG_SWEEP = list(
    itertools.product(list(consts.Criterion), (0, consts.DEFAULT_BATCH_STRIDE), (True, False))
)


def _check_report(inst: structs.Instance, report: structs.SolveReport) -> None:
    assert instance_tools.verify_solution(inst, report.solution)
    assert report.solution.objective == report.optimum
    assert report.lower_bound <= report.optimum
    assert report.n_poll_node <= report.n_total_node


class TestSolve:
    @pytest.mark.parametrize("criterion", list(consts.Criterion))
    def test_example1(self, example1: structs.Instance, criterion: consts.Criterion):
        report = solver_klass.GeomBP(criterion=criterion).solve(example1)
        _check_report(example1, report)
        assert report.optimum == 3
        assert report.proved_optimal
        assert report.lower_bound == 3
        assert report.gap == 0

    def test_full_items(self):
        inst = instance_tools.canonicalize(capacity=100, weights=[100], demands=[9])
        report = solver_klass.GeomBP().solve(inst)
        _check_report(inst, report)
        assert report.optimum == 9
        assert report.proved_optimal
        assert report.n_total_node == 1

    def test_bfd_trap(self, bfd_trap: structs.Instance):
        report = solver_klass.GeomBP().solve(bfd_trap)
        _check_report(bfd_trap, report)
        assert report.optimum == 2
        assert report.proved_optimal

    @pytest.mark.parametrize("criterion", list(consts.Criterion))
    @pytest.mark.parametrize("seed", range(200))
    def test_random_exact(self, seed: int, criterion: consts.Criterion):
        inst = oracles.random_instance(seed=seed)
        report = solver_klass.GeomBP(criterion=criterion).solve(inst)
        _check_report(inst, report)
        assert report.proved_optimal
        assert report.optimum == oracles.bpp_optimum(inst)
        assert report.lower_bound == report.optimum

    @pytest.mark.parametrize(("criterion", "stride", "sectional"), CONFIG_SWEEP)
    @pytest.mark.parametrize("seed", range(50))
    def test_config_sweep(
        self, seed: int, criterion: consts.Criterion, stride: int, sectional: bool
    ):
        inst = oracles.random_instance(seed=1000 + seed)
        solver = solver_klass.GeomBP(criterion=criterion, batch_stride=stride, sectional=sectional)
        report = solver.solve(inst)
        _check_report(inst, report)
        assert report.proved_optimal
        assert report.optimum == oracles.bpp_optimum(inst)

    @pytest.mark.parametrize("seed", range(20))
    def test_equality_batches(self, seed: int):
        inst = oracles.random_instance(seed=2000 + seed)
        solver = solver_klass.GeomBP(batch_mode=consts.BatchMode.EQUALITY, batch_stride=1)
        report = solver.solve(inst)
        _check_report(inst, report)
        assert report.proved_optimal
        assert report.optimum == oracles.bpp_optimum(inst)

    def test_root_only(self, example1: structs.Instance):
        report = solver_klass.GeomBP(branching=False).solve(example1)
        _check_report(example1, report)
        assert report.n_total_node == 1
        assert report.n_poll_node == 0
        assert report.n_exact_root >= 1
        assert report.root_z_lp == pytest.approx(oracles.lp_value(example1), abs=1e-6)

    @pytest.mark.parametrize("seed", range(100))
    def test_root_only_counters(self, seed: int):
        inst = oracles.random_instance(seed=seed)
        report = solver_klass.GeomBP(branching=False).solve(inst)
        _check_report(inst, report)
        assert report.n_total_node == 1
        assert report.n_poll_node == 0
        assert report.n_exact_root >= 1
        assert report.root_z_lp == pytest.approx(oracles.lp_value(inst), abs=1e-6)

    def test_closed_root_gap_stops_the_search(
        self,
        example1: structs.Instance,
        monkeypatch: pytest.MonkeyPatch,
        caplog: pytest.LogCaptureFixture,
    ):
        compute_bounds = heuristics.compute_bounds
        monkeypatch.setattr(
            heuristics,
            "compute_bounds",
            lambda inst: dataclasses.replace(compute_bounds(inst), lb=0),
        )
        with caplog.at_level(logging.INFO, logger=solver_klass.__name__):
            report = solver_klass.GeomBP(batch_stride=0).solve(example1)
        assert "Root bound closes the gap" in caplog.text
        assert report.n_total_node == 1
        assert report.proved_optimal
        assert report.lower_bound == 3


    def test_time_limit(self):
        inst = oracles.random_instance(seed=0)
        report = solver_klass.GeomBP().solve(inst, time_limit=0.0)
        _check_report(inst, report)
        assert report.timed_out
        assert report.n_total_node == 0
        assert report.proved_optimal == (report.optimum <= heuristics.lower_bound(inst))

    def test_repr(self):
        assert "l2" in repr(solver_klass.GeomBP())


class TestNodeBound:
    @pytest.fixture
    def root_outcome(self, example1: structs.Instance) -> structs.ColGenOutcome:
        solver = solver_klass.GeomBP()
        return solver.g_colgen.generate_columns(solver.g_colgen.initialize_pool(example1))

    def test_root(self, example1: structs.Instance, root_outcome: structs.ColGenOutcome):
        root = structs.NodeState(residual=example1.demands)
        bound = solver_klass.GeomBP().node_bound(root, root_outcome)
        assert bound == structs.NodeBound(value=3, certifying=True)

    def test_leaf(self, example1: structs.Instance):
        leaf = structs.NodeState(
            residual=(0,) * example1.n,
            fixed_bins=(structs.Bin(pattern=pattern_of(example1, 72), load=2),),
        )
        bound = solver_klass.GeomBP().node_bound(leaf, None)
        assert bound == structs.NodeBound(value=2, certifying=True)

    def test_premature(self, example1: structs.Instance, root_outcome: structs.ColGenOutcome):
        premature = dataclasses.replace(root_outcome, proven_optimal=False)
        root = structs.NodeState(residual=example1.demands)
        bound = solver_klass.GeomBP().node_bound(root, premature)
        assert bound.value == 3
        assert not bound.certifying

    def test_parent_bound(self, example1: structs.Instance, root_outcome: structs.ColGenOutcome):
        node = structs.NodeState(residual=example1.demands, parent_bound=5)
        bound = solver_klass.GeomBP().node_bound(node, root_outcome)
        assert bound.value == 5


class TestRootGapCheck:
    @pytest.fixture
    def root_outcome(self, example1: structs.Instance) -> structs.ColGenOutcome:
        solver = solver_klass.GeomBP()
        return solver.g_colgen.generate_columns(solver.g_colgen.initialize_pool(example1))

    def test_closed(self, example1: structs.Instance, root_outcome: structs.ColGenOutcome):
        status = solver_klass.GeomBP().root_gap_check(example1, root_outcome, incumbent=3)
        assert status == consts.GapStatus.CLOSED

    def test_open(self, example1: structs.Instance, root_outcome: structs.ColGenOutcome):
        status = solver_klass.GeomBP().root_gap_check(example1, root_outcome, incumbent=4)
        assert status == consts.GapStatus.OPEN

    def test_premature_is_open(
        self, example1: structs.Instance, root_outcome: structs.ColGenOutcome
    ):
        premature = dataclasses.replace(root_outcome, proven_optimal=False)
        status = solver_klass.GeomBP().root_gap_check(example1, premature, incumbent=3)
        assert status == consts.GapStatus.OPEN

    def test_nothing_to_pack(self, example1: structs.Instance):
        status = solver_klass.GeomBP().root_gap_check(example1, None, incumbent=0)
        assert status == consts.GapStatus.CLOSED


class TestHelpers:
    def test_filter_pool(self, example1: structs.Instance, example1_bins):
        residual = (0, 1, 1, 1, 1, 1)
        forbidden = frozenset({pattern_of(example1, 54, 34)})
        kept = solver_helpers._filter_pool(example1_bins, residual, forbidden)
        assert kept == [
            pattern_of(example1, 34, 33, 18),
            pattern_of(example1, 54, 33),
            pattern_of(example1, 54, 19, 18),
        ]

    def test_subtract(self, example1: structs.Instance):
        residual = solver_helpers._subtract(example1.demands, pattern_of(example1, 72, 19))
        assert residual == (0, 1, 1, 1, 0, 1)


class TestProcessNode:
    @staticmethod
    def _state(inst: structs.Instance, time_left: float = 60.0) -> solver_helpers.SearchState:
        return solver_helpers.SearchState(
            instance=inst,
            incumbent=heuristics.compute_bounds(inst).ub_solution,
            lower_bound=0,
            deadline=time.perf_counter() + time_left,
        )

    def test_premature_outcome_is_passed_to_children(self, bfd_trap: structs.Instance):
        solver = solver_klass.GeomBP(batch_stride=0)
        root = structs.NodeState(residual=bfd_trap.demands)
        # past the deadline column generation stops before pricing
        outcome, children = solver._process_node(self._state(bfd_trap, time_left=-1.0), root)
        assert outcome is not None
        assert outcome.premature
        assert len(children) == 2
        assert all(child.premature for child in children)

    def test_premature_parent_is_logged(
        self, example1: structs.Instance, caplog: pytest.LogCaptureFixture
    ):
        node = structs.NodeState(residual=example1.demands, premature=True)
        with caplog.at_level(logging.DEBUG, logger=solver_klass.__name__):
            solver_klass.GeomBP()._process_node(self._state(example1), node)
        assert "under a premature parent" in caplog.text
