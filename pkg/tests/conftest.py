import typing as tp

import pytest

from geom_bp import consts
from geom_bp import instance_tools
from geom_bp import structs
from tests.oracles import pattern_of

EXAMPLE1_WEIGHTS = (72, 54, 34, 33, 19, 18)
# fractional root bins of the six-item example with their LP values
EXAMPLE1_BINS = (
    ((72, 19), 0.8),
    ((54, 34), 0.4),
    ((34, 33, 18), 0.6),
    ((54, 33), 0.4),
    ((54, 19, 18), 0.2),
    ((72, 18), 0.2),
)


@pytest.fixture
def example1() -> structs.Instance:
    return instance_tools.canonicalize(capacity=100, weights=EXAMPLE1_WEIGHTS, name="example1")


@pytest.fixture
def example1_bins(example1: structs.Instance) -> tp.List[structs.Pattern]:
    return [pattern_of(example1, *weights) for weights, __ in EXAMPLE1_BINS]


@pytest.fixture
def example1_lp(
    example1: structs.Instance, example1_bins: tp.List[structs.Pattern]
) -> structs.LpSolution:
    return structs.LpSolution(
        status=consts.LpStatus.OPTIMAL,
        objective=sum(v for __, v in EXAMPLE1_BINS),
        columns=tuple(example1_bins),
        primal=tuple(v for __, v in EXAMPLE1_BINS),
        duals=(0.0,) * example1.n,
    )


@pytest.fixture
def bfd_trap() -> structs.Instance:
    """An instance where Best Fit Decreasing needs one bin more than the optimum."""
    return instance_tools.canonicalize(capacity=10, weights=[5, 4, 3, 3, 3, 2], name="bfd_trap")
