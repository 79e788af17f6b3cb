import enum
import typing as tp

# reduced-cost positivity threshold for admitting a column
EPS_RC: tp.Final[float] = 1e-9
# slack used when rounding LP values up to bin counts and when testing integrality
EPS_INT: tp.Final[float] = 1e-6
# absolute tolerance for comparing knapsack profits
PROFIT_TOL: tp.Final[float] = 1e-9
# slack on the decrement constraint `profit - 1 <= cap`
CAP_TOL: tp.Final[float] = 1e-12
# node budget of the pass that breaks ties between equal-profit knapsack patterns
TIE_BREAK_NODE_CAP: tp.Final[int] = 200_000

PIVOT_TOL: tp.Final[float] = 1e-10
FEAS_TOL: tp.Final[float] = 1e-7
# re-factorize the basis inverse after this many eta updates
REFACTOR_EVERY: tp.Final[int] = 50
# Bland's rule kicks in after `BLAND_FACTOR * (rows + cols)` consecutive degenerate pivots
BLAND_FACTOR: tp.Final[int] = 5

DELTA0: tp.Final[float] = 1e-5
DELTA_MAX: tp.Final[float] = 1e-2
DELTA_GROWTH: tp.Final[float] = 10.0
# consecutive forbidden regenerations before the decrement grows
DELTA_REPEATS: tp.Final[int] = 3

DEFAULT_TIME_LIMIT: tp.Final[float] = 60.0
EXTENDED_TIME_LIMIT: tp.Final[float] = 600.0
DEFAULT_BATCH_STRIDE: tp.Final[int] = 3
BATCH_NODE_CAP: tp.Final[int] = 10**6
DEFAULT_PLUNGE_ROUNDS: tp.Final[int] = 50

GAUSS_LEGENDRE_POINTS: tp.Final[int] = 16
# integration interval of the L_s criterion is [0, LS_UPPER]
LS_UPPER: tp.Final[float] = 2.0

FORMAT_VERSION: tp.Final[str] = "1.0"


class InstanceFormat(enum.Enum):
    BPP = "bpp"
    CSP = "csp"
    AUTO = "auto"


class Criterion(enum.Enum):
    HIGHEST_VALUE = "hv"
    L0 = "l0"
    L2 = "l2"
    LS = "ls"


class BatchMode(enum.Enum):
    EQUALITY = "eq"
    INEQUALITY = "ineq"


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


class GapStatus(enum.Enum):
    CLOSED = "closed"
    OPEN = "open"
