"""Two-phase revised simplex for the restricted master problem."""

import logging
import typing as tp

import numpy as np

from geom_bp import consts
from geom_bp import exceptions
from geom_bp import structs

LOGGER = logging.getLogger(__name__)

# simplex enters columns a decade below the pricing threshold so that every column
# admitted by pricing can enter the basis
ENTER_TOL: tp.Final[float] = consts.EPS_RC / 10
TIE_TOL: tp.Final[float] = 1e-12


class RestrictedMaster:
    """Set-partitioning master restricted to a pool of patterns.

    Rows are the items with positive residual demand, each kept as an equality.
    The basis is stored as a list of variable indices: a non-negative index is a
    pool column, `-(r + 1)` is the artificial variable of row `r`.

    Attributes:
        instance: A canonical instance.
        rhs: Residual demand of every item.
        pool_cap: Maximal pool size; least recently basic columns are evicted (optional).
        columns: The column pool, in insertion order.
    """

    def __init__(
        self,
        instance: structs.Instance,
        rhs: tp.Optional[tp.Sequence[int]] = None,
        columns: tp.Iterable[structs.Pattern] = (),
        pool_cap: tp.Optional[int] = None,
    ) -> None:
        self.instance = instance
        self.rhs: tp.Tuple[int, ...] = tuple(instance.demands if rhs is None else rhs)
        if len(self.rhs) != instance.n or any(d < 0 for d in self.rhs):
            msg = f"Invalid residual demands {self.rhs} for {instance.n} items."
            raise exceptions.PatternError(msg)
        self.pool_cap = pool_cap

        self._rows = [i for i, d in enumerate(self.rhs) if d > 0]
        self._b = np.array([self.rhs[i] for i in self._rows], dtype=float)
        self.columns: tp.List[structs.Pattern] = []
        self._index: tp.Dict[structs.Pattern, int] = {}
        self._matrix = np.zeros((len(self._rows), 0))
        self._last_basic: tp.List[int] = []
        self._solves = 0
        self._eta_count = 0
        self._reset_basis()

        for pattern in columns:
            self.add_column(pattern)
        self.ensure_coverage()

    @property
    def num_rows(self) -> int:
        return len(self._rows)

    @property
    def num_columns(self) -> int:
        return len(self.columns)

    def __contains__(self, pattern: object) -> bool:
        return pattern in self._index

    def _reset_basis(self) -> None:
        m = len(self._rows)
        self._basis = [-(r + 1) for r in range(m)]
        self._binv = np.eye(m)
        self._eta_count = 0

    def _column_vector(self, pattern: structs.Pattern) -> np.ndarray:
        return np.array([pattern.counts[i] for i in self._rows], dtype=float)

    def add_column(self, pattern: structs.Pattern) -> bool:
        """Add a pattern to the pool, keeping the current basis as a warm start.

        Returns:
            bool: False when the pattern is already pooled.
        """
        inst = self.instance
        if len(pattern.counts) != inst.n or pattern.is_zero:
            msg = f"Pattern {pattern.counts} is not a non-empty pattern over {inst.n} items."
            raise exceptions.PatternError(msg)
        weight = pattern.weight(inst.weights)
        if weight > inst.capacity:
            msg = f"Pattern {pattern.counts} weighs {weight}, capacity is {inst.capacity}."
            raise exceptions.PatternError(msg)
        if not pattern.fits_within(self.rhs):
            msg = f"Pattern {pattern.counts} exceeds residual demands {self.rhs}."
            raise exceptions.PatternError(msg)

        if pattern in self._index:
            LOGGER.debug(f"Rejecting duplicate column {pattern.counts}")
            return False

        self._index[pattern] = len(self.columns)
        self.columns.append(pattern)
        self._matrix = np.hstack([self._matrix, self._column_vector(pattern).reshape(-1, 1)])
        self._last_basic.append(self._solves)

        if self.pool_cap and len(self.columns) > self.pool_cap:
            self._evict()
        return True

    def _evict(self) -> None:
        basic = {v for v in self._basis if v >= 0}
        newest = len(self.columns) - 1
        candidates = [j for j in range(len(self.columns)) if j not in basic and j != newest]
        if not candidates:
            return
        victim = min(candidates, key=lambda j: (self._last_basic[j], j))
        LOGGER.debug(f"Evicting column {self.columns[victim].counts} from a full pool")
        self._delete_columns({victim})

    def _delete_columns(self, indices: tp.Set[int]) -> None:
        keep = [j for j in range(len(self.columns)) if j not in indices]
        remap = {old: new for new, old in enumerate(keep)}
        basis_lost = any(v >= 0 and v in indices for v in self._basis)

        self.columns = [self.columns[j] for j in keep]
        self._index = {p: j for j, p in enumerate(self.columns)}
        self._matrix = self._matrix[:, keep]
        self._last_basic = [self._last_basic[j] for j in keep]

        if basis_lost:
            self._reset_basis()
        else:
            self._basis = [remap[v] if v >= 0 else v for v in self._basis]

    def remove_columns(self, predicate: tp.Callable[[structs.Pattern], bool]) -> int:
        """Remove matching columns and repair row coverage with singleton columns.

        Returns:
            int: A number of removed columns.
        """
        indices = {j for j, p in enumerate(self.columns) if predicate(p)}
        if indices:
            self._delete_columns(indices)
        self.ensure_coverage(excluded=predicate)
        return len(indices)

    def ensure_coverage(
        self, excluded: tp.Optional[tp.Callable[[structs.Pattern], bool]] = None
    ) -> int:
        """Add a singleton column for every row that no pooled column covers.

        The singleton packs `min(d_i, floor(c / w_i))` copies, or fewer when that
        pattern is `excluded`.

        Returns:
            int: A number of added singleton columns.
        """
        inst = self.instance
        if self.columns:
            covered = (self._matrix > 0).any(axis=1)
        else:
            covered = np.zeros(len(self._rows), dtype=bool)

        added = 0
        for r, i in enumerate(self._rows):
            if covered[r]:
                continue
            most = min(self.rhs[i], inst.capacity // inst.weights[i])
            for count in range(most, 0, -1):
                singleton = structs.Pattern.singleton(inst.n, i, count)
                if excluded is not None and excluded(singleton):
                    continue
                self.add_column(singleton)
                added += 1
                break
            else:
                LOGGER.debug(f"No admissible singleton column for item #{i}")
        return added

    def _refactor(self) -> None:
        m = len(self._rows)
        basis_matrix = np.zeros((m, m))
        for pos, var in enumerate(self._basis):
            if var >= 0:
                basis_matrix[:, pos] = self._matrix[:, var]
            else:
                basis_matrix[-var - 1, pos] = 1.0
        try:
            self._binv = np.linalg.inv(basis_matrix)
        except np.linalg.LinAlgError:
            LOGGER.warning("Singular basis, restarting from the artificial basis")
            self._reset_basis()
        self._eta_count = 0

    def _basic_costs(self, phase: int) -> np.ndarray:
        struct_cost = 0.0 if phase == 1 else 1.0
        art_cost = 1.0 if phase == 1 else 0.0
        return np.array([struct_cost if v >= 0 else art_cost for v in self._basis])

    def _artificial_level(self, x_b: np.ndarray) -> float:
        return float(sum(max(x_b[pos], 0.0) for pos, v in enumerate(self._basis) if v < 0))

    def _ratio_test(
        self, x_b: np.ndarray, direction: np.ndarray, phase: int, bland: bool
    ) -> tp.Optional[int]:
        basis = np.array(self._basis)
        ratios = np.full(len(basis), np.inf)
        positive = direction > consts.PIVOT_TOL
        ratios[positive] = np.maximum(x_b[positive], 0.0) / direction[positive]
        if phase == 2:
            # artificials sitting at zero must leave before they could grow
            forced = (basis < 0) & (np.abs(direction) > consts.PIVOT_TOL)
            ratios[forced] = 0.0

        if not np.isfinite(ratios).any():
            return None
        theta = ratios.min()
        ties = np.flatnonzero(ratios <= theta + TIE_TOL)
        if bland:
            num_cols = len(self.columns)
            return int(min(ties, key=lambda r: basis[r] if basis[r] >= 0 else num_cols - basis[r]))
        return int(min(ties, key=lambda r: (0 if basis[r] < 0 else 1, -abs(direction[r]))))

    def _pivot(self, leave: int, enter: int, direction: np.ndarray) -> None:
        pivot_row = self._binv[leave] / direction[leave]
        self._binv -= np.outer(direction, pivot_row)
        self._binv[leave] = pivot_row
        self._basis[leave] = enter
        self._eta_count += 1
        if self._eta_count >= consts.REFACTOR_EVERY:
            self._refactor()

    def _iterate(self, phase: int) -> int:
        """Run simplex pivots for the given phase until optimality.

        Returns:
            int: A number of pivots.
        """
        m, num_cols = self._matrix.shape
        if num_cols == 0:
            return 0
        struct_costs = np.zeros(num_cols) if phase == 1 else np.ones(num_cols)
        degenerate = 0
        bland = False
        max_iterations = 50 * (m + num_cols) + 1000

        for iteration in range(max_iterations):
            x_b = self._binv @ self._b
            duals = self._basic_costs(phase) @ self._binv
            reduced = struct_costs - duals @ self._matrix
            basic_cols = [v for v in self._basis if v >= 0]
            reduced[basic_cols] = 0.0

            candidates = np.flatnonzero(reduced < -ENTER_TOL)
            if not candidates.size:
                return iteration
            if bland:
                enter = int(candidates[0])
            else:
                enter = int(candidates[np.argmin(reduced[candidates])])

            direction = self._binv @ self._matrix[:, enter]
            leave = self._ratio_test(x_b, direction, phase=phase, bland=bland)
            if leave is None:
                msg = f"Unbounded restricted master in phase {phase}."
                raise exceptions.SimplexError(msg)

            if self._basis[leave] < 0 and phase == 2:
                step = 0.0
            else:
                step = max(x_b[leave], 0.0) / direction[leave]
            if step <= consts.FEAS_TOL:
                degenerate += 1
                if not bland and degenerate > consts.BLAND_FACTOR * (m + num_cols):
                    LOGGER.debug(f"Switching to Bland's rule after {degenerate} degenerate pivots")
                    bland = True
            else:
                degenerate = 0

            self._pivot(leave, enter, direction)

        msg = f"Simplex iteration limit ({max_iterations}) reached in phase {phase}."
        raise exceptions.SimplexError(msg)

    def _solution(self, status: consts.LpStatus, phase: int) -> structs.LpSolution:
        inst = self.instance
        x_b = self._binv @ self._b
        primal = [0.0] * len(self.columns)
        for pos, var in enumerate(self._basis):
            if var >= 0:
                primal[var] = max(float(x_b[pos]), 0.0)
                self._last_basic[var] = self._solves

        row_duals = self._basic_costs(phase) @ self._binv
        duals = [0.0] * inst.n
        for r, i in enumerate(self._rows):
            duals[i] = float(row_duals[r])

        objective = sum(primal) if phase == 2 else self._artificial_level(x_b)
        return structs.LpSolution(
            status=status,
            objective=objective,
            columns=tuple(self.columns),
            primal=tuple(primal),
            duals=tuple(duals),
        )

    def solve(self) -> structs.LpSolution:
        """Re-optimize from the current basis.

        Phase 1 runs only while artificial variables carry positive values.

        Returns:
            structs.LpSolution: Optimal primal values and duals, or the phase 1 result
            with `LpStatus.INFEASIBLE`.
        """
        self._solves += 1
        if not self._rows:
            return structs.LpSolution(
                status=consts.LpStatus.OPTIMAL,
                objective=0.0,
                columns=tuple(self.columns),
                primal=(0.0,) * len(self.columns),
                duals=(0.0,) * self.instance.n,
            )

        self._refactor()
        x_b = self._binv @ self._b
        if any(v < 0 and x_b[pos] > consts.FEAS_TOL for pos, v in enumerate(self._basis)):
            pivots = self._iterate(phase=1)
            x_b = self._binv @ self._b
            infeasibility = self._artificial_level(x_b)
            LOGGER.debug(f"Phase 1 done in {pivots} pivots, infeasibility {infeasibility:.3g}")
            if any(v < 0 and x_b[pos] > consts.FEAS_TOL for pos, v in enumerate(self._basis)):
                return self._solution(status=consts.LpStatus.INFEASIBLE, phase=1)

        self._iterate(phase=2)
        return self._solution(status=consts.LpStatus.OPTIMAL, phase=2)

    def __repr__(self) -> str:
        return (
            f"<{self.__class__.__name__}: rows={len(self._rows)}, columns={len(self.columns)}>"
        )


def solve_rmp(master: RestrictedMaster) -> structs.LpSolution:
    """Solve the restricted master problem to optimality."""
    return master.solve()
