"""Geometric diving criteria and batch diving."""

import functools
import logging
import sys
import typing as tp

import numpy as np

from geom_bp import consts
from geom_bp import structs

LOGGER = logging.getLogger(__name__)


def lehmer_mean(weights: tp.Sequence[float], p: float) -> float:
    """Return the Lehmer mean `sum(w^p) / sum(w^(p-1))` of a multiset of weights.

    `p=0` gives the harmonic, `p=1` the arithmetic and `p=2` the contra-harmonic mean.
    """
    values = np.asarray(weights, dtype=float)
    if values.size == 0:
        msg = "The Lehmer mean of an empty multiset is undefined."
        raise ValueError(msg)
    if (values <= 0).any():
        msg = f"The Lehmer mean needs positive weights, got {list(weights)}."
        raise ValueError(msg)

    top = values.max()
    scaled = values / top
    return float(top * np.sum(scaled**p) / np.sum(scaled ** (p - 1)))


@functools.lru_cache(maxsize=None)
def _quadrature() -> tp.Tuple[np.ndarray, np.ndarray]:
    nodes, gl_weights = np.polynomial.legendre.leggauss(consts.GAUSS_LEGENDRE_POINTS)
    half = consts.LS_UPPER / 2
    return half * (nodes + 1.0), half * gl_weights


def ls_integral(weights: tp.Sequence[float]) -> float:
    """Integrate `p * L_p(W)` over `p` in `[0, 2]` by Gauss-Legendre quadrature."""
    values = np.asarray(weights, dtype=float)
    if values.size and (values == values[0]).all() and values[0] > 0:
        # L_p is constant for a single distinct weight
        return float(consts.LS_UPPER**2 / 2 * values[0])

    nodes, gl_weights = _quadrature()
    integrand = np.array([p * lehmer_mean(values, p) for p in nodes])
    return float(np.dot(gl_weights, integrand))


class DivingCriterion:
    """Scores a column `(pattern, value)` of the master LP.

    `HIGHEST_VALUE` scores the LP value of the column, the other kinds score the
    Lehmer statistic of the bin's expanded weight multiset.
    """

    def __init__(self, kind: consts.Criterion = consts.Criterion.L2) -> None:
        self.kind = consts.Criterion(kind)

    def score(self, pattern: structs.Pattern, value: float, weights: tp.Sequence[int]) -> float:
        if self.kind == consts.Criterion.HIGHEST_VALUE:
            return float(value)

        packed = pattern.expanded_weights(weights)
        if self.kind == consts.Criterion.L0:
            return lehmer_mean(packed, p=0.0)
        if self.kind == consts.Criterion.L2:
            return lehmer_mean(packed, p=2.0)
        return ls_integral(packed)

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__}: kind={self.kind.value}>"


def score_bins(
    lp: structs.LpSolution, crit: DivingCriterion, weights: tp.Sequence[int]
) -> tp.List[tp.Tuple[structs.Pattern, float]]:
    """Rank the columns with positive LP value by decreasing criterion score.

    Ties go to the lexicographically larger count vector, i.e. the bin holding
    more of the larger items.

    Returns:
        List[Tuple[structs.Pattern, float]]: Ranked `(pattern, score)` pairs, empty when
        no column has positive value.
    """
    scored = [(p, crit.score(p, value=v, weights=weights)) for p, v in lp.support(consts.EPS_INT)]
    scored.sort(key=lambda r: (-r[1], tuple(-x for x in r[0].counts)))
    return scored


class _BatchSearch:
    """Depth-first branch-and-bound selecting a subset of candidate bins.

    Candidates are visited by decreasing score, including a candidate before
    excluding it; the bound adds every positive score still available.
    """

    def __init__(
        self,
        candidates: tp.Sequence[tp.Tuple[structs.Pattern, float]],
        residual: tp.Sequence[int],
        equality: bool,
        node_cap: int,
    ) -> None:
        self._patterns = [p for p, __ in candidates]
        self._scores = [s for __, s in candidates]
        self._equality = equality
        self._node_cap = node_cap
        self._need = list(residual)

        k = len(candidates)
        self._positive_tail = [0.0] * (k + 1)
        for j in range(k - 1, -1, -1):
            self._positive_tail[j] = self._positive_tail[j + 1] + max(self._scores[j], 0.0)
        n = len(residual)
        self._coverage_tail = [[0] * n for __ in range(k + 1)]
        for j in range(k - 1, -1, -1):
            counts = self._patterns[j].counts
            self._coverage_tail[j] = [a + b for a, b in zip(self._coverage_tail[j + 1], counts)]

        self._chosen: tp.List[int] = []
        self.best: tp.Optional[tp.List[int]] = None
        self.best_objective = -np.inf
        self.nodes = 0
        self.capped = False

    def _search(self, level: int, objective: float) -> None:
        self.nodes += 1
        if self.nodes > self._node_cap:
            self.capped = True
            return

        if self._equality:
            if any(need > cover for need, cover in zip(self._need, self._coverage_tail[level])):
                return
            complete = not any(self._need)
        else:
            complete = True
        if complete and objective > self.best_objective + consts.CAP_TOL:
            self.best_objective = objective
            self.best = list(self._chosen)

        if level == len(self._patterns):
            return
        if objective + self._positive_tail[level] <= self.best_objective + consts.CAP_TOL:
            return

        counts = self._patterns[level].counts
        score = self._scores[level]
        fits = all(x <= need for x, need in zip(counts, self._need))
        if fits and (self._equality or score > 0):
            self._need = [need - x for x, need in zip(counts, self._need)]
            self._chosen.append(level)
            self._search(level + 1, objective + score)
            self._chosen.pop()
            self._need = [need + x for x, need in zip(counts, self._need)]
            if self.capped:
                return
        self._search(level + 1, objective)

    def run(self) -> tp.Optional[tp.List[int]]:
        depth_needed = len(self._patterns) + 50
        if sys.getrecursionlimit() < depth_needed:
            sys.setrecursionlimit(depth_needed)
        self._search(level=0, objective=0.0)
        return self.best


def batch_dive(
    lp: structs.LpSolution,
    residual: tp.Sequence[int],
    crit: DivingCriterion,
    weights: tp.Sequence[int],
    mode: consts.BatchMode = consts.BatchMode.INEQUALITY,
    maximize: bool = True,
    node_cap: int = consts.BATCH_NODE_CAP,
) -> structs.BatchSelection:
    """Select a batch of positive-valued columns with the best total criterion score.

    In equality mode the batch must cover the residual demands exactly; when no
    such batch exists the selection falls back to the inequality mode.

    Args:
        lp: A master LP solution.
        residual: Residual demand of every item.
        crit: A diving criterion.
        weights: Item weights in canonical order.
        mode: Equality or inequality demand constraints (optional, inequality by default).
        maximize: Maximize the total score (optional, `False` minimizes it).
        node_cap: A limit on branch-and-bound nodes (optional).

    Returns:
        structs.BatchSelection: The selected bins.
    """
    ranked = score_bins(lp, crit=crit, weights=weights)
    if not maximize:
        ranked = sorted(
            ((p, -s) for p, s in ranked), key=lambda r: (-r[1], tuple(-x for x in r[0].counts))
        )

    def _select(equality: bool) -> _BatchSearch:
        search = _BatchSearch(
            candidates=ranked, residual=residual, equality=equality, node_cap=node_cap
        )
        search.run()
        if search.capped:
            LOGGER.warning(f"Batch selection stopped after {node_cap} nodes")
        return search

    fell_back = False
    search = _select(equality=mode == consts.BatchMode.EQUALITY)
    if search.best is None:
        LOGGER.debug("No exact cover among the candidate bins, selecting with `<=` rows")
        fell_back = True
        search = _select(equality=False)

    chosen = search.best or []
    objective = sum(ranked[j][1] for j in chosen)
    if not maximize:
        objective = -objective
    return structs.BatchSelection(
        chosen=tuple(ranked[j][0] for j in chosen),
        mode=mode,
        objective=objective,
        optimal=not search.capped,
        fell_back=fell_back,
    )
