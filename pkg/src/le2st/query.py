"""Stage-2 label selection: bimodal query, three baselines, and the LP they solve.

Every scheme picks two pool points per call.  Rankings use the model's
unclamped log-odds rather than the clamped posterior, so points deep in a
saturated region are still ordered.  All argmax/argmin ties go to the
lowest id.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .errors import (
    DegenerateInstanceError,
    InfeasibleError,
    InvalidInputError,
    PoolExhaustedError,
)
from .geometry import PointSet
from .posterior import PosteriorModel

__all__ = [
    "QueryState",
    "bimodal_select",
    "passive_select",
    "uncertainty_select",
    "certainty_select",
    "SCHEMES",
    "LpInstance",
    "LpSolution",
    "lp_objective",
    "lp_closed_form",
    "lp_brute_force",
]


@dataclass
class QueryState:
    """Unlabeled pool and the ordered list of labeled ``(id, label)`` pairs."""

    points: PointSet
    pool: set = field(default=None)
    queried: list = field(default_factory=list)

    def __post_init__(self):
        if self.pool is None:
            self.pool = {int(i) for i in self.points.ids}
        else:
            self.pool = {int(i) for i in self.pool}
        overlap = self.pool & {i for i, _ in self.queried}
        if overlap:
            raise InvalidInputError(f"ids {sorted(overlap)} are both pooled and queried")

    @property
    def budget_used(self) -> int:
        return len(self.queried)

    def pool_ids(self) -> np.ndarray:
        return np.array(sorted(self.pool), dtype=np.int64)

    def record(self, id_: int, label: int) -> None:
        id_ = int(id_)
        if id_ not in self.pool:
            raise InvalidInputError(f"id {id_} is not in the pool")
        self.pool.remove(id_)
        self.queried.append((id_, int(label)))

    def _pool_logits(self, model: PosteriorModel) -> tuple[np.ndarray, np.ndarray]:
        ids = self.pool_ids()
        if ids.shape[0] < 2:
            raise PoolExhaustedError(f"{ids.shape[0]} point(s) left in the pool")
        return ids, model.logit(self.points.points[self.points.positions(ids)])


def _first_min(values: np.ndarray, exclude: int = -1) -> int:
    """Position of the minimum, lowest position on ties, skipping ``exclude``."""
    if exclude >= 0:
        values = values.copy()
        values[exclude] = np.inf
    return int(np.argmin(values))


def bimodal_select(state: QueryState, model: PosteriorModel) -> tuple[int, int]:
    """Pool points with the largest ``P(z=0|s)`` and the largest ``P(z=1|s)``.

    If both maxima fall on the same point (a flat posterior), the second pick
    is the best remaining point for class 1.
    """
    ids, lg = state._pool_logits(model)
    a = _first_min(lg)
    b = _first_min(-lg)
    if a == b:
        b = _first_min(-lg, exclude=a)
    return int(ids[a]), int(ids[b])


def passive_select(state: QueryState, rng: np.random.Generator) -> tuple[int, int]:
    """Two distinct pool points drawn uniformly without replacement."""
    ids = state.pool_ids()
    if ids.shape[0] < 2:
        raise PoolExhaustedError(f"{ids.shape[0]} point(s) left in the pool")
    a, b = rng.choice(ids.shape[0], size=2, replace=False)
    return int(ids[a]), int(ids[b])


def uncertainty_select(state: QueryState, model: PosteriorModel) -> tuple[int, int]:
    """The two pool points whose posterior is closest to 0.5."""
    ids, lg = state._pool_logits(model)
    order = np.lexsort((ids, np.abs(lg)))
    return int(ids[order[0]]), int(ids[order[1]])


def certainty_select(state: QueryState, model: PosteriorModel) -> tuple[int, int]:
    """The two pool points with the largest max-class posterior, either class."""
    ids, lg = state._pool_logits(model)
    order = np.lexsort((ids, -np.abs(lg)))
    return int(ids[order[0]]), int(ids[order[1]])


SCHEMES = ("bimodal", "passive", "uncertainty", "certainty")


@dataclass(frozen=True)
class LpInstance:
    """Posteriors ``P(z=0|s_i)`` and the target class-0 mass ``u``."""

    posteriors: tuple
    u: float

    def __post_init__(self):
        p = tuple(float(x) for x in self.posteriors)
        object.__setattr__(self, "posteriors", p)
        if not p:
            raise InvalidInputError("empty instance")
        if any(not 0.0 <= x <= 1.0 for x in p):
            raise InvalidInputError("posteriors must lie in [0, 1]")
        if not 0.0 < self.u < 1.0:
            raise InvalidInputError(f"u={self.u} must lie in (0, 1)")

    @property
    def feasible(self) -> bool:
        return min(self.posteriors) <= self.u <= max(self.posteriors)


@dataclass(frozen=True)
class LpSolution:
    """Mass ``w0`` on index ``q0`` and ``w1`` on index ``q1``; zero elsewhere."""

    q0: int
    q1: int
    w0: float
    w1: float
    objective: float

    def weights(self, H: int) -> np.ndarray:
        w = np.zeros(H)
        w[self.q0] += self.w0
        w[self.q1] += self.w1
        return w


def lp_objective(inst: LpInstance, weights) -> float:
    """``sum_i P0_i^2 w_i``, the quantity the LP maximizes."""
    p = np.asarray(inst.posteriors)
    return float(np.dot(p * p, weights))


def _check(inst: LpInstance) -> None:
    p = inst.posteriors
    if max(p) == min(p):
        raise DegenerateInstanceError("all posteriors are equal")
    if not inst.feasible:
        raise InfeasibleError(f"u={inst.u} outside [{min(p)}, {max(p)}]")


def lp_closed_form(inst: LpInstance) -> LpSolution:
    """Two-point optimum: mass on the smallest and the largest ``P(z=0|s)``.

    ``q0`` is the argmin of ``P(z=0|s)`` (argmax of ``P(z=1|s)``) and ``q1``
    the argmax; the masses are fixed by the two equality constraints.
    """
    _check(inst)
    p = np.asarray(inst.posteriors)
    q0 = int(np.argmin(p))
    q1 = int(np.argmax(p))
    span = p[q0] - p[q1]
    w0 = (inst.u - p[q1]) / span
    w1 = (p[q0] - inst.u) / span
    return LpSolution(q0, q1, float(w0), float(w1), float(w0 * p[q0] ** 2 + w1 * p[q1] ** 2))


def lp_brute_force(inst: LpInstance, tol: float = 1e-12) -> LpSolution:
    """Exact optimum by enumerating every vertex of the feasible polytope.

    A vertex has at most two nonzero coordinates: either a pair ``(i, j)``
    with ``P0_i != P0_j`` solving both constraints with nonnegative mass, or
    a single point with ``P0_i == u``.  Intended for ``H <= 12``.
    """
    _check(inst)
    p = inst.posteriors
    best = None
    for i, pi in enumerate(p):
        if abs(pi - inst.u) <= tol:
            cand = LpSolution(i, i, 1.0, 0.0, pi * pi)
            if best is None or cand.objective > best.objective:
                best = cand
    for i, j in combinations(range(len(p)), 2):
        if p[i] == p[j]:
            continue
        # w_i + w_j = 1, p_i w_i + p_j w_j = u
        wi = (inst.u - p[j]) / (p[i] - p[j])
        wj = 1.0 - wi
        if wi < -tol or wj < -tol:
            continue
        obj = wi * p[i] ** 2 + wj * p[j] ** 2
        if best is None or obj > best.objective:
            if p[i] < p[j]:
                best = LpSolution(i, j, wi, wj, obj)
            else:
                best = LpSolution(j, i, wj, wi, obj)
    return best
