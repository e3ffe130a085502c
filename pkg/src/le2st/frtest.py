"""Friedman-Rafsky edge-count statistic, its p-value and large-sample forms."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from .errors import DegenerateVarianceError, InvalidInputError
from .geometry import Mst, shared_node_pairs

__all__ = [
    "FrInputs",
    "TestOutcome",
    "AsymptoticParams",
    "null_mean",
    "null_variance",
    "fr_statistic",
    "p_value",
    "asymptotic_statistic",
    "estimate_Ad",
    "f_divergence_estimate",
]


@dataclass(frozen=True)
class FrInputs:
    """Cut-edge count ``R`` with class sizes ``m``, ``n`` and shared-node pairs ``C_N``."""

    R: int
    m: int
    n: int
    C_N: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise InvalidInputError(f"both classes must be present (m={self.m}, n={self.n})")
        if self.N < 4:
            raise InvalidInputError(f"need N = m + n >= 4, got {self.N}")
        if not 0 <= self.R <= self.N - 1:
            raise InvalidInputError(f"R={self.R} outside [0, {self.N - 1}]")
        if self.C_N < 0:
            raise InvalidInputError(f"C_N={self.C_N} is negative")

    @property
    def N(self) -> int:
        return self.m + self.n


@dataclass(frozen=True)
class TestOutcome:
    """Result of one three-stage run.

    ``fr`` is ``None`` for degenerate runs (single-class queried set, too few
    points, zero null variance); those carry ``W = p = nan`` and never reject.
    """

    __test__ = False  # not a pytest class

    W: float
    p: float
    reject: bool
    fr: Optional[FrInputs]
    oracle_calls: int
    m_q: int = 0
    n_q: int = 0
    degenerate: bool = False
    queried_ids: tuple = field(default=(), repr=False)
    A_d: float = math.nan


@dataclass(frozen=True)
class AsymptoticParams:
    """Inputs of the large-sample statistic: overlap ``risk``, prior ``u``, ``A_d`` and ``N``."""

    risk: float
    u: float
    A_d: float
    N: float

    def __post_init__(self):
        if not 0.0 < self.u < 1.0:
            raise InvalidInputError(f"u={self.u} must lie in (0, 1)")
        if not 0.0 <= self.risk <= 0.5:
            raise InvalidInputError(f"risk={self.risk} must lie in [0, 0.5]")
        if self.A_d < 0:
            raise InvalidInputError(f"A_d={self.A_d} is negative")


def null_mean(m: int, n: int) -> float:
    """E[R] under a uniformly random labeling with class sizes ``m`` and ``n``."""
    return 2.0 * m * n / (m + n)


def null_variance(m: int, n: int, C_N: int) -> float:
    """Var[R] under a uniformly random labeling of a fixed tree."""
    N = m + n
    mn = m * n
    head = 2.0 * mn / (N * (N - 1))
    tail = (2.0 * mn - N) / N + (C_N - N + 2) / ((N - 2) * (N - 3)) * (N * (N - 1) - 4.0 * mn + 2)
    return head * tail


def fr_statistic(fr: FrInputs) -> float:
    """Standardized cut-edge count ``(R - E[R]) / sqrt(Var[R])``.

    Small values are evidence that the classes are separated.

    Raises
    ------
    DegenerateVarianceError
        If the null variance is not strictly positive.
    """
    var = null_variance(fr.m, fr.n, fr.C_N)
    if not var > 0.0:
        raise DegenerateVarianceError(f"null variance {var!r} for {fr}")
    return (fr.R - null_mean(fr.m, fr.n)) / math.sqrt(var)


def p_value(W: float) -> float:
    """Lower-tail normal p-value ``Phi(W)``."""
    if math.isnan(W):
        raise InvalidInputError("W is nan")
    return 0.5 * math.erfc(-W / math.sqrt(2.0))


def asymptotic_statistic(ap: AsymptoticParams) -> float:
    """Large-sample limit of the FR statistic given the Bayes overlap ``risk``."""
    uv2 = 2.0 * ap.u * (1.0 - ap.u)
    den = uv2 * (uv2 + (ap.A_d - 1.0) * (1.0 - 2.0 * uv2))
    if not den > 0.0:
        raise DegenerateVarianceError(f"nonpositive denominator {den!r} for {ap}")
    return math.sqrt(ap.N) * (ap.risk - uv2) / math.sqrt(den)


def estimate_Ad(mst: Mst) -> float:
    """Empirical ``C_N / N`` of a tree, the finite-sample stand-in for ``A_d``."""
    if mst.n < 2:
        raise InvalidInputError("need at least two nodes")
    return shared_node_pairs(mst) / mst.n


def f_divergence_estimate(fr: FrInputs, A_d: float) -> float:
    """Plug-in divergence ``(r - R/N) / sqrt((3 - 2 A_d) r^2 + (A_d - 1) r)``.

    ``r = 2mn/N^2`` and ``R/N`` estimates the overlap integral.  The value is
    zero when the cut-edge frequency matches its null expectation.
    """
    N = fr.N
    r = 2.0 * fr.m * fr.n / (N * N)
    rad = (3.0 - 2.0 * A_d) * r * r + (A_d - 1.0) * r
    if not rad > 0.0:
        raise DegenerateVarianceError(f"nonpositive radicand {rad!r} (A_d={A_d}, r={r})")
    return (r - fr.R / N) / math.sqrt(rad)
