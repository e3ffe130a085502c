"""Closed-form finite-sample quantities used to compare query schemes.

The "FR variant" is the unnormalized statistic ``R - 2 m n / N``; these
functions give its expectation under bimodal querying, a lower bound under
passive querying, and the binomial moment ``E[m n]`` they share.
"""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Optional

from scipy import integrate, stats

from .errors import InvalidInputError

__all__ = [
    "TheoryParams",
    "KnnErrorTable",
    "expected_fr_variant_bimodal",
    "expected_fr_variant_passive_lower_bound",
    "expected_mn",
    "knn_error_recursion",
    "bimodal_cut_edge_distribution",
    "crossover_query_count",
    "gaussian_overlap_risk",
]


@dataclass(frozen=True)
class TheoryParams:
    N_q: int
    u: float = 0.5
    A_d: float = 1.0
    d: int = 2
    risk: float = 0.0
    L: int = 2
    c_l: Optional[Sequence[float]] = None

    def __post_init__(self):
        if self.N_q < 2:
            raise InvalidInputError("N_q must be at least 2")
        if not 0.0 < self.u < 1.0:
            raise InvalidInputError("u must lie in (0, 1)")
        if not 0.0 <= self.risk <= 0.5:
            raise InvalidInputError("risk must lie in [0, 0.5]")
        if self.L < 2:
            raise InvalidInputError("L must be at least 2")

    @property
    def r(self) -> float:
        return 2.0 * self.u * (1.0 - self.u)


@dataclass
class KnnErrorTable:
    """Error ``f_k(N)`` of the classifier that predicts with the k-th nearest neighbor's label."""

    f: dict = field(default_factory=dict)

    def __post_init__(self):
        for key, val in self.f.items():
            if not 0.0 <= val <= 1.0:
                raise InvalidInputError(f"f{key} = {val} outside [0, 1]")

    def __getitem__(self, key):
        return self.f[key]

    def __setitem__(self, key, val):
        self.f[key] = float(val)


def expected_fr_variant_bimodal(N_q: int) -> float:
    """``E[R - 2mn/N]`` under bimodal querying: ``1 - 2^-N_q - (N_q - 1)/2``."""
    if N_q < 2:
        raise InvalidInputError("N_q must be at least 2")
    return (N_q - 1) * ((1.0 - 2.0 ** -N_q) / (N_q - 1) - 0.5)


def expected_fr_variant_passive_lower_bound(tp: TheoryParams) -> float:
    """Lower bound ``(N_q - 1)(risk + sum_l c_l (N_q - 1)^(-l/d) - 1/2)``.

    Without ``c_l`` only the leading term is kept.  ``c_l[0]`` is the
    coefficient for ``l = 2``.
    """
    series = 0.0
    if tp.c_l:
        coeffs = list(tp.c_l)[: tp.L - 1]
        series = sum(c * (tp.N_q - 1) ** (-(l + 2) / tp.d) for l, c in enumerate(coeffs))
    return (tp.N_q - 1) * (tp.risk + series - 0.5)


def expected_mn(N_q: int, u: float) -> float:
    """``E[m (N_q - m)]`` for ``m ~ Binomial(N_q, u)``."""
    if N_q < 1:
        raise InvalidInputError("N_q must be at least 1")
    if not 0.0 <= u <= 1.0:
        raise InvalidInputError("u must lie in [0, 1]")
    return N_q * (N_q - 1) * u * (1.0 - u)


def knn_error_recursion(table, k: int, N: int) -> float:
    """``f_k(N)`` from ``f_{k-1}(N-1)`` and ``f_{k-1}(N)``.

    ``table`` maps ``(k, N)`` to an error rate.
    """
    if k < 2:
        raise InvalidInputError("k must be at least 2")
    f = table.f if isinstance(table, KnnErrorTable) else table
    try:
        prev_small = f[(k - 1, N - 1)]
        prev = f[(k - 1, N)]
    except KeyError as exc:
        raise InvalidInputError(f"missing table entry f{exc.args[0]}") from None
    return N / (k - 1) * (prev_small - prev) + prev


def bimodal_cut_edge_distribution(N_q: int) -> tuple[float, float]:
    """``(P(R=0), P(R=1))`` for a bimodal query set on two separated clusters."""
    if N_q < 2:
        raise InvalidInputError("N_q must be at least 2")
    p0 = 2.0 ** -N_q
    return p0, 1.0 - p0


def crossover_query_count(risk: float, max_N_q: int = 10**6) -> Optional[int]:
    """Smallest ``N_q >= 2`` from which the bimodal expectation stays below the passive bound.

    The ordering holds iff ``(N_q - 1) risk > 1 - 2^-N_q``, which, once true,
    stays true.  Returns ``None`` if it is never reached up to ``max_N_q``.
    """
    if risk <= 0:
        return None
    for nq in range(2, max_N_q + 1):
        if (nq - 1) * risk > 1.0 - 2.0 ** -nq:
            return nq
    return None


def gaussian_overlap_risk(delta: float, u: float = 0.5, scale0: float = 1.0, scale1: float = 1.0) -> float:
    """``integral 2 P(z=0|s) P(z=1|s) P(s) ds`` for two Gaussians on one axis.

    Class 0 is ``N(+delta, scale0^2)`` with prior ``u``; class 1 is
    ``N(-delta, scale1^2)``.  Extra isotropic coordinates do not change the
    posterior, so the 1-D integral covers the d-dimensional location model.
    """
    p0 = stats.norm(delta, scale0).pdf
    p1 = stats.norm(-delta, scale1).pdf

    def integrand(x):
        a = u * p0(x)
        b = (1.0 - u) * p1(x)
        s = a + b
        return 0.0 if s == 0.0 else 2.0 * a * b / s

    span = 12.0 * max(scale0, scale1) + abs(delta)
    val, _ = integrate.quad(integrand, -span, span, limit=200)
    return float(val)
