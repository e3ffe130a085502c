import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from le2st.errors import DegenerateVarianceError, InvalidInputError
from le2st.frtest import (
    AsymptoticParams,
    FrInputs,
    asymptotic_statistic,
    estimate_Ad,
    f_divergence_estimate,
    fr_statistic,
    null_mean,
    null_variance,
    p_value,
)
from le2st.geometry import PointSet, euclidean_mst, shared_node_pairs


def enumerate_null_moments(mst, m):
    """Exact mean (as a Fraction) and variance of R over every labeling with m zeros."""
    N = mst.n
    pos = {int(i): k for k, i in enumerate(mst.ids)}
    u = np.array([pos[int(a)] for a in mst.u])
    v = np.array([pos[int(b)] for b in mst.v])
    counts = []
    for zeros in itertools.combinations(range(N), m):
        lab = np.ones(N, dtype=np.int8)
        lab[list(zeros)] = 0
        counts.append(int(np.sum(lab[u] != lab[v])))
    counts = np.array(counts)
    mean = Fraction(int(counts.sum()), counts.shape[0])
    var = float(np.mean((counts - float(mean)) ** 2))
    return mean, var


@pytest.mark.parametrize("N", range(4, 11))
def test_null_moments_match_exhaustive_enumeration(N, rng):
    X = rng.normal(size=(N, 2))
    mst = euclidean_mst(PointSet(X))
    C_N = shared_node_pairs(mst)
    for m in range(1, N):
        mean, var = enumerate_null_moments(mst, m)
        assert mean == Fraction(2 * m * (N - m), N)
        assert null_variance(m, N - m, C_N) == pytest.approx(var, abs=1e-9)


def test_null_moments_on_star_tree():
    mst = euclidean_mst(PointSet([[0, 0], [1, 0], [-1, 0], [0, 1], [0, -1]]))
    assert shared_node_pairs(mst) == 6
    for m in range(1, 5):
        mean, var = enumerate_null_moments(mst, m)
        assert null_mean(m, 5 - m) == pytest.approx(float(mean), abs=1e-12)
        assert null_variance(m, 5 - m, 6) == pytest.approx(var, abs=1e-9)


def test_statistic_zero_at_null_mean():
    assert fr_statistic(FrInputs(R=2, m=2, n=2, C_N=2)) == 0.0


def test_statistic_small_path_example():
    # path 0-1-2-3 labeled 0,0,1,1: E[R] = 2, Var[R] = 2/3
    W = fr_statistic(FrInputs(R=1, m=2, n=2, C_N=2))
    assert W == pytest.approx(-1.0 / math.sqrt(2.0 / 3.0), abs=1e-12)
    assert W == pytest.approx(-1.224745, abs=1e-6)


def test_statistic_degenerate_variance():
    # no tree on 4 nodes has C_N = 0; the formula then goes negative
    assert null_variance(1, 3, 0) < 0
    with pytest.raises(DegenerateVarianceError):
        fr_statistic(FrInputs(R=1, m=1, n=3, C_N=0))


@pytest.mark.parametrize(
    "kwargs",
    [dict(R=1, m=0, n=4, C_N=2), dict(R=1, m=1, n=2, C_N=1), dict(R=4, m=2, n=2, C_N=2), dict(R=1, m=2, n=2, C_N=-1)],
)
def test_inputs_validation(kwargs):
    with pytest.raises(InvalidInputError):
        FrInputs(**kwargs)


@settings(max_examples=80, deadline=None)
@given(m=st.integers(2, 200), n=st.integers(2, 200), frac=st.floats(0.0, 1.0))
def test_statistic_antitone_in_R(m, n, frac):
    N = m + n
    C_N = N - 2
    R = int(frac * (N - 2))
    w1 = fr_statistic(FrInputs(R, m, n, C_N))
    w2 = fr_statistic(FrInputs(R + 1, m, n, C_N))
    assert w2 > w1


def test_p_value_examples():
    assert p_value(0.0) == 0.5
    assert p_value(-1.6449) == pytest.approx(0.05, abs=1e-4)
    assert p_value(-40.0) < 1e-300
    assert p_value(-math.inf) == 0.0
    assert p_value(math.inf) == 1.0
    with pytest.raises(InvalidInputError):
        p_value(math.nan)


def test_p_value_matches_high_precision_cdf():
    mpmath.mp.dps = 40
    for w in np.linspace(-8, 8, 161):
        ref = float(mpmath.ncdf(mpmath.mpf(float(w))))
        assert p_value(float(w)) == pytest.approx(ref, abs=1e-15, rel=1e-13)
    ref = float(mpmath.ncdf(-1.6449))
    assert abs(ref - 0.05) < 1e-4


@settings(max_examples=200, deadline=None)
@given(w=st.floats(-30, 30, allow_nan=False))
def test_p_value_symmetry(w):
    assert p_value(w) + p_value(-w) == pytest.approx(1.0, abs=1e-12)


def test_asymptotic_examples():
    assert asymptotic_statistic(AsymptoticParams(risk=0.42, u=0.3, A_d=1.2, N=500)) == pytest.approx(0.0, abs=1e-12)
    for A_d in (0.5, 1.0, 1.7):
        assert asymptotic_statistic(AsymptoticParams(0.0, 0.5, A_d, 100)) == pytest.approx(-10.0, abs=1e-12)
        assert asymptotic_statistic(AsymptoticParams(0.25, 0.5, A_d, 100)) == pytest.approx(-5.0, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    risk=st.floats(0.0, 0.5),
    u=st.floats(0.05, 0.95),
    A_d=st.floats(1.0, 2.0),
    N=st.floats(4.0, 1e6),
    k=st.floats(1.1, 50.0),
)
def test_asymptotic_scales_as_sqrt_N(risk, u, A_d, N, k):
    a = asymptotic_statistic(AsymptoticParams(risk, u, A_d, N))
    b = asymptotic_statistic(AsymptoticParams(risk, u, A_d, k * N))
    assert b == pytest.approx(math.sqrt(k) * a, rel=1e-9, abs=1e-12)


def test_asymptotic_degenerate_denominator():
    # 2uv + (A_d - 1)(1 - 4uv) < 0 needs A_d well below 1 and unbalanced classes
    with pytest.raises(DegenerateVarianceError):
        asymptotic_statistic(AsymptoticParams(0.1, 0.1, 0.5, 100))


def test_estimate_Ad_path_and_pair():
    assert estimate_Ad(euclidean_mst(PointSet(np.arange(10.0)))) == pytest.approx(0.8)
    assert estimate_Ad(euclidean_mst(PointSet([0.0, 1.0]))) == 0.0
    with pytest.raises(InvalidInputError):
        estimate_Ad(euclidean_mst(PointSet([0.0])))


def test_estimate_Ad_stabilizes_in_2d():
    r = np.random.default_rng(7)
    sizes = [500, 1000, 2000]
    means = []
    for n in sizes:
        means.append(np.mean([estimate_Ad(euclidean_mst(PointSet(r.uniform(size=(n, 2))))) for _ in range(4)]))
    assert abs(means[1] - means[0]) < 0.02
    assert abs(means[2] - means[1]) < 0.02


def test_divergence_examples():
    # R/N = r = 0.5 gives zero
    assert f_divergence_estimate(FrInputs(500, 500, 500, 0), A_d=1.3) == pytest.approx(0.0, abs=1e-12)
    for A_d in (0.8, 1.0, 1.4):
        assert f_divergence_estimate(FrInputs(0, 500, 500, 0), A_d) == pytest.approx(1.0, abs=1e-12)
        assert f_divergence_estimate(FrInputs(250, 500, 500, 0), A_d) == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=80, deadline=None)
@given(m=st.integers(2, 300), n=st.integers(2, 300), frac=st.floats(0, 1), A_d=st.floats(1.0, 1.5))
def test_divergence_bounded_by_zero_cut_value(m, n, frac, A_d):
    N = m + n
    R = int(frac * (N - 1))
    top = f_divergence_estimate(FrInputs(0, m, n, 0), A_d)
    assert f_divergence_estimate(FrInputs(R, m, n, 0), A_d) <= top + 1e-12


def test_divergence_degenerate_radicand():
    # r = 0.5 gives radicand 1/4 always; r small with A_d = 0 goes negative
    with pytest.raises(DegenerateVarianceError):
        f_divergence_estimate(FrInputs(1, 1, 99, 0), A_d=0.0)
