import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.sparse.csgraph import minimum_spanning_tree
from scipy.spatial.distance import pdist, squareform

from le2st.errors import InvalidInputError
from le2st.geometry import (
    Mst,
    PointSet,
    cut_edge_count,
    euclidean_mst,
    shared_node_pairs,
    shared_node_pairs_from_histogram,
)


def prufer_trees(n):
    """Every labeled tree on n nodes, as edge lists, via Pruefer sequences."""
    if n == 1:
        yield []
        return
    if n == 2:
        yield [(0, 1)]
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        degree = [1] * n
        for x in seq:
            degree[x] += 1
        edges = []
        for x in seq:
            leaf = min(i for i in range(n) if degree[i] == 1)
            edges.append((leaf, x))
            degree[leaf] -= 1
            degree[x] -= 1
        u, v = [i for i in range(n) if degree[i] == 1]
        edges.append((u, v))
        yield edges


def brute_force_mst_weight(X):
    D = squareform(pdist(X))
    return min(sum(D[a, b] for a, b in t) for t in prufer_trees(X.shape[0]))


def test_prufer_count_matches_cayley():
    for n in range(2, 7):
        assert sum(1 for _ in prufer_trees(n)) == n ** (n - 2)


def test_three_points_on_a_line():
    mst = euclidean_mst(PointSet([0.0, 1.0, 3.0]))
    assert mst.edges == [(0, 1, 1.0), (1, 2, 2.0)]
    assert mst.total_weight == 3.0


def test_two_points():
    mst = euclidean_mst(PointSet([[0.0, 0.0], [3.0, 4.0]]))
    assert mst.edges == [(0, 1, 5.0)]


def test_single_point():
    mst = euclidean_mst(PointSet([[1.0, 2.0]]))
    assert mst.edges == [] and shared_node_pairs(mst) == 0


def test_collinear_points_form_a_path(rng):
    x = np.sort(rng.uniform(0, 10, 12))
    mst = euclidean_mst(PointSet(x))
    assert sorted((a, b) for a, b, _ in mst.edges) == [(i, i + 1) for i in range(11)]
    assert mst.degree_histogram == {1: 2, 2: 10}
    assert shared_node_pairs(mst) == 10


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_matches_exhaustive_enumeration(n, rng):
    for _ in range(5):
        X = rng.normal(size=(n, 2))
        assert euclidean_mst(PointSet(X)).total_weight == pytest.approx(brute_force_mst_weight(X), abs=1e-12)


def test_matches_scipy_on_larger_sets(rng):
    X = rng.normal(size=(300, 3))
    ref = minimum_spanning_tree(squareform(pdist(X))).sum()
    assert euclidean_mst(PointSet(X)).total_weight == pytest.approx(ref, rel=1e-12)


def test_weights_are_euclidean_distances(rng):
    X = rng.normal(size=(40, 4))
    mst = euclidean_mst(PointSet(X))
    for a, b, w in mst.edges:
        assert w == pytest.approx(np.linalg.norm(X[a] - X[b]), rel=1e-12)


def test_duplicates_give_zero_weight_edges():
    mst = euclidean_mst(PointSet([[0, 0], [0, 0], [1, 0]]))
    assert (0, 1, 0.0) in mst.edges
    assert len(mst.edges) == 2


def test_tie_break_prefers_smaller_id_pair():
    # unit square: four equal sides, MST uses three of them
    sq = [[0, 0], [1, 0], [1, 1], [0, 1]]
    mst = euclidean_mst(PointSet(sq))
    assert sorted((a, b) for a, b, _ in mst.edges) == [(0, 1), (0, 3), (1, 2)]


def test_stable_ids_are_respected():
    ps = PointSet([0.0, 1.0, 3.0], ids=[10, 20, 30])
    assert euclidean_mst(ps).edges == [(10, 20, 1.0), (20, 30, 2.0)]


def test_rejects_non_finite():
    with pytest.raises(InvalidInputError):
        PointSet([[0.0, np.nan]])
    with pytest.raises(InvalidInputError):
        PointSet([[0.0, 1.0], [np.inf, 0.0]])


def test_rejects_duplicate_ids():
    with pytest.raises(InvalidInputError):
        PointSet([0.0, 1.0], ids=[3, 3])


def path4():
    return euclidean_mst(PointSet([0.0, 1.0, 2.0, 3.0]))


def test_cut_edges_alternating():
    assert cut_edge_count(path4(), [0, 1, 0, 1]) == 3


def test_cut_edges_blocks():
    assert cut_edge_count(path4(), {0: 0, 1: 0, 2: 1, 3: 1}) == 1


def test_cut_edges_constant_labels():
    assert cut_edge_count(path4(), [1, 1, 1, 1]) == 0


def test_cut_edges_missing_label():
    with pytest.raises(InvalidInputError):
        cut_edge_count(path4(), {0: 0, 1: 1, 2: 0})


def test_shared_pairs_path_and_star():
    assert shared_node_pairs(path4()) == 2
    star = euclidean_mst(PointSet([[0, 0], [1, 0], [0, 1], [-1, 0]]))
    assert star.degree_histogram == {1: 3, 3: 1}
    assert shared_node_pairs(star) == 3
    assert shared_node_pairs(euclidean_mst(PointSet([0.0, 1.0]))) == 0


@settings(max_examples=60, deadline=None)
@given(
    pts=st.lists(
        st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=2, max_size=25
    ),
    seed=st.integers(0, 2**32 - 1),
)
def test_tree_properties_and_order_invariance(pts, seed):
    # integer grid coordinates force many equal-length edges and duplicates
    X = np.array(pts, dtype=float)
    n = X.shape[0]
    mst = euclidean_mst(PointSet(X))
    assert len(mst.edges) == n - 1
    degrees = mst.degrees
    assert sum(degrees.values()) == 2 * (n - 1)
    hist = mst.degree_histogram
    assert sum(k * v for k, v in hist.items()) == 2 * (n - 1)
    assert shared_node_pairs(mst) == shared_node_pairs_from_histogram(hist, n)
    # connected: union-find over edges
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b, _ in mst.edges:
        parent[find(a)] = find(b)
    assert len({find(i) for i in range(n)}) == 1

    perm = np.random.default_rng(seed).permutation(n)
    shuffled = euclidean_mst(PointSet(X[perm], ids=perm))
    assert sorted(shuffled.edges) == sorted(mst.edges)


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(2, 30),
    seed=st.integers(0, 2**32 - 1),
)
def test_cut_count_flip_invariance(n, seed):
    r = np.random.default_rng(seed)
    mst = euclidean_mst(PointSet(r.normal(size=(n, 2))))
    z = r.integers(0, 2, n)
    R = cut_edge_count(mst, z)
    assert R == cut_edge_count(mst, 1 - z)
    assert 0 <= R <= n - 1


def test_histogram_identity_rejects_non_tree():
    with pytest.raises(InvalidInputError):
        shared_node_pairs_from_histogram({1: 1}, 1)


def test_mst_is_immutable():
    mst = path4()
    assert isinstance(mst, Mst)
    with pytest.raises(ValueError):
        mst.weight[0] = 5.0
    with pytest.raises(AttributeError):
        mst.u = None
    assert math.isclose(mst.total_weight, 3.0)
