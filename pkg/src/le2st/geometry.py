"""Exact Euclidean minimum spanning trees and the edge counts built on them.

The MST is built by Prim's algorithm on the dense complete graph in
O(N^2) time and O(N) extra memory.  Candidate edges are totally ordered by
(squared length, min id, max id), so the tree is unique and does not depend
on the order in which points are supplied.
"""
from __future__ import annotations

from collections import Counter
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "PointSet",
    "Mst",
    "euclidean_mst",
    "cut_edge_count",
    "shared_node_pairs",
    "shared_node_pairs_from_histogram",
]

_NO_ID = np.iinfo(np.int64).max


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class PointSet:
    """An ``n x d`` feature matrix with stable integer ids.

    ``points`` may be given as a 1-D array, in which case it is read as
    ``n`` one-dimensional points.  ``ids`` default to ``0..n-1``.
    """

    points: np.ndarray
    ids: Optional[np.ndarray] = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InvalidInputError(f"points must be a non-empty n x d array, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise InvalidInputError("points contain non-finite coordinates")
        if self.ids is None:
            ids = np.arange(pts.shape[0], dtype=np.int64)
        else:
            ids = np.asarray(self.ids, dtype=np.int64).ravel()
            if ids.shape[0] != pts.shape[0]:
                raise InvalidInputError(f"{ids.shape[0]} ids for {pts.shape[0]} points")
            if np.unique(ids).shape[0] != ids.shape[0]:
                raise InvalidInputError("ids are not unique")
        object.__setattr__(self, "points", _frozen(pts))
        object.__setattr__(self, "ids", _frozen(ids))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def subset(self, ids) -> "PointSet":
        """Points whose ids are in ``ids``, in the order given."""
        pos = self.positions(ids)
        return PointSet(self.points[pos], self.ids[pos])

    def positions(self, ids) -> np.ndarray:
        lookup = {int(i): k for k, i in enumerate(self.ids)}
        try:
            return np.array([lookup[int(i)] for i in ids], dtype=np.int64)
        except KeyError as exc:
            raise InvalidInputError(f"unknown point id {exc.args[0]}") from None


@dataclass(frozen=True)
class Mst:
    """Spanning tree over the ids of a point set.

    ``u[e] < v[e]`` always holds; ``weight[e]`` is the Euclidean length.
    """

    ids: np.ndarray
    u: np.ndarray
    v: np.ndarray
    weight: np.ndarray
    _degree: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        for name in ("ids", "u", "v", "weight"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if self._degree is None:
            pos = {int(i): k for k, i in enumerate(self.ids)}
            deg = np.zeros(self.ids.shape[0], dtype=np.int64)
            for a, b in zip(self.u, self.v):
                deg[pos[int(a)]] += 1
                deg[pos[int(b)]] += 1
            object.__setattr__(self, "_degree", _frozen(deg))

    @property
    def n(self) -> int:
        return self.ids.shape[0]

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [(int(a), int(b), float(w)) for a, b, w in zip(self.u, self.v, self.weight)]

    @property
    def total_weight(self) -> float:
        return float(self.weight.sum())

    @property
    def degrees(self) -> dict[int, int]:
        """Degree of every node, keyed by id."""
        return {int(i): int(k) for i, k in zip(self.ids, self._degree)}

    @property
    def degree_histogram(self) -> dict[int, int]:
        """Map ``k -> V_{N,k}``, the number of nodes with degree ``k``."""
        return dict(sorted(Counter(int(k) for k in self._degree).items()))


def euclidean_mst(ps: PointSet) -> Mst:
    """Minimum spanning tree of the complete Euclidean graph on ``ps``.

    Ties between equal-length candidate edges go to the edge whose
    ``(min id, max id)`` pair is lexicographically smaller.  Duplicate points
    are allowed and produce zero-weight edges.

    Examples
    --------
    >>> euclidean_mst(PointSet([0.0, 1.0, 3.0])).edges
    [(0, 1, 1.0), (1, 2, 2.0)]
    """
    if not isinstance(ps, PointSet):
        ps = PointSet(ps)
    X, ids = ps.points, ps.ids
    n = ps.n
    if n == 1:
        empty = np.empty(0, dtype=np.int64)
        return Mst(ids, empty, empty, np.empty(0))

    in_tree = np.zeros(n, dtype=bool)
    key = np.full(n, np.inf)
    key_lo = np.full(n, _NO_ID, dtype=np.int64)
    key_hi = np.full(n, _NO_ID, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    deg = np.zeros(n, dtype=np.int64)
    eu = np.empty(n - 1, dtype=np.int64)
    ev = np.empty(n - 1, dtype=np.int64)
    ew = np.empty(n - 1)

    cur = int(np.argmin(ids))
    in_tree[cur] = True
    for step in range(n - 1):
        diff = X - X[cur]
        d2 = np.einsum("ij,ij->i", diff, diff)
        lo = np.minimum(ids, ids[cur])
        hi = np.maximum(ids, ids[cur])
        better = (d2 < key) | ((d2 == key) & ((lo < key_lo) | ((lo == key_lo) & (hi < key_hi))))
        better &= ~in_tree
        key[better] = d2[better]
        key_lo[better] = lo[better]
        key_hi[better] = hi[better]
        parent[better] = cur

        masked = np.where(in_tree, np.inf, key)
        cand = np.flatnonzero(masked == masked.min())
        if cand.shape[0] > 1:
            cand = cand[np.lexsort((key_hi[cand], key_lo[cand]))]
        nxt = int(cand[0])
        p = int(parent[nxt])
        in_tree[nxt] = True
        eu[step], ev[step] = key_lo[nxt], key_hi[nxt]
        ew[step] = np.sqrt(key[nxt])
        deg[nxt] += 1
        deg[p] += 1
        cur = nxt

    return Mst(ids, eu, ev, ew, _frozen(deg))


def _label_lookup(mst: Mst, labels: Union[Mapping, Sequence, np.ndarray]) -> dict[int, int]:
    if isinstance(labels, Mapping):
        out = {}
        for i in mst.ids:
            try:
                out[int(i)] = int(labels[int(i)])
            except KeyError:
                raise InvalidInputError(f"no label for node {int(i)}") from None
        return out
    arr = np.asarray(labels).ravel()
    if arr.shape[0] != mst.n:
        raise InvalidInputError(f"{arr.shape[0]} labels for {mst.n} nodes")
    return {int(i): int(z) for i, z in zip(mst.ids, arr)}


def cut_edge_count(mst: Mst, labels) -> int:
    """Number ``R`` of tree edges whose endpoints carry different labels.

    ``labels`` is either a mapping ``id -> {0, 1}`` or a sequence aligned
    with ``mst.ids``.
    """
    lab = _label_lookup(mst, labels)
    return int(sum(lab[int(a)] != lab[int(b)] for a, b in zip(mst.u, mst.v)))


def shared_node_pairs(mst: Mst) -> int:
    """``C_N``: number of unordered edge pairs sharing a node, sum of C(deg, 2)."""
    deg = mst._degree
    return int(np.sum(deg * (deg - 1) // 2))


def shared_node_pairs_from_histogram(hist: Mapping[int, int], n: int) -> int:
    """``C_N`` via the degree-histogram identity ``1 - N + 1/2 sum_k k^2 V_{N,k}``."""
    s = sum(k * k * v for k, v in hist.items())
    if s % 2:
        raise InvalidInputError("degree histogram is not that of a tree")
    return 1 - n + s // 2
