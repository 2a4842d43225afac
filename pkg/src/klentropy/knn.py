"""Exact k-nearest-neighbour distances within a single sample."""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

__all__ = [
    "PointCloud",
    "NeighbourDistances",
    "ZeroDistanceError",
    "all_knn_distances",
]

BACKENDS = ("brute", "tree")


class ZeroDistanceError(ValueError):
    """Some point coincides with another, so its log-distance is -inf."""

    def __init__(self, indices):
        self.indices = np.asarray(indices, dtype=np.intp)
        shown = ", ".join(str(i) for i in self.indices[:10])
        more = "" if len(self.indices) <= 10 else f", ... ({len(self.indices)} total)"
        super().__init__(
            f"zero nearest-neighbour distance at point indices [{shown}{more}]; "
            "deduplicate the sample first"
        )


@dataclass(frozen=True)
class PointCloud:
    """``n`` points in ``R^d`` stored row-wise as an ``(n, d)`` float array."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise ValueError(f"points must be a 2-d array, got shape {pts.shape}")
        if pts.shape[0] < 2:
            raise ValueError("need at least two points")
        if pts.shape[1] < 1:
            raise ValueError("points must have at least one coordinate")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]


@dataclass(frozen=True)
class NeighbourDistances:
    """``rho[i, j]`` is the distance from point ``i`` to its ``(j+1)``-th neighbour."""

    rho: np.ndarray

    @property
    def k(self):
        return self.rho.shape[1]

    @property
    def n(self):
        return self.rho.shape[0]


def _as_cloud(cloud):
    return cloud if isinstance(cloud, PointCloud) else PointCloud(cloud)


def _sq_dist(points, rows, cols):
    # Coordinates accumulated in a fixed order so both backends agree bitwise.
    acc = np.zeros(np.broadcast_shapes(rows.shape, cols.shape))
    for c in range(points.shape[1]):
        diff = points[rows, c] - points[cols, c]
        acc += diff * diff
    return acc


def _order_rows(sq, idx):
    # Sort each row by (distance, original index).
    order = np.lexsort((idx, sq), axis=-1)
    return np.take_along_axis(sq, order, axis=-1), np.take_along_axis(idx, order, axis=-1)


def _brute(points, k, chunk):
    n = points.shape[0]
    out = np.empty((n, k))
    all_idx = np.arange(n)
    for start in range(0, n, chunk):
        rows = np.arange(start, min(start + chunk, n))
        sq = _sq_dist(points, rows[:, None], all_idx[None, :])
        sq[np.arange(len(rows)), rows] = np.inf
        idx = np.broadcast_to(all_idx, sq.shape)
        if k < n - 1:
            part = np.argpartition(sq, k - 1, axis=1)[:, :k]
            # Include every candidate tied with the k-th value before sorting.
            kth = np.take_along_axis(sq, part, axis=1).max(axis=1, keepdims=True)
            sq = np.where(sq <= kth, sq, np.inf)
        sq, _ = _order_rows(sq, idx)
        out[rows] = sq[:, :k]
    return out


def _tree(points, k):
    n = points.shape[0]
    tree = cKDTree(points)
    _, nbr = tree.query(points, k=k + 1)
    nbr = np.asarray(nbr).reshape(n, k + 1)
    rows = np.arange(n)
    is_self = nbr == rows[:, None]
    # Drop the query point; if a duplicate displaced it from the list, drop the last column.
    drop = np.where(is_self.any(axis=1), is_self.argmax(axis=1), k)
    keep = np.ones_like(nbr, dtype=bool)
    keep[rows, drop] = False
    nbr = nbr[keep].reshape(n, k)
    sq = _sq_dist(points, rows[:, None], nbr)
    sq, _ = _order_rows(sq, nbr)
    return sq


def all_knn_distances(cloud, k, backend="tree", *, allow_zero=False, chunk=512):
    """Distances from each point to its ``k`` nearest other points.

    Parameters
    ----------
    cloud : PointCloud or array_like, shape (n, d)
    k : int
        Number of neighbours, ``1 <= k <= n - 1``.
    backend : {"tree", "brute"}
        ``"tree"`` queries a k-d tree; ``"brute"`` scans all pairs. Both
        evaluate the final distances with the same arithmetic, so they agree
        exactly.
    allow_zero : bool
        If False (default) a zero nearest-neighbour distance raises
        :class:`ZeroDistanceError`.
    """
    cloud = _as_cloud(cloud)
    if int(k) != k or not (1 <= k <= cloud.n - 1):
        raise ValueError(f"k must be an integer in [1, {cloud.n - 1}], got {k!r}")
    k = int(k)
    if backend == "brute":
        sq = _brute(cloud.points, k, chunk)
    elif backend == "tree":
        sq = _tree(cloud.points, k)
    else:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    rho = np.sqrt(sq)
    if not allow_zero:
        bad = np.flatnonzero(rho[:, 0] == 0.0)
        if bad.size:
            raise ZeroDistanceError(bad)
    rho.setflags(write=False)
    return NeighbourDistances(rho)
