"""Unweighted and weighted Kozachenko-Leonenko entropy estimators.

For the ``j``-th neighbour distance ``rho_ij`` of point ``i`` the rescaled
ball volume is ``xi_ij = exp(-Psi(j)) V_d (n - 1) rho_ij^d`` and the weighted
estimate is the average over points of ``sum_j w_j log xi_ij``. Everything
is computed in the log domain and reported in nats.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .inference import ConfidenceInterval, confidence_interval, variance_estimate
from .knn import NeighbourDistances, PointCloud, ZeroDistanceError, all_knn_distances
from .specfun import digamma, log_unit_ball_volume
from .weights import WeightVector, unit_weights

__all__ = [
    "XiMatrix",
    "EntropyEstimate",
    "xi_values",
    "kl_estimate",
    "weighted_kl_estimate",
]


@dataclass(frozen=True)
class XiMatrix:
    """``log_xi[i, c]`` is ``log xi`` for point ``i`` and neighbour order ``orders[c]``."""

    log_xi: np.ndarray
    orders: np.ndarray

    @property
    def xi(self):
        return np.exp(self.log_xi)


@dataclass(frozen=True)
class EntropyEstimate:
    h_hat: float
    n: int
    d: int
    k: int
    weights: WeightVector
    variance_hat: Optional[float] = None
    variance_raw: Optional[float] = None
    clamped: Optional[bool] = None
    ci: Optional[ConfidenceInterval] = None

    def as_dict(self):
        out = {
            "h_hat": self.h_hat,
            "n": self.n,
            "d": self.d,
            "k": self.k,
            "support": self.weights.support,
            "weights": [self.weights[j] for j in self.weights.support],
        }
        if self.variance_hat is not None:
            out["v_hat"] = self.variance_hat
            out["v_raw"] = self.variance_raw
            out["clamped"] = self.clamped
        if self.ci is not None:
            out["ci"] = self.ci.as_dict()
        return out


def xi_values(nd, n, d, orders=None):
    """Log-domain xi values for the given 1-based neighbour ``orders`` (default all)."""
    rho = nd.rho if isinstance(nd, NeighbourDistances) else np.asarray(nd, dtype=float)
    k = rho.shape[1]
    orders = np.arange(1, k + 1) if orders is None else np.asarray(orders, dtype=int)
    if orders.size and (orders.min() < 1 or orders.max() > k):
        raise ValueError(f"neighbour orders must lie in [1, {k}]")
    sub = rho[:, orders - 1]
    if np.any(sub <= 0.0):
        raise ZeroDistanceError(np.flatnonzero(np.any(sub <= 0.0, axis=1)))
    offset = log_unit_ball_volume(d) + math.log(n - 1)
    psi = np.array([digamma(j) for j in orders])
    return XiMatrix(d * np.log(sub) + (offset - psi), orders)


def weighted_kl_estimate(cloud, w, backend="tree", ci=None, variance=False, neighbours=None):
    """Weighted Kozachenko-Leonenko estimate of differential entropy.

    Parameters
    ----------
    cloud : PointCloud or array_like, shape (n, d)
    w : WeightVector
        ``len(w) <= n - 1``; only orders with nonzero weight are evaluated.
    backend : {"tree", "brute"}
    ci : float, optional
        If given, also return the variance estimate and a confidence interval
        at this level.
    variance : bool
        Compute the variance estimate even without an interval.
    neighbours : NeighbourDistances, optional
        Precomputed distances with at least ``len(w)`` columns.
    """
    cloud = cloud if isinstance(cloud, PointCloud) else PointCloud(cloud)
    if not isinstance(w, WeightVector):
        w = WeightVector(w, cloud.d)
    n, d, k = cloud.n, cloud.d, w.k
    if k > n - 1:
        raise ValueError(f"weight vector length {k} exceeds n - 1 = {n - 1}")
    if neighbours is None:
        neighbours = all_knn_distances(cloud, k, backend=backend)
    elif neighbours.k < k:
        raise ValueError("precomputed neighbour distances have too few columns")
    orders = np.array(w.support, dtype=int)
    xi = xi_values(neighbours.rho[:, :k], n, d, orders)
    coef = w.w[orders - 1]
    h_hat = math.fsum((xi.log_xi * coef).ravel()) / n

    v = None
    interval = None
    if variance or ci is not None:
        v = variance_estimate(xi.log_xi, coef, h_hat)
        if ci is not None:
            interval = confidence_interval(h_hat, v.value, n, ci)
    return EntropyEstimate(
        h_hat=h_hat,
        n=n,
        d=d,
        k=k,
        weights=w,
        variance_hat=None if v is None else v.value,
        variance_raw=None if v is None else v.raw,
        clamped=None if v is None else v.clamped,
        ci=interval,
    )


def kl_estimate(cloud, k, backend="tree", ci=None, variance=False, neighbours=None):
    """Classical estimator using the ``k``-th neighbour distance only."""
    cloud = cloud if isinstance(cloud, PointCloud) else PointCloud(cloud)
    return weighted_kl_estimate(
        cloud, unit_weights(k, cloud.d), backend=backend, ci=ci, variance=variance, neighbours=neighbours
    )
