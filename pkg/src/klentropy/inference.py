"""Variance estimation and asymptotic confidence intervals."""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .specfun import normal_quantile

__all__ = ["ConfidenceInterval", "VarianceEstimate", "variance_estimate", "confidence_interval"]


class VarianceEstimate(NamedTuple):
    value: float  # clamped at zero
    raw: float
    clamped: bool


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float

    @property
    def width(self):
        return self.upper - self.lower

    def __contains__(self, value):
        return self.lower <= value <= self.upper

    def as_dict(self):
        return {"lower": self.lower, "upper": self.upper, "level": self.level}


def variance_estimate(xi, w, h_hat):
    """Plug-in estimate of ``Var log f(X)`` from the same terms as the point estimate.

    Computes ``(1/n) sum_i sum_j w_j log^2 xi_ij - h_hat^2`` and clamps it at
    zero. With negative weights the raw value can be negative; that is
    reported through ``clamped`` rather than raised.

    Parameters
    ----------
    xi : XiMatrix or ndarray
        Either an :class:`~klentropy.estimator.XiMatrix` or a raw ``(n, k)``
        array of log xi values.
    w : WeightVector or array_like
    h_hat : float
    """
    log_xi = getattr(xi, "log_xi", xi)
    log_xi = np.asarray(log_xi, dtype=float)
    wv = np.asarray(getattr(w, "w", w), dtype=float)
    if log_xi.ndim != 2 or log_xi.shape[1] != wv.size:
        raise ValueError(f"shape mismatch: log xi {log_xi.shape} vs {wv.size} weights")
    n = log_xi.shape[0]
    cols = np.flatnonzero(wv)
    terms = wv[cols] * log_xi[:, cols] ** 2
    raw = math.fsum(terms.ravel()) / n - h_hat * h_hat
    return VarianceEstimate(max(raw, 0.0), raw, raw < 0.0)


def confidence_interval(h_hat, v_hat, n, level=0.95):
    """Symmetric normal interval ``h_hat -/+ z_{q/2} sqrt(v_hat / n)``, ``q = 1 - level``."""
    if not (0.0 < level < 1.0):
        raise ValueError(f"level must lie in (0, 1), got {level!r}")
    if n < 2:
        raise ValueError("n must be at least 2")
    if not (v_hat >= 0.0):
        raise ValueError(f"v_hat must be nonnegative, got {v_hat!r}")
    half = normal_quantile((1.0 - level) / 2.0) * math.sqrt(v_hat / n)
    return ConfidenceInterval(h_hat - half, h_hat + half, level)
