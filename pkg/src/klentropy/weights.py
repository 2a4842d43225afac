"""Debiasing weight vectors for the weighted Kozachenko-Leonenko estimator.

A weight vector ``w`` of length ``k`` belongs to the admissible class when

* ``sum_j w_j = 1``,
* ``sum_j w_j Gamma(j + 2l/d) / Gamma(j) = 0`` for ``l = 1, ..., floor(d/4)``,
* ``w_j = 0`` unless ``j`` is one of ``floor(k/d), floor(2k/d), ..., k``.

The canonical member puts its mass on ``j_t = floor(t k / d)`` for
``t = 1, ..., floor(d/4) + 1`` and solves the square system whose
``(l, t)`` entry is ``Gamma(j_t + 2(l-1)/d) / Gamma(j_t) * k^(-2(l-1)/d)``
with right-hand side ``e_1``.
"""

from dataclasses import dataclass, field

import numpy as np

from .specfun import gamma_ratio

__all__ = [
    "WeightVector",
    "WeightReport",
    "WeightError",
    "COND_LIMIT",
    "SUM_TOL",
    "MOMENT_TOL",
    "n_constraints",
    "support_lattice",
    "weight_system",
    "canonical_weights",
    "unit_weights",
    "validate_weights",
]

COND_LIMIT = 1e8
SUM_TOL = 1e-10
MOMENT_TOL = 1e-8


class WeightError(ValueError):
    pass


@dataclass(frozen=True)
class WeightVector:
    """Weights ``w[0..k-1]`` for neighbour orders ``1..k``."""

    w: np.ndarray
    d: int

    def __post_init__(self):
        w = np.array(self.w, dtype=float)
        if w.ndim != 1 or w.size < 1:
            raise ValueError("weights must be a non-empty 1-d vector")
        if not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite")
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d!r}")
        w.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "d", int(self.d))

    @property
    def k(self):
        return self.w.size

    @property
    def support(self):
        """1-based neighbour orders carrying nonzero weight."""
        return [int(j) + 1 for j in np.flatnonzero(self.w)]

    def __getitem__(self, j):
        # 1-based, matching neighbour order
        return float(self.w[j - 1])


@dataclass(frozen=True)
class WeightReport:
    sum_residual: float
    moment_residuals: list = field(default_factory=list)
    off_lattice: list = field(default_factory=list)
    in_class: bool = False

    def as_dict(self):
        return {
            "sum_residual": self.sum_residual,
            "moment_residuals": list(self.moment_residuals),
            "off_lattice": list(self.off_lattice),
            "in_class": self.in_class,
        }


def n_constraints(d):
    """Number of vanishing Gamma-ratio moments, ``floor(d/4)``."""
    return d // 4


def support_lattice(k, d):
    """The admissible support ``{floor(tk/d) : t = 1..d} \\ {0}``."""
    return sorted({(t * k) // d for t in range(1, d + 1)} - {0})


def weight_system(k, d):
    """Support ``j_t`` and rescaled system matrix used by :func:`canonical_weights`."""
    dp = n_constraints(d) + 1
    js = [(t * k) // d for t in range(1, dp + 1)]
    if js[0] < 1:
        raise WeightError(f"k too small for d: floor(k/d) = 0 (k={k}, d={d})")
    A = np.empty((dp, dp))
    for l in range(dp):
        a = 2.0 * l / d
        for t, j in enumerate(js):
            A[l, t] = gamma_ratio(j, a) * float(k) ** (-a)
    return js, A


def canonical_weights(k, d, cond_limit=COND_LIMIT):
    """Canonical debiasing weights for neighbour count ``k`` in dimension ``d``.

    For ``d <= 3`` this is the unit mass at ``floor(k/d)``.

    Raises
    ------
    WeightError
        If ``floor(k/d) = 0`` or the system is too ill-conditioned
        (``k`` below the dimension-dependent threshold).
    """
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer, got {d!r}")
    k, d = int(k), int(d)
    js, A = weight_system(k, d)
    if len(set(js)) < len(js):
        raise WeightError(f"ill-conditioned weight system: repeated support points {js} (k={k}, d={d})")
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > cond_limit:
        raise WeightError(f"ill-conditioned weight system: cond = {cond:.3g} > {cond_limit:.3g} (k={k}, d={d})")
    rhs = np.zeros(len(js))
    rhs[0] = 1.0
    sol = np.linalg.solve(A, rhs)
    w = np.zeros(k)
    w[np.array(js) - 1] = sol
    return WeightVector(w, d)


def unit_weights(k, d, j=None):
    """Unit mass at neighbour order ``j`` (default ``k``): the unweighted estimator."""
    j = k if j is None else j
    if not (1 <= j <= k):
        raise ValueError(f"j must lie in [1, {k}]")
    w = np.zeros(k)
    w[j - 1] = 1.0
    return WeightVector(w, d)


def validate_weights(w, k=None, d=None, sum_tol=SUM_TOL, moment_tol=MOMENT_TOL):
    """Constraint residuals of ``w`` against the admissible class.

    Each moment residual is divided by the largest absolute term entering
    its sum, so the tolerance is scale-free.
    """
    if isinstance(w, WeightVector):
        d = w.d if d is None else d
        vec = w.w
    else:
        vec = np.asarray(w, dtype=float)
        if d is None:
            raise ValueError("d is required for a raw weight array")
    k = vec.size if k is None else k
    if vec.size != k:
        raise ValueError(f"weight vector has length {vec.size}, expected {k}")

    sum_res = abs(float(np.sum(vec)) - 1.0)
    j = np.arange(1, k + 1)
    moments = []
    for l in range(1, n_constraints(d) + 1):
        terms = vec * np.array([gamma_ratio(jj, 2.0 * l / d) for jj in j])
        scale = np.max(np.abs(terms))
        moments.append(float(abs(np.sum(terms)) / scale) if scale > 0 else 0.0)
    allowed = set(support_lattice(k, d))
    off = [int(jj) for jj in j[vec != 0] if jj not in allowed]
    ok = sum_res < sum_tol and all(m < moment_tol for m in moments) and not off
    return WeightReport(sum_res, moments, off, ok)
