"""Scalar special functions used across the package.

Digamma and trigamma use upward recurrence to x >= 10 followed by the
asymptotic series. The regularised incomplete beta function uses the
modified Lentz continued fraction and accepts numpy arrays for ``x`` so the
ball-intersection code can evaluate whole quadrature panels at once.
"""

import math
from statistics import NormalDist

import numpy as np

__all__ = [
    "EULER_GAMMA",
    "digamma",
    "trigamma",
    "log_gamma",
    "gamma_ratio",
    "unit_ball_volume",
    "log_unit_ball_volume",
    "reg_inc_beta",
    "normal_quantile",
]

EULER_GAMMA = 0.57721566490153286061

# Bernoulli numbers B_2, B_4, ..., B_16
_B2N = (
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
)

_SHIFT = 10.0


def _check_positive(x, name="x"):
    if not (x > 0) or not math.isfinite(x):
        raise ValueError(f"{name} must be a positive finite real, got {x!r}")


def digamma(x):
    """Logarithmic derivative of the gamma function, Psi(x), for x > 0."""
    x = float(x)
    _check_positive(x)
    acc = 0.0
    while x < _SHIFT:
        acc -= 1.0 / x
        x += 1.0
    x2 = 1.0 / (x * x)
    series = 0.0
    p = x2
    for n, b in enumerate(_B2N, start=1):
        series += b / (2 * n) * p
        p *= x2
    return acc + math.log(x) - 0.5 / x - series


def trigamma(x):
    """Second logarithmic derivative of the gamma function, Psi'(x), for x > 0."""
    x = float(x)
    _check_positive(x)
    acc = 0.0
    while x < _SHIFT:
        acc += 1.0 / (x * x)
        x += 1.0
    x2 = 1.0 / (x * x)
    series = 0.0
    p = x2 / x
    for b in _B2N:
        series += b * p
        p *= x2
    return acc + 1.0 / x + 0.5 * x2 + series


def log_gamma(x):
    x = float(x)
    _check_positive(x)
    return math.lgamma(x)


def gamma_ratio(j, a):
    """Gamma(j + a) / Gamma(j), evaluated in the log domain."""
    j = float(j)
    a = float(a)
    _check_positive(j, "j")
    _check_positive(j + a, "j + a")
    if a == 0.0:
        return 1.0
    return math.exp(math.lgamma(j + a) - math.lgamma(j))


def log_unit_ball_volume(d):
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    return 0.5 * d * math.log(math.pi) - math.lgamma(1.0 + 0.5 * d)


def unit_ball_volume(d):
    """Volume of the unit Euclidean ball in R^d."""
    return math.exp(log_unit_ball_volume(d))


def _beta_cf(a, b, x, tol=1e-15, max_iter=500):
    # Modified Lentz, vectorised over x; converged lanes are frozen.
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    dd = 1.0 - qab * x / qap
    dd = np.where(np.abs(dd) < tiny, tiny, dd)
    dd = 1.0 / dd
    h = dd.copy()
    active = np.ones(x.shape, dtype=bool)
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        dd = 1.0 + aa * dd
        dd = np.where(np.abs(dd) < tiny, tiny, dd)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        dd = 1.0 / dd
        h = np.where(active, h * dd * c, h)
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        dd = 1.0 + aa * dd
        dd = np.where(np.abs(dd) < tiny, tiny, dd)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        dd = 1.0 / dd
        delta = dd * c
        h = np.where(active, h * delta, h)
        active &= np.abs(delta - 1.0) > tol
        if not active.any():
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b})")


def reg_inc_beta(a, b, x):
    """Regularised incomplete beta function I_x(a, b).

    ``x`` may be a scalar or an array; the return type follows ``x``.
    """
    a = float(a)
    b = float(b)
    _check_positive(a, "a")
    _check_positive(b, "b")
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)) or np.any(xa < 0.0) or np.any(xa > 1.0):
        raise ValueError("x must lie in [0, 1]")
    out = np.empty_like(xa)
    out[xa == 0.0] = 0.0
    out[xa == 1.0] = 1.0
    inner = (xa > 0.0) & (xa < 1.0)
    if inner.any():
        xi = xa[inner]
        lbeta = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        front = np.exp(lbeta + a * np.log(xi) + b * np.log1p(-xi))
        direct = xi < (a + 1.0) / (a + b + 2.0)
        res = np.empty_like(xi)
        if direct.any():
            xd = xi[direct]
            res[direct] = front[direct] * _beta_cf(a, b, xd) / a
        if (~direct).any():
            xs = 1.0 - xi[~direct]
            res[~direct] = 1.0 - front[~direct] * _beta_cf(b, a, xs) / b
        out[inner] = np.clip(res, 0.0, 1.0)
    if np.ndim(x) == 0:
        return float(out)
    return out


_STD_NORMAL = NormalDist()


def normal_quantile(p):
    """Upper-tail standard normal quantile: z with Phi(z) = 1 - p."""
    p = float(p)
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    return -_STD_NORMAL.inv_cdf(p)
