"""Fixed-k asymptotic variance inflation of the Kozachenko-Leonenko estimator.

When ``k`` does not grow with ``n``, ``n Var(H_hat) - Var log f(X)``
converges to a distribution-free constant depending on ``(d, k)``:

    Psi'(k) + int_{[0,inf)^3} exp(-s-t) T_k(r,s,t) / (s t) dr ds dt - 1 + C_k

where ``C_1 = 2 log 2`` and, for ``k >= 2``, ``C_k`` collects the two
binomial/digamma sums produced by one sample point being among the other's
``k`` nearest neighbours. Everything here is in volume units: ``r``, ``s``
and ``t`` are ``d``-th powers of the centre distance and the two radii.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import integrate

from .specfun import digamma, reg_inc_beta, trigamma

__all__ = [
    "InflationSpec",
    "InflationResult",
    "QuadratureConvergenceError",
    "ball_intersection_alpha",
    "t_k",
    "inflation_integrand",
    "inflation_constant",
    "inflation_value",
    "inflation_table",
    "TABLE_DIMS",
    "TABLE_KS",
]

TABLE_DIMS = (1, 2, 3, 5, 10)
TABLE_KS = (1, 2, 3, 4, 5)

# Below this, T_k/(st) is evaluated at the cutoff: the integrand is bounded
# near the axes and the skipped strip contributes at most O(cutoff).
_ST_FLOOR = 1e-12


class QuadratureConvergenceError(ArithmeticError):
    def __init__(self, message, estimate, error_bound):
        super().__init__(f"{message} (estimate {estimate:.6g}, error bound {error_bound:.3g})")
        self.estimate = estimate
        self.error_bound = error_bound


@dataclass(frozen=True)
class InflationSpec:
    d: int
    k: int
    s_max: Optional[float] = None
    rel_tol: float = 1e-6
    abs_tol: float = 1e-6

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"d must be a positive integer, got {self.d!r}")
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        if self.s_max is None:
            object.__setattr__(self, "s_max", float(self.k + 40))
        if self.s_max < self.k + 40:
            raise ValueError(f"s_max must be at least k + 40 = {self.k + 40}")

    @property
    def t_max(self):
        return self.s_max


@dataclass(frozen=True)
class InflationResult:
    d: int
    k: int
    value: float
    integral: float
    constant: float
    error_bound: float
    truncation_bound: float

    def as_dict(self):
        return {
            "d": self.d,
            "k": self.k,
            "value": self.value,
            "integral": self.integral,
            "constant": self.constant,
            "error_bound": self.error_bound,
            "truncation_bound": self.truncation_bound,
        }


def _cap_fraction(h, R, d):
    # Fraction of a radius-R ball lying beyond a hyperplane at signed distance h from its centre.
    x = np.clip(1.0 - (h / R) ** 2, 0.0, 1.0)
    half = 0.5 * reg_inc_beta((d + 1) / 2.0, 0.5, x)
    return np.where(h >= 0.0, half, 1.0 - half)


def ball_intersection_alpha(r, s, t, d):
    """Normalised volume of ``B_0(s^{1/d}) ∩ B_{r^{1/d} e_1}(t^{1/d})``.

    The volume is divided by the unit-ball volume, so ``alpha = min(s, t)``
    when one ball contains the other and ``0`` when they are disjoint.
    Inputs broadcast against each other.
    """
    r, s, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r, s, t)))
    if np.any(r < 0) or np.any(s < 0) or np.any(t < 0):
        raise ValueError("r, s, t must be nonnegative")
    if int(d) != d or d < 1:
        raise ValueError(f"d must be a positive integer, got {d!r}")
    scalar = r.ndim == 0
    r, s, t = (np.atleast_1d(v) for v in (r, s, t))
    # Put the smaller ball first so the result is exactly symmetric in (s, t).
    s, t = np.minimum(s, t), np.maximum(s, t)
    if d == 1:
        # Intervals [-s, s] and [r - t, r + t]; V_1 = 2.
        out = 0.5 * np.maximum(np.minimum(s, r + t) - np.maximum(-s, r - t), 0.0)
        return float(out[0]) if scalar else out
    a, b, c = s ** (1.0 / d), t ** (1.0 / d), r ** (1.0 / d)
    out = np.zeros(r.shape)
    nested = c <= np.abs(a - b)
    out[nested] = np.minimum(s, t)[nested]
    lens = ~nested & (c < a + b)
    if lens.any():
        al, bl, cl = a[lens], b[lens], c[lens]
        h1 = (cl * cl + al * al - bl * bl) / (2.0 * cl)
        h2 = cl - h1
        frac = s[lens] * _cap_fraction(h1, al, d) + t[lens] * _cap_fraction(h2, bl, d)
        out[lens] = frac
    if scalar:
        return float(out[0])
    return out


def _partial_exp_table(x, m):
    """Rows ``0..m`` of ``sum_{i<=row} x^i / i!``, shape ``(m + 1,) + x.shape``."""
    terms = np.empty((m + 1,) + x.shape)
    terms[0] = 1.0
    for i in range(1, m + 1):
        terms[i] = terms[i - 1] * x / i
    return np.cumsum(terms, axis=0)


def _pick(table, idx):
    # table[idx[p], p] with idx = -1 meaning an empty sum.
    safe = np.maximum(idx, 0)
    got = np.take_along_axis(table, safe[None, ...], axis=0)[0]
    return np.where(idx >= 0, got, 0.0)


def t_k(r, s, t, k, d, alpha=None):
    """Joint-minus-product term of the Poisson approximation.

    Equals ``exp(alpha) sum_{l<=L} sum_{i<=I-l} sum_{j<=J-l}
    (s-alpha)^i (t-alpha)^j alpha^l / (i! j! l!) - sum_{i<=I} sum_{j<=J}
    s^i t^j / (i! j!)`` with ``I = k-1-[r<s]``, ``J = k-1-[r<t]`` and
    ``L = k-1-[r<max(s,t)]``. Since ``L = min(I, J)`` the triple sum is
    evaluated as ``sum_l alpha^l/l! P_{I-l}(s-alpha) P_{J-l}(t-alpha)`` with
    ``P_m`` the degree-``m`` truncated exponential.
    """
    r, s, t = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (r, s, t)))
    scalar = r.ndim == 0
    r, s, t = (np.atleast_1d(v) for v in (r, s, t))
    al = ball_intersection_alpha(r, s, t, d) if alpha is None else np.broadcast_to(np.asarray(alpha, float), r.shape)
    I = k - 1 - (r < s).astype(int)
    J = k - 1 - (r < t).astype(int)
    L = np.minimum(I, J)
    m = k - 1
    Ps = _partial_exp_table(s - al, m)
    Pt = _partial_exp_table(t - al, m)
    joint = np.zeros(r.shape)
    coef = np.ones(r.shape)
    for l in range(k):
        live = l <= L
        if not live.any():
            break
        term = coef * _pick(Ps, I - l) * _pick(Pt, J - l)
        joint += np.where(live, term, 0.0)
        coef = coef * al / (l + 1)
    prod = _pick(_partial_exp_table(s, m), I) * _pick(_partial_exp_table(t, m), J)
    out = np.exp(al) * joint - prod
    if scalar:
        return float(out[0])
    return out


def inflation_integrand(r, s, t, k, d):
    """``exp(-s-t) T_k(r,s,t) / (s t)``."""
    s = np.maximum(np.asarray(s, dtype=float), _ST_FLOOR)
    t = np.maximum(np.asarray(t, dtype=float), _ST_FLOOR)
    return np.exp(-s - t) * t_k(r, s, t, k, d) / (s * t)


# Inner rules: the fine pair gives the value, the coarse pair the error estimate.
_FINE = (np.polynomial.legendre.leggauss(32), np.polynomial.legendre.leggauss(16))
_COARSE = (np.polynomial.legendre.leggauss(16), np.polynomial.legendre.leggauss(8))


def _gl_nodes(lo, hi, rule):
    nodes, weights = rule
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return mid[..., None] + half[..., None] * nodes, half[..., None] * weights


def _r_integral(s, t, k, d, rule):
    """``int_0^inf T_k(r, s, t) dr`` for scalar ``s`` and a vector of ``t``.

    Integrates over the centre distance ``c = r^{1/d}`` (``dr = d c^{d-1} dc``),
    where the lens volume is a smooth function away from the tangency points.
    Panels break at ``|a-b|``, ``min(a,b)``, ``max(a,b)``, ``a+b`` with
    ``a = s^{1/d}``, ``b = t^{1/d}``; T_k vanishes beyond ``a+b``.
    """
    a = s ** (1.0 / d)
    b = t ** (1.0 / d)
    top = a + b
    bp = np.stack([np.zeros_like(t), np.abs(a - b), np.minimum(a, b), np.maximum(a, b), top], axis=1)
    bp = np.sort(np.minimum(bp, top[:, None]), axis=1)
    c, wc = _gl_nodes(bp[:, :-1], bp[:, 1:], rule)
    tt = np.broadcast_to(t[:, None, None], c.shape)
    vals = t_k(c.ravel() ** d, s, tt.ravel(), k, d).reshape(c.shape) * d * c ** (d - 1)
    return np.sum(vals * wc, axis=(1, 2))


def _t_edges(s, d, top, split):
    # Kink at t = 2^d s, where |a-b| overtakes min(a,b); dyadic panels towards the origin.
    edges = {s, top}
    if 2.0**d * s < top:
        edges.add(2.0**d * s)
    x = top
    while x > s and x > 1e-3:
        edges.add(x)
        x *= 0.5
    e = np.array(sorted(edges))
    if split > 1:
        e = np.concatenate([np.linspace(lo, hi, split + 1)[:-1] for lo, hi in zip(e[:-1], e[1:])] + [e[-1:]])
    return e


def _t_integral(s, k, d, top, rules, split):
    r_rule, t_rule = rules
    s = max(s, _ST_FLOOR)
    e = _t_edges(s, d, top, split)
    t, wt = _gl_nodes(e[:-1], e[1:], t_rule)
    t, wt = t.ravel(), wt.ravel()
    f = np.exp(-s - t) * _r_integral(s, t, k, d, r_rule) / (s * np.maximum(t, _ST_FLOOR))
    return float(np.dot(f, wt))


def _integral(spec):
    """Twice the integral over ``t > s`` (the integrand is symmetric in s, t).

    ``s`` is handled by adaptive quadrature; for each ``s`` the ``(t, r)``
    integral uses fixed composite Gauss-Legendre rules. The gap to a coarser
    rule pair is integrated alongside and added to the reported error bound.
    """
    k, d, top = spec.k, spec.d, spec.s_max

    def over_t(s):
        fine = _t_integral(s, k, d, top, _FINE, 2)
        coarse = _t_integral(s, k, d, top, _COARSE, 1)
        return np.array([fine, abs(fine - coarse)])

    (val, inner), err = integrate.quad_vec(
        over_t, 0.0, top, epsabs=spec.abs_tol * 1e-1, epsrel=spec.rel_tol, norm="max", limit=400, quadrature="gk15"
    )
    value = 2.0 * val
    error = 2.0 * (err + inner)
    trunc = _truncation_bound(k, d, top)
    if not np.isfinite(value) or error > max(spec.abs_tol, spec.rel_tol * abs(value)):
        raise QuadratureConvergenceError("inflation integral did not reach tolerance", value, error)
    return value, error, trunc


def _truncation_bound(k, d, top):
    # exp(-s-t) T_k is a difference of two probabilities, each at most
    # P(Poisson(max(s, t)) <= k - 1), and it is also at most alpha <= min(s, t).
    # T_k vanishes for r >= (s^{1/d} + t^{1/d})^d <= 2^d max(s, t), so for
    # t <= s the r-integral of the integrand is at most 2^d Q(k, s), Q the
    # Poisson lower tail. Doubling covers the mirrored region.
    def tail(s):
        return s * math.exp(-s + math.log(np.sum(_partial_exp_table(np.array([s]), k - 1)[-1])))

    val = integrate.quad(tail, top, np.inf)[0]
    return 2.0 * 2.0**d * val


def _log_binom(n, m):
    return math.lgamma(n + 1) - math.lgamma(m + 1) - math.lgamma(n - m + 1)


def inflation_constant(k):
    """Everything except the triple integral: ``Psi'(k) - 1 + C_k``."""
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    k = int(k)
    out = trigamma(k) - 1.0
    ln2 = math.log(2.0)
    if k == 1:
        return out + 2.0 * ln2
    psi_k = digamma(k)
    out += math.exp(_log_binom(2 * k - 2, k - 1) - (2 * k - 2) * ln2) * (digamma(2 * k - 1) - psi_k - ln2)
    acc = 0.0
    for j in range(k - 1):
        c = math.exp(_log_binom(k + j - 1, j) - (k + j) * ln2)
        acc += c * (1.0 - (k - j) * (digamma(k + j) - ln2 - psi_k))
    return out + acc / (k - 1)


def inflation_value(spec=None, *, d=None, k=None, **kw):
    """Asymptotic fixed-k variance inflation for dimension ``d`` and order ``k``.

    Accepts either an :class:`InflationSpec` or ``d=..., k=...`` keywords.
    """
    if spec is None:
        spec = InflationSpec(d=d, k=k, **kw)
    integral, err, trunc = _integral(spec)
    const = inflation_constant(spec.k)
    return InflationResult(
        d=spec.d,
        k=spec.k,
        value=const + integral,
        integral=integral,
        constant=const,
        error_bound=err + trunc,
        truncation_bound=trunc,
    )


def inflation_table(dims=TABLE_DIMS, ks=TABLE_KS, workers=None, **kw):
    """Grid of :class:`InflationResult` keyed by ``(d, k)``.

    ``workers > 1`` evaluates cells in a process pool; results do not depend
    on the worker count.
    """
    cells = [(d, k) for d in dims for k in ks]
    if workers and workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell, cells, [kw] * len(cells)))
    else:
        results = [_cell(c, kw) for c in cells]
    return dict(zip(cells, results))


def _cell(cell, kw):
    d, k = cell
    return inflation_value(InflationSpec(d=d, k=k, **kw))
