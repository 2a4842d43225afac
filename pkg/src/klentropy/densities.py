"""Reference densities with known entropy for ground-truth validation.

Every model exposes ``sample(rng, n)``, ``log_density(x)``, ``entropy()``
and ``logdensity_variance()`` (the efficient asymptotic variance
``Var log f(X)``). Radially symmetric models also provide
``laplacian_f(x)`` and a radial profile so that the leading bias constant
can be reduced to a one-dimensional integral.
"""

import math
import re

import numpy as np
from scipy import integrate

from .specfun import digamma, log_unit_ball_volume, trigamma, unit_ball_volume

__all__ = [
    "DensityModel",
    "Gaussian",
    "UniformCube",
    "GammaModel",
    "MultivariateT",
    "BetaModel",
    "make_model",
    "parse_model",
    "lambda1_constant",
    "lambda1_gaussian",
    "UnsupportedModelError",
]


class UnsupportedModelError(TypeError):
    pass


class DensityModel:
    """Base class; subclasses set ``name`` and ``d`` and fill in the methods."""

    name = "model"
    d = 1
    radial = False

    def sample(self, rng, n):
        raise NotImplementedError

    def log_density(self, x):
        raise NotImplementedError

    def entropy(self):
        raise NotImplementedError

    def logdensity_variance(self):
        raise NotImplementedError

    @property
    def params(self):
        return {}

    @property
    def spec(self):
        args = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}:{args}" if args else self.name

    def _as_points(self, x):
        x = np.asarray(x, dtype=float)
        if self.d == 1 and x.ndim <= 1:
            x = x.reshape(-1, 1)
        return x

    def __repr__(self):
        return f"<{type(self).__name__} {self.spec}>"


class Gaussian(DensityModel):
    """Standard normal on R^d."""

    name = "gaussian"
    radial = True

    def __init__(self, d=1):
        self.d = _check_dim(d)

    @property
    def params(self):
        return {"d": self.d}

    def sample(self, rng, n):
        return rng.standard_normal((n, self.d))

    def log_density(self, x):
        x = self._as_points(x)
        return -0.5 * self.d * math.log(2 * math.pi) - 0.5 * np.sum(x * x, axis=-1)

    def radial_log_density(self, r):
        return -0.5 * self.d * math.log(2 * math.pi) - 0.5 * np.asarray(r) ** 2

    def radial_laplacian_ratio(self, r):
        """Delta f / f as a function of the radius."""
        r = np.asarray(r, dtype=float)
        return r * r - self.d

    def laplacian_f(self, x):
        x = self._as_points(x)
        return (np.sum(x * x, axis=-1) - self.d) * np.exp(self.log_density(x))

    def entropy(self):
        return 0.5 * self.d * math.log(2 * math.pi * math.e)

    def logdensity_variance(self):
        # ||X||^2 / 2 with ||X||^2 ~ chi^2_d
        return 0.5 * self.d


class UniformCube(DensityModel):
    """Uniform on [0, 1]^d."""

    name = "uniform_cube"

    def __init__(self, d=1):
        self.d = _check_dim(d)

    @property
    def params(self):
        return {"d": self.d}

    def sample(self, rng, n):
        return rng.random((n, self.d))

    def log_density(self, x):
        x = self._as_points(x)
        inside = np.all((x >= 0.0) & (x <= 1.0), axis=-1)
        return np.where(inside, 0.0, -np.inf)

    def laplacian_f(self, x):
        x = self._as_points(x)
        return np.zeros(x.shape[0])

    def entropy(self):
        return 0.0

    def logdensity_variance(self):
        return 0.0


class GammaModel(DensityModel):
    """Gamma(a, 1) on (0, inf)."""

    name = "gamma"

    def __init__(self, a=1.0):
        if not (a > 0):
            raise ValueError(f"gamma shape must be positive, got {a!r}")
        self.a = float(a)
        self.d = 1

    @property
    def params(self):
        return {"a": self.a}

    def sample(self, rng, n):
        return rng.standard_gamma(self.a, size=(n, 1))

    def log_density(self, x):
        x = self._as_points(x)[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (self.a - 1.0) * np.log(x) - x - math.lgamma(self.a)
        return np.where(x > 0, out, -np.inf)

    def entropy(self):
        a = self.a
        return a + math.lgamma(a) + (1.0 - a) * digamma(a)

    def logdensity_variance(self):
        # Var((a-1) log X - X) with Var log X = Psi'(a), Var X = a, Cov(log X, X) = 1
        a = self.a
        return (a - 1.0) ** 2 * trigamma(a) + a - 2.0 * (a - 1.0)


class BetaModel(DensityModel):
    """Beta(a, b) on (0, 1)."""

    name = "beta"

    def __init__(self, a=2.0, b=2.0):
        if not (a > 0 and b > 0):
            raise ValueError(f"beta parameters must be positive, got a={a!r}, b={b!r}")
        self.a = float(a)
        self.b = float(b)
        self.d = 1

    @property
    def params(self):
        return {"a": self.a, "b": self.b}

    def _log_beta(self):
        return math.lgamma(self.a) + math.lgamma(self.b) - math.lgamma(self.a + self.b)

    def sample(self, rng, n):
        return rng.beta(self.a, self.b, size=(n, 1))

    def log_density(self, x):
        x = self._as_points(x)[:, 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (self.a - 1.0) * np.log(x) + (self.b - 1.0) * np.log1p(-x) - self._log_beta()
        return np.where((x > 0) & (x < 1), out, -np.inf)

    def entropy(self):
        a, b = self.a, self.b
        return self._log_beta() - (a - 1) * digamma(a) - (b - 1) * digamma(b) + (a + b - 2) * digamma(a + b)

    def logdensity_variance(self):
        a, b = self.a, self.b
        tab = trigamma(a + b)
        var_lx = trigamma(a) - tab
        var_l1x = trigamma(b) - tab
        return (a - 1) ** 2 * var_lx + (b - 1) ** 2 * var_l1x - 2 * (a - 1) * (b - 1) * tab


class MultivariateT(DensityModel):
    """Standard multivariate t with ``rho`` degrees of freedom and identity scale."""

    name = "mvt"
    radial = True

    def __init__(self, d=1, rho=5.0):
        self.d = _check_dim(d)
        if not (rho > 0):
            raise ValueError(f"degrees of freedom must be positive, got {rho!r}")
        self.rho = float(rho)
        p = 0.5 * (self.rho + self.d)
        self._power = p
        self._log_norm = math.lgamma(p) - math.lgamma(0.5 * self.rho) - 0.5 * self.d * math.log(self.rho * math.pi)

    @property
    def params(self):
        return {"d": self.d, "rho": self.rho}

    def sample(self, rng, n):
        z = rng.standard_normal((n, self.d))
        chi2 = rng.chisquare(self.rho, size=(n, 1))
        return z / np.sqrt(chi2 / self.rho)

    def radial_log_density(self, r):
        r = np.asarray(r, dtype=float)
        return self._log_norm - self._power * np.log1p(r * r / self.rho)

    def log_density(self, x):
        x = self._as_points(x)
        return self.radial_log_density(np.sqrt(np.sum(x * x, axis=-1)))

    def radial_laplacian_ratio(self, r):
        r = np.asarray(r, dtype=float)
        g = 1.0 + r * r / self.rho
        p = self._power
        return -(2.0 * p / self.rho) / (g * g) * (self.d * g - 2.0 * (p + 1.0) * r * r / self.rho)

    def laplacian_f(self, x):
        x = self._as_points(x)
        r = np.sqrt(np.sum(x * x, axis=-1))
        return self.radial_laplacian_ratio(r) * np.exp(self.radial_log_density(r))

    def entropy(self):
        # 1 + ||X||^2/rho = 1/B with B ~ Beta(rho/2, d/2)
        p = self._power
        return -self._log_norm + p * (digamma(p) - digamma(0.5 * self.rho))

    def logdensity_variance(self):
        p = self._power
        return p * p * (trigamma(0.5 * self.rho) - trigamma(p))


def _check_dim(d):
    if int(d) != d or d < 1:
        raise ValueError(f"dimension must be a positive integer, got {d!r}")
    return int(d)


_FACTORIES = {
    "gaussian": (Gaussian, {"d": int}),
    "normal": (Gaussian, {"d": int}),
    "uniform_cube": (UniformCube, {"d": int}),
    "uniform": (UniformCube, {"d": int}),
    "gamma": (GammaModel, {"a": float}),
    "mvt": (MultivariateT, {"d": int, "rho": float}),
    "multivariate_t": (MultivariateT, {"d": int, "rho": float}),
    "beta": (BetaModel, {"a": float, "b": float}),
}


def make_model(name, **params):
    """Build a model by family name, e.g. ``make_model("mvt", d=2, rho=5)``."""
    try:
        cls, types = _FACTORIES[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; expected one of {sorted(_FACTORIES)}") from None
    unknown = set(params) - set(types)
    if unknown:
        raise ValueError(f"unknown parameter(s) {sorted(unknown)} for model {name!r}")
    return cls(**{k: types[k](v) for k, v in params.items()})


_SPEC_RE = re.compile(r"^\s*([A-Za-z_]+)\s*(?::\s*(.*))?$")


def parse_model(spec):
    """Parse strings like ``gaussian:d=3``, ``gamma:a=2.5``, ``mvt:d=2,rho=5``."""
    if isinstance(spec, DensityModel):
        return spec
    m = _SPEC_RE.match(spec)
    if not m:
        raise ValueError(f"malformed model spec {spec!r}")
    name, rest = m.group(1), m.group(2)
    params = {}
    if rest:
        for item in rest.split(","):
            key, sep, value = item.partition("=")
            if not sep or not key.strip() or not value.strip():
                raise ValueError(f"malformed parameter {item!r} in model spec {spec!r}")
            params[key.strip()] = float(value)
    return make_model(name, **params)


def lambda1_constant(model, d=None, epsabs=0.0, epsrel=1e-10):
    """Leading bias constant ``-(2(d+2) V_d^{2/d})^{-1} int Delta f / f^{2/d}``.

    Radial models are reduced to an integral over the radius with
    ``dx = d V_d r^{d-1} dr``. Models whose Laplacian vanishes on the
    support give zero.
    """
    d = model.d if d is None else d
    if d != model.d:
        raise ValueError(f"model dimension {model.d} does not match d={d}")
    if not hasattr(model, "laplacian_f"):
        raise UnsupportedModelError(f"{model!r} does not provide a Laplacian")
    vd = unit_ball_volume(d)
    pref = -1.0 / (2.0 * (d + 2) * vd ** (2.0 / d))
    if isinstance(model, UniformCube):
        return 0.0
    if not getattr(model, "radial", False):
        raise UnsupportedModelError(f"lambda1 quadrature needs a radial model, got {model!r}")
    surface = d * vd

    def integrand(r):
        # Delta f / f^{2/d} = (Delta f / f) f^{1 - 2/d}
        logf = model.radial_log_density(r)
        return float(model.radial_laplacian_ratio(r) * np.exp((1.0 - 2.0 / d) * logf) * surface * r ** (d - 1))

    val, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=epsabs, epsrel=epsrel, limit=200)
    return pref * val


def lambda1_gaussian(d):
    """Closed form of :func:`lambda1_constant` for the standard normal (d >= 3)."""
    if d < 3:
        raise ValueError("the Gaussian bias integral is finite only for d >= 3")
    beta = 1.0 - 2.0 / d
    integral = 4.0 * math.pi * beta ** (-(d + 2) / 2.0)
    return -integral / (2.0 * (d + 2) * math.exp(2.0 / d * log_unit_ball_volume(d)))
