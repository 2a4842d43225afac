"""Monte Carlo experiment runner.

Replicate ``r`` of an experiment with seed ``s`` draws its sample from the
generator ``numpy.random.Generator(Philox(SeedSequence(s, spawn_key=(r,))))``,
i.e. the ``r``-th child of ``SeedSequence(s)``. Streams therefore do not
depend on execution order or on how many workers run, and two experiments
that share a seed, model and ``n`` see identical samples (paired designs).
"""

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .densities import parse_model
from .estimator import weighted_kl_estimate
from .knn import ZeroDistanceError, all_knn_distances
from .weights import canonical_weights, unit_weights

__all__ = [
    "ExperimentConfig",
    "SimulationReport",
    "SimulationError",
    "replicate_rng",
    "resolve_weights",
    "run_experiment",
    "load_config",
    "report_json",
    "SCHEMA_VERSION",
    "WORKERS_ENV",
]

SCHEMA_VERSION = 1
WORKERS_ENV = "KLENTROPY_WORKERS"


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    model: str
    n: int
    k: int
    weights: str = "unweighted"
    replicates: int = 100
    seed: int = 0
    ci_level: Optional[float] = None
    backend: str = "tree"

    def __post_init__(self):
        model = parse_model(self.model)
        object.__setattr__(self, "model", model.spec)
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if not (1 <= self.k <= self.n - 1):
            raise ValueError(f"k must lie in [1, n-1], got k={self.k}, n={self.n}")
        if self.weights not in ("unweighted", "canonical"):
            raise ValueError(f"weights must be 'unweighted' or 'canonical', got {self.weights!r}")
        if self.ci_level is not None and not (0.0 < self.ci_level < 1.0):
            raise ValueError("ci_level must lie in (0, 1)")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.backend not in ("tree", "brute"):
            raise ValueError(f"unknown backend {self.backend!r}")

    @classmethod
    def from_dict(cls, data):
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config key(s): {sorted(extra)}")
        kw = dict(data)
        for key in ("n", "k", "replicates", "seed"):
            if key in kw:
                kw[key] = int(kw[key])
        if kw.get("ci_level") is not None:
            kw["ci_level"] = float(kw["ci_level"])
        return cls(**kw)


@dataclass
class SimulationReport:
    config: ExperimentConfig
    truth: float
    efficient_variance: float
    mean_h: float
    bias: float
    variance: float
    n_mse: float
    clamp_rate: float
    coverage: Optional[float]
    resampled: int
    mc_stderr: dict = field(default_factory=dict)
    estimates: np.ndarray = field(default=None, repr=False)
    covered: Optional[np.ndarray] = field(default=None, repr=False)

    def as_dict(self):
        cfg = asdict(self.config)
        return {
            "schema": SCHEMA_VERSION,
            "kind": "simulation",
            "provenance": {"config": cfg, "version": __version__, "rng": "Philox/SeedSequence(seed, spawn_key=(r,))"},
            "truth": self.truth,
            "efficient_variance": self.efficient_variance,
            "mean_h": self.mean_h,
            "bias": self.bias,
            "variance": self.variance,
            "n_mse": self.n_mse,
            "coverage": self.coverage,
            "clamp_rate": self.clamp_rate,
            "resampled": self.resampled,
            "mc_stderr": dict(self.mc_stderr),
        }


def replicate_rng(seed, r):
    ss = np.random.SeedSequence(seed, spawn_key=(r,))
    return np.random.Generator(np.random.Philox(ss))


def resolve_weights(kind, k, d):
    if kind == "canonical":
        return canonical_weights(k, d)
    if kind == "unweighted":
        return unit_weights(k, d)
    raise ValueError(f"unknown weights {kind!r}")


def _one_replicate(cfg, model, w, r):
    rng = replicate_rng(cfg.seed, r)
    resampled = 0
    for attempt in range(2):
        x = model.sample(rng, cfg.n)
        try:
            nd = all_knn_distances(x, w.k, backend=cfg.backend)
        except ZeroDistanceError as exc:
            if attempt == 1:
                raise SimulationError(f"replicate {r}: duplicate points after resampling: {exc}") from exc
            resampled += 1
            continue
        est = weighted_kl_estimate(x, w, ci=cfg.ci_level, variance=True, neighbours=nd)
        return est, resampled


def _workers(workers):
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1") or 1)
    return max(1, workers)


def run_experiment(cfg, workers=None):
    """Run ``cfg.replicates`` independent replicates and aggregate them.

    Bias, variance and ``n * MSE`` are measured against the model's
    closed-form entropy. Results are bit-identical for any ``workers``.
    """
    model = parse_model(cfg.model)
    w = resolve_weights(cfg.weights, cfg.k, model.d)
    truth = model.entropy()
    M = cfg.replicates
    nw = _workers(workers)
    task = lambda r: _one_replicate(cfg, model, w, r)  # noqa: E731
    if nw > 1:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            results = list(pool.map(task, range(M)))
    else:
        results = [task(r) for r in range(M)]

    h = np.array([est.h_hat for est, _ in results])
    clamped = np.array([bool(est.clamped) for est, _ in results])
    resampled = sum(rs for _, rs in results)
    n = cfg.n
    err = h - truth
    mean_h = float(np.mean(h))
    bias = mean_h - truth
    variance = float(np.var(h, ddof=1)) if M > 1 else 0.0
    sq = err * err
    n_mse = float(n * np.mean(sq))
    stderr = {
        "mean_h": math.sqrt(variance / M),
        "bias": math.sqrt(variance / M),
        "n_mse": float(n * np.std(sq, ddof=1) / math.sqrt(M)) if M > 1 else 0.0,
        "variance": _variance_stderr(h) if M > 3 else 0.0,
    }
    coverage = None
    covered = None
    if cfg.ci_level is not None:
        covered = np.array([truth in est.ci for est, _ in results])
        coverage = float(np.mean(covered))
        stderr["coverage"] = math.sqrt(coverage * (1.0 - coverage) / M)
    return SimulationReport(
        config=cfg,
        truth=truth,
        efficient_variance=model.logdensity_variance(),
        mean_h=mean_h,
        bias=bias,
        variance=variance,
        n_mse=n_mse,
        clamp_rate=float(np.mean(clamped)),
        coverage=coverage,
        resampled=resampled,
        mc_stderr=stderr,
        estimates=h,
        covered=covered,
    )


def _variance_stderr(x):
    # Large-sample standard error of the sample variance, (m4 - s^4) / M.
    M = x.size
    c = x - x.mean()
    m2 = np.mean(c**2)
    m4 = np.mean(c**4)
    return float(math.sqrt(max(m4 - m2 * m2, 0.0) / M))


def load_config(path):
    """Read an :class:`ExperimentConfig` from JSON or ``key = value`` lines."""
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(text)
    else:
        data = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            value = value.strip()
            data[key.strip()] = None if value.lower() in ("", "none", "null") else value
    return ExperimentConfig.from_dict(data)


def report_json(report):
    return json.dumps(report.as_dict(), indent=2, sort_keys=True)
