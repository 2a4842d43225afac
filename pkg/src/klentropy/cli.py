"""Command-line interface: ``klentropy {estimate,weights,inflation,simulate}``.

Exit status is 0 on success, 2 for usage errors and malformed input, 1 for
numerical failures. Errors are written to stderr as one JSON object.
"""

import argparse
import json
import re
import sys

import numpy as np

from .estimator import weighted_kl_estimate
from .harness import SCHEMA_VERSION, ExperimentConfig, SimulationError, load_config, report_json, resolve_weights
from .inflation import TABLE_DIMS, TABLE_KS, QuadratureConvergenceError, inflation_table, inflation_value
from .knn import ZeroDistanceError
from .weights import WeightError, canonical_weights, validate_weights


class InputError(ValueError):
    pass


_SPLIT = re.compile(r"[,\s]+")


def read_points(path):
    """Read one point per row; comma or whitespace separated; optional header row."""
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            fields = [f for f in _SPLIT.split(line) if f]
            try:
                rows.append([float(f) for f in fields])
            except ValueError:
                if not rows and lineno == _first_content_line(path):
                    continue  # header
                raise InputError(f"{path}:{lineno}: non-numeric value in {line!r}") from None
    if not rows:
        raise InputError(f"{path}: no data rows")
    width = len(rows[0])
    for i, r in enumerate(rows):
        if len(r) != width:
            raise InputError(f"{path}: row {i + 1} has {len(r)} columns, expected {width}")
    pts = np.array(rows, dtype=float)
    if not np.all(np.isfinite(pts)):
        raise InputError(f"{path}: non-finite values")
    return pts


def _first_content_line(path):
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if s and not s.startswith("#"):
                return lineno
    return 0


def _emit(obj, as_json, text):
    if as_json:
        print(json.dumps(obj, indent=2, sort_keys=True))
    else:
        print(text)


def cmd_estimate(args):
    pts = read_points(args.input)
    d = pts.shape[1]
    if args.weights == "canonical":
        w = canonical_weights(args.k, d)
    else:
        w = resolve_weights("unweighted", args.k, d)
    est = weighted_kl_estimate(pts, w, backend=args.backend, ci=args.ci, variance=True)
    out = {"schema": SCHEMA_VERSION, "kind": "estimate", "weights_kind": args.weights, **est.as_dict()}
    lines = [f"h_hat  {est.h_hat:.10g}", f"v_hat  {est.variance_hat:.10g}" + ("  (clamped)" if est.clamped else "")]
    if est.ci is not None:
        lines.append(f"ci     [{est.ci.lower:.10g}, {est.ci.upper:.10g}] at level {est.ci.level:g}")
    lines.append(f"n={est.n} d={est.d} k={est.k} support={est.weights.support}")
    _emit(out, args.json, "\n".join(lines))
    return 0


def cmd_weights(args):
    w = canonical_weights(args.k, args.d)
    rep = validate_weights(w)
    out = {
        "schema": SCHEMA_VERSION,
        "kind": "weights",
        "k": w.k,
        "d": w.d,
        "support": w.support,
        "values": [w[j] for j in w.support],
        "report": rep.as_dict(),
    }
    lines = [f"k={w.k} d={w.d}"]
    lines += [f"  w[{j}] = {w[j]:.15g}" for j in w.support]
    lines.append(f"sum residual     {rep.sum_residual:.3e}")
    for l, m in enumerate(rep.moment_residuals, start=1):
        lines.append(f"moment l={l} res.  {m:.3e}")
    lines.append(f"in class         {rep.in_class}")
    _emit(out, args.json, "\n".join(lines))
    return 0


def cmd_inflation(args):
    if args.table:
        tab = inflation_table(workers=args.workers)
        if args.json:
            cells = [r.as_dict() for r in tab.values()]
            print(json.dumps({"schema": SCHEMA_VERSION, "kind": "inflation_table", "cells": cells}, indent=2))
        else:
            print("d," + ",".join(f"k={k}" for k in TABLE_KS))
            for d in TABLE_DIMS:
                print(f"{d}," + ",".join(f"{tab[(d, k)].value:.4f}" for k in TABLE_KS))
        return 0
    if args.d is None or args.k is None:
        raise InputError("inflation needs --d and --k, or --table")
    res = inflation_value(d=args.d, k=args.k)
    _emit(
        {"schema": SCHEMA_VERSION, "kind": "inflation", **res.as_dict()},
        args.json,
        f"{res.value:.4f} +- {res.error_bound:.1e}",
    )
    return 0


def cmd_simulate(args):
    if args.config:
        cfg = load_config(args.config)
        overrides = {
            k: v
            for k, v in (
                ("model", args.model),
                ("n", args.n),
                ("k", args.k),
                ("weights", args.weights),
                ("replicates", args.reps),
                ("seed", args.seed),
                ("ci_level", args.ci),
                ("backend", args.backend),
            )
            if v is not None
        }
        if overrides:
            cfg = ExperimentConfig.from_dict({**cfg.__dict__, **overrides})
    else:
        missing = [f for f, v in (("--model", args.model), ("--n", args.n), ("--k", args.k)) if v is None]
        if missing:
            raise InputError(f"simulate needs {', '.join(missing)} (or --config)")
        cfg = ExperimentConfig(
            model=args.model,
            n=args.n,
            k=args.k,
            weights=args.weights or "unweighted",
            replicates=args.reps or 100,
            seed=args.seed or 0,
            ci_level=args.ci,
            backend=args.backend or "tree",
        )
    from .harness import run_experiment

    report = run_experiment(cfg, workers=args.workers)
    text = report_json(report)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="klentropy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("estimate", help="estimate the entropy of a point cloud")
    e.add_argument("--input", required=True, help="CSV/whitespace file, one point per row")
    e.add_argument("--k", type=int, required=True)
    e.add_argument("--weights", choices=("canonical", "unweighted"), default="unweighted")
    e.add_argument("--ci", type=float, default=None, metavar="LEVEL")
    e.add_argument("--backend", choices=("tree", "brute"), default="tree")
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_estimate)

    w = sub.add_parser("weights", help="canonical debiasing weights")
    w.add_argument("--k", type=int, required=True)
    w.add_argument("--d", type=int, required=True)
    w.add_argument("--json", action="store_true")
    w.set_defaults(func=cmd_weights)

    i = sub.add_parser("inflation", help="fixed-k asymptotic variance inflation")
    i.add_argument("--d", type=int)
    i.add_argument("--k", type=int)
    i.add_argument("--table", action="store_true", help="full d x k grid as CSV")
    i.add_argument("--workers", type=int, default=None)
    i.add_argument("--json", action="store_true")
    i.set_defaults(func=cmd_inflation)

    s = sub.add_parser("simulate", help="Monte Carlo experiment")
    s.add_argument("--config", help="JSON or key=value config file")
    s.add_argument("--model", type=str, help="e.g. gaussian:d=3, gamma:a=2.5, mvt:d=2,rho=5")
    s.add_argument("--n", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--weights", choices=("canonical", "unweighted"))
    s.add_argument("--reps", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--ci", type=float, metavar="LEVEL")
    s.add_argument("--backend", choices=("tree", "brute"))
    s.add_argument("--workers", type=int, default=None)
    s.add_argument("--output", help="write the JSON report here instead of stdout")
    s.set_defaults(func=cmd_simulate)
    return p


def _fail(code, exc):
    print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InputError, OSError, json.JSONDecodeError) as exc:
        return _fail(2, exc)
    except (ZeroDistanceError, WeightError, QuadratureConvergenceError, SimulationError, ArithmeticError) as exc:
        return _fail(1, exc)
    except ValueError as exc:
        return _fail(2, exc)


if __name__ == "__main__":
    sys.exit(main())
