"""Command-line front end: ``sketchlsr {solve,experiment,bounds}``.

Every command prints (or writes with ``--out``) a JSON envelope::

    {"tool_version", "command", "config_echo", "started_at", "finished_at",
     "payload", "timings"}

``payload`` is deterministic given ``config_echo``; wall-clock data lives
only in ``timings`` and the timestamps. Exit codes: 0 success, 2 input
error, 3 numerical failure.
"""

import argparse
import json
import math
import os
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__, bounds
from .errors import (
    CertificateViolation,
    DomainError,
    FactorizationError,
    ParseError,
    RankError,
    SamplingError,
)
from .harness import ExperimentConfig, run_experiment
from .linalg import RegressionProblem, exact_lsr, thin_svd, leverage_scores
from .mmio import read_matrix_market, read_vector
from .sketches import SamplerConfig, SeededRng, sketch_from_dict
from .solver import certify, error_ratio, solve_sketched

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
THREADS_ENV = "SKETCHLSR_THREADS"


def _clean(obj):
    """JSON-ready copy: numpy scalars unwrapped, non-finite floats as strings."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isfinite(v):
            return v
        return "nan" if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return obj


def dumps(obj):
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def _now():
    return datetime.now(timezone.utc).isoformat()


def _default_threads():
    env = os.environ.get(THREADS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _envelope(command, config_echo, payload, timings, started_at):
    return {
        "tool_version": __version__,
        "command": command,
        "config_echo": config_echo,
        "started_at": started_at,
        "finished_at": _now(),
        "payload": payload,
        "timings": timings,
    }


def cmd_solve(args, argv):
    started = _now()
    X = read_matrix_market(args.x)
    y = read_vector(args.y, args.y_format)
    problem = RegressionProblem(X, y)
    t0 = time.perf_counter()
    svd = thin_svd(problem.X)
    beta_lsr, res_exact = exact_lsr(problem, svd)
    timings = {"exact": time.perf_counter() - t0}
    payload = {"method": args.method, "n": problem.n, "d": problem.d,
               "residual_sq_exact": res_exact}

    if args.method == "exact":
        payload.update(beta_tilde=beta_lsr, c_realized=problem.n, error_ratio=1.0,
                       rank_deficient=False, certificate=None)
    else:
        t0 = time.perf_counter()
        if args.sketch:
            op = sketch_from_dict(json.loads(Path(args.sketch).read_text()))
            if op.kind != args.method:
                raise DomainError(f"saved sketch is {op.kind!r}, --method is {args.method!r}")
        else:
            if args.c is None:
                raise DomainError("--c is required for sketched methods")
            sampler = SamplerConfig(args.method, args.c, literal_weights=args.literal_alg1_weights)
            profile = leverage_scores(svd) if args.method == "leverage" else None
            op = sampler.draw(problem.n, SeededRng(args.seed), profile)
        timings["sketch"] = time.perf_counter() - t0
        if args.save_sketch:
            Path(args.save_sketch).write_text(dumps(op.to_dict()))
        sol = solve_sketched(problem, op)
        timings.update(sol.timings)
        cert = certify(problem, svd, op, sol, beta_lsr)
        payload.update(
            c=op.c_target,
            seed=args.seed,
            literal_alg1_weights=args.literal_alg1_weights,
            beta_tilde=sol.beta_tilde,
            c_realized=sol.c_realized,
            rank_deficient=sol.rank_deficient,
            residual_sq_full=sol.residual_sq_full,
            residual_sq_sketched=sol.residual_sq_sketched,
            error_ratio=error_ratio(problem, sol, res_exact),
            certificate=cert.to_dict(),
            certificate_checks=cert.checks(),
        )
    echo = {"argv": list(argv), **{k: v for k, v in vars(args).items() if k != "func"}}
    return _envelope("solve", echo, payload, timings, started)


def cmd_experiment(args, argv):
    started = _now()
    try:
        data = json.loads(Path(args.config).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"config is not valid JSON: {exc.msg}", exc.lineno) from None
    config = ExperimentConfig.from_dict(data)
    t0 = time.perf_counter()
    stats = run_experiment(config, threads=args.threads)
    timings = {
        "total": time.perf_counter() - t0,
        "mean_wall_time": {str(s.c): s.mean_wall_time for s in stats.per_c},
    }
    if args.csv:
        Path(args.csv).write_text(stats.csv_lines())
    echo = {"argv": list(argv), "config": config.to_dict(), "threads": args.threads}
    return _envelope("experiment", echo, stats.to_dict(), timings, started)


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise DomainError(f"--calc {args.calc} needs {flags}")


def _bound_report(args):
    calc = args.calc
    if calc == "t1":
        _require(args, "d", "eps")
        inputs = {"d": args.d, "eps": args.eps, "c_lnd": args.c_lnd}
        c = bounds.theorem1_sample_size(args.d, args.eps, args.c_lnd)
        return bounds.BoundReport("leverage_sample_size", inputs, float(c), c_required=c)
    if calc == "t2":
        _require(args, "d", "mu")
        inputs = {"d": args.d, "mu": args.mu}
        c = bounds.theorem2_sample_size(args.d, args.mu)
        return bounds.BoundReport("uniform_sample_size_rounded", inputs, float(c), c_required=c)
    if calc == "uniform":
        _require(args, "d", "mu")
        inputs = {"d": args.d, "mu": args.mu, "theta1": args.theta1, "theta2": args.theta2,
                  "delta1": args.delta1, "delta2": args.delta2}
        c = bounds.uniform_sample_size(**inputs)
        return bounds.BoundReport("uniform_sample_size", inputs, float(c), c_required=c)
    if calc == "chernoff":
        _require(args, "d", "theta", "xi")
        inputs = {"d": args.d, "theta": args.theta, "xi": args.xi, "R": args.R,
                  "side": args.side}
        if args.side == "min":
            params = bounds.ChernoffParams(args.theta, 2.0, args.R, args.xi, args.xi, args.d)
        else:
            params = bounds.ChernoffParams(1.0, args.theta, args.R, args.xi, args.xi, args.d)
        p = bounds.chernoff_tail(params, args.side)
        return bounds.BoundReport(f"chernoff_{args.side}_tail", inputs, p, failure_prob=p)
    if calc == "boost":
        _require(args, "t")
        p = bounds.boost_success(args.t)
        return bounds.BoundReport("boost_success", {"t": args.t}, p, failure_prob=1.0 - p)
    if calc == "matmul":
        _require(args, "x_fro", "c")
        y_fro = args.y_fro if args.y_fro is not None else args.x_fro
        x_spec = args.x_spec if args.x_spec is not None else args.x_fro
        inputs = {"x_fro": args.x_fro, "y_fro": y_fro, "x_spec": x_spec, "c": args.c,
                  "variant": args.variant, "c_spec": args.c_spec}
        v = bounds.matmul_expected_bound(args.x_fro, y_fro, x_spec, args.c, args.variant,
                                         args.c_spec)
        return bounds.BoundReport("matmul_expected_error", inputs, v)
    _require(args, "kappa", "gamma", "beta_norm")
    inputs = {"const": args.const, "kappa": args.kappa, "gamma": args.gamma,
              "beta_norm": args.beta_norm}
    v = bounds.beta_error_bound(args.const, args.kappa, args.gamma, args.beta_norm)
    return bounds.BoundReport("beta_error_bound", inputs, v)


def cmd_bounds(args, argv):
    started = _now()
    report = _bound_report(args)
    echo = {"argv": list(argv), **{k: v for k, v in vars(args).items() if k != "func"}}
    return _envelope("bounds", echo, report.to_dict(), {}, started)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sketchlsr", description="Sketch-and-solve least squares toolkit."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="write the JSON envelope here instead of stdout")
        p.add_argument("--threads", type=int, default=_default_threads(),
                       help=f"worker threads (default: ${THREADS_ENV} or CPU count)")

    p = sub.add_parser("solve", help="solve one (sketched) least-squares problem")
    p.add_argument("--x", required=True, help="Matrix Market file holding X")
    p.add_argument("--y", required=True, help="y as one-column .mtx or headerless CSV")
    p.add_argument("--y-format", choices=["mtx", "csv"], default=None)
    p.add_argument("--method", required=True,
                   choices=["exact", "leverage", "uniform", "srht", "sparse"])
    p.add_argument("--c", type=int, default=None, help="target sketch size")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--literal-alg1-weights", action="store_true",
                   help="weight sampled rows by 1/p_i instead of 1/sqrt(p_i)")
    p.add_argument("--sketch", help="replay a sketch saved with --save-sketch")
    p.add_argument("--save-sketch", help="write the realized sketch as JSON")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("experiment", help="run a seeded Monte Carlo sweep")
    p.add_argument("--config", required=True, help="ExperimentConfig JSON")
    p.add_argument("--csv", help="write one CSV row per sketch size")
    common(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("bounds", help="evaluate a closed-form bound")
    p.add_argument("--calc", required=True,
                   choices=["t1", "t2", "uniform", "chernoff", "boost", "matmul", "beta"])
    p.add_argument("--d", type=int)
    p.add_argument("--eps", type=float)
    p.add_argument("--c-lnd", type=float, default=20.0)
    p.add_argument("--mu", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--theta1", type=float, default=bounds.UNIFORM_THETA1)
    p.add_argument("--theta2", type=float, default=bounds.UNIFORM_THETA2)
    p.add_argument("--delta1", type=float, default=bounds.UNIFORM_DELTA)
    p.add_argument("--delta2", type=float, default=bounds.UNIFORM_DELTA)
    p.add_argument("--xi", type=float, help="xi_min or xi_max")
    p.add_argument("--R", type=float, default=1.0, help="per-summand eigenvalue cap")
    p.add_argument("--side", choices=["min", "max"], default="min")
    p.add_argument("--t", type=int)
    p.add_argument("--x-fro", type=float)
    p.add_argument("--y-fro", type=float)
    p.add_argument("--x-spec", type=float)
    p.add_argument("--c", type=int)
    p.add_argument("--variant", choices=["frobenius", "spectral"], default="frobenius")
    p.add_argument("--c-spec", type=float, default=1.0)
    p.add_argument("--const", type=float, default=1.0, help="eps, or 1.2 for uniform sampling")
    p.add_argument("--kappa", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--beta-norm", type=float)
    common(p)
    p.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    try:
        envelope = args.func(args, argv)
    except (DomainError, ParseError, OSError) as exc:
        print(f"sketchlsr: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (RankError, FactorizationError, SamplingError, CertificateViolation) as exc:
        print(f"sketchlsr: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = dumps(envelope)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
