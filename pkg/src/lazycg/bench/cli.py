"""Command-line harness: ``run``, ``verify`` and ``sweep``.

Exit codes: 0 success, 1 failed verification, 2 malformed config or
arguments, 3 invariant violated during a run.
"""

import argparse
import itertools
import math
import os
import sys

from .. import bruteforce
from ..algorithms import OFFLINE_SOLVERS, ONLINE_SOLVERS, InvariantViolation
from ..algorithms._base import ConfigurationError
from .config import (
    ConfigError,
    build_domain,
    build_objective,
    build_stream,
    parse_config,
    resolve_solver_config,
)
from .trace_io import read_trace, write_trace
from .verify import verify_trace

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_INVARIANT = 0, 1, 2, 3


def _overrides(args):
    out = {}
    if args.time_limit is not None:
        out["time_limit_s"] = args.time_limit
    if args.no_cache:
        out["cache_enabled"] = False
    if args.oracle is not None:
        out["oracle"] = args.oracle
    return out


def _prepare(cfg, args, assignments=()):
    """Build the instance and every solver config up front so errors surface before output."""
    domain = build_domain(cfg)
    instance = stream = None
    jobs = []
    for spec in cfg.solvers:
        if spec.online:
            if stream is None:
                stream = build_stream(cfg, domain, args.seed)
            target = stream[0]
        else:
            if instance is None:
                instance = build_objective(cfg, domain, args.seed)
            target = instance
        try:
            config = resolve_solver_config(spec, target, domain)
            config = config.replace(**_overrides(args), **dict(assignments))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"[solver.{spec.name}]: {exc}") from None
        jobs.append((spec, config))
    return domain, instance, stream, jobs


def _execute(spec, config, domain, instance, stream):
    if spec.online:
        minimizer = None
        if bruteforce.is_enumerable(stream[0], domain) and domain.dimension <= 8:
            minimizer = bruteforce.domain_minimizer(domain)
        return ONLINE_SOLVERS[spec.algorithm](stream, domain, config, minimizer=minimizer)
    return OFFLINE_SOLVERS[spec.algorithm](instance, domain, config)


def _suffix(assignments):
    return "".join(f"_{k}={v:g}" if isinstance(v, float) else f"_{k}={v}"
                   for k, v in assignments)


def _summary_line(name, trace):
    last = trace.records[-1]
    s = trace.summary()
    gap = last["wolfe_gap"]
    return (f"{name}: iterations={s['iterations']} f={last['f']:.10g} "
            f"wolfe_gap={'nan' if math.isnan(gap) else format(gap, '.3e')} "
            f"lp_calls={s['lp_calls']} cache_hit_rate={s['cache_hit_rate']:.3f}"
            + (" truncated" if s["truncated"] else ""))


def _run_all(cfg, args, grid):
    try:
        prepared = [(assignments, _prepare(cfg, args, assignments)) for assignments in grid]
    except (ConfigError, ConfigurationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    os.makedirs(args.output_dir, exist_ok=True)
    seed = cfg.seed(args.seed)
    for assignments, (domain, instance, stream, jobs) in prepared:
        for spec, config in jobs:
            name = f"{cfg.name}_{spec.name}{_suffix(assignments)}"
            try:
                trace = _execute(spec, config, domain, instance, stream)
            except InvariantViolation as exc:
                print(f"invariant violated in {name}: {exc}", file=sys.stderr)
                return EXIT_INVARIANT
            except ConfigurationError as exc:
                print(f"error: [solver.{spec.name}]: {exc}", file=sys.stderr)
                return EXIT_CONFIG
            path = os.path.join(args.output_dir, name + ".csv")
            write_trace(trace, path, {"solver": spec.name, "seed": seed})
            print(_summary_line(name, trace))
    return EXIT_OK


def _parse_param(text):
    key, sep, values = text.partition("=")
    if not sep or not values:
        raise argparse.ArgumentTypeError(f"expected NAME=v1,v2,..., got {text!r}")
    out = []
    for raw in values.split(","):
        try:
            out.append((key, float(raw)))
        except ValueError:
            out.append((key, raw))
    return out


def cmd_run(args):
    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return _run_all(cfg, args, [()])


def cmd_sweep(args):
    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    grid = list(itertools.product(*args.param)) if args.param else [()]
    return _run_all(cfg, args, grid)


def cmd_verify(args):
    try:
        cfg = parse_config(args.config)
        data = read_trace(args.trace)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, StopIteration) as exc:
        print(f"error: cannot read trace {args.trace}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = verify_trace(data, cfg, args.seed)
    print(report)
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser():
    parser = argparse.ArgumentParser(prog="lazycg-bench",
                                     description="Run and audit lazy conditional gradient experiments.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="override the instance seed")
    sub = parser.add_subparsers(dest="command", required=True)

    runner = argparse.ArgumentParser(add_help=False, parents=[common])
    runner.add_argument("--time-limit", type=float, help="seconds, per solver and per oracle")
    runner.add_argument("--output-dir", default=".", help="directory for CSV traces")
    runner.add_argument("--no-cache", action="store_true", help="disable the oracle cache")
    runner.add_argument("--oracle", choices=("lmo", "augmentation"))

    p = sub.add_parser("run", parents=[runner], help="run every solver of a config")
    p.add_argument("config")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", parents=[runner], help="run a config over parameter values")
    p.add_argument("config")
    p.add_argument("--param", action="append", type=_parse_param, default=[],
                   help="NAME=v1,v2,...; repeat for a grid")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", parents=[common], help="audit a trace against its config")
    p.add_argument("trace")
    p.add_argument("config")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
