"""Command-line entry point: ``overlapq {tail,validate,mean,sweep,simulate}``.

Exit codes: 0 success, 1 validation band violated, 2 configuration or
schema error, 3 unsupported method/model combination, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone

from . import __version__
from .analytic import (DEFAULT_SAMPLES, DEFAULT_STEPS, METHODS, PairBatch, PairIndividual,
                       TupleQuery, default_grid, overlap_mean, query_from_dict, tail_curve)
from .distributions import QueueModel
from .errors import DomainError, ModelSpecError, QuadratureError, UnsupportedCombination
from .simulation import estimate_tail, overlaps_from_trajectory, simulate_trajectory
from .validation import compare_curves

EXIT_OK, EXIT_BAND, EXIT_CONFIG, EXIT_UNSUPPORTED, EXIT_NUMERICAL = 0, 1, 2, 3, 4


class ConfigError(Exception):
    """Bad command-line or file configuration; ``field`` names the culprit."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field


def _num(x):
    return repr(float(x))


def _load_json(path, field):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError(field, f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(field, f"invalid JSON in {path}: {exc.msg}") from None
    except OSError as exc:
        raise ConfigError(field, f"cannot read {path}: {exc.strerror}") from None


def _load_model(path):
    return QueueModel.from_dict(_load_json(path, "--model"))


def _load_query(path):
    return query_from_dict(_load_json(path, "--query"))


def _parse_lags(text):
    parts = text.split("..")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise ConfigError("--lags", f"expected A..B, got {text!r}") from None
    if lo > hi:
        raise ConfigError("--lags", "empty lag range")
    return list(range(lo, hi + 1))


def _grid(model, query, args):
    if args.steps < 2:
        raise ConfigError("--steps", "must be >= 2")
    if args.t_max is not None and args.t_max <= 0:
        raise ConfigError("--t-max", "must be positive")
    return default_grid(model, query, args.steps, args.t_max)


def _check_common(args):
    if args.samples < 1:
        raise ConfigError("--samples", "must be >= 1")
    if not 0.0 < args.delta < 1.0:
        raise ConfigError("--delta", "must lie in (0, 1)")


def _config(args, model, query, grid=None, **extra):
    cfg = {"command": args.command, "version": __version__, "model": model.to_dict(),
           "method": args.method, "samples": args.samples, "seed": args.seed,
           "delta": args.delta, "format": args.format}
    if query is not None:
        cfg["query"] = query.to_dict()
    if grid is not None:
        cfg["steps"] = int(len(grid))
        cfg["t_max"] = float(grid[-1])
    cfg.update(extra)
    return cfg


def _header_lines(cfg, args):
    lines = [f"# overlapq {args.command}",
             "# config: " + json.dumps(cfg, sort_keys=True)]
    if not args.no_timestamp:
        lines.append("# generated: " + _timestamp())
    return lines


def _timestamp():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write_csv(args, cfg, header, rows):
    buf = io.StringIO()
    for line in _header_lines(cfg, args):
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    _emit(args, buf.getvalue())


def _write_json(args, cfg, payload):
    doc = {"config": cfg, **payload}
    if not args.no_timestamp:
        doc["generated"] = _timestamp()
    _emit(args, json.dumps(doc, sort_keys=True, indent=2) + "\n")


def _emit(args, text):
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)


def _curve_rows(curve, lag=None):
    prefix = [] if lag is None else [lag]
    return [prefix + [_num(t), _num(v), curve.method, _num(e)]
            for t, v, e in zip(curve.t, curve.values, curve.error)]


def _curve(model, query, grid, args):
    return tail_curve(model, query, grid, args.method, n_samples=args.samples, seed=args.seed)


def cmd_tail(args):
    model, query = _load_model(args.model), _load_query(args.query)
    _check_common(args)
    grid = _grid(model, query, args)
    curve = _curve(model, query, grid, args)
    cfg = _config(args, model, query, grid)
    if args.format == "csv":
        _write_csv(args, cfg, ["t", "tail", "method", "stderr_or_tol"], _curve_rows(curve))
    else:
        _write_json(args, cfg, {"curve": curve.to_dict()})
    return EXIT_OK


def _trajectory_samples(model, query, n, seed):
    span = 0
    if isinstance(query, TupleQuery):
        span = query.span
    elif isinstance(query, (PairIndividual, PairBatch)):
        span = query.lag
    log = simulate_trajectory(model, n * (span + 1), seed)
    return overlaps_from_trajectory(log, query)


def cmd_validate(args):
    model, query = _load_model(args.model), _load_query(args.query)
    _check_common(args)
    # negative control: simulate a different query on the same grid
    sim_query = _load_query(args.sim_query) if args.sim_query else query
    grid = _grid(model, query, args)
    curve = _curve(model, query, grid, args)
    samples = _trajectory_samples(model, sim_query, args.samples, args.seed)
    sim = estimate_tail(samples, grid, args.delta, args.seed)
    report = compare_curves(curve, sim)
    extra = {"sim_query": sim_query.to_dict()} if args.sim_query else {}
    cfg = _config(args, model, query, grid, **extra)
    if args.format == "csv":
        rows = [[_num(t), _num(a), _num(e), _num(report.epsilon), "pass" if ok else "fail"]
                for t, a, e, ok in zip(report.t, report.analytic, report.empirical,
                                       report.per_point_pass)]
        _write_csv(args, {**cfg, "verdict": report.verdict,
                          "max_abs_deviation": report.max_abs_deviation},
                   ["t", "analytic", "empirical", "epsilon", "pass"], rows)
    else:
        _write_json(args, cfg, {"report": report.to_dict()})
    print(f"{report.verdict}: max deviation {report.max_abs_deviation:.3g}, "
          f"epsilon {report.epsilon:.3g}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_BAND


def cmd_mean(args):
    model, query = _load_model(args.model), _load_query(args.query)
    _check_common(args)
    res = overlap_mean(model, query, args.method, n_samples=args.samples, seed=args.seed)
    cfg = _config(args, model, query)
    if args.format == "csv":
        closed = "" if res.closed_form is None else _num(res.closed_form)
        _write_csv(args, cfg, ["mean", "method", "stderr_or_tol", "closed_form"],
                   [[_num(res.value), res.method, _num(res.error), closed]])
    else:
        _write_json(args, cfg, {"mean": res.value, "method": res.method, "error": res.error,
                                "closed_form": res.closed_form})
    return EXIT_OK


def _with_lag(query, lag):
    if isinstance(query, PairIndividual):
        return PairIndividual(lag, query.same_customer)
    if isinstance(query, PairBatch):
        return PairBatch(query.mode, lag)
    raise ConfigError("--query", "sweep supports pair queries only")


def cmd_sweep(args):
    model, query = _load_model(args.model), _load_query(args.query)
    _check_common(args)
    if args.lags is None:
        raise ConfigError("--lags", "required for sweep")
    lags = _parse_lags(args.lags)
    queries = [_with_lag(query, lag) for lag in lags]
    grid = _grid(model, queries[0], args)
    curves = [_curve(model, q, grid, args) for q in queries]
    cfg = _config(args, model, query, grid, lags=lags)
    if args.format == "csv":
        rows = [row for lag, c in zip(lags, curves) for row in _curve_rows(c, lag)]
        _write_csv(args, cfg, ["lag", "t", "tail", "method", "stderr_or_tol"], rows)
    else:
        _write_json(args, cfg, {"curves": [{"lag": lag, **c.to_dict()}
                                           for lag, c in zip(lags, curves)]})
    return EXIT_OK


def cmd_simulate(args):
    model = _load_model(args.model)
    if args.batches < 1:
        raise ConfigError("--batches", "must be >= 1")
    log = simulate_trajectory(model, args.batches, args.seed)
    cfg = {"command": "simulate", "version": __version__, "model": model.to_dict(),
           "batches": args.batches, "seed": args.seed}
    if args.format == "json":
        _write_json(args, cfg, {"trajectory": {
            "arrival_time": log.arrival.tolist(), "batch_size": log.batch_size.tolist(),
            "service_time": log.service.tolist()}})
        return EXIT_OK
    buf = io.StringIO()
    for line in _header_lines(cfg, args):
        buf.write(line + "\n")
    log.to_csv(buf)
    _emit(args, buf.getvalue())
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="overlapq",
                                     description="Overlap-time tails in GI^B/GI/inf queues.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, query=True):
        p.add_argument("--model", required=True, help="model JSON file")
        if query:
            p.add_argument("--query", required=True, help="query JSON file")
            p.add_argument("--method", choices=METHODS, default="auto")
            p.add_argument("--t-max", type=float, default=None)
            p.add_argument("--steps", type=int, default=DEFAULT_STEPS)
            p.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
            p.add_argument("--delta", type=float, default=0.01)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default="-", help="output file (default: stdout)")
        p.add_argument("--no-timestamp", action="store_true")

    for name, fn, helptext in (("tail", cmd_tail, "tail curve on a grid"),
                               ("validate", cmd_validate, "analytic curve vs trajectory"),
                               ("mean", cmd_mean, "mean overlap time"),
                               ("sweep", cmd_sweep, "tail curves over a lag range")):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.set_defaults(func=fn)
        if name == "sweep":
            p.add_argument("--lags", default=None, help="lag range A..B")
        if name == "validate":
            p.add_argument("--sim-query", default=None, help=argparse.SUPPRESS)

    p = sub.add_parser("simulate", help="dump a trajectory")
    common(p, query=False)
    p.add_argument("--batches", type=int, default=1000)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ModelSpecError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnsupportedCombination as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
