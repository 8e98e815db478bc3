"""Command-line front end.

Exit codes: 0 definitive result, 2 inconclusive, 1 usage or input error.
Every spec argument accepts inline JSON or a path to a JSON file.  Option
defaults may be overridden by a JSON file named in ``$ABELSTAT_CONFIG``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, replace
from pathlib import Path

from abelstat import codec, density, oracles
from abelstat.continuity import build_family, check_implication_lattice, probe, standard_family
from abelstat.convergence import METHODS, ConvergenceOptions, classify, normalize_method
from abelstat.density import LacunaryError, validate_lacunary
from abelstat.reporting import (
    PROBE_HEADER,
    SAMPLE_HEADER,
    VERDICT_HEADER,
    envelope,
    estimate_rows,
    probe_rows,
    to_csv,
    to_json,
    verdict_rows,
)

CONFIG_ENV = "ABELSTAT_CONFIG"
EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


class UsageError(ValueError):
    pass


def _parse_x_grid(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected jmin:jmax, got {text!r}") from None
    if not 1 <= lo < hi <= 40:
        raise argparse.ArgumentTypeError(f"need 1 <= jmin < jmax <= 40, got {text!r}")
    return lo, hi


def _parse_eps(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(p) for p in text.replace(" ", "").split(",") if p)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not values or min(values) <= 0:
        raise argparse.ArgumentTypeError(f"eps values must be positive, got {text!r}")
    return values


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return value


def _options_group(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("numerical options")
    g.add_argument("--eps-grid", type=_parse_eps, help="comma-separated eps values (default 0.1,0.01,0.001)")
    g.add_argument("--x-grid", type=_parse_x_grid, help="Abel grid x_j = 1 - 2^-j as jmin:jmax (default 4:20)")
    g.add_argument("--horizon", type=int, help="evaluation horizon, a power of two (default 2^20)")
    g.add_argument("--theta", help="lacunary boundaries as a JSON list (default k_r = 2^r)")
    g.add_argument("--delta", type=_positive, help="lacunary ratio margin (default 0.5)")
    g.add_argument("--tail-tol", type=_positive, help="Abel truncation tolerance (default 1e-9)")
    g.add_argument("--stab-tol", type=_positive, help="stabilisation tolerance (default per method)")
    g.add_argument("--format", choices=("json", "csv"), default="json")
    g.add_argument("--out", help="output path (default standard output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="abelstat", description="Densities, statistical convergence and continuity probes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="density of an index set")
    p.add_argument("--set", required=True)
    p.add_argument("--method", default="abel", choices=("abel", "natural", "lacunary"))
    _options_group(p)

    p = sub.add_parser("classify", help="classify a sequence under one convergence method")
    p.add_argument("--seq", required=True)
    p.add_argument("--method", default="abel_statistical")
    p.add_argument("--limit", type=float, help="pin the candidate limit")
    _options_group(p)

    p = sub.add_parser("probe", help="continuity flags of a function over a sequence family")
    p.add_argument("--function", required=True)
    p.add_argument("--family", default="standard")
    _options_group(p)

    p = sub.add_parser("compare", help="one column per method for a sequence or set")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--seq")
    src.add_argument("--set")
    p.add_argument("--methods", help="comma-separated methods (default all)")
    p.add_argument("--limit", type=float)
    _options_group(p)

    p = sub.add_parser("oracle", help="brute-force or closed-form reference value")
    p.add_argument("--kind", required=True, choices=("natural", "abel", "closed-form"))
    p.add_argument("--set")
    p.add_argument("--n", type=int)
    p.add_argument("--x", type=float)
    p.add_argument("--K", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--d", type=int)
    _options_group(p)

    p = sub.add_parser("validate", help="check a lacunary sequence")
    _options_group(p)
    return parser


def effective_options(args) -> ConvergenceOptions:
    base = {}
    path = os.environ.get(CONFIG_ENV)
    if path:
        base = json.loads(Path(path).read_text())
    fields = {f for f in asdict(ConvergenceOptions())}
    unknown = set(base) - fields
    if unknown:
        raise UsageError(f"{path}: unknown option(s) {sorted(unknown)}")
    overrides = {
        "eps_grid": args.eps_grid,
        "x_grid": args.x_grid,
        "horizon": args.horizon,
        "delta": args.delta,
        "tail_tol": args.tail_tol,
        "stab_tol": args.stab_tol,
    }
    if args.theta is not None:
        theta = codec.load_json_arg(args.theta)
        if not isinstance(theta, list) or not all(isinstance(k, int) for k in theta):
            raise UsageError(f"--theta: expected a JSON list of integers, got {args.theta!r}")
        overrides["theta"] = tuple(theta)
    base.update({k: v for k, v in overrides.items() if v is not None})
    return replace(ConvergenceOptions(), **base)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _density(args, opts):
    s = codec.decode_set(codec.load_json_arg(args.set), "--set")
    if args.method == "abel":
        est = density.abel_density(s, opts.x_grid, opts.tail_tol, opts.stab_tol or density.ABEL_STAB_TOL,
                                   opts.window, opts.richardson)
    elif args.method == "natural":
        est = density.natural_density(s, (opts.x_grid[0], opts.log_horizon),
                                      opts.stab_tol or density.NATURAL_STAB_TOL, opts.window)
    else:
        theta = opts.scheme()
        est = density.lacunary_density(s, theta, theta.r_max, opts.stab_tol or density.LACUNARY_STAB_TOL, opts.window)
    result = est.to_dict()
    result["set"] = codec.encode_set(s)
    code = EXIT_OK if est.converged else EXIT_INCONCLUSIVE
    return result, (SAMPLE_HEADER, estimate_rows(est)), code


def _classify(args, opts):
    seq = codec.decode_sequence(codec.load_json_arg(args.seq), "--seq")
    verdict = classify(seq, normalize_method(args.method), args.limit, opts)
    result = verdict.to_dict()
    result["seq"] = codec.encode_sequence(seq)
    code = EXIT_INCONCLUSIVE if verdict.classification == "inconclusive" else EXIT_OK
    return result, (VERDICT_HEADER, verdict_rows(verdict)), code


def _probe(args, opts):
    f = codec.decode_function(codec.load_json_arg(args.function), "--function")
    name, members = codec.decode_family(codec.load_json_arg(args.family), "--family")
    family = standard_family(opts) if members is None else build_family(name, members, opts)
    report = probe(f, family, opts)
    result = report.to_dict()
    result["implications"] = [asdict(c) for c in check_implication_lattice(f, family, opts, report)]
    code = EXIT_INCONCLUSIVE if "inconclusive" in report.flags.values() else EXIT_OK
    return result, (PROBE_HEADER, probe_rows(report)), code


def _compare(args, opts):
    if args.set is not None:
        s = codec.decode_set(codec.load_json_arg(args.set), "--set")
        methods = [m.strip() for m in (args.methods or "natural,lacunary,abel").split(",")]
        ests = {}
        for m in methods:
            if m == "abel":
                ests[m] = density.abel_density(s, opts.x_grid, opts.tail_tol, opts.stab_tol or density.ABEL_STAB_TOL)
            elif m == "natural":
                ests[m] = density.natural_density(s, (opts.x_grid[0], opts.log_horizon),
                                                  opts.stab_tol or density.NATURAL_STAB_TOL)
            elif m == "lacunary":
                theta = opts.scheme()
                ests[m] = density.lacunary_density(s, theta, theta.r_max, opts.stab_tol or density.LACUNARY_STAB_TOL)
            else:
                raise UsageError(f"--methods: unknown density method {m!r}")
        keys = ["value", "uncertainty", "verdict"]
        table = {k: {m: getattr(e, k) for m, e in ests.items()} for k in keys}
        code = EXIT_OK if all(e.converged for e in ests.values()) else EXIT_INCONCLUSIVE
    else:
        seq = codec.decode_sequence(codec.load_json_arg(args.seq), "--seq")
        methods = [normalize_method(m) for m in (args.methods or ",".join(METHODS)).split(",")]
        verdicts = {m: classify(seq, m, args.limit, opts) for m in methods}
        keys = ["classification", "candidate_limit"] + [f"eps={e!r}" for e in opts.eps_grid]
        table = {"classification": {m: v.classification for m, v in verdicts.items()},
                 "candidate_limit": {m: v.candidate_limit for m, v in verdicts.items()}}
        for i, e in enumerate(opts.eps_grid):
            row = {}
            for m, v in verdicts.items():
                ev = v.evidence[i] if i < len(v.evidence) else None
                if ev is None:
                    row[m] = None
                else:
                    row[m] = ev.tail_sup if ev.estimate is None else ev.estimate.value
            table[f"eps={e!r}"] = row
        code = EXIT_INCONCLUSIVE if any(v.classification == "inconclusive" for v in verdicts.values()) else EXIT_OK
    result = {"methods": methods, "rows": [{"key": k, **table[k]} for k in keys]}
    csv_rows = [[k] + [table[k][m] for m in methods] for k in keys]
    return result, (["key"] + methods, csv_rows), code


def _oracle(args, opts):
    if args.kind == "closed-form":
        if None in (args.a, args.d, args.x):
            raise UsageError("closed-form needs --a, --d and --x")
        res = oracles.closed_form_ap(args.a, args.d, args.x)
    else:
        if args.set is None:
            raise UsageError(f"{args.kind} oracle needs --set")
        s = codec.decode_set(codec.load_json_arg(args.set), "--set")
        if args.kind == "natural":
            if args.n is None:
                raise UsageError("natural oracle needs --n")
            res = oracles.brute_natural(s, args.n)
        else:
            if args.x is None or args.K is None:
                raise UsageError("abel oracle needs --x and --K")
            res = oracles.brute_abel(s, args.x, args.K)
    result = asdict(res)
    return result, (["method", "value"], [[res.method, res.value]]), EXIT_OK


def _validate(args, opts):
    if args.theta is None:
        raise UsageError("validate needs --theta")
    try:
        scheme = validate_lacunary(opts.theta, opts.delta)
    except LacunaryError as exc:
        result = {"valid": False, "k": list(opts.theta), "delta": opts.delta, "violations": exc.violations}
        return result, (["violation"], [[v] for v in exc.violations]), EXIT_ERROR
    result = {"valid": True, "k": list(scheme.k), "delta": scheme.delta, "violations": []}
    return result, (["violation"], []), EXIT_OK


HANDLERS = {
    "density": _density,
    "classify": _classify,
    "probe": _probe,
    "compare": _compare,
    "oracle": _oracle,
    "validate": _validate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        opts = effective_options(args)
        result, (header, rows), code = HANDLERS[args.command](args, opts)
    except (codec.SchemaError, UsageError, LacunaryError, ValueError, json.JSONDecodeError) as exc:
        print(f"abelstat {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.format == "csv":
        text = to_csv(header, rows)
    else:
        text = to_json(envelope(args.command, opts.to_dict(), result))
    _emit(text, args.out)
    return code


if __name__ == "__main__":
    sys.exit(main())
