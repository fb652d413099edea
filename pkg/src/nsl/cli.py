"""Command-line front end.

Subcommands: constants, verify, stability, lambda, simulate. Options may also
be set through environment variables with prefix ``NSL_`` (``NSL_RHO``,
``NSL_SEED``, ``NSL_FORMAT`` ...); flags take precedence.

Exit codes: 0 success or all checks verified, 1 a check failed, 2 usage or
parse error.
"""

import argparse
import csv
import io
import json
import logging
import math
import os
import sys

import numpy as np

log = logging.getLogger("nsl")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _env(name, default=None, cast=str):
    v = os.environ.get("NSL_" + name.upper())
    return default if v is None else cast(v)


def _parse_grid(text):
    try:
        axis, lo, hi, count = text.split(":")
        return axis, float(lo), float(hi), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be axis:min:max:count, got {text!r}")


def _resolve_seed(args):
    if args.seed is None:
        raise UsageError("Monte Carlo needs --seed (an integer, or 'auto')")
    if args.seed == "auto":
        seed = int(np.random.SeedSequence().entropy % 2 ** 63)
        log.warning("using seed %d", seed)
        return seed
    try:
        return int(args.seed)
    except ValueError:
        raise UsageError(f"seed must be an integer or 'auto', got {args.seed!r}")


# ---------------------------------------------------------------- output

def _emit(args, rows, columns=None):
    """Write a list of flat dicts as json, csv or an aligned table."""
    if isinstance(rows, dict):
        rows = [rows]
    columns = columns or list(dict.fromkeys(k for r in rows for k in r))
    if args.format == "json":
        text = json.dumps(rows if len(rows) != 1 else rows[0], indent=2, default=_json_default)
    elif args.format == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _cell(r.get(k)) for k in columns})
        text = buf.getvalue().rstrip("\n")
    else:
        cells = [[_cell(r.get(k)) for k in columns] for r in rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(columns)]
        lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths))]
        lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
        text = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cell(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else str(v)
    if isinstance(v, (dict, list)):
        return json.dumps(v, default=_json_default)
    return "" if v is None else str(v)


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


# ---------------------------------------------------------------- commands

def cmd_constants(args):
    from .hardness_constants import all_constants

    targets = {"alpha2": 0.87856720578, "alpha3": 0.83600811464, "beta3": 0.98937199597}
    rows = []
    for m in all_constants():
        d = m.as_dict()
        d["reference"] = targets[m.name]
        d["difference"] = m.value - targets[m.name]
        rows.append(d)
    _emit(args, rows, ["name", "value", "argmin", "at_endpoint", "monotone", "reference", "difference", "note"])
    return EXIT_OK


def cmd_verify(args):
    from . import certified_checks as cc

    name = args.check
    if name not in cc.CHECKS and name not in cc.GROUPS:
        raise UsageError(f"unknown check {name!r}; choose from {', '.join(list(cc.GROUPS) + list(cc.CHECKS))}")
    if name in cc.GROUPS:
        if args.grid or args.rho is not None:
            raise UsageError("--grid and --rho apply to a single check, not a group")
        reports = cc.run_group(name, jobs=args.jobs)
    else:
        over = {}
        if args.rho is not None:
            key = "a" if cc.CHECKS[name][0] in (cc.check_rk1comp, cc.check_neg_linear) else "rho"
            if "rho" not in cc.CHECKS[name][1] and key not in cc.CHECKS[name][1]:
                raise UsageError(f"check {name} takes no --rho")
            over[key] = args.rho
        if args.grid:
            _, lo, hi, count = args.grid
            try:
                over.update(cc.grid_overrides(name, lo, hi, count))
            except ValueError as e:
                raise UsageError(str(e))
        reports = [cc.run_check(name, **over)]
    if args.format == "table" and not args.out:
        for r in reports:
            status = "Verified" if r.passed else "FAILED"
            print(f"{status:8s}  {r.name:34s} min_margin={r.min_margin:.6g}  at {json.dumps(r.argmin)}"
                  f"  ({r.runtime:.2f} s)")
            for w in r.warnings:
                print(f"          warning: {w}")
    else:
        rows = [r.as_dict() for r in reports]
        if args.format == "csv":
            rows = [{k: v for k, v in d.items() if k in
                     ("name", "verdict", "min_margin", "argmin", "uncertainty", "excluded", "runtime")} for d in rows]
        _emit(args, rows)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _load_json(path, loader):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}")
    try:
        return loader(text)
    except json.JSONDecodeError as e:
        raise UsageError(f"{path}: line {e.lineno} column {e.colno}: {e.msg}")
    except (KeyError, ValueError, TypeError) as e:
        raise UsageError(f"{path}: {e}")


def _rule(args):
    from .discrete_social_choice import VotingRule

    if args.rule == "plurality":
        return VotingRule.plurality(args.k, args.n)
    if args.rule == "majority":
        return VotingRule.majority(args.n)
    if args.rule == "dictator":
        return VotingRule.dictator(args.k, args.n)
    return _load_json(args.rule, VotingRule.from_json)


def cmd_stability(args):
    from . import gaussian_stability as gs
    from .spherical_stability import SphericalKernelParams, arc_F, arc_F_uncertainty

    rho = args.rho if args.rho is not None else 0.0
    t = args.target
    if t == "cones":
        v = gs.cone_partition_stability(rho)
        _emit(args, {"target": "cones", "rho": rho, **v.as_dict()})
    elif t == "arcs":
        p = SphericalKernelParams(rho, args.r, args.s)
        axis, lo, hi, count = args.grid or ("theta", 0.0, 2 * math.pi, 101)
        th = np.linspace(lo, hi, count)
        F = arc_F(p, th, args.depth)
        unc = arc_F_uncertainty(p, args.depth)
        _emit(args, [{"theta": float(a), "F": float(b), "uncertainty": unc} for a, b in zip(th, F)])
    elif t == "profile":
        if not args.file:
            raise UsageError("stability profile needs --file PROFILE.json")
        prof = _load_json(args.file, gs.RadialPartitionProfile.from_json)
        if rho < 0:
            v = gs.bilinear_profile_stability(-rho, prof, prof.antipodal(), args.depth)
        else:
            v = gs.profile_stability(rho, prof, args.depth)
        _emit(args, {"target": "profile", "rho": rho, **v.as_dict()})
    elif t == "discrete":
        from .discrete_social_choice import NoiseKernel, noise_stability_exact

        rule = _rule(args)
        v = noise_stability_exact(rule, NoiseKernel(rule.k, rho))
        _emit(args, {"target": "discrete", "rule": rule.kind, "k": rule.k, "n": rule.n, "rho": rho, "value": v})
    return EXIT_OK


def cmd_lambda(args):
    from .spherical_stability import SphericalKernelParams, lambda_bounds, lambda_sequence

    p = SphericalKernelParams(args.rho if args.rho is not None else 0.1, args.r, args.s)
    seq = lambda_sequence(p, args.depth)
    rows = []
    for d, v in enumerate(seq.values):
        row = {"d": d, "lambda": float(v)}
        if p.rho > 0 and d >= 1:
            row["lower"], row["upper"] = lambda_bounds(p, d)
        rows.append(row)
    log.info("a = %.17g, tail bound %.3g", p.a, seq.tail_bound)
    _emit(args, rows, ["d", "lambda", "lower", "upper"])
    return EXIT_OK


def cmd_simulate(args):
    seed = _resolve_seed(args)
    rho = args.rho if args.rho is not None else 0.0
    if args.target == "profile":
        from . import gaussian_stability as gs

        if not args.file:
            raise UsageError("simulate profile needs --file PROFILE.json")
        prof = _load_json(args.file, gs.RadialPartitionProfile.from_json)
        if rho < 0:
            est, se = gs.profile_stability_mc(-rho, prof, prof.antipodal(), args.samples, seed)
        else:
            est, se = gs.profile_stability_mc(rho, prof, None, args.samples, seed)
        _emit(args, {"target": "profile", "rho": rho, "samples": args.samples, "seed": seed,
                     "estimate": est, "standard_error": se})
    elif args.target == "discrete":
        from .discrete_social_choice import NoiseKernel, noise_stability_mc

        rule = _rule(args)
        est, se = noise_stability_mc(rule, NoiseKernel(rule.k, rho), args.samples, seed)
        _emit(args, {"target": "discrete", "rule": rule.kind, "k": rule.k, "n": rule.n, "rho": rho,
                     "samples": args.samples, "seed": seed, "estimate": est, "standard_error": se})
    elif args.target == "convergence":
        from .discrete_social_choice import plurality_convergence_report

        ns = [int(x) for x in args.ns.split(",")]
        _emit(args, plurality_convergence_report(rho, ns, args.samples, seed))
    return EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rho", type=float, default=_env("rho", None, float))
    common.add_argument("--r", type=float, default=_env("r", 1.0, float))
    common.add_argument("--s", type=float, default=_env("s", 1.0, float))
    common.add_argument("--depth", type=int, default=_env("depth", 30, int), help="Fourier truncation D")
    common.add_argument("--grid", type=_parse_grid, default=_env("grid", None, _parse_grid),
                        help="axis:min:max:count")
    common.add_argument("--samples", type=int, default=_env("samples", 10 ** 6, int))
    common.add_argument("--seed", default=_env("seed", None), help="integer or 'auto'")
    common.add_argument("--jobs", type=int, default=_env("jobs", 1, int))
    common.add_argument("--format", choices=("json", "csv", "table"), default=_env("format", "table"))
    common.add_argument("--out", default=_env("out", None))
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="nsl", description="Noise stability computations and checks.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("constants", parents=[common], help="alpha2, alpha3, beta3")
    s.set_defaults(func=cmd_constants)

    s = sub.add_parser("verify", parents=[common], help="run a check or group of checks")
    s.add_argument("check", help="check name, or a group: replicas, constants, properties, all")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("stability", parents=[common], help="evaluate a stability")
    s.add_argument("target", choices=("cones", "arcs", "profile", "discrete"))
    s.add_argument("--file", help="profile JSON")
    s.add_argument("--rule", default="plurality", help="plurality, majority, dictator or a rule JSON file")
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--n", type=int, default=3)
    s.set_defaults(func=cmd_stability)

    s = sub.add_parser("lambda", parents=[common], help="eigenvalues of the circle kernel")
    s.set_defaults(func=cmd_lambda)

    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo estimates")
    s.add_argument("target", choices=("profile", "discrete", "convergence"))
    s.add_argument("--file", help="profile JSON")
    s.add_argument("--rule", default="plurality")
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--ns", default="1,3,5,7,101", help="comma-separated odd n for convergence")
    s.set_defaults(func=cmd_simulate)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"nsl: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"nsl: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
