"""Command-line front end: ``hardylab verify | sweep | rearrange``.

Exit status is 0 when every verdict passes (unbounded branches count as
documented, not as failures), 1 when any inequality fails and 2 for usage or
ingestion errors.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

import numpy as np

from . import __version__
from .errors import HardyLabError
from .functions import (
    SeparableFunction,
    angular_mix,
    hardy_extremal,
    random_smooth,
    read_tensor_csv,
    smooth_bump,
    tent,
)
from .radial import (
    build_log_grid,
    decreasing_rearrangement,
    read_profile_csv,
    weighted_integral,
    write_profile_csv,
)
from .sphere import build_angular_quadrature, sphere_geometry
from .verify import (
    DEFAULT_ANGULAR,
    DEFAULT_GRID,
    TENSOR_FUNCTIONALS,
    THEOREMS,
    TolerancePolicy,
    build_function,
    check,
    default_battery,
    evaluate_functional,
    run_battery,
    sharpness_sweep,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
SUPERCRITICAL = ("classical", "weighted1d", "improved-radial", "improved", "uncertainty-radial", "uncertainty")
FAMILIES = ("tent", "smooth_bump", "hardy_extremal", "angular_mix", "random_smooth")


class UsageError(Exception):
    pass


def _add_grid_args(parser):
    parser.add_argument("--r-min", type=float, default=DEFAULT_GRID[0])
    parser.add_argument("--r-max", type=float, default=DEFAULT_GRID[1])
    parser.add_argument("--n", type=int, default=DEFAULT_GRID[2], help="radial nodes")


def _add_tolerance_args(parser):
    parser.add_argument("--tau-rel", type=float, default=1e-3)
    parser.add_argument("--tau-abs", type=float, default=1e-12)


def build_parser():
    parser = argparse.ArgumentParser(prog="hardylab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"hardylab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="evaluate one inequality or the full battery")
    v.add_argument("--config", help="key = value file mirroring the long flags")
    v.add_argument("--theorem", choices=THEOREMS)
    v.add_argument("--battery", action="store_true", help="run the default battery")
    v.add_argument("--N", type=int, default=1)
    v.add_argument("--p", type=float, default=2.0)
    v.add_argument("--family", choices=FAMILIES)
    v.add_argument("--input", help="CSV with r,value (radial) or r,node_index,value (tensor) rows")
    v.add_argument("--a", type=float, default=1.0, help="tent support start")
    v.add_argument("--b", type=float, default=3.0, help="tent support end")
    v.add_argument("--center", type=float, default=2.0)
    v.add_argument("--width", type=float, default=1.0)
    v.add_argument("--eps", type=float, help="hardy_extremal exponent offset")
    v.add_argument("--cutoff-decades", type=float, default=1.0)
    v.add_argument("--radial-family", choices=("tent", "smooth_bump", "hardy_extremal"), default="tent",
                   help="radial part of angular_mix")
    v.add_argument("--harmonic", type=int, default=1)
    v.add_argument("--amplitude", type=float, default=0.5)
    v.add_argument("--seed", type=int, help="required for random_smooth")
    v.add_argument("--radial-only", action="store_true", help="random_smooth without angular terms")
    v.add_argument("--branch", choices=("suffix", "prefix", "both"), default="both",
                   help="uncertainty branch")
    v.add_argument("--angular-resolution", type=int)
    _add_grid_args(v)
    _add_tolerance_args(v)
    v.add_argument("--refine", action="store_true", help="also require stable margins at doubled resolution")
    v.add_argument("--output", help="JSON report path (default: stdout)")

    s = sub.add_parser("sweep", help="improved-Hardy quotients along the near-extremal family")
    s.add_argument("--config")
    s.add_argument("--N", type=int, default=1)
    s.add_argument("--p", type=float, default=2.0)
    s.add_argument("--eps", required=True, help="comma-separated list, e.g. 0.2,0.1,0.05")
    s.add_argument("--cutoff-decades", type=float, default=1.0)
    _add_grid_args(s)
    _add_tolerance_args(s)
    s.add_argument("--output", help="CSV path (default: stdout)")

    r = sub.add_parser("rearrange", help="decreasing rearrangement of a sampled profile")
    r.add_argument("--config")
    r.add_argument("--input", required=True, help="CSV with r,value rows")
    r.add_argument("--interpolation", choices=("linear", "constant"), default="linear")
    r.add_argument("--method", choices=("resample", "exact"), default="resample")
    r.add_argument("--m", type=int, default=2**17, help="resampling cells")
    r.add_argument("--p", type=float, default=2.0, help="norm reported on stdout")
    r.add_argument("--output", help="CSV path for s,value rows (default: stdout)")
    return parser


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment, keys use flag names."""
    args = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise UsageError(f"{path}:{lineno}: expected key = value, got {raw.strip()!r}")
            key, value = key.strip().replace("_", "-"), value.strip()
            if not key:
                raise UsageError(f"{path}:{lineno}: empty key")
            if value.lower() in ("true", "yes", "on"):
                args.append(f"--{key}")
            elif value.lower() in ("false", "no", "off"):
                continue
            else:
                args += [f"--{key}", value]
    return args


def _expand_config(argv):
    """Splice config-file flags in front of the explicit ones so the command line wins."""
    if not argv:
        return argv
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv[1:])
    if known.config is None:
        return argv
    try:
        extra = read_config(known.config)
    except OSError as exc:
        raise UsageError(f"cannot read config {known.config}: {exc.strerror}") from None
    return [argv[0]] + extra + argv[1:]


def _family_from_args(args):
    N, p = args.N, args.p
    if args.family == "tent":
        return tent(args.a, args.b, N, p)
    if args.family == "smooth_bump":
        return smooth_bump(args.center, args.width, N, p)
    if args.family == "hardy_extremal":
        if args.eps is None:
            raise UsageError("--eps is required for hardy_extremal")
        return hardy_extremal(args.eps, N, p, args.cutoff_decades)
    if args.family == "angular_mix":
        radial = {"tent": lambda: tent(args.a, args.b, N, p),
                  "smooth_bump": lambda: smooth_bump(args.center, args.width, N, p),
                  "hardy_extremal": lambda: hardy_extremal(args.eps, N, p, args.cutoff_decades)}
        if args.radial_family == "hardy_extremal" and args.eps is None:
            raise UsageError("--eps is required for hardy_extremal")
        return angular_mix(radial[args.radial_family](), args.harmonic, args.amplitude)
    if args.seed is None:
        raise UsageError("--seed is required for random_smooth")
    return random_smooth(args.seed, N, p, args.radial_only)


def _read_input(path, N, angular_resolution):
    with open(path, encoding="utf-8", newline="") as fh:
        header = fh.readline().strip().lower().replace(" ", "")
    if header == "r,node_index,value":
        if N not in DEFAULT_ANGULAR:
            raise UsageError("tensor CSV input needs N in {1, 2, 3}")
        res = DEFAULT_ANGULAR[N] if angular_resolution is None else angular_resolution
        return read_tensor_csv(path, build_angular_quadrature(N, res))
    profile = read_profile_csv(path)
    return SeparableFunction(profile, sphere_geometry(N).surface_area, N)


def _theorem_functionals(theorem, branch):
    if theorem in ("uncertainty", "uncertainty-radial"):
        branches = ("suffix", "prefix") if branch == "both" else (branch,)
        return [f"{theorem}:{b}" for b in branches]
    return [theorem]


def _write_text(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _summary(reports):
    counts = {"pass": 0, "fail": 0, "unbounded-branch": 0}
    for rep in reports:
        counts[rep.verdict] += 1
    return counts


def cmd_verify(args):
    policy = TolerancePolicy(args.tau_rel, args.tau_abs, args.refine)
    if args.battery:
        if args.theorem or args.family or args.input:
            raise UsageError("--battery excludes --theorem, --family and --input")
        reports = run_battery(default_battery(), policy)
        keyed = list(reports.items())
    else:
        if args.theorem is None:
            raise UsageError("--theorem is required unless --battery is given")
        if args.family and args.input:
            raise UsageError("--input excludes --family")
        if args.theorem in SUPERCRITICAL and not args.p > args.N:
            raise UsageError(f"p must exceed N (got N={args.N}, p={args.p:g})")
        grid = build_log_grid(args.r_min, args.r_max, args.n)
        if args.input:
            u = _read_input(args.input, args.N, args.angular_resolution)
            provenance, source = args.input, None
        else:
            source = _family_from_args(args) if args.family else tent(args.a, args.b, args.N, args.p)
            provenance = source.label
        if args.input and args.refine:
            raise UsageError("--refine needs a family; ingested data cannot be resampled")
        keyed = []
        for name in _theorem_functionals(args.theorem, args.branch):
            def build(g, name=name):
                if source is None:
                    return u
                return build_function(source, g, args.angular_resolution, name in TENSOR_FUNCTIONALS)

            def refine(name=name):
                return evaluate_functional(name, build(grid.with_resolution(2 * len(grid))), args.N, args.p)

            pair = evaluate_functional(name, build(grid), args.N, args.p)
            key = f"{name}/{provenance}/N={args.N}/p={args.p:g}"
            keyed.append((key, check(pair, policy, refine, provenance)))
    document = {
        "policy": {"tau_rel": policy.tau_rel, "tau_abs": policy.tau_abs,
                   "refinement_check": policy.refinement_check},
        "reports": {key: rep.to_dict() for key, rep in keyed},
        "summary": _summary(rep for _, rep in keyed),
    }
    _write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", args.output)
    return EXIT_FAIL if document["summary"]["fail"] else EXIT_OK


def cmd_sweep(args):
    try:
        eps = [float(e) for e in args.eps.split(",") if e.strip()]
    except ValueError:
        raise UsageError(f"--eps must be a comma-separated list of numbers, got {args.eps!r}") from None
    if not eps:
        raise UsageError("--eps list is empty")
    policy = TolerancePolicy(args.tau_rel, args.tau_abs)
    sweep = sharpness_sweep(args.N, args.p, eps, (args.r_min, args.r_max, args.n), args.cutoff_decades)
    lines = ["eps,quotient,constant,margin"]
    for e, q, m in zip(sweep.eps, sweep.quotients, sweep.margins()):
        lines.append(f"{e!r},{float(q)!r},{sweep.constant!r},{float(m)!r}")
    _write_text("\n".join(lines) + "\n", args.output)
    return EXIT_OK if sweep.within(policy) else EXIT_FAIL


def cmd_rearrange(args):
    profile = read_profile_csv(args.input, args.interpolation)
    fstar = decreasing_rearrangement(profile, m=args.m, method=args.method)
    buffer = io.StringIO()
    write_profile_csv(fstar, buffer, header=("s", "value"))
    _write_text(buffer.getvalue(), args.output)
    norm_in = weighted_integral(profile.with_values(np.abs(profile.values) ** args.p), 0) ** (1 / args.p)
    norm_out = weighted_integral(fstar.with_values(fstar.values ** args.p), 0) ** (1 / args.p)
    rel = abs(norm_out - norm_in) / norm_in if norm_in > 0 else 0.0
    stream = sys.stderr if args.output is None else sys.stdout
    print(f"p={args.p:g} norm_in={float(norm_in)!r} norm_out={float(norm_out)!r} rel_diff={rel:.3e}", file=stream)
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "sweep": cmd_sweep, "rearrange": cmd_rearrange}


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_expand_config(argv))
        return COMMANDS[args.command](args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except (UsageError, HardyLabError, OSError) as exc:
        print(f"hardylab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

