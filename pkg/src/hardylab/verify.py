"""Toleranced verdicts, the test battery, sharpness sweeps and the golden store."""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

from .errors import ComputationError, DomainError
from .functionals import (
    WeightPair,
    classical_hardy_pair,
    hardy_constant,
    improved_hardy_pair,
    improved_hardy_radial_pair,
    kernel_hardy_pair,
    radialisation_contraction_pair,
    sup_exchange_pair,
    uncertainty_pair,
    weighted_1d_hardy_pair,
)
from .functions import (
    FamilySpec,
    angular_mix,
    family_breakpoints,
    hardy_extremal,
    make_family,
    radialise,
    random_smooth,
    smooth_bump,
    tent,
)
from .radial import build_log_grid, decreasing_rearrangement, insert_breakpoints, radial_derivative
from .sphere import build_angular_quadrature

DEFAULT_GRID = (1e-4, 1e4, 4096)
DEFAULT_ANGULAR = {1: 1, 2: 64, 3: 16}

RADIAL_ONLY = ("improved-radial", "uncertainty-radial:suffix", "uncertainty-radial:prefix")
TENSOR_FUNCTIONALS = ("improved", "radialise-contraction", "sup-exchange",
                      "uncertainty:suffix", "uncertainty:prefix")
FUNCTIONALS = ("classical", "kernel", "weighted1d") + RADIAL_ONLY + TENSOR_FUNCTIONALS
THEOREMS = ("classical", "kernel", "weighted1d", "improved-radial", "improved",
            "radialise-contraction", "sup-exchange", "uncertainty-radial", "uncertainty")


@dataclass(frozen=True)
class TolerancePolicy:
    tau_rel: float = 1e-3
    tau_abs: float = 1e-12
    refinement_check: bool = False

    def __post_init__(self):
        if not (self.tau_rel >= 0 and self.tau_abs >= 0):
            raise DomainError("tolerances must be nonnegative")

    def accepts(self, lhs, rhs):
        return lhs <= rhs * (1 + self.tau_rel) + self.tau_abs

    def margin(self, lhs, rhs):
        return (rhs - lhs) / max(rhs, self.tau_abs)


@dataclass(frozen=True)
class InequalityReport:
    pair: object
    verdict: str
    margin: float | None
    discretization: dict
    provenance: str = ""
    refined_margin: float | None = None

    @property
    def passed(self):
        return self.verdict != "fail"

    def to_dict(self):
        return {
            "label": self.pair.label,
            "verdict": self.verdict,
            "lhs": _json_float(self.pair.lhs),
            "rhs": _json_float(self.pair.rhs),
            "constant": float(self.pair.constant),
            "margin": _json_float(self.margin),
            "refined_margin": _json_float(self.refined_margin),
            "details": {k: _json_float(v) for k, v in sorted(self.pair.details.items())},
            "discretization": self.discretization,
            "provenance": self.provenance,
        }


def _json_float(x):
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def check(pair, policy=TolerancePolicy(), refine=None, provenance=""):
    """Toleranced verdict on ``pair.lhs <= pair.rhs``.

    With ``policy.refinement_check`` set, ``refine()`` must return the same
    pair at doubled radial resolution; a pass then also requires the margin
    not to drop by more than ``tau_rel``.
    """
    if math.isnan(pair.lhs) or math.isnan(pair.rhs):
        raise ComputationError(f"{pair.label}: NaN in inequality sides")
    if pair.unbounded:
        return InequalityReport(pair, "unbounded-branch", None, pair.discretization, provenance)
    if not (math.isfinite(pair.lhs) and math.isfinite(pair.rhs)):
        raise ComputationError(f"{pair.label}: infinite side in a branch not flagged unbounded")
    verdict = "pass" if policy.accepts(pair.lhs, pair.rhs) else "fail"
    margin = policy.margin(pair.lhs, pair.rhs)
    refined_margin = None
    if policy.refinement_check:
        if refine is None:
            raise DomainError("refinement_check needs a way to re-evaluate at doubled resolution")
        finer = refine()
        refined_margin = policy.margin(finer.lhs, finer.rhs)
        if verdict == "pass" and (refined_margin < margin - policy.tau_rel
                                  or not policy.accepts(finer.lhs, finer.rhs)):
            verdict = "fail"
    return InequalityReport(pair, verdict, margin, pair.discretization, provenance, refined_margin)


# ---------------------------------------------------------------------------
# evaluating a named functional on a function


def _corollary_inputs(u, p):
    """``f = d u~/dr`` and the corollary weights ``g = r^{N-1}``, ``h = r``."""
    ut = radialise(u, p)
    f = radial_derivative(ut, method="cell")
    r = ut.nodes
    weights = WeightPair(ut.with_values(r ** (u.dim - 1)), ut.with_values(r.copy()))
    return f, weights


def evaluate_functional(name, u, N, p):
    """Inequality pair for functional ``name`` (a battery functional id) on ``u``."""
    if name == "classical":
        return classical_hardy_pair(u, N, p)
    if name == "improved-radial":
        return improved_hardy_radial_pair(u, N, p).as_pair()
    if name == "improved":
        return improved_hardy_pair(u, N, p).as_pair()
    if name == "kernel":
        f, weights = _corollary_inputs(u, p)
        return kernel_hardy_pair(f, weights, p)
    if name == "weighted1d":
        f, _ = _corollary_inputs(u, p)
        return weighted_1d_hardy_pair(decreasing_rearrangement(f, method="exact"), N, p)
    if name == "radialise-contraction":
        return radialisation_contraction_pair(u, p)
    if name == "sup-exchange":
        return sup_exchange_pair(u, p)
    base, _, branch = name.partition(":")
    if base in ("uncertainty", "uncertainty-radial"):
        variant = "radial" if base == "uncertainty-radial" else "nonradial"
        return uncertainty_pair(u, N, p, variant, branch or "suffix")
    raise DomainError(f"unknown functional {name!r}; choose from {FUNCTIONALS}")


def build_function(spec, grid, angular_resolution=None, tensor=True):
    """Sample ``spec`` on ``grid`` refined by the family's kinks.

    Radial kinds stay separable unless ``tensor`` is set and N <= 3.
    """
    grid = insert_breakpoints(grid, family_breakpoints(spec))
    radial_kind = spec.kind in ("tent", "smooth_bump", "hardy_extremal")
    if radial_kind and not tensor:
        return make_family(spec, grid)
    if spec.N > 3:
        if radial_kind:
            return make_family(spec, grid)
        raise DomainError(f"{spec.kind} needs N <= 3")
    resolution = DEFAULT_ANGULAR[spec.N] if angular_resolution is None else angular_resolution
    return make_family(spec, grid, build_angular_quadrature(spec.N, resolution))


@dataclass(frozen=True)
class Job:
    """One (function, functional) evaluation of the battery."""

    functional: str
    family: FamilySpec
    grid: tuple = DEFAULT_GRID
    angular_resolution: int | None = None

    @property
    def key(self):
        f = self.family
        return f"{self.functional}/{f.label}/N={f.N}/p={f.p:g}"

    def evaluate(self, n=None):
        r_min, r_max, n0 = self.grid
        grid = build_log_grid(r_min, r_max, n0 if n is None else n)
        u = build_function(self.family, grid, self.angular_resolution,
                           tensor=self.functional in TENSOR_FUNCTIONALS)
        return evaluate_functional(self.functional, u, self.family.N, self.family.p)

    def run(self, policy=TolerancePolicy()):
        refine = lambda: self.evaluate(2 * self.grid[2])  # noqa: E731
        return check(self.evaluate(), policy, refine, provenance=self.family.label)


def battery_families(N, p):
    families = [
        tent(1, 3, N, p),
        smooth_bump(2, 1, N, p),
        hardy_extremal((p - N) / (4 * p), N, p),
    ]
    if N <= 3:
        families += [angular_mix(tent(1, 3, N, p), 1), random_smooth(0, N, p)]
    return families


def default_battery(dims=(1, 2, 3)):
    """All families x all applicable functionals x N x p in {N+1/2, N+1, 2N+1}."""
    jobs = []
    for N in dims:
        for p in (N + 0.5, N + 1.0, 2 * N + 1.0):
            for fam in battery_families(N, p):
                for name in FUNCTIONALS:
                    if name in RADIAL_ONLY and not fam.is_radial:
                        continue
                    jobs.append(Job(name, fam))
    return jobs


def worker_count():
    env = os.environ.get("HARDYLAB_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise DomainError(f"HARDYLAB_THREADS must be an integer, got {env!r}") from None
        if n < 1:
            raise DomainError("HARDYLAB_THREADS must be >= 1")
        return n
    return min(8, os.cpu_count() or 1)


def run_battery(jobs=None, policy=TolerancePolicy(), threads=None):
    """Run jobs in parallel; the result maps job key to report, sorted by key."""
    jobs = default_battery() if jobs is None else list(jobs)
    keys = [job.key for job in jobs]
    if len(set(keys)) != len(keys):
        raise DomainError("battery job keys must be unique")
    threads = worker_count() if threads is None else threads
    with ThreadPoolExecutor(max_workers=threads) as pool:
        reports = list(pool.map(lambda job: job.run(policy), jobs))
    return dict(sorted(zip(keys, reports)))


# ---------------------------------------------------------------------------
# sharpness and convergence


@dataclass(frozen=True)
class SharpnessSweep:
    N: int
    p: float
    eps: tuple
    quotients: tuple
    constant: float
    grid: dict
    cutoff_decades: float = 1.0

    @property
    def sup_quotient(self):
        return max(self.quotients)

    def margins(self):
        return tuple((self.constant - q) / self.constant for q in self.quotients)

    def within(self, policy=TolerancePolicy()):
        return all(q <= self.constant * (1 + policy.tau_rel) for q in self.quotients)


def sharpness_sweep(N, p, eps_list, grid=DEFAULT_GRID, cutoff_decades=1.0):
    """Improved-Hardy quotients along the near-extremal family."""
    if not p > N:
        raise DomainError(f"p must exceed N (got N={N!r}, p={p!r})")
    eps_list = tuple(float(e) for e in eps_list)
    if not eps_list:
        raise DomainError("the eps list is empty")
    limit = (p - N) / p
    for e in eps_list:
        if not 0 < e < limit:
            raise DomainError(f"eps must lie in (0, {limit:g}), got {e!r}")
    g = build_log_grid(*grid)
    quotients = []
    for e in eps_list:
        u = make_family(hardy_extremal(e, N, p, cutoff_decades), g)
        quotients.append(float(improved_hardy_radial_pair(u, N, p).quotient))
    quotients = tuple(quotients)
    return SharpnessSweep(N, p, eps_list, quotients, hardy_constant(N, p), g.describe(), cutoff_decades)


def convergence_study(functional, source, levels, grid=DEFAULT_GRID, angular_resolution=None, N=None, p=None):
    """Evaluate at radial (and angular) resolutions doubling per level.

    ``source`` is a :class:`FamilySpec` or a callable ``(grid, quadrature) -> u``
    (``quadrature`` is ``None`` when ``angular_resolution`` is ``None``); for a
    callable, N and p must be given.
    """
    if int(levels) != levels or levels < 2:
        raise DomainError(f"need at least 2 levels, got {levels!r}")
    if isinstance(source, FamilySpec):
        N, p = source.N, source.p
    elif N is None or p is None:
        raise DomainError("N and p are required when source is a callable")
    r_min, r_max, n = grid
    rows = []
    previous = None
    for level in range(int(levels)):
        g = build_log_grid(r_min, r_max, n * 2**level)
        res = None if angular_resolution is None else angular_resolution * 2**level
        if isinstance(source, FamilySpec):
            u = build_function(source, g, res, tensor=res is not None)
        else:
            u = source(g, None if res is None else build_angular_quadrature(N, res))
        pair = evaluate_functional(functional, u, N, p)
        lhs, rhs = float(pair.lhs), float(pair.rhs)
        margin = (rhs - lhs) / rhs if rhs > 0 else 0.0
        rows.append({
            "resolution": len(g),
            "angular_resolution": res,
            "lhs": lhs,
            "rhs": rhs,
            "margin": margin,
            "d_lhs": None if previous is None else lhs - previous["lhs"],
            "d_rhs": None if previous is None else rhs - previous["rhs"],
        })
        previous = rows[-1]
    return rows


# ---------------------------------------------------------------------------
# golden store

GOLDEN_FORMAT = "hardylab-golden"
GOLDEN_VERSION = 1


@dataclass(frozen=True)
class GoldenEntry:
    lhs: float
    rhs: float
    tolerance: float
    grid: tuple | None = None
    note: str = ""

    def __post_init__(self):
        if self.grid is not None:
            object.__setattr__(self, "grid", tuple(self.grid))

    def matches(self, lhs, rhs):
        return (math.isclose(lhs, self.lhs, rel_tol=self.tolerance, abs_tol=1e-300)
                and math.isclose(rhs, self.rhs, rel_tol=self.tolerance, abs_tol=1e-300))


def load_golden(path=None):
    """Read the golden store.

    The file is JSON ``{"format": "hardylab-golden", "version": 1, "entries":
    {key: {"lhs", "rhs", "tolerance", "grid", "note"}}}``; ``tolerance`` is
    relative and applies to both sides, ``grid`` is ``[r_min, r_max, n]`` of
    the evaluation that must reproduce the entry.
    """
    if path is None:
        text = resources.files("hardylab").joinpath("data/golden.json").read_text(encoding="utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    data = json.loads(text)
    if data.get("format") != GOLDEN_FORMAT:
        raise DomainError(f"not a golden store: format {data.get('format')!r}")
    if data.get("version") != GOLDEN_VERSION:
        raise DomainError(f"unsupported golden store version {data.get('version')!r}")
    return {k: GoldenEntry(**v) for k, v in data["entries"].items()}


def save_golden(entries, path):
    data = {
        "format": GOLDEN_FORMAT,
        "version": GOLDEN_VERSION,
        "entries": {k: _entry_dict(v) for k, v in sorted(entries.items())},
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _entry_dict(entry):
    if not isinstance(entry, GoldenEntry):
        entry = GoldenEntry(**entry)
    out = dict(vars(entry))
    out["grid"] = None if entry.grid is None else list(entry.grid)
    return out


def compare_golden(key, pair, store):
    """True when ``pair`` reproduces the stored entry within its tolerance."""
    if key not in store:
        raise DomainError(f"no golden entry for {key!r}")
    return store[key].matches(float(pair.lhs), float(pair.rhs))
