"""Test functions on R^N minus the origin.

Functions come in two shapes.  A :class:`SeparableFunction` is ``R(r) G(sigma)``
known through its radial profile and the angular moment
``M_p = int_{S^{N-1}} |G|^p dsigma``; it works for every N.  A
:class:`TensorFunction` stores samples ``u(r_i, sigma_k)`` on a radial grid
times an angular quadrature (N <= 3).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre

from .errors import ComputationError, DomainError
from .radial import (
    RadialGrid,
    RadialProfile,
    _parse_floats,
    _read_rows,
    cell_slopes,
)
from .sphere import AngularQuadrature, angular_p_moment, sphere_geometry


@dataclass(frozen=True, eq=False)
class TensorFunction:
    """Samples ``u(r_i, sigma_k)``; rows are radii, columns angular nodes."""

    grid: RadialGrid
    quadrature: AngularQuadrature
    values: np.ndarray
    p_hint: float | None = None
    interpolation: str = "linear"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        expected = (len(self.grid), len(self.quadrature))
        if values.shape != expected:
            raise DomainError(f"tensor values have shape {values.shape}, expected {expected}")
        if not np.all(np.isfinite(values)):
            raise ComputationError("tensor function values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def dim(self):
        return self.quadrature.dim

    def scaled(self, factor):
        return TensorFunction(self.grid, self.quadrature, factor * self.values, self.p_hint, self.interpolation)

    def is_radial(self, rtol=1e-12):
        spread = np.ptp(self.values, axis=1)
        scale = np.max(np.abs(self.values), initial=0.0)
        return bool(np.all(spread <= rtol * max(scale, np.finfo(float).tiny)))

    def describe(self):
        return {"radial": self.grid.describe(), "angular": self.quadrature.describe()}


@dataclass(frozen=True, eq=False)
class SeparableFunction:
    """``u(r sigma) = R(r) G(sigma)`` through ``R`` and ``M_p = int |G|^p dsigma``.

    ``p`` is the exponent ``M_p`` belongs to; ``None`` means the moment is
    valid for every p (the radial case G = 1, ``M_p = omega_N``).
    """

    radial: RadialProfile
    angular_p_moment: float
    dim: int
    p: float | None = None
    angular_max: float | None = None

    def __post_init__(self):
        if not self.angular_p_moment > 0:
            raise DomainError("the angular p-moment must be positive")
        if self.angular_max is not None and self.p is not None:
            bound = sphere_geometry(self.dim).surface_area * self.angular_max**self.p
            if self.angular_p_moment > bound * (1 + 1e-12):
                raise DomainError(
                    f"angular p-moment {self.angular_p_moment:g} exceeds omega_N (max|G|)^p = {bound:g}"
                )

    def moment_for(self, p):
        if self.p is not None and self.p != p:
            raise DomainError(f"angular moment was supplied for p={self.p:g}, not p={p:g}")
        return self.angular_p_moment

    @property
    def grid(self):
        return self.radial.grid

    def scaled(self, factor):
        return SeparableFunction(self.radial.with_values(factor * self.radial.values),
                                 self.angular_p_moment, self.dim, self.p, self.angular_max)

    def is_radial(self):
        return np.isclose(self.angular_p_moment, sphere_geometry(self.dim).surface_area, rtol=1e-12)

    def to_tensor(self, quadrature, angular=None):
        """Sample on a product grid; ``angular`` holds G at the quadrature nodes (default 1)."""
        if quadrature.dim != self.dim:
            raise DomainError("quadrature dimension does not match the function")
        g = np.ones(len(quadrature)) if angular is None else np.asarray(angular, dtype=float)
        return TensorFunction(self.grid, quadrature, np.outer(self.radial.values, g))

    def describe(self):
        return {"radial": self.grid.describe(), "angular_p_moment": self.angular_p_moment}


RADIAL_KINDS = ("hardy_extremal", "tent", "smooth_bump")
KINDS = RADIAL_KINDS + ("angular_mix", "random_smooth")


@dataclass(frozen=True)
class FamilySpec:
    """Description of a parametric test function; see the module-level constructors."""

    kind: str
    N: int
    p: float
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown family kind {self.kind!r}; choose from {KINDS}")
        if int(self.N) != self.N or self.N < 1:
            raise DomainError(f"N must be an integer >= 1, got {self.N!r}")
        if not self.p >= 1:
            raise DomainError(f"p must be >= 1, got {self.p!r}")
        q = self.params
        if self.kind == "hardy_extremal":
            limit = (self.p - self.N) / self.p
            if not 0 < q["eps"] < limit:
                raise DomainError(f"hardy_extremal needs 0 < eps < (p-N)/p = {limit:g}, got {q['eps']!r}")
            if not q.get("cutoff_decades", 1.0) > 0:
                raise DomainError("cutoff_decades must be positive")
        elif self.kind == "tent":
            if not 0 < q["a"] < q["b"]:
                raise DomainError(f"tent needs 0 < a < b, got a={q['a']!r}, b={q['b']!r}")
        elif self.kind == "smooth_bump":
            if not 0 < q["width"] < q["center"]:
                raise DomainError("smooth_bump needs 0 < width < center")
        elif self.kind == "angular_mix":
            if self.N > 3:
                raise DomainError("angular_mix harmonics are defined for N <= 3")
            if q["radial"].kind not in RADIAL_KINDS:
                raise DomainError("angular_mix needs a radial family as its radial part")
            if int(q["harmonic"]) != q["harmonic"] or q["harmonic"] < 0:
                raise DomainError("harmonic index must be a nonnegative integer")

    @property
    def is_radial(self):
        return self.kind in RADIAL_KINDS or (
            self.kind == "random_smooth" and self.params.get("radial_only", False)
        )

    @property
    def label(self):
        if self.kind == "angular_mix":
            q = self.params
            return f"angular_mix({q['radial'].label},k={q['harmonic']},amp={q.get('amplitude', 0.5):g})"
        args = ",".join(f"{k}={v:g}" if isinstance(v, float) else f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({args})"

    def with_exponent(self, N, p):
        params = dict(self.params)
        if self.kind == "angular_mix":
            params["radial"] = params["radial"].with_exponent(N, p)
        return FamilySpec(self.kind, N, p, params)


def hardy_extremal(eps, N, p, cutoff_decades=1.0):
    return FamilySpec("hardy_extremal", N, p, {"eps": float(eps), "cutoff_decades": float(cutoff_decades)})


def tent(a, b, N, p):
    return FamilySpec("tent", N, p, {"a": float(a), "b": float(b)})


def smooth_bump(center, width, N, p):
    return FamilySpec("smooth_bump", N, p, {"center": float(center), "width": float(width)})


def angular_mix(radial, harmonic, amplitude=0.5):
    return FamilySpec("angular_mix", radial.N, radial.p,
                      {"radial": radial, "harmonic": int(harmonic), "amplitude": float(amplitude)})


def random_smooth(seed, N, p, radial_only=False):
    """Seeded sum of smooth bumps times low-order harmonics (nonnegative if radial_only)."""
    return FamilySpec("random_smooth", N, p, {"seed": int(seed), "radial_only": bool(radial_only)})


def smooth_step(x):
    """C-infinity transition: 0 for x <= 0, 1 for x >= 1."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        left = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        right = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return left / (left + right)


def bump(x):
    """``exp(1 - 1/(1 - x^2))`` on |x| < 1, zero elsewhere; peak 1 at x = 0."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1
    out = np.zeros_like(x)
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - x[inside] ** 2))
    return out


def harmonic(quadrature, k):
    """Low-order angular harmonic at the quadrature nodes.

    ``sigma^k`` on S^0, ``cos(k theta)`` on S^1, zonal ``P_k(cos theta)`` on S^2.
    """
    nodes = quadrature.nodes
    if quadrature.dim == 1:
        return nodes[:, 0] ** k
    if quadrature.dim == 2:
        return np.cos(k * np.arctan2(nodes[:, 1], nodes[:, 0]))
    coeffs = np.zeros(k + 1)
    coeffs[k] = 1.0
    return legendre.legval(nodes[:, 2], coeffs)


def _require_cover(grid, lo, hi, what):
    if grid.r_min > lo or grid.r_max < hi:
        raise DomainError(
            f"{what} needs a grid covering [{lo:g}, {hi:g}]; got [{grid.r_min:g}, {grid.r_max:g}]"
        )


def radial_values(spec, grid):
    """Samples of the radial part R(r) of a radial family on ``grid``."""
    r = grid.nodes
    q = spec.params
    if spec.kind == "tent":
        _require_cover(grid, q["a"], q["b"], "tent")
        mid, half = 0.5 * (q["a"] + q["b"]), 0.5 * (q["b"] - q["a"])
        return np.clip(1.0 - np.abs(r - mid) / half, 0.0, None)
    if spec.kind == "smooth_bump":
        lo, hi = q["center"] - q["width"], q["center"] + q["width"]
        _require_cover(grid, lo, hi, "smooth_bump")
        return bump((r - q["center"]) / q["width"])
    if spec.kind == "hardy_extremal":
        width = q.get("cutoff_decades", 1.0)
        span = np.log10(grid.r_max / grid.r_min)
        if span < 2 * width:
            raise DomainError(
                f"hardy_extremal with {width:g}-decade cutoffs needs r_max/r_min >= 10^{2 * width:g}; "
                f"got [{grid.r_min:g}, {grid.r_max:g}]"
            )
        a = (spec.p - spec.N) / spec.p
        eps = q["eps"]
        base = np.where(r <= 1.0, r ** (a + eps), r ** (a - eps))
        cut = smooth_step(np.log10(r / grid.r_min) / width) * smooth_step(np.log10(grid.r_max / r) / width)
        return base * cut
    raise DomainError(f"{spec.kind} is not a radial family")


def _random_terms(spec):
    rng = np.random.default_rng(spec.params["seed"])
    terms = []
    for _ in range(int(rng.integers(1, 4))):
        center = rng.uniform(1.0, 4.0)
        width = rng.uniform(0.3, 0.9)
        amp = rng.uniform(0.2, 1.0)
        coeffs = rng.uniform(-0.4, 0.4, size=2)
        terms.append((center, width, amp, coeffs))
    return terms


def family_breakpoints(spec):
    """Radii where the radial part of ``spec`` has a kink."""
    if spec.kind == "tent":
        a, b = spec.params["a"], spec.params["b"]
        return (a, 0.5 * (a + b), b)
    if spec.kind == "angular_mix":
        return family_breakpoints(spec.params["radial"])
    return ()


def make_family(spec, grid, quadrature=None):
    """Sample a family on ``grid`` (and ``quadrature`` for non-radial kinds).

    Radial kinds without a quadrature give a :class:`SeparableFunction` with
    ``M_p = omega_N``; everything else gives a :class:`TensorFunction`.
    """
    if quadrature is not None and quadrature.dim != spec.N:
        raise DomainError(f"quadrature is for N={quadrature.dim}, family for N={spec.N}")
    if spec.kind in RADIAL_KINDS:
        profile = RadialProfile(grid, radial_values(spec, grid))
        if quadrature is None:
            return SeparableFunction(profile, sphere_geometry(spec.N).surface_area, spec.N)
        return TensorFunction(grid, quadrature, np.outer(profile.values, np.ones(len(quadrature))), spec.p)
    if quadrature is None:
        raise DomainError(f"{spec.kind} needs an angular quadrature")
    if spec.kind == "angular_mix":
        q = spec.params
        R = radial_values(q["radial"], grid)
        G = 1.0 + q.get("amplitude", 0.5) * harmonic(quadrature, q["harmonic"])
        return TensorFunction(grid, quadrature, np.outer(R, G), spec.p)
    terms = _random_terms(spec)
    _require_cover(grid, 0.2, 5.0, "random_smooth")
    values = np.zeros((len(grid), len(quadrature)))
    for center, width, amp, coeffs in terms:
        R = amp * bump((grid.nodes - center) / width)
        G = np.ones(len(quadrature))
        if not spec.params["radial_only"]:
            for k, c in enumerate(coeffs, start=1):
                G = G + c * harmonic(quadrature, k)
        values += np.outer(R, G)
    return TensorFunction(grid, quadrature, values, spec.p)


def indicator_profile(grid, upper, lower=0.0):
    """Piecewise-constant indicator of ``(lower, upper]`` on ``grid`` refined by the endpoints."""
    if not 0 <= lower < upper:
        raise DomainError("indicator needs 0 <= lower < upper")
    extra = [upper] + ([lower] if lower > 0 else [])
    nodes = np.union1d(grid.nodes, extra)
    values = ((nodes > lower) & (nodes <= upper)).astype(float)
    if lower > 0:
        # cells are (r_{i-1}, r_i]; the cell ending at `lower` lies outside
        values[nodes <= lower] = 0.0
    return RadialProfile(RadialGrid(nodes, kind="custom"), values, "constant")


def radialise(u, p):
    """Angular L^p mean ``(omega_N^{-1} int |u(r sigma)|^p dsigma)^{1/p}`` per radius."""
    if not p > 1:
        raise DomainError(f"radialisation needs p > 1, got {p!r}")
    area = sphere_geometry(u.dim).surface_area
    if isinstance(u, SeparableFunction):
        values = np.abs(u.radial.values) * (u.moment_for(p) / area) ** (1.0 / p)
        return RadialProfile(u.grid, values)
    moments = angular_p_moment(u.values, u.quadrature, p)
    return RadialProfile(u.grid, (moments / area) ** (1.0 / p))


def radial_directional_derivative(u, method="central"):
    """``x/|x| . grad u`` as the derivative in r along every ray.

    ``method`` is as in :func:`hardylab.radial.radial_derivative`; ``"cell"``
    gives the exact slopes of the piecewise-linear interpolant in r.
    """
    if len(u.grid) < 3:
        raise DomainError("a radial derivative needs at least 3 nodes")
    if u.interpolation != "linear":
        raise DomainError("only piecewise-linear tensor functions can be differentiated")
    if method == "central":
        d = np.gradient(u.values, u.grid.nodes, axis=0, edge_order=1)
        return TensorFunction(u.grid, u.quadrature, d, u.p_hint, "linear")
    if method == "cell":
        return TensorFunction(u.grid, u.quadrature, cell_slopes(u.grid.nodes, u.values), u.p_hint, "constant")
    raise DomainError(f"unknown derivative method {method!r}")


def read_tensor_csv(source, quadrature):
    """Read ``r,node_index,value`` rows, row-major in (r, node_index)."""
    rows = _read_rows(source, ("r", "node_index", "value"))
    K = len(quadrature)
    if not rows or len(rows) % K:
        raise DomainError(f"tensor CSV needs a multiple of {K} rows (angular nodes); got {len(rows)}")
    data = np.array([_parse_floats(row, lineno) for lineno, row in rows])
    for j, (lineno, _) in enumerate(rows):
        if data[j, 1] != j % K:
            raise DomainError(f"line {lineno}: expected node_index {j % K}, got {rows[j][1][1]}")
        if j % K and data[j, 0] != data[j - 1, 0]:
            raise DomainError(f"line {lineno}: r changes inside an angular block")
    r = data[::K, 0]
    bad = np.flatnonzero(np.diff(r) <= 0)
    if bad.size:
        raise DomainError(f"line {rows[(bad[0] + 1) * K][0]}: r must be strictly increasing")
    return TensorFunction(RadialGrid(r), quadrature, data[:, 2].reshape(-1, K))


def write_tensor_csv(u, target):
    lines = ["r,node_index,value"]
    K = len(u.quadrature)
    for r, row in zip(u.grid.nodes.tolist(), u.values.tolist()):
        lines += [f"{r!r},{k},{row[k]!r}" for k in range(K)]
    text = "\n".join(lines) + "\n"
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
