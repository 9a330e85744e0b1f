"""Both sides of the Hardy-type inequalities, evaluated on sampled functions.

Every evaluator returns nonnegative ``(lhs, rhs)`` values computed with polar
coordinates ``int_{R^N} F dx = int_0^inf int_{S^{N-1}} F r^{N-1} dsigma dr``:

* node integrands (``|u|^p`` and its running suprema) use the trapezoid rule
  of the grid;
* gradient terms use the exact radial slopes of the piecewise-linear
  interpolant, integrated cell by cell against ``r^{N-1}``;
* a running supremum is constant outside the grid, so its contribution on
  ``(0, r_min)`` or ``(r_max, inf)`` is added in closed form.

Gradients are always the radial directional derivative ``x/|x| . grad u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ComputationError, DomainError, PreconditionError
from .functions import SeparableFunction, TensorFunction, radialise
from .radial import (
    RadialProfile,
    cell_moments,
    cell_slopes,
    cumulative_integral,
    decreasing_rearrangement,
    prefix_suffix_sup,
    weighted_integral,
)
from .sphere import angular_p_moment, sphere_geometry

MONOTONE_RTOL = 1e-12


@dataclass(frozen=True)
class InequalityPair:
    """Values of the two sides of ``lhs <= rhs``; ``constant`` is already folded into rhs."""

    lhs: float
    rhs: float
    constant: float
    label: str
    discretization: dict = field(default_factory=dict)
    unbounded: bool = False
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lhs < 0 or self.rhs < 0:
            raise ComputationError(f"{self.label}: negative side lhs={float(self.lhs)!r}, rhs={float(self.rhs)!r}")


@dataclass(frozen=True)
class ImprovedHardyResult:
    """Improved left side, classical left side and gradient right side.

    Iterates as ``(improved_lhs, classical_lhs, rhs)``.
    """

    improved_lhs: float
    classical_lhs: float
    rhs: float
    prefix_term: float
    suffix_term: float
    constant: float
    label: str
    discretization: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.improved_lhs, self.classical_lhs, self.rhs))

    def as_pair(self):
        details = {
            "classical_lhs": self.classical_lhs,
            "prefix_term": self.prefix_term,
            "suffix_term": self.suffix_term,
        }
        return InequalityPair(self.improved_lhs, self.rhs, self.constant, self.label,
                              self.discretization, details=details)

    def classical_pair(self):
        return InequalityPair(self.classical_lhs, self.rhs, self.constant, "classical", self.discretization)

    @property
    def quotient(self):
        """``improved_lhs / (rhs / constant)``, the constant this function certifies."""
        energy = self.rhs / self.constant
        return self.improved_lhs / energy if energy > 0 else 0.0


@dataclass(frozen=True, eq=False)
class WeightPair:
    """Weights ``g >= 0`` and ``h > 0`` of the rearrangement kernel inequality."""

    g: RadialProfile
    h: RadialProfile

    def __post_init__(self):
        if not np.array_equal(self.g.nodes, self.h.nodes):
            raise DomainError("g and h must share a grid")
        g, h, r = self.g.values, self.h.values, self.h.nodes
        if np.any(g < 0):
            i = int(np.argmax(g < 0))
            raise PreconditionError(f"g must be nonnegative; g(r_{i}) = {float(g[i])!r}")
        if np.any(h <= 0):
            i = int(np.argmax(h <= 0))
            raise PreconditionError(f"h must be strictly positive; h(r_{i}) = {float(h[i])!r}")
        _require_nondecreasing(h, "h")
        _require_nondecreasing(h / r, "h(r)/r", "s*h(r) <= r*h(s) fails")


def _require_nondecreasing(values, name, why="not non-decreasing"):
    slack = MONOTONE_RTOL * np.max(np.abs(values))
    bad = np.flatnonzero(np.diff(values) < -slack)
    if bad.size:
        i = int(bad[0])
        raise PreconditionError(f"{name} is {why} between nodes {i} and {i + 1}")


def hardy_constant(N, p):
    """The sharp constant ``|p/(N-p)|^p``."""
    if not p > 1:
        raise DomainError(f"need p > 1, got {p!r}")
    if p == N:
        raise DomainError("the Hardy inequality fails in the critical case p = N")
    return abs(p / (N - p)) ** p


def _require_supercritical(N, p):
    if not p > N:
        raise DomainError(f"p must exceed N (got N={N!r}, p={p!r})")


@dataclass(frozen=True, eq=False)
class _Moments:
    """Per-radius angular p-moments of u and of its radial slopes."""

    grid: object
    N: int
    values: np.ndarray  # A(r_i) = int |u(r_i sigma)|^p dsigma
    slopes: np.ndarray  # D_i = int |slope on (r_{i-1}, r_i]|^p dsigma
    discretization: dict


def _moments(u, N, p):
    if u.dim != N:
        raise DomainError(f"function lives in N={u.dim}, evaluator asked for N={N}")
    if isinstance(u, SeparableFunction):
        M = u.moment_for(p)
        R = u.radial.values
        A = M * np.abs(R) ** p
        D = M * np.abs(cell_slopes(u.grid.nodes, R)) ** p
    elif isinstance(u, TensorFunction):
        if u.interpolation != "linear":
            raise DomainError("expected samples of u, not of a derivative")
        A = angular_p_moment(u.values, u.quadrature, p)
        D = angular_p_moment(cell_slopes(u.grid.nodes, u.values), u.quadrature, p)
    else:
        raise DomainError(f"unsupported function type {type(u).__name__}")
    scale = np.max(A, initial=0.0)
    if A[0] > 1e-24 * scale or A[-1] > 1e-24 * scale:
        raise PreconditionError("u must vanish at the first and last radial node (compact support)")
    return _Moments(u.grid, N, A, D, u.describe())


def _gradient_energy(m, weight=None):
    """``int f r^{N-1} int |d_r u|^p dsigma dr`` from the cell slopes."""
    cells = cell_moments(m.grid, m.N - 1)
    if weight is not None:
        cells = cells * _cell_average(weight)
    return float(np.sum(cells[1:] * m.slopes[1:]))


def _cell_average(weight):
    out = np.empty_like(weight)
    out[0] = weight[0]
    out[1:] = 0.5 * (weight[:-1] + weight[1:])
    return out


def _upper_tail(level, r_max, k):
    """``level * int_{r_max}^inf r^k dr``."""
    if level == 0:
        return 0.0
    if k >= -1:
        return math.inf
    return level * r_max ** (k + 1) / -(k + 1)


def _lower_tail(level, r_min, k):
    """``level * int_0^{r_min} r^k dr``."""
    if level == 0:
        return 0.0
    if k <= -1:
        return math.inf
    return level * r_min ** (k + 1) / (k + 1)


def min_kernel_sup(values, h):
    """``max_s min{1/h(r), 1/h(s)} values(s)`` for every node r, by two scans.

    ``h`` must be positive and non-decreasing, so the kernel is ``1/h(r)``
    for ``s <= r`` and ``1/h(s)`` for ``s >= r``.
    """
    values = np.asarray(values, dtype=float)
    h = np.asarray(h, dtype=float)
    prefix, _ = prefix_suffix_sup(values)
    _, suffix = prefix_suffix_sup(values / h)
    return np.maximum(prefix / h, suffix)


def _one_sided_terms(m, p, weight=None):
    """Closed-ball and exterior terms of the improved left side, plus the classical one."""
    grid = m.grid
    r = grid.nodes
    f = np.ones_like(r) if weight is None else weight
    c = grid.cell_weights * f * r ** (m.N - 1)
    over_rp = m.values / r**p
    prefix, _ = prefix_suffix_sup(m.values)
    _, suffix = prefix_suffix_sup(over_rp)
    ball = prefix / r**p
    classical = float(np.sum(c * over_rp))
    term1 = float(np.sum(c * ball) + f[-1] * _upper_tail(prefix[-1], grid.r_max, m.N - 1 - p))
    term2 = float(np.sum(c * suffix) + f[0] * _lower_tail(suffix[0], grid.r_min, m.N - 1))
    return term1, term2, classical, c, ball, suffix, prefix


def classical_hardy_pair(u, N, p):
    """``int |u|^p/|x|^p dx`` against ``C int |x/|x| . grad u|^p dx``."""
    _require_supercritical(N, p)
    C = hardy_constant(N, p)
    m = _moments(u, N, p)
    _, _, classical, _, _, _, _ = _one_sided_terms(m, p)
    return InequalityPair(classical, C * _gradient_energy(m), C, "classical", m.discretization)


def _improved(u, N, p, label):
    _require_supercritical(N, p)
    C = hardy_constant(N, p)
    m = _moments(u, N, p)
    term1, term2, classical, _, _, _, _ = _one_sided_terms(m, p)
    return ImprovedHardyResult(max(term1, term2), classical, C * _gradient_energy(m),
                               term1, term2, C, label, m.discretization)


def improved_hardy_radial_pair(u, N, p):
    """Improved Hardy inequality for a radial function.

    Returns
    -------
    ImprovedHardyResult
        Unpacks to ``(improved_lhs, classical_lhs, rhs)`` where
        ``improved_lhs = max(prefix_term, suffix_term)`` with
        ``prefix_term = int r^{N-1-p} sup_{s<=r} A(s) dr`` and
        ``suffix_term = int r^{N-1} sup_{s>=r} A(s)/s^p dr``.
    """
    radial = u.is_radial() if isinstance(u, (SeparableFunction, TensorFunction)) else False
    if not radial:
        raise DomainError("improved_hardy_radial_pair needs a radial function")
    return _improved(u, N, p, "improved-radial")


def improved_hardy_pair(u, N, p):
    """Improved Hardy inequality with angular p-moments for non-radial u."""
    if isinstance(u, TensorFunction) and u.quadrature.dim != N:
        raise DomainError("grid/quadrature mismatch: quadrature dimension differs from N")
    return _improved(u, N, p, "improved")


def kernel_hardy_pair(f, weights, p):
    """Rearrangement kernel inequality for ``F(s) = int_0^s f``.

    ``lhs = int g(r) sup_s |min{1/h(r), 1/h(s)} F(s)|^p dr`` with the supremum
    over grid nodes; ``rhs = int g(r) |F*(r)/h(r)|^p dr`` where
    ``F*(r) = int_0^r f*``.  A piecewise-constant ``f`` is rearranged exactly,
    a piecewise-linear one by resampling.
    """
    if not p > 1:
        raise DomainError(f"need p > 1, got {p!r}")
    if not np.array_equal(f.nodes, weights.h.nodes):
        raise DomainError("f and the weights must share a grid")
    grid = f.grid
    g, h = weights.g.values, weights.h.values
    F = cumulative_integral(f).values
    K = min_kernel_sup(np.abs(F), h)
    lhs = float(np.sum(grid.cell_weights * g * K**p))
    Fstar = rearranged_primitive(f, grid.nodes)
    rhs = float(np.sum(grid.cell_weights * g * (Fstar / h) ** p))
    return InequalityPair(lhs, rhs, 1.0, "kernel", {"radial": grid.describe()})


def rearranged_primitive(f, r):
    """``int_0^r f*(t) dt`` at radii ``r``."""
    method = "exact" if f.interpolation == "constant" else "resample"
    fstar = decreasing_rearrangement(f, method=method)
    edges = fstar.grid.edges
    cumulative = np.concatenate(([0.0], np.cumsum(fstar.values * np.diff(edges))))
    return np.interp(r, edges, cumulative)


def weighted_1d_hardy_pair(phi, N, p):
    """``int r^{N-p-1} |int_0^r phi|^p dr <= (p/(p-N))^p int r^{N-1} phi^p dr``."""
    _require_supercritical(N, p)
    v = phi.values
    if np.any(v < 0):
        raise PreconditionError("phi must be nonnegative")
    _require_nondecreasing(-v, "-phi", "increasing somewhere (phi must be non-increasing)")
    C = (p / (p - N)) ** p
    grid = phi.grid
    Phi = cumulative_integral(phi).values
    r = grid.nodes
    body = float(np.sum(grid.cell_weights * r ** (N - p - 1) * Phi**p))
    head = 0.0
    if phi.interpolation == "constant":
        # Phi(r) = v_0 r on (0, r_0]
        head = v[0] ** p * grid.r_min**N / N
    lhs = head + body + _upper_tail(Phi[-1] ** p, grid.r_max, N - p - 1)
    rhs = C * weighted_integral(phi.with_values(v**p), N - 1)
    return InequalityPair(lhs, rhs, C, "weighted1d", {"radial": grid.describe()})


def _weight_values(weight, grid):
    if weight is None:
        return None
    w = weight.values if isinstance(weight, RadialProfile) else np.asarray(weight, dtype=float)
    if w.shape != grid.nodes.shape:
        raise DomainError("the radial weight must live on the function's grid")
    if np.any(w < 0):
        i = int(np.argmax(w < 0))
        raise PreconditionError(f"the radial weight must be nonnegative; f(r_{i}) = {float(w[i])!r}")
    return w


def radialisation_contraction_pair(u, p, weight=None):
    """``int f |x/|x| . grad u~|^p dx`` against ``int f |x/|x| . grad u|^p dx``."""
    if not p > 1:
        raise DomainError(f"need p > 1, got {p!r}")
    N = u.dim
    m = _moments(u, N, p)
    w = _weight_values(weight, u.grid)
    area = sphere_geometry(N).surface_area
    ut = radialise(u, p).values
    cells = cell_moments(u.grid, N - 1)
    if w is not None:
        cells = cells * _cell_average(w)
    lhs = area * float(np.sum(cells[1:] * np.abs(cell_slopes(u.grid.nodes, ut)[1:]) ** p))
    rhs = float(np.sum(cells[1:] * m.slopes[1:]))
    return InequalityPair(lhs, rhs, 1.0, "radialise-contraction", m.discretization)


def sup_exchange_pair(u, p, weight=None):
    """Max of the two weighted sup-integrals of u against the integral of the max for u~."""
    if not p >= 1:
        raise DomainError(f"need p >= 1, got {p!r}")
    N = u.dim
    m = _moments(u, N, p)
    w = _weight_values(weight, u.grid)
    term1, term2, _, c, _, _, _ = _one_sided_terms(m, p, w)
    area = sphere_geometry(N).surface_area
    # omega_N * u~^p, rebuilt from the radialised function
    ut_p = area * (radialise(u, p).values ** p if p > 1 else m.values / area)
    r = u.grid.nodes
    prefix, _ = prefix_suffix_sup(ut_p)
    _, suffix = prefix_suffix_sup(ut_p / r**p)
    f = np.ones_like(r) if w is None else w
    rhs = (float(np.sum(c * np.maximum(prefix / r**p, suffix)))
           + f[-1] * _upper_tail(prefix[-1], u.grid.r_max, N - 1 - p)
           + f[0] * _lower_tail(suffix[0], u.grid.r_min, N - 1))
    lhs = max(term1, term2)
    unbounded = math.isinf(lhs) or math.isinf(rhs)
    return InequalityPair(lhs, rhs, 1.0, "sup-exchange", m.discretization, unbounded=unbounded,
                          details={"prefix_term": term1, "suffix_term": term2})


def uncertainty_pair(u, N, p, variant="nonradial", branch="suffix"):
    """One branch of the Heisenberg-Pauli-Weyl type inequality.

    The suffix branch compares ``int r^{N-1} sup_{s>=r} A(s) dr`` with
    ``|p/(N-p)| (int r^{N-1} sup_{s>=r} s^{p/(p-1)} A(s) dr)^{(p-1)/p} E^{1/p}``,
    ``E`` the radial gradient energy.  On the prefix branch both sides
    diverge for every nonzero u; it is returned with ``unbounded=True``.
    """
    _require_supercritical(N, p)
    if variant not in ("radial", "nonradial"):
        raise DomainError(f"variant must be 'radial' or 'nonradial', got {variant!r}")
    if branch not in ("prefix", "suffix"):
        raise DomainError(f"branch must be 'prefix' or 'suffix', got {branch!r}")
    if variant == "radial" and not u.is_radial():
        raise DomainError("the radial uncertainty principle needs a radial function")
    label = "uncertainty-radial" if variant == "radial" else "uncertainty"
    label = f"{label}:{branch}"
    m = _moments(u, N, p)
    constant = abs(p / (N - p))
    if branch == "prefix":
        prefix, _ = prefix_suffix_sup(m.values)
        if prefix[-1] > 0:
            # sup over the ball stays at max A beyond the support: int r^{N-1} dr diverges
            return InequalityPair(math.inf, math.inf, constant, label, m.discretization, unbounded=True)
        return InequalityPair(0.0, 0.0, constant, label, m.discretization)
    grid = m.grid
    r = grid.nodes
    c = grid.cell_weights * r ** (N - 1)
    _, mass = prefix_suffix_sup(m.values)
    _, moment = prefix_suffix_sup(r ** (p / (p - 1)) * m.values)
    lhs = float(np.sum(c * mass)) + _lower_tail(mass[0], grid.r_min, N - 1)
    moment_term = float(np.sum(c * moment)) + _lower_tail(moment[0], grid.r_min, N - 1)
    energy = _gradient_energy(m)
    rhs = constant * moment_term ** ((p - 1) / p) * energy ** (1 / p)
    return InequalityPair(lhs, rhs, constant, label, m.discretization,
                          details={"moment_term": moment_term, "gradient_energy": energy})
