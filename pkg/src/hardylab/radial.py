"""Functions of the radius r = |x| sampled on a grid in (0, inf).

A :class:`RadialProfile` is interpreted in one of two ways:

``"linear"``
    the piecewise-linear interpolant of the samples on ``[r_0, r_{n-1}]``,
    extended by zero outside that interval;
``"constant"``
    value ``v_i`` on the cell ``(r_{i-1}, r_i]`` with ``r_{-1} = 0``, and zero
    beyond ``r_{n-1}``.  The nodes are the right cell edges, so the first
    cell always starts at the origin.

All integrals, level sets and rearrangements below are exact (or exact up to
the stated resampling) for the interpolant they act on.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ComputationError, DomainError

INTERPOLATIONS = ("linear", "constant")
DEFAULT_REARRANGEMENT_CELLS = 2**17


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def trapezoid_weights(nodes):
    """Trapezoid weights of the rule ``sum_i w_i f(r_i) ~ int f dr``."""
    nodes = np.asarray(nodes, dtype=float)
    d = np.diff(nodes)
    w = np.empty_like(nodes)
    w[0] = 0.5 * d[0]
    w[-1] = 0.5 * d[-1]
    w[1:-1] = 0.5 * (d[:-1] + d[1:])
    return w


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Strictly increasing positive radii with quadrature weights for ``dr``.

    Use :func:`build_log_grid` or :func:`build_uniform_grid` rather than the
    constructor unless custom weights are needed.
    """

    nodes: np.ndarray
    cell_weights: np.ndarray = None
    kind: str = "custom"

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise DomainError("a radial grid needs at least 2 nodes")
        if not np.all(np.isfinite(nodes)):
            raise ComputationError("grid nodes must be finite")
        if nodes[0] <= 0:
            raise DomainError(f"grid nodes must be positive, got r_0 = {float(nodes[0])!r}")
        if np.any(np.diff(nodes) <= 0):
            i = int(np.argmax(np.diff(nodes) <= 0))
            raise DomainError(f"grid nodes must be strictly increasing (nodes {i}, {i + 1})")
        weights = trapezoid_weights(nodes) if self.cell_weights is None else self.cell_weights
        weights = np.asarray(weights, dtype=float)
        if weights.shape != nodes.shape:
            raise DomainError("cell_weights must have one entry per node")
        if not np.all(weights > 0):
            raise DomainError("cell_weights must be positive")
        object.__setattr__(self, "nodes", _readonly(nodes))
        object.__setattr__(self, "cell_weights", _readonly(weights))

    def __len__(self):
        return self.nodes.size

    @property
    def r_min(self):
        return float(self.nodes[0])

    @property
    def r_max(self):
        return float(self.nodes[-1])

    @property
    def edges(self):
        """Cell edges ``[0, r_0, ..., r_{n-1}]`` of the piecewise-constant reading."""
        return np.concatenate(([0.0], self.nodes))

    def with_resolution(self, n):
        """Same family of grid (log or uniform) on the same interval with ``n`` nodes."""
        if self.kind == "log":
            return build_log_grid(self.r_min, self.r_max, n)
        if self.kind == "uniform":
            return build_uniform_grid(self.r_min, self.r_max, n)
        raise DomainError(f"cannot re-resolve a grid of kind {self.kind!r}")

    def describe(self):
        return {"kind": self.kind, "r_min": self.r_min, "r_max": self.r_max, "n": len(self)}


def insert_breakpoints(grid, points):
    """``grid`` with the in-range ``points`` added as nodes.

    Kinks of a piecewise-linear input then sit on nodes, which keeps the
    interpolant exact there.  The grid is returned unchanged when every point
    is already a node or out of range; otherwise its kind gains a
    ``"+breakpoints"`` suffix.
    """
    pts = np.asarray(points, dtype=float)
    pts = pts[(pts > grid.r_min) & (pts < grid.r_max)]
    new = np.setdiff1d(pts, grid.nodes)
    if new.size == 0:
        return grid
    return RadialGrid(np.union1d(grid.nodes, new), kind=f"{grid.kind}+breakpoints")


def build_log_grid(r_min, r_max, n):
    """Geometrically spaced grid from ``r_min`` to ``r_max`` with trapezoid weights in r.

    >>> build_log_grid(1.0, 4.0, 3).nodes
    array([1., 2., 4.])
    """
    _check_bounds(r_min, r_max, n)
    return RadialGrid(np.geomspace(r_min, r_max, int(n)), kind="log")


def build_uniform_grid(r_min, r_max, n):
    """Equally spaced grid from ``r_min`` to ``r_max`` with trapezoid weights."""
    _check_bounds(r_min, r_max, n)
    return RadialGrid(np.linspace(r_min, r_max, int(n)), kind="uniform")


def _check_bounds(r_min, r_max, n):
    if not (np.isfinite(r_min) and np.isfinite(r_max)):
        raise DomainError("grid bounds must be finite")
    if not 0 < r_min < r_max:
        raise DomainError(f"need 0 < r_min < r_max, got r_min={r_min!r}, r_max={r_max!r}")
    if int(n) != n or n < 2:
        raise DomainError(f"need an integer n >= 2, got {n!r}")


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Samples ``f(r_i)`` of a function of the radius on a :class:`RadialGrid`."""

    grid: RadialGrid
    values: np.ndarray
    interpolation: str = "linear"

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != self.grid.nodes.shape:
            raise DomainError(
                f"profile has {values.size} values for a grid of {len(self.grid)} nodes"
            )
        if not np.all(np.isfinite(values)):
            raise ComputationError("profile values must be finite")
        if self.interpolation not in INTERPOLATIONS:
            raise DomainError(f"interpolation must be one of {INTERPOLATIONS}")
        object.__setattr__(self, "values", _readonly(values))

    @property
    def nodes(self):
        return self.grid.nodes

    def __len__(self):
        return self.values.size

    def with_values(self, values):
        return RadialProfile(self.grid, values, self.interpolation)

    def evaluate(self, r):
        """Evaluate the interpolant at arbitrary radii."""
        r = np.asarray(r, dtype=float)
        if self.interpolation == "linear":
            return np.interp(r, self.nodes, self.values, left=0.0, right=0.0)
        idx = np.searchsorted(self.nodes, r, side="left")
        out = np.zeros(r.shape)
        inside = (r > 0) & (idx < len(self))
        out[inside] = self.values[idx[inside]]
        return out

    def support_hull(self):
        """Smallest interval outside which the interpolant vanishes, or None."""
        nz = np.flatnonzero(self.values)
        if nz.size == 0:
            return None
        i0, i1 = int(nz[0]), int(nz[-1])
        if self.interpolation == "linear":
            return float(self.nodes[max(i0 - 1, 0)]), float(self.nodes[min(i1 + 1, len(self) - 1)])
        edges = self.grid.edges
        return float(edges[i0]), float(edges[i1 + 1])


@dataclass(frozen=True)
class DistributionCurve:
    """Level-set measures ``mu(tau) = |{t > 0 : |f(t)| > tau}|``."""

    levels: np.ndarray = field(repr=False)
    measures: np.ndarray = field(repr=False)


def cell_moments(grid, k):
    """``int_{e_i}^{e_{i+1}} r^k dr`` for the cells ``(r_{i-1}, r_i]``, ``r_{-1} = 0``.

    The first cell is returned as ``inf`` or ``nan`` whenever ``k <= -1``.
    """
    edges = grid.edges
    if k == -1:
        with np.errstate(divide="ignore"):
            return np.log(edges[1:]) - np.log(edges[:-1])
    with np.errstate(divide="ignore"):
        powered = edges ** (k + 1.0)
    return (powered[1:] - powered[:-1]) / (k + 1.0)


def weighted_integral(f, k):
    """Compute ``int_0^inf r^k f(r) dr`` for a radial profile.

    Parameters
    ----------
    f : RadialProfile
        Integrand samples.
    k : float
        Power of the radial weight.

    Returns
    -------
    float
        Trapezoid value for linear profiles (zero outside the grid), exact
        cell integrals for piecewise-constant ones.
    """
    if f.interpolation == "linear":
        if k < 0 and f.values[0] != 0:
            raise DomainError("a singular weight r^k, k < 0, needs f to vanish at the first node")
        return float(np.sum(f.grid.cell_weights * f.nodes**k * f.values))
    moments = cell_moments(f.grid, k)
    nonzero = f.values != 0
    if nonzero[0] and k <= -1:
        raise DomainError("int_0^{r_0} r^k dr diverges for k <= -1; the first cell must vanish")
    return float(np.sum(moments[nonzero] * f.values[nonzero]))


def cumulative_integral(f):
    """Running integral ``F(s) = int_0^s f(t) dt`` sampled at the grid nodes.

    ``F(r_0)`` is the contribution of ``(0, r_0]``: zero for linear profiles
    and ``r_0 * v_0`` for piecewise-constant ones.
    """
    v = f.values
    if f.interpolation == "linear":
        F = np.zeros_like(v)
        F[1:] = np.cumsum(0.5 * (v[:-1] + v[1:]) * np.diff(f.nodes))
    else:
        F = np.cumsum(v * np.diff(f.grid.edges))
    return RadialProfile(f.grid, F, "linear")


def prefix_suffix_sup(values):
    """Running maxima from the left and from the right.

    >>> prefix_suffix_sup([1.0, 3.0, 2.0])
    (array([1., 3., 3.]), array([3., 3., 2.]))
    """
    a = np.asarray(values, dtype=float)
    if a.ndim != 1 or a.size == 0:
        raise DomainError("prefix_suffix_sup needs a non-empty 1-D array")
    if np.any(np.isnan(a)):
        raise ComputationError("prefix_suffix_sup received NaN")
    prefix = np.maximum.accumulate(a)
    suffix = np.maximum.accumulate(a[::-1])[::-1]
    return prefix, suffix


def decreasing_rearrangement(f, m=DEFAULT_REARRANGEMENT_CELLS, method="resample"):
    """Non-increasing rearrangement ``f*`` of ``|f|`` on the half-line.

    Parameters
    ----------
    f : RadialProfile
        Bounded profile; it vanishes outside its grid by construction.
    m : int
        Number of equal output cells for ``method="resample"``.
    method : {"resample", "exact"}
        ``"resample"`` samples ``|f|`` at the midpoints of ``m`` equal cells
        and sorts them.  The cells span ``[0, r_max]`` for piecewise-constant
        input, which makes the result an exact sort for equal input cells
        when ``m`` is their number, and the support hull for linear input.
        ``"exact"`` sorts the cells of a piecewise-constant input together
        with their widths, which is exact on any grid.

    Returns
    -------
    RadialProfile
        Piecewise-constant, non-increasing profile starting at ``s = 0``.
    """
    if method == "exact":
        if f.interpolation != "constant":
            raise DomainError("the exact rearrangement needs a piecewise-constant profile")
        mags = np.abs(f.values)
        widths = np.diff(f.grid.edges)
        order = np.argsort(-mags, kind="stable")
        return RadialProfile(RadialGrid(np.cumsum(widths[order]), kind="custom"), mags[order], "constant")
    if method != "resample":
        raise DomainError(f"unknown rearrangement method {method!r}")
    if int(m) != m or m < 2:
        raise DomainError(f"need an integer m >= 2 output cells, got {m!r}")
    m = int(m)
    hull = f.support_hull()
    if hull is None or f.interpolation == "constant":
        lo, hi = 0.0, f.grid.r_max
    else:
        lo, hi = hull
    width = (hi - lo) / m
    mids = lo + (np.arange(m) + 0.5) * width
    mags = np.abs(f.evaluate(mids))
    sorted_desc = np.sort(mags)[::-1]
    nodes = width * np.arange(1, m + 1)
    return RadialProfile(RadialGrid(nodes, kind="uniform-cells"), sorted_desc, "constant")


def distribution_function(f, levels):
    """Exact measure of ``{t > 0 : |f(t)| > tau}`` for each level ``tau``."""
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    if np.any(levels < 0):
        raise DomainError("distribution levels must be nonnegative")
    v = f.values
    if f.interpolation == "constant":
        widths = np.diff(f.grid.edges)
        measures = np.array([np.sum(widths[np.abs(v) > tau]) for tau in levels])
    else:
        a, b = v[:-1], v[1:]
        dr = np.diff(f.nodes)
        measures = np.array(
            [np.sum(dr * (_fraction_above(a, b, tau) + _fraction_above(-a, -b, tau))) for tau in levels]
        )
    return DistributionCurve(_readonly(levels), _readonly(measures))


def _fraction_above(a, b, tau):
    # share of each linear segment a -> b on which the segment exceeds tau
    hi = np.maximum(a, b)
    lo = np.minimum(a, b)
    span = hi - lo
    with np.errstate(divide="ignore", invalid="ignore"):
        partial = np.where(span > 0, (hi - tau) / span, 0.0)
    return np.where(lo > tau, 1.0, np.where(hi > tau, partial, 0.0))


def radial_derivative(f, method="central"):
    """Derivative ``df/dr`` of a sampled profile.

    ``method="central"`` returns node values: second-order central
    differences inside (exact for quadratics on any grid), first-order
    one-sided differences at both ends.  ``method="cell"`` returns the exact
    derivative of the piecewise-linear interpolant as a piecewise-constant
    profile on the same grid: cell ``(r_{i-1}, r_i]`` carries the slope
    ``(f_i - f_{i-1}) / (r_i - r_{i-1})`` and the first cell ``(0, r_0]`` is 0.
    """
    if len(f) < 3:
        raise DomainError("a radial derivative needs at least 3 nodes")
    if f.interpolation != "linear":
        raise DomainError("only piecewise-linear profiles can be differentiated")
    if method == "central":
        return RadialProfile(f.grid, np.gradient(f.values, f.nodes, edge_order=1), "linear")
    if method == "cell":
        return RadialProfile(f.grid, cell_slopes(f.nodes, f.values), "constant")
    raise DomainError(f"unknown derivative method {method!r}")


def cell_slopes(nodes, values):
    """Slopes on the cells ``(r_{i-1}, r_i]`` along axis 0, with a zero first cell."""
    values = np.asarray(values, dtype=float)
    dr = np.diff(nodes).reshape((-1,) + (1,) * (values.ndim - 1))
    out = np.zeros_like(values)
    out[1:] = np.diff(values, axis=0) / dr
    return out


def read_profile_csv(source, interpolation="linear"):
    """Read a ``r,value`` CSV (path or file object) into a :class:`RadialProfile`."""
    rows = _read_rows(source, ("r", "value"))
    if len(rows) < 2:
        raise DomainError("profile CSV needs at least 2 data rows")
    data = np.array([_parse_floats(row, lineno) for lineno, row in rows])
    r = data[:, 0]
    bad = np.flatnonzero(np.diff(r) <= 0)
    if bad.size:
        raise DomainError(f"r must be strictly increasing (row {rows[bad[0] + 1][0]})")
    return RadialProfile(RadialGrid(r), data[:, 1], interpolation)


def write_profile_csv(profile, target, header=("r", "value")):
    """Write a profile as a two-column CSV with LF line endings."""
    rows = [",".join(header)]
    rows += [f"{r!r},{v!r}" for r, v in zip(profile.nodes.tolist(), profile.values.tolist())]
    text = "\n".join(rows) + "\n"
    if hasattr(target, "write"):
        target.write(text)
    else:
        with open(target, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _parse_floats(row, lineno):
    out = []
    for x in row:
        try:
            v = float(x)
        except ValueError:
            raise DomainError(f"line {lineno}: cannot parse {x!r} as a number") from None
        if not np.isfinite(v):
            raise DomainError(f"line {lineno}: non-finite value {x!r}")
        out.append(v)
    return out


def _read_rows(source, header):
    """Return ``[(line_number, fields)]`` after validating the header."""
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8", newline="") as fh:
            text = fh.read()
    else:
        text = source.read()
    reader = csv.reader(io.StringIO(text))
    try:
        first = next(reader)
    except StopIteration:
        raise DomainError("empty CSV") from None
    if [h.strip() for h in first] != list(header):
        raise DomainError(f"line 1: expected header {','.join(header)!r}, got {','.join(first)!r}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise DomainError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        rows.append((lineno, [x.strip() for x in row]))
    return rows
