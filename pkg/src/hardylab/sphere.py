"""Unit sphere S^{N-1}: surface area, ball volume and angular quadrature."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import DomainError

SUPPORTED_QUADRATURE_DIMS = (1, 2, 3)


@dataclass(frozen=True)
class SphereGeometry:
    dim: int
    surface_area: float
    ball_volume: float


def sphere_geometry(N):
    """Exact surface area of S^{N-1} and volume of the unit N-ball.

    S^0 = {-1, +1} carries counting measure, so N = 1 gives area 2 and volume 2.
    """
    if int(N) != N or N < 1:
        raise DomainError(f"dimension must be an integer >= 1, got {N!r}")
    N = int(N)
    area = 2.0 * math.pi ** (N / 2) / math.gamma(N / 2)
    volume = math.pi ** (N / 2) / math.gamma(N / 2 + 1)
    return SphereGeometry(N, area, volume)


@dataclass(frozen=True, eq=False)
class AngularQuadrature:
    """Nodes on S^{N-1} (rows of ``nodes``) with positive weights summing to the area."""

    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    resolution: int = 1

    def __len__(self):
        return self.weights.size

    def describe(self):
        return {"dim": self.dim, "resolution": self.resolution, "nodes": len(self)}


def build_angular_quadrature(N, resolution):
    """Angular rule on S^{N-1} for N in {1, 2, 3}.

    N = 1 uses the two points of S^0 with unit weights.  N = 2 uses
    ``resolution`` equally spaced angles.  N = 3 is a product of
    ``resolution`` Gauss-Legendre nodes in cos(theta) with ``2*resolution``
    equally spaced azimuths.
    """
    if N not in SUPPORTED_QUADRATURE_DIMS:
        raise DomainError(
            f"angular quadrature is available for N in {SUPPORTED_QUADRATURE_DIMS}; "
            "use a SeparableFunction with a known angular moment for other N"
        )
    if int(resolution) != resolution or resolution < 1:
        raise DomainError(f"resolution must be an integer >= 1, got {resolution!r}")
    resolution = int(resolution)
    if N == 1:
        nodes = np.array([[-1.0], [1.0]])
        weights = np.ones(2)
    elif N == 2:
        theta = 2.0 * np.pi * np.arange(resolution) / resolution
        nodes = np.column_stack((np.cos(theta), np.sin(theta)))
        weights = np.full(resolution, 2.0 * np.pi / resolution)
    else:
        z, wz = leggauss(resolution)
        n_phi = 2 * resolution
        phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
        zz, pp = np.meshgrid(z, phi, indexing="ij")
        sin_theta = np.sqrt(1.0 - zz**2)
        nodes = np.column_stack(
            ((sin_theta * np.cos(pp)).ravel(), (sin_theta * np.sin(pp)).ravel(), zz.ravel())
        )
        weights = np.outer(wz, np.full(n_phi, 2.0 * np.pi / n_phi)).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return AngularQuadrature(N, nodes, weights, resolution)


def angular_p_moment(values_at_nodes, quadrature, p):
    """``sum_k w_k |g(sigma_k)|^p`` over the last axis of ``values_at_nodes``.

    A 2-D array of shape (radii, angular nodes) gives one moment per radius.
    """
    if p < 1:
        raise DomainError(f"angular p-moment needs p >= 1, got {p!r}")
    g = np.asarray(values_at_nodes, dtype=float)
    if g.shape[-1] != len(quadrature):
        raise DomainError(
            f"got {g.shape[-1]} angular values for a quadrature with {len(quadrature)} nodes"
        )
    return np.sum(quadrature.weights * np.abs(g) ** p, axis=-1)
