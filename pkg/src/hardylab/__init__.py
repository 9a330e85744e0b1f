"""Numerical verification of improved supercritical Hardy inequalities."""

from .errors import ComputationError, DomainError, HardyLabError, PreconditionError
from .functionals import (
    ImprovedHardyResult,
    InequalityPair,
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
    SeparableFunction,
    TensorFunction,
    angular_mix,
    family_breakpoints,
    hardy_extremal,
    make_family,
    radialise,
    random_smooth,
    smooth_bump,
    tent,
)
from .radial import (
    RadialGrid,
    RadialProfile,
    build_log_grid,
    build_uniform_grid,
    decreasing_rearrangement,
    insert_breakpoints,
)
from .sphere import build_angular_quadrature, sphere_geometry

__version__ = "0.1.0"

__all__ = [
    "ComputationError",
    "DomainError",
    "FamilySpec",
    "HardyLabError",
    "ImprovedHardyResult",
    "InequalityPair",
    "PreconditionError",
    "RadialGrid",
    "RadialProfile",
    "SeparableFunction",
    "TensorFunction",
    "WeightPair",
    "angular_mix",
    "build_angular_quadrature",
    "build_log_grid",
    "build_uniform_grid",
    "classical_hardy_pair",
    "decreasing_rearrangement",
    "family_breakpoints",
    "hardy_constant",
    "hardy_extremal",
    "improved_hardy_pair",
    "improved_hardy_radial_pair",
    "insert_breakpoints",
    "kernel_hardy_pair",
    "make_family",
    "radialisation_contraction_pair",
    "radialise",
    "random_smooth",
    "smooth_bump",
    "sphere_geometry",
    "sup_exchange_pair",
    "tent",
    "uncertainty_pair",
    "weighted_1d_hardy_pair",
]
