"""Billiard trajectories in convex bodies and the cohomology of their configuration spaces."""

from .configspace import Configuration, ConfigurationError, length_functional, riemannian_gradient, riemannian_hessian
from .field import GF2, QQ, Field
from .geometry import GeometryError, SurfaceKind, SurfaceSpec
from .leray import cohomology_dims, cup_constant, phi_star, rm_betti, sigma_class, verify_theorem4
from .oracle import circle_component_count, sphere_trajectories
from .solver import SolveOptions, find_critical_points, lower_bound, newton_refine

__version__ = "0.1.0"

__all__ = [
    "Configuration",
    "ConfigurationError",
    "Field",
    "GF2",
    "GeometryError",
    "QQ",
    "SolveOptions",
    "SurfaceKind",
    "SurfaceSpec",
    "circle_component_count",
    "cohomology_dims",
    "cup_constant",
    "find_critical_points",
    "length_functional",
    "lower_bound",
    "newton_refine",
    "phi_star",
    "riemannian_gradient",
    "riemannian_hessian",
    "rm_betti",
    "sigma_class",
    "sphere_trajectories",
    "verify_theorem4",
]
