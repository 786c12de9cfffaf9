"""Strictly convex hypersurfaces X in R^{m+1}: sphere and axis-aligned ellipsoid."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property

import numpy as np

ON_SURFACE_TOL = 1e-12
# normal evaluation accepts points slightly off X (solver iterates carry round-off)
NORMAL_TOL = 1e-8


class GeometryError(ValueError):
    """Raised for dimension mismatches and points outside an operation's domain."""


class SurfaceKind(enum.Enum):
    UNIT_SPHERE = "sphere"
    ELLIPSOID = "ellipsoid"


@dataclass(frozen=True)
class SurfaceSpec:
    """A closed strictly convex hypersurface of dimension ``m``.

    Both families are the level set ``sum((p_i / a_i)**2) = 1`` of a positive
    definite quadratic form, which is what every operation below relies on.
    """

    kind: SurfaceKind
    m: int
    axes: tuple[float, ...]

    def __post_init__(self):
        if self.m < 1:
            raise GeometryError(f"surface dimension m must be >= 1, got {self.m}")
        if len(self.axes) != self.m + 1:
            raise GeometryError(f"expected {self.m + 1} axes, got {len(self.axes)}")
        if any(not a > 0 for a in self.axes):
            raise GeometryError(f"axes must be strictly positive: {self.axes}")
        if self.kind is SurfaceKind.UNIT_SPHERE and any(a != 1.0 for a in self.axes):
            raise GeometryError("unit sphere must have unit axes")

    @classmethod
    def sphere(cls, m: int) -> SurfaceSpec:
        return cls(SurfaceKind.UNIT_SPHERE, m, (1.0,) * (m + 1))

    @classmethod
    def ellipsoid(cls, axes) -> SurfaceSpec:
        axes = tuple(float(a) for a in axes)
        return cls(SurfaceKind.ELLIPSOID, len(axes) - 1, axes)

    @property
    def dim(self) -> int:
        """Ambient dimension m + 1."""
        return self.m + 1

    @cached_property
    def metric(self) -> np.ndarray:
        """Diagonal of the quadratic form, 1 / a_i^2."""
        out = 1.0 / np.asarray(self.axes) ** 2
        out.setflags(write=False)
        return out

    def scaled(self, factor: float) -> SurfaceSpec:
        if self.kind is SurfaceKind.UNIT_SPHERE and factor != 1.0:
            return SurfaceSpec.ellipsoid([factor] * self.dim)
        return SurfaceSpec(self.kind, self.m, tuple(factor * a for a in self.axes))

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "m": self.m, "axes": list(self.axes)}

    @classmethod
    def from_json(cls, data: dict) -> SurfaceSpec:
        kind = SurfaceKind(data["kind"])
        if kind is SurfaceKind.UNIT_SPHERE:
            return cls.sphere(int(data["m"]))
        return cls.ellipsoid(data["axes"])


def _coords(spec: SurfaceSpec, p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (spec.dim,):
        raise GeometryError(f"expected a point in R^{spec.dim}, got shape {p.shape}")
    return p


def surface_residual(spec: SurfaceSpec, p) -> float:
    """Implicit equation sum((p_i/a_i)^2) - 1; zero exactly on X."""
    p = _coords(spec, p)
    return float(np.dot(spec.metric, p * p) - 1.0)


def unit_normal(spec: SurfaceSpec, p) -> np.ndarray:
    p = _coords(spec, p)
    if abs(surface_residual(spec, p)) > NORMAL_TOL:
        raise GeometryError(f"point {p} is not on the surface")
    g = spec.metric * p
    return g / np.linalg.norm(g)


def retract(spec: SurfaceSpec, p) -> np.ndarray:
    """Map a nonzero point of R^{m+1} back onto X by radial scaling.

    For the unit sphere this is the nearest-point projection.
    """
    p = _coords(spec, p)
    rho2 = float(np.dot(spec.metric, p * p))
    if rho2 == 0.0:
        raise GeometryError("cannot retract the origin")
    q = p / np.sqrt(rho2)
    # one correction pass brings the residual to round-off level
    return q / np.sqrt(np.dot(spec.metric, q * q))


def retract_rows(spec: SurfaceSpec, P: np.ndarray) -> np.ndarray:
    """:func:`retract` applied to every row of ``P``."""
    P = np.asarray(P, dtype=float)
    rho2 = (P * P) @ spec.metric
    if np.any(rho2 == 0.0):
        raise GeometryError("cannot retract the origin")
    Q = P / np.sqrt(rho2)[:, None]
    return Q / np.sqrt((Q * Q) @ spec.metric)[:, None]


def tangent_frame(spec: SurfaceSpec, p) -> np.ndarray:
    """Orthonormal basis of the tangent space at ``p`` as an (m+1, m) array.

    Gram-Schmidt on the coordinate axes against the normal, dropping the axis
    most aligned with the normal, so the frame depends only on ``p``.
    """
    nu = unit_normal(spec, p)
    drop = int(np.argmax(np.abs(nu)))
    basis = [nu]
    for k in range(spec.dim):
        if k == drop:
            continue
        v = np.zeros(spec.dim)
        v[k] = 1.0
        for b in basis:
            v = v - np.dot(b, v) * b
        basis.append(v / np.linalg.norm(v))
    return np.column_stack(basis[1:])


def tangent_project(spec: SurfaceSpec, p, v) -> np.ndarray:
    nu = unit_normal(spec, p)
    v = np.asarray(v, dtype=float)
    return v - np.dot(nu, v) * nu


def parse_surface(kind: str, m: int | None = None, axes=None) -> SurfaceSpec:
    """Build a surface from CLI-style arguments (``sphere`` + m, or ``ellipsoid`` + axes)."""
    if kind == "sphere":
        if m is None:
            if axes is None:
                raise GeometryError("sphere needs --m")
            m = len(axes) - 1
        return SurfaceSpec.sphere(int(m))
    if kind == "ellipsoid":
        if axes is None:
            raise GeometryError("ellipsoid needs --axes")
        spec = SurfaceSpec.ellipsoid(axes)
        if m is not None and spec.m != m:
            raise GeometryError(f"--m {m} disagrees with {len(axes)} axes")
        return spec
    raise GeometryError(f"unknown surface kind {kind!r}")
