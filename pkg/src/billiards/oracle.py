"""Closed-form ground truth: billiards in the round sphere and the circle case m = 1."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import GeometryError

ANTIPODAL_TOL = 1e-9


@dataclass(frozen=True)
class SphereTrajectory:
    k: int
    alpha: float
    points: np.ndarray  # (n, m+1), reflection points only

    def to_json(self) -> dict:
        return {"k": self.k, "alpha": self.alpha, "points": self.points.tolist()}


def great_circle_frame(A, B):
    """Orthonormal pair (e1, e2) spanning the plane of A, B and the centre, plus the angle phi.

    e1 = A and e2 points towards B, so phi in (0, pi) is measured
    counterclockwise in this frame.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if abs(np.linalg.norm(A) - 1) > 1e-9 or abs(np.linalg.norm(B) - 1) > 1e-9:
        raise GeometryError("A and B must lie on the unit sphere")
    e1 = A
    w = B - np.dot(A, B) * A
    if np.linalg.norm(A - B) <= ANTIPODAL_TOL:
        raise GeometryError("A and B must be distinct")
    if np.linalg.norm(A + B) <= ANTIPODAL_TOL or np.linalg.norm(w) <= ANTIPODAL_TOL:
        raise GeometryError("antipodal endpoints: the plane through A, B and the centre is not unique")
    e2 = w / np.linalg.norm(w)
    phi = math.atan2(float(np.dot(B, e2)), float(np.dot(B, e1)))
    return e1, e2, phi


def trajectories_in_plane(e1, e2, phi: float, n: int) -> list[SphereTrajectory]:
    """The n+1 trajectories on the great circle through e1 with B at angle ``phi``."""
    if not 0 < phi < 2 * math.pi:
        raise GeometryError(f"phi must lie in (0, 2pi), got {phi}")
    if n < 1:
        raise GeometryError("need n >= 1 reflections")
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    out = []
    for k in range(n + 1):
        alpha = (phi + 2 * math.pi * k) / (n + 1)
        angles = alpha * np.arange(1, n + 1)
        pts = np.outer(np.cos(angles), e1) + np.outer(np.sin(angles), e2)
        out.append(SphereTrajectory(k, alpha, pts))
    return out


def sphere_trajectories(A, B, n: int) -> list[SphereTrajectory]:
    e1, e2, phi = great_circle_frame(A, B)
    return trajectories_in_plane(e1, e2, phi, n)


def endpoints_at_angle(phi: float, m: int = 2):
    """A = e_1 and B at angle ``phi`` from it in the (e_1, e_2) plane of R^{m+1}."""
    A = np.zeros(m + 1)
    B = np.zeros(m + 1)
    A[0] = 1.0
    B[0], B[1] = math.cos(phi), math.sin(phi)
    return A, B


class _UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def count_cube_regions(n: int, psi: float, grid: int) -> int:
    """Count regions of (0,1)^n cut by the hyperplanes sum(phi) = psi + k.

    Samples cell centres of a ``grid**n`` lattice; lattice neighbours are
    joined when no hyperplane separates them (same integer part of
    sum(phi) - psi), and components are counted with union-find.  Samples
    lying on a hyperplane are not in the space and are dropped.
    """
    coords = (np.arange(grid) + 0.5) / grid
    shape = (grid,) * n
    total = grid**n
    sums = np.zeros(shape)
    for axis in range(n):
        idx = [None] * n
        idx[axis] = slice(None)
        sums = sums + coords[tuple(idx)]
    shifted = sums - psi
    slab = np.floor(shifted).astype(int).ravel()
    alive = (shifted != np.round(shifted)).ravel()
    uf = _UnionFind(total)
    flat = np.arange(total).reshape(shape)
    for axis in range(n):
        lo = flat.take(range(grid - 1), axis=axis).ravel()
        hi = flat.take(range(1, grid), axis=axis).ravel()
        keep = alive[lo] & alive[hi] & (slab[lo] == slab[hi])
        for a, b in zip(lo[keep].tolist(), hi[keep].tolist()):
            uf.union(a, b)
    roots = {uf.find(i) for i in np.flatnonzero(alive).tolist()}
    return len(roots)


def circle_component_count(n: int, psi: float = 0.3, brute_force: bool = False, grid: int = 20) -> int:
    """Number of path components of the open string configuration space of S^1.

    The closed form is n + 1.  With ``brute_force=True`` the regions are
    counted by lattice sampling instead.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 < psi < 1:
        raise ValueError("psi must lie in (0, 1): endpoints must be distinct")
    if brute_force:
        return count_cube_regions(n, psi, grid)
    return n + 1


__all__ = [
    "SphereTrajectory",
    "great_circle_frame",
    "trajectories_in_plane",
    "sphere_trajectories",
    "endpoints_at_angle",
    "count_cube_regions",
    "circle_component_count",
]
