"""Open string configurations on X and the negative perimeter functional.

A configuration is a chain ``A = x_0, x_1, ..., x_n, x_{n+1} = B`` with the
reflection points ``x_1..x_n`` free on the surface.  The functional is

    L(x) = -sum_{i=0}^{n} |x_i - x_{i+1}|

and its critical points are exactly the billiard trajectories from A to B
with n reflections.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (
    ON_SURFACE_TOL,
    GeometryError,
    SurfaceSpec,
    retract,
    retract_rows,
    tangent_frame,
)

# consecutive points closer than this make the derivatives unreliable
DISTINCT_TOL = 1e-9
# points handed in by callers (JSON, CLI) are checked against this looser bound
# and snapped onto X by retraction
INPUT_SURFACE_TOL = 1e-6


class ConfigurationError(ValueError):
    """Configuration outside the open string configuration space."""


@dataclass(frozen=True, eq=False)
class Configuration:
    surface: SurfaceSpec
    A: np.ndarray
    B: np.ndarray
    points: np.ndarray  # shape (n, m+1)

    def __post_init__(self):
        d = self.surface.dim
        A = np.asarray(self.A, dtype=float)
        B = np.asarray(self.B, dtype=float)
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(1, -1)
        if A.shape != (d,) or B.shape != (d,) or pts.ndim != 2 or pts.shape[1] != d:
            raise ConfigurationError(f"all points must lie in R^{d}")
        if pts.shape[0] < 1:
            raise ConfigurationError("need at least one reflection point")
        metric = self.surface.metric
        allp = np.vstack([A, B, pts])
        res = np.abs(allp * allp @ metric - 1.0)
        if np.any(res > INPUT_SURFACE_TOL):
            bad = int(np.argmax(res))
            raise ConfigurationError(f"point {allp[bad]} is off the surface (residual {res[bad]:.3g})")
        if np.any(res > ON_SURFACE_TOL):
            allp = np.array([retract(self.surface, p) if r > ON_SURFACE_TOL else p for p, r in zip(allp, res)])
        A, B, pts = allp[0].copy(), allp[1].copy(), allp[2:].copy()
        for arr in (A, B, pts):
            arr.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "points", pts)
        if np.linalg.norm(A - B) <= DISTINCT_TOL:
            raise ConfigurationError("endpoints A and B must be distinct")
        gaps = edge_lengths(self)
        if np.any(gaps <= DISTINCT_TOL):
            i = int(np.argmin(gaps))
            raise ConfigurationError(f"consecutive points {i} and {i + 1} coincide (distance {gaps[i]:.3g})")

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def chain(self) -> np.ndarray:
        """All n+2 points including the endpoints, shape (n+2, m+1)."""
        return np.vstack([self.A, self.points, self.B])

    def with_points(self, points) -> Configuration:
        return Configuration(self.surface, self.A, self.B, points)

    def to_json(self) -> dict:
        return {
            "A": self.A.tolist(),
            "B": self.B.tolist(),
            "points": self.points.tolist(),
        }

    @classmethod
    def from_json(cls, surface: SurfaceSpec, data: dict) -> Configuration:
        return cls(surface, np.array(data["A"]), np.array(data["B"]), np.array(data["points"]))


def edge_lengths(c: Configuration) -> np.ndarray:
    return np.linalg.norm(np.diff(c.chain, axis=0), axis=1)


def length_functional(c: Configuration) -> float:
    return -float(edge_lengths(c).sum())


def _edge_units(c: Configuration):
    diffs = np.diff(c.chain, axis=0)  # x_{i+1} - x_i, i = 0..n
    lengths = np.linalg.norm(diffs, axis=1)
    return diffs / lengths[:, None], lengths


def euclidean_gradient(c: Configuration) -> np.ndarray:
    """Ambient gradient of L with respect to each reflection point, shape (n, m+1)."""
    units, _ = _edge_units(c)
    # d|x_i - x_{i-1}|/dx_i = units[i-1]; d|x_{i+1} - x_i|/dx_i = -units[i]
    return -(units[:-1] - units[1:])


def bisector_sums(c: Configuration) -> np.ndarray:
    """unit(x_i - x_{i-1}) + unit(x_i - x_{i+1}) for each reflection point."""
    return -euclidean_gradient(c)


def riemannian_gradient(c: Configuration) -> np.ndarray:
    """Tangential part of the ambient gradient at each reflection point."""
    g = euclidean_gradient(c)
    nu = c.points * c.surface.metric
    nu /= np.linalg.norm(nu, axis=1)[:, None]
    return g - np.sum(nu * g, axis=1)[:, None] * nu


def reflection_residual(c: Configuration) -> float:
    """Largest tangential defect of the reflection law over all reflection points."""
    return float(np.linalg.norm(riemannian_gradient(c), axis=1).max())


def epsilon_product(c: Configuration) -> float:
    return float(np.prod(edge_lengths(c)))


def frames(c: Configuration) -> list[np.ndarray]:
    return [tangent_frame(c.surface, x) for x in c.points]


def frame_gradient(c: Configuration, fr=None) -> np.ndarray:
    """Riemannian gradient expressed in the tangent frames, flattened to length n*m."""
    fr = frames(c) if fr is None else fr
    g = euclidean_gradient(c)
    return np.concatenate([E.T @ g[i] for i, E in enumerate(fr)])


def chart_move(c: Configuration, xi, fr=None) -> Configuration:
    """Move each x_i to retract(x_i + E_i xi_i); the chart used by the Hessian and Newton."""
    fr = frames(c) if fr is None else fr
    m = c.surface.m
    xi = np.asarray(xi, dtype=float).reshape(c.n, m)
    raw = c.points + np.einsum("ijk,ik->ij", np.asarray(fr), xi)
    return c.with_points(retract_rows(c.surface, raw))


def chart_gradient(c: Configuration, xi, fr=None) -> np.ndarray:
    """Gradient of xi -> L(chart_move(c, xi)) at ``xi``.

    Equals ``frame_gradient(c)`` at xi = 0; used as the finite-difference
    reference for the Hessian.
    """
    fr = frames(c) if fr is None else fr
    moved = chart_move(c, xi, fr)
    g = euclidean_gradient(moved)
    m = c.surface.m
    xi = np.asarray(xi, dtype=float).reshape(c.n, m)
    metric = c.surface.metric
    out = []
    for i, (x, E) in enumerate(zip(c.points, fr)):
        p = x + E @ xi[i]
        rho = np.sqrt(np.dot(metric, p * p))
        # Jacobian of p -> p / rho(p)
        J = np.eye(len(p)) / rho - np.outer(p, metric * p) / rho**3
        out.append(E.T @ (J.T @ g[i]))
    return np.concatenate(out)


def _analytic_hessian(c: Configuration, fr) -> np.ndarray:
    n, m, d = c.n, c.surface.m, c.surface.dim
    units, lengths = _edge_units(c)
    eye = np.eye(d)
    # Hessian of -|e| for each edge e = x_{k+1} - x_k, k = 0..n
    K = [-(eye - np.outer(u, u)) / ell for u, ell in zip(units, lengths)]
    H_amb = np.zeros((n * d, n * d))
    for k in range(n + 1):
        a, b = k - 1, k  # free indices of x_k and x_{k+1} (x_0, x_{n+1} are fixed)
        if 0 <= a < n:
            H_amb[a * d:(a + 1) * d, a * d:(a + 1) * d] += K[k]
        if 0 <= b < n:
            H_amb[b * d:(b + 1) * d, b * d:(b + 1) * d] += K[k]
        if 0 <= a < n and 0 <= b < n:
            H_amb[a * d:(a + 1) * d, b * d:(b + 1) * d] -= K[k]
            H_amb[b * d:(b + 1) * d, a * d:(a + 1) * d] -= K[k]
    E_all = np.zeros((n * d, n * m))
    for i, E in enumerate(fr):
        E_all[i * d:(i + 1) * d, i * m:(i + 1) * m] = E
    H = E_all.T @ H_amb @ E_all
    # second-order term of the radial retraction: D^2R[t, s] = -(t^T M s) x
    g = euclidean_gradient(c)
    M = np.diag(c.surface.metric)
    for i, (x, E) in enumerate(zip(c.points, fr)):
        H[i * m:(i + 1) * m, i * m:(i + 1) * m] -= np.dot(g[i], x) * (E.T @ M @ E)
    return 0.5 * (H + H.T)


def _fd_hessian(c: Configuration, fr, h: float = 1e-5) -> np.ndarray:
    N = c.n * c.surface.m
    H = np.empty((N, N))
    for j in range(N):
        e = np.zeros(N)
        e[j] = h
        H[:, j] = (chart_gradient(c, e, fr) - chart_gradient(c, -e, fr)) / (2 * h)
    return 0.5 * (H + H.T)


def riemannian_hessian(c: Configuration, fr=None, method: str = "analytic") -> np.ndarray:
    """Second derivative of L along the retraction chart, in the tangent frames.

    ``method="fd"`` falls back to central differences of :func:`chart_gradient`.
    At critical points the result does not depend on the retraction.
    """
    fr = frames(c) if fr is None else fr
    if method == "analytic":
        return _analytic_hessian(c, fr)
    if method == "fd":
        return _fd_hessian(c, fr)
    raise ValueError(f"unknown Hessian method {method!r}")


def in_epsilon_domain(c: Configuration, eps: float) -> bool:
    return epsilon_product(c) >= eps


__all__ = [
    "Configuration",
    "ConfigurationError",
    "GeometryError",
    "DISTINCT_TOL",
    "length_functional",
    "riemannian_gradient",
    "riemannian_hessian",
    "reflection_residual",
    "epsilon_product",
    "frames",
    "frame_gradient",
    "chart_move",
    "chart_gradient",
    "euclidean_gradient",
    "bisector_sums",
    "edge_lengths",
    "in_epsilon_domain",
]
