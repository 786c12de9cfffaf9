"""Multistart damped Newton search for critical points of the perimeter functional."""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .configspace import (
    Configuration,
    INPUT_SURFACE_TOL,
    ConfigurationError,
    chart_move,
    epsilon_product,
    frame_gradient,
    frames,
    length_functional,
    reflection_residual,
    riemannian_gradient,
    riemannian_hessian,
)
from .geometry import GeometryError, SurfaceSpec, retract, surface_residual

log = logging.getLogger(__name__)

# longest Newton step accepted in chart coordinates, per reflection point
MAX_STEP = 1.0


def lower_bound(m: int, n: int, generic: bool = False) -> int:
    """Guaranteed number of n-reflection trajectories between two distinct points.

    n + 1 for odd m or generic data, [(n+1)/2] + 1 otherwise.
    """
    if m < 1 or n < 1:
        raise ValueError("m and n must be >= 1")
    if generic or m % 2 == 1:
        return n + 1
    return (n + 1) // 2 + 1


@dataclass(frozen=True)
class SolveOptions:
    starts: int = 200
    seed: int = 0
    newton_tol: float = 1e-10
    max_iters: int = 60
    dedup_tol: float = 1e-6
    degenerate_eig_tol: float = 1e-8
    max_halvings: int = 30
    polish_steps: int = 3
    hessian: str = "analytic"
    threads: int | None = None

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError("starts must be >= 1")
        for name in ("newton_tol", "dedup_tol", "degenerate_eig_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True, eq=False)
class CriticalTrajectory:
    config: Configuration
    value: float
    residual: float
    morse_index: int
    min_abs_eig: float
    epsilon_product: float
    degenerate: bool
    iterations: int = 0

    def to_json(self) -> dict:
        return {
            "points": self.config.points.tolist(),
            "value": self.value,
            "residual": self.residual,
            "morse_index": self.morse_index,
            "min_abs_eig": self.min_abs_eig,
            "degenerate": self.degenerate,
            "epsilon_product": self.epsilon_product,
        }


@dataclass(frozen=True)
class NewtonFailure:
    reason: str  # "collision", "max_iters", "stalled", "invalid"
    iterations: int = 0
    detail: str = ""


@dataclass
class SolveResult:
    surface: SurfaceSpec
    A: np.ndarray
    B: np.ndarray
    n: int
    trajectories: list[CriticalTrajectory]
    failures: dict[str, int] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    degenerate_eig_tol: float = 1e-8

    @property
    def count(self) -> int:
        return len(self.trajectories)

    @property
    def generic(self) -> bool:
        """Every trajectory found is a nondegenerate (Morse) critical point."""
        return bool(self.trajectories) and all(
            t.min_abs_eig > self.degenerate_eig_tol for t in self.trajectories
        )

    @property
    def min_epsilon_product(self) -> float | None:
        if not self.trajectories:
            return None
        return min(t.epsilon_product for t in self.trajectories)


def classify(c: Configuration, eig_tol: float = 1e-8, hessian: str = "analytic"):
    """Morse data (index, smallest |eigenvalue|, degenerate flag) of a critical configuration."""
    eig = np.linalg.eigvalsh(riemannian_hessian(c, method=hessian))
    index = int(np.sum(eig < -eig_tol))
    min_abs = float(np.abs(eig).min())
    return index, min_abs, bool(min_abs <= eig_tol)


def morse_index(t: CriticalTrajectory, eig_tol: float | None = None) -> tuple[int, bool]:
    """Recompute the Morse index of ``t``; returns ``(index, degenerate)``."""
    tol = 1e-8 if eig_tol is None else eig_tol
    index, _, degenerate = classify(t.config, tol)
    return index, degenerate


def _make_trajectory(c: Configuration, opts: SolveOptions, iterations: int) -> CriticalTrajectory:
    index, min_abs, degenerate = classify(c, opts.degenerate_eig_tol, opts.hessian)
    return CriticalTrajectory(
        config=c,
        value=length_functional(c),
        residual=reflection_residual(c),
        morse_index=index,
        min_abs_eig=min_abs,
        epsilon_product=epsilon_product(c),
        degenerate=degenerate,
        iterations=iterations,
    )


def newton_refine(start, opts: SolveOptions | None = None):
    """Damped Newton iteration on the gradient of L, kept on X by retraction.

    ``start`` is a Configuration or raw ``(surface, A, B, points)`` data.
    Returns a :class:`CriticalTrajectory` when the reflection residual drops
    below ``opts.newton_tol`` and a :class:`NewtonFailure` otherwise; bad
    iterates are reported, never raised.
    """
    opts = opts or SolveOptions()
    if isinstance(start, Configuration):
        c = start
    else:
        try:
            c = Configuration(*start)
        except ConfigurationError as exc:
            reason = "collision" if "coincide" in str(exc) else "invalid"
            return NewtonFailure(reason, 0, str(exc))

    it = 0
    polishing = 0
    while True:
        try:
            fr = frames(c)
            g = frame_gradient(c, fr)
        except GeometryError as exc:
            return NewtonFailure("invalid", it, str(exc))
        converged = reflection_residual(c) <= opts.newton_tol
        if converged and polishing >= opts.polish_steps:
            return _make_trajectory(c, opts, it)
        if it >= opts.max_iters:
            if converged:
                return _make_trajectory(c, opts, it)
            return NewtonFailure("max_iters", it, f"residual {reflection_residual(c):.3g}")
        step = _newton_step(c, fr, g, opts)
        if step is None:
            if converged:
                return _make_trajectory(c, opts, it)
            return NewtonFailure("stalled", it, "non-finite Newton step")
        nxt, collided = _damped_move(c, fr, step, np.linalg.norm(g), opts)
        if nxt is None:
            if converged:
                # round-off floor reached while polishing
                return _make_trajectory(c, opts, it)
            reason = "collision" if collided else "stalled"
            return NewtonFailure(reason, it, "no step decreased the residual")
        c = nxt
        it += 1
        if converged:
            polishing += 1


def _newton_step(c: Configuration, fr, g, opts: SolveOptions):
    H = riemannian_hessian(c, fr, method=opts.hessian)
    try:
        step = np.linalg.solve(H, -g)
    except np.linalg.LinAlgError:
        step = np.linalg.lstsq(H, -g, rcond=None)[0]
    if not np.all(np.isfinite(step)):
        return None
    longest = np.linalg.norm(step.reshape(c.n, c.surface.m), axis=1).max()
    if longest > MAX_STEP:
        step *= MAX_STEP / longest
    return step


def _damped_move(c: Configuration, fr, step, g_norm: float, opts: SolveOptions):
    """Halve the step until the gradient norm decreases; returns (configuration or None, collided)."""
    t = 1.0
    collided = False
    for _ in range(opts.max_halvings + 1):
        try:
            trial = chart_move(c, t * step, fr)
        except ConfigurationError:
            collided = True
            t *= 0.5
            continue
        # frames are orthonormal, so this equals the norm of the frame gradient
        if np.linalg.norm(riemannian_gradient(trial)) < g_norm:
            return trial, collided
        t *= 0.5
    return None, collided


def _plane_basis(A, B):
    e1 = A / np.linalg.norm(A)
    w = B - np.dot(B, e1) * e1
    if np.linalg.norm(w) < 1e-12:
        w = np.zeros_like(e1)
        w[int(np.argmin(np.abs(e1)))] = 1.0
        w -= np.dot(w, e1) * e1
    e2 = w / np.linalg.norm(w)
    phi = math.atan2(float(np.dot(B, e2)), float(np.dot(B, e1)))
    return e1, e2, phi


def initial_points(surface: SurfaceSpec, A, B, n: int, rng: np.random.Generator, planar: bool) -> np.ndarray:
    """One multistart seed.

    Planar seeds put the points at equal angular steps (phi + 2 pi k)/(n+1)
    on a slightly tilted plane through A and the centre; the others are
    uniform random directions retracted onto X.
    """
    d = surface.dim
    if not planar:
        return np.array([retract(surface, rng.normal(size=d)) for _ in range(n)])
    e1, e2, phi = _plane_basis(np.asarray(A, float), np.asarray(B, float))
    r = rng.normal(size=d)
    r -= np.dot(r, e1) * e1 + np.dot(r, e2) * e2
    if np.linalg.norm(r) > 1e-12:
        tilt = abs(rng.normal(scale=0.25))
        e2 = e2 + tilt * r / np.linalg.norm(r)
        e2 /= np.linalg.norm(e2)
    k = int(rng.integers(0, n + 1))
    if phi <= 0:
        phi += 2 * math.pi
    alpha = (phi + 2 * math.pi * k) / (n + 1)
    alpha *= 1 + rng.normal(scale=0.05)
    angles = alpha * np.arange(1, n + 1) + rng.normal(scale=0.02, size=n)
    return np.array([retract(surface, math.cos(a) * e1 + math.sin(a) * e2) for a in angles])


def _run_start(surface, A, B, n, opts: SolveOptions, index: int):
    rng = np.random.default_rng([opts.seed, index])
    planar = index % 2 == 0
    pts = initial_points(surface, A, B, n, rng, planar)
    return newton_refine((surface, A, B, pts), opts)


def _max_coord_distance(a: CriticalTrajectory, b: CriticalTrajectory) -> float:
    return float(np.abs(a.config.points - b.config.points).max())


def deduplicate(trajectories, tol: float = 1e-6) -> list[CriticalTrajectory]:
    """Keep one representative per cluster of trajectories within ``tol`` (max coordinate distance).

    Candidates are visited in a canonical order so the surviving set does not
    depend on the input order.
    """
    ordered = sorted(trajectories, key=lambda t: (round(t.value, 9), tuple(np.round(t.config.points.ravel(), 9))))
    kept: list[CriticalTrajectory] = []
    for t in ordered:
        if all(_max_coord_distance(t, k) > tol for k in kept):
            kept.append(t)
    return kept


def _thread_count(opts: SolveOptions) -> int:
    if opts.threads is not None:
        return max(1, opts.threads)
    env = os.environ.get("BILLIARDS_THREADS")
    return max(1, int(env)) if env else 1


def find_critical_points(surface: SurfaceSpec, A, B, n: int, opts: SolveOptions | None = None) -> SolveResult:
    """Multistart search for billiard trajectories from A to B with n reflections.

    Each start draws from its own RNG stream keyed by ``(seed, start index)``,
    so serial and threaded runs return identical lists.
    """
    opts = opts or SolveOptions()
    A, B = (np.asarray(P, dtype=float) for P in (A, B))
    for name, P in (("A", A), ("B", B)):
        if P.shape != (surface.dim,) or abs(surface_residual(surface, P)) > INPUT_SURFACE_TOL:
            raise ConfigurationError(f"endpoint {name} = {P.tolist()} is not on the surface")
    A, B = retract(surface, A), retract(surface, B)
    if np.linalg.norm(A - B) <= 1e-9:
        raise ConfigurationError("A and B must be distinct")
    if n < 1:
        raise ValueError("n must be >= 1")

    work = lambda i: _run_start(surface, A, B, n, opts, i)
    threads = _thread_count(opts)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(work, range(opts.starts)))
    else:
        outcomes = [work(i) for i in range(opts.starts)]

    found = [o for o in outcomes if isinstance(o, CriticalTrajectory)]
    failures: dict[str, int] = {}
    for o in outcomes:
        if isinstance(o, NewtonFailure):
            failures[o.reason] = failures.get(o.reason, 0) + 1

    unique = deduplicate(found, opts.dedup_tol)
    unique.sort(key=lambda t: (t.value, tuple(t.config.points.ravel())))
    result = SolveResult(surface, A, B, n, unique, failures, degenerate_eig_tol=opts.degenerate_eig_tol)
    if not unique:
        msg = f"no start converged ({opts.starts} starts, failures {failures})"
        log.warning(msg)
        result.warnings.append(msg)
    return result


def count_verdict(count: int, m: int, n: int, generic: bool = False) -> dict:
    """A count below the bound signals an insufficient search, not a counterexample."""
    bound = lower_bound(m, n, generic)
    return {"count": count, "bound": bound, "generic": generic, "passed": count >= bound}


def verify_count(result: SolveResult, m: int | None = None, n: int | None = None) -> dict:
    """Compare the number of trajectories found against the guaranteed lower bound."""
    m = result.surface.m if m is None else m
    n = result.n if n is None else n
    return count_verdict(result.count, m, n, result.generic)


def result_to_json(result: SolveResult) -> dict:
    verdict = verify_count(result)
    return {
        "surface": result.surface.to_json(),
        "A": result.A.tolist(),
        "B": result.B.tolist(),
        "n": result.n,
        "count": result.count,
        "bound": verdict["bound"],
        "generic": result.generic,
        "passed": verdict["passed"],
        "min_epsilon_product": result.min_epsilon_product,
        "failures": dict(sorted(result.failures.items())),
        "warnings": list(result.warnings),
        "trajectories": [t.to_json() for t in result.trajectories],
    }
