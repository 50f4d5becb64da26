"""Pseudo-arclength continuation in sigma.

The unknown is ``u = (x_0..x_{m-1}, sigma)``.  Each step predicts along the
unit tangent and corrects with Newton on the bordered system
``{f^{(m)}(x, sigma) = 0, t . (u - u_pred) = 0}``, which stays regular through
folds in sigma.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FoldError, StallError
from .problem import QuadraticProblem, f_proj, jacobian, sigma_derivative


@dataclass(frozen=True)
class BranchPoint:
    sigma: float
    x: tuple
    tangent: tuple | None = None
    residual_norm: float = 0.0

    @property
    def u(self) -> np.ndarray:
        return np.append(np.asarray(self.x, dtype=float), self.sigma)

    def to_json(self) -> dict:
        return {"sigma": self.sigma, "x": list(self.x), "residual": self.residual_norm}

    @classmethod
    def from_json(cls, d: dict) -> BranchPoint:
        return cls(sigma=float(d["sigma"]), x=tuple(float(v) for v in d["x"]), residual_norm=float(d.get("residual", 0.0)))


def extended_jacobian(problem: QuadraticProblem, x, sigma: float) -> np.ndarray:
    m = len(x)
    p = problem.with_sigma(sigma)
    return np.column_stack([jacobian(p, x, m), sigma_derivative(x, m)])


def tangent(problem: QuadraticProblem, point: BranchPoint, previous=None, rank_tol: float = 1e-12) -> np.ndarray:
    """Unit null vector of ``[Df | df/dsigma]``, oriented along ``previous``.

    Without a previous direction the sigma component is made positive.
    """
    E = extended_jacobian(problem, np.asarray(point.x, dtype=float), point.sigma)
    _, sv, Vt = np.linalg.svd(E)
    if sv[-1] <= rank_tol * sv[0]:
        raise FoldError(f"extended Jacobian is rank deficient at sigma = {point.sigma}")
    t = Vt[-1]
    t = t / np.linalg.norm(t)
    if previous is not None:
        if np.dot(t, previous) < 0:
            t = -t
    elif t[-1] < 0 or (t[-1] == 0 and t[np.argmax(np.abs(t))] < 0):
        t = -t
    return t


def _corrector(problem: QuadraticProblem, u_pred: np.ndarray, t: np.ndarray, tol: float, max_iter: int):
    m = len(u_pred) - 1
    u = u_pred.copy()
    for _ in range(max_iter):
        x, sig = u[:m], u[m]
        p = problem.with_sigma(sig)
        F = f_proj(p, x, m)
        g = np.dot(t, u - u_pred)
        res = np.max(np.abs(F))
        if res <= tol and abs(g) <= 1e-12:
            return u, res
        J = np.vstack([extended_jacobian(problem, x, sig), t])
        try:
            du = np.linalg.solve(J, -np.append(F, g))
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(du)):
            return None
        u = u + du
    x, sig = u[:m], u[m]
    res = np.max(np.abs(f_proj(problem.with_sigma(sig), x, m)))
    if res <= tol:
        return u, res
    return None


def trace_branch(
    problem: QuadraticProblem,
    start: BranchPoint,
    steps: int,
    ds: float = 1e-3,
    ds_min: float | None = None,
    ds_max: float | None = None,
    tol: float = 1e-14,
    max_iter: int = 12,
    direction: int = 1,
) -> list[BranchPoint]:
    """Take ``steps`` continuation steps from ``start``; returns ``[start, ...]``.

    ``direction = -1`` starts along the reversed tangent.  The step halves on
    corrector failure and doubles after five consecutive successes, capped at
    ``ds_max`` (default: the initial ``ds``).
    """
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if ds <= 0:
        raise ValueError("ds must be positive")
    ds_min = ds * 2.0**-20 if ds_min is None else ds_min
    ds_max = ds if ds_max is None else ds_max
    m = len(start.x)
    t = start.tangent
    if t is None:
        t = tangent(problem, start)
    t = np.asarray(t, dtype=float) * (1 if direction >= 0 else -1)
    first = BranchPoint(start.sigma, tuple(start.x), tuple(t), start.residual_norm)
    points = [first]
    u = first.u
    h = ds
    streak = 0
    while len(points) <= steps:
        out = _corrector(problem, u + h * t, t, tol, max_iter)
        if out is None:
            h *= 0.5
            streak = 0
            if h < ds_min:
                raise StallError(f"step size fell below {ds_min:g} at sigma = {u[m]:.17g}", points=points)
            continue
        u_new, res = out
        pt = BranchPoint(float(u_new[m]), tuple(float(v) for v in u_new[:m]), None, float(res))
        t_new = tangent(problem, pt, previous=t)
        pt = BranchPoint(pt.sigma, pt.x, tuple(float(v) for v in t_new), pt.residual_norm)
        points.append(pt)
        u, t = u_new, t_new
        streak += 1
        if streak >= 5:
            h = min(2.0 * h, ds_max)
            streak = 0
    return points


def trace_both(problem: QuadraticProblem, start: BranchPoint, steps: int, ds: float = 1e-3, **kw) -> list[BranchPoint]:
    """Branch through ``start`` in both directions, ordered along the branch (negative side first)."""
    fwd = trace_branch(problem, start, steps, ds, direction=1, **kw)
    try:
        bwd = trace_branch(problem, start, steps, ds, direction=-1, **kw)
    except StallError as exc:
        exc.points = list(reversed(exc.points[1:])) + fwd
        raise
    return list(reversed(bwd[1:])) + fwd


def branch_to_json(problem: QuadraticProblem, points, m: int) -> dict:
    return {
        "problem": problem.to_json(),
        "m": m,
        "points": [p.to_json() for p in points],
    }


def branch_from_json(d: dict) -> tuple[dict, list[BranchPoint]]:
    return d["problem"], [BranchPoint.from_json(p) for p in d["points"]]
