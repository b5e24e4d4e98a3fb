"""Smallest enclosing balls.

The production solver runs farthest-point steps on the dual simplex
formulation with exact line search and away steps, which converges
linearly in any dimension.  An exact support-set enumeration oracle is
provided for low dimensions and used to cross-check the solver.
"""

from __future__ import annotations

import itertools

import numpy as np

__all__ = ["chebyshev_center", "minimal_ball_exact"]


def chebyshev_center(points, tol: float = 1e-9, max_iter: int = 100_000):
    """Center and radius of the smallest ball enclosing the points.

    Stops once the primal-dual radius gap falls below ``tol`` relative to
    the radius; the returned radius is the true covering radius of the
    returned center.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    count = pts.shape[0]
    if count == 0:
        raise ValueError("cannot enclose an empty point set")
    if count == 1:
        return pts[0].copy(), 0.0

    norms = np.einsum("ij,ij->i", pts, pts)
    weights = np.full(count, 1.0 / count)
    center = pts.mean(axis=0)

    for _ in range(max_iter):
        grad = norms - 2.0 * (pts @ center)           # |p_i - c|^2 - |c|^2
        radius_sq = float(grad.max() + center @ center)
        dual = float(weights @ norms - center @ center)
        gap = np.sqrt(max(radius_sq, 0.0)) - np.sqrt(max(dual, 0.0))
        if gap <= tol * max(1.0, np.sqrt(max(radius_sq, 0.0))):
            break
        towards = int(grad.argmax())
        active = np.flatnonzero(weights > 1e-15)
        away = int(active[grad[active].argmin()])
        mean_grad = float(weights @ grad)
        gain_towards = grad[towards] - mean_grad
        gain_away = mean_grad - grad[away]
        if gain_towards >= gain_away:
            direction = pts[towards] - center
            gain, cap = gain_towards, 1.0
            vertex, sign = towards, 1.0
        else:
            direction = center - pts[away]
            cap = weights[away] / (1.0 - weights[away]) if weights[away] < 1.0 else 1.0
            gain, vertex, sign = gain_away, away, -1.0
        denom = 2.0 * float(direction @ direction)
        if denom <= 0.0 or gain <= 0.0:
            break
        step = min(cap, gain / denom)
        if sign > 0:
            weights *= 1.0 - step
            weights[vertex] += step
            center = center + step * (pts[vertex] - center)
        else:
            weights *= 1.0 + step
            weights[vertex] -= step
            center = center + step * (center - pts[vertex])
        weights = np.clip(weights, 0.0, None)

    radius = float(np.sqrt(np.einsum("ij,ij->i", pts - center, pts - center).max()))
    return center, radius


def _equidistant_point(subset: np.ndarray):
    """Point of the affine hull equidistant from all subset points, or None."""
    base = subset[0]
    deltas = subset[1:] - base
    if deltas.shape[0] == 0:
        return base.copy()
    gram = deltas @ deltas.T
    rhs = 0.5 * np.einsum("ij,ij->i", deltas, deltas)
    try:
        coeffs = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        return None
    center = base + deltas.T @ coeffs
    dists = np.linalg.norm(subset - center, axis=1)
    if np.ptp(dists) > 1e-9 * (1.0 + dists.max()):
        return None
    return center


def minimal_ball_exact(points):
    """Exact smallest enclosing ball by support-set enumeration (d <= 3)."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    count, dim = pts.shape
    if count == 0:
        raise ValueError("cannot enclose an empty point set")
    if dim > 3:
        raise ValueError("exact oracle supports dimension <= 3")
    if count == 1:
        return pts[0].copy(), 0.0
    best = None
    for size in range(2, min(count, dim + 1) + 1):
        for subset in itertools.combinations(range(count), size):
            center = _equidistant_point(pts[list(subset)])
            if center is None:
                continue
            radius = float(np.linalg.norm(pts - center, axis=1).max())
            on_ball = float(np.linalg.norm(pts[subset[0]] - center))
            if radius > on_ball * (1 + 1e-9) + 1e-12:
                continue  # some point falls outside: not a covering support set
            if best is None or radius < best[1]:
                best = (center, radius)
    if best is None:
        raise RuntimeError("no valid support subset found")
    return best
