"""Symmetry groups of the built-in supports, for comparing optima up to congruence."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from curvequant.curves import Curve


def hausdorff(a, b) -> float:
    a = np.asarray(a, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).reshape(-1, 2)
    d = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(-1))
    return float(max(d.min(1).max(), d.min(0).max()))


def _rot(phi):
    c, s = math.cos(phi), math.sin(phi)
    return np.array([[c, -s], [s, c]])


def _refl(phi):
    """Reflection across the line through the origin at angle phi."""
    c, s = math.cos(2 * phi), math.sin(2 * phi)
    return np.array([[c, s], [s, -c]])


def _about(center, mats):
    c = np.asarray(center, dtype=float)
    return [(m, c - m @ c) for m in mats]


def symmetry_group(curve: Curve):
    """List of affine maps (matrix, offset) x -> M x + v preserving the distribution.

    Returns None for the full circle, whose group is continuous.
    """
    spec = curve.spec
    kind = spec.get("curve")
    ident = [(np.eye(2), np.zeros(2))]
    if kind in ("polygon", "hexagon"):
        verts = np.array([s.start for s in curve.segments])
        m = len(verts)
        center = verts.mean(0)
        v0 = verts[0] - center
        phi0 = math.atan2(v0[1], v0[0])
        mats = [_rot(2 * math.pi * k / m) for k in range(m)]
        mats += [_refl(phi0 + math.pi * k / m) for k in range(m)]
        return _about(center, mats)
    if kind == "arc":
        alpha, beta = spec["alpha"], spec["beta"]
        if abs(beta - alpha - 2 * math.pi) < 1e-12:
            return None
        return ident + [(_refl(0.5 * (alpha + beta)), np.zeros(2))]
    if kind == "semicircle":
        return ident + [(np.diag([-1.0, 1.0]), np.zeros(2))]
    if kind == "ellipse":
        return [(np.diag([sx, sy]), np.zeros(2)) for sx in (1.0, -1.0) for sy in (1.0, -1.0)]
    return ident


def match_up_to_symmetry(points, target, curve: Curve) -> float:
    """Smallest Hausdorff distance between target and any symmetry image of points."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    group = symmetry_group(curve)
    if group is None:
        return _match_circle(points, np.asarray(target, dtype=float).reshape(-1, 2))
    return min(hausdorff(points @ m.T + v, target) for m, v in group)


def _match_circle(points, target):
    best = math.inf
    for refl in (False, True):
        p = points * np.array([1.0, -1.0]) if refl else points
        a0 = math.atan2(p[0, 1], p[0, 0])
        for t in target:
            rot = _rot(math.atan2(t[1], t[0]) - a0)
            best = min(best, hausdorff(p @ rot.T, target))
    return best


def _coord_gap(a, b):
    cost = np.abs(a[:, None, :] - b[None, :, :]).max(-1)
    if len(a) != len(b):
        return math.inf
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def coordinate_error(points, target, curve: Curve) -> float:
    """Largest coordinate difference after pairing points with target, minimized over symmetries."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    target = np.asarray(target, dtype=float).reshape(-1, 2)
    group = symmetry_group(curve) or [(np.eye(2), np.zeros(2))]
    return min(_coord_gap(points @ m.T + v, target) for m, v in group)
