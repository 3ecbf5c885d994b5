"""Quadrature rules for the non-polynomial (ellipse) moment integrals."""

from __future__ import annotations

import numpy as np

GAUSS_ORDER = 16
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(GAUSS_ORDER)


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-12, max_depth: int = 40):
    """Adaptive Simpson integral of f over [a, b]; f may return an array.

    Tolerance is absolute and is halved at each subdivision. Panels at max_depth
    are accepted as they stand.
    """
    if a == b:
        return np.zeros_like(np.asarray(f(a), dtype=float))
    fa, fb = np.asarray(f(a), dtype=float), np.asarray(f(b), dtype=float)
    m = 0.5 * (a + b)
    fm = np.asarray(f(m), dtype=float)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson_step(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = np.asarray(f(lm), dtype=float), np.asarray(f(rm), dtype=float)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or np.max(np.abs(delta)) <= 15.0 * tol:
        return left + right + delta / 15.0
    return _simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + _simpson_step(
        f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1
    )


def gauss_panels(f, t0, t1, max_panel: float):
    """Composite Gauss-Legendre over many intervals at once.

    Interval i is cut into ceil(|t1 - t0| / max_panel) equal panels. ``f(nodes, idx)``
    receives all nodes and the interval index of each, and returns an (N, k) array.
    Result has shape (len(t0), k).
    """
    t0 = np.asarray(t0, dtype=float)
    t1 = np.asarray(t1, dtype=float)
    width = t1 - t0
    npan = np.maximum(1, np.ceil(np.abs(width) / max_panel).astype(int))
    owner = np.repeat(np.arange(len(t0)), npan)
    # panel index within its interval
    starts = np.cumsum(npan) - npan
    local = np.arange(owner.size) - np.repeat(starts, npan)
    h = (width / npan)[owner]
    left = t0[owner] + local * h
    nodes = (left[:, None] + 0.5 * h[:, None] * (_NODES[None, :] + 1.0)).ravel()
    idx = np.repeat(owner, GAUSS_ORDER)
    vals = np.asarray(f(nodes, idx), dtype=float)
    wts = (0.5 * h[:, None] * _WEIGHTS[None, :]).ravel()
    panel_sums = vals * wts[:, None]
    out = np.zeros((len(t0), vals.shape[1]))
    np.add.at(out, idx, panel_sums)
    return out


def riemann_midpoint(f, a: float, b: float, n: int = 1_000_000):
    """Plain midpoint sum with n cells; the independent dense-grid oracle."""
    h = (b - a) / n
    t = a + h * (np.arange(n) + 0.5)
    return np.asarray(f(t)).sum(axis=0) * h


def gauss_fixed(f, a: float, b: float, panels: int = 64):
    """Composite Gauss-Legendre with a fixed panel count (scalar helper)."""
    h = (b - a) / panels
    total = 0.0
    for i in range(panels):
        lo = a + i * h
        x = lo + 0.5 * h * (_NODES + 1.0)
        total = total + 0.5 * h * np.tensordot(_WEIGHTS, np.asarray(f(x)), axes=(0, 0))
    return total

