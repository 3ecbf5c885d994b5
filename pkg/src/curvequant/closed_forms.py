"""Exact optimal quantizers: hexagon with n = 6k, circular arcs, and the mixed semicircle."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from curvequant.curves import Curve, _half_angle_defect, build_hexagon, build_semicircle_mixed
from curvequant.errors import NoRoot
from curvequant.lloyd import SolveConfig, SolveResult, solve
from curvequant.voronoi import partition

SQRT3 = math.sqrt(3.0)
SQRT13 = math.sqrt(13.0)
HEX_CENTER = np.array([0.5, SQRT3 / 2])


def closed_form_result(curve: Curve, q, V: float) -> SolveResult:
    q = np.asarray(q, dtype=float)
    return SolveResult(
        quantizer=q,
        distortion=float(V),
        partition=partition(curve, q),
        iterations=0,
        converged=True,
        method="closed-form",
        optima=[q],
    )


# hexagon, n = 6k ------------------------------------------------------------


@dataclass(frozen=True)
class HexagonClosedForm:
    k: int
    r: float
    corner_points: np.ndarray  # (6, 2): a, b, c, d, e, f
    side_points: tuple  # six (k-1, 2) arrays, side OA1 first, counterclockwise
    V: float

    @property
    def n(self) -> int:
        return 6 * self.k

    @property
    def points(self) -> np.ndarray:
        return np.vstack([self.corner_points, *self.side_points])


def hexagon_r(k: int) -> float:
    K = k - 1
    return 2.0 * (SQRT13 * K - 4.0) / (13.0 * K * K - 16.0)


def hexagon_V(k: int) -> float:
    K = k - 1
    return 13.0 * (13.0 * K * K - 8.0 * SQRT13 * K + 16.0) / (12.0 * (16.0 - 13.0 * K * K) ** 2)


def _rotate_about_center(pts, i):
    phi = i * math.pi / 3.0
    c, s = math.cos(phi), math.sin(phi)
    R = np.array([[c, -s], [s, c]])
    return (pts - HEX_CENTER) @ R.T + HEX_CENTER


def hexagon_6k(k: int) -> HexagonClosedForm:
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    k = int(k)
    r = hexagon_r(k)
    h = SQRT3 * r / 8.0
    corners = np.array([
        (r / 8.0, h),
        (1.0 - r / 8.0, h),
        ((6.0 - r) / 4.0, SQRT3 / 2.0),
        (1.0 - r / 8.0, SQRT3 - h),
        (r / 8.0, SQRT3 - h),
        ((r - 2.0) / 4.0, SQRT3 / 2.0),
    ])
    if k >= 2:
        j = np.arange(1, k)
        gamma = np.column_stack([r + (2 * j - 1) / (2.0 * (k - 1)) * (1.0 - 2.0 * r), np.zeros(k - 1)])
    else:
        gamma = np.zeros((0, 2))
    sides = (gamma,) + tuple(_rotate_about_center(gamma, i) for i in range(1, 6))
    return HexagonClosedForm(k, r, corners, sides, hexagon_V(k))


def hexagon_optimal(k: int) -> SolveResult:
    cf = hexagon_6k(k)
    return closed_form_result(build_hexagon(), cf.points, cf.V)


# circular arcs ----------------------------------------------------------------


def arc_nmeans(alpha: float, beta: float, n: int):
    """Optimal n-means of the uniform distribution on the unit-circle arc [alpha, beta]."""
    if not (0.0 <= alpha < beta <= 2.0 * math.pi + 1e-15):
        raise ValueError(f"need 0 <= alpha < beta <= 2 pi, got ({alpha}, {beta})")
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    w = (beta - alpha) / n
    y = 0.5 * w
    sinc = math.sin(y) / y
    ang = alpha + (2 * np.arange(1, n + 1) - 1) * y
    pts = sinc * np.column_stack([np.cos(ang), np.sin(ang)])
    # 1 - sinc^2 = (1 - sinc)(1 + sinc), with 1 - sinc = (y - sin y) / y
    V = float(_half_angle_defect(y)) / y * (1.0 + sinc)
    return pts, V


# semicircle -------------------------------------------------------------------


def seq_a(n: int) -> int:
    """floor(n (sqrt 2 - 1)), exact in integer arithmetic."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    n = int(n)
    return math.isqrt(2 * n * n) - n


def _arc_centroid(b0, w):
    y = 0.5 * w
    g = math.sin(y) / y
    return g * math.cos(b0 + y), g * math.sin(b0 + y)


def semicircle_corner(a: float, b: float):
    den = math.pi * ((1.0 - a) / 4.0 + b / (2.0 * math.pi))
    r = (-math.pi * a * a + 4.0 * math.sin(b) + math.pi) / (8.0 * den)
    s = math.sin(0.5 * b) ** 2 / den
    return r, s


def _canonical(n, k, a, b):
    m = n - k - 2
    r, s = semicircle_corner(a, b)
    p = a - a / k
    e = (math.cos(b), math.sin(b))
    rx, ry = _arc_centroid(b, (math.pi - 2.0 * b) / m)
    f1 = (a - p) ** 2 - ((a - r) ** 2 + s * s)
    f2 = ((e[0] - r) ** 2 + (e[1] - s) ** 2) - ((e[0] - rx) ** 2 + (e[1] - ry) ** 2)
    return np.array([f1, f2])


def _inside(a, b):
    return 0.0 < a < 1.0 and 0.0 < b < 0.5 * math.pi


def _newton_ab(n, k, a, b, tol=1e-12, max_iter=100):
    x = np.array([a, b], dtype=float)
    F = _canonical(n, k, *x)
    for _ in range(max_iter):
        if np.abs(F).max() < 1e-16 * max(1.0, 1.0 / n**2):
            break
        ha, hb = 1e-7 * max(x[0], 1e-3), 1e-7 * max(x[1], 1e-3)
        J = np.empty((2, 2))
        J[:, 0] = (_canonical(n, k, x[0] + ha, x[1]) - _canonical(n, k, x[0] - ha, x[1])) / (2 * ha)
        J[:, 1] = (_canonical(n, k, x[0], x[1] + hb) - _canonical(n, k, x[0], x[1] - hb)) / (2 * hb)
        try:
            d = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            return None
        lam = 1.0
        for _ in range(40):
            xn = x + lam * d
            if _inside(*xn):
                Fn = _canonical(n, k, *xn)
                if np.linalg.norm(Fn) < np.linalg.norm(F):
                    break
            lam *= 0.5
        else:
            break
        step = np.abs(xn - x).max()
        x, F = xn, Fn
        if step < 1e-16:
            break
    if np.abs(F).max() < tol and _inside(*x):
        return float(x[0]), float(x[1])
    return None


def _bisect_ab(n, k, tol=1e-12):
    """Nested bracketing: a(b) from the first equation, then b from the second."""
    eps = 1e-12

    def a_of(b):
        f = lambda a: _canonical(n, k, a, b)[0]
        lo, hi = eps, 1.0 - eps
        if f(lo) * f(hi) > 0:
            return None
        return brentq(f, lo, hi, xtol=1e-15, rtol=1e-15)

    def g(b):
        a = a_of(b)
        return math.nan if a is None else _canonical(n, k, a, b)[1]

    grid = np.linspace(eps, 0.5 * math.pi - eps, 401)
    vals = [g(b) for b in grid]
    for i in range(len(grid) - 1):
        v0, v1 = vals[i], vals[i + 1]
        if math.isfinite(v0) and math.isfinite(v1) and v0 * v1 <= 0:
            b = brentq(g, grid[i], grid[i + 1], xtol=1e-15, rtol=1e-15)
            a = a_of(b)
            if a is not None and np.abs(_canonical(n, k, a, b)).max() < tol:
                return a, b
    return None


def _starts(n, k):
    m = n - k - 2
    lo, hi = 0.05, 0.5 * math.pi - 0.05
    yield k / n, min(max(0.5 * math.pi * (1.0 - m / n), lo), hi)
    # cell lengths scale like density^(-1/3) on each piece
    l1, l2 = 4.0 ** (1 / 3), (2.0 * math.pi) ** (1 / 3)
    c = (2.0 / l1 + math.pi / l2) / n
    a = min(max(0.5 * k * c * l1, 1e-3), 1.0 - 1e-3)
    b = min(max(0.5 * (math.pi - m * c * l2), 1e-4), 0.5 * math.pi - 1e-4)
    yield a, b


def _check_nk(n, k):
    if int(n) != n or n < 4:
        raise ValueError(f"the construction needs n >= 4, got {n}")
    if int(k) != k or not 1 <= k <= n - 3:
        raise ValueError(f"need 1 <= k <= n - 3, got k={k} for n={n}")


def semicircle_ab(n: int, k: int, start=None):
    """Solve the two canonical equations for the base half-width a and arc offset b."""
    _check_nk(n, k)
    n, k = int(n), int(k)
    starts = ([start] if start is not None else []) + list(_starts(n, k))
    for a0, b0 in starts:
        sol = _newton_ab(n, k, a0, b0)
        if sol is not None:
            return sol
    sol = _bisect_ab(n, k)
    if sol is None:
        raise NoRoot(f"no (a, b) solving the canonical system for n={n}, k={k}")
    return sol


def _semicircle_V_ab(n, k, a, b):
    m = n - k - 2
    base = a**3 / (6.0 * k * k)
    # each arc cell of angular width w contributes (w - 4 sin^2(w/2)/w) / (2 pi)
    w = (math.pi - 2.0 * b) / m
    y = 0.5 * w
    cell = 2.0 * float(_half_angle_defect(y)) * (w + 2.0 * math.sin(y)) / w
    arc = m * cell / (2.0 * math.pi)
    r, s = semicircle_corner(a, b)
    # corner cell: base piece [a, 1] (density 1/4) and arc piece [0, b] (density 1/(2 pi))
    L = 1.0 - a
    m1 = 0.25 * L
    c1 = (0.5 * (1.0 + a), 0.0)
    d1 = m1 * (L * L / 12.0 + (c1[0] - r) ** 2 + s * s)
    m2 = b / (2.0 * math.pi)
    gx, gy = _arc_centroid(0.0, b) if b > 0 else (1.0, 0.0)
    yb = 0.5 * b
    spread = 2.0 * float(_half_angle_defect(yb)) * (b + 2.0 * math.sin(yb)) / b if b > 0 else 0.0
    d2 = spread / (2.0 * math.pi) + m2 * ((gx - r) ** 2 + (gy - s) ** 2)
    return base + arc + 2.0 * (d1 + d2)


def semicircle_V_formula(n: int, k: int, a: float, b: float, uncorrected: bool = False) -> float:
    """Three-term closed expression for the error; loses digits to cancellation for large n.

    The arc term carries a factor (pi - 2b) from summing the per-cell integral over
    m cells. ``uncorrected=True`` leaves that factor out, for comparison with the
    variant of the expression that omits it.
    """
    m = n - k - 2
    pi = math.pi
    W = pi - 2 * b
    t1 = 4.0 * a**3 / k**2
    t2 = 12.0 * (2 * m * m * math.cos(W / m) + W**2 - 2 * m * m) / (pi * W**2)
    if not uncorrected:
        t2 *= W
    poly = (
        pi**2 * a**4 - 8 * pi * a**3 * b - 4 * pi**2 * a**3 + 24 * pi * (a * a - 1) * math.sin(b)
        + 6 * pi**2 * a**2 - 24 * pi * a * b - 4 * pi**2 * a + 48 * b * b + 32 * pi * b
        + 96 * math.cos(b) + pi**2 - 96
    )
    t3 = -poly / (pi * (pi * (a - 1) - 2 * b))
    return (t1 + t2 + t3) / 24.0


def semicircle_V(n: int, k: int) -> float:
    a, b = semicircle_ab(n, k)
    return _semicircle_V_ab(n, k, a, b)


@dataclass(frozen=True)
class SemicircleClosedForm:
    n: int
    k: int
    m: int
    a: float
    b: float
    corner: tuple
    V: float

    @property
    def points(self) -> np.ndarray:
        k, m, a, b = self.k, self.m, self.a, self.b
        j = np.arange(1, k + 1)
        base = np.column_stack([-a + (2 * j - 1) / k * a, np.zeros(k)])
        arc, _ = arc_nmeans(b, math.pi - b, m)
        r, s = self.corner
        return np.vstack([base, arc, [(r, s), (-r, s)]])


def semicircle_closed_form(n: int, k: int, start=None) -> SemicircleClosedForm:
    a, b = semicircle_ab(n, k, start)
    return SemicircleClosedForm(n, k, n - k - 2, a, b, semicircle_corner(a, b), _semicircle_V_ab(n, k, a, b))


def k_search(n: int) -> int:
    """Local search over the base-point count, seeded at a(n)."""
    if int(n) != n or n < 4:
        raise ValueError(f"k_search needs n >= 4, got {n}")
    n = int(n)
    k_max = n - 3
    sols = {}

    @lru_cache(maxsize=None)
    def V(k):
        near = [sols[j] for j in (k - 1, k + 1) if j in sols]
        try:
            cf = semicircle_closed_form(n, k, near[0] if near else None)
        except NoRoot:
            # no admissible configuration with this many base points
            return math.inf
        sols[k] = (cf.a, cf.b)
        return cf.V

    k = min(max(seq_a(n), 1), k_max)
    while True:
        if k == 1:
            break
        if V(k - 1) < V(k):
            k -= 1
            continue
        if k < k_max and V(k + 1) < V(k):
            # stepping up repeats until no neighbour improves
            k += 1
            continue
        break
    return k


def semicircle_optimal(n: int, k: int | None = None, **solve_kwargs) -> SolveResult:
    curve = build_semicircle_mixed()
    if n <= 3:
        return solve(curve, SolveConfig(n, **solve_kwargs))
    if k is None:
        k = k_search(n)
    cf = semicircle_closed_form(n, k)
    return closed_form_result(curve, cf.points, cf.V)
