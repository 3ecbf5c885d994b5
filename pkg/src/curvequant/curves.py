"""Planar supports: piecewise-parametric curves with per-segment uniform density.

Every segment is parametrized on t in [0, 1]. Densities are probability per unit
arc length, so the measure of a parameter interval is ``density * speed(t) dt``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from curvequant import quadrature

CLOSURE_TOL = 1e-12


def _half_angle_defect(h):
    """h - sin(h), accurate for small h."""
    h = np.asarray(h, dtype=float)
    small = np.abs(h) < 1e-2
    h2 = h * h
    series = h * h2 / 6.0 * (1.0 - h2 / 20.0 * (1.0 - h2 / 42.0 * (1.0 - h2 / 72.0)))
    return np.where(small, series, h - np.sin(h))


@dataclass(frozen=True)
class LineSegment:
    start: tuple[float, float]
    end: tuple[float, float]

    kind = "line"

    @property
    def length(self) -> float:
        return math.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1])

    def point(self, t):
        t = np.asarray(t, dtype=float)
        p0 = np.asarray(self.start)
        d = np.asarray(self.end) - p0
        return p0 + t[..., None] * d

    def point1(self, t: float) -> tuple[float, float]:
        (x0, y0), (x1, y1) = self.start, self.end
        return x0 + t * (x1 - x0), y0 + t * (y1 - y0)

    def speed(self, t):
        return np.full(np.shape(t), self.length)

    def tangent(self, t):
        """dx/dt."""
        d = np.asarray(self.end) - np.asarray(self.start)
        return np.broadcast_to(d, np.shape(t) + (2,)).copy()

    def moments(self, t0, t1, centers):
        """Arc-length moments over [t0, t1]: (length, first moment, second moment about centers)."""
        t0 = np.asarray(t0, dtype=float)
        dt = np.asarray(t1, dtype=float) - t0
        ell = self.length
        p0 = np.asarray(self.start)
        d = np.asarray(self.end) - p0
        a = p0 + t0[:, None] * d
        mass = ell * dt
        first = ell * (dt[:, None] * a + 0.5 * (dt * dt)[:, None] * d)
        w = a - centers
        second = ell * (
            (w * w).sum(1) * dt + (w @ d) * dt * dt + (d @ d) * dt**3 / 3.0
        )
        return mass, first, second


@dataclass(frozen=True)
class CircularArc:
    center: tuple[float, float]
    radius: float
    theta_start: float
    theta_end: float

    kind = "circular-arc"

    @property
    def sweep(self) -> float:
        return self.theta_end - self.theta_start

    @property
    def length(self) -> float:
        return self.radius * abs(self.sweep)

    def point(self, t):
        th = self.theta_start + np.asarray(t, dtype=float) * self.sweep
        c = np.asarray(self.center)
        return c + self.radius * np.stack([np.cos(th), np.sin(th)], axis=-1)

    def point1(self, t: float) -> tuple[float, float]:
        th = self.theta_start + t * self.sweep
        return (
            self.center[0] + self.radius * math.cos(th),
            self.center[1] + self.radius * math.sin(th),
        )

    def speed(self, t):
        return np.full(np.shape(t), self.length)

    def tangent(self, t):
        th = self.theta_start + np.asarray(t, dtype=float) * self.sweep
        k = self.radius * self.sweep
        return np.stack([-k * np.sin(th), k * np.cos(th)], axis=-1)

    def moments(self, t0, t1, centers):
        # about the chord midpoint direction, so small cells keep full precision
        t0 = np.asarray(t0, dtype=float)
        t1 = np.asarray(t1, dtype=float)
        R = self.radius
        c = np.asarray(self.center)
        tha = self.theta_start + t0 * self.sweep
        thb = self.theta_start + t1 * self.sweep
        h = 0.5 * np.abs(thb - tha)
        mid = 0.5 * (tha + thb)
        um = np.stack([np.cos(mid), np.sin(mid)], axis=-1)
        uperp = np.stack([-np.sin(mid), np.cos(mid)], axis=-1)
        sgn = np.sign(t1 - t0)
        mass = sgn * 2.0 * R * h
        first = sgn[:, None] * R * (2.0 * h[:, None] * c + 2.0 * R * np.sin(h)[:, None] * um)
        v = centers - c
        vpar = (v * um).sum(1)
        vperp = (v * uperp).sum(1)
        second = sgn * R * (
            2.0 * h * ((R - vpar) ** 2 + vperp**2) + 4.0 * R * vpar * _half_angle_defect(h)
        )
        return mass, first, second


@dataclass(frozen=True)
class EllipseArc:
    """Axis-aligned ellipse arc x = center + (a cos th, b sin th)."""

    center: tuple[float, float]
    semi_x: float
    semi_y: float
    theta_start: float
    theta_end: float
    quadrature: str = "gauss"

    kind = "ellipse-arc"

    @property
    def sweep(self) -> float:
        return self.theta_end - self.theta_start

    @property
    def length(self) -> float:
        m, _, _ = self.moments(np.array([0.0]), np.array([1.0]), np.zeros((1, 2)))
        return float(m[0])

    def point(self, t):
        th = self.theta_start + np.asarray(t, dtype=float) * self.sweep
        c = np.asarray(self.center)
        return c + np.stack([self.semi_x * np.cos(th), self.semi_y * np.sin(th)], axis=-1)

    def point1(self, t: float) -> tuple[float, float]:
        th = self.theta_start + t * self.sweep
        return (
            self.center[0] + self.semi_x * math.cos(th),
            self.center[1] + self.semi_y * math.sin(th),
        )

    def speed(self, t):
        th = self.theta_start + np.asarray(t, dtype=float) * self.sweep
        a, b = self.semi_x, self.semi_y
        return abs(self.sweep) * np.sqrt(a * a * np.sin(th) ** 2 + b * b * np.cos(th) ** 2)

    def tangent(self, t):
        th = self.theta_start + np.asarray(t, dtype=float) * self.sweep
        return self.sweep * np.stack([-self.semi_x * np.sin(th), self.semi_y * np.cos(th)], axis=-1)

    def _integrand(self, t, centers):
        """Stacked [speed, x speed, y speed, |x - c|^2 speed] at nodes t (rows)."""
        pts = self.point(t)
        sp = self.speed(t)
        diff = pts - centers
        return np.stack(
            [sp, pts[..., 0] * sp, pts[..., 1] * sp, (diff * diff).sum(-1) * sp], axis=-1
        )

    def moments(self, t0, t1, centers):
        t0 = np.asarray(t0, dtype=float)
        t1 = np.asarray(t1, dtype=float)
        centers = np.asarray(centers, dtype=float)
        if self.quadrature == "simpson":
            out = np.array(
                [
                    quadrature.adaptive_simpson(
                        lambda t, c=c: self._integrand(np.atleast_1d(t), c[None, :])[0],
                        lo,
                        hi,
                    )
                    for lo, hi, c in zip(t0, t1, centers)
                ]
            ).reshape(len(t0), 4)
        else:
            max_panel = (math.pi / 16.0) / abs(self.sweep)
            out = quadrature.gauss_panels(
                lambda t, idx: self._integrand(t, centers[idx]), t0, t1, max_panel
            )
        return out[:, 0], out[:, 1:3], out[:, 3]


Segment = LineSegment | CircularArc | EllipseArc


@dataclass(frozen=True)
class Curve:
    segments: tuple
    densities: tuple
    name: str = "custom"
    spec: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.segments) == 0:
            raise ValueError("curve needs at least one segment")
        if len(self.segments) != len(self.densities):
            raise ValueError("one density per segment required")

    @property
    def n_segments(self) -> int:
        return len(self.segments)

    @property
    def lengths(self) -> np.ndarray:
        return np.array([s.length for s in self.segments])

    @property
    def total_length(self) -> float:
        return float(self.lengths.sum())

    @property
    def closed(self) -> bool:
        a = self.segments[-1].point1(1.0)
        b = self.segments[0].point1(0.0)
        return math.hypot(a[0] - b[0], a[1] - b[1]) < CLOSURE_TOL

    def point_at(self, seg: int, t: float) -> np.ndarray:
        if not 0 <= seg < self.n_segments:
            raise IndexError(f"segment index {seg} out of range 0..{self.n_segments - 1}")
        return self.segments[seg].point(np.asarray(t, dtype=float))

    def locate(self, u):
        """Split global parameters u in [0, n_segments] into (segment, t)."""
        u = np.asarray(u, dtype=float)
        seg = np.clip(np.floor(u).astype(int), 0, self.n_segments - 1)
        return seg, u - seg

    def point(self, u):
        """Point at global parameter u (segment j covers [j, j + 1])."""
        seg, t = self.locate(np.atleast_1d(u))
        out = np.empty(seg.shape + (2,))
        for j in np.unique(seg):
            m = seg == j
            out[m] = self.segments[j].point(t[m])
        return out

    def tangent(self, u):
        """dx/du; at a junction the derivative of the segment starting there."""
        seg, t = self.locate(np.atleast_1d(u))
        out = np.empty(seg.shape + (2,))
        for j in np.unique(seg):
            m = seg == j
            out[m] = self.segments[j].tangent(t[m])
        return out

    @cached_property
    def line_table(self):
        """Per-segment (is_line, start, direction, length, density) arrays for batched moments."""
        S = self.n_segments
        is_line = np.zeros(S, bool)
        start = np.zeros((S, 2))
        direction = np.zeros((S, 2))
        length = np.zeros(S)
        for j, s in enumerate(self.segments):
            if s.kind == "line":
                is_line[j] = True
                start[j] = s.start
                direction[j] = np.subtract(s.end, s.start)
                length[j] = s.length
        return is_line, start, direction, length, np.asarray(self.densities, dtype=float)

    def point1(self, u: float) -> tuple[float, float]:
        j = min(int(math.floor(u)), self.n_segments - 1)
        j = max(j, 0)
        return self.segments[j].point1(u - j)

    def weight(self, u):
        """density * speed at global parameter u: probability per unit of u."""
        seg, t = self.locate(np.atleast_1d(u))
        out = np.empty(seg.shape)
        for j in np.unique(seg):
            m = seg == j
            out[m] = self.densities[j] * self.segments[j].speed(t[m])
        return out

    def scaled(self, factor: float) -> Curve:
        """Image under x -> factor * x, densities renormalized."""
        segs = []
        for s in self.segments:
            if isinstance(s, LineSegment):
                segs.append(LineSegment(_scale(s.start, factor), _scale(s.end, factor)))
            elif isinstance(s, CircularArc):
                segs.append(
                    CircularArc(_scale(s.center, factor), s.radius * factor, s.theta_start, s.theta_end)
                )
            else:
                segs.append(
                    EllipseArc(
                        _scale(s.center, factor),
                        s.semi_x * factor,
                        s.semi_y * factor,
                        s.theta_start,
                        s.theta_end,
                        s.quadrature,
                    )
                )
        return Curve(tuple(segs), tuple(d / factor for d in self.densities), self.name, self.spec)


def _scale(p, f):
    return (p[0] * f, p[1] * f)


def build_polygon(m: int, side: float = 1.0) -> Curve:
    """Regular m-gon traversed counterclockwise from the origin, first side along +x."""
    if int(m) != m or m < 3:
        raise ValueError(f"polygon needs m >= 3, got {m}")
    if not side > 0:
        raise ValueError(f"side must be positive, got {side}")
    m = int(m)
    verts = [(0.0, 0.0)]
    for i in range(1, m):
        x, y = verts[-1]
        ang = 2.0 * math.pi * (i - 1) / m
        verts.append((x + side * math.cos(ang), y + side * math.sin(ang)))
    # snap rounding noise so the hexagon vertices come out exact where representable
    verts = [(_snap(x), _snap(y)) for x, y in verts]
    segs = tuple(LineSegment(verts[i], verts[(i + 1) % m]) for i in range(m))
    dens = tuple(1.0 / (m * side) for _ in range(m))
    return Curve(segs, dens, name="polygon", spec={"curve": "polygon", "m": m, "side": side})


def _snap(v: float) -> float:
    r = round(v * 2) / 2
    if abs(v - r) < 1e-14:
        return r
    for k in (1, 2, 3):
        s = math.sqrt(3) * k / 2
        for cand in (s, -s):
            if abs(v - cand) < 1e-14:
                return cand
    return v


def build_hexagon() -> Curve:
    c = build_polygon(6, 1.0)
    return Curve(c.segments, c.densities, name="hexagon", spec={"curve": "hexagon"})


def build_circular_arc(alpha: float, beta: float) -> Curve:
    """Unit-circle arc from alpha to beta (counterclockwise), uniform."""
    if not (0.0 <= alpha < beta <= 2.0 * math.pi + 1e-15):
        raise ValueError(f"need 0 <= alpha < beta <= 2 pi, got ({alpha}, {beta})")
    seg = CircularArc((0.0, 0.0), 1.0, float(alpha), float(beta))
    return Curve(
        (seg,), (1.0 / (beta - alpha),), name="arc",
        spec={"curve": "arc", "alpha": float(alpha), "beta": float(beta)},
    )


def build_semicircle_mixed() -> Curve:
    """Half uniform on the base [-1, 1] x {0}, half uniform on the upper unit semicircle."""
    base = LineSegment((-1.0, 0.0), (1.0, 0.0))
    arc = CircularArc((0.0, 0.0), 1.0, 0.0, math.pi)
    return Curve((base, arc), (0.25, 1.0 / (2.0 * math.pi)), name="semicircle",
                 spec={"curve": "semicircle"})


def build_ellipse(semi_x: float = 2.0, semi_y: float = 1.0) -> Curve:
    """Uniform distribution on x1 = 2 cos th, x2 = sin th; length found by quadrature."""
    seg = EllipseArc((0.0, 0.0), semi_x, semi_y, 0.0, 2.0 * math.pi)
    length = quadrature.adaptive_simpson(lambda t: seg.speed(t), 0.0, 1.0, tol=1e-13)
    spec = {"curve": "ellipse"}
    if (semi_x, semi_y) != (2.0, 1.0):
        spec.update(a=semi_x, b=semi_y)
    return Curve((seg,), (1.0 / float(length),), name="ellipse", spec=spec)


def build_curve(spec: dict) -> Curve:
    """Build from a distribution spec such as {"curve": "polygon", "m": 6, "side": 1.0}."""
    kind = spec.get("curve")
    if kind == "hexagon":
        return build_hexagon()
    if kind == "polygon":
        return build_polygon(int(spec.get("m", 6)), float(spec.get("side", 1.0)))
    if kind == "arc":
        return build_circular_arc(float(spec.get("alpha", 0.0)), float(spec.get("beta", math.pi)))
    if kind in ("circle",):
        return build_circular_arc(0.0, 2.0 * math.pi)
    if kind == "semicircle":
        return build_semicircle_mixed()
    if kind == "ellipse":
        return build_ellipse(float(spec.get("a", 2.0)), float(spec.get("b", 1.0)))
    raise ValueError(f"unknown curve kind {kind!r}")
