"""Probability mass, conditional centroids and squared-distance integrals over arc sets."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from curvequant.curves import Curve
from curvequant.errors import ZeroMass

ZERO_MASS = 1e-15


@dataclass(frozen=True)
class ArcSet:
    """Ordered (segment, t_lo, t_hi) intervals; a measurable piece of a curve."""

    intervals: tuple = ()

    def __post_init__(self):
        object.__setattr__(
            self, "intervals", tuple((int(s), float(a), float(b)) for s, a, b in self.intervals)
        )
        for s, a, b in self.intervals:
            if not (0.0 <= a <= b <= 1.0):
                raise ValueError(f"bad interval ({s}, {a}, {b})")

    @classmethod
    def whole(cls, curve: Curve) -> ArcSet:
        return cls(tuple((j, 0.0, 1.0) for j in range(curve.n_segments)))

    @classmethod
    def between(cls, curve: Curve, u0: float, u1: float) -> ArcSet:
        """Global-parameter range [u0, u1]; wraps around on closed curves."""
        return cls(tuple(split_global(curve, u0, u1)))

    def __len__(self):
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)


def split_global(curve: Curve, u0: float, u1: float):
    """Cut a global-parameter range at segment junctions into (seg, t0, t1) pieces."""
    S = curve.n_segments
    if u1 < u0:
        raise ValueError("u1 < u0")
    if curve.closed:
        shift = math.floor(u0 / S) * S
        u0, u1 = u0 - shift, u1 - shift
        if u1 - u0 >= S:
            u1 = u0 + S
    else:
        u0, u1 = max(u0, 0.0), min(u1, float(S))
    out = []
    lo = u0
    while lo < u1:
        j = int(math.floor(lo))
        hi = min(u1, j + 1.0)
        jj = j % S
        a, b = lo - j, hi - j
        if b > a:
            out.append((jj, min(max(a, 0.0), 1.0), min(max(b, 0.0), 1.0)))
        lo = hi
    return out


@dataclass(frozen=True)
class MomentBundle:
    mass: float
    first_moment: np.ndarray
    central_second: float

    @property
    def centroid(self) -> np.ndarray:
        if self.mass <= ZERO_MASS:
            raise ZeroMass(f"mass {self.mass:g}")
        return self.first_moment / self.mass

    def second_moment_about(self, c) -> float:
        if self.mass <= ZERO_MASS:
            return 0.0
        return self.central_second + self.mass * sqdist(self.centroid, c)


def sqdist(a, b) -> float:
    return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


def interval_moments(curve: Curve, segs, t0, t1, centers):
    """Vectorized moments of many intervals, density applied.

    Returns (mass (k,), first (k, 2), second about centers[i] (k,)).
    """
    segs = np.asarray(segs, dtype=int)
    t0 = np.asarray(t0, dtype=float)
    t1 = np.asarray(t1, dtype=float)
    centers = np.asarray(centers, dtype=float).reshape(len(segs), 2)
    mass = np.zeros(len(segs))
    first = np.zeros((len(segs), 2))
    second = np.zeros(len(segs))
    if len(segs) == 0:
        return mass, first, second
    is_line, start, direction, length, dens = curve.line_table
    lm = is_line[segs]
    if lm.any():
        # every line interval at once: x(t) = p0 + t d, speed = length
        s_, a0, dt = segs[lm], t0[lm], t1[lm] - t0[lm]
        d = direction[s_]
        ell = length[s_] * dens[s_]
        a = start[s_] + a0[:, None] * d
        w = a - centers[lm]
        mass[lm] = ell * dt
        first[lm] = ell[:, None] * (dt[:, None] * a + 0.5 * (dt * dt)[:, None] * d)
        second[lm] = ell * (
            (w * w).sum(1) * dt + (w * d).sum(1) * dt * dt + (d * d).sum(1) * dt**3 / 3.0
        )
    for j in np.unique(segs[~lm]):
        m = segs == j
        ms, fs, ss = curve.segments[j].moments(t0[m], t1[m], centers[m])
        f = curve.densities[j]
        mass[m] = f * ms
        first[m] = f * fs
        second[m] = f * ss
    return mass, first, second


def _arrays(arcset: ArcSet):
    if len(arcset) == 0:
        return np.zeros(0, int), np.zeros(0), np.zeros(0)
    s, a, b = zip(*arcset.intervals)
    return np.array(s), np.array(a), np.array(b)


def mass(curve: Curve, arcset: ArcSet) -> float:
    s, a, b = _arrays(arcset)
    m, _, _ = interval_moments(curve, s, a, b, np.zeros((len(s), 2)))
    return float(m.sum())


def first_moment(curve: Curve, arcset: ArcSet) -> np.ndarray:
    s, a, b = _arrays(arcset)
    _, f, _ = interval_moments(curve, s, a, b, np.zeros((len(s), 2)))
    return f.sum(0)


def centroid(curve: Curve, arcset: ArcSet) -> np.ndarray:
    s, a, b = _arrays(arcset)
    m, f, _ = interval_moments(curve, s, a, b, np.zeros((len(s), 2)))
    total = m.sum()
    if total <= ZERO_MASS:
        raise ZeroMass(f"mass {total:g} over {arcset}")
    return f.sum(0) / total


def distortion(curve: Curve, arcset: ArcSet, c) -> float:
    """Integral of the squared distance to c over the set, w.r.t. the curve's probability."""
    s, a, b = _arrays(arcset)
    c = np.asarray(c, dtype=float)
    _, _, sec = interval_moments(curve, s, a, b, np.tile(c, (len(s), 1)))
    return float(sec.sum())


def moments(curve: Curve, arcset: ArcSet) -> MomentBundle:
    m = mass(curve, arcset)
    f = first_moment(curve, arcset)
    if m <= ZERO_MASS:
        return MomentBundle(m, f, 0.0)
    return MomentBundle(m, f, distortion(curve, arcset, f / m))
