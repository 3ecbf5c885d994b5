"""Voronoi partitions of a generator set restricted to a curve.

Cell boundaries are the curve points equidistant from two generators. They are
found by a uniform scan for ownership changes followed by bisection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.spatial import cKDTree

from curvequant.curves import Curve
from curvequant.errors import DuplicateGenerators
from curvequant.measure import ArcSet, interval_moments

SCAN_SAMPLES = 512
PARAM_TOL = 1e-13
MIN_SEPARATION = 1e-12


@dataclass(frozen=True)
class Piece:
    seg: int
    t0: float
    t1: float
    owner: int


@dataclass(frozen=True)
class Partition:
    cells: tuple  # (generator index, ArcSet), one per generator, in generator order
    boundary_params: tuple  # (segment, t) where ownership switches, traversal order
    pieces: tuple  # maximal single-owner intervals in traversal order
    switches: tuple  # (left owner, right owner) per boundary

    def cell(self, i: int) -> ArcSet:
        return self.cells[i][1]

    def masses(self, curve: Curve) -> np.ndarray:
        out = np.zeros(len(self.cells))
        if not self.pieces:
            return out
        s, a, b, o = _piece_arrays(self.pieces)
        m, _, _ = interval_moments(curve, s, a, b, np.zeros((len(s), 2)))
        np.add.at(out, o, m)
        return out


def _piece_arrays(pieces):
    s = np.fromiter((p.seg for p in pieces), int, len(pieces))
    a = np.fromiter((p.t0 for p in pieces), float, len(pieces))
    b = np.fromiter((p.t1 for p in pieces), float, len(pieces))
    o = np.fromiter((p.owner for p in pieces), int, len(pieces))
    return s, a, b, o


def check_distinct(gens: np.ndarray):
    if len(gens) < 2:
        return
    pairs = cKDTree(gens).query_pairs(MIN_SEPARATION)
    if pairs:
        i, j = min(pairs)
        gap = float(np.hypot(*(gens[i] - gens[j])))
        raise DuplicateGenerators(f"generators {i} and {j} coincide ({gap:.3g} apart)")


def _owner(gens, x, y) -> int:
    d = (gens[:, 0] - x) ** 2 + (gens[:, 1] - y) ** 2
    return int(np.argmin(d))


def _bisect_pair(seg, p, q, lo, hi, tol=PARAM_TOL):
    """Root of |x(t)-p|^2 - |x(t)-q|^2 in [lo, hi]; sign(g(lo)) != sign(g(hi)) assumed."""
    px, py = p
    qx, qy = q

    def g(t):
        x, y = seg.point1(t)
        return (x - px) ** 2 + (y - py) ** 2 - (x - qx) ** 2 - (y - qy) ** 2

    glo, ghi = g(lo), g(hi)
    if glo == 0.0:
        return lo
    if ghi == 0.0:
        return hi
    if (glo < 0.0) == (ghi < 0.0):
        # the root sits on a sample point and rounding hid the sign change
        return lo if abs(glo) <= abs(ghi) else hi
    return brentq(g, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=200)


def _locate_switches(seg, gens, lo, olo, hi, ohi, tol=PARAM_TOL):
    """All ownership switches in (lo, hi) given owners at both ends."""
    if olo == ohi:
        return []
    t = _bisect_pair(seg, gens[olo], gens[ohi], lo, hi, tol)
    x, y = seg.point1(t)
    d = (gens[:, 0] - x) ** 2 + (gens[:, 1] - y) ** 2
    dpair = min(d[olo], d[ohi])
    if d.min() >= dpair - 1e-14 * max(1.0, dpair):
        return [(t, olo, ohi)]
    # a third generator owns part of the bracket: split on ownership instead
    out = []
    stack = [(lo, olo, hi, ohi)]
    while stack:
        a, oa, b, ob = stack.pop()
        if oa == ob:
            continue
        if b - a <= tol:
            out.append((0.5 * (a + b), oa, ob))
            continue
        m = 0.5 * (a + b)
        om = _owner(gens, *seg.point1(m))
        if om == oa:
            stack.append((m, om, b, ob))
        elif om == ob:
            stack.append((a, oa, m, om))
        else:
            stack.append((m, om, b, ob))
            stack.append((a, oa, m, om))
    out.sort()
    return out


_SCAN_CACHE: dict = {}


def _scan_points(curve: Curve, samples: int) -> np.ndarray:
    key = (id(curve), samples)
    hit = _SCAN_CACHE.get(key)
    if hit is not None and hit[0] is curve:
        return hit[1]
    grid = np.linspace(0.0, 1.0, samples + 1)
    pts = np.vstack([seg.point(grid) for seg in curve.segments])
    if len(_SCAN_CACHE) >= 16:
        _SCAN_CACHE.clear()
    _SCAN_CACHE[key] = (curve, pts)
    return pts


def partition(curve: Curve, gens, samples: int = SCAN_SAMPLES) -> Partition:
    """Assign every curve point to its nearest generator (ties to the lower index)."""
    gens = np.asarray(gens, dtype=float).reshape(-1, 2)
    if len(gens) == 0:
        raise ValueError("need at least one generator")
    check_distinct(gens)
    pieces = []
    bparams = []
    switches = []
    grid = np.linspace(0.0, 1.0, samples + 1)
    pts_all = _scan_points(curve, samples)
    # |x - c|^2 up to the per-sample constant |x|^2, for every sample of every segment
    score = (gens * gens).sum(1) - 2.0 * (pts_all @ gens.T)
    own_all = score.argmin(1).reshape(curve.n_segments, samples + 1)
    for j, seg in enumerate(curve.segments):
        own = own_all[j]
        cuts = []
        for i in np.nonzero(own[1:] != own[:-1])[0]:
            cuts.extend(_locate_switches(seg, gens, grid[i], own[i], grid[i + 1], own[i + 1]))
        start, cur = 0.0, int(own[0])
        for t, a, b in cuts:
            t, a, b = float(t), int(a), int(b)
            if t > start:
                pieces.append(Piece(j, start, t, cur))
            bparams.append((j, t))
            switches.append((a, b))
            start, cur = t, b
        pieces.append(Piece(j, start, 1.0, cur))
        # ownership can also flip exactly at a junction between segments
        if j + 1 < curve.n_segments:
            # same tie rule as the scan, so a vertex tie is not counted twice
            o_next = int(own_all[j + 1][0])
            if o_next != cur:
                bparams.append((j, 1.0))
                switches.append((cur, o_next))
    by_owner = [[] for _ in range(len(gens))]
    for p in pieces:
        by_owner[p.owner].append((p.seg, p.t0, p.t1))
    cells = [(i, ArcSet(tuple(iv))) for i, iv in enumerate(by_owner)]
    return Partition(tuple(cells), tuple(bparams), tuple(pieces), tuple(switches))


def boundary_roots(curve: Curve, p, q, samples: int = SCAN_SAMPLES, tol: float = PARAM_TOL):
    """Crossings of rho(x(t), p) - rho(x(t), q) = 0 along the curve.

    Returns (segment, t, direction) with direction +1 where q becomes the nearer point.
    """
    p = (float(p[0]), float(p[1]))
    q = (float(q[0]), float(q[1]))
    pv, qv = np.asarray(p), np.asarray(q)
    grid = np.linspace(0.0, 1.0, samples + 1)
    out = []
    for j, seg in enumerate(curve.segments):
        pts = seg.point(grid)
        g = ((pts - pv) ** 2).sum(1) - ((pts - qv) ** 2).sum(1)
        sg = np.sign(g)
        prev_i = None
        for i in range(len(grid)):
            if sg[i] == 0:
                continue
            if prev_i is not None and sg[prev_i] != sg[i]:
                if i - prev_i > 1:
                    # exact zero(s) on the grid between the two signed samples
                    t = grid[prev_i + 1]
                else:
                    t = _bisect_pair(seg, p, q, grid[prev_i], grid[i], tol)
                out.append((j, float(t), int(sg[i])))
            prev_i = i
    # a root at a shared junction shows up once per adjacent segment
    dedup = []
    for r in out:
        if dedup and r[1] == 0.0 and dedup[-1][0] == r[0] - 1 and dedup[-1][1] == 1.0:
            continue
        dedup.append(r)
    return dedup
