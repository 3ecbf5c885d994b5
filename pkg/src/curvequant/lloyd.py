"""Curve-restricted Lloyd iteration, Newton refinement of cell boundaries, multistart driver."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from curvequant.curves import Curve
from curvequant.errors import QuantizationError
from curvequant.measure import ZERO_MASS, interval_moments
from curvequant.symmetry import hausdorff
from curvequant.voronoi import Partition, _piece_arrays, partition

# Lloyd hands over to Newton once the relative distortion change per sweep drops below these
HANDOFF_LADDER = (1e-4, 1e-6)
STEP_TOL = 1e-10
RESEED_SAMPLES = 1024
NEWTON_TOL = 1e-13
FD_STEP = 1e-7
MAX_HALVINGS = 30
TIE_TOL = 1e-10
DISTINCT_TOL = 1e-6


@dataclass
class SolveConfig:
    n: int
    restarts: int = 64
    max_iters: int = 10_000
    rel_tol: float = 1e-13
    seed: int = 0
    refine: bool = True
    threads: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class SolveResult:
    quantizer: np.ndarray
    distortion: float
    partition: Partition
    iterations: int
    converged: bool
    method: str
    restart_distortions: list = field(default_factory=list)
    optima: list = field(default_factory=list)
    seed: int | None = None

    @property
    def n(self) -> int:
        return len(self.quantizer)

    @property
    def boundary_params(self):
        return list(self.partition.boundary_params)


@dataclass
class Refinement:
    quantizer: np.ndarray
    boundaries: np.ndarray
    residual: float
    ok: bool
    singular: bool = False
    local_min: bool | None = None
    iterations: int = 0
    escape: np.ndarray | None = None  # start point off a saddle, when one was found


def cell_stats(curve: Curve, gens, part: Partition | None = None):
    """Per-generator (mass, first moment, distortion about the generator)."""
    gens = np.asarray(gens, dtype=float).reshape(-1, 2)
    if part is None:
        part = partition(curve, gens)
    n = len(gens)
    s, a, b, o = _piece_arrays(part.pieces)
    m, f, sec = interval_moments(curve, s, a, b, gens[o])
    M = np.zeros(n)
    F = np.zeros((n, 2))
    D = np.zeros(n)
    np.add.at(M, o, m)
    np.add.at(F, o, f)
    np.add.at(D, o, sec)
    return M, F, D


def distortion_of(curve: Curve, q) -> float:
    """Expected squared distance from a curve point to the nearest point of q."""
    _, _, D = cell_stats(curve, q)
    return float(D.sum())


def _centroids_or_reseed(curve: Curve, q, M, F):
    new = np.array(q, dtype=float, copy=True)
    ok = M > ZERO_MASS
    new[ok] = F[ok] / M[ok, None]
    empty = np.nonzero(~ok)[0]
    if len(empty):
        _reseed(curve, new, ok.copy(), empty)
    return new


def _reseed(curve: Curve, gens, active, empty):
    # move each empty generator to the worst-served sample point
    S = curve.n_segments
    u = (np.arange(RESEED_SAMPLES) + 0.5) / RESEED_SAMPLES * S
    pts = curve.point(u)
    seg, _ = curve.locate(u)
    dens = np.asarray(curve.densities)[seg]
    for i in empty:
        live = gens[active]
        if len(live):
            d = ((pts[:, None, :] - live[None, :, :]) ** 2).sum(-1).min(1)
        else:
            d = np.ones(len(pts))
        k = int(np.argmax(d * dens))
        gens[i] = pts[k]
        active[i] = True


def lloyd_step(curve: Curve, q, part: Partition | None = None) -> np.ndarray:
    """Move every generator to the centroid of its cell; empty cells are reseeded."""
    q = np.asarray(q, dtype=float).reshape(-1, 2)
    M, F, _ = cell_stats(curve, q, part)
    return _centroids_or_reseed(curve, q, M, F)


def lloyd(curve: Curve, q0, max_iters: int, rel_tol: float, step_tol: float = STEP_TOL):
    """Iterate Lloyd steps; returns (q, distortion, iterations, converged)."""
    q = np.asarray(q0, dtype=float).reshape(-1, 2)
    part = partition(curve, q)
    M, F, Dc = cell_stats(curve, q, part)
    D = float(Dc.sum())
    for it in range(1, max_iters + 1):
        q_new = _centroids_or_reseed(curve, q, M, F)
        move = float(np.abs(q_new - q).max())
        part = partition(curve, q_new)
        M, F, Dc = cell_stats(curve, q_new, part)
        D_new = float(Dc.sum())
        change = abs(D - D_new)
        q, D = q_new, D_new
        if change <= rel_tol * D and move <= step_tol:
            return q, D, it, True
    return q, D, max_iters, False


class _BoundarySystem:
    """Canonical residuals as functions of the cell-boundary positions.

    Boundaries live in the global curve parameter; the owner of each arc between
    consecutive boundaries is frozen from the starting partition.
    """

    def __init__(self, curve: Curve, part: Partition, n: int):
        self.curve = curve
        self.n = n
        self.S = curve.n_segments
        self.closed = curve.closed
        self.b0 = np.array([s + t for s, t in part.boundary_params], dtype=float)
        self.left = np.array([l for l, _ in part.switches], dtype=int)
        self.right = np.array([r for _, r in part.switches], dtype=int)
        if self.closed:
            self.owners = self.right.copy()
        else:
            self.owners = np.concatenate([[self.left[0]], self.right])

    def _edges(self, b):
        if self.closed:
            return np.concatenate([b, [b[0] + self.S]])
        return np.concatenate([[0.0], b, [float(self.S)]])

    def _pieces(self, edges):
        # cut the owner intervals at segment junctions
        inner = np.arange(math.floor(edges[0]) + 1.0, math.ceil(edges[-1]))
        cuts = np.union1d(edges, inner)
        lo, hi = cuts[:-1], cuts[1:]
        j = np.floor(lo)
        iv = np.searchsorted(edges, lo, side="right") - 1
        seg = np.mod(j, self.S).astype(int) if self.closed else np.minimum(j, self.S - 1).astype(int)
        return seg, lo - j, np.minimum(hi - j, 1.0), iv

    def cell_moments(self, b):
        """(mass, first moment) per generator, or None if the boundaries cross."""
        edges = self._edges(b)
        if np.any(np.diff(edges) <= 0.0):
            return None
        seg, t0, t1, iv = self._pieces(edges)
        m, f, _ = interval_moments(self.curve, seg, t0, t1, np.zeros((len(seg), 2)))
        own = self.owners[iv]
        M = np.zeros(self.n)
        F = np.zeros((self.n, 2))
        np.add.at(M, own, m)
        np.add.at(F, own, f)
        if np.any(M <= ZERO_MASS):
            return None
        return M, F

    def centroids(self, b):
        got = self.cell_moments(b)
        return None if got is None else got[1] / got[0][:, None]

    def _wrap(self, b):
        return np.mod(b, self.S) if self.closed else np.clip(b, 0.0, self.S)

    def points(self, b):
        return self.curve.point(self._wrap(b))

    def residual(self, b):
        c = self.centroids(b)
        if c is None:
            return None
        x = self.points(b)
        return ((x - c[self.left]) ** 2).sum(1) - ((x - c[self.right]) ** 2).sum(1)

    def jacobian(self, b):
        """Exact derivative of the residuals; each boundary moves the two cells it separates."""
        got = self.cell_moments(b)
        if got is None:
            return None
        M, F = got
        c = F / M[:, None]
        u = self._wrap(b)
        x = self.curve.point(u)
        T = self.curve.tangent(u)
        w = self.curve.weight(u)
        m = len(b)
        L, R = self.left, self.right
        cols = np.arange(m)
        # dC[o, j] = d c_o / d b_j; boundary j closes the left cell and opens the right one
        dC = np.zeros((self.n, m, 2))
        dC[L, cols] = (w / M[L])[:, None] * (x - c[L])
        dC[R, cols] = -(w / M[R])[:, None] * (x - c[R])
        J = -2.0 * np.einsum("id,ijd->ij", x - c[L], dC[L]) + 2.0 * np.einsum("id,ijd->ij", x - c[R], dC[R])
        J[cols, cols] += 2.0 * ((c[R] - c[L]) * T).sum(1)
        return J

    def jacobian_fd(self, b, h=FD_STEP):
        m = len(b)
        J = np.empty((m, m))
        for k in range(m):
            bp, bm = b.copy(), b.copy()
            bp[k] += h
            bm[k] -= h
            fp, fm = self.residual(bp), self.residual(bm)
            if fp is None or fm is None:
                return None
            J[:, k] = (fp - fm) / (2.0 * h)
        return J


def refine_canonical(curve: Curve, q, tol: float = NEWTON_TOL, max_newton: int = 50) -> Refinement:
    """Damped Newton on the canonical equations, unknowns = cell-boundary parameters."""
    q = np.asarray(q, dtype=float).reshape(-1, 2)
    part = partition(curve, q)
    if np.any(part.masses(curve) <= ZERO_MASS):
        return Refinement(q, np.zeros(0), math.inf, ok=False)
    if not part.boundary_params:
        M, F, _ = cell_stats(curve, q, part)
        return Refinement(F / M[:, None], np.zeros(0), 0.0, ok=True, local_min=True)
    system = _BoundarySystem(curve, part, len(q))
    b = system.b0.copy()
    F = system.residual(b)
    if F is None:
        return Refinement(q, b, math.inf, ok=False)
    norm = float(np.linalg.norm(F))
    it = 0
    J = None
    while float(np.abs(F).max()) >= tol and it < max_newton:
        it += 1
        J = system.jacobian(b)
        if J is None or not np.all(np.isfinite(J)) or np.linalg.cond(J) > 1e12:
            return Refinement(q, b, float(np.abs(F).max()), ok=False, singular=True, iterations=it)
        delta = np.linalg.solve(J, -F)
        lam = 1.0
        for _ in range(MAX_HALVINGS + 1):
            bn = b + lam * delta
            Fn = system.residual(bn)
            if Fn is not None and np.linalg.norm(Fn) < norm:
                break
            lam *= 0.5
        else:
            break
        b, F, norm = bn, Fn, float(np.linalg.norm(Fn))
    res = float(np.abs(F).max())
    if res >= tol:
        return Refinement(q, b, res, ok=False, iterations=it)
    if J is None:
        J = system.jacobian(b)
        if J is None:
            return Refinement(q, b, res, ok=False, iterations=it)
    # Hessian of the distortion in boundary coordinates is diag(weight) J at a root
    w = curve.weight(np.mod(b, system.S) if system.closed else b)
    H = w[:, None] * J
    eig, vec = np.linalg.eigh(0.5 * (H + H.T))
    local_min = bool(eig[0] > 1e-10 * max(1.0, np.abs(eig).max()))
    q_new = system.centroids(b)
    # the frozen ownership must still be the Voronoi ownership of the refined points
    if not _same_structure(partition(curve, q_new), system, b):
        return Refinement(q, b, res, ok=False, local_min=local_min, iterations=it)
    escape = None if local_min else _escape(curve, system, b, vec[:, 0])
    return Refinement(q_new, b, res, ok=True, local_min=local_min, iterations=it, escape=escape)


def _escape(curve: Curve, system: _BoundarySystem, b, v):
    """Generators after moving the boundaries off a saddle along negative curvature."""
    gap = float(np.diff(system._edges(b)).min())
    v = v / np.abs(v).max()
    best, best_D = None, math.inf
    for sign in (1.0, -1.0):
        c = system.centroids(b + sign * 0.25 * gap * v)
        if c is None:
            continue
        try:
            D = distortion_of(curve, c)
        except QuantizationError:
            continue
        if D < best_D:
            best, best_D = c, D
    return best


def _same_structure(check: Partition, system: _BoundarySystem, b, tol: float = 1e-8) -> bool:
    if len(check.boundary_params) != len(b):
        return False
    S = system.S
    got = np.array([s + t for s, t in check.boundary_params])
    for bk, l, r in zip(b, system.left, system.right):
        d = np.abs(got - bk)
        if system.closed:
            d = np.minimum(np.mod(d, S), S - np.mod(d, S))
        hits = [k for k in np.nonzero(d <= tol)[0] if check.switches[k] == (l, r)]
        if not hits:
            return False
    return True


def _arclength_table(curve: Curve, per_segment: int = 1024):
    us, ss = [0.0], [0.0]
    total = 0.0
    for j, seg in enumerate(curve.segments):
        t = np.linspace(0.0, 1.0, per_segment + 1)
        sp = seg.speed(t)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (sp[1:] + sp[:-1]) * np.diff(t))])
        us.extend((j + t[1:]).tolist())
        ss.extend((total + cum[1:]).tolist())
        total += cum[-1]
    return np.array(us), np.array(ss)


def seed_points(curve: Curve, n: int, restarts: int, rng: np.random.Generator):
    """Half evenly spaced by arc length with a random offset, half uniform random."""
    u_tab, s_tab = _arclength_table(curve)
    L = s_tab[-1]
    n_struct = (restarts + 1) // 2
    starts = []
    for r in range(restarts):
        if r < n_struct:
            s = (rng.random() + np.arange(n)) / n * L
        else:
            s = np.sort(rng.random(n)) * L
        starts.append(curve.point(np.interp(s, s_tab, u_tab)))
    return starts


@dataclass
class _Outcome:
    quantizer: np.ndarray
    distortion: float
    iterations: int
    converged: bool
    method: str


MAX_ESCAPES = 8


def _run_restart(curve: Curve, cfg: SolveConfig, q0) -> _Outcome:
    q, D, it = np.asarray(q0, dtype=float), math.inf, 0
    escapes = 0
    if cfg.refine:
        # try Newton early; keep iterating Lloyd only when the refinement is rejected
        stage = 0
        while stage < len(HANDOFF_LADDER) and it < cfg.max_iters:
            tol = HANDOFF_LADDER[stage]
            if tol <= cfg.rel_tol:
                break
            q, D, k, _ = lloyd(curve, q, cfg.max_iters - it, tol, step_tol=math.inf)
            it += k
            ref = refine_canonical(curve, q)
            if ref.ok and ref.local_min:
                D_ref = distortion_of(curve, ref.quantizer)
                if D_ref <= D * (1.0 + 1e-9) + 1e-15:
                    return _Outcome(ref.quantizer, D_ref, it, True, "lloyd+newton")
            if ref.escape is not None and escapes < MAX_ESCAPES:
                # restart the ladder from the far side of the saddle
                escapes += 1
                q, stage = ref.escape, 0
                continue
            stage += 1
    q, D, k, conv = lloyd(curve, q, max(1, cfg.max_iters - it), cfg.rel_tol)
    it += k
    if cfg.refine:
        ref = refine_canonical(curve, q)
        if ref.ok and ref.local_min:
            D_ref = distortion_of(curve, ref.quantizer)
            if D_ref <= D * (1.0 + 1e-9) + 1e-15:
                return _Outcome(ref.quantizer, D_ref, it, True, "lloyd+newton")
    return _Outcome(q, D, it, conv, "lloyd")


def solve(curve: Curve, cfg: SolveConfig) -> SolveResult:
    """Best of cfg.restarts Lloyd(+Newton) runs; deterministic for a given seed."""
    rng = np.random.default_rng(cfg.seed)
    starts = seed_points(curve, cfg.n, cfg.restarts, rng)
    run = partial(_run_restart, curve, cfg)
    if cfg.threads > 1 and cfg.restarts > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            outcomes = list(pool.map(run, starts))
    else:
        outcomes = [run(q0) for q0 in starts]
    best_i = min(range(len(outcomes)), key=lambda i: (outcomes[i].distortion, i))
    best = outcomes[best_i]
    optima = []
    for o in sorted(outcomes, key=lambda o: o.distortion):
        if o.distortion - best.distortion > TIE_TOL * max(1.0, best.distortion):
            break
        if all(hausdorff(o.quantizer, p) > DISTINCT_TOL for p in optima):
            optima.append(o.quantizer)
    return SolveResult(
        quantizer=best.quantizer,
        distortion=best.distortion,
        partition=partition(curve, best.quantizer),
        iterations=best.iterations,
        converged=best.converged,
        method=best.method,
        restart_distortions=[o.distortion for o in outcomes],
        optima=optima,
        seed=cfg.seed,
    )
