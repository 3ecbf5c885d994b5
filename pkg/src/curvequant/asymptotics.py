"""Quantization dimension and coefficient estimates from sequences of optimal errors."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from curvequant import closed_forms as cf
from curvequant.curves import Curve, build_polygon
from curvequant.lloyd import SolveConfig, solve

METHODS = ("auto", "closed-form", "lloyd")


@dataclass(frozen=True)
class ScanRow:
    n: int
    V_n: float
    dim_est: float
    coeff_est: float
    method: str

    def __post_init__(self):
        if not self.V_n > 0:
            raise ValueError(f"V_n must be positive, got {self.V_n}")


def dim_est(n: int, V: float) -> float:
    if n == 1:
        # log n = 0; V_1 is the variance and may equal 1 (unit circle), giving 0/0
        return 0.0
    return 2.0 * math.log(n) / -math.log(V)


def coeff_est(n: int, V: float) -> float:
    return n * n * V


def make_row(n: int, V: float, method: str) -> ScanRow:
    return ScanRow(int(n), float(V), dim_est(n, V), coeff_est(n, V), method)


def _full_circle(curve: Curve) -> bool:
    spec = curve.spec
    return spec.get("curve") == "arc" and abs(spec["beta"] - spec["alpha"] - 2 * math.pi) < 1e-12


def closed_form_available(curve: Curve, n: int) -> bool:
    kind = curve.spec.get("curve")
    if kind == "hexagon":
        return n % 6 == 0
    if kind == "arc":
        return True
    if kind == "semicircle":
        return n >= 4
    return False


def closed_form_V(curve: Curve, n: int) -> float:
    kind = curve.spec.get("curve")
    if kind == "hexagon" and n % 6 == 0:
        return cf.hexagon_V(n // 6)
    if kind == "arc":
        return cf.arc_nmeans(curve.spec["alpha"], curve.spec["beta"], n)[1]
    if kind == "semicircle" and n >= 4:
        return cf.semicircle_closed_form(n, cf.k_search(n)).V
    raise ValueError(f"no closed form for {kind} at n={n}")


def scan(curve: Curve, n_list, method: str = "auto", restarts: int = 64, seed: int = 0,
         threads: int = 1) -> list[ScanRow]:
    """One row per n, in the given order."""
    n_list = list(n_list)
    if not n_list:
        raise ValueError("n_list is empty")
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    rows = []
    for n in n_list:
        use_cf = method != "lloyd" and closed_form_available(curve, n)
        if method == "closed-form" and not use_cf:
            raise ValueError(f"no closed form for {curve.spec.get('curve')} at n={n}")
        if use_cf:
            rows.append(make_row(n, closed_form_V(curve, n), "closed-form"))
        else:
            res = solve(curve, SolveConfig(n, restarts=restarts, seed=seed, threads=threads))
            rows.append(make_row(n, res.distortion, res.method))
    return rows


@dataclass
class CoefficientEstimate:
    m: int
    estimate: float
    spread: float
    ks: list = field(default_factory=list)
    coeffs: list = field(default_factory=list)  # n^2 V_n at n = m k
    extrapolated: list = field(default_factory=list)


def polygon_coefficient(m: int, k_max: int, restarts: int = 2, seed: int = 0) -> CoefficientEstimate:
    """Estimate lim n^2 V_n for the regular m-gon inscribed in the unit circle.

    Solves at n = m k for k = 1..k_max and removes the leading 1/k term from
    f(k) = n^2 V_n by Richardson extrapolation, R(k) = k f(k) - (k-1) f(k-1).
    The spread is the gap between the last two extrapolants.
    """
    if int(m) != m or m < 3:
        raise ValueError(f"m must be >= 3, got {m}")
    if k_max < 2:
        raise ValueError("k_max must be >= 2 to extrapolate")
    curve = build_polygon(int(m), 2.0 * math.sin(math.pi / m))
    ks = list(range(1, k_max + 1))
    f = []
    for k in ks:
        n = m * k
        res = solve(curve, SolveConfig(n, restarts=restarts, seed=seed))
        f.append(coeff_est(n, res.distortion))
    R = [k * f[i] - (k - 1) * f[i - 1] for i, k in enumerate(ks) if i > 0]
    tail = R[-2:] if len(R) >= 2 else R
    spread = float(abs(tail[-1] - tail[0]))
    return CoefficientEstimate(int(m), float(np.mean(tail)), spread, ks, f, R)
