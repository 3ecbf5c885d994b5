"""Optimal errors V_n on the built-in curves next to the reference values.

Usage: python3 scripts/reproduce_tables.py [--restarts 64] [--seed 0]
"""

import argparse
import math
import time

from curvequant import closed_forms as cf
from curvequant.curves import build_ellipse, build_hexagon, build_semicircle_mixed
from curvequant.lloyd import SolveConfig, solve

REFERENCE = {
    "hexagon": {1: 5 / 6, 2: 71 / 144, 3: 199 / 768, 4: 23 / 144, 5: 0.10509, 6: 13 / 192},
    "semicircle": {1: 2 / 3 - 1 / math.pi**2, 2: 0.242369, 3: 0.147821, 4: 0.098412,
                   5: 0.0654358, 6: 0.0499565, 7: 0.0366668, 8: 0.0290573, 9: 0.0233983},
    "ellipse": {2: 0.961441, 3: 0.661148, 4: 0.393732, 5: 0.28329, 6: 0.198794, 7: 0.152179},
}
CURVES = {"hexagon": build_hexagon, "semicircle": build_semicircle_mixed, "ellipse": build_ellipse}


def solver_table(restarts, seed):
    print(f"{'curve':<11}{'n':>3}  {'V_n (solver)':>20}  {'reference':>12}  {'diff':>10}  optima  method")
    for name, ref in REFERENCE.items():
        curve = CURVES[name]()
        for n, want in ref.items():
            t0 = time.perf_counter()
            res = solve(curve, SolveConfig(n, restarts=restarts, seed=seed))
            dt = time.perf_counter() - t0
            print(f"{name:<11}{n:>3}  {res.distortion:>20.15f}  {want:>12.7f}  "
                  f"{res.distortion - want:>10.2e}  {len(res.optima):>6}  {res.method} ({dt:.1f}s)")


def hexagon_6k_table(k_max=8):
    print("\nhexagon n = 6k")
    print(f"{'k':>3} {'r':>20} {'V':>22} {'n^2 V':>10}")
    for k in range(1, k_max + 1):
        h = cf.hexagon_6k(k)
        print(f"{k:>3} {h.r:>20.15f} {h.V:>22.17f} {(6 * k) ** 2 * h.V:>10.6f}")


def semicircle_table(ns=(4, 5, 6, 7, 8, 9, 10, 20, 40, 51, 100)):
    print("\nsemicircle construction")
    print(f"{'n':>5} {'a(n)':>5} {'k':>5} {'a':>10} {'b':>10} {'V':>22}")
    for n in ns:
        k = cf.k_search(n)
        c = cf.semicircle_closed_form(n, k)
        print(f"{n:>5} {cf.seq_a(n):>5} {k:>5} {c.a:>10.6f} {c.b:>10.6f} {c.V:>22.17f}")


def ksearch_table(ns=(40, 51, 1000, 2500, 5000)):
    print("\nk-search")
    for n in ns:
        k = cf.k_search(n)
        print(f"n={n:<5} a(n)={cf.seq_a(n):<5} k={k:<5} V={cf.semicircle_V(n, k)!r}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--restarts", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    solver_table(args.restarts, args.seed)
    hexagon_6k_table()
    semicircle_table()
    ksearch_table()


if __name__ == "__main__":
    main()
