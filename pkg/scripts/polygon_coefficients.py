"""Quantization coefficient estimates for regular m-gons inscribed in the unit circle.

Prints the Richardson-extrapolated n^2 V_n for each m next to the circle value pi^2/3.
This is exploratory output, not a check: the trend in m is reported as found.

Usage: python3 scripts/polygon_coefficients.py [--m 3 4 5 6 8 12 24] [--k-max 5]
"""

import argparse
import math
import time

from curvequant.asymptotics import polygon_coefficient


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, nargs="+", default=[3, 4, 5, 6, 8, 12, 24])
    ap.add_argument("--k-max", type=int, default=5)
    ap.add_argument("--restarts", type=int, default=2)
    args = ap.parse_args()
    circle = math.pi**2 / 3
    print(f"circle: pi^2/3 = {circle:.6f}")
    print(f"{'m':>4} {'k_max':>6} {'estimate':>10} {'spread':>10} {'/circle':>8}  time")
    prev = None
    for m in args.m:
        # keep n = m k_max moderate for large m
        k_max = max(2, min(args.k_max, 72 // m))
        t0 = time.perf_counter()
        est = polygon_coefficient(m, k_max, restarts=args.restarts)
        trend = "" if prev is None else ("  up" if est.estimate > prev else "  DOWN")
        prev = est.estimate
        print(f"{m:>4} {k_max:>6} {est.estimate:>10.6f} {est.spread:>10.2e} "
              f"{est.estimate / circle:>8.4f}  {time.perf_counter() - t0:.1f}s{trend}")


if __name__ == "__main__":
    main()
