"""quantize: optimal n-means on curves from the command line."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from curvequant import asymptotics, closed_forms
from curvequant.curves import build_curve
from curvequant.document import ResultDocument, scan_csv
from curvequant.errors import NoRoot, QuantizationError
from curvequant.lloyd import SolveConfig, SolveResult, solve
from curvequant.svg import render

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 2, 3

CURVES = ("hexagon", "polygon", "arc", "semicircle", "ellipse")
DEFAULTS = {
    "curve": None, "m": 6, "side": 1.0, "alpha": 0.0, "beta": math.pi, "n": None,
    "restarts": 64, "seed": 0, "method": "auto", "format": "json", "threads": None,
    "n_from": 1, "n_to": None, "step": 1, "multiples_of": None,
}


class UsageError(Exception):
    pass


def _curve_flags(p):
    p.add_argument("--curve", choices=CURVES)
    p.add_argument("--m", type=int)
    p.add_argument("--side", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)


def _run_flags(p):
    p.add_argument("--restarts", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--method", choices=asymptotics.METHODS)
    p.add_argument("--threads", type=int)
    p.add_argument("--config", help="JSON file with flag values; explicit flags win")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="quantize", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="optimal n-means for one n")
    _curve_flags(p)
    p.add_argument("--n", type=int)
    _run_flags(p)
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"))

    p = sub.add_parser("scan", help="V_n, dimension and coefficient estimates over a range of n")
    _curve_flags(p)
    p.add_argument("--n-from", type=int, dest="n_from")
    p.add_argument("--n-to", type=int, dest="n_to")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--step", type=int)
    g.add_argument("--multiples-of", type=int, dest="multiples_of")
    _run_flags(p)
    p.add_argument("--out")

    p = sub.add_parser("ksearch", help="base-point count for the semicircle construction")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("svg", help="draw a result document")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--show-boundaries", action="store_true")
    return ap


def _merge_config(args):
    cfg = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as e:
            raise UsageError(f"cannot read config {args.config}: {e}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
    for key, default in DEFAULTS.items():
        if not hasattr(args, key):
            continue
        if getattr(args, key) is None:
            setattr(args, key, cfg.get(key.replace("_", "-"), cfg.get(key, default)))
    return args


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, int(args.threads))
    env = os.environ.get("QUANTIZE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"QUANTIZE_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _spec(args) -> dict:
    if args.curve is None:
        raise UsageError("--curve is required")
    spec = {"curve": args.curve}
    if args.curve == "polygon":
        spec.update(m=int(args.m), side=float(args.side))
    elif args.curve == "arc":
        spec.update(alpha=float(args.alpha), beta=float(args.beta))
    return spec


def _closed_form(curve, n) -> SolveResult:
    kind = curve.spec["curve"]
    if kind == "hexagon":
        return closed_forms.hexagon_optimal(n // 6)
    if kind == "arc":
        q, V = closed_forms.arc_nmeans(curve.spec["alpha"], curve.spec["beta"], n)
        return closed_forms.closed_form_result(curve, q, V)
    return closed_forms.semicircle_optimal(n)


def solve_spec(spec: dict, n: int, method: str = "auto", restarts: int = 64, seed: int = 0,
               threads: int = 1) -> ResultDocument:
    curve = build_curve(spec)
    available = asymptotics.closed_form_available(curve, n)
    if method == "closed-form" and not available:
        raise UsageError(f"no closed form for {spec['curve']} at n={n}")
    if method != "lloyd" and available:
        return ResultDocument.from_result(curve.spec, _closed_form(curve, n))
    res = solve(curve, SolveConfig(n, restarts=restarts, seed=seed, threads=threads))
    return ResultDocument.from_result(curve.spec, res, seed=seed)


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_solve(args) -> int:
    if args.n is None or args.n < 1:
        raise UsageError("--n must be a positive integer")
    try:
        doc = solve_spec(_spec(args), args.n, args.method, args.restarts, args.seed, _threads(args))
    except NoRoot as e:
        print(f"quantize: {e}", file=sys.stderr)
        return EXIT_FAILED
    _emit(doc.to_json() if args.format == "json" else doc.to_csv(), args.out)
    return EXIT_OK if doc.converged else EXIT_FAILED


def _scan_ns(args):
    if args.n_to is None:
        raise UsageError("--n-to is required")
    lo, hi = int(args.n_from), int(args.n_to)
    if lo < 1 or hi < lo:
        raise UsageError(f"bad range {lo}..{hi}")
    if args.multiples_of:
        k = int(args.multiples_of)
        return [n for n in range(lo, hi + 1) if n % k == 0]
    return list(range(lo, hi + 1, max(1, int(args.step))))


def cmd_scan(args) -> int:
    curve = build_curve(_spec(args))
    ns = _scan_ns(args)
    if args.method == "closed-form":
        bad = [n for n in ns if not asymptotics.closed_form_available(curve, n)]
        if bad:
            raise UsageError(f"no closed form at n={bad[0]}")
    rows, failed = [], False
    for n in ns:
        try:
            rows.extend(asymptotics.scan(curve, [n], args.method, args.restarts, args.seed,
                                         _threads(args)))
        except (QuantizationError, ValueError) as e:
            rows.append((n, type(e).__name__))
            failed = True
    _emit(scan_csv(rows), args.out)
    return EXIT_FAILED if failed else EXIT_OK


def cmd_ksearch(args) -> int:
    n = args.n
    if n is None or n < 4:
        raise UsageError("--n must be at least 4")
    try:
        k = closed_forms.k_search(n)
        V = closed_forms.semicircle_closed_form(n, k).V
    except NoRoot as e:
        print(f"quantize: {e}", file=sys.stderr)
        return EXIT_FAILED
    print(f"a(n)={closed_forms.seq_a(n)}")
    print(f"k={k}")
    print(f"V={V!r}")
    return EXIT_OK


def cmd_svg(args) -> int:
    try:
        with open(args.inp) as fh:
            doc = ResultDocument.from_json(fh.read())
        text = render(doc, args.show_boundaries)
    except (OSError, ValueError, KeyError) as e:
        raise UsageError(f"cannot render {args.inp}: {e}") from None
    with open(args.out, "w") as fh:
        fh.write(text)
    return EXIT_OK


COMMANDS = {"solve": cmd_solve, "scan": cmd_scan, "ksearch": cmd_ksearch, "svg": cmd_svg}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args = _merge_config(args)
        return COMMANDS[args.command](args)
    except UsageError as e:
        print(f"quantize: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        # bad curve parameters surface from the builders as ValueError
        print(f"quantize: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
