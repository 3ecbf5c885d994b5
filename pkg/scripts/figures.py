"""Write SVG pictures of optimal sets: hexagon n=2..7, semicircle n=1..9, ellipse n=2..7.

Usage: python3 scripts/figures.py [--out figures] [--restarts 64]
"""

import argparse
from pathlib import Path

from curvequant.cli import solve_spec
from curvequant.svg import render

CASES = [
    ({"curve": "hexagon"}, range(2, 8)),
    ({"curve": "semicircle"}, range(1, 10)),
    ({"curve": "ellipse"}, range(2, 8)),
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="figures")
    ap.add_argument("--restarts", type=int, default=64)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for spec, ns in CASES:
        for n in ns:
            doc = solve_spec(spec, n, restarts=args.restarts)
            stem = f"{spec['curve']}_n{n}"
            (out / f"{stem}.json").write_text(doc.to_json())
            (out / f"{stem}.svg").write_text(render(doc, show_boundaries=True))
            print(f"{stem}: V={doc.distortion!r} ({doc.method})")


if __name__ == "__main__":
    main()
