"""Serialized solver results: JSON and CSV with exact float round-trip."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

SCHEMA_VERSION = 1


@dataclass
class ResultDocument:
    curve: dict
    n: int
    method: str
    points: list
    distortion: float
    boundary_params: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = True
    seed: int | None = None
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        self.points = [[float(x), float(y)] for x, y in self.points]
        self.boundary_params = [[int(s), float(t)] for s, t in self.boundary_params]
        self.distortion = float(self.distortion)
        if len(self.points) != self.n:
            raise ValueError(f"expected {self.n} points, got {len(self.points)}")

    @classmethod
    def from_result(cls, curve_spec: dict, result, seed: int | None = None) -> ResultDocument:
        return cls(
            curve=dict(curve_spec),
            n=len(result.quantizer),
            method=result.method,
            points=result.quantizer.tolist(),
            distortion=result.distortion,
            boundary_params=[list(bp) for bp in result.boundary_params],
            iterations=int(result.iterations),
            converged=bool(result.converged),
            seed=seed,
        )

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        # Python's float repr is the shortest string that reads back to the same double
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ResultDocument:
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as e:
            raise ValueError(f"not JSON: {e}") from None
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw) -> ResultDocument:
        if not isinstance(raw, dict):
            raise ValueError("result document must be a JSON object")
        need = {"curve", "n", "method", "points", "distortion"}
        missing = need - raw.keys()
        if missing:
            raise ValueError(f"missing fields: {sorted(missing)}")
        if raw.get("schema_version", SCHEMA_VERSION) != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {raw['schema_version']}")
        known = {f for f in cls.__dataclass_fields__}
        try:
            return cls(**{k: v for k, v in raw.items() if k in known})
        except (TypeError, ValueError) as e:
            raise ValueError(f"malformed result document: {e}") from None

    def to_csv(self) -> str:
        """One row per generator; run metadata repeated on every row."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "x", "y", "n", "distortion", "method", "converged", "seed"])
        for i, (x, y) in enumerate(self.points):
            w.writerow([i, repr(x), repr(y), self.n, repr(self.distortion), self.method,
                        str(self.converged).lower(), "" if self.seed is None else self.seed])
        return buf.getvalue()


def points_from_csv(text: str):
    """(points, distortion) read back from ``ResultDocument.to_csv`` output."""
    rows = list(csv.DictReader(io.StringIO(text)))
    pts = [[float(r["x"]), float(r["y"])] for r in rows]
    return pts, float(rows[0]["distortion"]) if rows else math.nan


SCAN_HEADER = ["n", "V_n", "dim_est", "coeff_est", "method", "status"]


def scan_csv(rows) -> str:
    """rows: ScanRow or (n, None) for a failed row."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_HEADER)
    for r in rows:
        if isinstance(r, tuple):
            n, err = r
            w.writerow([n, "", "", "", "", f"failed: {err}"])
        else:
            w.writerow([r.n, repr(r.V_n), repr(r.dim_est), repr(r.coeff_est), r.method, "ok"])
    return buf.getvalue()
