"""Report documents: serialization, digests and the plot-data sidecar.

A report is a JSON object with three parts.  ``tool`` and ``result`` (plus the
tensor digest) are deterministic for a given input and tool version and are
covered by ``digest``; ``timing`` holds wall-clock data and is excluded.
Floats are written with 17 significant digits, so they parse back exactly.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from . import __version__
from .ptas_engine import BoundsReport, MembershipResult
from .tensor_core import BiQuadTensor, MultiQuadTensor

TOOL_NAME = "stbqp"
_HASHED = ("tool", "tensor", "command", "result")


def _encode(value) -> str:
    """Compact, key-sorted JSON with floats as %.17g."""
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if not math.isfinite(v):
            raise ValueError(f"cannot serialize non-finite float {v}")
        text = format(v, ".17g")
        # keep floats recognizable as floats when they happen to be integral
        return text if any(ch in text for ch in ".e") else text + ".0"
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, dict):
        items = sorted(value.items())
        return "{" + ",".join(json.dumps(str(k)) + ":" + _encode(v) for k, v in items) + "}"
    if isinstance(value, (list, tuple)):
        return "[" + ",".join(_encode(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(doc: dict) -> str:
    return _encode(doc) + "\n"


def tensor_digest(tensor) -> dict:
    if isinstance(tensor, BiQuadTensor):
        kind, dims = "biquad", [tensor.n, tensor.m]
    elif isinstance(tensor, MultiQuadTensor):
        kind, dims = "multiquad", list(tensor.dims)
    else:
        raise TypeError(f"not a tensor: {type(tensor).__name__}")
    h = hashlib.sha256()
    h.update(json.dumps({"kind": kind, "dims": dims}).encode())
    h.update(np.ascontiguousarray(tensor.entries, dtype="<f8").tobytes())
    return {"kind": kind, "dims": dims, "sha256": h.hexdigest()}


def fraction_text(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _witness(points, resolutions) -> Optional[list]:
    if points is None:
        return None
    return [
        {"lattice": list(p), "point": [fraction_text(Fraction(c, r + 2)) for c in p]}
        for p, r in zip(points, resolutions)
    ]


def bounds_to_dict(rep: BoundsReport) -> dict:
    return {
        "resolutions": list(rep.resolutions),
        "grid_denominators": [r + 2 for r in rep.resolutions],
        "p_upper": rep.p_upper,
        "p_lower": rep.p_lower,
        "argmin_upper": _witness(rep.argmin_upper, rep.resolutions),
        "argmin_lower": _witness(rep.argmin_lower, rep.resolutions),
        "upper_coeff": rep.upper_coeff,
        "lower_coeff": rep.lower_coeff,
        "range_bound": rep.range_bound,
        "certified_upper_gap": rep.certified_upper_gap,
        "certified_lower_gap": rep.certified_lower_gap,
        "certificate": "range_bound = max entry - min entry, used in place of p_max - p_min",
        "grid_max": rep.grid_max,
        "points_evaluated": rep.points_evaluated,
    }


def bounds_from_dict(doc: dict) -> BoundsReport:
    def pts(w):
        return None if w is None else tuple(tuple(p["lattice"]) for p in w)

    return BoundsReport(
        resolutions=tuple(doc["resolutions"]),
        p_upper=doc["p_upper"],
        p_lower=doc["p_lower"],
        argmin_upper=pts(doc["argmin_upper"]),
        argmin_lower=pts(doc["argmin_lower"]),
        upper_coeff=doc["upper_coeff"],
        lower_coeff=doc["lower_coeff"],
        range_bound=doc["range_bound"],
        points_evaluated=doc["points_evaluated"],
        grid_max=doc["grid_max"],
    )


def membership_to_dict(res: MembershipResult, lam: float, s: int, r: int, tolerance: float) -> dict:
    out = {"lambda": lam, "resolutions": [s, r], "tolerance": tolerance, "member": res.member,
           "witness": None, "witness_value": res.witness_value}
    if res.witness is not None:
        out["witness"] = [list(p) for p in res.witness]
    return out


def make_report(command: str, result: dict, tensor=None, wall_seconds: Optional[float] = None) -> dict:
    doc = {
        "tool": {"name": TOOL_NAME, "version": __version__},
        "tensor": None if tensor is None else tensor_digest(tensor),
        "command": command,
        "result": result,
    }
    doc["digest"] = report_digest(doc)
    doc["timing"] = {"wall_seconds": wall_seconds}
    return doc


def report_digest(doc: dict) -> str:
    body = _encode({k: doc[k] for k in _HASHED})
    return hashlib.sha256(body.encode()).hexdigest()


def write_report(doc: dict, path) -> None:
    Path(path).write_text(dumps(doc))


def read_report(path) -> dict:
    doc = json.loads(Path(path).read_text())
    if report_digest(doc) != doc.get("digest"):
        raise ValueError(f"{path}: report digest does not match its content")
    return doc


def plot_rows(example_id, rep: BoundsReport) -> list[str]:
    if rep.argmin_upper is None:
        raise ValueError("plot data needs the upper-bound argmin")
    coords = [fraction_text(q) for pt in rep.grid_point("upper") for q in pt]
    lower = "" if rep.p_lower is None else format(rep.p_lower, ".17g")
    s, r = rep.resolutions
    return [str(example_id), str(s), str(r), format(rep.p_upper, ".17g"), lower] + coords


def write_plot_data(path, n: int, m: int, rows: Iterable[list[str]]) -> None:
    header = ["example_id", "s", "r", "p_upper", "p_lower"]
    header += [f"x_{i + 1}" for i in range(n)] + [f"y_{k + 1}" for k in range(m)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
