"""Reading and writing tensor files.

A tensor file is a JSON object::

    {
      "format": "stbqp-tensor/1",
      "kind": "biquad",               # or "multiquad"
      "dims": [n, m],                 # [n_1, ..., n_d] for multiquad
      "label": "optional free text",
      "entries": [...]                # flat coefficients, or
      "kron_terms": [{"coefficient": c, "factors": [P_1, ..., P_d]}, ...]
    }

``entries`` lists a[i1, j1, i2, j2, ...] with the last index varying fastest,
so the first value is a_{1,1,1,1} and, for biquad files, entry
a_{i,j,k,l} (1-based) sits at position ((((i-1)*n + j-1)*m + k-1)*m + l-1).
Each factor of a Kronecker term is a symmetric n_k x n_k matrix written as a
list of rows.  Exactly one of ``entries`` / ``kron_terms`` must be present.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import reduce
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .tensor_core import (
    BiQuadTensor,
    MultiQuadTensor,
    TensorError,
    _as_symmetric,
    new_biquad,
    new_multi,
)

FORMAT_TAG = "stbqp-tensor/1"
_KEYS = {"format", "kind", "dims", "label", "entries", "kron_terms"}

Tensor = Union[BiQuadTensor, MultiQuadTensor]


class TensorFileError(ValueError):
    """The file is not well-formed (bad JSON, wrong keys, wrong value types)."""


@dataclass(frozen=True)
class TensorDocument:
    tensor: Tensor
    label: Optional[str] = None

    @property
    def kind(self) -> str:
        return "biquad" if isinstance(self.tensor, BiQuadTensor) else "multiquad"

    @property
    def dims(self) -> tuple[int, ...]:
        t = self.tensor
        return (t.n, t.m) if isinstance(t, BiQuadTensor) else t.dims


def _number_list(value, where: str) -> list[float]:
    if not isinstance(value, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        raise TensorFileError(f"{where} must be a list of numbers")
    return [float(v) for v in value]


def _matrix(value, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise TensorFileError(f"{where} must be a nonempty list of rows")
    rows = [_number_list(row, f"{where} row {t + 1}") for t, row in enumerate(value)]
    if len({len(r) for r in rows}) != 1:
        raise TensorFileError(f"{where} has rows of different lengths")
    return np.array(rows, dtype=np.float64)


def kron_sum(terms: Sequence[tuple[float, Sequence[np.ndarray]]]) -> np.ndarray:
    """Dense sum of coefficient * (F_1 ⊗ ... ⊗ F_d) over symmetric factors."""
    total = None
    for coeff, factors in terms:
        mats = [_as_symmetric(F, f"factor {k + 1}") for k, F in enumerate(factors)]
        term = float(coeff) * reduce(np.multiply.outer, mats)
        total = term if total is None else total + term
    return total


def parse_tensor(text: str) -> TensorDocument:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TensorFileError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise TensorFileError("top level must be a JSON object")
    unknown = set(doc) - _KEYS
    if unknown:
        raise TensorFileError(f"unknown keys: {sorted(unknown)}")
    if doc.get("format", FORMAT_TAG) != FORMAT_TAG:
        raise TensorFileError(f"unsupported format {doc['format']!r}, expected {FORMAT_TAG!r}")
    kind = doc.get("kind")
    if kind not in ("biquad", "multiquad"):
        raise TensorFileError("kind must be 'biquad' or 'multiquad'")
    dims = doc.get("dims")
    if not isinstance(dims, list) or not dims or not all(isinstance(v, int) and not isinstance(v, bool) for v in dims):
        raise TensorFileError("dims must be a nonempty list of integers")
    if any(v < 1 for v in dims):
        raise TensorError("dims", f"dimensions must be positive, got {dims}")
    if kind == "biquad" and len(dims) != 2:
        raise TensorError("dims", f"biquad tensors need two dimensions, got {len(dims)}")
    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise TensorFileError("label must be a string")

    has_entries, has_kron = "entries" in doc, "kron_terms" in doc
    if has_entries == has_kron:
        raise TensorError("entries-xor-kron", "exactly one of 'entries' and 'kron_terms' is required")
    if has_entries:
        data = np.array(_number_list(doc["entries"], "entries"))
    else:
        terms = doc["kron_terms"]
        if not isinstance(terms, list) or not terms:
            raise TensorFileError("kron_terms must be a nonempty list")
        parsed = []
        for t, term in enumerate(terms, start=1):
            if not isinstance(term, dict) or set(term) != {"coefficient", "factors"}:
                raise TensorFileError(f"kron term {t} must have exactly 'coefficient' and 'factors'")
            coeff = term["coefficient"]
            if not isinstance(coeff, (int, float)) or isinstance(coeff, bool):
                raise TensorFileError(f"kron term {t} coefficient must be a number")
            factors = term["factors"]
            if not isinstance(factors, list) or len(factors) != len(dims):
                raise TensorError("kron-factor-count", f"kron term {t} needs {len(dims)} factors")
            mats = [_matrix(F, f"kron term {t} factor {k + 1}") for k, F in enumerate(factors)]
            for k, (F, n) in enumerate(zip(mats, dims)):
                if F.shape != (n, n):
                    raise TensorError("kron-factor-shape", f"kron term {t} factor {k + 1} must be {n}x{n}, got {F.shape}")
            parsed.append((float(coeff), mats))
        data = kron_sum(parsed)

    if kind == "biquad":
        tensor: Tensor = new_biquad(dims[0], dims[1], data)
    else:
        tensor = new_multi(dims, data)
    return TensorDocument(tensor, label)


def load_tensor(path) -> TensorDocument:
    return parse_tensor(Path(path).read_text())


def tensor_to_dict(tensor: Tensor, label: Optional[str] = None,
                   kron_terms: Optional[Sequence[tuple[float, Sequence[np.ndarray]]]] = None) -> dict:
    if isinstance(tensor, BiQuadTensor):
        kind, dims = "biquad", [tensor.n, tensor.m]
    else:
        kind, dims = "multiquad", list(tensor.dims)
    out: dict = {"format": FORMAT_TAG, "kind": kind, "dims": dims}
    if label is not None:
        out["label"] = label
    if kron_terms is not None:
        out["kron_terms"] = [
            {"coefficient": float(c), "factors": [np.asarray(F, float).tolist() for F in factors]}
            for c, factors in kron_terms
        ]
    else:
        out["entries"] = tensor.entries.tolist()
    return out


def dump_tensor(tensor: Tensor, path, label: Optional[str] = None,
                kron_terms: Optional[Sequence[tuple[float, Sequence[np.ndarray]]]] = None) -> None:
    doc = tensor_to_dict(tensor, label, kron_terms)
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")
