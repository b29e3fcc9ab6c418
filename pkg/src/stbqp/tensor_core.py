"""Partially symmetric coefficient tensors for bi-quadratic and multi-quadratic forms.

A bi-quadratic tensor has shape ``(n, n, m, m)`` and is invariant under
``i <-> j`` and ``k <-> l`` separately.  Entries are stored densely in C order,
so the flat view is lexicographic in ``(i, j, k, l)``.  All indices are
0-based here; the 1-based convention only appears in the file format.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

STRICT_SYMMETRY_TOL = 1e-12


class TensorError(ValueError):
    """Raised when tensor data violates a structural invariant."""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


def _symmetrize_modes(data: np.ndarray, d: int) -> np.ndarray:
    # One exact halving per mode: idempotent on symmetric input and gives
    # bitwise-equal values across each orbit.
    out = np.array(data, dtype=np.float64)
    for k in range(d):
        axes = list(range(2 * d))
        axes[2 * k], axes[2 * k + 1] = axes[2 * k + 1], axes[2 * k]
        out = (out + out.transpose(axes)) * 0.5
    return out


def _check_finite(values: np.ndarray) -> None:
    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values.ravel()))[0])
        raise TensorError("finite-entries", f"entry at flat position {bad} is not finite")


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BiQuadTensor:
    """Dense ``n x n x m x m`` partially symmetric tensor (immutable)."""

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 4 or self.data.shape[0] != self.data.shape[1] \
                or self.data.shape[2] != self.data.shape[3]:
            raise TensorError("shape", f"expected (n, n, m, m), got {self.data.shape}")
        object.__setattr__(self, "data", _freeze(self.data))

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def m(self) -> int:
        return self.data.shape[2]

    @property
    def entries(self) -> np.ndarray:
        """Flat read-only view in lexicographic ``(i, j, k, l)`` order."""
        return self.data.reshape(-1)

    def _check_same_dims(self, other: "BiQuadTensor") -> None:
        if self.data.shape != other.data.shape:
            raise TensorError("dims", f"dimension mismatch: {(self.n, self.m)} vs {(other.n, other.m)}")

    def __add__(self, other: "BiQuadTensor") -> "BiQuadTensor":
        if not isinstance(other, BiQuadTensor):
            return NotImplemented
        self._check_same_dims(other)
        return BiQuadTensor(self.data + other.data)

    def __sub__(self, other: "BiQuadTensor") -> "BiQuadTensor":
        if not isinstance(other, BiQuadTensor):
            return NotImplemented
        self._check_same_dims(other)
        return BiQuadTensor(self.data - other.data)

    def __mul__(self, c: float) -> "BiQuadTensor":
        return BiQuadTensor(self.data * float(c))

    __rmul__ = __mul__

    def __neg__(self) -> "BiQuadTensor":
        return BiQuadTensor(-self.data)

    def shifted(self, c: float) -> "BiQuadTensor":
        """Return ``A + c E``."""
        return BiQuadTensor(self.data + float(c))

    def equals(self, other: "BiQuadTensor") -> bool:
        return self.data.shape == other.data.shape and np.array_equal(self.data, other.data)


@dataclass(frozen=True, eq=False)
class MultiQuadTensor:
    """Order-2d tensor indexed ``(i_1, j_1, ..., i_d, j_d)``, symmetric in each pair."""

    dims: tuple[int, ...]
    data: np.ndarray

    def __post_init__(self):
        dims = tuple(int(v) for v in self.dims)
        shape = tuple(v for n in dims for v in (n, n))
        if not dims or any(n < 1 for n in dims):
            raise TensorError("dims", f"need d >= 1 positive dimensions, got {dims}")
        if self.data.shape != shape:
            raise TensorError("shape", f"expected {shape}, got {self.data.shape}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "data", _freeze(self.data))

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def entries(self) -> np.ndarray:
        return self.data.reshape(-1)


@dataclass(frozen=True)
class CorrectionSlices:
    """Diagonal slices of a bi-quadratic tensor and their (s, r)-scaled variants.

    ``A[i]`` is the m x m matrix ``g[i, i, :, :]``, ``B[k]`` the n x n matrix
    ``g[:, :, k, k]`` and ``C[i, k] = g[i, i, k, k]``.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    s: int
    r: int

    @property
    def A_scaled(self) -> np.ndarray:
        return self.A / (self.s + 2)

    @property
    def B_scaled(self) -> np.ndarray:
        return self.B / (self.r + 2)

    @property
    def C_scaled(self) -> np.ndarray:
        return self.C / ((self.s + 2) * (self.r + 2))


def new_biquad(n: int, m: int, raw_entries, *, strict: bool = False) -> BiQuadTensor:
    """Build a tensor from ``n*n*m*m`` raw coefficients by orbit averaging.

    Each output entry is the mean of the raw entries at ``(i,j,k,l)``,
    ``(j,i,k,l)``, ``(i,j,l,k)`` and ``(j,i,l,k)``.  With ``strict=True`` the
    input must already be symmetric to within 1e-12.
    """
    if n < 1 or m < 1:
        raise TensorError("dims", f"n and m must be positive, got n={n}, m={m}")
    raw = np.asarray(raw_entries, dtype=np.float64)
    if raw.size != n * n * m * m:
        raise TensorError("entry-count", f"expected {n * n * m * m} entries for n={n}, m={m}, got {raw.size}")
    raw = raw.reshape(n, n, m, m)
    _check_finite(raw)
    sym = _symmetrize_modes(raw, 2)
    if strict:
        dev = float(np.max(np.abs(sym - raw)))
        if dev > STRICT_SYMMETRY_TOL:
            raise TensorError("partial-symmetry", f"input deviates from symmetric by {dev:.3e}")
    return BiQuadTensor(sym)


def all_ones(n: int, m: int) -> BiQuadTensor:
    if n < 1 or m < 1:
        raise TensorError("dims", f"n and m must be positive, got n={n}, m={m}")
    return BiQuadTensor(np.ones((n, n, m, m)))


def _as_symmetric(P, name: str) -> np.ndarray:
    P = np.asarray(P, dtype=np.float64)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise TensorError("square-factor", f"{name} must be square, got shape {P.shape}")
    _check_finite(P)
    if not np.allclose(P, P.T, rtol=0.0, atol=STRICT_SYMMETRY_TOL):
        raise TensorError("symmetric-factor", f"{name} is not symmetric")
    return (P + P.T) * 0.5


def kron4(P, Q) -> BiQuadTensor:
    """Outer product ``P ⊗ Q`` with entries ``P[i, j] * Q[k, l]``."""
    P = _as_symmetric(P, "P")
    Q = _as_symmetric(Q, "Q")
    return BiQuadTensor(np.multiply.outer(P, Q))


def kron_multi(factors: Sequence) -> MultiQuadTensor:
    """Outer product of d symmetric matrices, one per mode."""
    mats = [_as_symmetric(F, f"factor {k}") for k, F in enumerate(factors)]
    if not mats:
        raise TensorError("dims", "need at least one factor")
    data = reduce(np.multiply.outer, mats)
    return MultiQuadTensor(tuple(F.shape[0] for F in mats), data)


def new_multi(dims: Sequence[int], raw_entries, *, strict: bool = False) -> MultiQuadTensor:
    """Multi-quadratic analogue of :func:`new_biquad` (average over 2^d swaps)."""
    dims = tuple(int(v) for v in dims)
    if not dims or any(n < 1 for n in dims):
        raise TensorError("dims", f"need d >= 1 positive dimensions, got {dims}")
    shape = tuple(v for n in dims for v in (n, n))
    raw = np.asarray(raw_entries, dtype=np.float64)
    size = int(np.prod(shape))
    if raw.size != size:
        raise TensorError("entry-count", f"expected {size} entries for dims {list(dims)}, got {raw.size}")
    raw = raw.reshape(shape)
    _check_finite(raw)
    sym = _symmetrize_modes(raw, len(dims))
    if strict:
        dev = float(np.max(np.abs(sym - raw)))
        if dev > STRICT_SYMMETRY_TOL:
            raise TensorError("partial-symmetry", f"input deviates from symmetric by {dev:.3e}")
    return MultiQuadTensor(dims, sym)


def multi_all_ones(dims: Sequence[int]) -> MultiQuadTensor:
    dims = tuple(int(v) for v in dims)
    return MultiQuadTensor(dims, np.ones(tuple(v for n in dims for v in (n, n))))


def slices(A: BiQuadTensor, s: int, r: int) -> CorrectionSlices:
    if s < 0 or r < 0:
        raise ValueError(f"s and r must be nonnegative, got s={s}, r={r}")
    g = A.data
    n, m = A.n, A.m
    iA = np.arange(n)
    iB = np.arange(m)
    A_sl = g[iA, iA, :, :].copy()                       # (n, m, m)
    B_sl = np.moveaxis(g[:, :, iB, iB], -1, 0).copy()   # (m, n, n)
    C_sl = g[iA, iA][:, iB, iB].copy()                  # (n, m)
    for arr in (A_sl, B_sl, C_sl):
        arr.setflags(write=False)
    return CorrectionSlices(A_sl, B_sl, C_sl, int(s), int(r))


def to_multi(A: BiQuadTensor) -> MultiQuadTensor:
    return MultiQuadTensor((A.n, A.m), A.data)


def from_multi(M: MultiQuadTensor) -> BiQuadTensor:
    if M.d != 2:
        raise TensorError("dims", f"from_multi needs d == 2, got d={M.d}")
    return BiQuadTensor(M.data)
