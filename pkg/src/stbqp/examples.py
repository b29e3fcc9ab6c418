"""The five benchmark bi-quadratic instances and their known minima."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .tensor_core import BiQuadTensor, kron4, new_biquad

EXAMPLE_IDS = (1, 2, 3, 4, 5)

# weights of the first instance
A_WEIGHTS = (0.7027, 0.1536, 0.9535, 0.5409)
B_WEIGHTS = (1.6797, 1.0366, 1.8092)


@dataclass(frozen=True)
class KronTerm:
    coefficient: float
    factors: tuple[np.ndarray, ...]


@dataclass(frozen=True)
class Example:
    id: int
    tensor: BiQuadTensor
    p_min: float
    kron_terms: Optional[tuple[KronTerm, ...]] = None

    @property
    def dims(self) -> tuple[int, int]:
        return self.tensor.n, self.tensor.m


def _example1() -> Example:
    n, m = 2, 4
    raw = np.zeros((n, n, m, m))
    for j, a in enumerate(A_WEIGHTS):
        raw[0, 0, j, j] = a
        raw[1, 1, j, j] = a
    for j, b in enumerate(B_WEIGHTS):
        # coefficient 4 b_j of x1 x2 y_j y_{j+1}, spread over its orbit on symmetrization
        raw[0, 1, j, j + 1] = 4.0 * b
    return Example(1, new_biquad(n, m, raw), 0.0598)


def _example2() -> Example:
    raw = np.zeros((3, 3, 3, 3))
    for i in range(3):
        raw[i, i, i, i] = 1.0
    for i, k in ((0, 1), (1, 2), (2, 0)):
        raw[i, i, k, k] = 2.0
    for i, j in ((0, 1), (0, 2), (1, 2)):
        raw[i, j, i, j] = -2.0
    return Example(2, new_biquad(3, 3, raw), 0.0)


def _from_kron(ex_id: int, terms: list[tuple[float, np.ndarray, np.ndarray]], p_min: float) -> Example:
    kt = tuple(KronTerm(c, (np.asarray(P, float), np.asarray(Q, float))) for c, P, Q in terms)
    data = sum(t.coefficient * kron4(*t.factors).data for t in kt)
    return Example(ex_id, new_biquad(kt[0].factors[0].shape[0], kt[0].factors[1].shape[0], data), p_min, kt)


def _example3() -> Example:
    A = [[1, 2, 1], [2, 4, 2], [1, 2, 1]]
    B = [[1, 1, 2], [1, 1, 2], [2, 2, 4]]
    C = np.array([[2, 3, 2], [3, 4, 3], [2, 3, 2]]) / 2
    D = np.array([[2, 2, 3], [2, 2, 3], [3, 3, 4]]) / 2
    return _from_kron(3, [(1.0, A, B), (-2.0, C, D)], -1.0)


def _example4() -> Example:
    A = [[1, -3, -2, -1], [-3, 9, 6, 3], [-2, 6, 4, 2], [-1, 3, 2, 1]]
    B = [[4, -4, -2, -2, -2], [-4, 4, 2, 2, 2], [-2, 2, 1, 1, 1], [-2, 2, 1, 1, 1], [-2, 2, 1, 1, 1]]
    C = [[-2, 2, 1, 0], [2, 6, 5, 4], [1, 5, 4, 3], [0, 4, 3, 2]]
    D = [[-4, 0, -1, -1, -1], [0, 4, 3, 3, 3], [-1, 3, 2, 2, 2], [-1, 3, 2, 2, 2], [-1, 3, 2, 2, 2]]
    return _from_kron(4, [(1.0, A, B), (-1.0, C, D)], -4.0)


def block_matrices(n: int = 5, m: int = 8) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """The four block-structured factors of the fifth instance (n >= 2, m >= 3)."""
    if n < 2 or m < 3:
        raise ValueError(f"need n >= 2 and m >= 3, got n={n}, m={m}")
    A = np.ones((n, n))
    A[0, 0], A[0, 1], A[1, 0], A[1, 1] = 1, -2, -2, 4
    A[0, 2:] = A[2:, 0] = -1
    A[1, 2:] = A[2:, 1] = 2

    B = np.ones((m, m))
    B[:3, :3] = [[1, -1, -2], [-1, 1, 2], [-2, 2, 4]]
    B[0, 3:] = B[3:, 0] = -1
    B[1, 3:] = B[3:, 1] = 1
    B[2, 3:] = B[3:, 2] = 2

    C = np.ones((n, n))
    C[0, 0], C[0, 1], C[1, 0], C[1, 1] = -1, 0.5, 0.5, 2
    C[0, 2:] = C[2:, 0] = 0
    C[1, 2:] = C[2:, 1] = 1.5

    D = np.ones((m, m))
    D[:3, :3] = [[-1, 0, 0.5], [0, 1, 1.5], [0.5, 1.5, 2]]
    D[0, 3:] = D[3:, 0] = 0
    D[1, 3:] = D[3:, 1] = 1
    D[2, 3:] = D[3:, 2] = 1.5
    return A, B, C, D


def _example5() -> Example:
    A, B, C, D = block_matrices(5, 8)
    return _from_kron(5, [(1.0, A, B), (-2.0, C, D)], -1.0)


_BUILDERS = {1: _example1, 2: _example2, 3: _example3, 4: _example4, 5: _example5}


def example(ex_id: int) -> Example:
    try:
        return _BUILDERS[ex_id]()
    except KeyError:
        raise ValueError(f"example id must be one of {EXAMPLE_IDS}, got {ex_id}") from None
