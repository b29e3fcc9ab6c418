"""Brute-force reference minimizer for bi-quadratic forms.

Deliberately naive: every evaluation is the plain quadruple sum over
``a[i,j,k,l] x_i x_j y_k y_l``, and the fine grid is generated here by
stars-and-bars instead of reusing the engine's lattice code.  It exists to
cross-check the engine, so keep it that way.

Random samples are uniform on the simplex: i.i.d. standard exponentials from
``numpy.random.default_rng(seed)`` (PCG64), normalized to sum 1, x drawn
before y for each sample.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from numba import njit

from .tensor_core import BiQuadTensor

DEFAULT_PAIR_BUDGET = 20_000_000


class OracleBudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    fine_resolution: int = 60
    random_samples: int = 1000
    seed: int = 0
    pair_budget: int = DEFAULT_PAIR_BUDGET

    def __post_init__(self):
        if self.fine_resolution < 2:
            raise ValueError("fine_resolution must be at least 2")
        if self.random_samples < 0:
            raise ValueError("random_samples must be nonnegative")


@dataclass(frozen=True)
class OracleResult:
    value: float
    x: np.ndarray
    y: np.ndarray
    support_limit: tuple[int, int]
    grid_pairs: int


def oracle_eval(A: BiQuadTensor, x, y) -> float:
    """Plain four-loop evaluation of the form."""
    a = A.data
    n, m = A.n, A.m
    total = 0.0
    for i in range(n):
        for j in range(n):
            for k in range(m):
                for l in range(m):
                    total += a[i, j, k, l] * x[i] * x[j] * y[k] * y[l]
    return float(total)


@njit(cache=True)
def _naive_min(a, X, Y):
    n = a.shape[0]
    m = a.shape[2]
    best = np.inf
    bx = 0
    by = 0
    for p in range(X.shape[0]):
        for q in range(Y.shape[0]):
            total = 0.0
            for i in range(n):
                for j in range(n):
                    for k in range(m):
                        for l in range(m):
                            total += a[i, j, k, l] * X[p, i] * X[p, j] * Y[q, k] * Y[q, l]
            if total < best:
                best = total
                bx = p
                by = q
    return best, bx, by


def _face_points(n: int, res: int, support: int) -> np.ndarray:
    """Grid points of denominator ``res`` with at most ``support`` nonzero coordinates."""
    rows = []
    for size in range(1, min(support, n) + 1):
        for idx in combinations(range(n), size):
            # compositions of res into `size` positive parts via bar positions
            for bars in combinations(range(1, res), size - 1):
                cuts = (0,) + bars + (res,)
                row = [0] * n
                for t, i in enumerate(idx):
                    row[i] = cuts[t + 1] - cuts[t]
                rows.append(row)
    return np.array(rows, dtype=np.float64) / res


def _face_count(n: int, res: int, support: int) -> int:
    return sum(math.comb(n, k) * math.comb(res - 1, k - 1) for k in range(1, min(support, n) + 1))


def _choose_support(n: int, m: int, res: int, budget: int) -> tuple[int, int]:
    for k in range(max(n, m), 0, -1):
        kx, ky = min(k, n), min(k, m)
        if _face_count(n, res, kx) * _face_count(m, res, ky) <= budget:
            return kx, ky
    raise OracleBudgetExceeded(f"even the vertex grid exceeds the budget of {budget} pairs")


def random_simplex(rng: np.random.Generator, count: int, n: int) -> np.ndarray:
    E = rng.standard_exponential((count, n))
    return E / E.sum(axis=1, keepdims=True)


def oracle_min(A: BiQuadTensor, cfg: OracleConfig = OracleConfig()) -> OracleResult:
    """Upper estimate of the minimum from a fine grid plus random samples.

    The full fine grid is used when it fits ``cfg.pair_budget``; otherwise the
    grid is restricted to the simplex faces of the largest dimension that fits
    and ``support_limit`` records how many nonzero coordinates were allowed.
    """
    n, m, res = A.n, A.m, cfg.fine_resolution
    kx, ky = _choose_support(n, m, res, cfg.pair_budget)
    X = _face_points(n, res, kx)
    Y = _face_points(m, res, ky)
    a = np.ascontiguousarray(A.data)
    best, bx, by = _naive_min(a, X, Y)
    x, y = X[bx], Y[by]
    if cfg.random_samples:
        rng = np.random.default_rng(cfg.seed)
        for _ in range(cfg.random_samples):
            xs = random_simplex(rng, 1, n)
            ys = random_simplex(rng, 1, m)
            val, _, _ = _naive_min(a, xs, ys)
            if val < best:
                best, x, y = val, xs[0], ys[0]
    return OracleResult(float(best), np.array(x), np.array(y), (kx, ky), X.shape[0] * Y.shape[0])
