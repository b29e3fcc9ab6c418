"""Grid bounds for multi-quadratic forms over a product of d simplices.

Both the objective and the corrected objective contract the tensor against one
weight matrix per mode: ``x x'`` for the objective, and
``x x' - Diag(x) / (r_k + 2)`` for the corrected one.  Expanding the product of
the corrected weights yields the signed sum over mode subsets with diagonalized
index pairs.
"""

from __future__ import annotations

from itertools import combinations
from math import prod
from typing import Optional, Sequence

import numpy as np

from ..simplex_grid import grid_cardinality, lattice_array
from ..tensor_core import MultiQuadTensor
from .biquad import DEFAULT_BUDGET, BoundsReport, BudgetExceeded, check_simplex

_CHUNK_ELEMENTS = 1 << 21


def _weights(x: np.ndarray, resolution: Optional[int]) -> np.ndarray:
    W = np.multiply.outer(x, x)
    if resolution is not None:
        W = W - np.diag(x) / (resolution + 2)
    return W


def _contract_point(M: MultiQuadTensor, points, resolutions: Optional[Sequence[int]]) -> float:
    if len(points) != M.d:
        raise ValueError(f"expected {M.d} points, got {len(points)}")
    R = M.data
    for k, (x, n) in enumerate(zip(points, M.dims)):
        x = check_simplex(x, f"x^({k + 1})")
        if x.size != n:
            raise ValueError(f"point {k + 1} has size {x.size}, mode has dimension {n}")
        W = _weights(x, None if resolutions is None else resolutions[k])
        R = np.tensordot(W, R, axes=([0, 1], [0, 1]))
    return float(R)


def evaluate_multi(M: MultiQuadTensor, points) -> float:
    return _contract_point(M, points, None)


def multi_corrected_objective(M: MultiQuadTensor, resolutions: Sequence[int], points) -> float:
    resolutions = _check_resolutions(M, resolutions)
    return _contract_point(M, points, resolutions)


def elementary_symmetric(values: Sequence[int], k: int) -> int:
    if k < 0 or k > len(values):
        return 0
    return sum(prod(c) for c in combinations(values, k))


def tau(resolutions: Sequence[int], d: Optional[int] = None) -> int:
    """e_{d-1} + e_{d-3} + ... of the grid denominators r_k + 2."""
    d = len(resolutions) if d is None else d
    if d < 1 or len(resolutions) != d:
        raise ValueError(f"need d >= 1 resolutions, got {list(resolutions)} with d={d}")
    vals = [r + 2 for r in resolutions]
    return sum(elementary_symmetric(vals, k) for k in range(d - 1, -1, -2))


def tau_bar(resolutions: Sequence[int], d: Optional[int] = None) -> int:
    """prod(r_k + 2) - prod(r_k + 1) + e_{d-2} + e_{d-4} + ... ."""
    d = len(resolutions) if d is None else d
    if d < 1 or len(resolutions) != d:
        raise ValueError(f"need d >= 1 resolutions, got {list(resolutions)} with d={d}")
    vals = [r + 2 for r in resolutions]
    out = prod(vals) - prod(r + 1 for r in resolutions)
    return out + sum(elementary_symmetric(vals, k) for k in range(d - 2, -1, -2))


def _check_resolutions(M: MultiQuadTensor, resolutions: Sequence[int]) -> tuple[int, ...]:
    res = tuple(int(r) for r in resolutions)
    if len(res) != M.d:
        raise ValueError(f"expected {M.d} resolutions, got {len(res)}")
    if any(r < 0 for r in res):
        raise ValueError(f"resolutions must be nonnegative, got {list(res)}")
    return res


def _grid_scan(M: MultiQuadTensor, res: tuple[int, ...], corrected: bool):
    lattices = [lattice_array(n, r + 2) for n, r in zip(M.dims, res)]
    weights = []
    for L, r in zip(lattices, res):
        X = L / (r + 2)
        W = np.einsum("gi,gj->gij", X, X)
        if corrected:
            W = W - np.einsum("gi,ij->gij", X, np.eye(X.shape[1])) / (r + 2)
        weights.append(W.reshape(W.shape[0], -1))
    sizes = [L.shape[0] for L in lattices]
    tail = prod(sizes[1:])
    widest = max([1] + [n * n for n in M.dims[1:]])
    chunk = max(1, _CHUNK_ELEMENTS // (tail * widest))
    T = M.data.reshape([n * n for n in M.dims])

    best, best_index = np.inf, None
    for lo in range(0, sizes[0], chunk):
        hi = min(lo + chunk, sizes[0])
        R = np.tensordot(weights[0][lo:hi], T, axes=([1], [0]))
        for W in weights[1:]:
            R = np.tensordot(R, W, axes=([1], [1]))
        flat = R.reshape(-1)
        pos = int(np.argmin(flat))
        if flat[pos] < best:
            best = float(flat[pos])
            best_index = (lo + pos // tail,) + np.unravel_index(pos % tail, sizes[1:])
    argmin = tuple(tuple(int(c) for c in L[int(i)]) for L, i in zip(lattices, best_index))
    return best, argmin


def multi_bounds(M: MultiQuadTensor, resolutions: Sequence[int], mode: str = "both",
                 budget: Optional[int] = None) -> BoundsReport:
    """Upper and lower bounds on the minimum over the product of grids."""
    res = _check_resolutions(M, resolutions)
    if mode not in ("upper", "lower", "both"):
        raise ValueError(f"mode must be upper, lower or both, got {mode!r}")
    n_points = prod(grid_cardinality(n, r) for n, r in zip(M.dims, res))
    budget = DEFAULT_BUDGET if budget is None else budget
    if n_points > budget:
        raise BudgetExceeded(f"grid has {n_points} points, budget is {budget}")
    p_up = p_lo = arg_up = arg_lo = None
    if mode in ("upper", "both"):
        p_up, arg_up = _grid_scan(M, res, corrected=False)
    if mode in ("lower", "both"):
        val, arg_lo = _grid_scan(M, res, corrected=True)
        p_lo = prod(r + 2 for r in res) / prod(r + 1 for r in res) * val
    t = tau(res)
    return BoundsReport(
        resolutions=res,
        p_upper=p_up,
        p_lower=p_lo,
        argmin_upper=arg_up,
        argmin_lower=arg_lo,
        upper_coeff=t / prod(r + 2 for r in res),
        lower_coeff=t / prod(r + 1 for r in res),
        range_bound=float(np.max(M.data) - np.min(M.data)),
        points_evaluated=n_points,
    )
