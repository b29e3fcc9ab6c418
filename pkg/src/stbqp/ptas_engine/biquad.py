"""Grid bounds, Q-bar coefficients and polyhedral cone membership for StBQP."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from ..simplex_grid import (
    LatticePoint,
    chunk_bounds,
    grid_cardinality,
    lattice_array,
    multinomial,
    shift_down,
    unrank,
)
from ..tensor_core import BiQuadTensor, CorrectionSlices, slices
from . import _kernels

DEFAULT_BUDGET = 10**9
DEFAULT_TOLERANCE = 1e-9
SIMPLEX_TOL = 1e-9
THREADS_ENV = "STBQP_THREADS"


class BudgetExceeded(RuntimeError):
    """A grid scan would visit more points than the configured budget."""


def default_workers() -> int:
    """Worker count from ``$STBQP_THREADS`` (advisory), else 1."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def check_simplex(x, name: str = "x") -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ValueError(f"{name} must be a nonempty vector")
    if not np.all(np.isfinite(x)) or np.min(x) < -SIMPLEX_TOL or abs(float(np.sum(x)) - 1.0) > SIMPLEX_TOL:
        raise ValueError(f"{name} is not a point of the standard simplex")
    return x


@dataclass(frozen=True)
class BoundsReport:
    """Result of a bound computation on a product of simplex grids.

    ``resolutions`` holds (s, r) for StBQP or (r_1, ..., r_d) in general; the
    grid of mode k has denominator ``resolutions[k] + 2``.  Argmins are lattice
    points, one per mode.  ``range_bound`` stands in for p_max - p_min in the
    error certificate; ``grid_max`` is the uncertified grid maximum.
    """

    resolutions: tuple[int, ...]
    p_upper: Optional[float]
    p_lower: Optional[float]
    argmin_upper: Optional[tuple[LatticePoint, ...]]
    argmin_lower: Optional[tuple[LatticePoint, ...]]
    upper_coeff: float
    lower_coeff: float
    range_bound: float
    points_evaluated: int
    grid_max: Optional[float] = None

    def grid_point(self, which: str = "upper") -> tuple[tuple[Fraction, ...], ...]:
        pts = self.argmin_upper if which == "upper" else self.argmin_lower
        if pts is None:
            raise ValueError(f"no {which} argmin in this report")
        return tuple(tuple(Fraction(c, r + 2) for c in p) for p, r in zip(pts, self.resolutions))

    @property
    def certified_upper_gap(self) -> float:
        """Certified bound on p_upper - p_min."""
        return self.upper_coeff * self.range_bound

    @property
    def certified_lower_gap(self) -> float:
        """Certified bound on p_min - p_lower."""
        return self.lower_coeff * self.range_bound


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    witness: Optional[tuple[LatticePoint, LatticePoint]] = None
    witness_value: Optional[float] = None


@dataclass(frozen=True)
class _ScanResult:
    value: float
    xi: LatticePoint
    zeta: LatticePoint
    max_value: float
    hit: Optional[tuple[LatticePoint, LatticePoint]] = field(default=None)
    hit_value: Optional[float] = None


def _scan(A: BiQuadTensor, s: int, r: int, mode: int, *, workers: Optional[int],
          budget: Optional[int], stop_below: float = -np.inf) -> _ScanResult:
    if s < 0 or r < 0:
        raise ValueError(f"s and r must be nonnegative, got s={s}, r={r}")
    n_points = grid_cardinality(A.n, s) * grid_cardinality(A.m, r)
    budget = DEFAULT_BUDGET if budget is None else budget
    if n_points > budget:
        raise BudgetExceeded(f"grid has {n_points} points, budget is {budget}")
    workers = default_workers() if workers is None else workers
    xis_int = lattice_array(A.n, s + 2)
    xis = xis_int.astype(np.float64)
    D = r + 2
    g = A.data

    def run(bounds):
        lo, hi = bounds
        return lo, _kernels.scan_rows(g, xis[lo:hi], D, mode, stop_below)

    parts = chunk_bounds(xis.shape[0], workers)
    if len(parts) == 1:
        results = [run(parts[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(parts)) as pool:
            results = list(pool.map(run, parts))

    best, best_row, best_rank = np.inf, -1, -1
    worst = -np.inf
    hit = hit_value = None
    # chunks arrive in stream order, so strict comparisons keep the first attainer
    for lo, (val, row, rank, hi_val, hit_row, hit_rank) in results:
        if val < best:
            best, best_row, best_rank = val, lo + row, rank
        if hi_val > worst:
            worst = hi_val
        if hit is None and hit_row >= 0:
            # a chunk stops at its first violation, so its minimum is that value
            hit = (tuple(int(c) for c in xis_int[lo + hit_row]), unrank(A.m, D, int(hit_rank)))
            hit_value = float(val)
    xi = tuple(int(c) for c in xis_int[best_row])
    zeta = unrank(A.m, D, int(best_rank))
    return _ScanResult(float(best), xi, zeta, float(worst), hit, hit_value)


def evaluate_biquadratic(A: BiQuadTensor, x, y) -> float:
    """p_A(x, y) = y' (A x x') y."""
    x = check_simplex(x, "x")
    y = check_simplex(y, "y")
    if x.size != A.n or y.size != A.m:
        raise ValueError(f"point sizes ({x.size}, {y.size}) do not match tensor ({A.n}, {A.m})")
    M = np.einsum("ijkl,i,j->kl", A.data, x, x)
    return float(y @ M @ y)


def corrected_objective(A: BiQuadTensor, S: CorrectionSlices, x, y) -> float:
    """The objective minus the scaled diagonal-slice corrections for S's (s, r)."""
    p = evaluate_biquadratic(A, x, y)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    a_term = float(np.einsum("i,k,ikl,l->", x, y, S.A_scaled, y))
    b_term = float(np.einsum("k,i,kij,j->", y, x, S.B_scaled, x))
    c_term = float(x @ S.C_scaled @ y)
    return p - a_term - b_term + c_term


def _degree(point: LatticePoint, expected: Optional[int], name: str) -> int:
    d = sum(point)
    if any(c < 0 for c in point):
        raise ValueError(f"{name} has a negative coordinate")
    if d < 2:
        raise ValueError(f"{name} must have degree at least 2, got {d}")
    if expected is not None and d != expected + 2:
        raise ValueError(f"{name} has degree {d}, expected {expected + 2}")
    return d


def q_bar(G: BiQuadTensor, xi: LatticePoint, zeta: LatticePoint,
          s: Optional[int] = None, r: Optional[int] = None) -> float:
    """Coefficient of x^xi y^zeta in p_G(x,y) (sum x)^s (sum y)^r, closed form."""
    D1 = _degree(xi, s, "xi")
    D2 = _degree(zeta, r, "zeta")
    sl = slices(G, D1 - 2, D2 - 2)
    u = np.asarray(xi, dtype=np.float64)
    v = np.asarray(zeta, dtype=np.float64)
    main = float(np.einsum("ijkl,i,j,k,l->", G.data, u, u, v, v))
    a_term = float(np.einsum("i,k,ikl,l->", u, v, sl.A, v))
    b_term = float(np.einsum("k,i,kij,j->", v, u, sl.B, u))
    c_term = float(u @ sl.C @ v)
    scale = multinomial(xi) * multinomial(zeta) / (D1 * (D1 - 1) * D2 * (D2 - 1))
    return scale * (main - a_term - b_term + c_term)


def q_bar_definitional(G: BiQuadTensor, xi: LatticePoint, zeta: LatticePoint) -> float:
    """Same coefficient as :func:`q_bar`, summed term by term over index quadruples."""
    _degree(xi, None, "xi")
    _degree(zeta, None, "zeta")
    n, m = G.n, G.m
    x_shift = {(i, j): shift_down(xi, i, j) for i in range(n) for j in range(n)}
    y_shift = {(k, l): shift_down(zeta, k, l) for k in range(m) for l in range(m)}
    total = 0.0
    for (i, j), a in x_shift.items():
        if a is None:
            continue
        ca = multinomial(a)
        for (k, l), b in y_shift.items():
            if b is None:
                continue
            total += G.data[i, j, k, l] * ca * multinomial(b)
    return total


def membership_expression(G: BiQuadTensor, xi: LatticePoint, zeta: LatticePoint) -> float:
    """The bracketed lattice expression whose sign decides cone membership."""
    sl = slices(G, 0, 0)
    u = np.asarray(xi, dtype=np.float64)
    v = np.asarray(zeta, dtype=np.float64)
    return float(np.einsum("ijkl,i,j,k,l->", G.data, u, u, v, v)
                 - np.einsum("i,k,ikl,l->", u, v, sl.A, v)
                 - np.einsum("k,i,kij,j->", v, u, sl.B, u)
                 + u @ sl.C @ v)


def upper_bound(A: BiQuadTensor, s: int, r: int, *, workers: Optional[int] = None,
                budget: Optional[int] = None) -> tuple[float, tuple[LatticePoint, LatticePoint]]:
    """Grid minimum of p_A; returns the value and the first attaining lattice pair."""
    res = _scan(A, s, r, _kernels.MODE_UPPER, workers=workers, budget=budget)
    return res.value / ((s + 2) ** 2 * (r + 2) ** 2), (res.xi, res.zeta)


def lower_bound(A: BiQuadTensor, s: int, r: int, *, workers: Optional[int] = None,
                budget: Optional[int] = None) -> tuple[float, tuple[LatticePoint, LatticePoint]]:
    """Largest lambda with A - lambda E in the (s, r) polyhedral cone, via the grid formula."""
    res = _scan(A, s, r, _kernels.MODE_LOWER, workers=workers, budget=budget)
    return res.value / ((s + 1) * (s + 2) * (r + 1) * (r + 2)), (res.xi, res.zeta)


def error_coefficients(s: int, r: int) -> tuple[float, float]:
    """(lower_coeff, upper_coeff) multiplying p_max - p_min in the error bounds."""
    if s < 0 or r < 0:
        raise ValueError(f"s and r must be nonnegative, got s={s}, r={r}")
    num = s + r + 4
    return num / ((s + 1) * (r + 1)), num / ((s + 2) * (r + 2))


def range_bound(A: BiQuadTensor) -> float:
    return float(np.max(A.data) - np.min(A.data))


def bounds(A: BiQuadTensor, s: int, r: int, mode: str = "both", *,
           workers: Optional[int] = None, budget: Optional[int] = None) -> BoundsReport:
    """Run the requested scans and package them with the error certificate."""
    if mode not in ("upper", "lower", "both"):
        raise ValueError(f"mode must be upper, lower or both, got {mode!r}")
    p_up = p_lo = arg_up = arg_lo = grid_max = None
    if mode in ("upper", "both"):
        res = _scan(A, s, r, _kernels.MODE_UPPER, workers=workers, budget=budget)
        denom = (s + 2) ** 2 * (r + 2) ** 2
        p_up, arg_up, grid_max = res.value / denom, (res.xi, res.zeta), res.max_value / denom
    if mode in ("lower", "both"):
        p_lo, arg_lo = lower_bound(A, s, r, workers=workers, budget=budget)
    lower_coeff, upper_coeff = error_coefficients(s, r)
    return BoundsReport(
        resolutions=(int(s), int(r)),
        p_upper=p_up,
        p_lower=p_lo,
        argmin_upper=arg_up,
        argmin_lower=arg_lo,
        upper_coeff=upper_coeff,
        lower_coeff=lower_coeff,
        range_bound=range_bound(A),
        points_evaluated=grid_cardinality(A.n, s) * grid_cardinality(A.m, r),
        grid_max=grid_max,
    )


def cone_membership(G: BiQuadTensor, s: int, r: int, tolerance: float = DEFAULT_TOLERANCE, *,
                    workers: Optional[int] = None, budget: Optional[int] = None) -> MembershipResult:
    """Test every lattice expression against ``-tolerance``; report the first violation."""
    if tolerance < 0:
        raise ValueError("tolerance must be nonnegative")
    res = _scan(G, s, r, _kernels.MODE_LOWER, workers=workers, budget=budget, stop_below=-tolerance)
    if res.hit is None:
        return MembershipResult(True)
    return MembershipResult(False, res.hit, res.hit_value)


def certify_shift(A: BiQuadTensor, lam: float, s: int, r: int, tolerance: float = DEFAULT_TOLERANCE, *,
                  workers: Optional[int] = None, budget: Optional[int] = None) -> MembershipResult:
    """Is lambda feasible, i.e. A - lambda E inside the (s, r) cone?"""
    return cone_membership(A.shifted(-lam), s, r, tolerance, workers=workers, budget=budget)
