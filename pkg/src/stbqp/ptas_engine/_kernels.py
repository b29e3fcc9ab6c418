"""Compiled grid-scan kernels.

Everything works in integer lattice units: for xi in I(n, D1) and zeta in
I(m, D2) the kernels evaluate

    upper:  sum_ijkl g_ijkl xi_i xi_j zeta_k zeta_l
    lower:  the same minus sum_i xi_i zeta' A_i zeta minus sum_k zeta_k xi' B_k xi
            plus xi' C zeta

and leave the single division by the grid denominators to the caller.  For a
fixed xi both are ``zeta' M zeta + w' zeta``; the inner loop walks I(m, D2) in
reverse-lex order updating prefix sums so the two trailing coordinates cost
O(1) per point.  Per-point arithmetic depends only on (xi, zeta), never on how
the xi stream was chunked, which keeps parallel scans bitwise reproducible.
"""

import numpy as np
from numba import njit

MODE_UPPER = 0
MODE_LOWER = 1


@njit(cache=True, nogil=True)
def _form_for_xi(g, xi, mode, M, w):
    n = g.shape[0]
    m = g.shape[2]
    for k in range(m):
        for l in range(m):
            acc = 0.0
            for i in range(n):
                xi_i = xi[i]
                if xi_i == 0.0:
                    continue
                row = 0.0
                for j in range(n):
                    row += g[i, j, k, l] * xi[j]
                acc += xi_i * row
            M[k, l] = acc
    for k in range(m):
        w[k] = 0.0
    if mode == MODE_LOWER:
        for k in range(m):
            lin = 0.0
            for i in range(n):
                lin += g[i, i, k, k] * xi[i]
            w[k] = lin - M[k, k]
        for k in range(m):
            for l in range(m):
                corr = 0.0
                for i in range(n):
                    corr += g[i, i, k, l] * xi[i]
                M[k, l] -= corr


@njit(cache=True, nogil=True)
def scan_form(M, w, D, stop_below):
    """Scan zeta over I(m, D) for the form zeta' M zeta + w' zeta.

    Returns (min, argmin_rank, max, first_rank_below).  When a value below
    ``stop_below`` is met the scan stops early and the last entry holds its rank;
    otherwise that entry is -1.
    """
    m = M.shape[0]
    best = np.inf
    best_rank = -1
    worst = -np.inf
    if m == 1:
        c = float(D)
        val = c * (c * M[0, 0] + w[0])
        if val < stop_below:
            return val, 0, val, 0
        return val, 0, val, -1

    L = m - 2
    p = np.zeros(max(L, 1), dtype=np.int64)
    if L > 0:
        p[0] = D
    V = np.zeros((L + 1, m))
    Q = np.zeros(L + 1)
    S = np.zeros(L + 1, dtype=np.int64)
    level = 0
    rank = 0
    m11 = M[L, L]
    m22 = M[L + 1, L + 1]
    m12 = M[L + 1, L]
    while True:
        for k in range(level, L):
            c = float(p[k])
            Q[k + 1] = Q[k] + c * (2.0 * V[k, k] + w[k]) + c * c * M[k, k]
            for t in range(m):
                V[k + 1, t] = V[k, t] + c * M[t, k]
            S[k + 1] = S[k] + p[k]
        R = D - S[L]
        q0 = Q[L]
        a1 = 2.0 * V[L, L] + w[L]
        a2 = 2.0 * V[L, L + 1] + w[L + 1]
        for c1i in range(R, -1, -1):
            c1 = float(c1i)
            c2 = float(R - c1i)
            val = q0 + c1 * (a1 + c1 * m11) + c2 * (a2 + 2.0 * c1 * m12 + c2 * m22)
            if val < best:
                best = val
                best_rank = rank
            if val > worst:
                worst = val
            if val < stop_below:
                return best, best_rank, worst, rank
            rank += 1
        t = L - 1
        while t >= 0 and p[t] == 0:
            t -= 1
        if t < 0:
            break
        p[t] -= 1
        if t + 1 < L:
            p[t + 1] = D - (S[t] + p[t])
            for u in range(t + 2, L):
                p[u] = 0
        level = t
    return best, best_rank, worst, -1


@njit(cache=True, nogil=True)
def scan_rows(g, xis, D, mode, stop_below):
    """Reduce a contiguous block of xi rows against the full zeta lattice.

    Returns (min, row, rank, max, hit_row, hit_rank); ``row``/``hit_row`` are
    local to ``xis`` and ``hit_*`` are -1 when nothing fell below ``stop_below``.
    """
    m = g.shape[2]
    M = np.empty((m, m))
    w = np.empty(m)
    best = np.inf
    best_row = -1
    best_rank = -1
    worst = -np.inf
    for row in range(xis.shape[0]):
        _form_for_xi(g, xis[row], mode, M, w)
        lo, lo_rank, hi, hit = scan_form(M, w, D, stop_below)
        if lo < best:
            best = lo
            best_row = row
            best_rank = lo_rank
        if hi > worst:
            worst = hi
        if hit >= 0:
            return best, best_row, best_rank, worst, row, hit
    return best, best_row, best_rank, worst, -1, -1
