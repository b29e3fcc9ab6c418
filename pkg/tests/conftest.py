import functools
import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings

from stbqp.examples import EXAMPLE_IDS, example
from stbqp.ptas_engine import DEFAULT_BUDGET, bounds
from stbqp.simplex_grid import grid_cardinality
from stbqp.table1 import LABELS, label_to_resolution
from stbqp.tensor_core import new_biquad

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_biquad(rng, n, m, scale=1.0):
    return new_biquad(n, m, rng.uniform(-scale, scale, size=(n, n, m, m)))


# ---- independent reference helpers (no engine code) ----

def compositions(n, d):
    """All nonnegative integer n-vectors summing to d, via itertools."""
    return [c for c in itertools.product(range(d + 1), repeat=n) if sum(c) == d]


def multinomial_ref(alpha):
    # product of binomials over prefix sums
    out, acc = 1, 0
    for a in alpha:
        acc += a
        out *= math.comb(acc, a)
    return out


def brute_upper(A, s, r):
    g = A.data
    best = math.inf
    for xi in compositions(A.n, s + 2):
        x = np.array(xi) / (s + 2)
        for zeta in compositions(A.m, r + 2):
            y = np.array(zeta) / (r + 2)
            best = min(best, float(np.einsum("ijkl,i,j,k,l->", g, x, x, y, y)))
    return best


def poly_mul(p, q):
    out = {}
    for a, ca in p.items():
        for b, cb in q.items():
            key = tuple(u + v for u, v in zip(a, b))
            out[key] = out.get(key, 0) + ca * cb
    return out


def linear_power(n, offset, total, k):
    """(x_1 + ... + x_n)^k as a polynomial in `total` variables, block at `offset`."""
    p = {(0,) * total: 1}
    for _ in range(k):
        step = {}
        for i in range(n):
            e = [0] * total
            e[offset + i] = 1
            step[tuple(e)] = 1
        p = poly_mul(p, step)
    return p


def expanded_coefficients(data, dims, resolutions):
    """Exact coefficients of p(x) * prod_k (sum x^(k))^{r_k}, entries taken as Fractions.

    Works for any number of modes; `data` has shape (n1, n1, ..., nd, nd).
    """
    total = sum(dims)
    offsets = np.cumsum((0,) + tuple(dims[:-1]))
    p = {}
    for idx in itertools.product(*[range(n) for n in dims for _ in (0, 1)]):
        c = Fraction(float(data[idx]))
        if c == 0:
            continue
        e = [0] * total
        for k in range(len(dims)):
            e[offsets[k] + idx[2 * k]] += 1
            e[offsets[k] + idx[2 * k + 1]] += 1
        key = tuple(e)
        p[key] = p.get(key, 0) + c
    for k, (n, r) in enumerate(zip(dims, resolutions)):
        p = poly_mul(p, linear_power(n, int(offsets[k]), total, r))
    return p, offsets


def cone_lower_reference(data, dims, resolutions):
    """max lambda such that every coefficient of (A - lambda E) * prod (sum x)^r is >= 0."""
    pa, _ = expanded_coefficients(data, dims, resolutions)
    pe, _ = expanded_coefficients(np.ones(data.shape), dims, resolutions)
    return min(pa.get(key, 0) / ce for key, ce in pe.items())


@pytest.fixture(scope="session")
def examples():
    return {i: example(i) for i in EXAMPLE_IDS}


@functools.lru_cache(maxsize=None)
def table_bounds(convention):
    """Bounds (mode both) for every example and every published (s, r) pair.

    ``convention`` is "label" (pairs are grid denominators) or "literal" (pairs
    are engine resolutions).  Cells over the default budget map to None.
    """
    out = {}
    for ex_id in EXAMPLE_IDS:
        A = example(ex_id).tensor
        for label in LABELS:
            s, r = label_to_resolution(label) if convention == "label" else label
            if grid_cardinality(A.n, s) * grid_cardinality(A.m, r) > DEFAULT_BUDGET:
                out[ex_id, label] = None
                continue
            out[ex_id, label] = bounds(A, s, r, "both")
    return out
