import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_biquad
from stbqp.oracle import (
    OracleBudgetExceeded,
    OracleConfig,
    _choose_support,
    _face_count,
    _face_points,
    oracle_eval,
    oracle_min,
    random_simplex,
)
from stbqp.ptas_engine import evaluate_biquadratic, lower_bound, upper_bound
from stbqp.simplex_grid import lattice_count

seeds = st.integers(0, 2**32 - 1)


@given(seeds, st.integers(1, 4), st.integers(1, 4))
def test_oracle_eval_agrees_with_engine(seed, n, m):
    rng = np.random.default_rng(seed)
    A = random_biquad(rng, n, m)
    x, y = random_simplex(rng, 1, n)[0], random_simplex(rng, 1, m)[0]
    assert oracle_eval(A, x, y) == pytest.approx(evaluate_biquadratic(A, x, y), rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("n,res", [(1, 5), (2, 6), (3, 4), (4, 3)])
def test_face_points_full_support_is_the_whole_grid(n, res):
    X = _face_points(n, res, n)
    assert X.shape[0] == lattice_count(n, res) == _face_count(n, res, n)
    assert np.allclose(X.sum(axis=1), 1.0)
    assert len({tuple(row) for row in X}) == X.shape[0]


def test_face_points_restricted_support():
    X = _face_points(4, 6, 2)
    assert X.shape[0] == 4 + math.comb(4, 2) * 5
    assert ((X > 0).sum(axis=1) <= 2).all()


def test_choose_support():
    assert _choose_support(3, 3, 60, 10**7) == (3, 3)
    assert _choose_support(5, 8, 60, 2 * 10**7) == (2, 2)
    with pytest.raises(OracleBudgetExceeded):
        _choose_support(5, 8, 60, 10)


def test_random_simplex_is_seeded():
    a = random_simplex(np.random.default_rng(7), 3, 4)
    b = random_simplex(np.random.default_rng(7), 3, 4)
    assert np.array_equal(a, b)
    assert np.allclose(a.sum(axis=1), 1.0) and (a >= 0).all()


def test_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(fine_resolution=1)
    with pytest.raises(ValueError):
        OracleConfig(random_samples=-1)


@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_oracle_min_sits_between_the_bounds(seed, n, m):
    A = random_biquad(np.random.default_rng(seed), n, m)
    res = oracle_min(A, OracleConfig(fine_resolution=12, random_samples=50, seed=seed))
    assert res.support_limit == (n, m)
    # 12 = 4 * 3 = 6 * 2: the grids of denominators 2, 3, 4, 6 are subsets
    for s in (0, 1, 2, 4):
        assert res.value <= upper_bound(A, s, s)[0] + 1e-12
    assert lower_bound(A, 2, 2)[0] <= res.value + 1e-12
    assert oracle_eval(A, res.x, res.y) == pytest.approx(res.value, rel=1e-10, abs=1e-12)
