from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import brentq

from bpalg.lp import (DimensionError, PNorm, as_pnorm, interpolation_bound, norming_functional,
                      op_norm, power_maximize, quotient_argmin, quotient_norm,
                      quotient_norming_functional, vec_norm)

from conftest import cvec

exponents = st.floats(1.1, 6.0)


def test_pnorm():
    assert PNorm(4).conjugate == pytest.approx(4 / 3, abs=0)
    assert as_pnorm("4/3").p == 4 / 3
    assert as_pnorm(Fraction(3, 2)).conjugate == 3.0
    assert as_pnorm("4/3").label() == "4/3"
    for bad in (1, 0.5, float("inf"), float("nan")):
        with pytest.raises(ValueError):
            PNorm(bad)


def test_vec_norm_examples():
    assert vec_norm(np.zeros(3), 3) == 0
    for p in (1.2, 2, 7):
        assert vec_norm([1, 0, 0], p) == 1
    assert vec_norm([1, 1], 3) == pytest.approx(2 ** (1 / 3), rel=1e-15)
    assert vec_norm([1e200, 1e200], 2) == pytest.approx(np.sqrt(2) * 1e200)


@given(exponents, st.integers(0, 2 ** 32 - 1))
def test_norming_functional(p, seed):
    v = cvec(np.random.default_rng(seed), 5)
    psi = norming_functional(v, p)
    assert vec_norm(psi, as_pnorm(p).conjugate) == pytest.approx(1, rel=1e-12)
    assert v @ psi == pytest.approx(vec_norm(v, p), rel=1e-12)


def test_duality_sanity_by_random_functionals():
    rng = np.random.default_rng(0)
    draws = [lambda: rng.standard_normal(3), lambda: cvec(rng, 2)]
    for p in (1.5, 3):
        q = as_pnorm(p).conjugate
        for draw in draws:
            v = draw()
            best = 0
            for _ in range(1000):
                phi = draw()
                phi /= vec_norm(phi, q)
                best = max(best, abs(v @ phi))
            assert vec_norm(v, p) * 0.98 <= best <= vec_norm(v, p) * (1 + 1e-12)


def test_op_norm_examples():
    for p in (1.5, 2, 3):
        est = op_norm(np.eye(4), p)
        assert est.lower == pytest.approx(1) and est.upper == pytest.approx(1)
        J = op_norm(np.ones((2, 2)), p)
        assert J.lower == pytest.approx(2, rel=1e-9)
    A = cvec(np.random.default_rng(3), 16).reshape(4, 4)
    est = op_norm(A, 2)
    assert abs(est.lower - np.linalg.norm(A, 2)) < 1e-8
    assert est.upper - est.lower <= 1e-8
    with pytest.raises(ValueError):
        op_norm(np.array([[np.nan]]), 3)


def test_all_ones_by_grid_search():
    # max over the unit p-sphere of ||J x||_p, by a fine grid on real directions
    p = 3.0
    t = np.linspace(0, 2 * np.pi, 20001)
    x = np.stack([np.cos(t), np.sin(t)])
    x = x / (np.abs(x) ** p).sum(axis=0) ** (1 / p)
    grid = np.max((np.abs(x.sum(axis=0)) ** p * 2) ** (1 / p))
    assert op_norm(np.ones((2, 2)), p).lower == pytest.approx(grid, rel=1e-6)


@given(st.sampled_from([4 / 3, 1.5, 3.0, 4.0]), st.integers(0, 2 ** 32 - 1))
def test_op_norm_bracket_and_witness(p, seed):
    rng = np.random.default_rng(seed)
    A = cvec(rng, 25).reshape(5, 5)
    est = op_norm(A, p, restarts=8, seed=seed)
    assert est.lower <= est.upper + 1e-12
    w = est.witness
    assert vec_norm(A @ w, p) / vec_norm(w, p) >= est.lower * (1 - 1e-9)
    # witness inequality against a second operator
    B = cvec(rng, 25).reshape(5, 5)
    eb = op_norm(B, p, restarts=8, seed=seed)
    for _ in range(5):
        x = cvec(rng, 5)
        assert vec_norm(A @ B @ x, p) <= est.upper * vec_norm(B @ x, p) * (1 + 1e-12)
        assert vec_norm(B @ x, p) <= eb.upper * vec_norm(x, p) * (1 + 1e-12)


def test_interpolation_bound_is_sound_on_random_directions():
    rng = np.random.default_rng(5)
    A = cvec(rng, 36).reshape(6, 6)
    for p in (1.3, 1.7, 2.5, 5):
        ub = interpolation_bound(A, p)
        vals, _ = power_maximize(A, p, p, restarts=16, return_all=True)
        assert vals.max() <= ub * (1 + 1e-12)


def test_deterministic_given_seed():
    A = cvec(np.random.default_rng(7), 16).reshape(4, 4)
    a, b = op_norm(A, 3, seed=11), op_norm(A, 3, seed=11)
    assert a.lower == b.lower and np.array_equal(a.witness, b.witness)


def test_quotient_examples():
    v = np.array([1.0, 0.0])
    assert quotient_norm(v, None, 3) == vec_norm(v, 3)
    assert quotient_norm(v, np.zeros((2, 0)), 3) == vec_norm(v, 3)
    Q = np.array([[1.0], [1.0]])
    assert quotient_norm(np.array([2.0, 2.0]), Q, 3) < 1e-12
    # scalar minimization of |1-t|^3 + |t|^3: derivative root by bisection
    root = brentq(lambda t: -3 * abs(1 - t) ** 2 + 3 * t ** 2 * np.sign(t), -1, 2)
    oracle = (abs(1 - root) ** 3 + abs(root) ** 3) ** (1 / 3)
    assert quotient_norm(v, Q, 3) == pytest.approx(oracle, abs=1e-10)
    with pytest.raises(DimensionError):
        quotient_norm(np.ones(3), Q, 3)


@given(st.sampled_from([1.25, 1.5, 2.0, 3.0, 5.0]), st.integers(0, 2 ** 32 - 1))
def test_quotient_is_a_seminorm_vanishing_on_Q(p, seed):
    rng = np.random.default_rng(seed)
    Q = cvec(rng, 12).reshape(6, 2)
    u, v = cvec(rng, 6), cvec(rng, 6)
    c = complex(*rng.standard_normal(2))
    nu, nv = quotient_norm(u, Q, p), quotient_norm(v, Q, p)
    assert nu <= vec_norm(u, p) + 1e-12
    assert quotient_norm(c * u, Q, p) == pytest.approx(abs(c) * nu, rel=1e-8)
    assert quotient_norm(u + v, Q, p) <= nu + nv + 1e-9
    assert quotient_norm(Q @ cvec(rng, 2), Q, p) < 1e-9
    assert quotient_norm(u + Q @ cvec(rng, 2), Q, p) == pytest.approx(nu, rel=1e-8)


@given(st.sampled_from([1.5, 3.0]), st.integers(0, 2 ** 32 - 1))
def test_quotient_optimality(p, seed):
    rng = np.random.default_rng(seed)
    Q = cvec(rng, 10).reshape(5, 2)
    v = cvec(rng, 5)
    val, w = quotient_argmin(v, Q, p)
    for _ in range(20):
        assert val <= vec_norm(w + 1e-3 * Q @ cvec(rng, 2), p) + 1e-12
    psi = quotient_norming_functional(v, Q, p)
    assert np.abs(Q.T @ psi).max() < 1e-9
    assert abs(v @ psi) == pytest.approx(val, rel=1e-7)
