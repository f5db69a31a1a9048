import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bpalg.groups import GroupFunction, convolve, cyclic, random_function, symmetric
from bpalg.lp import DimensionError, vec_norm
from bpalg.repspace import (DualVector, RepRegistry, Representation, RepresentationError,
                            SubquotientSpace, all_characters, check_representation,
                            coefficient_function, cyclic_subrep, direct_sum, dual_space,
                            make_character, make_regular, make_trivial, minimal_norm_extension,
                            random_monomial_rep, restrict_functional, subquotient_op_norm,
                            sum_offsets, with_exponent)

from conftest import SMALL_GROUPS, cvec


def random_subquotient(rng, N=6, s=4, q=1, p=3.0):
    S = cvec(rng, N * s).reshape(N, s)
    Q = S @ cvec(rng, s * q).reshape(s, q)
    return SubquotientSpace(N, p, S, Q)


def subgroup_average(G, gen):
    """Indicator of the cyclic subgroup generated by ``gen``, normalised to mass 1."""
    e = np.zeros(G.order)
    x = 0
    while True:
        e[x] = 1
        x = G.mul(x, gen)
        if x == 0:
            break
    return GroupFunction(G, e / e.sum())


def test_space_validation():
    with pytest.raises(DimensionError):
        SubquotientSpace(3, 2, np.ones((3, 2)))                 # dependent S
    S = np.eye(3)[:, :2]
    with pytest.raises(DimensionError):
        SubquotientSpace(3, 2, S, np.eye(3)[:, 2])              # Q outside S
    E = SubquotientSpace(3, 2, S, S[:, 0])
    assert E.dim == 1 and E.coord_dim == 2


def test_dual_space_examples(rng):
    full = SubquotientSpace.full(4, 3)
    D = dual_space(full)
    assert D.p == pytest.approx(1.5) and D.dim == 4
    E = random_subquotient(rng)
    assert dual_space(E).dim == E.dim
    DD = dual_space(dual_space(E))
    for _ in range(50):
        a = E.random_vector(rng)
        v = E.ambient(a)
        assert DD.norm(DD.coordinates(v)) == pytest.approx(E.norm(a), rel=1e-8)


def test_dual_pairing_is_well_defined_on_cosets(rng):
    E = random_subquotient(rng)
    phi = DualVector.from_coordinates(E, cvec(rng, dual_space(E).coord_dim))
    a = E.random_vector(rng)
    assert phi.pair(a + E.Q_coords @ cvec(rng, 1)) == pytest.approx(phi.pair(a), abs=1e-10)
    # |phi(a)| <= |phi| |a| and the norming functional attains it
    assert abs(phi.pair(a)) <= phi.norm() * E.norm(a) * (1 + 1e-9)
    psi = DualVector(E, E.norming_functional(a))
    assert psi.norm() <= 1 + 1e-9
    assert psi.pair(a).real == pytest.approx(E.norm(a), rel=1e-8)
    with pytest.raises(DimensionError):
        DualVector(E, E.Q[:, 0].conj())


def test_regular_examples():
    assert make_regular(cyclic(1), 2).ops.tolist() == [[[1]]]
    R = make_regular(cyclic(2), 3)
    assert np.array_equal(R.ops[1], [[0, 1], [1, 0]])
    assert check_representation(make_regular(symmetric(3), 1.5)).ok


def test_trivial_rep_coefficients_are_constant(rng):
    G = symmetric(3)
    E = random_subquotient(rng)
    T = make_trivial(E, G)
    a = E.random_vector(rng)
    phi = DualVector(E, E.norming_functional(E.random_vector(rng)))
    f = coefficient_function(T, a, phi)
    assert np.allclose(f.values, phi.pair(a))
    one = make_trivial(SubquotientSpace.full(1, 2), G)
    assert np.allclose(coefficient_function(one, [1], DualVector(one.space, [1])).values, 1)
    assert check_representation(T).ok


def test_coefficient_examples():
    R = make_regular(cyclic(2), 2)
    f = coefficient_function(R, [1, 0], DualVector(R.space, [1, 0]))
    assert np.allclose(f.values, [1, 0])
    assert np.allclose(coefficient_function(R, [0, 0], DualVector(R.space, [1, 0])).values, 0)
    with pytest.raises(DimensionError):
        coefficient_function(R, [1, 0], DualVector(SubquotientSpace.full(2, 3), [1, 0]))


def test_scaled_op_fails_check():
    R = make_regular(symmetric(3), 3)
    ops = np.array(R.ops)
    ops[1] *= 2
    bad = Representation(R.group, R.space, ops, validate=False)
    rep = check_representation(bad)
    assert not rep.ok
    assert rep.isometry_error == pytest.approx(1.0)
    with pytest.raises(RepresentationError):
        Representation(R.group, R.space, ops)


@given(st.sampled_from(list(SMALL_GROUPS)), st.sampled_from([1.5, 2.0, 4.0]),
       st.integers(0, 2 ** 32 - 1))
def test_random_monomial_reps_pass(name, p, seed):
    G = SMALL_GROUPS[name]()
    rep = random_monomial_rep(G, np.random.default_rng(seed), p)
    assert check_representation(rep).ok


def test_characters_are_reps():
    for rep in all_characters(SMALL_GROUPS["Z2xZ2"](), 3):
        assert check_representation(rep).ok
    with pytest.raises(RepresentationError):
        make_character(cyclic(3), [1, 1j, 1], 2)


def test_direct_sum_examples(rng):
    G = cyclic(2)
    R = make_regular(G, 2)
    assert direct_sum([R]) is R
    T = make_trivial(SubquotientSpace.full(1, 2), G)
    D = direct_sum([R, T])
    assert D.space.coord_dim == 3
    a = cvec(rng, 3)
    assert D.space.norm(a) == pytest.approx(np.sqrt(vec_norm(a[:2], 2) ** 2 + abs(a[2]) ** 2))
    assert D.space.norm([*a[:2], 0]) == pytest.approx(vec_norm(a[:2], 2))
    assert check_representation(D).ok
    with pytest.raises(ValueError):
        direct_sum([R, make_regular(G, 3)])


def test_direct_sum_of_subquotients_has_lp_sum_norm(rng):
    E1, E2 = random_subquotient(rng, p=3), random_subquotient(rng, N=5, s=3, p=3)
    G = cyclic(3)
    D = direct_sum([make_trivial(E1, G), make_trivial(E2, G)])
    a, b = E1.random_vector(rng), E2.random_vector(rng)
    expect = (E1.norm(a) ** 3 + E2.norm(b) ** 3) ** (1 / 3)
    assert D.space.norm(np.concatenate([a, b])) == pytest.approx(expect, rel=1e-8)


@given(st.sampled_from(list(SMALL_GROUPS)), st.integers(1, 3), st.integers(0, 2 ** 32 - 1))
def test_direct_sum_realises_sum_of_coefficients(name, k, seed):
    G = SMALL_GROUPS[name]()
    rng = np.random.default_rng(seed)
    reps = [random_monomial_rep(G, rng, 1.5) for _ in range(k)] + [make_regular(G, 1.5)]
    D = direct_sum(reps)
    xis = [r.space.random_vector(rng) for r in reps]
    phis = [DualVector(r.space, cvec(rng, r.space.ambient_dim)) for r in reps]
    total = sum(coefficient_function(r, x, f).values for r, x, f in zip(reps, xis, phis))
    big = np.concatenate([f.ambient for f in phis])
    assert sum_offsets(reps)[-1] == sum(r.space.coord_dim for r in reps[:-1])
    g = coefficient_function(D, np.concatenate(xis), DualVector(D.space, big))
    assert np.abs(g.values - total).max() <= 1e-10 * max(1, np.abs(total).max())


@given(st.sampled_from(list(SMALL_GROUPS)), st.sampled_from([4 / 3, 3.0]),
       st.integers(0, 2 ** 32 - 1))
def test_coefficient_sup_bound(name, p, seed):
    G = SMALL_GROUPS[name]()
    rng = np.random.default_rng(seed)
    rep = random_monomial_rep(G, rng, p)
    a = rep.space.random_vector(rng)
    phi = DualVector(rep.space, cvec(rng, rep.space.ambient_dim))
    f = coefficient_function(rep, a, phi)
    assert f.sup_norm() <= rep.space.norm(a) * phi.norm() * (1 + 1e-12)


def test_cyclic_subrep_examples():
    G = cyclic(2)
    R = make_regular(G, 3)
    assert cyclic_subrep(R, [1, 0]).rep.space.dim == 2
    assert cyclic_subrep(R, [1, 1]).rep.space.dim == 1
    T = make_trivial(SubquotientSpace.full(2, 3), symmetric(3))
    assert cyclic_subrep(T, [1, 0]).rep.space.dim == 1
    with pytest.raises(ValueError):
        cyclic_subrep(R, [0, 0])


@given(st.sampled_from(list(SMALL_GROUPS)), st.sampled_from([1.5, 3.0]),
       st.integers(0, 2 ** 32 - 1))
def test_cyclic_subrep_preserves_coefficients(name, p, seed):
    G = SMALL_GROUPS[name]()
    rng = np.random.default_rng(seed)
    R = make_regular(G, p)
    gen = int(rng.integers(G.order))
    xi = convolve(random_function(G, rng), subgroup_average(G, gen)).values
    cyc = cyclic_subrep(R, xi)
    assert check_representation(cyc.rep).ok
    phi = DualVector(R.space, cvec(rng, G.order))
    psi = restrict_functional(phi, cyc.rep)
    f = coefficient_function(R, xi, phi)
    g = coefficient_function(cyc.rep, cyc.vector, psi)
    assert np.abs(f.values - g.values).max() <= 1e-10 * max(1, f.sup_norm())
    assert cyc.rep.space.norm(cyc.vector) == pytest.approx(R.space.norm(xi), rel=1e-10)
    assert psi.norm() <= phi.norm() * (1 + 1e-10)
    ext = minimal_norm_extension(psi, R.space)
    assert ext.norm() == pytest.approx(psi.norm(), rel=1e-8)
    assert np.abs(coefficient_function(R, xi, ext).values - f.values).max() <= 1e-8 * max(1, f.sup_norm())


def test_subquotient_op_norm_matches_hilbert_value(rng):
    G = symmetric(3)
    R = make_regular(G, 2)
    xi = convolve(random_function(G, rng), subgroup_average(G, 1)).values
    sub = cyclic_subrep(R, xi).rep
    f = random_function(G, rng)
    est = subquotient_op_norm(sub.space, sub.operator(f))
    C = sub.space.complement_basis
    exact = np.linalg.norm(C.conj().T @ sub.ambient_operator(sub.operator(f)) @ C, 2)
    assert est.lower == pytest.approx(exact, rel=1e-10)


def test_subquotient_op_norm_lower_has_a_witness(rng):
    E = random_subquotient(rng, p=3)
    T = make_trivial(E, cyclic(2))
    A = cvec(rng, E.coord_dim ** 2).reshape(E.coord_dim, -1)
    # make A respect Q: project its action so Q_coords maps into itself
    Qc = E.Q_coords
    P = Qc @ np.linalg.pinv(Qc)
    A = A - (np.eye(E.coord_dim) - P) @ A @ P
    est = subquotient_op_norm(E, A)
    w = est.witness
    assert E.norm(A @ w) / E.norm(w) == pytest.approx(est.lower, rel=1e-9)
    assert est.lower <= est.upper
    assert subquotient_op_norm(E, T.ops[0]).lower == pytest.approx(1, rel=1e-8)


def test_registry_class_inclusion():
    G = cyclic(3)
    reg = RepRegistry()
    for p in (2.0, 3.0, 1.5, 4 / 3):
        reg.register(make_regular(G, p))
    snap = reg.snapshot()
    reg.register(make_regular(G, 5.0))
    assert len(snap) == 4 and len(reg) == 5
    members = {r.p for r in reg.members(4)}
    assert members == {2.0, 3.0}
    assert {r.p for r in reg.members(4 / 3)} == {4 / 3, 1.5, 2.0}
    # reinterpreting a 2-rep at exponent 3 keeps it a representation
    assert check_representation(with_exponent(make_regular(G, 2.0), 3.0)).ok


def test_json_roundtrip(rng):
    rep = random_monomial_rep(symmetric(3), rng, 3)
    back = Representation.from_json(json.loads(json.dumps(rep.to_json())))
    assert np.allclose(back.ops, rep.ops) and back.space.same_as(rep.space)
    E = random_subquotient(rng)
    assert SubquotientSpace.from_json(json.loads(json.dumps(E.to_json()))).same_as(E)
