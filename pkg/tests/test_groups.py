import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from bpalg.groups import (FiniteGroup, GroupError, GroupFunction, build_group, characters,
                          constant, convolve, cyclic, delta, dihedral, direct_product,
                          random_function, regular_matrix, regular_operator, symmetric)

from conftest import SMALL_GROUPS

ALL = list(SMALL_GROUPS) + ["D4", "S4", "Z2xZ3"]


def group(name):
    return SMALL_GROUPS[name]() if name in SMALL_GROUPS else build_group(name)


def test_trivial_group():
    G = cyclic(1)
    assert G.order == 1 and G.cayley.tolist() == [[0]]


def test_cyclic_table():
    G = cyclic(4)
    assert all(G.cayley[i, j] == (i + j) % 4 for i in range(4) for j in range(4))


def test_s3_has_three_involutions():
    G = symmetric(3)
    assert G.order == 6
    assert sum(G.element_order(a) == 2 for a in range(6)) == 3
    assert not G.is_abelian


def test_dihedral_and_products():
    assert dihedral(4).order == 8 and not dihedral(4).is_abelian
    P = direct_product(cyclic(2), cyclic(3))
    assert P.order == 6 and P.is_abelian and P.label == "Z2xZ3"
    assert build_group("Z2xZ2").order == 4
    assert build_group("cyclic", 5).order == 5


@pytest.mark.parametrize("bad", [
    lambda: cyclic(0),
    lambda: symmetric(5),
    lambda: build_group("Q8"),
    lambda: build_group("cyclic", None),
    lambda: FiniteGroup(np.array([[0, 1], [0, 1]])),          # not Latin
    lambda: FiniteGroup(np.array([[1, 0], [0, 1]])),          # identity not at 0
])
def test_invalid_constructions(bad):
    with pytest.raises(GroupError):
        bad()


def test_non_associative_latin_square_rejected():
    # a Latin square with identity 0 that is not a group table (order 5 loop)
    table = np.array([[0, 1, 2, 3, 4],
                      [1, 0, 3, 4, 2],
                      [2, 4, 0, 1, 3],
                      [3, 2, 4, 0, 1],
                      [4, 3, 1, 2, 0]])
    with pytest.raises(GroupError):
        FiniteGroup(table)


@pytest.mark.parametrize("name", ALL)
def test_inverses_and_latin(name):
    G = group(name)
    for a in range(G.order):
        assert G.mul(a, G.inv(a)) == 0 == G.mul(G.inv(a), a)
        assert sorted(G.cayley[a]) == list(range(G.order))


@pytest.mark.parametrize("name", ALL)
def test_regular_matrices_are_a_homomorphism(name):
    G = group(name)
    M = G.regular_matrices
    for x in range(G.order):
        for y in range(G.order):
            assert np.array_equal(M[x] @ M[y], M[G.mul(x, y)])
    assert np.array_equal(regular_matrix(G, 0), np.eye(G.order))


def test_z2_swap():
    assert regular_matrix(cyclic(2), 1).tolist() == [[0, 1], [1, 0]]


def test_convolution_examples():
    G = cyclic(3)
    f = GroupFunction(G, [1, 1, 0])
    g = GroupFunction(G, [0, 1, 0])
    # g = delta_1, so f * g is the translate x -> f(x - 1)
    assert np.allclose(convolve(f, g).values, [0, 1, 1])
    S = symmetric(3)
    for a in range(6):
        for b in range(6):
            assert np.allclose(convolve(delta(S, a), delta(S, b)).values, delta(S, S.mul(a, b)).values)


@given(st.sampled_from(list(SMALL_GROUPS)), st.integers(0, 2 ** 32 - 1))
def test_convolution_matches_regular_operator(name, seed):
    G = SMALL_GROUPS[name]()
    rng = np.random.default_rng(seed)
    f, g, h = (random_function(G, rng) for _ in range(3))
    assert np.allclose(regular_operator(f) @ g.values, convolve(f, g).values)
    assert np.allclose(convolve(delta(G), f).values, f.values)
    assert np.allclose(convolve(convolve(f, g), h).values, convolve(f, convolve(g, h)).values)
    assert np.allclose(convolve(f + g, h).values, (convolve(f, h) + convolve(g, h)).values)


def test_group_mismatch():
    with pytest.raises(GroupError):
        convolve(delta(cyclic(2)), delta(cyclic(3)))
    with pytest.raises(GroupError):
        GroupFunction(cyclic(2), [1, 2, 3])


def test_characters():
    for name in ("Z3", "Z4", "Z2xZ2"):
        G = SMALL_GROUPS[name]()
        chis = characters(G)
        assert len(chis) == G.order
        assert np.allclose(chis[0], 1)
        gram = np.array(chis).conj() @ np.array(chis).T / G.order
        assert np.allclose(gram, np.eye(G.order))
    assert len(characters(symmetric(3))) == 2


def test_json_roundtrip():
    G = symmetric(3)
    H = FiniteGroup.from_json(json.loads(json.dumps(G.to_json())))
    assert H.same_as(G) and H.label == "S3"
    f = random_function(G, np.random.default_rng(1))
    assert np.array_equal(GroupFunction.from_json(G, f.to_json()).values, f.values)
    assert constant(G).sup_norm() == 1.0
