import pytest
from hypothesis import given, settings, strategies as st

from udcohom.distribution import (DistElement, Fraction, OrderIdeal, basis, euler_phi, fixed_point_module,
                                  galois_action_matrix, ideal_basis, inclusion_matrix, level,
                                  normalize_symbol, relation_matrix, theorem_b_family, verify_theorem_b,
                                  xg_basis_matrix, xg_family)
from udcohom.errors import LevelMismatch, ModulusMismatch, NotAnIdeal
from udcohom.exactlin import CohomologyGroup, ExactMatrix, determinant, invariant_factors, solve_mod
from udcohom.galois import GroupElement, make_config


def standard_vector(f, combo):
    v = [0] * f
    for n, c in combo.items():
        v[n % f] += c
    return v


def in_relation_lattice(f, vec):
    return solve_mod(relation_matrix(f), vec) is not None


@pytest.mark.parametrize("f", [1, 2, 3, 4, 6, 8, 9, 12, 21, 30, 45, 105])
def test_basis_size_is_phi(f):
    assert len(basis(f)) == euler_phi(f)


def test_digits():
    a = Fraction(20, 21)
    assert (a.digit(3), a.digit(7)) == (2, 2)
    assert not a.is_basic()
    assert Fraction(1, 21).is_basic()
    assert Fraction(7, 21).support() == frozenset({3})
    assert Fraction(25, 21) == Fraction(4, 21)


def test_normalise_20_over_21():
    x = normalize_symbol(Fraction(20, 21))
    assert dict(x.coefficients) == {3: -1, 6: -2, 9: -1, 12: -1, 13: -1, 15: -1}
    diff = standard_vector(21, {20: 1})
    for n, c in x.coefficients.items():
        diff[n] -= c
    assert in_relation_lattice(21, diff)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.integers(0, 10 ** 6))
def test_normalisation_differs_by_relations(f, n):
    n %= f
    x = normalize_symbol(Fraction(n, f))
    assert all(Fraction(m, f).is_basic() for m in x.coefficients)
    diff = standard_vector(f, {n: 1})
    for m, c in x.coefficients.items():
        diff[m] -= c
    assert in_relation_lattice(f, diff)


@pytest.mark.parametrize("f", [6, 12, 21])
def test_basis_spans_freely(f):
    # Z^f / relations is free on the basis: normalisation kills every relation
    lv = level(f)
    R = relation_matrix(f)
    for col in R.columns():
        x = DistElement.from_symbols(f, {n: c for n, c in enumerate(col) if c})
        assert x.is_zero()
    assert invariant_factors(R) == (1,) * (f - len(lv.basis))


def test_dist_element_arithmetic():
    x = DistElement.from_symbols(21, {1: 1, 20: 2})
    y = DistElement.from_symbols(21, {1: -1})
    assert (x + y) == DistElement.from_symbols(21, {20: 2})
    assert x.scale(3).reduce(3).is_zero()
    with pytest.raises(LevelMismatch):
        x + DistElement(3, {1: 1})
    with pytest.raises(ModulusMismatch):
        x + x.reduce(2)
    with pytest.raises(ValueError):
        DistElement(21, {20: 1})


def test_order_ideals():
    I = OrderIdeal.from_family([[], [0], [1]])
    assert {0, 1} not in I and {1} in I
    assert OrderIdeal.up_to(3, 1).members(3) == [frozenset(), frozenset({0}), frozenset({1}), frozenset({2})]
    assert (I & OrderIdeal.full(2)) == I
    assert (OrderIdeal((frozenset({0}),)) | OrderIdeal((frozenset({1}),))) == I
    with pytest.raises(NotAnIdeal):
        OrderIdeal.from_family([[0, 1], [0]])
    cfg = make_config([3, 7])
    assert OrderIdeal.from_primes(cfg, [[3], [7]]) == I
    assert len(ideal_basis(I, 21)) == 1 + 1 + 5


def test_galois_action_is_a_representation():
    cfg = make_config([3, 7])
    g = GroupElement.sigma(cfg, 0)
    h = GroupElement.sigma(cfg, 1, 2)
    A = galois_action_matrix(g, 21)
    B = galois_action_matrix(h, 21)
    assert galois_action_matrix(g * h, 21) == A @ B
    assert determinant(A) in (1, -1)
    with pytest.raises(LevelMismatch):
        galois_action_matrix(g, 91)


@pytest.mark.parametrize("f,M", [(3, 2), (21, 2), (91, 6)])
def test_theorem_b(f, M):
    rep = verify_theorem_b(f, M)
    assert rep.passed
    assert len(rep.family) == 2 ** len(make_config([p for p in (3, 7, 13) if f % p == 0]).primes)
    assert fixed_point_module(f, M) == CohomologyGroup(0, (M,) * len(rep.family))


def test_theorem_b_family_at_21():
    fam = dict(theorem_b_family(21, 2))
    assert sorted(fam) == [1, 3, 7, 21]
    assert dict(fam[3].coefficients) == {7: 1}


@pytest.mark.parametrize("f", list(range(1, 13)) + [21])
def test_xy_bases_unimodular(f):
    assert len(xg_family(f)) == f
    for variant in ("X", "Y"):
        assert determinant(xg_basis_matrix(f, variant)) in (1, -1)


@pytest.mark.parametrize("g", [1, 3, 7, 21])
def test_inclusions_split(g):
    fs = invariant_factors(inclusion_matrix(g, 21))
    assert len(fs) == len(basis(g)) and set(fs) <= {1}


def test_inclusion_rejects_non_divisor():
    with pytest.raises(LevelMismatch):
        inclusion_matrix(5, 21)
