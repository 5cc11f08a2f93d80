import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from udcohom.errors import CompositionNonzero, GcdNotOne, ShapeMismatch
from udcohom.exactlin import (CohomologyGroup, ExactMatrix, complete_unimodular, determinant,
                              homology_at, invariant_factors, kernel_basis, kernel_basis_mod,
                              lattice_quotient, rank, smith_normal_form, solve_mod)


def matrices(max_rows=6, max_cols=6, bound=20):
    return st.integers(1, max_rows).flatmap(
        lambda m: st.integers(1, max_cols).flatmap(
            lambda n: st.lists(st.lists(st.integers(-bound, bound), min_size=n, max_size=n),
                               min_size=m, max_size=m)))


def leibniz_det(rows):
    n = len(rows)
    total = 0
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
        term = -1 if inv % 2 else 1
        for i in range(n):
            term *= rows[i][perm[i]]
        total += term
    return total


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_snf_decomposition(rows):
    A = ExactMatrix.from_rows(rows)
    snf = smith_normal_form(A, inverses=True)
    assert snf.U @ A @ snf.V == snf.D
    assert determinant(snf.U) in (1, -1)
    assert determinant(snf.V) in (1, -1)
    assert snf.U @ snf.U_inv == ExactMatrix.identity(A.rows)
    assert snf.V @ snf.V_inv == ExactMatrix.identity(A.cols)
    fs = snf.invariant_factors
    assert all(f > 0 for f in fs)
    assert all(fs[k + 1] % fs[k] == 0 for k in range(len(fs) - 1))
    for (i, j), v in snf.D.entries.items():
        assert i == j


@settings(max_examples=80, deadline=None)
@given(matrices(4, 4, 9))
def test_determinant_matches_leibniz(rows):
    n = min(len(rows), len(rows[0]))
    square = [r[:n] for r in rows[:n]]
    assert determinant(ExactMatrix.from_rows(square)) == leibniz_det(square)


@settings(max_examples=60, deadline=None)
@given(matrices(4, 4, 9))
def test_product_of_invariant_factors_is_gcd_of_maximal_minors(rows):
    A = ExactMatrix.from_rows(rows)
    r = rank(A)
    if r == 0:
        return
    from math import gcd
    g = 0
    for I in itertools.combinations(range(A.rows), r):
        for J in itertools.combinations(range(A.cols), r):
            g = gcd(g, leibniz_det([[rows[i][j] for j in J] for i in I]))
    prod = 1
    for f in invariant_factors(A):
        prod *= f
    assert prod == g


def test_known_invariant_factors():
    A = ExactMatrix.from_rows([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    assert invariant_factors(A) == (2, 6, 12)
    assert invariant_factors(ExactMatrix.zeros(3, 2)) == ()


def test_homology_of_cyclic_resolution_piece():
    # Z --3--> Z --0--> : H = Z/3 at the middle
    d_in = ExactMatrix.from_rows([[3]])
    d_out = ExactMatrix.zeros(0, 1)
    assert homology_at(d_in, d_out) == CohomologyGroup(0, (3,))
    assert homology_at(d_in, d_out, 3) == CohomologyGroup(0, (3,))
    assert homology_at(d_in, d_out, 2).is_trivial


def test_homology_rejects_bad_input():
    with pytest.raises(ShapeMismatch):
        homology_at(ExactMatrix.zeros(2, 1), ExactMatrix.zeros(1, 3))
    with pytest.raises(CompositionNonzero):
        homology_at(ExactMatrix.from_rows([[1]]), ExactMatrix.from_rows([[1]]))


def test_homology_mod_M_of_torsion():
    # Z --6--> Z: mod 4 the middle has Z/2 (kernel of 6 mod 4) and cokernel Z/2
    d = ExactMatrix.from_rows([[6]])
    assert homology_at(ExactMatrix.zeros(1, 0), d, 4) == CohomologyGroup(0, (2,))
    assert homology_at(d, ExactMatrix.zeros(0, 1), 4) == CohomologyGroup(0, (2,))


def test_kernel_basis():
    A = ExactMatrix.from_rows([[1, 2, 3], [2, 4, 6]])
    K = kernel_basis(A)
    assert K.cols == 2
    assert (A @ K).is_zero()
    Km = kernel_basis_mod(ExactMatrix.from_rows([[2, 0]]), 4)
    for col in Km.columns():
        assert (2 * col[0]) % 4 == 0


def test_solve_mod_against_brute_force():
    rng = random.Random(7)
    for _ in range(400):
        m, n = rng.randint(1, 4), rng.randint(1, 4)
        M = rng.choice([2, 3, 4, 6, 8, 9, 12])
        rows = [[rng.randint(-6, 6) * rng.choice([0, 1, 2, 3]) for _ in range(n)] for _ in range(m)]
        A = ExactMatrix.from_rows(rows, n)
        b = [rng.randint(-9, 9) for _ in range(m)]
        x = solve_mod(A, b, M)
        exists = any(all((v - w) % M == 0 for v, w in zip(A.apply(list(y)), b))
                     for y in itertools.product(range(M), repeat=n))
        assert (x is not None) == exists
        if x is not None:
            assert all((v - w) % M == 0 for v, w in zip(A.apply(x), b))


def test_solve_over_Z():
    A = ExactMatrix.from_rows([[2, 0], [0, 3]])
    assert solve_mod(A, [4, 9]) == [2, 3]
    assert solve_mod(A, [1, 0]) is None
    with pytest.raises(ShapeMismatch):
        solve_mod(A, [1])


def test_complete_unimodular():
    W = complete_unimodular([6, 10, 15])
    assert W.column(0) == [6, 10, 15]
    assert determinant(W) in (1, -1)
    with pytest.raises(GcdNotOne):
        complete_unimodular([2, 4])


def test_lattice_quotient():
    big = ExactMatrix.identity(2)
    small = ExactMatrix.from_rows([[2, 0], [0, 6]])
    assert lattice_quotient(big, small) == CohomologyGroup(0, (2, 6))


def test_cohomology_group_normalisation():
    G = CohomologyGroup.from_orders(1, [2, 3, 4, 0])
    assert G == CohomologyGroup(2, (2, 12))
    assert str(G) == "Z^2 + Z/2 + Z/12"
    assert G.order is None
    assert CohomologyGroup(0, (2, 6)).order == 12
    assert str(CohomologyGroup()) == "0"
    with pytest.raises(ValueError):
        CohomologyGroup(0, (4, 2))
