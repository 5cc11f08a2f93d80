import random

import pytest

from udcohom.cohomology import (A_e, build_K, check_cup, class_decomposition, cohomology_Z_closed_form,
                                cohomology_Z_snf, cup_closed_form, cup_on_distribution_class,
                                cup_via_diagonal, distribution_class, explicit_prime_cocycle, hom_P_U,
                                lemma_complex_check, lift_cocycle, prime_lift_report, triple_identities,
                                verify_degeneration, verify_modM_counts, verify_quasi_iso, verify_theorem_A)
from udcohom.cohomology.complexes import augmentation, modM_class_count
from udcohom.cohomology.groupcoh import (diagonal_chain_map_defect, restriction_kernel,
                                         restriction_kernel_prediction)
from udcohom.cohomology.lifting import is_q_symbol
from udcohom.distribution import OrderIdeal
from udcohom.errors import BadIndex, NotACocycle
from udcohom.exactlin import CohomologyGroup
from udcohom.galois import make_config, subsets
from udcohom.signs import deg, indicator, multi_indices, supp


# ---------------------------------------------------------------------------
# trivial coefficients
# ---------------------------------------------------------------------------

def test_A_e_examples():
    cfg = make_config([3, 7])
    assert A_e(cfg, (0, 0), 0) == CohomologyGroup(1, ())
    assert A_e(cfg, (2, 0), 2) == CohomologyGroup(0, (2,))
    assert A_e(cfg, (0, 2), 2) == CohomologyGroup(0, (6,))
    # t = 2: (Z/2)^{C(1,j)} at degree deg e - j
    assert A_e(cfg, (2, 2), 4) == CohomologyGroup(0, (2,))
    assert A_e(cfg, (2, 2), 3) == CohomologyGroup(0, (2,))
    assert A_e(cfg, (2, 2), 2).is_trivial


@pytest.mark.parametrize("primes", [[3], [3, 7], [7, 13], [3, 5, 7]])
def test_closed_form_matches_snf(primes):
    cfg = make_config(primes)
    n_max = 6 if len(primes) < 3 else 4
    for T in subsets(cfg.s):
        assert cohomology_Z_closed_form(cfg, T, n_max) == cohomology_Z_snf(cfg, T, n_max)


@pytest.mark.parametrize("q", range(5))
def test_restriction_kernels(q):
    cfg = make_config([3, 7])
    for T in subsets(2):
        assert restriction_kernel(cfg, T, q) == restriction_kernel_prediction(cfg, T, q)


def test_lemma_complex():
    full = {T: 1 for T in subsets(2)}
    rep = lemma_complex_check(2, {1}, full)
    assert rep.passed and rep.predicted_rank == 2
    assert lemma_complex_check(3, set(), {T: 2 for T in subsets(3)}).passed
    rng = random.Random(5)
    for _ in range(20):
        s = rng.randint(1, 3)
        T = frozenset(i for i in range(s) if rng.random() < 0.6)
        ranks = {U: rng.randint(0, 3) for U in subsets(s)}
        assert lemma_complex_check(s, T, ranks).passed


def test_cup_examples():
    assert cup_closed_form(make_config([3], 2), 2, (1,), (1,)) == (1, (2,))
    cfg = make_config([3, 7], 2)
    assert cup_closed_form(cfg, 0, (1, 0), (0, 1)) == (1, (1, 1))
    assert cup_closed_form(cfg, 0, (0, 1), (1, 0)) == (-1, (1, 1))
    assert cup_closed_form(make_config([7], 6), 6, (1,), (1,)) == (3, (2,))


@pytest.mark.parametrize("primes,M", [([3, 7], 2), ([7, 13], 2), ([7, 13], 6)])
def test_cup_oracle_and_anticommutativity(primes, M):
    cfg = make_config(primes, M)
    low = [e for d in range(3) for e in multi_indices(2, d)]
    for e in low:
        for f in low:
            closed = cup_closed_form(cfg, M, e, f)
            assert closed == cup_via_diagonal(cfg, M, e, f)
            swapped = cup_closed_form(cfg, M, f, e)
            assert (swapped[0] - (-1) ** (deg(e) * deg(f)) * closed[0]) % M == 0


def test_diagonal_convention():
    cfg = make_config([3, 7])
    for E in [(1, 1), (2, 1), (1, 2), (3, 0), (2, 2)]:
        assert not diagonal_chain_map_defect(cfg, E, "1-sigma", twisted=True)
        assert not diagonal_chain_map_defect(cfg, E, "sigma-1", twisted=False)
    assert diagonal_chain_map_defect(make_config([7]), (2,), "1-sigma", twisted=False)


# ---------------------------------------------------------------------------
# Hom(P, U) and K
# ---------------------------------------------------------------------------

def test_theorem_A_examples():
    rows = verify_theorem_A(make_config([3]), 4).rows
    assert [r.computed for r in rows] == [CohomologyGroup(1, ())] + [CohomologyGroup(0, (2,))] * 4
    rep = verify_theorem_A(make_config([3, 7]), 2)
    assert rep.passed
    assert rep.rows[1].computed == CohomologyGroup(0, (2, 2, 6))


@pytest.mark.parametrize("maximal", [[[3], [7]], [[3]], [[7]], [[]]])
def test_theorem_A_on_ideals(maximal):
    cfg = make_config([3, 7])
    assert verify_theorem_A(cfg, 3, OrderIdeal.from_primes(cfg, maximal)).passed


def test_triple_identities():
    K = build_K(make_config([3, 7], 2), 2, None, 2)
    assert all(triple_identities(K).values())


@pytest.mark.parametrize("M", [0, 2])
def test_quasi_iso_21(M):
    assert verify_quasi_iso(make_config([3, 7], 2), M, 2).passed


def test_quasi_iso_on_an_ideal():
    cfg = make_config([3, 7], 2)
    assert verify_quasi_iso(cfg, 2, 2, OrderIdeal.from_primes(cfg, [[3], [7]])).passed


def test_modM_counts():
    cfg = make_config([3, 7], 2)
    assert [modM_class_count(cfg, 2, n) for n in range(4)] == [4, 8, 12, 16]
    assert all(row.passed for row in verify_modM_counts(cfg, 2, 3))
    assert modM_class_count(make_config([3], 2), 2, 0) == 2


def test_degeneration():
    assert all(row.passed for row in verify_degeneration(make_config([3, 7], 2), 2, 2))


def test_K_degree_zero_at_r3():
    K = build_K(make_config([3], 2), 2, None, 1)
    assert len(K.bases[0]) == 4


# ---------------------------------------------------------------------------
# lifting
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("primes,M", [([3], 2), ([3, 7], 2), ([7, 13], 6)])
def test_prime_cocycles(primes, M):
    cfg = make_config(primes, M)
    K = build_K(cfg, M, None, 0)
    for T in subsets(cfg.s):
        rep = prime_lift_report(cfg, M, T, K)
        assert rep.closed and rep.passed
        if M > 2:
            assert rep.signs == [rep.expected_sign]


def test_realised_signs_at_91():
    cfg = make_config([7, 13], 6)
    signs = [prime_lift_report(cfg, 6, T).signs for T in subsets(2)]
    assert signs == [[1], [1], [1], [-1]]


def test_lifts_project_to_their_symbol():
    cfg = make_config([3, 7], 2)
    K = build_K(cfg, 2, None, 2)
    for T in subsets(2):
        for d in range(len(T), len(T) + 3):
            for e in multi_indices(2, d):
                if not T <= supp(e) or d - len(T) > 2:
                    continue
                X = lift_cocycle(cfg, 2, T, e, K)
                assert X.is_cocycle()
                q_part = {x: v for x, v in X.terms() if is_q_symbol(x)}
                assert len(q_part) == 1
                (x, v), = q_part.items()
                assert (x.T, x.e, v) == (T, e, 1)


def test_lift_errors():
    cfg = make_config([3, 7], 2)
    with pytest.raises(BadIndex):
        lift_cocycle(cfg, 2, {0}, (0, 1))
    with pytest.raises(BadIndex):
        lift_cocycle(cfg, 2, set(), (1,))


def test_explicit_cocycle_leading_term():
    cfg = make_config([3, 7], 2)
    C = explicit_prime_cocycle(cfg, 2, {0, 1})
    lead = [(x, v) for x, v in C.terms() if x.numerator == 0]
    assert [(x.T, x.e) for x, _ in lead] == [(frozenset({0, 1}), indicator(2, {0, 1}))]


# ---------------------------------------------------------------------------
# cup products on distribution classes
# ---------------------------------------------------------------------------

def test_cup_with_unit_is_identity():
    cfg = make_config([3, 7], 2)
    U = hom_P_U(cfg, 2, 2)
    c = distribution_class(cfg, 2, {1}, (0, 1), U)
    same = cup_on_distribution_class(cfg, 2, (0, 0), c, U)
    assert same.vector == c.vector


def test_cup_r3():
    res = check_cup(make_config([3], 2), 2, {0}, (1,), (1,))
    assert res.passed and res.coefficient == 1 and not res.residual


def test_cup_r21_lands_on_class():
    res = check_cup(make_config([3, 7], 2), 2, {1}, (0, 1), (1, 0))
    assert res.passed and res.coefficient == 1


@pytest.mark.parametrize("T,e,ep,coeff", [
    (set(), (1, 0), (0, 1), 5),
    ({0}, (1, 0), (0, 1), 1),
    ({1}, (0, 1), (1, 0), 5),
    ({0}, (1, 0), (1, 0), 3),
    ({0}, (2, 0), (0, 1), 5),
])
def test_cup_sign_reading_at_91(T, e, ep, coeff):
    res = check_cup(make_config([7, 13], 6), 6, T, e, ep)
    assert res.coefficient == coeff
    assert res.passed


def test_cup_lower_terms_at_top_set():
    res = check_cup(make_config([7, 13], 6), 6, {0, 1}, (1, 1), (0, 2))
    assert res.coefficient == 1
    assert res.residual == {(frozenset({1}), (1, 2)): 5}
    assert res.passed


def test_cup_rejects_non_cocycle():
    cfg = make_config([3, 7], 2)
    U = hom_P_U(cfg, 2, 2)
    c = distribution_class(cfg, 2, {1}, (0, 1), U)
    good = list(c.vector)
    for k in range(len(good)):
        c.vector = good[:k] + [(good[k] + 1) % 2] + good[k + 1:]
        if not c.is_cocycle():
            break
    with pytest.raises(NotACocycle):
        cup_on_distribution_class(cfg, 2, (1, 0), c, U)


def test_decomposition_of_basis_class():
    cfg = make_config([3, 7], 2)
    U = hom_P_U(cfg, 2, 1)
    c = distribution_class(cfg, 2, {0}, (1, 1), U)
    assert class_decomposition(cfg, 2, c, U) == {(frozenset({0}), (1, 1)): 1}
