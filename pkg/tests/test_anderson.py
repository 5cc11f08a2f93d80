import pytest

from udcohom.anderson import (build_L, first_filtration_E1, general_L_homology, homology_of_L, is_acyclic,
                              split_differential)
from udcohom.distribution import OrderIdeal, euler_phi
from udcohom.errors import SplitMismatch
from udcohom.exactlin import CohomologyGroup, ExactMatrix
from udcohom.galois import make_config


@pytest.fixture(scope="module")
def L21():
    return build_L(make_config([3, 7]))


def test_r3_matrices():
    L = build_L(make_config([3]))
    assert L.sizes() == (1, 3)
    assert L.d[-1].to_rows() == [[0], [-1], [-1]]
    assert L.d2[-1].is_zero()


@pytest.mark.parametrize("primes,sizes", [([3], (1, 3)), ([3, 7], (1, 10, 21)), ([3, 5, 7], (1, 15, 71, 105))])
def test_sizes_and_acyclicity(primes, sizes):
    cfg = make_config(primes)
    L = build_L(cfg)
    assert L.sizes() == sizes
    H = homology_of_L(L)
    assert H[0] == CohomologyGroup(euler_phi(cfg.r), ())
    assert all(H[p].is_trivial for p in L.degrees if p)


@pytest.mark.parametrize("maximal", [[[3], [7]], [[3]], [[7]], [[]], []])
def test_ideal_subcomplexes_acyclic(maximal):
    cfg = make_config([3, 7])
    assert is_acyclic(build_L(cfg, OrderIdeal.from_primes(cfg, maximal)))


def test_ideal_symbol_sets_are_lattice_compatible():
    cfg = make_config([3, 5, 7])
    I1 = OrderIdeal.from_primes(cfg, [[3, 5], [7]])
    I2 = OrderIdeal.from_primes(cfg, [[5, 7]])
    sym = lambda I: {x for p, xs in build_L(cfg, I, split=False).symbols.items() for x in xs}
    assert sym(I1 & I2) == sym(I1) & sym(I2)
    assert sym(I1 | I2) == sym(I1) | sym(I2)


def test_split_identities_hold(L21):
    for p in range(-2, 0):
        assert L21.d1[p] + L21.d2[p] == L21.d[p]
    assert (L21.d2[-1] @ L21.d1[-2] + L21.d1[-1] @ L21.d2[-2]).is_zero()


def test_split_detects_a_broken_differential(L21):
    broken = build_L(make_config([3, 7]), split=False)
    broken.d[-1] = broken.d[-1] + ExactMatrix(broken.d[-1].rows, broken.d[-1].cols, {(0, 0): 1})
    with pytest.raises(SplitMismatch):
        split_differential(broken)


@pytest.mark.parametrize("primes,ranks", [([3], (1, 1)), ([3, 7], (1, 6, 5)), ([3, 5, 7], (1, 9, 23, 15))])
def test_first_filtration_rows(primes, ranks):
    rows = first_filtration_E1(build_L(make_config(primes)))
    assert all(row.concentrated for row in rows)
    assert tuple(row.rank for row in rows) == ranks
    assert sum(ranks) == euler_phi(make_config(primes).r)


@pytest.mark.parametrize("f", [1, 2, 4, 6, 8, 9, 12])
def test_general_level_resolution_acyclic(f):
    H = general_L_homology(f)
    assert H[0] == CohomologyGroup(euler_phi(f), ())
    assert all(h.is_trivial for p, h in H.items() if p)
