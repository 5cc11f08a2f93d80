import pytest
from hypothesis import given, strategies as st

from udcohom.errors import BadModulus, BadPrime, IndexOutOfRange
from udcohom.galois import (GroupElement, GroupRingElement, all_elements, derivative_element, frobenius,
                            least_primitive_root, make_config, norm_element, subsets)


def test_primitive_roots():
    assert [least_primitive_root(p) for p in (3, 5, 7, 11, 13, 23)] == [2, 2, 3, 2, 2, 5]


def test_config_validation():
    cfg = make_config([7, 3], 2)
    assert cfg.primes == (3, 7) and cfg.r == 21 and cfg.orders == (2, 6)
    with pytest.raises(BadPrime):
        make_config([3, 9])
    with pytest.raises(BadPrime):
        make_config([2, 3])
    with pytest.raises(BadPrime):
        make_config([3, 3])
    with pytest.raises(BadModulus):
        make_config([3, 7], 3)
    with pytest.raises(IndexOutOfRange):
        GroupElement.sigma(cfg, 2)


@given(st.integers(0, 90))
def test_crt_round_trip(n):
    cfg = make_config([7, 13])
    comps = cfg.components(n)
    assert cfg.numerator(comps) == n
    # n/r == sum a_i / l_i mod 1
    assert (sum(a * (cfg.r // p) for a, p in zip(comps, cfg.primes)) - n) % cfg.r == 0


def test_sigma_acts_by_primitive_root():
    cfg = make_config([3, 7])
    n = cfg.numerator((1, 1))
    moved = cfg.numerator(cfg.act((0, 1), cfg.components(n)))
    assert moved == cfg.numerator((1, 3))
    assert cfg.multiplier((0, 1)) % 7 == 3 and cfg.multiplier((0, 1)) % 3 == 1


def test_frobenius_multiplies_away_from_its_prime():
    cfg = make_config([3, 7, 13])
    for i in range(3):
        F = frobenius(cfg, i)
        x = cfg.multiplier(F.exponents)
        for j, p in enumerate(cfg.primes):
            if j != i:
                assert x % p == cfg.primes[i] % p
            else:
                assert x % p == 1


def test_group_elements():
    cfg = make_config([3, 7])
    g = GroupElement.sigma(cfg, 1, 4)
    assert (g * g.inverse()).is_identity
    assert (g ** 3).exponents == (0, 0)
    assert len(all_elements(cfg)) == cfg.group_order == 12


def test_norm_and_derivative_identities():
    cfg = make_config([7, 13])
    for i, l in enumerate(cfg.primes):
        sigma = GroupRingElement.of(GroupElement.sigma(cfg, i))
        one = GroupRingElement.one(cfg)
        N = norm_element(cfg, {i})
        D = derivative_element(cfg, {i})
        assert ((one - sigma) * N).is_zero()
        # (sigma - 1) D_i = (l_i - 1) - N_i
        assert (sigma - one) * D == one.scale(l - 1) - N
    both = derivative_element(cfg, {0, 1})
    assert both == derivative_element(cfg, {0}) * derivative_element(cfg, {1})


def test_group_ring_modulus():
    cfg = make_config([7], 6)
    N = norm_element(cfg, {0}, 6)
    assert (N * N) == N.scale(6).reduce(6)
    assert (N * N).is_zero()


def test_subsets_order():
    assert subsets(2) == [frozenset(), frozenset({0}), frozenset({1}), frozenset({0, 1})]
