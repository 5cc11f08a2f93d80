"""The group G_S = prod (Z/l_i)^x, its group ring, and the elements N_i, D_i, Fr_i."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import product
from math import prod
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import BadModulus, BadPrime, IndexOutOfRange, ModulusMismatch


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    k = 3
    while k * k <= n:
        if n % k == 0:
            return False
        k += 2
    return True


def least_primitive_root(p: int) -> int:
    if p == 2:
        return 1
    phi = p - 1
    factors = [q for q in range(2, phi + 1) if phi % q == 0 and is_prime(q)]
    for g in range(2, p):
        if all(pow(g, phi // q, p) != 1 for q in factors):
            return g
    raise BadPrime(f"{p} has no primitive root")


def subsets(s: int) -> list[frozenset[int]]:
    """All subsets of range(s), ordered by bitmask."""
    return [frozenset(i for i in range(s) if mask >> i & 1) for mask in range(1 << s)]


def mask_of(T: Iterable[int]) -> int:
    return sum(1 << i for i in T)


@dataclass(frozen=True)
class PrimeConfig:
    """Distinct odd primes l_0 < l_1 < ... with their least primitive roots.

    Prime *indices* 0..s-1 follow ascending prime order, which is also the
    total order used for every sign convention.
    """

    primes: tuple[int, ...]
    M: int = 1
    generators: tuple[int, ...] = field(default=())

    @property
    def s(self) -> int:
        return len(self.primes)

    @property
    def r(self) -> int:
        return prod(self.primes)

    def r_T(self, T: Iterable[int]) -> int:
        return prod(self.primes[i] for i in T)

    @property
    def orders(self) -> tuple[int, ...]:
        """|G_i| = l_i - 1."""
        return tuple(p - 1 for p in self.primes)

    @property
    def group_order(self) -> int:
        return prod(self.orders)

    def check_index(self, i: int):
        if not 0 <= i < self.s:
            raise IndexOutOfRange(f"prime index {i} not in range({self.s})")

    @cached_property
    def _dlog(self) -> tuple[dict[int, int], ...]:
        out = []
        for p, g in zip(self.primes, self.generators):
            table = {}
            x = 1
            for k in range(p - 1):
                table[x] = k
                x = x * g % p
            out.append(table)
        return tuple(out)

    def dlog(self, i: int, x: int) -> int:
        """k with sigma_i^k acting as multiplication by x modulo l_i."""
        return self._dlog[i][x % self.primes[i]]

    @cached_property
    def _crt(self) -> tuple[int, ...]:
        r = self.r
        return tuple(pow(r // p, -1, p) for p in self.primes)

    def components(self, n: int) -> tuple[int, ...]:
        """The a_i with n/r = sum a_i / l_i  (mod 1)."""
        r = self.r
        return tuple(n * c % p for p, c in zip(self.primes, self._crt)) if r > 1 else ()

    def numerator(self, comps: Sequence[int]) -> int:
        r = self.r
        return sum(a * (r // p) for a, p in zip(comps, self.primes)) % r if r > 1 else 0

    def support(self, n: int) -> frozenset[int]:
        return frozenset(i for i, a in enumerate(self.components(n)) if a)

    def multiplier(self, exps: Sequence[int]) -> int:
        """x in (Z/r)^x with x = g_i^k_i modulo every l_i."""
        r = self.r
        x = 0
        for g, k, p in zip(self.generators, exps, self.primes):
            q = r // p
            x += pow(g, k, p) * q * pow(q, -1, p)
        return x % r if r > 1 else 1

    def act(self, exps: Sequence[int], comps: Sequence[int]) -> tuple[int, ...]:
        """Apply prod sigma_i^k_i to a fraction given by its CRT components."""
        return tuple(a * pow(g, k, p) % p if a else 0
                     for a, g, k, p in zip(comps, self.generators, exps, self.primes))

    def frobenius_inverse(self, i: int, comps: Sequence[int]) -> tuple[int, ...]:
        """Fr_i^-1 on a fraction whose i-component is zero (lift with trivial i-part)."""
        li = self.primes[i]
        return tuple(0 if j == i else a * pow(li, -1, p) % p
                     for j, (a, p) in enumerate(zip(comps, self.primes)))


def make_config(primes: Iterable[int], M: int = 1) -> PrimeConfig:
    primes = [int(p) for p in primes]
    if len(set(primes)) != len(primes):
        raise BadPrime(f"repeated prime in {primes}")
    for p in primes:
        if p % 2 == 0 or not is_prime(p):
            raise BadPrime(f"{p} is not an odd prime")
    if M < 1:
        raise BadModulus(f"modulus must be positive, got {M}")
    primes.sort()
    check_modulus(primes, M)
    return PrimeConfig(tuple(primes), M, tuple(least_primitive_root(p) for p in primes))


def check_modulus(primes: Iterable[int], M: int):
    """M == 0 stands for Z; otherwise M must divide every l_i - 1."""
    if M < 0:
        raise BadModulus(f"negative modulus {M}")
    if M > 1:
        bad = [p for p in primes if (p - 1) % M]
        if bad:
            raise BadModulus(f"{M} does not divide l - 1 for l in {bad}")


# ---------------------------------------------------------------------------
# group elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupElement:
    """prod sigma_i^exponents[i]; exponents reduced modulo orders[i]."""

    exponents: tuple[int, ...]
    orders: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exponents",
                           tuple(k % n for k, n in zip(self.exponents, self.orders)))

    @classmethod
    def identity(cls, cfg: PrimeConfig) -> "GroupElement":
        return cls((0,) * cfg.s, cfg.orders)

    @classmethod
    def sigma(cls, cfg: PrimeConfig, i: int, k: int = 1) -> "GroupElement":
        cfg.check_index(i)
        exps = [0] * cfg.s
        exps[i] = k
        return cls(tuple(exps), cfg.orders)

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return group_mul(self, other)

    def inverse(self) -> "GroupElement":
        return GroupElement(tuple(-k for k in self.exponents), self.orders)

    def __pow__(self, n: int) -> "GroupElement":
        return GroupElement(tuple(k * n for k in self.exponents), self.orders)

    @property
    def is_identity(self) -> bool:
        return not any(self.exponents)


def group_mul(g: GroupElement, h: GroupElement) -> GroupElement:
    if g.orders != h.orders:
        raise ValueError("elements of different groups")
    return GroupElement(tuple(a + b for a, b in zip(g.exponents, h.exponents)), g.orders)


def all_elements(cfg: PrimeConfig) -> list[GroupElement]:
    return [GroupElement(k, cfg.orders) for k in product(*(range(n) for n in cfg.orders))]


def frobenius(cfg: PrimeConfig, i: int) -> GroupElement:
    """Fr_i, lifted to G_S with trivial i-component."""
    cfg.check_index(i)
    li = cfg.primes[i]
    exps = tuple(0 if j == i else cfg.dlog(j, li) for j in range(cfg.s))
    return GroupElement(exps, cfg.orders)


# ---------------------------------------------------------------------------
# group ring
# ---------------------------------------------------------------------------

class GroupRingElement:
    """Finite Z- or Z/M-linear combination of group elements (modulus 0 means Z)."""

    __slots__ = ("orders", "modulus", "_coeffs")

    def __init__(self, orders: Sequence[int], coeffs: Mapping[tuple[int, ...], int] | None = None,
                 modulus: int = 0):
        self.orders = tuple(orders)
        self.modulus = modulus
        clean: dict[tuple[int, ...], int] = {}
        for key, c in (coeffs or {}).items():
            if isinstance(key, GroupElement):
                key = key.exponents
            key = tuple(k % n for k, n in zip(key, self.orders))
            clean[key] = clean.get(key, 0) + c
        if modulus:
            clean = {k: v % modulus for k, v in clean.items()}
        self._coeffs = {k: v for k, v in clean.items() if v}

    @classmethod
    def one(cls, cfg: PrimeConfig, modulus: int = 0) -> "GroupRingElement":
        return cls(cfg.orders, {(0,) * cfg.s: 1}, modulus)

    @classmethod
    def of(cls, g: GroupElement, modulus: int = 0) -> "GroupRingElement":
        return cls(g.orders, {g.exponents: 1}, modulus)

    @property
    def coefficients(self) -> Mapping[tuple[int, ...], int]:
        return MappingProxyType(self._coeffs)

    def items(self):
        return self._coeffs.items()

    def _check(self, other: "GroupRingElement"):
        if self.modulus != other.modulus:
            raise ModulusMismatch(f"modulus {self.modulus} vs {other.modulus}")
        if self.orders != other.orders:
            raise ValueError("elements of different group rings")

    def __add__(self, other):
        self._check(other)
        out = dict(self._coeffs)
        for k, v in other._coeffs.items():
            out[k] = out.get(k, 0) + v
        return GroupRingElement(self.orders, out, self.modulus)

    def __neg__(self):
        return GroupRingElement(self.orders, {k: -v for k, v in self._coeffs.items()}, self.modulus)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int) -> "GroupRingElement":
        return GroupRingElement(self.orders, {k: c * v for k, v in self._coeffs.items()}, self.modulus)

    def __mul__(self, other):
        return ring_mul(self, other)

    def __eq__(self, other):
        if not isinstance(other, GroupRingElement):
            return NotImplemented
        return (self.orders, self.modulus, self._coeffs) == (other.orders, other.modulus, other._coeffs)

    def __hash__(self):
        return hash((self.orders, self.modulus, frozenset(self._coeffs.items())))

    def __repr__(self):
        terms = " + ".join(f"{v}*s^{k}" for k, v in sorted(self._coeffs.items()))
        return f"GroupRingElement({terms or '0'}{', mod ' + str(self.modulus) if self.modulus else ''})"

    def reduce(self, M: int) -> "GroupRingElement":
        return GroupRingElement(self.orders, self._coeffs, M)

    def is_zero(self) -> bool:
        return not self._coeffs


def ring_mul(a: GroupRingElement, b: GroupRingElement) -> GroupRingElement:
    a._check(b)
    out: dict[tuple[int, ...], int] = {}
    for ka, va in a._coeffs.items():
        for kb, vb in b._coeffs.items():
            key = tuple((x + y) % n for x, y, n in zip(ka, kb, a.orders))
            out[key] = out.get(key, 0) + va * vb
    return GroupRingElement(a.orders, out, a.modulus)


def _single_prime_sum(cfg: PrimeConfig, i: int, weight, modulus: int) -> GroupRingElement:
    coeffs = {}
    for k in range(cfg.orders[i]):
        exps = [0] * cfg.s
        exps[i] = k
        coeffs[tuple(exps)] = weight(k)
    return GroupRingElement(cfg.orders, coeffs, modulus)


def norm_element(cfg: PrimeConfig, T: Iterable[int], modulus: int = 0) -> GroupRingElement:
    """N_T = prod_{i in T} sum_k sigma_i^k."""
    out = GroupRingElement.one(cfg, modulus)
    for i in sorted(T):
        cfg.check_index(i)
        out = out * _single_prime_sum(cfg, i, lambda k: 1, modulus)
    return out


def derivative_element(cfg: PrimeConfig, T: Iterable[int], modulus: int = 0) -> GroupRingElement:
    """D_T = prod_{i in T} sum_k k sigma_i^k (Kolyvagin derivative)."""
    out = GroupRingElement.one(cfg, modulus)
    for i in sorted(T):
        cfg.check_index(i)
        out = out * _single_prime_sum(cfg, i, lambda k: k, modulus)
    return out
