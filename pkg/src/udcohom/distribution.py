"""The universal ordinary distribution U(f) and its squarefree Galois-module structure.

U(f) is the free abelian group on [a], a in (1/f)Z/Z, modulo
[a] = sum_{pb=a} [b] for primes p | f.  Fractions are stored as numerators
at an explicit level f.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Q
from functools import lru_cache
from math import gcd
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import BadPrime, LevelMismatch, ModulusMismatch, NotAnIdeal
from .exactlin import (CohomologyGroup, ExactMatrix, homology_at, invariant_factors,
                       kernel_basis_mod, solve_mod)
from .galois import (GroupElement, GroupRingElement, PrimeConfig, derivative_element,
                     make_config, subsets)


def factorize(n: int) -> list[tuple[int, int]]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def euler_phi(n: int) -> int:
    out = n
    for p, _ in factorize(n):
        out = out // p * (p - 1)
    return out


class _Level:
    """Digit tables, basis and normalisation cache for one level f."""

    def __init__(self, f: int):
        if f < 1:
            raise ValueError(f"level must be positive, got {f}")
        self.f = f
        self.parts = []
        for p, v in factorize(f):
            pv = p ** v
            self.parts.append((p, pv, pow(f // pv, -1, pv) if pv != f else 1))
        self.basis = tuple(n for n in range(f) if self.offending(n) is None)
        self.index = {n: k for k, n in enumerate(self.basis)}
        self._memo: dict[int, dict[int, int]] = {}

    def first_digit(self, n: int, p: int) -> int:
        for q, pv, inv in self.parts:
            if q == p:
                return (n * inv % pv) // (pv // p)
        return 0

    def offending(self, n: int) -> int | None:
        """Smallest prime p | f with first p-adic digit p - 1, or None when [n/f] is basic."""
        for p, pv, inv in self.parts:
            if (n * inv % pv) // (pv // p) == p - 1:
                return p
        return None

    def normalize(self, n: int) -> dict[int, int]:
        n %= self.f
        hit = self._memo.get(n)
        if hit is not None:
            return hit
        p = self.offending(n)
        if p is None:
            out = {n: 1}
        else:
            # [x] = -sum_{i=1}^{p-1} [x + i/p] + [p x]
            out: dict[int, int] = {}
            step = self.f // p
            for i in range(1, p):
                for k, v in self.normalize(n + i * step).items():
                    out[k] = out.get(k, 0) - v
            for k, v in self.normalize(p * n).items():
                out[k] = out.get(k, 0) + v
            out = {k: v for k, v in out.items() if v}
        self._memo[n] = out
        return out


@lru_cache(maxsize=None)
def level(f: int) -> _Level:
    return _Level(f)


@dataclass(frozen=True, order=True)
class Fraction:
    """a = numerator / level in (1/f)Z/Z."""

    numerator: int
    level: int

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be positive")
        if not 0 <= self.numerator < self.level:
            object.__setattr__(self, "numerator", self.numerator % self.level)

    def digit(self, p: int) -> int:
        """a_{p1}, the leading p-adic partial-fraction digit."""
        return level(self.level).first_digit(self.numerator, p)

    @property
    def order(self) -> int:
        return self.level // gcd(self.numerator, self.level)

    def support(self) -> frozenset[int]:
        """Primes dividing the order."""
        return frozenset(p for p, _ in factorize(self.order))

    def is_basic(self) -> bool:
        return level(self.level).offending(self.numerator) is None

    def crt(self, cfg: PrimeConfig) -> tuple[int, ...]:
        if cfg.r != self.level:
            raise LevelMismatch(f"fraction at level {self.level}, config at {cfg.r}")
        return cfg.components(self.numerator)

    def __str__(self):
        return f"{self.numerator}/{self.level}" if self.numerator else "0"


def basis(f: int) -> list[Fraction]:
    """Canonical Z-basis of U(f): a with a_{p1} != p - 1 for every p | f."""
    return [Fraction(n, f) for n in level(f).basis]


class DistElement:
    """Element of U(f) (or U(f)/M) in canonical-basis coordinates."""

    __slots__ = ("level", "modulus", "_coeffs")

    def __init__(self, f: int, coeffs: Mapping[int, int] | None = None, modulus: int = 0):
        lv = level(f)
        clean = {}
        for n, c in (coeffs or {}).items():
            n %= f
            if n not in lv.index:
                raise ValueError(f"[{n}/{f}] is not a basis symbol; normalise first")
            c = c % modulus if modulus else c
            if c:
                clean[n] = c
        self.level = f
        self.modulus = modulus
        self._coeffs = clean

    @classmethod
    def from_symbols(cls, f: int, symbols: Mapping[int, int], modulus: int = 0) -> "DistElement":
        """Normalise an arbitrary combination sum c_n [n/f]."""
        lv = level(f)
        out: dict[int, int] = {}
        for n, c in symbols.items():
            if not c:
                continue
            for k, v in lv.normalize(n).items():
                out[k] = out.get(k, 0) + c * v
        return cls(f, out, modulus)

    @classmethod
    def from_vector(cls, f: int, vec: Sequence[int], modulus: int = 0, sub_basis: Sequence[int] | None = None):
        nums = level(f).basis if sub_basis is None else sub_basis
        return cls(f, {n: v for n, v in zip(nums, vec) if v}, modulus)

    @property
    def coefficients(self) -> Mapping[int, int]:
        return MappingProxyType(self._coeffs)

    def vector(self, sub_basis: Sequence[int] | None = None) -> list[int]:
        nums = level(self.level).basis if sub_basis is None else sub_basis
        return [self._coeffs.get(n, 0) for n in nums]

    def _check(self, other: "DistElement"):
        if self.level != other.level:
            raise LevelMismatch(f"levels {self.level} and {other.level}")
        if self.modulus != other.modulus:
            raise ModulusMismatch(f"modulus {self.modulus} vs {other.modulus}")

    def __add__(self, other):
        self._check(other)
        out = dict(self._coeffs)
        for k, v in other._coeffs.items():
            out[k] = out.get(k, 0) + v
        return DistElement(self.level, out, self.modulus)

    def __neg__(self):
        return DistElement(self.level, {k: -v for k, v in self._coeffs.items()}, self.modulus)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: int) -> "DistElement":
        return DistElement(self.level, {k: c * v for k, v in self._coeffs.items()}, self.modulus)

    def reduce(self, M: int) -> "DistElement":
        return DistElement(self.level, self._coeffs, M)

    def is_zero(self) -> bool:
        return not self._coeffs

    def __eq__(self, other):
        if not isinstance(other, DistElement):
            return NotImplemented
        return (self.level, self.modulus, self._coeffs) == (other.level, other.modulus, other._coeffs)

    def __hash__(self):
        return hash((self.level, self.modulus, frozenset(self._coeffs.items())))

    def terms(self) -> list[tuple[Fraction, int]]:
        return [(Fraction(n, self.level), c) for n, c in sorted(self._coeffs.items())]

    def __repr__(self):
        body = " + ".join(f"{c}[{Fraction(n, self.level)}]" for n, c in sorted(self._coeffs.items()))
        return f"DistElement({body or '0'}{', mod ' + str(self.modulus) if self.modulus else ''})"


def normalize_symbol(a: Fraction) -> DistElement:
    """[a] written in the canonical basis of U(level)."""
    return DistElement(a.level, level(a.level).normalize(a.numerator))


# ---------------------------------------------------------------------------
# order ideals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrderIdeal:
    """Downward-closed family of subsets of prime indices, given by its maximal sets."""

    maximal_sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        sets = {frozenset(x) for x in self.maximal_sets}
        maximal = [x for x in sets if not any(x < y for y in sets)]
        object.__setattr__(self, "maximal_sets",
                           tuple(sorted(maximal, key=lambda x: (sum(1 << i for i in x)))))

    @classmethod
    def full(cls, s: int) -> "OrderIdeal":
        return cls((frozenset(range(s)),))

    @classmethod
    def empty(cls) -> "OrderIdeal":
        return cls(())

    @classmethod
    def up_to(cls, s: int, n: int) -> "OrderIdeal":
        """I(n): all subsets of size <= n."""
        if n < 0:
            return cls.empty()
        return cls(tuple(T for T in subsets(s) if len(T) == min(n, s)))

    @classmethod
    def from_family(cls, family: Iterable[Iterable[int]]) -> "OrderIdeal":
        fam = {frozenset(x) for x in family}
        for T in fam:
            for i in T:
                if T - {i} not in fam:
                    raise NotAnIdeal(f"{sorted(T)} is in the family but {sorted(T - {i})} is not")
        return cls(tuple(fam))

    @classmethod
    def from_primes(cls, cfg: PrimeConfig, maximal: Iterable[Iterable[int]]) -> "OrderIdeal":
        pos = {p: i for i, p in enumerate(cfg.primes)}
        sets = []
        for group in maximal:
            try:
                sets.append(frozenset(pos[p] for p in group))
            except KeyError as exc:
                raise NotAnIdeal(f"prime {exc.args[0]} is not in {cfg.primes}") from None
        return cls(tuple(sets))

    def __contains__(self, T) -> bool:
        T = frozenset(T)
        return any(T <= m for m in self.maximal_sets)

    def members(self, s: int) -> list[frozenset[int]]:
        return [T for T in subsets(s) if T in self]

    def __and__(self, other: "OrderIdeal") -> "OrderIdeal":
        return OrderIdeal(tuple(a & b for a in self.maximal_sets for b in other.maximal_sets))

    def __or__(self, other: "OrderIdeal") -> "OrderIdeal":
        return OrderIdeal(self.maximal_sets + other.maximal_sets)

    def is_full(self, s: int) -> bool:
        return frozenset(range(s)) in self

    def prime_lists(self, cfg: PrimeConfig) -> list[list[int]]:
        return [[cfg.primes[i] for i in sorted(T)] for T in self.maximal_sets]


# ---------------------------------------------------------------------------
# squarefree levels: Galois action
# ---------------------------------------------------------------------------

def config_for_level(f: int, M: int = 1) -> PrimeConfig:
    parts = factorize(f)
    if any(e > 1 for _, e in parts):
        raise BadPrime(f"level {f} is not squarefree")
    return make_config([p for p, _ in parts], M)


def ideal_basis(ideal: OrderIdeal, f: int) -> list[Fraction]:
    """Basis symbols [a] of U_S(I): supp a in I."""
    cfg = config_for_level(f)
    return [a for a in basis(f) if cfg.support(a.numerator) in ideal]


def _ideal_numerators(cfg: PrimeConfig, ideal: OrderIdeal | None) -> tuple[int, ...]:
    nums = level(cfg.r).basis
    if ideal is None:
        return nums
    return tuple(n for n in nums if cfg.support(n) in ideal)


def apply_group_ring(cfg: PrimeConfig, x: GroupRingElement, n: int) -> dict[int, int]:
    """x . [n/r] as an unnormalised combination of symbols."""
    comps = cfg.components(n)
    out: dict[int, int] = {}
    for exps, c in x.items():
        m = cfg.numerator(cfg.act(exps, comps))
        out[m] = out.get(m, 0) + c
    return out


def group_ring_matrix(cfg: PrimeConfig, x: GroupRingElement, ideal: OrderIdeal | None = None) -> ExactMatrix:
    """Matrix of x acting on U_S(I) in canonical coordinates."""
    nums = _ideal_numerators(cfg, ideal)
    index = {n: k for k, n in enumerate(nums)}
    lv = level(cfg.r)
    entries: dict[tuple[int, int], int] = {}
    for j, n in enumerate(nums):
        for m, c in apply_group_ring(cfg, x, n).items():
            for k, v in lv.normalize(m).items():
                key = (index[k], j)
                entries[key] = entries.get(key, 0) + c * v
    return ExactMatrix(len(nums), len(nums), entries)


def galois_action_matrix(g: GroupElement, f: int, ideal: OrderIdeal | None = None) -> ExactMatrix:
    cfg = config_for_level(f)
    if g.orders != cfg.orders:
        raise LevelMismatch(f"group element for orders {g.orders}, level {f} has {cfg.orders}")
    return group_ring_matrix(cfg, GroupRingElement.of(g), ideal)


def _invariance_matrix(cfg: PrimeConfig, ideal: OrderIdeal | None = None) -> ExactMatrix:
    n = len(_ideal_numerators(cfg, ideal))
    blocks = [galois_action_matrix(GroupElement.sigma(cfg, i), cfg.r, ideal) - ExactMatrix.identity(n)
              for i in range(cfg.s)]
    if not blocks:
        return ExactMatrix.zeros(0, n)
    return blocks[0].vstack(*blocks[1:])


def fixed_points(f: int, M: int) -> list[DistElement]:
    """Generators of (U/MU)^{G_S} as a Z/M-module."""
    cfg = config_for_level(f, M)
    gens = kernel_basis_mod(_invariance_matrix(cfg), M)
    return [DistElement.from_vector(f, col, M) for col in gens.columns()]


def fixed_point_module(f: int, M: int) -> CohomologyGroup:
    """Isomorphism type of (U/MU)^{G_S}."""
    cfg = config_for_level(f, M)
    A = _invariance_matrix(cfg)
    return homology_at(ExactMatrix.zeros(A.cols, 0), A, M)


def theorem_b_family(f: int, M: int) -> list[tuple[int, DistElement]]:
    """(r', D_{r'}[sum_{l | r'} 1/l] mod M) for every divisor r' of f."""
    cfg = config_for_level(f, M)
    out = []
    for T in subsets(cfg.s):
        D = derivative_element(cfg, T)
        start = cfg.numerator([int(i in T) for i in range(cfg.s)])
        symbols = apply_group_ring(cfg, D, start)
        out.append((cfg.r_T(T), DistElement.from_symbols(f, symbols).reduce(M)))
    return out


@dataclass
class TheoremBReport:
    level: int
    modulus: int
    family: list[tuple[int, DistElement]]
    fixed: bool
    independent: bool
    spans: bool
    module: CohomologyGroup
    expected_order: int

    @property
    def passed(self) -> bool:
        return self.fixed and self.independent and self.spans and self.module.order == self.expected_order


def verify_theorem_b(f: int, M: int) -> TheoremBReport:
    cfg = config_for_level(f, M)
    fam = theorem_b_family(f, M)
    A = _invariance_matrix(cfg)
    F = ExactMatrix.from_columns([x.vector() for _, x in fam], len(level(f).basis))
    fixed = (A @ F).mod(M).is_zero()
    fs = invariant_factors(F.mod(M)) if M > 1 else ()
    independent = M == 1 or (len(fs) == len(fam) and all(gcd(d, M) == 1 for d in fs))
    spans = all(solve_mod(F, g.vector(), M) is not None for g in fixed_points(f, M))
    return TheoremBReport(f, M, fam, fixed, independent, spans, fixed_point_module(f, M),
                          M ** (2 ** cfg.s))


# ---------------------------------------------------------------------------
# general levels: the A(f) bases of the appendix
# ---------------------------------------------------------------------------

def in_R0(x: Q) -> bool:
    """No prime p has leading partial-fraction digit p - 1."""
    x = x - (x.numerator // x.denominator)
    d = x.denominator
    return level(d).offending(x.numerator) is None


def _apply_X(p: int, element: dict[Q, int]) -> dict[Q, int]:
    out: dict[Q, int] = {}
    for x, c in element.items():
        for i in range(1, p + 1):
            y = (x + i) / p
            y -= y.numerator // y.denominator
            out[y] = out.get(y, 0) + c
    return {k: v for k, v in out.items() if v}


def _apply_Y(p: int, element: dict[Q, int]) -> dict[Q, int]:
    out = dict(element)
    for k, v in _apply_X(p, element).items():
        out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v}


def xg_family(f: int) -> list[tuple[int, Q]]:
    """Index set {(g, x) : g | f, x in R_0 cap (g/f)Z cap [0, 1)}."""
    out = []
    for g in range(1, f + 1):
        if f % g:
            continue
        for k in range(f // g):
            x = Q(k * g, f)
            if in_R0(x):
                out.append((g, x))
    return out


def xg_basis_matrix(f: int, variant: str = "X") -> ExactMatrix:
    """Columns: X_g[x] (or Y_g[x]) in the standard basis {[j/f]} of A(f)."""
    if variant not in ("X", "Y"):
        raise ValueError(f"variant must be 'X' or 'Y', got {variant!r}")
    op = _apply_X if variant == "X" else _apply_Y
    cols = []
    for g, x in xg_family(f):
        element = {x: 1}
        for p, e in factorize(g):
            for _ in range(e):
                element = op(p, element)
        col = [0] * f
        for y, c in element.items():
            j = y * f
            if j.denominator != 1:
                raise AssertionError(f"{y} escaped A({f})")
            col[int(j)] += c
        cols.append(col)
    return ExactMatrix.from_columns(cols, f)


def inclusion_matrix(g: int, f: int) -> ExactMatrix:
    """U(g) -> U(f) in canonical bases."""
    if f % g:
        raise LevelMismatch(f"{g} does not divide {f}")
    lf = level(f)
    index = lf.index
    src = level(g).basis
    entries = {}
    for j, n in enumerate(src):
        for k, v in lf.normalize(n * (f // g)).items():
            entries[(index[k], j)] = v
    return ExactMatrix(len(lf.basis), len(src), entries)


def relation_matrix(f: int) -> ExactMatrix:
    """Columns span the distribution relations inside Z^f = A(f)."""
    cols = []
    for p, _ in factorize(f):
        for n in range(0, f, p):
            col = [0] * f
            col[n] += 1
            for k in range(p):
                col[(n // p + k * (f // p)) % f] -= 1
            cols.append(col)
    return ExactMatrix.from_columns(cols, f)
