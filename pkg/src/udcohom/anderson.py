"""Anderson's resolution L_S of U_S, its double-complex splitting and order-ideal subcomplexes.

A symbol [a, T] is stored as (T, n): T a frozenset of prime indices and a = n/r.
Degree is -|T|; d raises degree by one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .distribution import OrderIdeal, _ideal_numerators, factorize
from .errors import SplitMismatch
from .exactlin import CohomologyGroup, ExactMatrix, homology_at
from .galois import PrimeConfig, frobenius, mask_of, norm_element, subsets
from .signs import omega_sign


@dataclass(frozen=True, order=True)
class LSymbol:
    T: frozenset
    numerator: int

    def sort_key(self):
        return (mask_of(self.T), self.numerator)


def _sorted_symbols(syms):
    return sorted(syms, key=LSymbol.sort_key)


@dataclass
class LComplex:
    """Per-degree symbol lists with d, d1, d2 as maps L^p -> L^{p+1}."""

    cfg: PrimeConfig
    ideal: OrderIdeal
    symbols: dict[int, list[LSymbol]]
    d: dict[int, ExactMatrix]
    d1: dict[int, ExactMatrix] = field(default_factory=dict)
    d2: dict[int, ExactMatrix] = field(default_factory=dict)

    @property
    def degrees(self) -> range:
        return range(-self.cfg.s, 1)

    def sizes(self) -> tuple[int, ...]:
        return tuple(len(self.symbols[p]) for p in self.degrees)

    def index(self, p: int) -> dict[LSymbol, int]:
        return {x: k for k, x in enumerate(self.symbols[p])}

    def bidegree(self, x: LSymbol) -> tuple[int, int]:
        k = len(self.cfg.support(x.numerator))
        s = self.cfg.s
        return k - s, s - k - len(x.T)

    def differential(self, p: int, which: str = "d") -> ExactMatrix:
        """Map out of degree p (zero outside the stored range)."""
        mats = {"d": self.d, "d1": self.d1, "d2": self.d2}[which]
        if p in mats:
            return mats[p]
        rows = len(self.symbols.get(p + 1, []))
        cols = len(self.symbols.get(p, []))
        return ExactMatrix.zeros(rows, cols)


def _symbols_of_ideal(cfg: PrimeConfig, ideal: OrderIdeal) -> dict[int, list[LSymbol]]:
    out: dict[int, list[LSymbol]] = {p: [] for p in range(-cfg.s, 1)}
    for T in subsets(cfg.s):
        for n in range(cfg.r):
            comps = cfg.components(n)
            if any(comps[i] for i in T):
                continue
            if (T | cfg.support(n)) in ideal:
                out[-len(T)].append(LSymbol(T, n))
    return {p: _sorted_symbols(v) for p, v in out.items()}


def _assemble(cfg, symbols, p, column_fn) -> ExactMatrix:
    target = {x: k for k, x in enumerate(symbols.get(p + 1, []))}
    entries: dict[tuple[int, int], int] = {}
    for j, x in enumerate(symbols[p]):
        for y, c in column_fn(x):
            k = target[y]
            entries[(k, j)] = entries.get((k, j), 0) + c
    return ExactMatrix(len(target), len(symbols[p]), entries)


def _d_column(cfg: PrimeConfig, x: LSymbol):
    """d[a,T] from the defining relation, with preimages found by brute force."""
    r = cfg.r
    for i in sorted(x.T):
        w = omega_sign(i, x.T)
        rest = x.T - {i}
        li = cfg.primes[i]
        yield LSymbol(rest, x.numerator), w
        for m in range(r):
            if li * m % r == x.numerator:
                yield LSymbol(rest, m), -w


def _d1_column(cfg: PrimeConfig, x: LSymbol):
    """-sum_i omega(i,T) N_i [Fr_i^-1 a + 1/l_i, T - i]."""
    for i in sorted(x.T):
        w = omega_sign(i, x.T)
        rest = x.T - {i}
        fr_inv = frobenius(cfg, i).inverse()
        comps = list(cfg.act(fr_inv.exponents, cfg.components(x.numerator)))
        comps[i] = 1
        for exps, c in norm_element(cfg, {i}).items():
            yield LSymbol(rest, cfg.numerator(cfg.act(exps, comps))), -w * c


def _d2_column(cfg: PrimeConfig, x: LSymbol):
    """sum_i omega(i,T) (1 - Fr_i^-1) [a, T - i]."""
    for i in sorted(x.T):
        w = omega_sign(i, x.T)
        rest = x.T - {i}
        fr_inv = frobenius(cfg, i).inverse()
        yield LSymbol(rest, x.numerator), w
        moved = cfg.numerator(cfg.act(fr_inv.exponents, cfg.components(x.numerator)))
        yield LSymbol(rest, moved), -w


def build_L(cfg: PrimeConfig, ideal: OrderIdeal | None = None, split: bool = True) -> LComplex:
    ideal = OrderIdeal.full(cfg.s) if ideal is None else ideal
    symbols = _symbols_of_ideal(cfg, ideal)
    d = {p: _assemble(cfg, symbols, p, lambda x: _d_column(cfg, x)) for p in range(-cfg.s, 0)}
    L = LComplex(cfg, ideal, symbols, d)
    if split:
        split_differential(L)
    return L


def split_differential(L: LComplex) -> tuple[dict[int, ExactMatrix], dict[int, ExactMatrix]]:
    """Fill in d1, d2 and check d = d1 + d2 and the anticommutation identities."""
    cfg = L.cfg
    for p in range(-cfg.s, 0):
        L.d1[p] = _assemble(cfg, L.symbols, p, lambda x: _d1_column(cfg, x))
        L.d2[p] = _assemble(cfg, L.symbols, p, lambda x: _d2_column(cfg, x))
        if L.d1[p] + L.d2[p] != L.d[p]:
            raise SplitMismatch(f"d != d1 + d2 in degree {p}")
    for p in range(-cfg.s, -1):
        a1, b1 = L.d1[p], L.d1[p + 1]
        a2, b2 = L.d2[p], L.d2[p + 1]
        if not (b1 @ a1).is_zero():
            raise SplitMismatch(f"d1^2 != 0 in degree {p}")
        if not (b2 @ a2).is_zero():
            raise SplitMismatch(f"d2^2 != 0 in degree {p}")
        if not (b1 @ a2 + b2 @ a1).is_zero():
            raise SplitMismatch(f"d1 d2 + d2 d1 != 0 in degree {p}")
    return L.d1, L.d2


def homology_of_L(L: LComplex) -> dict[int, CohomologyGroup]:
    return {p: homology_at(L.differential(p - 1), L.differential(p)) for p in L.degrees}


def augmentation_rank(cfg: PrimeConfig, ideal: OrderIdeal) -> int:
    """rank U_S(I): basic fractions with support in the ideal."""
    return len(_ideal_numerators(cfg, ideal))


def is_acyclic(L: LComplex) -> bool:
    H = homology_of_L(L)
    expected = CohomologyGroup(augmentation_rank(L.cfg, L.ideal), ())
    return all(H[p].is_trivial for p in L.degrees if p) and H[0] == expected


# ---------------------------------------------------------------------------
# first filtration
# ---------------------------------------------------------------------------

@dataclass
class E1Row:
    p2: int
    homology: dict[int, CohomologyGroup]
    predicted_rank: int

    @property
    def concentrated(self) -> bool:
        for p1, H in self.homology.items():
            if p1 == -self.p2:
                if H != CohomologyGroup(self.predicted_rank, ()):
                    return False
            elif not H.is_trivial:
                return False
        return True

    @property
    def rank(self) -> int:
        H = self.homology.get(-self.p2)
        return H.free_rank if H else 0


def first_filtration_E1(L: LComplex) -> list[E1Row]:
    """H_{d1} of each row L^{., p2}, for p2 = s, ..., 0."""
    if not L.d1 and L.cfg.s:
        split_differential(L)
    cfg, s = L.cfg, L.cfg.s
    rows = []
    for p2 in range(s, -1, -1):
        pos = {p: [k for k, x in enumerate(L.symbols[p]) if L.bidegree(x)[1] == p2] for p in L.degrees}

        def row_map(p):
            if p + 1 not in pos or p not in pos:
                return ExactMatrix.zeros(len(pos.get(p + 1, [])), len(pos.get(p, [])))
            return L.differential(p, "d1").submatrix(pos[p + 1], pos[p])

        homology = {}
        for p in L.degrees:
            H = homology_at(row_map(p - 1), row_map(p))
            if pos[p] or not H.is_trivial:
                homology[p - p2] = H
        lo = augmentation_rank(cfg, L.ideal & OrderIdeal.up_to(s, s - p2 - 1))
        hi = augmentation_rank(cfg, L.ideal & OrderIdeal.up_to(s, s - p2))
        rows.append(E1Row(p2, homology, hi - lo))
    return rows


# ---------------------------------------------------------------------------
# general level f
# ---------------------------------------------------------------------------

def _squarefree_divisors(f: int) -> list[tuple[int, ...]]:
    primes = [p for p, _ in factorize(f)]
    return [tuple(p for k, p in enumerate(primes) if mask >> k & 1) for mask in range(1 << len(primes))]


def build_general_L(f: int) -> dict[int, tuple[list[tuple[int, tuple[int, ...]]], ExactMatrix]]:
    """L(f) on symbols [x, g], x = n/f in (g/f)Z, g | f squarefree (small f only).

    Returns degree -> (symbols, d out of that degree).
    """
    if f > 12 and f != 21:
        raise ValueError("the general-level builder is a cross-check for small f")
    divisors = _squarefree_divisors(f)
    m = max((len(g) for g in divisors), default=0)
    symbols = {p: [] for p in range(-m, 1)}
    for g in divisors:
        step = 1
        for p in g:
            step *= p
        for n in range(0, f, step):
            symbols[-len(g)].append((n, g))
    index = {p: {x: k for k, x in enumerate(v)} for p, v in symbols.items()}
    out = {}
    for deg in range(-m, 1):
        target = index.get(deg + 1, {})
        entries: dict[tuple[int, int], int] = {}
        if deg < 0:
            for j, (n, g) in enumerate(symbols[deg]):
                for i, p in enumerate(g):
                    w = -1 if i % 2 else 1
                    rest = g[:i] + g[i + 1:]
                    k = target[(n, rest)]
                    entries[(k, j)] = entries.get((k, j), 0) + w
                    for jj in range(1, p + 1):
                        y = ((n + jj * f) // p) % f
                        k = target[(y, rest)]
                        entries[(k, j)] = entries.get((k, j), 0) - w
        out[deg] = (symbols[deg], ExactMatrix(len(target), len(symbols[deg]), entries))
    return out


def general_L_homology(f: int) -> dict[int, CohomologyGroup]:
    L = build_general_L(f)
    degs = sorted(L)
    out = {}
    for p in degs:
        d_out = L[p][1]
        d_in = L[p - 1][1] if p - 1 in L else ExactMatrix.zeros(len(L[p][0]), 0)
        out[p] = homology_at(d_in, d_out)
    return out
