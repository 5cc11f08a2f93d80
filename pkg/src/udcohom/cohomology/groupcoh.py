"""Cohomology of G_T with trivial coefficients, the diagonal map, and cup products on H*(G_S, Z/M)."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import comb, gcd
from typing import Mapping, Sequence

from ..exactlin import (CohomologyGroup, ExactMatrix, homology_at, kernel_basis,
                        lattice_quotient)
from ..galois import PrimeConfig, subsets
from ..signs import (MultiIndex, deg, koszul_sign, multi_indices, omega_pair, omega_sign,
                     omega_vector, parity_sign, supp)


def _gcd_of_orders(cfg: PrimeConfig, support) -> int:
    g = 0
    for i in support:
        g = gcd(g, cfg.orders[i])
    return g


def even_indices(s: int, within, max_degree: int) -> list[MultiIndex]:
    """e in 2R with supp e inside `within` and deg e <= max_degree."""
    within = set(within)
    out = []
    for q in range(0, max_degree + 1, 2):
        out += [e for e in multi_indices(s, q) if all(x % 2 == 0 for x in e) and supp(e) <= within]
    return out


def A_e(cfg: PrimeConfig, e: Sequence[int], n: int) -> CohomologyGroup:
    """n-th cohomology of the summand C_e: (Z/m_e)^{C(t-1, j)} at n = deg e - j."""
    t = len(supp(e))
    if t == 0:
        return CohomologyGroup(1, ()) if n == 0 else CohomologyGroup()
    j = deg(e) - n
    if not 0 <= j <= t - 1:
        return CohomologyGroup()
    m = _gcd_of_orders(cfg, supp(e))
    return CohomologyGroup.from_orders(0, [m] * comb(t - 1, j))


def cohomology_Z_closed_form(cfg: PrimeConfig, T, n_max: int) -> list[CohomologyGroup]:
    """H^n(G_T, Z) for n = 0..n_max as a sum of the A_e over even e with supp e in T."""
    T = frozenset(T)
    out = []
    for n in range(n_max + 1):
        total = CohomologyGroup()
        for e in even_indices(cfg.s, T, n + len(T)):
            total = total + A_e(cfg, e, n)
        out.append(total)
    return out


@dataclass
class CochainComplex:
    """Graded free modules with labelled bases and differentials C^n -> C^{n+1}."""

    bases: dict[int, list]
    maps: dict[int, ExactMatrix]
    modulus: int = 0

    def differential(self, n: int) -> ExactMatrix:
        if n in self.maps:
            return self.maps[n]
        return ExactMatrix.zeros(len(self.bases.get(n + 1, [])), len(self.bases.get(n, [])))

    def homology(self, n: int, modulus: int | None = None) -> CohomologyGroup:
        M = self.modulus if modulus is None else modulus
        return homology_at(self.differential(n - 1), self.differential(n), M)


def trivial_coefficient_complex(cfg: PrimeConfig, T, n_max: int) -> CochainComplex:
    """C_T = Hom(P_T, Z): basis [e], supp e in T, with N_i acting as l_i - 1 and 1 - sigma_i as 0."""
    T = frozenset(T)
    bases = {n: [e for e in multi_indices(cfg.s, n) if supp(e) <= T] for n in range(n_max + 2)}
    maps = {}
    for n in range(n_max + 1):
        index = {e: k for k, e in enumerate(bases[n + 1])}
        entries = {}
        for j, e in enumerate(bases[n]):
            w = omega_vector(e)
            for i in sorted(T):
                if e[i] % 2 == 0:
                    continue
                f = tuple(x + (k == i) for k, x in enumerate(e))
                entries[(index[f], j)] = parity_sign(w[i]) * cfg.orders[i]
        maps[n] = ExactMatrix(len(bases[n + 1]), len(bases[n]), entries)
    return CochainComplex(bases, maps)


def cohomology_Z_snf(cfg: PrimeConfig, T, n_max: int) -> list[CohomologyGroup]:
    C = trivial_coefficient_complex(cfg, T, n_max)
    return [C.homology(n) for n in range(n_max + 1)]


# ---------------------------------------------------------------------------
# restriction kernels (E_2 terms)
# ---------------------------------------------------------------------------

def restriction_kernel(cfg: PrimeConfig, T, q: int) -> CohomologyGroup:
    """Intersection over i in T of ker(H^q(G_S, Z) -> H^q(G_{S - i}, Z)), from cochains."""
    S = frozenset(range(cfg.s))
    X = trivial_coefficient_complex(cfg, S, q)
    dq, dprev = X.differential(q), X.differential(q - 1)
    Z = kernel_basis(dq)
    if Z.cols == 0:
        return CohomologyGroup()
    blocks = []
    for i in sorted(T):
        Y = trivial_coefficient_complex(cfg, S - {i}, q)
        keep = {e: k for k, e in enumerate(Y.bases[q])}
        proj = ExactMatrix(len(Y.bases[q]), len(X.bases[q]),
                           {(keep[e], j): 1 for j, e in enumerate(X.bases[q]) if e in keep})
        blocks.append((proj @ Z, Y.differential(q - 1)))
    if blocks:
        # y with proj_i Z y in im(d_Y) for all i: kernel of [proj_i Z | -d_Yi] stacked
        widths = [b.cols for _, b in blocks]
        rows = []
        for k, (pz, dy) in enumerate(blocks):
            pad_left = sum(widths[:k])
            pad_right = sum(widths[k + 1:])
            parts = [pz]
            if pad_left:
                parts.append(ExactMatrix.zeros(pz.rows, pad_left))
            parts.append(dy.scale(-1))
            if pad_right:
                parts.append(ExactMatrix.zeros(pz.rows, pad_right))
            rows.append(parts[0].hstack(*parts[1:]))
        big = rows[0].vstack(*rows[1:])
        K = kernel_basis(big)
        Z = Z @ K.submatrix(rows=range(Z.cols))
    return lattice_quotient(Z, dprev)


def restriction_kernel_prediction(cfg: PrimeConfig, T, q: int) -> CohomologyGroup:
    """Sum of A_e^q over even e with supp e containing T."""
    T = frozenset(T)
    total = CohomologyGroup()
    for e in even_indices(cfg.s, range(cfg.s), q + cfg.s):
        if T <= supp(e):
            total = total + A_e(cfg, e, q)
    return total


# ---------------------------------------------------------------------------
# Lemma complex
# ---------------------------------------------------------------------------

@dataclass
class LemmaReport:
    homology: dict[int, CohomologyGroup]
    predicted_rank: int

    @property
    def passed(self) -> bool:
        return all(H.is_trivial for n, H in self.homology.items() if n) and \
            self.homology.get(0, CohomologyGroup()) == CohomologyGroup(self.predicted_rank, ())


def lemma_complex(s: int, T, B_ranks: Mapping[frozenset, int]) -> CochainComplex:
    """C^n = sum of A_{T'} over |T'| = s - n, T' containing S - T; A_{T'} = sum_{T'' in T'} B_{T''}."""
    T = frozenset(T)
    S = frozenset(range(s))
    rest = S - T
    sets = subsets(s)

    def block(Tp):
        return [(Tpp, k) for Tpp in sets if Tpp <= Tp for k in range(B_ranks.get(Tpp, 0))]

    bases = {}
    for n in range(0, len(T) + 1):
        bases[n] = [(Tp, lab) for Tp in sets if len(Tp) == s - n and Tp >= rest for lab in block(Tp)]
    maps = {}
    for n in range(0, len(T)):
        index = {x: k for k, x in enumerate(bases[n + 1])}
        entries = {}
        for j, (Tp, (Tpp, k)) in enumerate(bases[n]):
            inter = Tp & T
            for i in sorted(inter):
                target = Tp - {i}
                if Tpp <= target:
                    entries[(index[(target, (Tpp, k))], j)] = omega_sign(i, inter)
        maps[n] = ExactMatrix(len(bases[n + 1]), len(bases[n]), entries)
    return CochainComplex(bases, maps)


def lemma_complex_check(s: int, T, B_ranks: Mapping[frozenset, int]) -> LemmaReport:
    T = frozenset(T)
    C = lemma_complex(s, T, B_ranks)
    for n in range(len(T) - 1):
        if not (C.differential(n + 1) @ C.differential(n)).is_zero():
            raise AssertionError(f"lemma complex: d^2 != 0 at degree {n}")
    H = {n: C.homology(n) for n in C.bases}
    predicted = sum(B_ranks.get(Tp, 0) for Tp in subsets(s) if Tp >= T)
    return LemmaReport(H, predicted)


# ---------------------------------------------------------------------------
# diagonal map and cup products
# ---------------------------------------------------------------------------

def cyclic_diagonal_terms(l: int, a: int, b: int, twisted: bool = False) -> list[tuple[int, int, int]]:
    """Phi_{a,b}(1) for the cyclic factor of order l - 1, as (m, n, c): c sigma^m (x) sigma^n.

    The untwisted formula commutes with boundaries when odd steps are sigma - 1.
    With odd steps 1 - sigma (the resolution used for every Hom complex here)
    the odd-odd term changes sign; `twisted` selects that variant.
    """
    if a % 2 == 0:
        return [(0, 0, 1)]
    if b % 2 == 0:
        return [(0, 1, 1)]
    c = -1 if twisted else 1
    return [(m, n, c) for n in range(l - 1) for m in range(n)]


def diagonal_component(cfg: PrimeConfig, e: Sequence[int], f: Sequence[int], twisted: bool = False) -> dict:
    """Phi_{e,f}(1_{e+f}) in Z[G] e (x) Z[G] f, keyed by (g exponents, h exponents).

    Built as the product of the cyclic formulas followed by the reordering
    (x_0 (x) y_0) (x) (x_1 (x) y_1) ... -> (x_0 (x) x_1 ...) (x) (y_0 (x) y_1 ...),
    whose sign is read off from the permutation.
    """
    s = cfg.s
    degrees = []
    for i in range(s):
        degrees += [e[i], f[i]]
    perm = [2 * i for i in range(s)] + [2 * i + 1 for i in range(s)]
    sign = koszul_sign(degrees, perm)
    per_prime = [cyclic_diagonal_terms(cfg.primes[i], e[i], f[i], twisted) for i in range(s)]
    out: dict = {}
    for combo in product(*per_prime):
        g = tuple(m % cfg.orders[i] for i, (m, _, _) in enumerate(combo))
        h = tuple(n % cfg.orders[i] for i, (_, n, _) in enumerate(combo))
        c = sign
        for _, _, x in combo:
            c *= x
        out[(g, h)] = out.get((g, h), 0) + c
    return out


def diagonal(cfg: PrimeConfig, E: Sequence[int], twisted: bool = False) -> dict:
    """Phi(1_E) = sum over e + f = E of Phi_{e,f}, keyed by (e, f, g, h)."""
    out = {}
    for e in product(*(range(x + 1) for x in E)):
        f = tuple(x - y for x, y in zip(E, e))
        for (g, h), c in diagonal_component(cfg, e, f, twisted).items():
            out[(e, f, g, h)] = out.get((e, f, g, h), 0) + c
    return out


def _boundary_terms(cfg: PrimeConfig, e: Sequence[int], odd_step: str):
    """d(1_e) in P as [(coefficient, group exponents, e - eps_i)]."""
    w = omega_vector(e)
    flip = 1 if odd_step == "1-sigma" else -1
    for i in range(cfg.s):
        if e[i] == 0:
            continue
        sgn = parity_sign(w[i])
        lower = tuple(x - (k == i) for k, x in enumerate(e))
        unit = tuple(int(k == i) for k in range(cfg.s))
        zero = (0,) * cfg.s
        if e[i] % 2:
            yield sgn * flip, zero, lower
            yield -sgn * flip, unit, lower
        else:  # N_i
            for k in range(cfg.orders[i]):
                yield sgn, tuple(k * x for x in unit), lower


def _add_exps(cfg, a, b):
    return tuple((x + y) % n for x, y, n in zip(a, b, cfg.orders))


def diagonal_chain_map_defect(cfg: PrimeConfig, E: Sequence[int], odd_step: str = "1-sigma",
                              twisted: bool = True) -> dict:
    """(d (x) 1 + 1 (x) d) Phi(1_E) - Phi(d 1_E); empty iff Phi commutes with d on 1_E.

    odd_step is "1-sigma" or "sigma-1", the boundary out of odd degrees.
    """
    if odd_step not in ("1-sigma", "sigma-1"):
        raise ValueError(f"unknown boundary convention {odd_step!r}")
    out: dict = {}

    def add(key, c):
        v = out.get(key, 0) + c
        if v:
            out[key] = v
        else:
            out.pop(key, None)

    for (e, f, g, h), c in diagonal(cfg, E, twisted).items():
        for c2, k, lower in _boundary_terms(cfg, e, odd_step):
            add((lower, f, _add_exps(cfg, g, k), h), c * c2)
        sgn = parity_sign(deg(e))
        for c2, k, lower in _boundary_terms(cfg, f, odd_step):
            add((e, lower, g, _add_exps(cfg, h, k)), c * c2 * sgn)
    for c2, k, lower in _boundary_terms(cfg, E, odd_step):
        for (e, f, g, h), c in diagonal(cfg, lower, twisted).items():
            add((e, f, _add_exps(cfg, g, k), _add_exps(cfg, h, k)), -c * c2)
    return out


def cup_closed_form(cfg: PrimeConfig, M: int, e: Sequence[int], f: Sequence[int]) -> tuple[int, MultiIndex]:
    """[e] cup [f] = coefficient [e + f] in H*(G_S, Z/M)."""
    c = parity_sign(omega_pair(e, f))
    for i in range(cfg.s):
        if e[i] % 2 and f[i] % 2:
            c *= cfg.orders[i] // 2
    return (c % M if M else c), tuple(x + y for x, y in zip(e, f))


def cup_via_diagonal(cfg: PrimeConfig, M: int, e: Sequence[int], f: Sequence[int],
                     twisted: bool = False) -> tuple[int, MultiIndex]:
    """Evaluate [e] (x) [f] on Phi(1_{e+f}); trivial coefficients send every group element to 1."""
    c = sum(diagonal_component(cfg, e, f, twisted).values())
    return (c % M if M else c), tuple(x + y for x, y in zip(e, f))
