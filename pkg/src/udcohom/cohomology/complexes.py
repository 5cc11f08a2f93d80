"""Hom(P, U_S) and the double complex K = Hom(P, L_S), with the checks that compare them."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..anderson import LComplex, LSymbol, build_L
from ..distribution import (DistElement, OrderIdeal, _ideal_numerators, group_ring_matrix, level)
from ..exactlin import CohomologyGroup, ExactMatrix, homology_at
from ..galois import (GroupElement, GroupRingElement, PrimeConfig, check_modulus, mask_of, norm_element,
                      subsets)
from ..signs import MultiIndex, multi_indices, omega_vector, parity_sign, supp
from .groupcoh import A_e, CochainComplex, even_indices


@dataclass
class TruncatedComplex(CochainComplex):
    """A cochain complex built for degrees <= n_max + 1; homology is certified for n <= certified."""

    q_max: int = 0
    certified: int = 0
    level: int = 1
    parts: dict[int, dict[str, ExactMatrix]] = field(default_factory=dict)
    L: LComplex | None = None

    def index(self, n: int) -> dict:
        return {x: k for k, x in enumerate(self.bases[n])}

    def cohomology(self, degrees) -> dict[int, CohomologyGroup]:
        return {n: self.homology(n) for n in degrees}


def _block_assemble(n_rows: int, n_cols: int, blocks) -> ExactMatrix:
    """blocks: iterable of (row offset, col offset, coefficient, matrix)."""
    entries: dict[tuple[int, int], int] = {}
    for r0, c0, coef, mat in blocks:
        for (i, j), v in mat.entries.items():
            key = (r0 + i, c0 + j)
            entries[key] = entries.get(key, 0) + coef * v
    return ExactMatrix(n_rows, n_cols, entries)


# ---------------------------------------------------------------------------
# Hom(P, U)
# ---------------------------------------------------------------------------

def hom_P_U(cfg: PrimeConfig, M: int = 0, n_max: int = 3, ideal: OrderIdeal | None = None) -> TruncatedComplex:
    """Degree n = sum over deg e = n of U_S(I); delta from rho(sigma_i) and rho(N_i)."""
    check_modulus(cfg.primes, M)
    nums = _ideal_numerators(cfg, ideal)
    u = len(nums)
    one = ExactMatrix.identity(u)
    step = []
    for i in range(cfg.s):
        sigma = group_ring_matrix(cfg, GroupRingElement.of(GroupElement.sigma(cfg, i)), ideal)
        step.append((one - sigma, group_ring_matrix(cfg, norm_element(cfg, {i}), ideal)))
    indices = {n: multi_indices(cfg.s, n) for n in range(n_max + 2)}
    bases = {n: [(e, a) for e in indices[n] for a in nums] for n in indices}
    maps = {}
    for n in range(n_max + 1):
        pos = {e: k * u for k, e in enumerate(indices[n + 1])}
        blocks = []
        for k, e in enumerate(indices[n]):
            w = omega_vector(e)
            for i in range(cfg.s):
                f = tuple(x + (j == i) for j, x in enumerate(e))
                mat = step[i][0] if e[i] % 2 == 0 else step[i][1]
                blocks.append((pos[f], k * u, parity_sign(w[i]), mat))
        maps[n] = _block_assemble(len(bases[n + 1]), len(bases[n]), blocks)
    return TruncatedComplex(bases, maps, M, q_max=n_max + 1, certified=n_max, level=cfg.r)


def cochain_value(U: TruncatedComplex, n: int, vector, e: MultiIndex) -> DistElement:
    """The component at index e of a degree-n cochain of Hom(P, U)."""
    coeffs = {a: v for (f, a), v in zip(U.bases[n], vector) if f == e and v}
    return DistElement(U.level, coeffs, U.modulus)


# ---------------------------------------------------------------------------
# K = Hom(P, L)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KSymbol:
    """[a, T, e] with a = numerator / r."""

    T: frozenset
    numerator: int
    e: MultiIndex

    def key(self):
        return (-len(self.T), self.e, mask_of(self.T), self.numerator)


def _columns_of(mat: ExactMatrix) -> dict[int, list[tuple[int, int]]]:
    out: dict[int, list[tuple[int, int]]] = {}
    for (i, j), v in mat.entries.items():
        out.setdefault(j, []).append((i, v))
    return out


def _sigma_permutations(cfg: PrimeConfig) -> list[list[int]]:
    out = []
    for i in range(cfg.s):
        exps = tuple(int(j == i) for j in range(cfg.s))
        out.append([cfg.numerator(cfg.act(exps, cfg.components(n))) for n in range(cfg.r)])
    return out


def build_K(cfg: PrimeConfig, M: int = 0, ideal: OrderIdeal | None = None, n_max: int = 3,
            split: bool = True, L: LComplex | None = None) -> TruncatedComplex:
    """Total complex of K on symbols [a, T, e], total degree deg e - |T|, for degrees -s .. n_max + 1.

    Every total degree is finite, so all degrees up to n_max are complete.
    With split=True the parts d, d1, d2, delta are kept per degree.
    """
    check_modulus(cfg.primes, M)
    L = build_L(cfg, ideal, split=split) if L is None else L
    s = cfg.s
    q_max = n_max + s + 1
    bases: dict[int, list[KSymbol]] = {}
    for n in range(-s, n_max + 2):
        syms = []
        for t in range(s + 1):
            for x in L.symbols[-t]:
                for e in multi_indices(s, n + t):
                    syms.append(KSymbol(x.T, x.numerator, e))
        bases[n] = sorted(syms, key=KSymbol.key)
    lindex = {p: L.index(p) for p in L.degrees}
    lcols = {name: {p: _columns_of(L.differential(p, name)) for p in range(-s, 0)}
             for name in (("d", "d1", "d2") if split else ("d",))}
    perms = _sigma_permutations(cfg)
    maps, parts = {}, {}
    for n in range(-s, n_max + 1):
        target = {x: k for k, x in enumerate(bases[n + 1])}
        ent = {name: {} for name in list(lcols) + ["delta"]}
        for j, x in enumerate(bases[n]):
            p = -len(x.T)
            if p < 0:
                col = lindex[p][LSymbol(x.T, x.numerator)]
                for name, per_degree in lcols.items():
                    for k, v in per_degree[p].get(col, ()):
                        y = L.symbols[p + 1][k]
                        key = (target[KSymbol(y.T, y.numerator, x.e)], j)
                        ent[name][key] = ent[name].get(key, 0) + v
            w = omega_vector(x.e)
            sign_T = parity_sign(len(x.T))
            dl = ent["delta"]
            for i in range(s):
                f = tuple(v + (k == i) for k, v in enumerate(x.e))
                sgn = sign_T * parity_sign(w[i])
                if x.e[i] % 2 == 0:
                    terms = [(x.numerator, sgn), (perms[i][x.numerator], -sgn)]
                else:
                    terms, a = [], x.numerator
                    for _ in range(cfg.orders[i]):
                        terms.append((a, sgn))
                        a = perms[i][a]
                for a, c in terms:
                    key = (target[KSymbol(x.T, a, f)], j)
                    dl[key] = dl.get(key, 0) + c
        shape = (len(bases[n + 1]), len(bases[n]))
        mats = {name: ExactMatrix(*shape, e) for name, e in ent.items()}
        maps[n] = mats["d"] + mats["delta"]
        if split:
            parts[n] = mats
    return TruncatedComplex(bases, maps, M, q_max=q_max, certified=n_max, level=cfg.r, parts=parts, L=L)


def triple_identities(K: TruncatedComplex) -> dict[str, bool]:
    """d1^2, d2^2, delta^2 and the pairwise anticommutators, over all stored degrees."""
    names = ("d1", "d2", "delta")
    out = {}
    degrees = sorted(K.parts)
    for a in names:
        out[f"{a}^2"] = all((K.parts[n + 1][a] @ K.parts[n][a]).is_zero()
                            for n in degrees if n + 1 in K.parts)
    for x, a in enumerate(names):
        for b in names[x + 1:]:
            out[f"{a}{b}+{b}{a}"] = all(
                (K.parts[n + 1][a] @ K.parts[n][b] + K.parts[n + 1][b] @ K.parts[n][a]).is_zero()
                for n in degrees if n + 1 in K.parts)
    out["d=d1+d2"] = all(K.parts[n]["d"] == K.parts[n]["d1"] + K.parts[n]["d2"] for n in degrees)
    out["D^2"] = all((K.maps[n + 1] @ K.maps[n]).is_zero() for n in K.maps if n + 1 in K.maps)
    return out


def augmentation(K: TruncatedComplex, U: TruncatedComplex, n: int) -> ExactMatrix:
    """u: [a, 0, e] -> [a] at e (normalised), [a, T, e] -> 0 for T nonempty."""
    target = U.index(n)
    lv = level(U.level)
    entries = {}
    for j, x in enumerate(K.bases[n]):
        if x.T:
            continue
        for k, v in lv.normalize(x.numerator).items():
            key = (target[(x.e, k)], j)
            entries[key] = entries.get(key, 0) + v
    return ExactMatrix(len(U.bases[n]), len(K.bases[n]), entries)


# ---------------------------------------------------------------------------
# verification reports
# ---------------------------------------------------------------------------

@dataclass
class DegreeRow:
    degree: int
    computed: CohomologyGroup
    predicted: CohomologyGroup

    @property
    def passed(self) -> bool:
        return self.computed == self.predicted


@dataclass
class DegreeReport:
    rows: list[DegreeRow]
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows) and all(v for v in self.extra.values() if isinstance(v, bool))


def theorem_a_prediction(cfg: PrimeConfig, n: int, ideal: OrderIdeal | None = None) -> CohomologyGroup:
    """Sum over T in I and even e with supp e containing T of A_e^{n + |T|}."""
    ideal = OrderIdeal.full(cfg.s) if ideal is None else ideal
    total = CohomologyGroup()
    for T in ideal.members(cfg.s):
        for e in even_indices(cfg.s, range(cfg.s), n + len(T) + cfg.s):
            if T <= supp(e):
                total = total + A_e(cfg, e, n + len(T))
    return total


def verify_theorem_A(cfg: PrimeConfig, n_max: int, ideal: OrderIdeal | None = None) -> DegreeReport:
    U = hom_P_U(cfg, 0, n_max, ideal)
    rows = [DegreeRow(n, U.homology(n), theorem_a_prediction(cfg, n, ideal)) for n in range(n_max + 1)]
    return DegreeReport(rows)


def verify_quasi_iso(cfg: PrimeConfig, M: int, n_max: int, ideal: OrderIdeal | None = None) -> DegreeReport:
    """H_total(K) against H(Hom(P, U)) degreewise; also checks that u is a chain map."""
    U = hom_P_U(cfg, M, n_max, ideal)
    K = build_K(cfg, M, ideal, n_max, split=False)
    rows = [DegreeRow(n, K.homology(n), U.homology(n)) for n in range(n_max + 1)]
    negative = all(K.homology(n).is_trivial for n in range(-cfg.s, 0))
    chain = all(((U.differential(n) @ augmentation(K, U, n)) -
                 (augmentation(K, U, n + 1) @ K.differential(n))).mod(M).is_zero()
                for n in range(0, n_max + 1))
    return DegreeReport(rows, {"negative degrees vanish": negative, "u is a chain map": chain})


def modM_class_count(cfg: PrimeConfig, M: int, n: int, ideal: OrderIdeal | None = None) -> int:
    """#{(T, e) : T in I, supp e contains T, deg e = n + |T|}."""
    ideal = OrderIdeal.full(cfg.s) if ideal is None else ideal
    count = 0
    for T in ideal.members(cfg.s):
        count += sum(1 for e in multi_indices(cfg.s, n + len(T)) if T <= supp(e))
    return count


@dataclass
class CountRow:
    degree: int
    count: int
    group: CohomologyGroup
    modulus: int

    @property
    def passed(self) -> bool:
        if self.modulus == 1:
            return self.group.is_trivial
        return self.group.order == self.modulus ** self.count and \
            all(f == self.modulus for f in self.group.invariant_factors)


def verify_modM_counts(cfg: PrimeConfig, M: int, n_max: int, ideal: OrderIdeal | None = None) -> list[CountRow]:
    U = hom_P_U(cfg, M, n_max, ideal)
    return [CountRow(n, modM_class_count(cfg, M, n, ideal), U.homology(n), M) for n in range(n_max + 1)]


def _p2_of(cfg: PrimeConfig, x: KSymbol) -> int:
    return cfg.s - len(cfg.support(x.numerator)) - len(x.T)


def row_complex_homology(K: TruncatedComplex, cfg: PrimeConfig, p2: int, n: int) -> CohomologyGroup:
    """Total-degree-n homology of the row K^{., p2, .} under d1 + delta."""

    def pick(m):
        return [k for k, x in enumerate(K.bases.get(m, [])) if _p2_of(cfg, x) == p2]

    def row_map(m):
        src, dst = pick(m), pick(m + 1)
        if m not in K.parts:
            return ExactMatrix.zeros(len(dst), len(src))
        D1 = K.parts[m]["d1"] + K.parts[m]["delta"]
        return D1.submatrix(dst, src)

    return homology_at(row_map(n - 1), row_map(n), K.modulus)


@dataclass
class DegenerationRow:
    degree: int
    row_orders: dict[int, int]
    row_counts: dict[int, int]
    total_order: int
    modulus: int

    @property
    def passed(self) -> bool:
        prod = 1
        for v in self.row_orders.values():
            prod *= v
        predicted = self.modulus ** sum(self.row_counts.values())
        return prod == self.total_order == predicted


def verify_degeneration(cfg: PrimeConfig, M: int, n_max: int) -> list[DegenerationRow]:
    """Sum over p2 of |H(K^{., p2, .}; d1, delta)| against |H_total(K_M)| in each degree."""
    K = build_K(cfg, M, None, n_max, split=True)
    out = []
    for n in range(n_max + 1):
        orders, counts = {}, {}
        for p2 in range(cfg.s + 1):
            H = row_complex_homology(K, cfg, p2, n)
            orders[p2] = H.order
            t = cfg.s - p2
            counts[p2] = sum(1 for T in _sets_of_size(cfg.s, t)
                             for e in multi_indices(cfg.s, n + t) if T <= supp(e))
        out.append(DegenerationRow(n, orders, counts, K.homology(n).order, M))
    return out


def _sets_of_size(s: int, t: int):
    return [T for T in subsets(s) if len(T) == t]
