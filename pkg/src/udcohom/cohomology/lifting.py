"""Explicit cocycles in K_M: the C'_{T, e_T} family, lifts of Q-symbols [0, T, e], and their images in U/MU."""

from __future__ import annotations

from dataclasses import dataclass

from ..distribution import DistElement
from ..errors import BadIndex, LiftFailed, NotACocycle
from ..exactlin import solve_mod, solve_mod_many
from ..galois import PrimeConfig, derivative_element, subsets
from ..signs import MultiIndex, deg, indicator, prime_cocycle_sign, supp
from .complexes import KSymbol, TruncatedComplex, augmentation, build_K, hom_P_U


@dataclass
class CocycleClass:
    """A cochain of a stored complex, with the (T, e) it represents when known."""

    complex: TruncatedComplex
    degree: int
    vector: list[int]
    modulus: int
    index: tuple[frozenset, MultiIndex] | None = None

    def terms(self) -> list[tuple[object, int]]:
        return [(x, v) for x, v in zip(self.complex.bases[self.degree], self.vector) if v]

    def coboundary(self) -> list[int]:
        out = self.complex.differential(self.degree).apply(self.vector)
        return [v % self.modulus for v in out] if self.modulus else out

    def is_cocycle(self) -> bool:
        return not any(self.coboundary())


def _reduce(vec, M):
    return [v % M for v in vec] if M else list(vec)


def _k_for(cfg: PrimeConfig, M: int, degree: int, K: TruncatedComplex | None) -> TruncatedComplex:
    if K is None or K.certified < degree or K.modulus != M:
        K = build_K(cfg, M, None, max(degree, 0), split=True)
    return K


def explicit_prime_cocycle(cfg: PrimeConfig, M: int, T, K: TruncatedComplex | None = None) -> CocycleClass:
    """sum over T' in T of sign(|T'|, |T|) D_{T'} [sum_{i in T'} r_{T-T'}/l_i, T - T', e_{T-T'}].

    Checked to be closed under d1 + delta modulo M.
    """
    T = frozenset(T)
    for i in T:
        cfg.check_index(i)
    K = _k_for(cfg, M, 0, K)
    index = K.index(0)
    vec = [0] * len(K.bases[0])
    for Tp in subsets(cfg.s):
        if not Tp <= T:
            continue
        rest = T - Tp
        r_rest = cfg.r_T(rest)
        comps = [r_rest % cfg.primes[i] if i in Tp else 0 for i in range(cfg.s)]
        sign = prime_cocycle_sign(len(Tp), len(T))
        e = indicator(cfg.s, rest)
        for exps, c in derivative_element(cfg, Tp).items():
            a = cfg.numerator(cfg.act(exps, comps))
            vec[index[KSymbol(rest, a, e)]] += sign * c
    vec = _reduce(vec, M)
    part = K.parts[0]
    closed = (part["d1"] + part["delta"]).apply(vec)
    if any(v % M if M else v for v in closed):
        raise NotACocycle(f"C'_T for T = {sorted(T)} is not (d1 + delta)-closed")
    return CocycleClass(K, 0, vec, M, (T, indicator(cfg.s, T)))


def _p2(cfg: PrimeConfig, x: KSymbol) -> int:
    return cfg.s - len(cfg.support(x.numerator)) - len(x.T)


def is_q_symbol(x: KSymbol) -> bool:
    return x.numerator == 0 and x.T <= supp(x.e)


def _lift_problem(cfg: PrimeConfig, M: int, T, e, K: TruncatedComplex):
    """(degree, starting cochain, free columns) for lifting [0, T, e]."""
    n = deg(e) - len(T)
    basis = K.bases[n]
    if e == indicator(cfg.s, T):
        start = explicit_prime_cocycle(cfg, M, T, K).vector
        p2 = cfg.s - len(T)
        free = [k for k, x in enumerate(basis)
                if _p2(cfg, x) > p2 and (x.T | cfg.support(x.numerator)) <= T]
    else:
        start = [0] * len(basis)
        start[K.index(n)[KSymbol(T, 0, e)]] = 1
        free = [k for k, x in enumerate(basis) if not is_q_symbol(x)]
    return n, start, tuple(free)


def _check_pair(cfg: PrimeConfig, T, e):
    T = frozenset(T)
    e = tuple(e)
    if len(e) != cfg.s or any(x < 0 for x in e):
        raise BadIndex(f"{e} is not a multi-index over {cfg.s} primes")
    if not T <= supp(e):
        raise BadIndex(f"supp {e} does not contain {sorted(T)}")
    return T, e


def lift_many(cfg: PrimeConfig, M: int, pairs, K: TruncatedComplex | None = None) -> list[CocycleClass]:
    """lift_cocycle for several (T, e) at once; lifts sharing a linear system are solved together."""
    pairs = [_check_pair(cfg, T, e) for T, e in pairs]
    if not pairs:
        return []
    K = _k_for(cfg, M, max(deg(e) - len(T) for T, e in pairs), K)
    problems = [_lift_problem(cfg, M, T, e, K) for T, e in pairs]
    groups: dict[tuple, list[int]] = {}
    for k, (n, _, free) in enumerate(problems):
        groups.setdefault((n, free), []).append(k)
    out: list = [None] * len(pairs)
    for (n, free), members in groups.items():
        D = K.differential(n)
        A = D.submatrix(cols=free)
        rhs = [[-v for v in D.apply(problems[k][1])] for k in members]
        if M:
            sols = solve_mod_many(A, rhs, M)
        else:
            sols = [solve_mod(A, b, 0) for b in rhs]
        for k, y in zip(members, sols):
            T, e = pairs[k]
            if y is None:
                raise LiftFailed(f"no cocycle lifts [0, {sorted(T)}, {e}]")
            vec = list(problems[k][1])
            for col, v in zip(free, y):
                vec[col] += v
            cls = CocycleClass(K, n, _reduce(vec, M), M, (T, e))
            if not cls.is_cocycle():
                raise LiftFailed("solver returned a non-cocycle")
            out[k] = cls
    return out


def lift_cocycle(cfg: PrimeConfig, M: int, T, e, K: TruncatedComplex | None = None) -> CocycleClass:
    """A total cocycle of K_M whose projection to Q is exactly [0, T, e].

    For e = e_T the lift completes explicit_prime_cocycle inside K(T) by symbols
    of larger p2; otherwise the correction ranges over all non-Q symbols.
    """
    return lift_many(cfg, M, [(T, e)], K)[0]


def evaluate(cls: CocycleClass, U: TruncatedComplex | None = None) -> CocycleClass:
    """Image under u in Hom(P, U/MU)."""
    K = cls.complex
    n = cls.degree
    if U is None:
        U = hom_P_U(_config_of(K), cls.modulus, max(n, 0) + 1)
    vec = _reduce(augmentation(K, U, n).apply(cls.vector), cls.modulus)
    return CocycleClass(U, n, vec, cls.modulus, cls.index)


def _config_of(K: TruncatedComplex) -> PrimeConfig:
    return K.L.cfg


def distribution_class(cfg: PrimeConfig, M: int, T, e, U: TruncatedComplex | None = None,
                       K: TruncatedComplex | None = None) -> CocycleClass:
    """The cocycle c_{T,e} = u(C_{T,e}) in Hom(P, U/MU)."""
    return evaluate(lift_cocycle(cfg, M, T, e, K), U)


@dataclass
class PrimeLiftReport:
    T: frozenset
    evaluation: DistElement
    target: DistElement
    signs: list[int]
    expected_sign: int
    closed: bool

    @property
    def passed(self) -> bool:
        return self.closed and bool(self.signs)


def prime_lift_report(cfg: PrimeConfig, M: int, T, K: TruncatedComplex | None = None) -> PrimeLiftReport:
    """u of the completed C'_{T,e_T} against +-D_T[sum 1/l_i] plus terms of order properly dividing r_T."""
    T = frozenset(T)
    K = _k_for(cfg, M, 0, K)
    closed = True
    try:
        explicit_prime_cocycle(cfg, M, T, K)
    except NotACocycle:
        closed = False
    lifted = lift_cocycle(cfg, M, T, indicator(cfg.s, T), K)
    U = hom_P_U(cfg, M, 0)
    value = evaluate(lifted, U)
    r = cfg.r
    got = DistElement(r, {a: v for (_, a), v in zip(U.bases[0], value.vector) if v}, M)
    start = cfg.numerator([1 if i in T else 0 for i in range(cfg.s)])
    symbols = {}
    for exps, c in derivative_element(cfg, T).items():
        a = cfg.numerator(cfg.act(exps, cfg.components(start)))
        symbols[a] = symbols.get(a, 0) + c
    target = DistElement.from_symbols(r, symbols, M)
    signs = []
    for sign in (1, -1):
        rest = got - target.scale(sign)
        if all(cfg.support(a) < T for a, _ in rest.coefficients.items()):
            signs.append(sign)
    return PrimeLiftReport(T, got, target, signs, prime_cocycle_sign(len(T), len(T)), closed)

