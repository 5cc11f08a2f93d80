"""Cup products [e'] u c of trivial-coefficient classes with cocycles in Hom(P, U/MU)."""

from __future__ import annotations

from dataclasses import dataclass

from ..distribution import apply_group_ring, level
from ..errors import BadIndex, NotACocycle
from ..exactlin import ExactMatrix, solve_mod
from ..galois import GroupRingElement, PrimeConfig, subsets
from ..signs import MultiIndex, deg, multi_indices, omega_pair, parity_sign, supp
from .complexes import TruncatedComplex, build_K, hom_P_U
from .groupcoh import diagonal_component
from .lifting import CocycleClass, distribution_class, evaluate, lift_many


def _check_index(cfg: PrimeConfig, e) -> MultiIndex:
    e = tuple(e)
    if len(e) != cfg.s or any(x < 0 for x in e):
        raise BadIndex(f"{e} is not a multi-index over {cfg.s} primes")
    return e


def cup_on_distribution_class(cfg: PrimeConfig, M: int, e_prime, cls: CocycleClass,
                              U: TruncatedComplex | None = None) -> CocycleClass:
    """Cochain-level [e'] u c, evaluated on the diagonal with Z/M (x) U/MU -> U/MU.

    The Z/M factor has trivial action, so only the second group element of
    each diagonal term acts, on the value of c.
    """
    e_prime = _check_index(cfg, e_prime)
    if not cls.is_cocycle():
        raise NotACocycle("input is not a cocycle of Hom(P, U/MU)")
    n = cls.degree + deg(e_prime)
    if U is None or U.certified < n:
        U = hom_P_U(cfg, M, n)
    source = cls.complex
    r = cfg.r
    lv = level(r)
    values: dict[MultiIndex, dict[int, int]] = {}
    for (e, a), v in zip(source.bases[cls.degree], cls.vector):
        if v:
            values.setdefault(e, {})[a] = v
    index = U.index(n)
    vec = [0] * len(U.bases[n])
    for E in multi_indices(cfg.s, n):
        eps = tuple(x - y for x, y in zip(E, e_prime))
        if min(eps) < 0 or eps not in values:
            continue
        acting = {}
        for (_, h), c in diagonal_component(cfg, e_prime, eps, twisted=True).items():
            acting[h] = acting.get(h, 0) + c
        x = GroupRingElement(cfg.orders, acting)
        for a, v in values[eps].items():
            for m, c in apply_group_ring(cfg, x, a).items():
                for k, w in lv.normalize(m).items():
                    vec[index[(E, k)]] += v * c * w
    vec = [v % M for v in vec] if M else vec
    out = CocycleClass(U, n, vec, M, None)
    if not out.is_cocycle():
        raise NotACocycle("cup product of cocycles failed to be closed")
    return out


def class_basis(cfg: PrimeConfig, M: int, n: int, U: TruncatedComplex) -> list[tuple[tuple, CocycleClass]]:
    """((T, e), c_{T,e}) for every pair with supp e containing T and deg e - |T| = n."""
    labels = [(T, e) for T in subsets(cfg.s) for e in multi_indices(cfg.s, n + len(T)) if T <= supp(e)]
    lifts = lift_many(cfg, M, labels, build_K(cfg, M, None, n))
    return [(label, evaluate(x, U)) for label, x in zip(labels, lifts)]


def class_decomposition(cfg: PrimeConfig, M: int, value: CocycleClass,
                        U: TruncatedComplex | None = None) -> dict[tuple, int] | None:
    """Coordinates of the class of value in the basis {c_{T,e}}; None if it is not a cocycle class."""
    U = value.complex if U is None else U
    n = value.degree
    size = len(U.bases[n])
    labelled = class_basis(cfg, M, n, U)
    prev = U.differential(n - 1) if n > 0 else ExactMatrix.zeros(size, 0)
    A = prev.hstack(ExactMatrix.from_columns([c.vector for _, c in labelled], size))
    x = solve_mod(A, value.vector, M)
    if x is None:
        return None
    tail = x[len(x) - len(labelled):]
    return {label: v % M for (label, _), v in zip(labelled, tail) if v % M}


def predicted_coefficient(cfg: PrimeConfig, M: int, e_prime, e, reading: str = "e',e", T=()) -> int:
    """(-1)^omega * prod over both-odd i of (l_i - 1)/2.

    reading "e',e" or "e,e'" picks the order inside omega; "graded" is the
    "e',e" value times (-1)^{|T| deg e'}, the sign of moving [e'] past the
    degree -|T| part of c_{T,e}.
    """
    w = omega_pair(e, e_prime) if reading == "e,e'" else omega_pair(e_prime, e)
    if reading == "graded":
        w += len(T) * deg(e_prime)
    c = parity_sign(w)
    for i in range(cfg.s):
        if e[i] % 2 and e_prime[i] % 2:
            c *= cfg.orders[i] // 2
    return c % M if M else c


@dataclass
class CupCheck:
    T: frozenset
    e: MultiIndex
    e_prime: MultiIndex
    modulus: int
    decomposition: dict | None
    readings: dict[str, int]

    @property
    def coefficient(self) -> int | None:
        """Coordinate of c_{T, e+e'}."""
        if self.decomposition is None:
            return None
        total = tuple(x + y for x, y in zip(self.e, self.e_prime))
        return self.decomposition.get((self.T, total), 0)

    @property
    def residual(self) -> dict:
        """Every other coordinate."""
        total = tuple(x + y for x, y in zip(self.e, self.e_prime))
        return {k: v for k, v in (self.decomposition or {}).items() if k != (self.T, total)}

    @property
    def matches(self) -> list[str]:
        return [k for k, v in self.readings.items() if v == self.coefficient]

    @property
    def residual_lower(self) -> bool:
        """All other classes have T' strictly inside T."""
        return all(Tp < self.T for Tp, _ in self.residual)

    @property
    def passed(self) -> bool:
        return self.decomposition is not None and "graded" in self.matches and self.residual_lower


def check_cup(cfg: PrimeConfig, M: int, T, e, e_prime) -> CupCheck:
    """Write [e'] u c_{T,e} in the basis {c_{T',E}} and compare with c_{T,e+e'}."""
    T = frozenset(T)
    e = _check_index(cfg, e)
    e_prime = _check_index(cfg, e_prime)
    if not T <= supp(e):
        raise BadIndex(f"supp {e} does not contain {sorted(T)}")
    n = deg(e) + deg(e_prime) - len(T)
    U = hom_P_U(cfg, M, n)
    c = distribution_class(cfg, M, T, e, U)
    value = cup_on_distribution_class(cfg, M, e_prime, c, U)
    readings = {k: predicted_coefficient(cfg, M, e_prime, e, k, T) for k in ("e',e", "e,e'", "graded")}
    return CupCheck(T, e, e_prime, M, class_decomposition(cfg, M, value, U), readings)
