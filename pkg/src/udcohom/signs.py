"""Sign conventions and multi-index bookkeeping.

Every sign that enters a differential, a cocycle formula or a cup product
is computed here, relative to the ascending order on prime indices.

A multi-index e in Z_{>=0}^S is a plain tuple of ints, one per prime index.
"""

from __future__ import annotations

from itertools import combinations_with_replacement
from typing import Iterable, Sequence

MultiIndex = tuple[int, ...]


def deg(e: Sequence[int]) -> int:
    return sum(e)


def supp(e: Sequence[int]) -> frozenset[int]:
    return frozenset(i for i, x in enumerate(e) if x)


def unit(s: int, i: int) -> MultiIndex:
    """epsilon_i."""
    return tuple(int(j == i) for j in range(s))


def indicator(s: int, T: Iterable[int]) -> MultiIndex:
    """e_T = sum_{i in T} epsilon_i."""
    T = set(T)
    return tuple(int(j in T) for j in range(s))


def add(e: Sequence[int], f: Sequence[int]) -> MultiIndex:
    return tuple(a + b for a, b in zip(e, f))


def multi_indices(s: int, q: int) -> list[MultiIndex]:
    """All e with deg e == q, in lexicographic order."""
    if q < 0:
        return []
    if s == 0:
        return [()] if q == 0 else []
    out = []
    for combo in combinations_with_replacement(range(s), q):
        e = [0] * s
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return sorted(out)


def omega_vector(e: Sequence[int]) -> MultiIndex:
    """omega(e)_i = sum_{j < i} e_j."""
    out, acc = [], 0
    for x in e:
        out.append(acc)
        acc += x
    return tuple(out)


def omega_pair(e: Sequence[int], f: Sequence[int]) -> int:
    """omega(e, e') = sum_{j < i} e'_j e_i."""
    total, acc = 0, 0
    for a, b in zip(e, f):
        total += acc * a
        acc += b
    return total


def omega_sign(i: int, T: Iterable[int]) -> int:
    """omega(i, T): (-1)^{#{j in T : j < i}} if i in T, else 0."""
    T = set(T)
    if i not in T:
        return 0
    return -1 if sum(1 for j in T if j < i) % 2 else 1


def parity_sign(n: int) -> int:
    return -1 if n % 2 else 1


def delta_sign(T_size: int, e: Sequence[int], i: int) -> int:
    """Sign of the i-th term of the Hom differential on [a, T, e]: (-1)^|T| (-1)^omega(e)_i."""
    return parity_sign(T_size + omega_vector(e)[i])


def prime_cocycle_sign(sub_size: int, T_size: int) -> int:
    """(-1)^{|T'|(2|T| - |T'| - 1)/2}, the coefficient sign of the T' term in C'_{T, e_T}."""
    return parity_sign(sub_size * (2 * T_size - sub_size - 1) // 2)


def koszul_sign(degrees: Sequence[int], perm: Sequence[int]) -> int:
    """Sign of reordering graded factors: position k of the result is factor perm[k].

    Computed by counting inversions weighted by degree products, i.e. by
    literally swapping adjacent factors.
    """
    total = 0
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                total += degrees[perm[a]] * degrees[perm[b]]
    return parity_sign(total)
