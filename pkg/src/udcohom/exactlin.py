"""Exact linear algebra over the integers and over Z/M.

Everything here works with Python ints, so there is no overflow no matter
how large intermediate Smith-form entries get.  Matrices act on column
vectors: ``A @ x``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import CompositionNonzero, GcdNotOne, ShapeMismatch


class ExactMatrix:
    """Immutable sparse integer matrix."""

    __slots__ = ("rows", "cols", "_entries")

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], int] | None = None):
        if rows < 0 or cols < 0:
            raise ShapeMismatch(f"negative shape {rows}x{cols}")
        clean = {}
        for (i, j), v in (entries or {}).items():
            if not (0 <= i < rows and 0 <= j < cols):
                raise ShapeMismatch(f"entry ({i}, {j}) outside {rows}x{cols}")
            v = int(v)
            if v:
                clean[(i, j)] = v
        self.rows = rows
        self.cols = cols
        self._entries = clean

    # -- construction -------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "ExactMatrix":
        nrows = len(rows)
        if cols is None:
            cols = len(rows[0]) if nrows else 0
        entries = {}
        for i, row in enumerate(rows):
            if len(row) != cols:
                raise ShapeMismatch("ragged rows")
            for j, v in enumerate(row):
                if v:
                    entries[(i, j)] = v
        return cls(nrows, cols, entries)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[int]], rows: int) -> "ExactMatrix":
        entries = {}
        for j, col in enumerate(columns):
            if len(col) != rows:
                raise ShapeMismatch("column length does not match row count")
            for i, v in enumerate(col):
                if v:
                    entries[(i, j)] = v
        return cls(rows, len(columns), entries)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls(rows, cols)

    @classmethod
    def diagonal(cls, values: Sequence[int], rows: int | None = None, cols: int | None = None) -> "ExactMatrix":
        n = len(values)
        return cls(n if rows is None else rows, n if cols is None else cols,
                   {(i, i): v for i, v in enumerate(values)})

    @classmethod
    def _trusted(cls, rows, cols, entries):
        m = object.__new__(cls)
        m.rows = rows
        m.cols = cols
        m._entries = entries
        return m

    # -- access -------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def entries(self) -> Mapping[tuple[int, int], int]:
        return MappingProxyType(self._entries)

    @property
    def nnz(self) -> int:
        return len(self._entries)

    def __getitem__(self, key: tuple[int, int]) -> int:
        i, j = key
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(key)
        return self._entries.get((i, j), 0)

    def to_rows(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self._entries.items():
            out[i][j] = v
        return out

    def column(self, j: int) -> list[int]:
        out = [0] * self.rows
        for (i, jj), v in self._entries.items():
            if jj == j:
                out[i] = v
        return out

    def columns(self) -> list[list[int]]:
        out = [[0] * self.rows for _ in range(self.cols)]
        for (i, j), v in self._entries.items():
            out[j][i] = v
        return out

    def is_zero(self) -> bool:
        return not self._entries

    # -- arithmetic ---------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self):
        return hash((self.rows, self.cols, frozenset(self._entries.items())))

    def __repr__(self):
        if self.rows * self.cols <= 64:
            return f"ExactMatrix({self.to_rows()})"
        return f"ExactMatrix(<{self.rows}x{self.cols}, nnz={self.nnz}>)"

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.shape != other.shape:
            raise ShapeMismatch(f"cannot add {self.shape} and {other.shape}")
        out = dict(self._entries)
        for k, v in other._entries.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return ExactMatrix._trusted(self.rows, self.cols, out)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix._trusted(self.rows, self.cols, {k: -v for k, v in self._entries.items()})

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def scale(self, c: int) -> "ExactMatrix":
        if c == 0:
            return ExactMatrix(self.rows, self.cols)
        return ExactMatrix._trusted(self.rows, self.cols, {k: c * v for k, v in self._entries.items()})

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        by_row: dict[int, list[tuple[int, int]]] = {}
        for (k, j), v in other._entries.items():
            by_row.setdefault(k, []).append((j, v))
        out: dict[tuple[int, int], int] = {}
        for (i, k), a in self._entries.items():
            for j, b in by_row.get(k, ()):
                key = (i, j)
                out[key] = out.get(key, 0) + a * b
        return ExactMatrix._trusted(self.rows, other.cols, {k: v for k, v in out.items() if v})

    def apply(self, vec: Sequence[int]) -> list[int]:
        if len(vec) != self.cols:
            raise ShapeMismatch(f"vector of length {len(vec)} for {self.shape} matrix")
        out = [0] * self.rows
        for (i, j), v in self._entries.items():
            x = vec[j]
            if x:
                out[i] += v * x
        return out

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix._trusted(self.cols, self.rows, {(j, i): v for (i, j), v in self._entries.items()})

    @property
    def T(self) -> "ExactMatrix":
        return self.transpose()

    def mod(self, M: int) -> "ExactMatrix":
        """Entries reduced into [0, M); M == 0 returns self."""
        if M == 0:
            return self
        return ExactMatrix._trusted(self.rows, self.cols,
                                    {k: v % M for k, v in self._entries.items() if v % M})

    def submatrix(self, rows: Sequence[int] | None = None, cols: Sequence[int] | None = None) -> "ExactMatrix":
        rmap = {r: a for a, r in enumerate(rows)} if rows is not None else None
        cmap = {c: b for b, c in enumerate(cols)} if cols is not None else None
        out = {}
        for (i, j), v in self._entries.items():
            a = rmap.get(i) if rmap is not None else i
            b = cmap.get(j) if cmap is not None else j
            if a is not None and b is not None:
                out[(a, b)] = v
        return ExactMatrix._trusted(len(rows) if rows is not None else self.rows,
                                    len(cols) if cols is not None else self.cols, out)

    def hstack(self, *others: "ExactMatrix") -> "ExactMatrix":
        out = dict(self._entries)
        offset = self.cols
        for o in others:
            if o.rows != self.rows:
                raise ShapeMismatch("hstack needs equal row counts")
            for (i, j), v in o._entries.items():
                out[(i, j + offset)] = v
            offset += o.cols
        return ExactMatrix._trusted(self.rows, offset, out)

    def vstack(self, *others: "ExactMatrix") -> "ExactMatrix":
        out = dict(self._entries)
        offset = self.rows
        for o in others:
            if o.cols != self.cols:
                raise ShapeMismatch("vstack needs equal column counts")
            for (i, j), v in o._entries.items():
                out[(i + offset, j)] = v
            offset += o.rows
        return ExactMatrix._trusted(offset, self.cols, out)


def column_matrix(vec: Sequence[int]) -> ExactMatrix:
    return ExactMatrix.from_columns([list(vec)], len(vec))


# ---------------------------------------------------------------------------
# Smith normal form
# ---------------------------------------------------------------------------

def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x, nx = 1, 0
    y, ny = 0, 1
    while b:
        q = a // b
        a, b = b, a - q * b
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
    if a < 0:
        a, x, y = -a, -x, -y
    return x, y, a


class _Reducer:
    """Dense in-place Smith reduction with optional transform tracking.

    Maintains U @ A0 @ V == A at all times (and the inverses when asked).
    """

    def __init__(self, rows: list[list[int]], ncols: int, track: bool, track_inverse: bool):
        self.a = rows
        self.m = len(rows)
        self.n = ncols
        self.track = track
        self.track_inv = track_inverse
        if track:
            self.U = [[int(i == j) for j in range(self.m)] for i in range(self.m)]
            self.V = [[int(i == j) for j in range(self.n)] for i in range(self.n)]
        if track_inverse:
            self.Ui = [[int(i == j) for j in range(self.m)] for i in range(self.m)]
            self.Vi = [[int(i == j) for j in range(self.n)] for i in range(self.n)]

    # row operations -------------------------------------------------
    def swap_rows(self, i, j):
        if i == j:
            return
        a = self.a
        a[i], a[j] = a[j], a[i]
        if self.track:
            U = self.U
            U[i], U[j] = U[j], U[i]
        if self.track_inv:
            for row in self.Ui:
                row[i], row[j] = row[j], row[i]

    def add_row(self, dst, src, q, start=0):
        """row_dst += q * row_src."""
        a = self.a
        rs, rd = a[src], a[dst]
        for k in range(start, self.n):
            v = rs[k]
            if v:
                rd[k] += q * v
        if self.track:
            us, ud = self.U[src], self.U[dst]
            for k in range(self.m):
                v = us[k]
                if v:
                    ud[k] += q * v
        if self.track_inv:
            for row in self.Ui:
                v = row[dst]
                if v:
                    row[src] -= q * v

    def combine_rows(self, i, j, x, y, u, w, start=0):
        """(row_i, row_j) <- (x row_i + y row_j, u row_i + w row_j), det 1."""
        ri, rj = self.a[i], self.a[j]
        for k in range(start, self.n):
            p, q = ri[k], rj[k]
            if p or q:
                ri[k] = x * p + y * q
                rj[k] = u * p + w * q
        if self.track:
            ri, rj = self.U[i], self.U[j]
            for k in range(self.m):
                p, q = ri[k], rj[k]
                if p or q:
                    ri[k] = x * p + y * q
                    rj[k] = u * p + w * q
        if self.track_inv:
            for row in self.Ui:
                p, q = row[i], row[j]
                if p or q:
                    row[i] = w * p - u * q
                    row[j] = -y * p + x * q

    def negate_row(self, i):
        self.a[i] = [-v for v in self.a[i]]
        if self.track:
            self.U[i] = [-v for v in self.U[i]]
        if self.track_inv:
            for row in self.Ui:
                row[i] = -row[i]

    # column operations ----------------------------------------------
    def swap_cols(self, i, j):
        if i == j:
            return
        for row in self.a:
            row[i], row[j] = row[j], row[i]
        if self.track:
            for row in self.V:
                row[i], row[j] = row[j], row[i]
        if self.track_inv:
            Vi = self.Vi
            Vi[i], Vi[j] = Vi[j], Vi[i]

    def add_col(self, dst, src, q, rows=None):
        """col_dst += q * col_src (optionally only touching the given rows of A)."""
        a = self.a
        for r in (range(self.m) if rows is None else rows):
            row = a[r]
            v = row[src]
            if v:
                row[dst] += q * v
        if self.track:
            for row in self.V:
                v = row[src]
                if v:
                    row[dst] += q * v
        if self.track_inv:
            vs, vd = self.Vi[src], self.Vi[dst]
            for k in range(self.n):
                v = vd[k]
                if v:
                    vs[k] -= q * v

    def combine_cols(self, i, j, x, y, u, w):
        """(col_i, col_j) <- (x col_i + y col_j, u col_i + w col_j), det 1."""
        for row in self.a:
            p, q = row[i], row[j]
            if p or q:
                row[i] = x * p + y * q
                row[j] = u * p + w * q
        if self.track:
            for row in self.V:
                p, q = row[i], row[j]
                if p or q:
                    row[i] = x * p + y * q
                    row[j] = u * p + w * q
        if self.track_inv:
            ri, rj = self.Vi[i], self.Vi[j]
            for k in range(self.n):
                p, q = ri[k], rj[k]
                if p or q:
                    ri[k] = w * p - u * q
                    rj[k] = -y * p + x * q

    # -----------------------------------------------------------------
    def _min_entry(self, t):
        best = None
        bv = 0
        a = self.a
        for i in range(t, self.m):
            row = a[i]
            for j in range(t, self.n):
                v = row[j]
                if v:
                    av = v if v > 0 else -v
                    if best is None or av < bv:
                        best, bv = (i, j), av
                        if av == 1:
                            return best
        return best

    def _clear(self, t):
        """Zero column t below and row t right of the pivot at (t, t)."""
        a = self.a
        while True:
            p = a[t][t]
            # column t
            for i in range(t + 1, self.m):
                v = a[i][t]
                if not v:
                    continue
                if v % p == 0:
                    self.add_row(i, t, -(v // p), start=t)
                else:
                    x, y, g = _xgcd(p, v)
                    self.combine_rows(t, i, x, y, -v // g, p // g, start=t)
                    p = a[t][t]
            # row t: after column t is clear only row t of A changes
            dirty = False
            for j in range(t + 1, self.n):
                v = a[t][j]
                if not v:
                    continue
                if v % p == 0:
                    self.add_col(j, t, -(v // p), rows=None if dirty else (t,))
                else:
                    x, y, g = _xgcd(p, v)
                    self.combine_cols(t, j, x, y, -v // g, p // g)
                    p = a[t][t]
                    dirty = True
            if not dirty or not any(a[i][t] for i in range(t + 1, self.m)):
                return

    def run(self) -> int:
        """Reduce to Smith form; returns the rank."""
        a = self.a
        k = min(self.m, self.n)
        t = 0
        while t < k:
            piv = self._min_entry(t)
            if piv is None:
                break
            self.swap_rows(t, piv[0])
            self.swap_cols(t, piv[1])
            while True:
                self._clear(t)
                p = a[t][t]
                bad = None
                if p not in (1, -1):
                    for i in range(t + 1, self.m):
                        row = a[i]
                        for j in range(t + 1, self.n):
                            if row[j] % p:
                                bad = i
                                break
                        if bad is not None:
                            break
                if bad is None:
                    break
                self.add_row(t, bad, 1, start=t)
            if a[t][t] < 0:
                self.negate_row(t)
            t += 1
        return t


@dataclass(frozen=True)
class SmithDecomposition:
    """U @ A @ V == D with U, V unimodular and D in Smith form."""

    U: ExactMatrix
    D: ExactMatrix
    V: ExactMatrix
    invariant_factors: tuple[int, ...]
    U_inv: ExactMatrix | None = None
    V_inv: ExactMatrix | None = None

    @property
    def rank(self) -> int:
        return len(self.invariant_factors)


def smith_normal_form(A: ExactMatrix, inverses: bool = False) -> SmithDecomposition:
    red = _Reducer(A.to_rows(), A.cols, track=True, track_inverse=inverses)
    rank = red.run()
    factors = tuple(red.a[i][i] for i in range(rank))
    D = ExactMatrix.diagonal(factors, A.rows, A.cols)
    return SmithDecomposition(
        U=ExactMatrix.from_rows(red.U, A.rows),
        D=D,
        V=ExactMatrix.from_rows(red.V, A.cols),
        invariant_factors=factors,
        U_inv=ExactMatrix.from_rows(red.Ui, A.rows) if inverses else None,
        V_inv=ExactMatrix.from_rows(red.Vi, A.cols) if inverses else None,
    )


def _drop_empty(A: ExactMatrix) -> list[list[int]]:
    """Dense rows of A restricted to its nonzero rows and columns."""
    rows = sorted({i for i, _ in A.entries})
    cols = sorted({j for _, j in A.entries})
    rmap = {r: k for k, r in enumerate(rows)}
    cmap = {c: k for k, c in enumerate(cols)}
    out = [[0] * len(cols) for _ in rows]
    for (i, j), v in A.entries.items():
        out[rmap[i]][cmap[j]] = v
    return out


def _eliminate_units(A: ExactMatrix) -> tuple[int, ExactMatrix]:
    """Sparse elimination of +-1 pivots.  Returns (number removed, remainder).

    Each unit pivot contributes an invariant factor 1 and the Schur complement
    carries the rest, so invariant factors are preserved.
    """
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, set[int]] = {}
    for (i, j), v in A.entries.items():
        rows.setdefault(i, {})[j] = v
        cols.setdefault(j, set()).add(i)
    removed = 0
    while True:
        best = None
        for i, row in rows.items():
            for j, v in row.items():
                if v == 1 or v == -1:
                    cost = (len(row) - 1) * (len(cols[j]) - 1)
                    if best is None or cost < best[0]:
                        best = (cost, i, j)
                        if cost == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        _, pi, pj = best
        prow = rows.pop(pi)
        pv = prow[pj]
        for j in prow:
            cols[j].discard(pi)
        for i in list(cols[pj]):
            row = rows[i]
            f = row[pj] * pv  # pv = +-1 so row[pj]/pv == row[pj]*pv
            for j, v in prow.items():
                nv = row.get(j, 0) - f * v
                if nv:
                    if j not in row:
                        cols[j].add(i)
                    row[j] = nv
                else:
                    if j in row:
                        del row[j]
                        cols[j].discard(i)
            if not row:
                del rows[i]
        del cols[pj]
        removed += 1
    rest = {}
    for i, row in rows.items():
        for j, v in row.items():
            rest[(i, j)] = v
    return removed, ExactMatrix(A.rows, A.cols, rest)


def invariant_factors(A: ExactMatrix) -> tuple[int, ...]:
    """Nonzero Smith invariant factors of A (no transforms kept)."""
    ones, rest = _eliminate_units(A)
    if rest.is_zero():
        return (1,) * ones
    dense = _drop_empty(rest)
    red = _Reducer(dense, len(dense[0]), track=False, track_inverse=False)
    rank = red.run()
    return (1,) * ones + tuple(red.a[i][i] for i in range(rank))


def rank(A: ExactMatrix) -> int:
    return len(invariant_factors(A))


# ---------------------------------------------------------------------------
# Abelian group bookkeeping
# ---------------------------------------------------------------------------

def _prime_power_parts(n: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            q = 1
            while n % p == 0:
                n //= p
                q *= p
            out.append((p, q))
        p += 1
    if n > 1:
        out.append((n, n))
    return out


@dataclass(frozen=True)
class CohomologyGroup:
    """Z^free_rank plus torsion in invariant-factor form (d1 | d2 | ...)."""

    free_rank: int = 0
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        fs = tuple(self.invariant_factors)
        if any(f < 2 for f in fs):
            raise ValueError(f"invariant factors must be >= 2: {fs}")
        if any(fs[k + 1] % fs[k] for k in range(len(fs) - 1)):
            raise ValueError(f"not a divisibility chain: {fs}; use from_orders")
        object.__setattr__(self, "invariant_factors", fs)

    @classmethod
    def from_orders(cls, free_rank: int = 0, orders: Iterable[int] = ()) -> "CohomologyGroup":
        """Normalise an arbitrary direct sum of cyclic groups Z/n (n = 0 means Z)."""
        by_prime: dict[int, list[int]] = {}
        for n in orders:
            n = abs(int(n))
            if n == 0:
                free_rank += 1
                continue
            for p, q in _prime_power_parts(n):
                by_prime.setdefault(p, []).append(q)
        length = max((len(v) for v in by_prime.values()), default=0)
        factors = [1] * length
        for powers in by_prime.values():
            powers.sort()
            for k, q in enumerate(powers):
                factors[length - len(powers) + k] *= q
        return cls(free_rank, tuple(f for f in factors if f > 1))

    def __add__(self, other: "CohomologyGroup") -> "CohomologyGroup":
        return CohomologyGroup.from_orders(self.free_rank + other.free_rank,
                                           self.invariant_factors + other.invariant_factors)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    @property
    def order(self) -> int | None:
        """Cardinality, or None when infinite."""
        if self.free_rank:
            return None
        out = 1
        for f in self.invariant_factors:
            out *= f
        return out

    def __str__(self):
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{f}" for f in self.invariant_factors]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "invariant_factors": list(self.invariant_factors)}


# ---------------------------------------------------------------------------
# Homology, kernels, solving
# ---------------------------------------------------------------------------

def _check_composable(d_in: ExactMatrix, d_out: ExactMatrix, modulus: int):
    if d_out.cols != d_in.rows:
        raise ShapeMismatch(f"d_out is {d_out.shape} but d_in is {d_in.shape}")
    prod = (d_out @ d_in).mod(modulus)
    if not prod.is_zero():
        raise CompositionNonzero("d_out @ d_in is not zero" + (f" mod {modulus}" if modulus else ""))


def homology_at(d_in: ExactMatrix, d_out: ExactMatrix, modulus: int = 0) -> CohomologyGroup:
    """ker(d_out) / im(d_in), over Z (modulus 0) or over Z/modulus."""
    _check_composable(d_in, d_out, modulus)
    if modulus == 0:
        fin = invariant_factors(d_in)
        r_out = rank(d_out)
        free = d_in.rows - r_out - len(fin)
        return CohomologyGroup(free, tuple(f for f in fin if f > 1))
    if modulus == 1:
        return CohomologyGroup()
    return _homology_mod(d_in, d_out, modulus)


def _kernel_scales(factors: Sequence[int], n: int, M: int) -> list[int]:
    """c_k with {y : D y = 0 mod M} = diag(c) Z^n for the Smith diagonal D."""
    scales = [M // gcd(d, M) for d in factors]
    return scales + [1] * (n - len(factors))


def _homology_mod(d_in: ExactMatrix, d_out: ExactMatrix, M: int) -> CohomologyGroup:
    # {x : d_out x = 0 mod M} = V diag(c) Z^b; quotient by im(d_in) + M Z^b
    b = d_in.rows
    snf = smith_normal_form(d_out.mod(M), inverses=True)
    c = _kernel_scales(snf.invariant_factors, b, M)
    coords = (snf.V_inv @ d_in.mod(M)).to_rows()
    keep = [k for k in range(b) if M // c[k] > 1]
    rows = []
    for k in keep:
        g = M // c[k]
        rows.append([(v // c[k]) % g for v in coords[k]])
    if not rows:
        return CohomologyGroup()
    pres = ExactMatrix.from_rows(rows, d_in.cols).hstack(
        ExactMatrix.diagonal([M // c[k] for k in keep]))
    fs = invariant_factors(pres)
    return CohomologyGroup(0, tuple(f for f in fs if f > 1))


def kernel_basis(A: ExactMatrix) -> ExactMatrix:
    """Columns form a Z-basis of {x : A x = 0}."""
    snf = smith_normal_form(A)
    return snf.V.submatrix(cols=range(snf.rank, A.cols))


def kernel_basis_mod(A: ExactMatrix, M: int) -> ExactMatrix:
    """Columns generate {x : A x = 0 mod M} as a Z/M-module (M == 0: over Z)."""
    if M == 0:
        return kernel_basis(A)
    snf = smith_normal_form(A.mod(M))
    c = _kernel_scales(snf.invariant_factors, A.cols, M)
    cols = []
    V = snf.V.columns()
    for k, ck in enumerate(c):
        if ck % M == 0:
            continue
        cols.append([(ck * v) % M for v in V[k]])
    return ExactMatrix.from_columns(cols, A.cols)


def _valuation(v: int, p: int, k: int) -> int:
    n = 0
    while n < k and v % p == 0:
        v //= p
        n += 1
    return n


def _solve_prime_power(A: ExactMatrix, rhs_list: Sequence[Sequence[int]], p: int, k: int) -> list:
    """Elimination over the local ring Z/p^k, pivoting on minimal p-valuation.

    Every entry left in a pivot's row and column is divisible by the pivot's
    p-power part, so all divisions are exact and nothing grows beyond p^k.
    Returns one solution (or None) per right-hand side.
    """
    q = p ** k
    nb = len(rhs_list)
    rows: list[dict[int, int]] = [{} for _ in range(A.rows)]
    for (i, j), v in A.entries.items():
        if v % q:
            rows[i][j] = v % q
    rhs = [[b[i] % q for b in rhs_list] for i in range(A.rows)]
    live = set(range(A.rows))
    pivots = []  # (row, col, valuation)
    while True:
        best = None
        for i in live:
            row = rows[i]
            if not row:
                continue
            for j, v in row.items():
                val = 0 if v % p else _valuation(v, p, k)
                key = (val, len(row))
                if best is None or key < best[0]:
                    best = (key, i, j)
        if best is None:
            break
        (val, _), i, j = best
        pv = p ** val
        inv = pow(rows[i][j] // pv, -1, q)
        top = {c: v * inv % q for c, v in rows[i].items()}
        rows[i] = top
        rhs[i] = [v * inv % q for v in rhs[i]]
        live.discard(i)
        for r in live:
            row = rows[r]
            v = row.get(j)
            if not v:
                continue
            f = v // pv
            for c, y in top.items():
                w = (row.get(c, 0) - f * y) % q
                if w:
                    row[c] = w
                else:
                    row.pop(c, None)
            rhs[r] = [(x - f * y) % q for x, y in zip(rhs[r], rhs[i])]
        pivots.append((i, j, val))
    out = []
    for t in range(nb):
        if any(rhs[r][t] for r in live):
            out.append(None)
            continue
        x = [0] * A.cols
        ok = True
        for i, j, val in reversed(pivots):
            u = (rhs[i][t] - sum(v * x[c] for c, v in rows[i].items() if c != j)) % q
            pv = p ** val
            if u % pv:
                ok = False
                break
            x[j] = u // pv
        out.append(x if ok else None)
    return out


def _crt_pair(x: list[int], m: int, y: list[int], n: int) -> list[int]:
    u = pow(m, -1, n)
    return [a + m * ((c - a) * u % n) for a, c in zip(x, y)]


def solve_mod_many(A: ExactMatrix, rhs_list: Sequence[Sequence[int]], M: int) -> list:
    """solve_mod for several right-hand sides sharing one elimination (M >= 1)."""
    for b in rhs_list:
        if len(b) != A.rows:
            raise ShapeMismatch(f"rhs of length {len(b)} for {A.shape} matrix")
    if M < 1:
        raise ValueError("solve_mod_many needs a positive modulus")
    sols = [[0] * A.cols for _ in rhs_list]
    m = 1
    for p, q in _prime_power_parts(M):
        part = _solve_prime_power(A, rhs_list, p, _valuation(q, p, q.bit_length()))
        sols = [None if x is None or y is None else _crt_pair(x, m, y, q) for x, y in zip(sols, part)]
        m *= q
    return [None if x is None else [v % M for v in x] for x in sols]


def solve_mod(A: ExactMatrix, b: Sequence[int], M: int = 0) -> list[int] | None:
    """Some x with A x = b (mod M), or None when there is none."""
    if len(b) != A.rows:
        raise ShapeMismatch(f"rhs of length {len(b)} for {A.shape} matrix")
    if M >= 1:
        return solve_mod_many(A, [b], M)[0]
    snf = smith_normal_form(A)
    c = snf.U.apply(list(b))
    y = [0] * A.cols
    for k, ck in enumerate(c):
        d = snf.invariant_factors[k] if k < snf.rank else 0
        if d == 0:
            if ck:
                return None
        elif ck % d:
            return None
        else:
            y[k] = ck // d
    return snf.V.apply(y)


def complete_unimodular(v: Sequence[int]) -> ExactMatrix:
    """Square matrix with determinant +-1 whose first column is v."""
    v = [int(t) for t in v]
    if not v:
        raise ShapeMismatch("empty vector")
    g = 0
    for t in v:
        g = gcd(g, t)
    if g != 1:
        raise GcdNotOne(f"gcd of {v} is {g}")
    snf = smith_normal_form(column_matrix(v), inverses=True)
    # U v s = e1 with s = V[0,0] = +-1, so v = s * (first column of U^-1)
    s = snf.V[0, 0]
    n = len(v)
    W = snf.U_inv.to_rows()
    for i in range(n):
        W[i][0] *= s
    return ExactMatrix.from_rows(W, n)


def determinant(A: ExactMatrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    if A.rows != A.cols:
        raise ShapeMismatch("determinant of a non-square matrix")
    n = A.rows
    if n == 0:
        return 1
    a = A.to_rows()
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def lattice_quotient(big: ExactMatrix, small: ExactMatrix) -> CohomologyGroup:
    """span_Z(columns of big) / span_Z(columns of small); small must lie inside big."""
    if big.rows != small.rows:
        raise ShapeMismatch("lattices in different ambient spaces")
    snf = smith_normal_form(big, inverses=True)
    r = snf.rank
    # big lattice has basis U^-1 e_k d_k (k < r); coordinates of w are (U w)_k / d_k
    coords = (snf.U @ small).to_rows()
    rows = []
    for k in range(big.rows):
        row = coords[k]
        if k >= r:
            if any(row):
                raise ValueError("small lattice is not contained in big lattice")
            continue
        d = snf.invariant_factors[k]
        if any(v % d for v in row):
            raise ValueError("small lattice is not contained in big lattice")
        rows.append([v // d for v in row])
    if not rows:
        return CohomologyGroup()
    fs = invariant_factors(ExactMatrix.from_rows(rows, small.cols))
    free = r - len(fs)
    return CohomologyGroup(free, tuple(f for f in fs if f > 1))
