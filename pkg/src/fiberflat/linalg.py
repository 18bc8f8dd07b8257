"""Exact matrix kernel: Smith normal form, fiber ranks, integral solving.

Matrices are small and dense; entries are the plain numbers described in
fiberflat.rings.  Conventions pinned here and relied on everywhere else:

* ``snf(A)`` returns U, D, V with A = U @ D @ V, det(U) and det(V) units,
  and the diagonal of D a divisibility chain with trailing zeros.
* Pivot selection takes the smallest-size nonzero entry of the working
  submatrix (absolute value over Z, p-adic valuation over Z_(p), first
  nonzero over fields), ties broken by lowest (row, col).
* Z/n decompositions lift canonical representatives to Z, run the integer
  kernel, and reduce everything mod n.
* Diagonal entries are canonical: non-negative over Z, representatives in
  [0, n) over Z/n, pure powers of p over Z_(p), 0 or 1 over fields.
* Zero-dimension matrices are legal everywhere and behave as zero maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

from .errors import InputError
from .rings import BaseRing, Prime, Scalar, ZZ

__all__ = [
    "Matrix", "SnfDecomposition", "snf", "rank", "rank_over_fiber",
    "determinantal_divisors", "solve_integral", "syzygy_matrix",
    "reduce_matrix", "field_rank", "field_nullspace", "det",
    "hstack", "vstack", "kron",
]


class Matrix:
    """An immutable matrix over a fiberflat base ring.

    >>> from fiberflat.rings import ZZ
    >>> A = Matrix(ZZ, [[2, 0], [0, 3]])
    >>> (A @ A).row(0)
    (4, 0)
    >>> A.transpose() == A
    True
    """

    __slots__ = ("ring", "rows", "cols", "_data", "_snf", "_hash")

    def __init__(self, ring: BaseRing, data: Iterable[Iterable[object]],
                 cols: int | None = None, _canon: bool = True):
        body = [list(r) for r in data]
        self.ring = ring
        self.rows = len(body)
        if body:
            width = len(body[0])
            if any(len(r) != width for r in body):
                raise InputError("ragged matrix rows")
            if cols is not None and cols != width:
                raise InputError(f"declared {cols} columns, rows have {width}")
            self.cols = width
        else:
            self.cols = 0 if cols is None else cols
        if _canon:
            canon = ring.canon
            self._data = tuple(tuple(canon(x) for x in r) for r in body)
        else:
            self._data = tuple(tuple(r) for r in body)
        self._snf = None
        self._hash = None

    # -- constructors ------------------------------------------------------

    @classmethod
    def _make(cls, ring: BaseRing, body: Sequence[Sequence[Scalar]], cols: int) -> "Matrix":
        return cls(ring, body, cols=cols, _canon=False)

    @classmethod
    def zeros(cls, ring: BaseRing, m: int, n: int) -> "Matrix":
        z = ring.zero
        return cls._make(ring, [[z] * n for _ in range(m)], n)

    @classmethod
    def identity(cls, ring: BaseRing, n: int) -> "Matrix":
        z, o = ring.zero, ring.one
        return cls._make(ring, [[o if i == j else z for j in range(n)] for i in range(n)], n)

    @classmethod
    def diagonal(cls, ring: BaseRing, entries: Sequence[object],
                 m: int | None = None, n: int | None = None) -> "Matrix":
        k = len(entries)
        m = k if m is None else m
        n = k if n is None else n
        if k > min(m, n):
            raise InputError("too many diagonal entries for the requested shape")
        body = [[ring.zero] * n for _ in range(m)]
        for i, e in enumerate(entries):
            body[i][i] = ring.canon(e)
        return cls._make(ring, body, n)

    @classmethod
    def from_columns(cls, ring: BaseRing, columns: Sequence[Sequence[object]],
                     rows: int | None = None) -> "Matrix":
        if columns:
            height = len(columns[0])
            if any(len(c) != height for c in columns):
                raise InputError("ragged matrix columns")
            if rows is not None and rows != height:
                raise InputError(f"declared {rows} rows, columns have {height}")
            return cls(ring, [[c[i] for c in columns] for i in range(height)],
                       cols=len(columns))
        return cls.zeros(ring, 0 if rows is None else rows, 0)

    # -- basics --------------------------------------------------------------

    def __getitem__(self, key: tuple[int, int]) -> Scalar:
        i, j = key
        return self._data[i][j]

    def row(self, i: int) -> tuple[Scalar, ...]:
        return self._data[i]

    def column(self, j: int) -> tuple[Scalar, ...]:
        return tuple(r[j] for r in self._data)

    def to_rows(self) -> list[list[Scalar]]:
        return [list(r) for r in self._data]

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._data for x in r)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Matrix) and self.ring == other.ring
                and self.cols == other.cols and self._data == other._data)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, self.cols, self._data))
        return self._hash

    def __repr__(self) -> str:
        return f"Matrix({self.ring}, {self.rows}x{self.cols}, {[list(r) for r in self._data]})"

    # -- arithmetic ----------------------------------------------------------

    def _mod(self) -> int | None:
        return self.ring.param if self.ring.kind in ("Zmod", "Fp") else None

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        mod = self._mod()
        if mod is None:
            body = [[a + b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)]
        else:
            body = [[(a + b) % mod for a, b in zip(r, s)] for r, s in zip(self._data, other._data)]
        return Matrix._make(self.ring, body, self.cols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check_same_shape(other)
        mod = self._mod()
        if mod is None:
            body = [[a - b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)]
        else:
            body = [[(a - b) % mod for a, b in zip(r, s)] for r, s in zip(self._data, other._data)]
        return Matrix._make(self.ring, body, self.cols)

    def __neg__(self) -> "Matrix":
        mod = self._mod()
        if mod is None:
            body = [[-a for a in r] for r in self._data]
        else:
            body = [[(-a) % mod for a in r] for r in self._data]
        return Matrix._make(self.ring, body, self.cols)

    def scale(self, c: object) -> "Matrix":
        c = self.ring.canon(c)
        mod = self._mod()
        if mod is None:
            body = [[c * a for a in r] for r in self._data]
        else:
            body = [[(c * a) % mod for a in r] for r in self._data]
        return Matrix._make(self.ring, body, self.cols)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ring != other.ring:
            raise InputError(f"ring mismatch: {self.ring} vs {other.ring}")
        if self.cols != other.rows:
            raise InputError(f"shape mismatch: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        cols_t = list(zip(*other._data)) if other.rows else [()] * other.cols
        mod = self._mod()
        body = []
        for r in self._data:
            if mod is None:
                body.append([sum(a * b for a, b in zip(r, c)) for c in cols_t])
            else:
                body.append([sum(a * b for a, b in zip(r, c)) % mod for c in cols_t])
        return Matrix._make(self.ring, body, other.cols)

    def transpose(self) -> "Matrix":
        if self.rows == 0:
            return Matrix._make(self.ring, [[] for _ in range(self.cols)], 0)
        return Matrix._make(self.ring, list(zip(*self._data)), self.rows)

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "Matrix":
        body = [[self._data[i][j] for j in col_idx] for i in row_idx]
        return Matrix._make(self.ring, body, len(col_idx))

    def _check_same_shape(self, other: "Matrix") -> None:
        if self.ring != other.ring:
            raise InputError(f"ring mismatch: {self.ring} vs {other.ring}")
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise InputError("shape mismatch")


def hstack(blocks: Sequence[Matrix]) -> Matrix:
    blocks = [b for b in blocks]
    if not blocks:
        raise InputError("hstack of nothing")
    ring, m = blocks[0].ring, blocks[0].rows
    if any(b.ring != ring or b.rows != m for b in blocks):
        raise InputError("hstack blocks must share ring and height")
    body = [[x for b in blocks for x in b._data[i]] for i in range(m)]
    return Matrix._make(ring, body, sum(b.cols for b in blocks))


def vstack(blocks: Sequence[Matrix]) -> Matrix:
    blocks = [b for b in blocks]
    if not blocks:
        raise InputError("vstack of nothing")
    ring, n = blocks[0].ring, blocks[0].cols
    if any(b.ring != ring or b.cols != n for b in blocks):
        raise InputError("vstack blocks must share ring and width")
    body = [list(r) for b in blocks for r in b._data]
    return Matrix(ring, body, cols=n, _canon=False)


def kron(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product with row-major index (i, k) -> i * b.rows + k."""
    if a.ring != b.ring:
        raise InputError("ring mismatch in kron")
    mod = a._mod()
    body = []
    for i in range(a.rows):
        arow = a._data[i]
        for k in range(b.rows):
            brow = b._data[k]
            if mod is None:
                body.append([x * y for x in arow for y in brow])
            else:
                body.append([(x * y) % mod for x in arow for y in brow])
    return Matrix._make(a.ring, body, a.cols * b.cols)


# -- Smith normal form ------------------------------------------------------

@dataclass(frozen=True)
class SnfDecomposition:
    """A = U @ D @ V with unit-determinant U, V and canonical diagonal D."""

    U: Matrix
    D: Matrix
    V: Matrix
    elementary_divisors: tuple[Scalar, ...]

    def verify(self, a: Matrix) -> bool:
        """Recheck reconstruction, unit determinants, and the chain."""
        if self.U @ self.D @ self.V != a:
            return False
        ring = a.ring
        if not (ring.is_unit(det(self.U)) and ring.is_unit(det(self.V))):
            return False
        return _chain_ok(ring, self.elementary_divisors)


def _chain_ok(ring: BaseRing, divisors: Sequence[Scalar]) -> bool:
    seen_zero = False
    for i, d in enumerate(divisors):
        if d == 0:
            seen_zero = True
        elif seen_zero:
            return False  # trailing zeros only
        if i + 1 < len(divisors) and ring.try_divide(divisors[i + 1], d) is None:
            if not (d == 0 and divisors[i + 1] == 0):
                return False
    return True


class _SnfFull:
    """Internal decomposition carrying the tracked inverses of U and V."""

    __slots__ = ("U", "D", "V", "Ui", "Vi", "divisors")

    def __init__(self, U: Matrix, D: Matrix, V: Matrix, Ui: Matrix, Vi: Matrix):
        self.U, self.D, self.V, self.Ui, self.Vi = U, D, V, Ui, Vi
        self.divisors = tuple(D[i, i] for i in range(min(D.rows, D.cols)))


def _eye(n: int, one: Scalar, zero: Scalar) -> list[list[Scalar]]:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def _snf_int(a_rows: Sequence[Sequence[int]], m: int, n: int):
    """Integer kernel.  Returns (U, D, V, Ui, Vi) as lists of int lists.

    Maintains A = U @ D @ V throughout: every elementary row operation E on
    D multiplies U by E^-1 on the right and Ui by E on the left; column
    operations mirror this on V / Vi.
    """
    D = [list(r) for r in a_rows]
    U, Ui = _eye(m, 1, 0), _eye(m, 1, 0)
    V, Vi = _eye(n, 1, 0), _eye(n, 1, 0)

    def row_swap(i, j):
        D[i], D[j] = D[j], D[i]
        Ui[i], Ui[j] = Ui[j], Ui[i]
        for r in U:
            r[i], r[j] = r[j], r[i]

    def col_swap(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in Vi:
            r[i], r[j] = r[j], r[i]
        V[i], V[j] = V[j], V[i]

    def row_negate(i):
        D[i] = [-x for x in D[i]]
        Ui[i] = [-x for x in Ui[i]]
        for r in U:
            r[i] = -r[i]

    def row_addmul(dst, src, q):
        # D: row_dst += q*row_src, so U: col_src -= q*col_dst.
        Dd, Ds = D[dst], D[src]
        for k in range(n):
            Dd[k] += q * Ds[k]
        Ud, Us = Ui[dst], Ui[src]
        for k in range(m):
            Ud[k] += q * Us[k]
        for r in U:
            r[src] -= q * r[dst]

    def col_addmul(dst, src, q):
        # D: col_dst += q*col_src, so V: row_src -= q*row_dst.
        for r in D:
            r[dst] += q * r[src]
        for r in Vi:
            r[dst] += q * r[src]
        Vd, Vs = V[dst], V[src]
        for k in range(n):
            Vs[k] -= q * Vd[k]

    def place_pivot(t) -> bool:
        # Smallest |value| nonzero in D[t:, t:], ties by lowest (row, col).
        best = None
        for i in range(t, m):
            Di = D[i]
            for j in range(t, n):
                v = Di[j]
                if v:
                    av = v if v > 0 else -v
                    if best is None or av < best[0]:
                        best = (av, i, j)
        if best is None:
            return False
        _, i, j = best
        if i != t:
            row_swap(t, i)
        if j != t:
            col_swap(t, j)
        if D[t][t] < 0:
            row_negate(t)
        return True

    t = 0
    while t < m and t < n:
        if not place_pivot(t):
            break
        while True:
            # Clear column t then row t; nonzero remainders shrink the pivot.
            while True:
                b = D[t][t]
                dirty = False
                for i in range(t + 1, m):
                    v = D[i][t]
                    if v:
                        q = (2 * v + b) // (2 * b)
                        if q:
                            row_addmul(i, t, -q)
                        if D[i][t]:
                            dirty = True
                for j in range(t + 1, n):
                    v = D[t][j]
                    if v:
                        q = (2 * v + b) // (2 * b)
                        if q:
                            col_addmul(j, t, -q)
                        if D[t][j]:
                            dirty = True
                if not dirty:
                    break
                place_pivot(t)
            # Pivot must divide the remaining submatrix before t advances.
            b = D[t][t]
            offender = None
            for i in range(t + 1, m):
                Di = D[i]
                for j in range(t + 1, n):
                    if Di[j] % b:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_addmul(t, offender, 1)
        t += 1
    return U, D, V, Ui, Vi


def _snf_valuation(a_rows, m: int, n: int, p: int):
    """DVR kernel for Z_(p): sizes are p-adic valuations, divisions exact."""
    D = [[Fraction(x) for x in r] for r in a_rows]
    one, zero = Fraction(1), Fraction(0)
    U, Ui = _eye(m, one, zero), _eye(m, one, zero)
    V, Vi = _eye(n, one, zero), _eye(n, one, zero)

    def vp(x: Fraction) -> int:
        # Denominators are coprime to p by the ring invariant.
        num, v = x.numerator, 0
        while num % p == 0:
            num //= p
            v += 1
        return v

    def row_swap(i, j):
        D[i], D[j] = D[j], D[i]
        Ui[i], Ui[j] = Ui[j], Ui[i]
        for r in U:
            r[i], r[j] = r[j], r[i]

    def col_swap(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in Vi:
            r[i], r[j] = r[j], r[i]
        V[i], V[j] = V[j], V[i]

    def row_scale(i, u: Fraction):
        ui = 1 / u
        D[i] = [x * u for x in D[i]]
        Ui[i] = [x * u for x in Ui[i]]
        for r in U:
            r[i] *= ui

    def row_addmul(dst, src, q: Fraction):
        Dd, Ds = D[dst], D[src]
        for k in range(n):
            Dd[k] += q * Ds[k]
        Ud, Us = Ui[dst], Ui[src]
        for k in range(m):
            Ud[k] += q * Us[k]
        for r in U:
            r[src] -= q * r[dst]

    def col_addmul(dst, src, q: Fraction):
        for r in D:
            r[dst] += q * r[src]
        for r in Vi:
            r[dst] += q * r[src]
        Vd, Vs = V[dst], V[src]
        for k in range(n):
            Vs[k] -= q * Vd[k]

    t = 0
    while t < m and t < n:
        best = None
        for i in range(t, m):
            for j in range(t, n):
                x = D[i][j]
                if x:
                    v = vp(x)
                    if best is None or v < best[0]:
                        best = (v, i, j)
        if best is None:
            break
        val, i, j = best
        if i != t:
            row_swap(t, i)
        if j != t:
            col_swap(t, j)
        # Normalize the pivot to the pure power p^val.
        row_scale(t, Fraction(p) ** val / D[t][t])
        b = D[t][t]
        for i in range(t + 1, m):
            if D[i][t]:
                row_addmul(i, t, -(D[i][t] / b))
        for j in range(t + 1, n):
            if D[t][j]:
                col_addmul(j, t, -(D[t][j] / b))
        # Everything left has valuation >= val, so divisibility is automatic.
        t += 1
    return U, D, V, Ui, Vi


def _snf_field(a_rows, m: int, n: int, ring: BaseRing):
    """Field kernel: rank normal form diag(1, ..., 1, 0, ...)."""
    p = ring.param if ring.kind == "Fp" else None
    D = [[x for x in r] for r in a_rows]
    one, zero = ring.one, ring.zero
    U, Ui = _eye(m, one, zero), _eye(m, one, zero)
    V, Vi = _eye(n, one, zero), _eye(n, one, zero)

    def inv(x):
        return pow(x, -1, p) if p is not None else 1 / x

    def red(x):
        return x % p if p is not None else x

    def row_swap(i, j):
        D[i], D[j] = D[j], D[i]
        Ui[i], Ui[j] = Ui[j], Ui[i]
        for r in U:
            r[i], r[j] = r[j], r[i]

    def col_swap(i, j):
        for r in D:
            r[i], r[j] = r[j], r[i]
        for r in Vi:
            r[i], r[j] = r[j], r[i]
        V[i], V[j] = V[j], V[i]

    def row_scale(i, u):
        ui = inv(u)
        D[i] = [red(x * u) for x in D[i]]
        Ui[i] = [red(x * u) for x in Ui[i]]
        for r in U:
            r[i] = red(r[i] * ui)

    def row_addmul(dst, src, q):
        Dd, Ds = D[dst], D[src]
        for k in range(n):
            Dd[k] = red(Dd[k] + q * Ds[k])
        Ud, Us = Ui[dst], Ui[src]
        for k in range(m):
            Ud[k] = red(Ud[k] + q * Us[k])
        for r in U:
            r[src] = red(r[src] - q * r[dst])

    def col_addmul(dst, src, q):
        for r in D:
            r[dst] = red(r[dst] + q * r[src])
        for r in Vi:
            r[dst] = red(r[dst] + q * r[src])
        Vd, Vs = V[dst], V[src]
        for k in range(n):
            Vs[k] = red(Vs[k] - q * Vd[k])

    t = 0
    while t < m and t < n:
        found = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j]:
                    found = (i, j)
                    break
            if found:
                break
        if not found:
            break
        i, j = found
        if i != t:
            row_swap(t, i)
        if j != t:
            col_swap(t, j)
        row_scale(t, inv(D[t][t]))
        for i in range(t + 1, m):
            if D[i][t]:
                row_addmul(i, t, -D[i][t] if p is None else (-D[i][t]) % p)
        for j in range(t + 1, n):
            if D[t][j]:
                col_addmul(j, t, -D[t][j] if p is None else (-D[t][j]) % p)
        t += 1
    return U, D, V, Ui, Vi


def _snf_full(a: Matrix) -> _SnfFull:
    if a._snf is not None:
        return a._snf
    ring, m, n = a.ring, a.rows, a.cols
    if ring.kind == "Z":
        U, D, V, Ui, Vi = _snf_int(a._data, m, n)
    elif ring.kind == "Zmod":
        mod = ring.param
        U, D, V, Ui, Vi = _snf_int(a._data, m, n)
        U, D, V, Ui, Vi = ([[x % mod for x in r] for r in M] for M in (U, D, V, Ui, Vi))
    elif ring.kind == "Zloc":
        U, D, V, Ui, Vi = _snf_valuation(a._data, m, n, ring.param)
    else:
        U, D, V, Ui, Vi = _snf_field(a._data, m, n, ring)
    full = _SnfFull(
        Matrix._make(ring, U, m), Matrix._make(ring, D, n), Matrix._make(ring, V, n),
        Matrix._make(ring, Ui, m), Matrix._make(ring, Vi, n))
    a._snf = full
    return full


def snf(a: Matrix) -> SnfDecomposition:
    """Smith normal form decomposition A = U @ D @ V.

    >>> from fiberflat.rings import ZZ
    >>> snf(Matrix(ZZ, [[2, 0], [0, 3]])).elementary_divisors
    (1, 6)
    """
    full = _snf_full(a)
    return SnfDecomposition(full.U, full.D, full.V, full.divisors)


def rank(a: Matrix) -> int:
    """Rank over the fraction field: the number of nonzero divisors."""
    return sum(1 for d in _snf_full(a).divisors if d != 0)


def rank_over_fiber(a: Matrix, q: Prime) -> int:
    """Rank of the image of A in the residue field at q.

    Computed from the elementary divisors (a divisor survives at q iff it
    does not vanish in kappa(q)); tests cross-check against independent
    Gaussian elimination over the residue field.

    >>> from fiberflat.rings import ZZ, Prime
    >>> rank_over_fiber(Matrix(ZZ, [[6, 4], [2, 2]]), Prime.at(2))
    0
    """
    ring = a.ring
    if not ring.admits(q):
        raise InputError(f"{q} is not a point of Spec {ring}")
    divisors = _snf_full(a).divisors
    if q.is_generic:
        return sum(1 for d in divisors if d != 0)
    p = q.p
    count = 0
    for d in divisors:
        if d == 0:
            continue
        if Fraction(d).numerator % p != 0:
            count += 1
    return count


def determinantal_divisors(a: Matrix) -> list[Scalar]:
    """k-th entry: gcd of all k x k minors, computed by direct enumeration.

    Minors are shared across subset levels with a Laplace-expansion DP.
    Only rings with meaningful gcds are supported (Z and Z_(p)); the k-th
    divisor equals the product of the first k elementary divisors up to
    units, which tests assert against snf().

    >>> from fiberflat.rings import ZZ
    >>> determinantal_divisors(Matrix(ZZ, [[2, 0], [0, 3]]))
    [1, 6]
    """
    ring = a.ring
    if ring.kind not in ("Z", "Zloc"):
        raise InputError(f"determinantal divisors need gcds; unsupported over {ring}")
    m, n = a.rows, a.cols
    kmax = min(m, n)
    out: list[Scalar] = []
    if kmax == 0:
        return out
    from itertools import combinations

    data = a._data
    if ring.kind == "Z":
        level: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {((), ()): 1}
        for k in range(1, kmax + 1):
            nxt: dict[tuple[tuple[int, ...], tuple[int, ...]], int] = {}
            g = 0
            for rows_sel in combinations(range(m), k):
                r0, rest = rows_sel[0], rows_sel[1:]
                row = data[r0]
                for cols_sel in combinations(range(n), k):
                    acc = 0
                    sign = 1
                    for t, c in enumerate(cols_sel):
                        acc += sign * row[c] * level[(rest, cols_sel[:t] + cols_sel[t + 1:])]
                        sign = -sign
                    nxt[(rows_sel, cols_sel)] = acc
                    if acc:
                        g = gcd(g, acc)
            out.append(g)
            if g == 0:
                # All k-minors vanish, so all larger minors vanish too.
                out.extend([0] * (kmax - k))
                break
            level = nxt
        return out

    # Z_(p): the gcd of a set of elements is p^(minimal valuation).
    p = ring.param
    flevel: dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction] = {((), ()): Fraction(1)}
    for k in range(1, kmax + 1):
        nxt_f: dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction] = {}
        minval: int | None = None
        for rows_sel in combinations(range(m), k):
            r0, rest = rows_sel[0], rows_sel[1:]
            row = data[r0]
            for cols_sel in combinations(range(n), k):
                acc = Fraction(0)
                sign = 1
                for t, c in enumerate(cols_sel):
                    acc += sign * row[c] * flevel[(rest, cols_sel[:t] + cols_sel[t + 1:])]
                    sign = -sign
                nxt_f[(rows_sel, cols_sel)] = acc
                if acc:
                    v = ring.valuation(acc)
                    if minval is None or v < minval:
                        minval = v
        if minval is None:
            out.extend([Fraction(0)] * (kmax - k + 1))
            break
        out.append(Fraction(p) ** minval)
        flevel = nxt_f
    return out


def det(a: Matrix) -> Scalar:
    """Exact determinant (Bareiss over the integer rings, fractions elsewhere)."""
    if a.rows != a.cols:
        raise InputError(f"determinant of non-square {a.rows}x{a.cols}")
    ring, n = a.ring, a.rows
    if n == 0:
        return ring.one
    if ring.uses_fractions:
        mat = [[Fraction(x) for x in r] for r in a._data]
        sign = 1
        dd = Fraction(1)
        for k in range(n):
            piv = next((i for i in range(k, n) if mat[i][k]), None)
            if piv is None:
                return ring.canon(0)
            if piv != k:
                mat[k], mat[piv] = mat[piv], mat[k]
                sign = -sign
            dd *= mat[k][k]
            inv = 1 / mat[k][k]
            for i in range(k + 1, n):
                f = mat[i][k] * inv
                if f:
                    mat[i] = [x - f * y for x, y in zip(mat[i], mat[k])]
        return ring.canon(sign * dd)
    # Integer Bareiss on the canonical lift; quotients are exact.
    mat = [list(r) for r in a._data]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if mat[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if mat[i][k]), None)
            if piv is None:
                return ring.canon(0)
            mat[k], mat[piv] = mat[piv], mat[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                mat[i][j] = (mat[i][j] * mat[k][k] - mat[i][k] * mat[k][j]) // prev
            mat[i][k] = 0
        prev = mat[k][k]
    return ring.canon(sign * mat[n - 1][n - 1])


def solve_integral(a: Matrix, b: Matrix) -> Matrix | None:
    """Some X over the ring with A @ X == B, or None if none exists.

    Deterministic: the particular solution comes from the cached SNF with
    free coordinates set to zero (and canonical division choices over Z/n).
    """
    if a.ring != b.ring:
        raise InputError(f"ring mismatch: {a.ring} vs {b.ring}")
    if a.rows != b.rows:
        raise InputError(f"A has {a.rows} rows but B has {b.rows}")
    ring = a.ring
    full = _snf_full(a)
    c = full.Ui @ b
    k, l = a.cols, b.cols
    ybody = [[ring.zero] * l for _ in range(k)]
    diag = full.divisors
    for i in range(a.rows):
        d = diag[i] if i < len(diag) else None
        crow = c._data[i]
        if d is None or d == 0:
            # 0*y = c forces c = 0 (over Z/n the canonical rep is 0 exactly
            # when c vanishes in the ring, so the same test applies).
            if any(x != 0 for x in crow):
                return None
            continue
        yrow = ybody[i]
        for j in range(l):
            x = crow[j]
            if x == 0:
                continue
            q = ring.try_divide(x, d)
            if q is None:
                return None
            yrow[j] = q
    x = full.Vi @ Matrix._make(ring, ybody, l)
    assert a @ x == b, "solve_integral postcondition failed"
    return x


def syzygy_matrix(a: Matrix) -> Matrix:
    """Columns generating {x : A @ x = 0} over the ring.

    Over Z, Z_(p), and fields these columns are a basis (part of a basis of
    the free cover, read off the tracked inverse of V).  Over Z/n the
    integer syzygies of [A | n*I] are projected and reduced; zero columns
    are dropped.
    """
    ring = a.ring
    if ring.kind == "Zmod":
        n_mod = ring.param
        lift = Matrix(ZZ, a._data, cols=a.cols)
        aug = hstack([lift, Matrix.diagonal(ZZ, [n_mod] * a.rows, a.rows, a.rows)])
        s = syzygy_matrix(aug)
        body = [[x % n_mod for x in s._data[i]] for i in range(a.cols)]
        cols = [j for j in range(s.cols) if any(body[i][j] for i in range(a.cols))]
        return Matrix._make(ring, [[row[j] for j in cols] for row in body], len(cols))
    full = _snf_full(a)
    free = [i for i in range(a.cols)
            if i >= len(full.divisors) or full.divisors[i] == 0]
    return full.Vi.submatrix(range(a.cols), free)


def reduce_matrix(a: Matrix, q: Prime) -> Matrix:
    """Entrywise reduction into the residue field at q."""
    rf = a.ring.residue_field(q)
    red = rf.reduce
    return Matrix._make(rf.field, [[red(x) for x in r] for r in a._data], a.cols)


def field_rank(a: Matrix) -> int:
    """Gaussian-elimination rank over Q or F_p.

    An independent route from rank_over_fiber's divisor counting; the two
    are cross-checked by the test suite.
    """
    ring = a.ring
    if not ring.is_field:
        raise InputError(f"field_rank needs a field, got {ring}")
    p = ring.param if ring.kind == "Fp" else None
    rows = [list(r) for r in a._data]
    rk = 0
    for j in range(a.cols):
        piv = next((i for i in range(rk, a.rows) if rows[i][j]), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        inv = pow(rows[rk][j], -1, p) if p is not None else 1 / Fraction(rows[rk][j])
        for i in range(rk + 1, a.rows):
            f = rows[i][j]
            if f:
                fac = (f * inv) % p if p is not None else f * inv
                if p is not None:
                    rows[i] = [(x - fac * y) % p for x, y in zip(rows[i], rows[rk])]
                else:
                    rows[i] = [x - fac * y for x, y in zip(rows[i], rows[rk])]
        rk += 1
        if rk == a.rows:
            break
    return rk


def field_nullspace(a: Matrix) -> Matrix:
    """Columns forming a basis of the kernel over Q or F_p."""
    ring = a.ring
    if not ring.is_field:
        raise InputError(f"field_nullspace needs a field, got {ring}")
    p = ring.param if ring.kind == "Fp" else None
    rows = [[Fraction(x) for x in r] for r in a._data] if p is None \
        else [list(r) for r in a._data]
    pivots: list[int] = []
    rk = 0
    for j in range(a.cols):
        piv = next((i for i in range(rk, a.rows) if rows[i][j]), None)
        if piv is None:
            continue
        rows[rk], rows[piv] = rows[piv], rows[rk]
        inv = pow(rows[rk][j], -1, p) if p is not None else 1 / rows[rk][j]
        rows[rk] = [(x * inv) % p if p is not None else x * inv for x in rows[rk]]
        for i in range(a.rows):
            if i != rk and rows[i][j]:
                f = rows[i][j]
                if p is not None:
                    rows[i] = [(x - f * y) % p for x, y in zip(rows[i], rows[rk])]
                else:
                    rows[i] = [x - f * y for x, y in zip(rows[i], rows[rk])]
        pivots.append(j)
        rk += 1
        if rk == a.rows:
            break
    free = [j for j in range(a.cols) if j not in pivots]
    columns = []
    for j in free:
        vec = [ring.zero] * a.cols
        vec[j] = ring.one
        for i, pj in enumerate(pivots):
            val = rows[i][j]
            vec[pj] = (-val) % p if p is not None else -val
        columns.append(vec)
    return Matrix.from_columns(ring, columns, rows=a.cols)
