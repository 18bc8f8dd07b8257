"""Bounded chain complexes, chain maps, and the standard constructions.

Conventions, fixed once here:

  * a complex lives in degrees [lo, hi]; the boundary in degree i maps
    term(i) to term(i - 1), and d . d = 0 is checked at construction;
  * shift(C, k) puts C_{i-k} in degree i and scales every boundary by
    (-1)^k;
  * cone(f)_i = C_{i-1} (+) D_i with d(c, x) = (-dc, dx - fc);
  * in a total tensor complex the second-factor boundary carries the
    sign (-1)^p of the first-factor degree;
  * Koszul terms are ordered by itertools.combinations, i.e. subsets in
    lexicographic order.

Terms are finitely presented modules; everything below degrades to plain
matrix algebra when the terms are free.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping, Sequence

from .errors import ContradictionError, InputError
from .linalg import Matrix, field_rank, hstack, kron, reduce_matrix, solve_integral
from .modules import FpModule, ModuleMap, _pullback
from .rings import BaseRing, Prime, Scalar


@dataclass(frozen=True)
class FiberProfile:
    """Homology dimensions of a complex after base change to kappa(prime)."""

    prime: Prime
    dims: dict[int, int]

    def is_exact(self) -> bool:
        return all(v == 0 for v in self.dims.values())

    def vanishes_above(self, degree: int) -> bool:
        return all(v == 0 for i, v in self.dims.items() if i > degree)


class BoundedComplex:
    """A bounded complex of finitely presented modules.

    terms maps each degree in [lo, hi] to its module; boundaries maps each
    degree i in (lo, hi] to the map term(i) -> term(i-1).  Outside the
    range term() returns the zero module and boundary() the zero map, so
    callers can index freely.
    """

    __slots__ = ("ring", "lo", "hi", "_terms", "_boundaries")

    def __init__(self, ring: BaseRing, lo: int, hi: int,
                 terms: Mapping[int, FpModule],
                 boundaries: Mapping[int, ModuleMap]):
        if lo > hi:
            raise InputError(f"empty degree range [{lo}, {hi}]")
        for i in range(lo, hi + 1):
            if i not in terms:
                raise InputError(f"missing term in degree {i}")
            if terms[i].ring != ring:
                raise InputError(f"term in degree {i} lives over {terms[i].ring}")
        for i in range(lo + 1, hi + 1):
            if i not in boundaries:
                raise InputError(f"missing boundary in degree {i}")
            d = boundaries[i]
            if d.source != terms[i] or d.target != terms[i - 1]:
                raise InputError(f"boundary in degree {i} does not match its terms")
        extra = set(boundaries) - set(range(lo + 1, hi + 1))
        if extra:
            raise InputError(f"boundaries given outside (lo, hi]: {sorted(extra)}")
        self.ring = ring
        self.lo = lo
        self.hi = hi
        self._terms = {i: terms[i] for i in range(lo, hi + 1)}
        self._boundaries = {i: boundaries[i] for i in range(lo + 1, hi + 1)}
        for i in range(lo + 2, hi + 1):
            if not self._boundaries[i - 1].compose(self._boundaries[i]).is_zero_map():
                raise InputError(f"d.d != 0 between degrees {i} and {i - 2}")

    @classmethod
    def free_complex(cls, ring: BaseRing, lo: int, ranks: Sequence[int],
                     matrices: Sequence[Matrix]) -> "BoundedComplex":
        """Free terms of the given ranks (degrees lo, lo+1, ...) and
        matrices[j] as the boundary from degree lo+j+1 down to lo+j."""
        if not ranks:
            raise InputError("free_complex needs at least one term")
        if len(matrices) != len(ranks) - 1:
            raise InputError(f"{len(ranks)} ranks need {len(ranks) - 1} boundary matrices")
        terms = {lo + j: FpModule.free(ring, r) for j, r in enumerate(ranks)}
        bmaps = {}
        for j, mat in enumerate(matrices):
            i = lo + j + 1
            bmaps[i] = ModuleMap(terms[i], terms[i - 1], mat)
        return cls(ring, lo, lo + len(ranks) - 1, terms, bmaps)

    @classmethod
    def single(cls, module: FpModule, degree: int = 0) -> "BoundedComplex":
        return cls(module.ring, degree, degree, {degree: module}, {})

    def __repr__(self) -> str:
        dims = ", ".join(f"{i}:{self._terms[i].gens}" for i in range(self.hi, self.lo - 1, -1))
        return f"BoundedComplex({self.ring}, gens {{{dims}}})"

    def term(self, i: int) -> FpModule:
        if self.lo <= i <= self.hi:
            return self._terms[i]
        return FpModule.zero(self.ring)

    def boundary(self, i: int) -> ModuleMap:
        if self.lo < i <= self.hi:
            return self._boundaries[i]
        return ModuleMap.zero(self.term(i), self.term(i - 1))

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def is_free(self) -> bool:
        return all(self._terms[i].is_free_presentation for i in self.degrees())

    # -- homology ------------------------------------------------------------

    def homology(self, i: int) -> FpModule:
        """H_i = ker(d_i) / im(d_{i+1}) as a finitely presented module.

        >>> from fiberflat.rings import ZZ
        >>> cx = BoundedComplex.free_complex(ZZ, 0, [1, 1], [Matrix(ZZ, [[2]])])
        >>> cx.homology(0).invariant_factors()
        InvariantFactors(free_rank=0, torsion=(2,))
        """
        if i < self.lo or i > self.hi:
            return FpModule.zero(self.ring)
        d_in = self.boundary(i)
        ker, incl = d_in.kernel()
        wall = hstack([self.boundary(i + 1).matrix, self.term(i).relations])
        return FpModule(self.ring, ker.gens, _pullback(incl.matrix, wall))

    def homology_profile(self) -> dict[int, FpModule]:
        return {i: self.homology(i) for i in self.degrees()}

    def is_exact(self) -> bool:
        return all(self.homology(i).is_zero() for i in self.degrees())

    def is_acyclic_away_from(self, degree: int = 0) -> bool:
        return all(self.homology(i).is_zero() for i in self.degrees() if i != degree)

    # -- fibers ---------------------------------------------------------------

    def fiber_homology_dim(self, q: Prime, i: int) -> int:
        """dim over kappa(q) of H_i(kappa(q) tensor C).

        Works for arbitrary finitely presented terms: with A_j the reduced
        relations of term(j) and F_j the reduced boundary, the dimension is
          gens_i - rank[F_i | A_{i-1}] + rank A_{i-1} - rank[F_{i+1} | A_i],
        each rank taken over the residue field.
        """
        if i < self.lo or i > self.hi:
            return 0
        a_below = reduce_matrix(self.term(i - 1).relations, q)
        a_here = reduce_matrix(self.term(i).relations, q)
        f_in = reduce_matrix(self.boundary(i).matrix, q)
        f_out = reduce_matrix(self.boundary(i + 1).matrix, q)
        return (self.term(i).gens
                - field_rank(hstack([f_in, a_below])) + field_rank(a_below)
                - field_rank(hstack([f_out, a_here])))

    def fiber_profile(self, q: Prime) -> FiberProfile:
        return FiberProfile(q, {i: self.fiber_homology_dim(q, i) for i in self.degrees()})

    def is_fiber_exact(self, q: Prime) -> bool:
        return all(self.fiber_homology_dim(q, i) == 0 for i in self.degrees())


def fiber_complex(cx: BoundedComplex, q: Prime) -> BoundedComplex:
    """The complex of kappa(q)-vector spaces obtained by reducing a
    complex with free terms.  Non-free terms are rejected: their fibers
    are handled dimension-wise by fiber_homology_dim instead."""
    if not cx.is_free():
        raise InputError("fiber_complex needs free terms")
    field = cx.ring.residue_field(q).field
    ranks = [cx.term(i).gens for i in cx.degrees()]
    mats = [reduce_matrix(cx.boundary(i).matrix, q) for i in range(cx.lo + 1, cx.hi + 1)]
    return BoundedComplex.free_complex(field, cx.lo, ranks, mats)


class ChainMap:
    """A degreewise map of complexes commuting with the boundaries.

    Missing degrees are implicitly zero; commutation is checked at
    construction for every degree where it has content.
    """

    __slots__ = ("source", "target", "_maps")

    def __init__(self, source: BoundedComplex, target: BoundedComplex,
                 maps: Mapping[int, ModuleMap]):
        if source.ring != target.ring:
            raise InputError("chain map needs a common ring")
        for i, f in maps.items():
            if f.source != source.term(i) or f.target != target.term(i):
                raise InputError(f"component in degree {i} has wrong source or target")
        self.source = source
        self.target = target
        self._maps = dict(maps)
        lo = min(source.lo, target.lo)
        hi = max(source.hi, target.hi)
        for i in range(lo + 1, hi + 1):
            left = target.boundary(i).compose(self.at(i))
            right = self.at(i - 1).compose(source.boundary(i))
            if not left.equals(right):
                raise InputError(f"square at degree {i} does not commute")

    def at(self, i: int) -> ModuleMap:
        f = self._maps.get(i)
        if f is None:
            return ModuleMap.zero(self.source.term(i), self.target.term(i))
        return f

    def is_isomorphism(self) -> bool:
        lo = min(self.source.lo, self.target.lo)
        hi = max(self.source.hi, self.target.hi)
        for i in range(lo, hi + 1):
            f = self.at(i)
            if not (f.is_injective() and f.is_surjective()):
                return False
        return True


# -- elementary constructions ---------------------------------------------------

def shift(cx: BoundedComplex, k: int) -> BoundedComplex:
    """Degree shift: shift(C, k)_i = C_{i-k}, boundaries scaled by (-1)^k."""
    sign = 1 if k % 2 == 0 else -1
    terms = {i + k: cx.term(i) for i in cx.degrees()}
    bmaps = {}
    for i in range(cx.lo + 1, cx.hi + 1):
        d = cx.boundary(i)
        mat = d.matrix if sign == 1 else -d.matrix
        bmaps[i + k] = ModuleMap(terms[i + k], terms[i + k - 1], mat)
    return BoundedComplex(cx.ring, cx.lo + k, cx.hi + k, terms, bmaps)


def truncate_geq(cx: BoundedComplex, k: int) -> BoundedComplex:
    """Degrees >= k, with the degree-k term replaced by ker(d_k) so that
    homology in degrees >= k is preserved (and degree k picks up H_k)."""
    if k > cx.hi:
        z = FpModule.zero(cx.ring)
        return BoundedComplex(cx.ring, k, k, {k: z}, {})
    if k <= cx.lo:
        return cx
    ker, incl = cx.boundary(k).kernel()
    terms = {i: cx.term(i) for i in range(k + 1, cx.hi + 1)}
    terms[k] = ker
    bmaps = {i: cx.boundary(i) for i in range(k + 2, cx.hi + 1)}
    if k + 1 <= cx.hi:
        f = cx.boundary(k + 1).matrix
        wall = hstack([incl.matrix, cx.term(k).relations])
        sol = solve_integral(wall, f)
        if sol is None:
            raise ContradictionError("boundary image escapes its own kernel")
        core = sol.submatrix(range(ker.gens), range(sol.cols))
        bmaps[k + 1] = ModuleMap(terms[k + 1], ker, core)
    return BoundedComplex(cx.ring, k, cx.hi, terms, bmaps)


def _block_matrix(ring: BaseRing, row_dims: Sequence[int], col_dims: Sequence[int],
                  blocks: Mapping[tuple[int, int], Matrix]) -> Matrix:
    rows = sum(row_dims)
    cols = sum(col_dims)
    body = [[ring.zero] * cols for _ in range(rows)]
    row_off = [0]
    for d in row_dims:
        row_off.append(row_off[-1] + d)
    col_off = [0]
    for d in col_dims:
        col_off.append(col_off[-1] + d)
    for (bi, bj), mat in blocks.items():
        if mat.rows != row_dims[bi] or mat.cols != col_dims[bj]:
            raise InputError("block shape mismatch")
        r0, c0 = row_off[bi], col_off[bj]
        for i in range(mat.rows):
            row = body[r0 + i]
            for j in range(mat.cols):
                row[c0 + j] = mat[i, j]
    return Matrix(ring, body, cols=cols, _canon=False)


def cone(f: ChainMap) -> BoundedComplex:
    """Mapping cone: cone(f)_i = C_{i-1} (+) D_i, d(c, x) = (-dc, dx - fc).

    Exact iff f is a quasi-isomorphism; contractible iff f is a homotopy
    equivalence (for free terms these coincide with the checks used in
    the Koszul duality tests).
    """
    cx, dx = f.source, f.target
    ring = cx.ring
    lo = min(cx.lo + 1, dx.lo)
    hi = max(cx.hi + 1, dx.hi)
    terms = {i: cx.term(i - 1).direct_sum(dx.term(i)) for i in range(lo, hi + 1)}
    bmaps = {}
    for i in range(lo + 1, hi + 1):
        gc, gd = cx.term(i - 1).gens, dx.term(i).gens
        row_dims = [cx.term(i - 2).gens, dx.term(i - 1).gens]
        blocks: dict[tuple[int, int], Matrix] = {}
        dc = cx.boundary(i - 1).matrix
        blocks[(0, 0)] = -dc
        blocks[(1, 0)] = -f.at(i - 1).matrix
        blocks[(1, 1)] = dx.boundary(i).matrix
        mat = _block_matrix(ring, row_dims, [gc, gd], blocks)
        bmaps[i] = ModuleMap(terms[i], terms[i - 1], mat)
    return BoundedComplex(ring, lo, hi, terms, bmaps)


def tensor_with_module(m: FpModule, cx: BoundedComplex) -> BoundedComplex:
    """M tensor C, termwise; boundaries are id_M tensor d."""
    if m.ring != cx.ring:
        raise InputError("tensor needs a common ring")
    terms = {i: m.tensor(cx.term(i)) for i in cx.degrees()}
    bmaps = {}
    ident = Matrix.identity(m.ring, m.gens)
    for i in range(cx.lo + 1, cx.hi + 1):
        mat = kron(ident, cx.boundary(i).matrix)
        bmaps[i] = ModuleMap(terms[i], terms[i - 1], mat)
    return BoundedComplex(cx.ring, cx.lo, cx.hi, terms, bmaps)


def total_tensor(g: BoundedComplex, c: BoundedComplex) -> BoundedComplex:
    """Total complex of the double complex G tensor C.

    T_n = (+)_{p+q=n} G_p tensor C_q, summands ordered by ascending p;
    the boundary acts by d_G tensor id + (-1)^p id tensor d_C.
    """
    if g.ring != c.ring:
        raise InputError("tensor needs a common ring")
    ring = g.ring
    lo, hi = g.lo + c.lo, g.hi + c.hi

    def parts(n: int) -> list[int]:
        return [p for p in range(max(g.lo, n - c.hi), min(g.hi, n - c.lo) + 1)]

    terms: dict[int, FpModule] = {}
    layout: dict[int, list[int]] = {}
    for n in range(lo, hi + 1):
        ps = parts(n)
        layout[n] = ps
        acc = FpModule.zero(ring)
        for p in ps:
            acc = acc.direct_sum(g.term(p).tensor(c.term(n - p)))
        terms[n] = acc
    bmaps = {}
    for n in range(lo + 1, hi + 1):
        src_ps, tgt_ps = layout[n], layout[n - 1]
        col_dims = [g.term(p).gens * c.term(n - p).gens for p in src_ps]
        row_dims = [g.term(p).gens * c.term(n - 1 - p).gens for p in tgt_ps]
        blocks: dict[tuple[int, int], Matrix] = {}
        for sj, p in enumerate(src_ps):
            q = n - p
            if p - 1 in tgt_ps:
                ti = tgt_ps.index(p - 1)
                blocks[(ti, sj)] = kron(g.boundary(p).matrix,
                                        Matrix.identity(ring, c.term(q).gens))
            if p in tgt_ps:
                ti = tgt_ps.index(p)
                block = kron(Matrix.identity(ring, g.term(p).gens),
                             c.boundary(q).matrix)
                blocks[(ti, sj)] = block if p % 2 == 0 else -block
        mat = _block_matrix(ring, row_dims, col_dims, blocks)
        bmaps[n] = ModuleMap(terms[n], terms[n - 1], mat)
    return BoundedComplex(ring, lo, hi, terms, bmaps)


def dual(cx: BoundedComplex) -> BoundedComplex:
    """Hom(-, R) of a complex with free terms: degree i holds the dual of
    C_{-i} and boundaries are the transposed originals (no sign)."""
    if not cx.is_free():
        raise InputError("dual needs free terms")
    ring = cx.ring
    lo, hi = -cx.hi, -cx.lo
    terms = {i: FpModule.free(ring, cx.term(-i).gens) for i in range(lo, hi + 1)}
    bmaps = {}
    for i in range(lo + 1, hi + 1):
        mat = cx.boundary(-i + 1).matrix.transpose()
        bmaps[i] = ModuleMap(terms[i], terms[i - 1], mat)
    return BoundedComplex(ring, lo, hi, terms, bmaps)


# -- Koszul complexes -----------------------------------------------------------

def koszul_complex(ring: BaseRing, elements: Sequence[object]) -> BoundedComplex:
    """The Koszul complex on the given ring elements, in degrees [0, d].

    Degree i has one generator e_S per size-i subset S (lexicographic
    order); d(e_S) = sum over t in S of (-1)^{pos(t, S)} x_t e_{S - t}.

    >>> from fiberflat.rings import ZZ
    >>> koszul_complex(ZZ, [2, 3]).boundary(1).matrix.to_rows()
    [[2, 3]]
    """
    xs = [ring.canon(x) for x in elements]
    d = len(xs)
    if d == 0:
        raise InputError("koszul complex needs at least one element")
    ranks = [len(list(combinations(range(d), i))) for i in range(d + 1)]
    mats = []
    for i in range(1, d + 1):
        lower = list(combinations(range(d), i - 1))
        upper = list(combinations(range(d), i))
        pos_of = {s: k for k, s in enumerate(lower)}
        body = [[ring.zero] * len(upper) for _ in lower]
        for j, s in enumerate(upper):
            for pos, t in enumerate(s):
                reduced = s[:pos] + s[pos + 1:]
                coeff = xs[t] if pos % 2 == 0 else ring.neg(xs[t])
                body[pos_of[reduced]][j] = coeff
        mats.append(Matrix(ring, body, cols=len(upper), _canon=False))
    return BoundedComplex.free_complex(ring, 0, ranks, mats)


def _merge_sign(subset: tuple[int, ...], d: int) -> int:
    """Sign of the shuffle sorting (subset, complement) into 0..d-1."""
    comp = [t for t in range(d) if t not in subset]
    inversions = sum(1 for s in subset for t in comp if t < s)
    return 1 if inversions % 2 == 0 else -1


def koszul_selfduality(ring: BaseRing, elements: Sequence[object]) -> ChainMap:
    """The classical isomorphism dual(K) -> shift(K, -d) for the Koszul
    complex on d elements: e_S* goes to a sign times e_{complement of S}.

    The degreewise scalars are forced (up to one global choice) by the
    commutation constraint; construction fails loudly if a sign is wrong.
    """
    k = koszul_complex(ring, elements)
    d = k.hi
    src = dual(k)
    tgt = shift(k, -d)
    lams: dict[int, int] = {0: 1}
    for i in range(0, -d, -1):
        lams[i - 1] = lams[i] * (1 if (d + i) % 2 == 0 else -1)
    maps = {}
    for i in range(-d, 1):
        size = -i
        subsets = list(combinations(range(d), size))
        complements = list(combinations(range(d), d - size))
        comp_pos = {s: k2 for k2, s in enumerate(complements)}
        body = [[ring.zero] * len(subsets) for _ in complements]
        for j, s in enumerate(subsets):
            comp = tuple(t for t in range(d) if t not in s)
            val = lams[i] * _merge_sign(s, d)
            body[comp_pos[comp]][j] = ring.canon(val)
        mat = Matrix(ring, body, cols=len(subsets), _canon=False)
        maps[i] = ModuleMap(src.term(i), tgt.term(i), mat)
    return ChainMap(src, tgt, maps)


# -- null homotopies --------------------------------------------------------------

@dataclass(frozen=True)
class HomotopyCertificate:
    """Maps h_i: C_i -> C_{i+1} with d h + h d = id in every degree."""

    complex: BoundedComplex
    maps: dict[int, Matrix]

    def h(self, i: int) -> Matrix:
        cx = self.complex
        got = self.maps.get(i)
        if got is not None:
            return got
        return Matrix.zeros(cx.ring, cx.term(i + 1).gens, cx.term(i).gens)

    def verify(self) -> bool:
        cx = self.complex
        for i in cx.degrees():
            lhs = (cx.boundary(i + 1).matrix @ self.h(i)
                   + self.h(i - 1) @ cx.boundary(i).matrix)
            diff = lhs - Matrix.identity(cx.ring, cx.term(i).gens)
            if diff.is_zero():
                continue
            if solve_integral(cx.term(i).relations, diff) is None:
                return False
        return True


def _greedy_homotopy(cx: BoundedComplex) -> dict[int, Matrix] | None:
    ring = cx.ring
    maps: dict[int, Matrix] = {}
    prev = Matrix.zeros(ring, cx.term(cx.lo).gens, cx.term(cx.lo - 1).gens)
    for i in range(cx.lo, cx.hi + 1):
        gi = cx.term(i).gens
        rhs = Matrix.identity(ring, gi) - prev @ cx.boundary(i).matrix
        if i == cx.hi:
            if rhs.is_zero() or solve_integral(cx.term(i).relations, rhs) is not None:
                return maps
            return None
        wall = hstack([cx.boundary(i + 1).matrix, cx.term(i).relations])
        sol = solve_integral(wall, rhs)
        if sol is None:
            return None
        h_i = sol.submatrix(range(cx.term(i + 1).gens), range(gi))
        maps[i] = h_i
        prev = h_i
    return maps


def _global_homotopy(cx: BoundedComplex) -> dict[int, Matrix] | None:
    """One linear system for all h_i at once, via Kronecker lifts of the
    defining equations (row-major vectorization)."""
    ring = cx.ring
    degs = list(cx.degrees())
    g = {i: cx.term(i).gens for i in range(cx.lo - 1, cx.hi + 2)}
    g[cx.lo - 1] = 0
    g[cx.hi + 1] = 0
    var_shape = {i: (g[i + 1], g[i]) for i in degs}
    slack_shape = {i: (cx.term(i).relations.cols, g[i]) for i in degs}
    order = [("h", i) for i in degs] + [("s", i) for i in degs if slack_shape[i][0]]
    sizes = {("h", i): var_shape[i][0] * var_shape[i][1] for i in degs}
    sizes.update({("s", i): slack_shape[i][0] * slack_shape[i][1]
                  for i in degs if slack_shape[i][0]})
    offsets: dict[tuple[str, int], int] = {}
    total = 0
    for key in order:
        offsets[key] = total
        total += sizes[key]

    rows: list[list[Scalar]] = []
    rhs_rows: list[list[Scalar]] = []
    for i in degs:
        gi = g[i]
        if gi == 0:
            continue
        eq_rows = gi * gi
        block = [[ring.zero] * total for _ in range(eq_rows)]

        def put(key: tuple[str, int], mat: Matrix) -> None:
            base = offsets[key]
            for r in range(mat.rows):
                row = block[r]
                for cc in range(mat.cols):
                    row[base + cc] = ring.add(row[base + cc], mat[r, cc])

        if g[i + 1]:
            put(("h", i), kron(cx.boundary(i + 1).matrix, Matrix.identity(ring, gi)))
        if g[i - 1]:
            put(("h", i - 1), kron(Matrix.identity(ring, gi),
                                   cx.boundary(i).matrix.transpose()))
        if slack_shape[i][0]:
            put(("s", i), kron(cx.term(i).relations, Matrix.identity(ring, gi)))
        rows.extend(block)
        ident = Matrix.identity(ring, gi)
        rhs_rows.extend([[ident[a, b]] for a in range(gi) for b in range(gi)])
    if not rows:
        return {}
    system = Matrix(ring, rows, cols=total, _canon=False)
    rhs = Matrix(ring, rhs_rows, cols=1, _canon=False)
    sol = solve_integral(system, rhs)
    if sol is None:
        return None
    maps: dict[int, Matrix] = {}
    for i in degs:
        m, n = var_shape[i]
        if m == 0 or n == 0:
            continue
        base = offsets[("h", i)]
        body = [[sol[base + r * n + cc, 0] for cc in range(n)] for r in range(m)]
        maps[i] = Matrix(ring, body, cols=n, _canon=False)
    return maps


def null_homotopy(cx: BoundedComplex) -> HomotopyCertificate | None:
    """An explicit contraction d h + h d = id, or None when none exists.

    Strategy: a homology precheck (nonzero homology rules a contraction
    out), then a cheap degreewise greedy solve, then one global linear
    system whose solvability is equivalent to contractibility.  Every
    returned certificate verifies.
    """
    for i in cx.degrees():
        if not cx.homology(i).is_zero():
            return None
    maps = _greedy_homotopy(cx)
    if maps is None:
        maps = _global_homotopy(cx)
    if maps is None:
        return None
    cert = HomotopyCertificate(cx, maps)
    if not cert.verify():
        raise ContradictionError("constructed homotopy fails verification")
    return cert
