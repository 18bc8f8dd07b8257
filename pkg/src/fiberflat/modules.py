"""Finitely presented modules, module maps, resolutions, and purity.

A module is the cokernel of its relations matrix: generators index the
rows and each column is one relation.  Maps are matrices on generators
(target generators x source generators) and are validated eagerly: every
source relation must land in the span of the target relations, otherwise
the matrix does not define a map of quotients.

Kernels, images, cokernels, and homology all reduce to two primitives
from fiberflat.linalg: syzygy_matrix (column generators of a kernel) and
solve_integral (membership in a column span).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import TYPE_CHECKING, Sequence

from .errors import ContradictionError, InputError
from .linalg import (
    Matrix, field_rank, hstack, kron, rank_over_fiber, reduce_matrix, snf,
    solve_integral, syzygy_matrix, _snf_full,
)
from .rings import BaseRing, GENERIC, Prime, Scalar, factor_trial, integers_mod

if TYPE_CHECKING:
    from .complexes import BoundedComplex


@dataclass(frozen=True)
class InvariantFactors:
    """Canonical decomposition data: M ~ R^free_rank + sum of R/(d) factors.

    The torsion entries form a divisibility chain of non-unit, non-zero
    canonical ring elements (over Z/n they are gcd-normalized so that each
    entry literally generates the annihilator of its cyclic factor).
    """

    free_rank: int
    torsion: tuple[Scalar, ...]

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion


class FpModule:
    """A finitely presented module coker(relations: R^r -> R^gens).

    >>> from fiberflat.rings import ZZ
    >>> M = FpModule(ZZ, 2, Matrix(ZZ, [[2, 0], [0, 3]]))
    >>> M.invariant_factors()
    InvariantFactors(free_rank=0, torsion=(6,))
    """

    __slots__ = ("ring", "gens", "relations", "_inv")

    def __init__(self, ring: BaseRing, gens: int, relations: Matrix | None = None):
        if relations is None:
            relations = Matrix.zeros(ring, gens, 0)
        if relations.ring != ring:
            raise InputError(f"relations over {relations.ring}, module over {ring}")
        if relations.rows != gens:
            raise InputError(f"{gens} generators but relations have {relations.rows} rows")
        if gens < 0:
            raise InputError("negative generator count")
        self.ring = ring
        self.gens = gens
        self.relations = relations
        self._inv: InvariantFactors | None = None

    @classmethod
    def free(cls, ring: BaseRing, n: int) -> "FpModule":
        return cls(ring, n)

    @classmethod
    def zero(cls, ring: BaseRing) -> "FpModule":
        return cls(ring, 0)

    @classmethod
    def cyclic(cls, ring: BaseRing, d: object) -> "FpModule":
        """R/(d), e.g. cyclic(ZZ, 6) is Z/6."""
        return cls(ring, 1, Matrix(ring, [[d]]))

    def __repr__(self) -> str:
        inv = self.invariant_factors()
        return f"FpModule({self.ring}, free={inv.free_rank}, torsion={list(inv.torsion)})"

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, FpModule) and self.ring == other.ring
                and self.gens == other.gens and self.relations == other.relations)

    def __hash__(self) -> int:
        return hash((self.ring, self.gens, self.relations))

    @property
    def is_free_presentation(self) -> bool:
        return self.relations.cols == 0

    # -- classification ----------------------------------------------------

    def invariant_factors(self) -> InvariantFactors:
        if self._inv is not None:
            return self._inv
        ring = self.ring
        divisors = _snf_full(self.relations).divisors
        if ring.kind == "Zmod":
            n = ring.param
            free = self.gens - len(divisors)
            torsion = []
            for d in divisors:
                e = gcd(int(d), n)
                if e == n:
                    free += 1
                elif e > 1:
                    torsion.append(e)
            inv = InvariantFactors(free, tuple(torsion))
        else:
            nonzero = [d for d in divisors if d != 0]
            torsion = tuple(d for d in nonzero if not ring.is_unit(d))
            inv = InvariantFactors(self.gens - len(nonzero), torsion)
        self._inv = inv
        return inv

    def is_zero(self) -> bool:
        return self.invariant_factors().is_trivial

    def is_isomorphic_to(self, other: "FpModule") -> bool:
        if self.ring != other.ring:
            raise InputError("cannot compare modules over different rings")
        return self.invariant_factors() == other.invariant_factors()

    def is_flat(self) -> bool:
        """Flatness test from the invariant factors.

        Over Z, Z_(p), and fields: no torsion.  Over Z/n a cyclic factor
        Z/d is flat iff for every prime power p^e exactly dividing n the
        exponent of p in d is 0 or e (then the factor is a direct summand
        cut out by the CRT idempotents).
        """
        inv = self.invariant_factors()
        if self.ring.kind != "Zmod":
            return not inv.torsion
        exponents = factor_trial(self.ring.param)
        for d in inv.torsion:
            dfac = factor_trial(int(d))
            for p, e in exponents.items():
                if dfac.get(p, 0) not in (0, e):
                    return False
        return True

    # -- fibers --------------------------------------------------------------

    def fiber_dim(self, q: Prime) -> int:
        """dim over kappa(q) of kappa(q) tensor M (tensoring is right exact)."""
        return self.gens - rank_over_fiber(self.relations, q)

    # -- constructions ---------------------------------------------------------

    def direct_sum(self, other: "FpModule") -> "FpModule":
        if self.ring != other.ring:
            raise InputError("direct sum needs a common ring")
        a, b = self.relations, other.relations
        top = hstack([a, Matrix.zeros(self.ring, a.rows, b.cols)])
        bot = hstack([Matrix.zeros(self.ring, b.rows, a.cols), b])
        body = top.to_rows() + bot.to_rows()
        return FpModule(self.ring, self.gens + other.gens,
                        Matrix(self.ring, body, cols=a.cols + b.cols))

    def tensor(self, other: "FpModule") -> "FpModule":
        """M tensor N presented on pairs (i, j) -> i * other.gens + j.

        >>> from fiberflat.rings import ZZ
        >>> FpModule.cyclic(ZZ, 4).tensor(FpModule.cyclic(ZZ, 6)).invariant_factors()
        InvariantFactors(free_rank=0, torsion=(2,))
        """
        if self.ring != other.ring:
            raise InputError("tensor needs a common ring")
        ia = Matrix.identity(self.ring, self.gens)
        ib = Matrix.identity(self.ring, other.gens)
        rels = hstack([kron(self.relations, ib), kron(ia, other.relations)])
        return FpModule(self.ring, self.gens * other.gens, rels)


def tensor_modules(m: FpModule, n: FpModule) -> FpModule:
    return m.tensor(n)


def fiber_module(m: FpModule, q: Prime) -> int:
    return m.fiber_dim(q)


def _drop_zero_columns(a: Matrix) -> Matrix:
    keep = [j for j in range(a.cols) if any(a[i, j] != 0 for i in range(a.rows))]
    if len(keep) == a.cols:
        return a
    return a.submatrix(range(a.rows), keep)


def _pullback(f: Matrix, b: Matrix) -> Matrix:
    """Column generators of {x : f @ x lies in the column span of b}."""
    if f.rows != b.rows:
        raise InputError("pullback needs matching heights")
    syz = syzygy_matrix(hstack([f, b]))
    return _drop_zero_columns(syz.submatrix(range(f.cols), range(syz.cols)))


class ModuleMap:
    """A map of finitely presented modules, given on generators.

    matrix has shape (target.gens x source.gens); construction verifies
    that every source relation is carried into the target relation span.
    """

    __slots__ = ("source", "target", "matrix")

    def __init__(self, source: FpModule, target: FpModule, matrix: Matrix):
        if source.ring != target.ring:
            raise InputError("map needs a common ring")
        if matrix.ring != source.ring:
            raise InputError("matrix ring differs from module ring")
        if matrix.rows != target.gens or matrix.cols != source.gens:
            raise InputError(
                f"map matrix must be {target.gens}x{source.gens}, got {matrix.rows}x{matrix.cols}")
        if source.relations.cols:
            carried = matrix @ source.relations
            if solve_integral(target.relations, carried) is None:
                raise InputError("matrix does not carry source relations into target relations")
        self.source = source
        self.target = target
        self.matrix = matrix

    @classmethod
    def zero(cls, source: FpModule, target: FpModule) -> "ModuleMap":
        return cls(source, target, Matrix.zeros(source.ring, target.gens, source.gens))

    @classmethod
    def identity(cls, m: FpModule) -> "ModuleMap":
        return cls(m, m, Matrix.identity(m.ring, m.gens))

    def __repr__(self) -> str:
        return f"ModuleMap({self.source!r} -> {self.target!r})"

    def compose(self, inner: "ModuleMap") -> "ModuleMap":
        """self after inner (usual composition order)."""
        if inner.target != self.source:
            raise InputError("composition mismatch")
        return ModuleMap(inner.source, self.target, self.matrix @ inner.matrix)

    # -- exactness primitives ---------------------------------------------

    def is_zero_map(self) -> bool:
        if self.matrix.is_zero():
            return True
        return solve_integral(self.target.relations, self.matrix) is not None

    def equals(self, other: "ModuleMap") -> bool:
        """Equality as maps of quotient modules, not of matrices."""
        if self.source != other.source or self.target != other.target:
            return False
        diff = self.matrix - other.matrix
        if diff.is_zero():
            return True
        return solve_integral(self.target.relations, diff) is not None

    def kernel(self) -> tuple[FpModule, "ModuleMap"]:
        """The kernel and its inclusion into the source."""
        p = _pullback(self.matrix, self.target.relations)
        ker = FpModule(self.source.ring, p.cols, _pullback(p, self.source.relations))
        return ker, ModuleMap(ker, self.source, p)

    def image(self) -> FpModule:
        """The image, presented on the images of the source generators."""
        p = _pullback(self.matrix, self.target.relations)
        return FpModule(self.source.ring, self.source.gens, p)

    def cokernel(self) -> FpModule:
        return FpModule(self.target.ring, self.target.gens,
                        hstack([self.target.relations, self.matrix]))

    def is_injective(self) -> bool:
        return self.kernel()[0].is_zero()

    def is_surjective(self) -> bool:
        return self.cokernel().is_zero()

    # -- fibers ---------------------------------------------------------------

    def fiber_rank(self, q: Prime) -> int:
        """Rank of the induced map kappa(q) tensor source -> kappa(q) tensor target."""
        b = self.target.relations
        return (rank_over_fiber(hstack([self.matrix, b]), q)
                - rank_over_fiber(b, q))

    def fiber_is_injective(self, q: Prime) -> bool:
        return self.fiber_rank(q) == self.source.fiber_dim(q)

    def fiber_is_isomorphism(self, q: Prime) -> bool:
        r = self.fiber_rank(q)
        return r == self.source.fiber_dim(q) == self.target.fiber_dim(q)


def kernel(f: ModuleMap) -> tuple[FpModule, ModuleMap]:
    return f.kernel()


def image(f: ModuleMap) -> FpModule:
    return f.image()


def cokernel(f: ModuleMap) -> FpModule:
    return f.cokernel()


# -- bad primes of matrices and modules --------------------------------------

def matrix_bad_primes(a: Matrix) -> set[int]:
    """Primes where the fiber rank of the matrix drops below the generic rank.

    These are exactly the primes dividing the last nonzero elementary
    divisor.  Supported over Z and Z_(p) (elsewhere the spectrum is finite
    and callers enumerate it directly).
    """
    ring = a.ring
    if ring.kind not in ("Z", "Zloc"):
        raise InputError(f"bad primes are not meaningful over {ring}")
    nonzero = [d for d in _snf_full(a).divisors if d != 0]
    if not nonzero:
        return set()
    last = nonzero[-1]
    if ring.kind == "Z":
        return set(factor_trial(abs(int(last)))) if abs(int(last)) > 1 else set()
    return {ring.param} if not ring.is_unit(last) else set()


def relevant_primes(ring: BaseRing, matrices: Sequence[Matrix]) -> list[Prime]:
    """The finite prime set sufficient to decide fiberwise statements:
    the generic point plus every prime where some given matrix drops rank
    (over Z / Z_(p)), or the entire finite spectrum otherwise."""
    if ring.kind in ("Z", "Zloc"):
        bad: set[int] = set()
        for a in matrices:
            bad |= matrix_bad_primes(a)
        return [GENERIC] + [Prime.at(p) for p in sorted(bad)]
    return list(ring.spectrum().primes)


def module_prime_set(m: FpModule) -> list[Prime]:
    return relevant_primes(m.ring, [m.relations])


def map_prime_set(f: ModuleMap) -> list[Prime]:
    mats = [f.source.relations, f.target.relations, f.matrix,
            hstack([f.matrix, f.target.relations])]
    return relevant_primes(f.source.ring, mats)


# -- flat modules in free coordinates -----------------------------------------

def _free_form(m: FpModule) -> tuple[int, Matrix, Matrix]:
    """(rank, to_free, from_free) for a flat module over a PID-like base.

    to_free @ from_free = identity, and to_free carries the relation span
    to zero, so the pair realizes an isomorphism M ~ R^rank.  Requires
    every elementary divisor of the relations to be a unit or zero.
    """
    full = _snf_full(m.relations)
    ring = m.ring
    free_idx = []
    for i in range(m.gens):
        d = full.divisors[i] if i < len(full.divisors) else None
        if d is None or d == 0:
            free_idx.append(i)
        elif not ring.is_unit(d):
            raise InputError("module is not free over this base; cannot take free coordinates")
    to_free = full.Ui.submatrix(free_idx, range(m.gens))
    from_free = full.U.submatrix(range(m.gens), free_idx)
    return len(free_idx), to_free, from_free


def _pure_by_divisors(f: ModuleMap) -> bool:
    """Purity via unit elementary divisors in free coordinates.

    Over Z, Z_(p), fields, and Z/p^e (where flat f.p. modules are free)
    the map is pure iff its free-coordinate matrix has full column count
    of unit divisors.  Composite Z/n splits into p-primary components
    first (CRT), and the criterion is applied per component.
    """
    ring = f.source.ring
    if ring.kind == "Zmod":
        factors = factor_trial(ring.param)
        if len(factors) > 1:
            results = []
            for p, e in sorted(factors.items()):
                comp = integers_mod(p ** e)
                src = FpModule(comp, f.source.gens,
                               Matrix(comp, f.source.relations.to_rows(),
                                      cols=f.source.relations.cols))
                tgt = FpModule(comp, f.target.gens,
                               Matrix(comp, f.target.relations.to_rows(),
                                      cols=f.target.relations.cols))
                comp_map = ModuleMap(src, tgt, Matrix(comp, f.matrix.to_rows(),
                                                      cols=f.matrix.cols))
                results.append(_pure_free_case(comp_map))
            return all(results)
    return _pure_free_case(f)


def _pure_free_case(f: ModuleMap) -> bool:
    rank_src, to_free_s, from_free_s = _free_form(f.source)
    rank_tgt, to_free_t, from_free_t = _free_form(f.target)
    g = to_free_t @ f.matrix @ from_free_s
    divisors = snf(g).elementary_divisors
    ring = f.source.ring
    return len(divisors) == rank_src and all(ring.is_unit(d) for d in divisors)


@dataclass(frozen=True)
class PurityReport:
    """Three provably equivalent purity conditions, all computed."""

    injective_with_flat_cokernel: bool
    pure: bool
    fiberwise_injective: bool
    checked_primes: tuple[Prime, ...]

    @property
    def verdict(self) -> bool:
        return self.pure


def purity_report(f: ModuleMap) -> PurityReport:
    """Evaluate all three purity conditions for a map of flat modules.

    Raises ContradictionError if the routes disagree: the supported
    equivalence theorem makes that an implementation bug by definition.
    """
    if not (f.source.is_flat() and f.target.is_flat()):
        raise InputError("purity_report requires flat source and target")
    c1 = f.is_injective() and f.cokernel().is_flat()
    c2 = _pure_by_divisors(f)
    primes = tuple(map_prime_set(f))
    c3 = all(f.fiber_is_injective(q) for q in primes)
    if not (c1 == c2 == c3):
        raise ContradictionError(
            f"purity routes disagree: injective+flat-coker={c1}, "
            f"unit-divisors={c2}, fiberwise-injective={c3}")
    return PurityReport(c1, c2, c3, primes)


# -- free resolutions ---------------------------------------------------------

@dataclass
class Resolution:
    """A free resolution together with the augmentation onto the module.

    complex has free terms in degrees [0, length]; augmentation maps the
    degree-0 term onto the module and identifies H_0 with it.
    """

    complex: "BoundedComplex"
    augmentation: ModuleMap
    module: FpModule
    depth: int

    def boundary_matrix(self, i: int) -> Matrix:
        cx = self.complex
        if i <= cx.lo or i > cx.hi:
            lower = cx.term(i - 1).gens if i - 1 >= cx.lo else 0
            upper = cx.term(i).gens if i <= cx.hi else 0
            return Matrix.zeros(self.module.ring, lower, upper)
        return cx.boundary(i).matrix

    def term_rank(self, i: int) -> int:
        cx = self.complex
        return cx.term(i).gens if cx.lo <= i <= cx.hi else 0


def free_resolution(m: FpModule, depth: int) -> Resolution:
    """A free resolution, exact in degrees (0, depth], built on the
    canonical invariant-factor presentation.

    Over Z, Z_(p), and fields the resolution stops at length <= 1 (the
    canonical relations are injective).  Over Z/n syzygies are iterated up
    to the requested depth; ranks stay bounded by the torsion count.

    >>> from fiberflat.rings import ZZ, integers_mod
    >>> free_resolution(FpModule.cyclic(ZZ, 2), 3).complex.hi
    1
    >>> r = free_resolution(FpModule.cyclic(integers_mod(4), 2), 3)
    >>> [r.boundary_matrix(i).to_rows() for i in (1, 2, 3)]
    [[[2]], [[2]], [[2]]]
    """
    from .complexes import BoundedComplex

    if depth < 1:
        raise InputError("resolution depth must be >= 1")
    ring = m.ring
    full = _snf_full(m.relations)
    kept: list[int] = []
    torsion_of: dict[int, Scalar] = {}
    for i in range(m.gens):
        d = full.divisors[i] if i < len(full.divisors) else None
        if d is None or d == 0:
            kept.append(i)
            continue
        if ring.kind == "Zmod":
            e = gcd(int(d), ring.param)
            if e == ring.param:
                kept.append(i)
            elif e > 1:
                kept.append(i)
                torsion_of[i] = e
        elif not ring.is_unit(d):
            kept.append(i)
            torsion_of[i] = d
    g0 = len(kept)
    eps_matrix = full.U.submatrix(range(m.gens), kept)
    torsion_pos = [k for k, idx in enumerate(kept) if idx in torsion_of]
    t = len(torsion_pos)
    d1_body = [[ring.zero] * t for _ in range(g0)]
    for col, pos in enumerate(torsion_pos):
        d1_body[pos][col] = ring.canon(torsion_of[kept[pos]])
    d1 = Matrix(ring, d1_body, cols=t, _canon=False)

    boundaries: list[Matrix] = []
    if t:
        boundaries.append(d1)
        if ring.kind == "Zmod":
            current = d1
            while len(boundaries) < depth:
                nxt = syzygy_matrix(current)
                if nxt.cols == 0:
                    break
                boundaries.append(nxt)
                current = nxt
    terms = {0: FpModule.free(ring, g0)}
    for j, mat in enumerate(boundaries, start=1):
        terms[j] = FpModule.free(ring, mat.cols)
    hi = len(boundaries)
    bmaps = {j: ModuleMap(terms[j], terms[j - 1], mat)
             for j, mat in enumerate(boundaries, start=1)}
    cx = BoundedComplex(ring, 0, hi, terms, bmaps)
    aug = ModuleMap(terms[0], m, eps_matrix)
    return Resolution(cx, aug, m, depth)


def tor_fiber(m: FpModule, q: Prime, i: int, depth: int) -> int:
    """dim over kappa(q) of Tor_i(kappa(q), M), from a fibered resolution.

    The rank of each reduced boundary is counted through the elementary
    divisors; ext_fiber recomputes the same number through transposed
    Gaussian elimination, and the two are compared in tests and criteria.

    >>> from fiberflat.rings import ZZ, Prime
    >>> tor_fiber(FpModule.cyclic(ZZ, 2), Prime.at(2), 1, 2)
    1
    >>> tor_fiber(FpModule.cyclic(ZZ, 2), Prime.at(3), 1, 2)
    0
    """
    if depth < 1 or not 0 <= i < depth:
        raise InputError(f"degree {i} needs resolution depth > {i}, got {depth}")
    res = free_resolution(m, depth)
    r_i = res.term_rank(i)
    rank_in = rank_over_fiber(res.boundary_matrix(i), q) if i >= 1 else 0
    rank_out = rank_over_fiber(res.boundary_matrix(i + 1), q)
    return r_i - rank_in - rank_out


def ext_fiber(m: FpModule, q: Prime, i: int, depth: int) -> int:
    """dim over kappa(q) of Ext^i(M, kappa(q)): cohomology of the dual of
    the fibered resolution, computed independently of tor_fiber."""
    if depth < 1 or not 0 <= i < depth:
        raise InputError(f"degree {i} needs resolution depth > {i}, got {depth}")
    res = free_resolution(m, depth)
    r_i = res.term_rank(i)
    delta_out = reduce_matrix(res.boundary_matrix(i + 1), q).transpose()
    rank_out = field_rank(delta_out)
    if i >= 1:
        delta_in = reduce_matrix(res.boundary_matrix(i), q).transpose()
        rank_in = field_rank(delta_in)
    else:
        rank_in = 0
    return r_i - rank_out - rank_in


def lift_to_resolutions(f: ModuleMap, depth: int) -> tuple[Resolution, Resolution, list[Matrix]]:
    """Lift a module map to a chain map between free resolutions.

    Returns (source resolution, target resolution, [phi_0, ..., phi_depth])
    with epsN @ phi_0 = f @ epsM and dN_j @ phi_j = phi_{j-1} @ dM_j.
    """
    res_m = free_resolution(f.source, depth)
    res_n = free_resolution(f.target, depth)
    ring = f.source.ring
    eps_n = res_n.augmentation.matrix
    target_rels = f.target.relations
    sol = solve_integral(hstack([eps_n, target_rels]),
                         f.matrix @ res_m.augmentation.matrix)
    if sol is None:
        raise ContradictionError("augmentation is not surjective; resolution bug")
    phis = [sol.submatrix(range(res_n.term_rank(0)), range(sol.cols))]
    for j in range(1, depth + 1):
        rm, rn = res_m.term_rank(j), res_n.term_rank(j)
        rhs = phis[j - 1] @ res_m.boundary_matrix(j)
        if rn == 0:
            if not rhs.is_zero():
                raise ContradictionError("chain lift obstructed; resolution bug")
            phis.append(Matrix.zeros(ring, 0, rm))
            continue
        lifted = solve_integral(res_n.boundary_matrix(j), rhs)
        if lifted is None:
            raise ContradictionError("chain lift obstructed; resolution bug")
        phis.append(lifted)
    return res_m, res_n, phis


# -- Tor/Ext-style flatness wrappers ------------------------------------------

def is_flat(m: FpModule) -> bool:
    return m.is_flat()


# -- prime filtrations ---------------------------------------------------------

@dataclass(frozen=True)
class PrimeFiltration:
    """0 = M_0 < M_1 < ... < M_r = M with prime cyclic quotients.

    Stages are abstract canonical presentations; step k records the stage
    module M_k and the prime q with M_k / M_{k-1} ~ R/q.
    """

    module: FpModule
    steps: tuple[tuple[FpModule, Prime], ...]

    def quotient_primes(self) -> tuple[Prime, ...]:
        return tuple(q for _, q in self.steps)


def prime_filtration(m: FpModule) -> PrimeFiltration:
    """A finite filtration with quotients R/p (torsion first, primes
    ascending inside each invariant factor, free steps R/(0) last).

    >>> from fiberflat.rings import ZZ
    >>> [q.literal() for q in prime_filtration(FpModule.cyclic(ZZ, 6)).quotient_primes()]
    ['2', '3']
    """
    ring = m.ring
    if ring.kind not in ("Z", "Zloc"):
        raise InputError(f"prime filtrations are implemented over Z and Z_(p), not {ring}")
    inv = m.invariant_factors()
    steps: list[tuple[FpModule, Prime]] = []
    completed: list[Scalar] = []

    def stage(partial: Scalar | None, free_count: int) -> FpModule:
        entries = completed + ([partial] if partial is not None else [])
        rel = Matrix.diagonal(ring, entries, m=len(entries) + free_count,
                              n=len(entries))
        return FpModule(ring, len(entries) + free_count, rel)

    for d in inv.torsion:
        if ring.kind == "Z":
            fac = factor_trial(int(d))
        else:
            fac = {ring.param: ring.valuation(d)}
        partial: Scalar = ring.one
        for p in sorted(fac):
            for _ in range(fac[p]):
                partial = ring.canon(Fraction(partial) * p) if ring.uses_fractions \
                    else partial * p
                steps.append((stage(partial, 0), Prime.at(p)))
        completed.append(d)
    for j in range(1, inv.free_rank + 1):
        steps.append((stage(None, j), GENERIC))
    return PrimeFiltration(m, tuple(steps))
