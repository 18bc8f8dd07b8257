"""Executable criteria: fiberwise hypotheses checked against finitely
many primes, with every conclusion recomputed by an independent route.

The load-bearing fact used throughout: a matrix over Z or Z_(p) drops
rank modulo p exactly when p divides its last nonzero elementary
divisor, so "for every prime" statements reduce to the generic point
plus the finitely many divisors of that entry.  bad_primes computes the
set; its soundness is a tested invariant, not an assumption.

Whenever one of the provably equivalent routes disagrees with another,
the checker raises ContradictionError instead of picking a side.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .complexes import (
    BoundedComplex, HomotopyCertificate, null_homotopy, tensor_with_module,
    total_tensor,
)
from .errors import ContradictionError, InputError
from .linalg import Matrix, hstack
from .modules import (
    FpModule, ModuleMap, PurityReport, matrix_bad_primes, purity_report,
    map_prime_set, module_prime_set, tor_fiber, ext_fiber,
)
from .rings import BaseRing, GENERIC, Prime, factor_trial


@dataclass(frozen=True)
class BadPrimeSet:
    """Primes where some boundary matrix drops fiber rank, with witnesses.

    witness maps each prime to the degrees of the offending boundaries.
    For any prime outside the set, every boundary has its generic rank.
    """

    ring: BaseRing
    primes: tuple[Prime, ...]
    witness: dict[int, tuple[int, ...]]

    def with_generic(self) -> tuple[Prime, ...]:
        return (GENERIC,) + self.primes


def bad_primes(cx: BoundedComplex) -> BadPrimeSet:
    """Primes dividing the last nonzero elementary divisor of any
    boundary matrix of a free-term complex over Z or Z_(p).

    >>> from fiberflat.rings import ZZ
    >>> from fiberflat.complexes import koszul_complex
    >>> [p.literal() for p in bad_primes(koszul_complex(ZZ, [6])).primes]
    ['2', '3']
    """
    if cx.ring.kind not in ("Z", "Zloc"):
        raise InputError(f"bad primes are enumerable over Z and Z_(p), not {cx.ring}")
    if not cx.is_free():
        raise InputError("bad_primes expects free terms")
    witness: dict[int, list[int]] = {}
    for i in range(cx.lo + 1, cx.hi + 1):
        for p in sorted(matrix_bad_primes(cx.boundary(i).matrix)):
            witness.setdefault(p, []).append(i)
    primes = tuple(Prime.at(p) for p in sorted(witness))
    return BadPrimeSet(cx.ring, primes, {p: tuple(v) for p, v in sorted(witness.items())})


def complex_prime_set(cx: BoundedComplex) -> list[Prime]:
    """Primes sufficient to decide fiberwise statements about cx: the
    generic point plus rank-drop primes (Z, Z_(p)), or the full finite
    spectrum (Z/n), or just the generic point (fields)."""
    ring = cx.ring
    if ring.kind in ("Z", "Zloc"):
        bad: set[int] = set()
        for i in range(cx.lo + 1, cx.hi + 1):
            f = cx.boundary(i).matrix
            a_below = cx.term(i - 1).relations
            bad |= matrix_bad_primes(f)
            bad |= matrix_bad_primes(hstack([f, a_below]))
        for i in cx.degrees():
            bad |= matrix_bad_primes(cx.term(i).relations)
        return [GENERIC] + [Prime.at(p) for p in sorted(bad)]
    return list(ring.spectrum().primes)


def standard_module_family(ring: BaseRing, extra_primes: tuple[int, ...] = ()) -> list[FpModule]:
    """The fixed tensor test family, adapted to the base ring.

    Over Z: Z/2, Z/3, Z/4, Z/6, Z^2, plus residue fields Z/p of any
    extra (bad) primes.  Over Z_(p): R/p, R/p^2, R^2.  Over Z/n: R/p per
    prime p | n, plus R^2.  Over fields: R^2.
    """
    if ring.kind == "Z":
        torsion = [2, 3, 4, 6] + [p for p in sorted(extra_primes) if p not in (2, 3)]
        family = [FpModule.cyclic(ring, d) for d in torsion]
        family.append(FpModule.free(ring, 2))
        return family
    if ring.kind == "Zloc":
        p = ring.param
        return [FpModule.cyclic(ring, p), FpModule.cyclic(ring, p * p),
                FpModule.free(ring, 2)]
    if ring.kind == "Zmod":
        family = [FpModule.cyclic(ring, p) for p in sorted(factor_trial(ring.param))]
        family.append(FpModule.free(ring, 2))
        return family
    return [FpModule.free(ring, 2)]


def standard_complex_family(ring: BaseRing, extra_primes: tuple[int, ...] = ()) -> list[BoundedComplex]:
    """Small complexes G used to sample 'G tensor C stays exact': the
    one-term free complex plus two-term multiplication complexes."""
    family = [BoundedComplex.free_complex(ring, 0, [1], [])]
    if ring.kind == "Z":
        scalars = sorted({2, 3} | set(extra_primes))
    elif ring.kind == "Zloc":
        scalars = [ring.param]
    elif ring.kind == "Zmod":
        scalars = sorted(factor_trial(ring.param))
    else:
        scalars = []
    for s in scalars:
        family.append(BoundedComplex.free_complex(
            ring, 0, [1, 1], [Matrix(ring, [[s]])]))
    return family


def _fiber_profiles(cx: BoundedComplex, primes: list[Prime],
                    max_workers: int | None = None) -> dict[Prime, dict[int, int]]:
    if max_workers and max_workers > 1 and len(primes) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            profiles = list(pool.map(lambda q: cx.fiber_profile(q).dims, primes))
        return dict(zip(primes, profiles))
    return {q: cx.fiber_profile(q).dims for q in primes}


@dataclass(frozen=True)
class TheoremReport:
    """Verdict of the fiberwise-acyclicity criterion on one complex.

    hypothesis_holds: the fibers at every checked prime have vanishing
    homology in all positive degrees.  The three conclusion fields are
    always computed; verdict is "VIOLATION" only when the hypothesis
    holds and some conclusion fails, which falsifies the implementation.
    """

    hypothesis_holds: bool
    checked_primes: tuple[Prime, ...]
    fiber_dims: dict[Prime, dict[int, int]]
    conclusion_acyclic: bool
    conclusion_h0_flat: bool
    tensor_family_acyclic: bool
    h0: FpModule
    verdict: str

    @property
    def consistent(self) -> bool:
        return self.verdict == "consistent"


def check_main_theorem(cx: BoundedComplex,
                       family: list[FpModule] | None = None,
                       max_workers: int | None = None) -> TheoremReport:
    """Check the central criterion on a nonnegative complex of flat terms.

    Hypothesis: every fiber has zero homology in degrees > 0.  When it
    holds, three conclusions are recomputed over the ring itself: the
    complex is acyclic away from degree 0, H_0 is flat, and M tensor C
    stays acyclic for the whole test-module family.

    >>> from fiberflat.rings import ZZ
    >>> cx = BoundedComplex.free_complex(ZZ, 0, [2, 1], [Matrix(ZZ, [[1], [-1]])])
    >>> check_main_theorem(cx).verdict
    'consistent'
    """
    if cx.lo < 0:
        raise InputError("criterion expects complexes concentrated in degrees >= 0")
    for i in cx.degrees():
        if not cx.term(i).is_flat():
            raise InputError(f"term in degree {i} is not flat")
    primes = complex_prime_set(cx)
    dims = _fiber_profiles(cx, primes, max_workers)
    hypothesis = all(d == 0 for prof in dims.values()
                     for deg, d in prof.items() if deg > 0)
    conclusion_acyclic = all(cx.homology(i).is_zero() for i in cx.degrees() if i > 0)
    h0 = cx.homology(0)
    conclusion_h0_flat = h0.is_flat()
    if family is None:
        extra = tuple(p.p for p in primes if p.p is not None)
        family = standard_module_family(cx.ring, extra)
    tensor_ok = True
    for m in family:
        mc = tensor_with_module(m, cx)
        if not all(mc.homology(i).is_zero() for i in mc.degrees() if i > 0):
            tensor_ok = False
            break
    if hypothesis and not (conclusion_acyclic and conclusion_h0_flat and tensor_ok):
        verdict = "VIOLATION"
    else:
        verdict = "consistent"
    return TheoremReport(hypothesis, tuple(primes), dims, conclusion_acyclic,
                         conclusion_h0_flat, tensor_ok, h0, verdict)


@dataclass(frozen=True)
class UniversalExactnessReport:
    """Three routes to 'C stays exact under every tensor', all computed."""

    direct: bool
    fiberwise: bool
    tensor_sampled: bool
    checked_primes: tuple[Prime, ...]

    @property
    def verdict(self) -> bool:
        return self.direct


def is_universally_exact(cx: BoundedComplex) -> UniversalExactnessReport:
    """Decide universal exactness three ways and insist they agree.

    Route 1: exact over the ring and every boundary image flat.  Route 2:
    exact on every fiber.  Route 3: total tensor against the standard
    small-complex family stays exact.  For bounded complexes of flat
    terms over the supported rings these are equivalent; disagreement
    raises ContradictionError.
    """
    for i in cx.degrees():
        if not cx.term(i).is_flat():
            raise InputError(f"term in degree {i} is not flat")
    direct = all(cx.homology(i).is_zero() for i in cx.degrees())
    if direct:
        for i in range(cx.lo + 1, cx.hi + 1):
            if not cx.boundary(i).image().is_flat():
                direct = False
                break
    primes = complex_prime_set(cx)
    fiberwise = all(cx.is_fiber_exact(q) for q in primes)
    extra = tuple(p.p for p in primes if p.p is not None)
    sampled = True
    for g in standard_complex_family(cx.ring, extra):
        if not total_tensor(g, cx).is_exact():
            sampled = False
            break
    if not (direct == fiberwise == sampled):
        raise ContradictionError(
            f"universal exactness routes disagree: direct={direct}, "
            f"fiberwise={fiberwise}, tensor-sampled={sampled}")
    return UniversalExactnessReport(direct, fiberwise, sampled, tuple(primes))


def check_map_criterion(f: ModuleMap) -> PurityReport:
    """The three-way purity equivalence as a verdict; see purity_report."""
    return purity_report(f)


def check_zero_criterion(m: FpModule) -> bool:
    """If a flat module has zero fiber at the generic point and at every
    bad prime of its presentation, it must be the zero module.

    Returns whether the vanishing hypothesis held; when it does, the
    conclusion m = 0 is asserted and a failure is fatal.
    """
    if not m.is_flat():
        raise InputError("zero criterion applies to flat modules")
    primes = module_prime_set(m)
    if any(m.fiber_dim(q) != 0 for q in primes):
        return False
    if not m.is_zero():
        raise ContradictionError("all fibers vanish but the module is nonzero")
    return True


def check_isom_criterion(f: ModuleMap) -> bool:
    """If a map of flat modules is an isomorphism on every fiber, it is
    an isomorphism.  Returns whether the fiberwise hypothesis held;
    when it does, kernel = 0 and cokernel = 0 are asserted fatally."""
    if not (f.source.is_flat() and f.target.is_flat()):
        raise InputError("isomorphism criterion applies to maps of flat modules")
    primes = map_prime_set(f)
    if not all(f.fiber_is_isomorphism(q) for q in primes):
        return False
    if not (f.is_injective() and f.is_surjective()):
        raise ContradictionError("fiberwise isomorphism but not an isomorphism")
    return True


@dataclass(frozen=True)
class FlatnessVerdict:
    """Outcome of the Tor- or Ext-vanishing flatness criterion.

    complete is False over Z/n, where only degrees up to checked_depth
    were examined (the ring has infinite global dimension); the verdict
    text carries the same qualifier.
    """

    functor: str
    positive_vanishing: bool
    vanishing_with_degree_zero: bool
    flat_confirmed: bool | None
    zero_confirmed: bool | None
    checked_primes: tuple[Prime, ...]
    checked_depth: int
    complete: bool

    def describe(self) -> str:
        scope = "complete" if self.complete else f"checked to depth {self.checked_depth}"
        if self.vanishing_with_degree_zero:
            return f"{self.functor} vanishing including degree 0 ({scope}): module is zero"
        if self.positive_vanishing:
            return f"{self.functor} vanishing in positive degrees ({scope}): module is flat"
        return f"{self.functor} does not vanish ({scope}): no claim"


def _vanishing_criterion(m: FpModule, depth: int, functor: str) -> FlatnessVerdict:
    if depth < 1:
        raise InputError("criterion depth must be >= 1")
    fiber_fn = tor_fiber if functor == "tor" else ext_fiber
    primes = module_prime_set(m)
    table = {(q, i): fiber_fn(m, q, i, depth + 1)
             for q in primes for i in range(depth + 1)}
    positive = all(v == 0 for (q, i), v in table.items() if i >= 1)
    with_zero = positive and all(v == 0 for (q, i), v in table.items() if i == 0)
    flat_confirmed: bool | None = None
    zero_confirmed: bool | None = None
    if positive:
        if not m.is_flat():
            raise ContradictionError(
                f"{functor} vanishes in positive degrees but the module is not flat")
        flat_confirmed = True
    if with_zero:
        if not m.is_zero():
            raise ContradictionError(
                f"{functor} vanishes in all degrees but the module is nonzero")
        zero_confirmed = True
    complete = m.ring.kind != "Zmod"
    return FlatnessVerdict(functor, positive, with_zero, flat_confirmed,
                           zero_confirmed, tuple(primes), depth, complete)


def tor_flatness_criterion(m: FpModule, depth: int = 1) -> FlatnessVerdict:
    """Tor_i(kappa(q), M) = 0 for 0 < i <= depth at every relevant prime
    forces flatness; vanishing including i = 0 forces M = 0.

    >>> from fiberflat.rings import ZZ
    >>> tor_flatness_criterion(FpModule.free(ZZ, 2)).flat_confirmed
    True
    """
    return _vanishing_criterion(m, depth, "tor")


def ext_flatness_criterion(m: FpModule, depth: int = 1) -> FlatnessVerdict:
    """Same decision through Ext^i(M, kappa(q)), computed independently."""
    return _vanishing_criterion(m, depth, "ext")


def certify_projective_corollary(cx: BoundedComplex) -> HomotopyCertificate:
    """For a free-term complex that is exact on every fiber, produce an
    explicit null homotopy.  The certificate must exist; failure to find
    one is fatal, not a negative answer.
    """
    if not cx.is_free():
        raise InputError("certification needs free terms")
    primes = complex_prime_set(cx)
    for q in primes:
        if not cx.is_fiber_exact(q):
            raise InputError(f"fiber at {q.literal()} is not exact; hypothesis fails")
    cert = null_homotopy(cx)
    if cert is None:
        raise ContradictionError("fiberwise exact but no homotopy found")
    return cert
