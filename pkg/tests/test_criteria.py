"""Verdict-level checks: the acyclicity criterion, universal exactness,
bad-prime enumeration, and the corollary checkers."""

import random

import pytest

from fiberflat.complexes import (
    BoundedComplex,
    koszul_complex,
    tensor_with_module,
)
from fiberflat.criteria import (
    bad_primes,
    certify_projective_corollary,
    check_isom_criterion,
    check_main_theorem,
    check_map_criterion,
    check_zero_criterion,
    complex_prime_set,
    ext_flatness_criterion,
    is_universally_exact,
    standard_complex_family,
    standard_module_family,
    tor_flatness_criterion,
)
from fiberflat.errors import InputError
from fiberflat.generate import random_complex
from fiberflat.linalg import Matrix
from fiberflat.modules import FpModule, ModuleMap
from fiberflat.rings import GENERIC, Prime, ZZ, integers_mod, localized_at, prime_field, rationals

Z12 = integers_mod(12)


def two_term(ring, rows, ranks):
    return BoundedComplex.free_complex(
        ring, 0, ranks, [Matrix(ring, rows, cols=ranks[1])])


def times(ring, s):
    return two_term(ring, [[s]], [1, 1])


# The three-term exact complex R -> R^2 -> R with boundaries [1,-1]^T and
# [1,1]; every homology group vanishes and both boundary images are free.
def exact_three_term(ring=ZZ):
    return BoundedComplex.free_complex(
        ring, 0, [1, 2, 1],
        [Matrix(ring, [[1, 1]]), Matrix(ring, [[1], [-1]])])


# -- the acyclicity criterion --------------------------------------------------

def test_main_theorem_split_injection():
    cx = BoundedComplex.free_complex(ZZ, 0, [2, 1], [Matrix(ZZ, [[1], [-1]])])
    rep = check_main_theorem(cx)
    assert rep.hypothesis_holds
    assert rep.verdict == "consistent" and rep.consistent
    assert rep.conclusion_acyclic
    assert rep.conclusion_h0_flat
    assert rep.tensor_family_acyclic
    # H_0 = Z^2 / (1,-1) is free of rank one
    assert rep.h0.invariant_factors().free_rank == 1
    assert rep.h0.invariant_factors().torsion == ()
    assert rep.checked_primes[0] == GENERIC


def test_main_theorem_multiplication_by_two():
    rep = check_main_theorem(times(ZZ, 2))
    assert not rep.hypothesis_holds
    # hypothesis failure is not a violation; the report simply records it
    assert rep.verdict == "consistent"
    assert rep.fiber_dims[Prime.at(2)] == {0: 1, 1: 1}
    assert rep.fiber_dims[GENERIC] == {0: 0, 1: 0}
    assert not rep.conclusion_h0_flat


def test_main_theorem_zero_complex():
    rep = check_main_theorem(BoundedComplex.free_complex(ZZ, 0, [0], []))
    assert rep.hypothesis_holds
    assert rep.verdict == "consistent"
    assert rep.h0.is_zero()
    assert rep.conclusion_h0_flat


def test_main_theorem_rejects_bad_input():
    from fiberflat.complexes import shift
    cx = times(ZZ, 2)
    with pytest.raises(InputError):
        check_main_theorem(shift(cx, -1))  # now lives in degrees [-1, 0]
    with pytest.raises(InputError):
        check_main_theorem(BoundedComplex.single(FpModule.cyclic(ZZ, 4)))


def test_main_theorem_custom_family_and_parallel():
    cx = exact_three_term()
    serial = check_main_theorem(cx)
    threaded = check_main_theorem(cx, max_workers=4)
    assert serial.verdict == threaded.verdict == "consistent"
    assert serial.fiber_dims == threaded.fiber_dims
    assert serial.checked_primes == threaded.checked_primes
    # a deliberately tiny family still exercises the tensor conclusion
    rep = check_main_theorem(cx, family=[FpModule.cyclic(ZZ, 2)])
    assert rep.tensor_family_acyclic


def test_main_theorem_never_violated_on_generated_instances():
    rng = random.Random(20260814)
    for k in range(60):
        pop = ("hypothesis-true", "hypothesis-false", "contractible")[k % 3]
        spec = random_complex(rng, max_len=4, max_rank=4, entry_bound=6,
                              population=pop)
        rep = check_main_theorem(spec.complex)
        assert rep.verdict == "consistent"
        if spec.hypothesis_true_by_construction:
            assert rep.hypothesis_holds
        else:
            assert not rep.hypothesis_holds


def test_main_theorem_monotone_in_tensor_family():
    # if the criterion accepts C it must keep accepting M (x) C
    rng = random.Random(7)
    specs = [random_complex(rng, max_len=4, max_rank=3, entry_bound=5)
             for _ in range(6)]
    for spec in specs:
        assert check_main_theorem(spec.complex).hypothesis_holds
        for m in standard_module_family(ZZ):
            mc = tensor_with_module(m, spec.complex)
            assert all(mc.homology(i).is_zero()
                       for i in mc.degrees() if i > 0)


# -- universal exactness -------------------------------------------------------

def test_universal_exactness_identity():
    rep = is_universally_exact(two_term(ZZ, [[1]], [1, 1]))
    assert rep.verdict
    assert rep.direct and rep.fiberwise and rep.tensor_sampled


def test_universal_exactness_times_two():
    rep = is_universally_exact(times(ZZ, 2))
    assert not rep.verdict
    assert not rep.direct and not rep.fiberwise and not rep.tensor_sampled
    assert Prime.at(2) in rep.checked_primes


def test_universal_exactness_three_term():
    assert is_universally_exact(exact_three_term()).verdict


def test_universal_exactness_rejects_nonflat_terms():
    with pytest.raises(InputError):
        is_universally_exact(BoundedComplex.single(FpModule.cyclic(ZZ, 6)))


def test_universal_exactness_matches_construction():
    rng = random.Random(99)
    for k in range(45):
        pop = ("contractible", "hypothesis-true", "hypothesis-false")[k % 3]
        spec = random_complex(rng, max_len=4, max_rank=3, entry_bound=5,
                              population=pop)
        rep = is_universally_exact(spec.complex)  # raises on route disagreement
        assert rep.direct == rep.fiberwise == rep.tensor_sampled
        if spec.contractible_by_construction:
            assert rep.verdict
        elif spec.torsion_scalars or spec.free_rank_degree0 > 0:
            assert not rep.verdict


# -- bad primes ----------------------------------------------------------------

def test_bad_primes_examples():
    bad = bad_primes(times(ZZ, 2))
    assert [p.literal() for p in bad.primes] == ["2"]
    assert bad.witness == {2: (1,)}
    assert bad.with_generic()[0] == GENERIC

    assert bad_primes(two_term(ZZ, [[1]], [1, 1])).primes == ()
    assert [p.literal() for p in bad_primes(koszul_complex(ZZ, [6])).primes] \
        == ["2", "3"]


def test_bad_primes_over_localization():
    z2 = localized_at(2)
    assert [p.literal() for p in bad_primes(times(z2, 2)).primes] == ["2"]
    # 3 is a unit in Z_(2), so the boundary is invertible there
    assert bad_primes(times(z2, 3)).primes == ()


def test_bad_primes_rejects_other_rings():
    for ring in (Z12, prime_field(5), rationals()):
        with pytest.raises(InputError):
            bad_primes(times(ring, 1))
    with pytest.raises(InputError):
        bad_primes(BoundedComplex.single(FpModule.cyclic(ZZ, 4)))


def test_bad_primes_soundness_outside_the_set():
    rng = random.Random(424242)
    candidates = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47,
                  53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101]
    for _ in range(12):
        pop = rng.choice(("hypothesis-true", "hypothesis-false"))
        spec = random_complex(rng, max_len=4, max_rank=4, entry_bound=8,
                              population=pop)
        cx = spec.complex
        inside = {p.p for p in bad_primes(cx).primes}
        outside = [p for p in candidates if p not in inside][:20]
        generic = cx.fiber_profile(GENERIC).dims
        for p in outside:
            assert cx.fiber_profile(Prime.at(p)).dims == generic


def test_complex_prime_set_contents():
    lits = [p.literal() for p in complex_prime_set(times(ZZ, 6))]
    assert lits == ["0", "2", "3"]
    # module terms contribute their presentation primes
    lits = [p.literal()
            for p in complex_prime_set(BoundedComplex.single(FpModule.cyclic(ZZ, 4)))]
    assert lits == ["0", "2"]
    assert [p.literal() for p in complex_prime_set(times(rationals(), 1))] == ["0"]
    assert [p.literal() for p in complex_prime_set(times(Z12, 5))] == ["2", "3"]


# -- corollary checkers --------------------------------------------------------

def test_map_criterion_identity_and_doubling():
    one = FpModule.free(ZZ, 1)
    rep = check_map_criterion(ModuleMap(one, one, Matrix(ZZ, [[1]])))
    assert rep.verdict
    assert rep.injective_with_flat_cokernel and rep.pure and rep.fiberwise_injective

    rep = check_map_criterion(ModuleMap(one, one, Matrix(ZZ, [[2]])))
    assert not rep.verdict
    assert not rep.injective_with_flat_cokernel
    assert not rep.pure and not rep.fiberwise_injective


def test_zero_criterion():
    assert check_zero_criterion(FpModule.free(ZZ, 0))
    # Z is flat with a one-dimensional generic fiber: hypothesis fails
    assert not check_zero_criterion(FpModule.free(ZZ, 1))
    with pytest.raises(InputError):
        check_zero_criterion(FpModule.cyclic(ZZ, 4))


def test_isom_criterion():
    two = FpModule.free(ZZ, 2)
    assert check_isom_criterion(ModuleMap(two, two, Matrix(ZZ, [[1, 1], [0, 1]])))
    one = FpModule.free(ZZ, 1)
    assert not check_isom_criterion(ModuleMap(one, one, Matrix(ZZ, [[2]])))
    # injective on fibers but never surjective: hypothesis fails cleanly
    assert not check_isom_criterion(ModuleMap(one, two, Matrix(ZZ, [[1], [0]])))
    with pytest.raises(InputError):
        check_isom_criterion(ModuleMap(FpModule.cyclic(ZZ, 4),
                                       FpModule.cyclic(ZZ, 4),
                                       Matrix(ZZ, [[1]])))


def test_flatness_criterion_flat_module():
    for crit in (tor_flatness_criterion, ext_flatness_criterion):
        v = crit(FpModule.free(ZZ, 2))
        assert v.positive_vanishing and v.flat_confirmed
        assert not v.vanishing_with_degree_zero and v.zero_confirmed is None
        assert v.complete
        assert "module is flat" in v.describe()


def test_flatness_criterion_zero_module():
    v = tor_flatness_criterion(FpModule.free(ZZ, 0), depth=2)
    assert v.vanishing_with_degree_zero and v.zero_confirmed
    assert "module is zero" in v.describe()


def test_flatness_criterion_torsion_module():
    for crit in (tor_flatness_criterion, ext_flatness_criterion):
        v = crit(FpModule.cyclic(ZZ, 2))
        assert not v.positive_vanishing
        assert v.flat_confirmed is None and v.zero_confirmed is None
        assert "no claim" in v.describe()
        assert Prime.at(2) in v.checked_primes


def test_flatness_criterion_depth_cap_over_zmod():
    v = tor_flatness_criterion(FpModule.free(Z12, 1), depth=3)
    assert v.flat_confirmed and not v.complete
    assert "checked to depth 3" in v.describe()
    with pytest.raises(InputError):
        tor_flatness_criterion(FpModule.free(ZZ, 1), depth=0)


def test_certify_projective_corollary_examples():
    ident = two_term(ZZ, [[1]], [1, 1])
    assert certify_projective_corollary(ident).verify()
    assert certify_projective_corollary(exact_three_term()).verify()
    with pytest.raises(InputError):
        certify_projective_corollary(times(ZZ, 2))
    with pytest.raises(InputError):
        certify_projective_corollary(BoundedComplex.single(FpModule.cyclic(ZZ, 4)))


def test_certify_projective_corollary_random_split():
    rng = random.Random(31337)
    for _ in range(20):
        spec = random_complex(rng, max_len=4, max_rank=4, entry_bound=6,
                              population="contractible")
        assert certify_projective_corollary(spec.complex).verify()


# -- standard test families ----------------------------------------------------

def test_standard_module_family_shapes():
    fam = standard_module_family(ZZ)
    assert len(fam) == 5
    torsion = [m.invariant_factors().torsion for m in fam[:4]]
    assert torsion == [(2,), (3,), (4,), (6,)]
    assert fam[-1].invariant_factors().free_rank == 2
    # bad primes outside {2, 3} get their residue field appended
    fam5 = standard_module_family(ZZ, extra_primes=(5,))
    assert any(m.invariant_factors().torsion == (5,) for m in fam5)

    zl = standard_module_family(localized_at(3))
    assert [m.invariant_factors().torsion for m in zl] == [(3,), (9,), ()]
    assert len(standard_module_family(Z12)) == 3
    assert len(standard_module_family(rationals())) == 1


def test_standard_complex_family_shapes():
    fam = standard_complex_family(ZZ)
    assert len(fam) == 3
    assert fam[0].is_free() and fam[0].lo == fam[0].hi == 0
    scalars = [int(cx.boundary(1).matrix[0, 0]) for cx in fam[1:]]
    assert scalars == [2, 3]
    assert len(standard_complex_family(ZZ, extra_primes=(7,))) == 4
    assert len(standard_complex_family(Z12)) == 3  # 12 = 2^2 * 3
    assert len(standard_complex_family(rationals())) == 1
