"""fiberflat: exact fiberwise acyclicity and flatness checks.

Bounded complexes of finitely presented flat modules over computable
noetherian rings (Z, Z/n, Z_(p), F_p, Q), with certified Smith normal
forms, Tor/Ext fiber dimensions, null-homotopy certificates, and tower
stabilization reports.  See the README for the CLI surface.
"""

from .errors import ContradictionError, InputError
from .rings import (
    GENERIC, BaseRing, Prime, ResidueField, SpectrumDescription, ZZ, QQ,
    integers, integers_mod, localized_at, parse_prime, parse_ring,
    prime_field, rationals,
)
from .linalg import (
    Matrix, SnfDecomposition, determinantal_divisors, det, field_nullspace,
    field_rank, rank, rank_over_fiber, reduce_matrix, snf, solve_integral,
    syzygy_matrix,
)
from .modules import (
    FpModule, InvariantFactors, ModuleMap, PrimeFiltration, PurityReport,
    Resolution, cokernel, ext_fiber, fiber_module, free_resolution, image,
    is_flat, kernel, lift_to_resolutions, map_prime_set, matrix_bad_primes,
    module_prime_set, prime_filtration, purity_report, tensor_modules,
    tor_fiber,
)
from .complexes import (
    BoundedComplex, ChainMap, FiberProfile, HomotopyCertificate, cone, dual,
    fiber_complex, koszul_complex, koszul_selfduality, null_homotopy, shift,
    tensor_with_module, total_tensor, truncate_geq,
)
from .criteria import (
    BadPrimeSet, FlatnessVerdict, TheoremReport, UniversalExactnessReport,
    bad_primes, certify_projective_corollary, check_isom_criterion,
    check_main_theorem, check_map_criterion, check_zero_criterion,
    complex_prime_set, ext_flatness_criterion, is_universally_exact,
    standard_complex_family, standard_module_family, tor_flatness_criterion,
)
from .generate import ComplexSpecimen, random_complex, random_fp_module, random_unimodular
from .towers import (
    DEFAULT_MAX_STAGE, DEFAULT_WINDOW, GalleryReport, GalleryRow,
    NotFinitelyGeneratedVerdict, StabilizationReport, TowerComplex,
    TowerModule, dvr_fraction_field_tower, gallery, injective_hull_tower,
    sum_inverse_primes_tower, tower_complex_homology_fiber, tower_fiber,
    tower_not_finitely_generated, tower_tor,
)

__version__ = "0.1.0"
