"""Ring layer: literals, arithmetic, residue fields, spectra."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from fiberflat.errors import InputError
from fiberflat.linalg import Matrix, rank_over_fiber, reduce_matrix
from fiberflat.rings import (
    GENERIC, Prime, QQ, ZZ, integers_mod, localized_at, parse_prime,
    parse_ring, parse_scalar, prime_field, render_scalar,
)

from _oracles import fraction_rank, modp_rank


@pytest.mark.parametrize("literal", ["Z", "Q", "Z/12", "Z/7", "Zloc/5", "F3"])
def test_ring_literal_round_trip(literal):
    assert parse_ring(literal).literal() == literal


@pytest.mark.parametrize("literal", [
    "Z/1", "Z/0", "Z/-4", "F4", "F1", "Zloc/6", "Zloc/1", "Zp", "Q/2", "", "z",
])
def test_bad_ring_literals_rejected(literal):
    with pytest.raises(InputError):
        parse_ring(literal)


def test_zero_ring_rejected_at_construction():
    with pytest.raises(InputError):
        integers_mod(1)
    with pytest.raises(InputError):
        localized_at(9)
    with pytest.raises(InputError):
        prime_field(10)


def test_spectrum_sizes_match_distinct_prime_counts():
    # omega(n) points for Z/n; a DVR has two; fields have one.
    assert len(integers_mod(12).spectrum().enumerate()) == 2
    assert len(integers_mod(30).spectrum().enumerate()) == 3
    assert len(integers_mod(8).spectrum().enumerate()) == 1
    assert len(localized_at(5).spectrum().enumerate()) == 2
    assert len(prime_field(7).spectrum().enumerate()) == 1
    assert len(QQ.spectrum().enumerate()) == 1
    assert not ZZ.spectrum().finite


def test_spectrum_membership():
    assert ZZ.admits(GENERIC) and ZZ.admits(Prime.at(97))
    assert localized_at(3).admits(Prime.at(3))
    assert not localized_at(3).admits(Prime.at(5))
    assert integers_mod(12).admits(Prime.at(2))
    assert not integers_mod(12).admits(Prime.at(5))
    assert not integers_mod(12).admits(GENERIC)


def test_residue_fields():
    assert ZZ.residue_field(Prime.at(5)).field.literal() == "F5"
    assert ZZ.residue_field(GENERIC).field.literal() == "Q"
    assert localized_at(5).residue_field(GENERIC).field.literal() == "Q"
    assert localized_at(5).residue_field(Prime.at(5)).field.literal() == "F5"
    assert integers_mod(12).residue_field(Prime.at(3)).field.literal() == "F3"
    assert prime_field(7).residue_field(GENERIC).field.literal() == "F7"
    with pytest.raises(InputError):
        ZZ.residue_field(Prime.at(6))


def test_residue_reduction_values():
    assert ZZ.residue_field(Prime.at(5)).reduce(7) == 2
    assert ZZ.residue_field(GENERIC).reduce(7) == Fraction(7)
    # 7/2 at (3): 2 is a unit, inverse 2, so 7*2 = 14 = 2 mod 3.
    assert localized_at(3).residue_field(Prime.at(3)).reduce(Fraction(7, 2)) == 2
    assert integers_mod(12).residue_field(Prime.at(2)).reduce(7) == 1


def test_generic_prime_ordering_and_literals():
    primes = [Prime.at(5), GENERIC, Prime.at(2)]
    ordered = sorted(primes, key=lambda q: q.sort_key())
    assert [q.literal() for q in ordered] == ["0", "2", "5"]
    assert parse_prime("0") == GENERIC
    assert parse_prime("11") == Prime.at(11)
    with pytest.raises(InputError):
        parse_prime("x")


def test_canonical_representatives():
    assert integers_mod(6).canon(-1) == 5
    assert ZZ.canon(-3) == -3
    assert localized_at(3).canon(Fraction(4, 2)) == Fraction(2)
    with pytest.raises(InputError):
        localized_at(3).canon(Fraction(1, 3))
    with pytest.raises(InputError):
        integers_mod(6).canon(Fraction(1, 2))


def test_units():
    assert ZZ.is_unit(-1) and not ZZ.is_unit(2) and not ZZ.is_unit(0)
    assert integers_mod(12).is_unit(5) and not integers_mod(12).is_unit(4)
    assert localized_at(3).is_unit(Fraction(2, 5)) and not localized_at(3).is_unit(Fraction(3))
    assert QQ.is_unit(Fraction(-7, 2)) and not QQ.is_unit(Fraction(0))
    assert prime_field(5).is_unit(3) and not prime_field(5).is_unit(0)


def test_valuation():
    assert localized_at(2).valuation(Fraction(12, 5)) == 2
    assert localized_at(2).valuation(Fraction(0)) is None
    assert ZZ.valuation(40, 2) == 3
    assert ZZ.valuation(40, 3) == 0


def test_try_divide():
    assert ZZ.try_divide(6, 2) == 3
    assert ZZ.try_divide(6, 4) is None
    # 2y = 6 mod 12 has solutions {3, 9}; the canonical answer is the least.
    assert integers_mod(12).try_divide(6, 2) == 3
    assert integers_mod(12).try_divide(5, 2) is None
    assert localized_at(3).try_divide(Fraction(3), Fraction(9)) is None
    assert localized_at(3).try_divide(Fraction(9), Fraction(3)) == 3
    assert QQ.try_divide(Fraction(1), Fraction(3)) == Fraction(1, 3)


def test_scalar_parse_render_round_trip():
    assert parse_scalar(ZZ, -4) == -4
    assert parse_scalar(localized_at(3), "7/2") == Fraction(7, 2)
    assert render_scalar(Fraction(7, 2)) == "7/2"
    assert render_scalar(Fraction(4)) == 4
    assert render_scalar(-4) == -4
    with pytest.raises(InputError):
        parse_scalar(ZZ, True)
    with pytest.raises(InputError):
        parse_scalar(ZZ, "2/0")
    with pytest.raises(InputError):
        parse_scalar(integers_mod(6), "1/2")


small_int = st.integers(min_value=-9, max_value=9)


@st.composite
def int_matrix_pair(draw):
    m = draw(st.integers(min_value=1, max_value=4))
    k = draw(st.integers(min_value=1, max_value=4))
    n = draw(st.integers(min_value=1, max_value=4))
    a = [[draw(small_int) for _ in range(k)] for _ in range(m)]
    b = [[draw(small_int) for _ in range(n)] for _ in range(k)]
    return a, b


@given(int_matrix_pair(), st.sampled_from([None, 2, 3, 5]))
def test_reduce_matrix_is_multiplicative(pair, p):
    a_rows, b_rows = pair
    q = GENERIC if p is None else Prime.at(p)
    a = Matrix(ZZ, a_rows)
    b = Matrix(ZZ, b_rows)
    assert reduce_matrix(a @ b, q) == reduce_matrix(a, q) @ reduce_matrix(b, q)


@given(int_matrix_pair(), st.sampled_from([None, 2, 3, 5]))
def test_rank_over_fiber_matches_reduced_gaussian_rank(pair, p):
    a_rows, _ = pair
    a = Matrix(ZZ, a_rows)
    if p is None:
        expected = fraction_rank(a_rows, a.cols)
        q = GENERIC
    else:
        expected = modp_rank(a_rows, a.cols, p)
        q = Prime.at(p)
    assert rank_over_fiber(a, q) == expected
