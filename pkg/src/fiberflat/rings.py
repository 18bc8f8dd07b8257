"""Base rings, primes, spectra, and residue fields.

Five ring kinds are supported: the integers ``Z``, quotients ``Z/n``, the
localization ``Z_(p)`` of the integers at a prime p, prime fields ``F_p``,
and the rationals ``Q``.  Ring elements are plain Python numbers: ``int``
for Z, Z/n and F_p, ``fractions.Fraction`` for Q and Z_(p).  Every public
entry point canonicalizes its operands, so downstream code may assume

* Z: any int,
* Z/n and F_p: representative in [0, n),
* Q: reduced Fraction,
* Z_(p): reduced Fraction whose denominator is coprime to p.

All arithmetic is exact; nothing in this module (or the package) touches
floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import InputError

Scalar = int | Fraction


def is_prime(n: int) -> bool:
    """Trial-division primality check, adequate for desk-scale inputs.

    >>> [k for k in range(2, 20) if is_prime(k)]
    [2, 3, 5, 7, 11, 13, 17, 19]
    """
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def factor_trial(n: int) -> dict[int, int]:
    """Factor a positive integer by trial division, as {prime: exponent}.

    >>> factor_trial(360)
    {2: 3, 3: 2, 5: 1}
    """
    if n <= 0:
        raise InputError(f"cannot factor non-positive integer {n}")
    out: dict[int, int] = {}
    for p in (2, 3):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    f = 5
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 2 if f % 6 == 5 else 4
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return dict(sorted(out.items()))


@dataclass(frozen=True, order=False)
class Prime:
    """A point of the spectrum: the generic point (0) or a prime (p).

    ``p is None`` encodes the generic point.  Constructing ``Prime.at(p)``
    verifies primality by trial division.
    """

    p: int | None = None

    def __post_init__(self) -> None:
        if self.p is not None and not is_prime(self.p):
            raise InputError(f"{self.p} is not prime")

    @classmethod
    def at(cls, p: int) -> "Prime":
        return cls(p)

    @property
    def is_generic(self) -> bool:
        return self.p is None

    def sort_key(self) -> tuple[int, int]:
        # Generic first, then primes ascending: the pinned report order.
        return (0, 0) if self.p is None else (1, self.p)

    def literal(self) -> str:
        return "0" if self.p is None else str(self.p)

    def __str__(self) -> str:
        return f"({self.literal()})"


GENERIC = Prime()


def parse_prime(text: str) -> Prime:
    """Parse a prime literal: "0" for the generic point, else a prime."""
    try:
        value = int(text)
    except ValueError as exc:
        raise InputError(f"bad prime literal {text!r}") from exc
    return GENERIC if value == 0 else Prime.at(value)


@dataclass(frozen=True)
class BaseRing:
    """A supported base ring, tagged by kind and an optional parameter.

    kind is one of "Z", "Zmod", "Zloc", "Fp", "Q"; param is n for Z/n and
    p for Z_(p) and F_p.  Use the module-level constructors (``ZZ``,
    ``integers_mod``, ...) rather than instantiating directly.
    """

    kind: str
    param: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("Z", "Zmod", "Zloc", "Fp", "Q"):
            raise InputError(f"unknown ring kind {self.kind!r}")
        if self.kind == "Zmod":
            if self.param is None or self.param < 2:
                # n = 1 would be the zero ring; n = 0 would be Z in disguise.
                raise InputError("Z/n requires n >= 2 (the zero ring is rejected)")
        elif self.kind in ("Zloc", "Fp"):
            if self.param is None or not is_prime(self.param):
                raise InputError(f"{self.kind} requires a prime parameter, got {self.param}")
        elif self.param is not None:
            raise InputError(f"ring kind {self.kind} takes no parameter")

    # -- presentation ----------------------------------------------------

    def literal(self) -> str:
        if self.kind == "Z":
            return "Z"
        if self.kind == "Zmod":
            return f"Z/{self.param}"
        if self.kind == "Zloc":
            return f"Zloc/{self.param}"
        if self.kind == "Fp":
            return f"F{self.param}"
        return "Q"

    def __str__(self) -> str:
        return self.literal()

    @property
    def is_field(self) -> bool:
        return self.kind in ("Fp", "Q")

    @property
    def uses_fractions(self) -> bool:
        return self.kind in ("Zloc", "Q")

    # -- element arithmetic ----------------------------------------------

    def canon(self, x: Scalar) -> Scalar:
        """Canonical representative of x, validating membership.

        >>> integers_mod(6).canon(-1)
        5
        >>> localized_at(5).canon(Fraction(3, 2))
        Fraction(3, 2)
        """
        if self.kind == "Z":
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise InputError(f"{x} is not an integer")
                return int(x)
            return int(x)
        if self.kind in ("Zmod", "Fp"):
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise InputError(f"{x} is not an integer")
                x = int(x)
            return int(x) % self.param  # type: ignore[operator]
        x = Fraction(x)
        if self.kind == "Zloc" and x.denominator % self.param == 0:  # type: ignore[operator]
            raise InputError(f"{x} is not p-integral for p = {self.param}")
        return x

    @property
    def zero(self) -> Scalar:
        return Fraction(0) if self.uses_fractions else 0

    @property
    def one(self) -> Scalar:
        return Fraction(1) if self.uses_fractions else 1

    def add(self, a: Scalar, b: Scalar) -> Scalar:
        s = a + b
        if self.kind in ("Zmod", "Fp"):
            return s % self.param  # type: ignore[operator]
        return s

    def sub(self, a: Scalar, b: Scalar) -> Scalar:
        return self.add(a, -b)

    def mul(self, a: Scalar, b: Scalar) -> Scalar:
        m = a * b
        if self.kind in ("Zmod", "Fp"):
            return m % self.param  # type: ignore[operator]
        return m

    def neg(self, a: Scalar) -> Scalar:
        if self.kind in ("Zmod", "Fp"):
            return (-a) % self.param  # type: ignore[operator]
        return -a

    def is_zero(self, a: Scalar) -> bool:
        return a == 0

    def is_unit(self, a: Scalar) -> bool:
        """Units: +-1 in Z, residues coprime to n in Z/n, valuation-0 in Z_(p).

        >>> ZZ.is_unit(-1), ZZ.is_unit(2)
        (True, False)
        >>> integers_mod(6).is_unit(5), integers_mod(6).is_unit(3)
        (True, False)
        """
        if self.kind == "Z":
            return a == 1 or a == -1
        if self.kind == "Zmod":
            return gcd(int(a), self.param) == 1  # type: ignore[arg-type]
        if self.kind == "Zloc":
            return a != 0 and Fraction(a).numerator % self.param != 0  # type: ignore[operator]
        return a != 0

    def try_divide(self, a: Scalar, b: Scalar) -> Scalar | None:
        """Some x with b*x = a, or None if a is not divisible by b.

        Over Z/n the smallest non-negative solution is returned, making the
        choice deterministic even when b is a zero divisor.
        """
        a, b = self.canon(a), self.canon(b)
        if self.kind == "Zmod":
            n = self.param
            g = gcd(int(b), n)  # type: ignore[arg-type]
            if a % g != 0:
                return None
            n_red = n // g
            if n_red == 1:
                return 0
            return ((a // g) * pow((b // g) % n_red, -1, n_red)) % n_red
        if b == 0:
            return None
        q = Fraction(a) / Fraction(b)
        if self.kind == "Z":
            return int(q) if q.denominator == 1 else None
        if self.kind == "Zloc":
            return q if q.denominator % self.param != 0 else None  # type: ignore[operator]
        return self.canon(q)

    def invert_unit(self, a: Scalar) -> Scalar:
        if not self.is_unit(a):
            raise InputError(f"{a} is not a unit in {self}")
        out = self.try_divide(self.one, a)
        assert out is not None
        return out

    def valuation(self, x: Scalar, p: int | None = None) -> int | None:
        """p-adic valuation of x; None for x = 0.  Defaults to this ring's p."""
        if p is None:
            if self.kind not in ("Zloc", "Fp"):
                raise InputError(f"{self} has no implied prime for valuations")
            p = self.param
        x = self.canon(x)
        if x == 0:
            return None
        num = Fraction(x).numerator
        den = Fraction(x).denominator
        v = 0
        while num % p == 0:
            num //= p
            v += 1
        while den % p == 0:
            den //= p
            v -= 1
        return v

    # -- spectrum and residue fields ---------------------------------------

    def spectrum(self) -> "SpectrumDescription":
        """The prime spectrum, finite except over Z.

        >>> integers_mod(12).spectrum().primes
        (Prime(p=2), Prime(p=3))
        """
        if self.kind == "Z":
            return SpectrumDescription(self, finite=False, primes=(GENERIC,),
                                       includes_all_rational_primes=True)
        if self.kind == "Zmod":
            qs = tuple(Prime.at(p) for p in factor_trial(self.param))
            return SpectrumDescription(self, finite=True, primes=qs)
        if self.kind == "Zloc":
            return SpectrumDescription(self, finite=True,
                                       primes=(GENERIC, Prime.at(self.param)))
        return SpectrumDescription(self, finite=True, primes=(GENERIC,))

    def admits(self, q: Prime) -> bool:
        return self.spectrum().contains(q)

    def residue_field(self, q: Prime) -> "ResidueField":
        """The residue field at q together with the reduction map.

        >>> ZZ.residue_field(Prime.at(5)).field.literal()
        'F5'
        >>> localized_at(5).residue_field(GENERIC).field.literal()
        'Q'
        """
        if not self.admits(q):
            raise InputError(f"{q} is not a point of Spec {self}")
        if q.is_generic:
            field = self if self.is_field else QQ
        else:
            field = prime_field(q.p)  # type: ignore[arg-type]
        return ResidueField(source=self, prime=q, field=field)


@dataclass(frozen=True)
class SpectrumDescription:
    """Finite spectra list their points; Spec Z is {(0)} plus all primes.

    Callers over Z must pair this with a finite bad-prime computation; the
    description object deliberately cannot be enumerated when infinite.
    """

    ring: BaseRing
    finite: bool
    primes: tuple[Prime, ...]
    includes_all_rational_primes: bool = False

    def contains(self, q: Prime) -> bool:
        if q in self.primes:
            return True
        return self.includes_all_rational_primes and not q.is_generic

    def enumerate(self) -> tuple[Prime, ...]:
        if not self.finite:
            raise InputError(f"Spec {self.ring} is infinite and cannot be enumerated")
        return self.primes


@dataclass(frozen=True)
class ResidueField:
    """Reduction data source -> kappa(q).  ``reduce`` is a ring homomorphism."""

    source: BaseRing
    prime: Prime
    field: BaseRing

    def reduce(self, x: Scalar) -> Scalar:
        x = self.source.canon(x)
        if self.prime.is_generic:
            # Z, Zloc, Q land in Q; F_p is its own residue field.
            return x if self.field.kind == "Fp" else Fraction(x)
        p = self.prime.p
        if self.source.uses_fractions:
            fx = Fraction(x)
            return (fx.numerator % p) * pow(fx.denominator % p, -1, p) % p
        return int(x) % p  # type: ignore[arg-type]


# -- constructors and literals ---------------------------------------------

ZZ = BaseRing("Z")
QQ = BaseRing("Q")


def integers() -> BaseRing:
    return ZZ


def rationals() -> BaseRing:
    return QQ


def integers_mod(n: int) -> BaseRing:
    return BaseRing("Zmod", n)


def localized_at(p: int) -> BaseRing:
    return BaseRing("Zloc", p)


def prime_field(p: int) -> BaseRing:
    return BaseRing("Fp", p)


def parse_ring(text: str) -> BaseRing:
    """Parse a ring literal: Z | Z/<n> | Zloc/<p> | F<p> | Q.

    >>> parse_ring("Z/12").literal()
    'Z/12'
    >>> parse_ring("F7") == prime_field(7)
    True
    """
    text = text.strip()
    if text == "Z":
        return ZZ
    if text == "Q":
        return QQ
    try:
        if text.startswith("Z/"):
            return integers_mod(int(text[2:]))
        if text.startswith("Zloc/"):
            return localized_at(int(text[5:]))
        if text.startswith("F"):
            return prime_field(int(text[1:]))
    except ValueError as exc:
        raise InputError(f"bad ring literal {text!r}") from exc
    raise InputError(f"bad ring literal {text!r}")


def parse_scalar(ring: BaseRing, obj: object) -> Scalar:
    """Parse a JSON-level entry: an int, or "a/b" / "a" as a string."""
    if isinstance(obj, bool) or not isinstance(obj, (int, str)):
        raise InputError(f"bad matrix entry {obj!r}")
    if isinstance(obj, str):
        try:
            value = Fraction(obj)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad matrix entry {obj!r}") from exc
    else:
        value = obj
    return ring.canon(value)


def render_scalar(x: Scalar) -> int | str:
    """Inverse of parse_scalar: ints stay ints, proper fractions become "a/b"."""
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return int(x)
