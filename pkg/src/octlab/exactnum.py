"""Exact scalars: rationals and prime fields.

Rationals are plain :class:`fractions.Fraction` values.  Prime-field scalars
are :class:`ModP` residues.  Both support the usual arithmetic operators, so
downstream code is written once against a :class:`Field` context.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from sympy import isprime

from .errors import CharacteristicForbidden, ConfigError, FieldMismatch, NotPrime


class FieldKind(enum.Enum):
    RATIONALS = "Rationals"
    PRIME_FIELD = "PrimeField"


@dataclass(frozen=True)
class FieldSpec:
    kind: FieldKind
    modulus: int | None = None
    exploratory: bool = False

    @classmethod
    def rationals(cls) -> "FieldSpec":
        return cls(FieldKind.RATIONALS)

    @classmethod
    def prime(cls, p: int, exploratory: bool = False) -> "FieldSpec":
        return cls(FieldKind.PRIME_FIELD, p, exploratory)

    @classmethod
    def parse(cls, text: str, exploratory: bool = False) -> "FieldSpec":
        """Parse ``q`` or ``fp:<prime>``."""
        t = text.strip().lower()
        if t in ("q", "qq", "rationals"):
            return cls.rationals()
        if t.startswith("fp:"):
            try:
                p = int(t[3:])
            except ValueError:
                raise ConfigError(f"bad field descriptor {text!r}") from None
            return cls.prime(p, exploratory)
        raise ConfigError(f"bad field descriptor {text!r}")

    def descriptor(self) -> str:
        if self.kind is FieldKind.RATIONALS:
            return "q"
        return f"fp:{self.modulus}"


class ModP:
    """A residue modulo a prime ``p``; immutable."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other) -> int:
        if isinstance(other, ModP):
            if other.p != self.p:
                raise FieldMismatch(f"F_{self.p} vs F_{other.p}")
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(self.v * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return ModP(-self.v, self.p)

    def __pos__(self):
        return self

    def inverse(self) -> "ModP":
        if self.v == 0:
            raise ZeroDivisionError("inverse of 0 mod p")
        return ModP(pow(self.v, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o % self.p == 0:
            raise ZeroDivisionError("division by 0 mod p")
        return ModP(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModP(o, self.p) / self

    def __eq__(self, other):
        if isinstance(other, ModP):
            return self.p == other.p and self.v == other.v
        if isinstance(other, int):
            return (other - self.v) % self.p == 0
        if isinstance(other, Fraction):
            if other.denominator % self.p == 0:
                return False
            return self.v == self._coerce(other) % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"ModP({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


Scalar = Union[Fraction, ModP]


class Field:
    """Arithmetic context for one ground field."""

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        if spec.kind is FieldKind.RATIONALS:
            self.p = 0
        else:
            self.p = spec.modulus
        self.zero = self(0)
        self.one = self(1)
        self.half = self(Fraction(1, 2))

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def is_rational(self) -> bool:
        return self.p == 0

    def __call__(self, x) -> Scalar:
        """Coerce an int, Fraction, string or scalar of this field."""
        if isinstance(x, str):
            return self.parse(x)
        if self.p == 0:
            if isinstance(x, ModP):
                raise FieldMismatch("residue used over the rationals")
            return Fraction(x)
        if isinstance(x, ModP):
            if x.p != self.p:
                raise FieldMismatch(f"F_{x.p} vs F_{self.p}")
            return x
        x = Fraction(x)
        if x.denominator % self.p == 0:
            raise ZeroDivisionError(f"{x} has no image in F_{self.p}")
        return ModP(x.numerator * pow(x.denominator, -1, self.p), self.p)

    def __eq__(self, other):
        return isinstance(other, Field) and self.spec == other.spec

    def __hash__(self):
        return hash(self.spec)

    def __repr__(self):
        return f"Field({self.spec.descriptor()})"

    def owns(self, s) -> bool:
        if self.p == 0:
            return isinstance(s, (Fraction, int))
        return isinstance(s, ModP) and s.p == self.p

    def inv(self, s: Scalar) -> Scalar:
        if self.p == 0:
            return 1 / Fraction(s)
        return self(s).inverse()

    def to_str(self, s: Scalar) -> str:
        return scalar_to_str(self(s))

    def parse(self, text: str) -> Scalar:
        t = text.strip()
        if self.p == 0:
            if "." in t or "e" in t.lower():
                raise ConfigError(f"decimal input {text!r} rejected; use p/q")
            try:
                return Fraction(t)
            except (ValueError, ZeroDivisionError):
                raise ConfigError(f"bad rational {text!r}") from None
        return self(Fraction(t)) if "/" in t else ModP(int(t), self.p)

    def random(self, rng: random.Random, bound: int = 9) -> Scalar:
        """Random scalar; rationals draw small numerators and denominators."""
        if self.p == 0:
            return Fraction(rng.randint(-bound, bound), rng.randint(1, 3))
        return ModP(rng.randrange(self.p), self.p)


def field_make(spec: FieldSpec) -> Field:
    """Validate a field descriptor and build its arithmetic context."""
    if spec.kind is FieldKind.PRIME_FIELD:
        p = spec.modulus
        if p is None or p < 2 or not isprime(p):
            raise NotPrime(f"modulus {p} is not prime")
        if p == 2:
            raise CharacteristicForbidden("characteristic 2 is never allowed")
        if p == 3 and not spec.exploratory:
            raise CharacteristicForbidden(
                "characteristic 3 requires the exploratory flag")
    return Field(spec)


QQ = Field(FieldSpec.rationals())


def GF(p: int, exploratory: bool = False) -> Field:
    return field_make(FieldSpec.prime(p, exploratory))


def canonicalize(s):
    """Canonical form of a scalar: lowest terms for rationals, residue in [0, p)."""
    if isinstance(s, ModP):
        return ModP(s.v, s.p)
    return Fraction(s)


def scalar_to_str(s) -> str:
    if isinstance(s, ModP):
        return str(s.v)
    s = Fraction(s)
    if s.denominator == 1:
        return str(s.numerator)
    return f"{s.numerator}/{s.denominator}"


def parse_rational(text: str) -> Fraction:
    """Exact rational from ``p/q``; decimals are rejected."""
    return QQ.parse(text)
