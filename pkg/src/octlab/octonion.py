"""Octonions over an exact field, basis {1, e1, ..., e7}.

The product on imaginary units follows the seven cyclic triples
(i, i+1, i+3) mod 7, i.e. e1 e2 = e4, e2 e4 = e1, e4 e1 = e2 and so on.
"""

from __future__ import annotations

import random
from typing import Sequence

from .errors import FieldMismatch, NonScalarNorm, NotImaginary
from .exactnum import QQ, Field

FANO_TRIPLES = ((1, 2, 4), (2, 3, 5), (3, 4, 6), (4, 5, 7), (5, 6, 1), (6, 7, 2), (7, 1, 3))


def _build_table():
    # MUL[i][j] = (sign, k) with b_i b_j = sign * b_k; index 0 is the unit.
    table = [[None] * 8 for _ in range(8)]
    for i in range(8):
        table[0][i] = (1, i)
        table[i][0] = (1, i)
    for i in range(1, 8):
        table[i][i] = (-1, 0)
    for a, b, c in FANO_TRIPLES:
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            table[x][y] = (1, z)
            table[y][x] = (-1, z)
    return tuple(tuple(row) for row in table)


MUL = _build_table()


def fano_star(i: int, j: int) -> tuple[int, int]:
    """Return (sign, i*j) with e_i e_j = sign * e_{i*j}, for i != j in 1..7."""
    if i == j or not (1 <= i <= 7 and 1 <= j <= 7):
        raise ValueError("fano_star needs distinct indices in 1..7")
    return MUL[i][j]


class Octonion:
    """An octonion with exact coefficients in basis order [1, e1, ..., e7]."""

    __slots__ = ("coeffs", "field")

    def __init__(self, coeffs: Sequence, field: Field = QQ):
        if len(coeffs) != 8:
            raise ValueError("an octonion has 8 coefficients")
        self.field = field
        self.coeffs = tuple(field(c) for c in coeffs)

    @classmethod
    def _raw(cls, coeffs, field):
        obj = cls.__new__(cls)
        obj.coeffs = tuple(coeffs)
        obj.field = field
        return obj

    @classmethod
    def zero(cls, field: Field = QQ) -> "Octonion":
        return cls._raw((field.zero,) * 8, field)

    @classmethod
    def unit(cls, i: int, field: Field = QQ, scale=1) -> "Octonion":
        """The basis element b_i (b_0 = 1), optionally scaled."""
        c = [field.zero] * 8
        c[i] = field(scale)
        return cls._raw(c, field)

    @classmethod
    def scalar(cls, s, field: Field = QQ) -> "Octonion":
        return cls.unit(0, field, s)

    @classmethod
    def random(cls, rng: random.Random, field: Field = QQ, imaginary: bool = False) -> "Octonion":
        c = [field.random(rng) for _ in range(8)]
        if imaginary:
            c[0] = field.zero
        return cls._raw(c, field)

    def _check(self, other: "Octonion"):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field} vs {other.field}")

    def __add__(self, other: "Octonion") -> "Octonion":
        self._check(other)
        return Octonion._raw([a + b for a, b in zip(self.coeffs, other.coeffs)], self.field)

    def __sub__(self, other: "Octonion") -> "Octonion":
        self._check(other)
        return Octonion._raw([a - b for a, b in zip(self.coeffs, other.coeffs)], self.field)

    def __neg__(self) -> "Octonion":
        return Octonion._raw([-a for a in self.coeffs], self.field)

    def scale(self, s) -> "Octonion":
        s = self.field(s)
        return Octonion._raw([s * a for a in self.coeffs], self.field)

    def __mul__(self, other):
        if not isinstance(other, Octonion):
            return self.scale(other)
        self._check(other)
        out = [self.field.zero] * 8
        nz_b = [(j, b) for j, b in enumerate(other.coeffs) if b]
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            row = MUL[i]
            for j, b in nz_b:
                sign, k = row[j]
                if sign > 0:
                    out[k] = out[k] + a * b
                else:
                    out[k] = out[k] - a * b
        return Octonion._raw(out, self.field)

    def __rmul__(self, s):
        return self.scale(s)

    def __eq__(self, other):
        return isinstance(other, Octonion) and self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        terms = [f"{c}*{'1' if i == 0 else f'e{i}'}" for i, c in enumerate(self.coeffs) if c]
        return "Octonion(" + (" + ".join(terms) or "0") + ")"

    def conj(self) -> "Octonion":
        c = self.coeffs
        return Octonion._raw((c[0],) + tuple(-x for x in c[1:]), self.field)

    @property
    def real(self):
        return self.coeffs[0]

    def is_scalar(self) -> bool:
        return not any(self.coeffs[1:])

    def is_imaginary(self) -> bool:
        return not self.coeffs[0]

    def to_strings(self) -> list[str]:
        return [self.field.to_str(c) for c in self.coeffs]

    @classmethod
    def from_strings(cls, items: Sequence[str], field: Field = QQ) -> "Octonion":
        return cls([field.parse(s) for s in items], field)


def oct_mul(a: Octonion, b: Octonion) -> Octonion:
    return a * b


def oct_conj(a: Octonion) -> Octonion:
    return a.conj()


def oct_trace(a: Octonion):
    """T(a) = a + conj(a), returned as a scalar."""
    return 2 * a.coeffs[0]


def oct_norm(a: Octonion):
    """N(a) = a conj(a), returned as a scalar."""
    prod = a * a.conj()
    if not prod.is_scalar():
        raise NonScalarNorm(f"a*conj(a) = {prod!r} is not scalar")
    return prod.coeffs[0]


def oct_norm_polar(a: Octonion, b: Octonion):
    """N(a, b) = N(a) + N(b) - N(a + b) for imaginary a, b."""
    if not (a.is_imaginary() and b.is_imaginary()):
        raise NotImaginary("polar norm needs imaginary arguments")
    return oct_norm(a) + oct_norm(b) - oct_norm(a + b)


def commutator(a: Octonion, b: Octonion) -> Octonion:
    return a * b - b * a


def check_table(field: Field = QQ) -> list[str]:
    """Consistency oracle for the multiplication table on basis elements.

    Checks unit, e_i^2 = -1, anticommutativity, alternativity, norm
    multiplicativity and that left/right multiplication by e_i maps
    B_i = span(e_j : j != i) onto itself.  Returns a list of failures.
    """
    failures = []
    basis = [Octonion.unit(i, field) for i in range(8)]
    one = basis[0]
    for x in basis:
        if one * x != x or x * one != x:
            failures.append(f"unit fails on {x!r}")
    for i in range(1, 8):
        if basis[i] * basis[i] != -one:
            failures.append(f"e{i}^2 != -1")
        for j in range(1, 8):
            if i != j and basis[i] * basis[j] != -(basis[j] * basis[i]):
                failures.append(f"e{i} e{j} != -e{j} e{i}")
    # alternativity on basis pairs together with their sums is a full check
    # for the (bilinear-in-b, quadratic-in-a) laws after polarisation
    for i in range(8):
        for j in range(8):
            for k in range(8):
                a, a2, b = basis[i], basis[j], basis[k]
                lhs = (a * a2 + a2 * a) * b
                rhs = a * (a2 * b) + a2 * (a * b)
                if lhs != rhs:
                    failures.append(f"left alternativity fails on {(i, j, k)}")
                lhs = b * (a * a2 + a2 * a)
                rhs = (b * a) * a2 + (b * a2) * a
                if lhs != rhs:
                    failures.append(f"right alternativity fails on {(i, j, k)}")
    for i in range(8):
        for j in range(8):
            if oct_norm(basis[i] * basis[j]) != oct_norm(basis[i]) * oct_norm(basis[j]):
                failures.append(f"norm not multiplicative on {(i, j)}")
    for i in range(1, 8):
        bi = set(range(1, 8)) - {i}
        for side in ("left", "right"):
            image = set()
            for j in bi:
                p = basis[i] * basis[j] if side == "left" else basis[j] * basis[i]
                support = [k for k, c in enumerate(p.coeffs) if c]
                if len(support) != 1 or support[0] not in bi:
                    failures.append(f"{side} e{i} moves e{j} out of B_{i}")
                image.update(support)
            if image != bi:
                failures.append(f"{side} e{i} B_{i} != B_{i}")
    return failures
