"""Square matrices with octonion entries, the involution J and the trace form."""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Sequence

from .errors import DimensionMismatch, NonScalarValue
from .exactnum import QQ, Field
from .octonion import MUL, Octonion


class OctMatrix:
    """An n x n matrix over the octonions; entries stored row-major."""

    __slots__ = ("n", "rows", "field")

    def __init__(self, rows: Sequence[Sequence[Octonion]], field: Field | None = None):
        self.n = len(rows)
        if any(len(r) != self.n for r in rows):
            raise DimensionMismatch("octonion matrices must be square")
        if field is None:
            field = rows[0][0].field if self.n else QQ
        self.field = field
        self.rows = tuple(tuple(r) for r in rows)

    @classmethod
    def zeros(cls, n: int, field: Field = QQ) -> "OctMatrix":
        z = Octonion.zero(field)
        return cls([[z] * n for _ in range(n)], field)

    @classmethod
    def identity(cls, n: int, field: Field = QQ) -> "OctMatrix":
        return cls.from_real(n, {(i, i): 1 for i in range(n)}, 0, field)

    @classmethod
    def from_real(cls, n: int, entries, unit: int = 0, field: Field = QQ) -> "OctMatrix":
        """Matrix ``x (x) b_unit`` where ``entries`` maps (i, j) to scalars of x."""
        z = Octonion.zero(field)
        rows = [[z] * n for _ in range(n)]
        for (i, j), v in entries.items():
            if v:
                rows[i][j] = Octonion.unit(unit, field, v)
        return cls(rows, field)

    @classmethod
    def tensor(cls, x: Sequence[Sequence], a: Octonion) -> "OctMatrix":
        """The matrix x (x) a for a scalar matrix x and an octonion a."""
        n = len(x)
        return cls([[a.scale(x[i][j]) for j in range(n)] for i in range(n)], a.field)

    @classmethod
    def random(cls, n: int, rng: random.Random, field: Field = QQ) -> "OctMatrix":
        return cls([[Octonion.random(rng, field) for _ in range(n)] for _ in range(n)], field)

    def _check(self, other: "OctMatrix"):
        if self.n != other.n:
            raise DimensionMismatch(f"orders {self.n} and {other.n}")

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __add__(self, other: "OctMatrix") -> "OctMatrix":
        self._check(other)
        return OctMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.field)

    def __sub__(self, other: "OctMatrix") -> "OctMatrix":
        self._check(other)
        return OctMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.field)

    def __neg__(self) -> "OctMatrix":
        return OctMatrix([[-a for a in r] for r in self.rows], self.field)

    def scale(self, s) -> "OctMatrix":
        return OctMatrix([[a.scale(s) for a in r] for r in self.rows], self.field)

    def __matmul__(self, other: "OctMatrix") -> "OctMatrix":
        return mat_mul(self, other)

    def __eq__(self, other):
        return isinstance(other, OctMatrix) and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __bool__(self):
        return any(a for r in self.rows for a in r)

    def __repr__(self):
        return f"OctMatrix(n={self.n}, rows={self.rows!r})"

    def trace(self) -> Octonion:
        t = Octonion.zero(self.field)
        for i in range(self.n):
            t = t + self.rows[i][i]
        return t

    def to_json(self) -> dict:
        return {"n": self.n, "entries": [[a.to_strings() for a in r] for r in self.rows]}

    @classmethod
    def from_json(cls, data: dict, field: Field = QQ) -> "OctMatrix":
        rows = [[Octonion.from_strings(a, field) for a in r] for r in data["entries"]]
        if len(rows) != data["n"]:
            raise DimensionMismatch("order header disagrees with entries")
        return cls(rows, field)


def _scaled(x: OctMatrix):
    """(D, integer coefficient rows) with D * x integral."""
    den = 1
    for r in x.rows:
        for a in r:
            for c in a.coeffs:
                if c.denominator != 1:
                    den = math.lcm(den, c.denominator)
    return den, [[[c.numerator * (den // c.denominator) for c in a.coeffs] for a in r] for r in x.rows]


def _mat_mul_rational(x: OctMatrix, y: OctMatrix) -> OctMatrix:
    n = x.n
    dx, xs = _scaled(x)
    dy, ys = _scaled(y)
    den = dx * dy
    field = x.field
    ynz = [[[(j, b) for j, b in enumerate(e) if b] for e in r] for r in ys]
    out = []
    for i in range(n):
        row = []
        for k in range(n):
            acc = [0] * 8
            for j in range(n):
                bs = ynz[j][k]
                if not bs:
                    continue
                for ia, a in enumerate(xs[i][j]):
                    if not a:
                        continue
                    mrow = MUL[ia]
                    for jb, b in bs:
                        sign, t = mrow[jb]
                        acc[t] += sign * a * b
            row.append(Octonion._raw([Fraction(v, den) for v in acc], field))
        out.append(row)
    return OctMatrix(out, field)


def mat_mul(x: OctMatrix, y: OctMatrix) -> OctMatrix:
    """Matrix product; entry products are summed left to right."""
    x._check(y)
    if x.field.is_rational:
        return _mat_mul_rational(x, y)
    n = x.n
    zero = Octonion.zero(x.field)
    out = []
    for i in range(n):
        row = []
        xi = x.rows[i]
        for k in range(n):
            acc = zero
            for j in range(n):
                a = xi[j]
                if not a:
                    continue
                b = y.rows[j][k]
                if b:
                    acc = acc + a * b
            row.append(acc)
        out.append(row)
    return OctMatrix(out, x.field)


def mat_add(x: OctMatrix, y: OctMatrix) -> OctMatrix:
    return x + y


def scalar_mul(s, x: OctMatrix) -> OctMatrix:
    return x.scale(s)


def mat_conj(x: OctMatrix) -> OctMatrix:
    """Entrywise conjugation."""
    return OctMatrix([[a.conj() for a in r] for r in x.rows], x.field)


def involution_J(x: OctMatrix) -> OctMatrix:
    """Conjugate transpose: (a_ij) -> (conj a_ji)."""
    n = x.n
    return OctMatrix([[x.rows[j][i].conj() for j in range(n)] for i in range(n)], x.field)


def jordan(x: OctMatrix, y: OctMatrix) -> OctMatrix:
    """x o y = (xy + yx) / 2."""
    return (mat_mul(x, y) + mat_mul(y, x)).scale(x.field.half)


def bracket(x: OctMatrix, y: OctMatrix) -> OctMatrix:
    return mat_mul(x, y) - mat_mul(y, x)


def herm_split(x: OctMatrix) -> tuple[OctMatrix, OctMatrix]:
    """Split into J-fixed and J-negated parts."""
    jx = involution_J(x)
    h = x.field.half
    return (x + jx).scale(h), (x - jx).scale(h)


def is_hermitian(x: OctMatrix) -> bool:
    return involution_J(x) == x


def is_skew_hermitian(x: OctMatrix) -> bool:
    return involution_J(x) == -x


def trace_form(x: OctMatrix, y: OctMatrix):
    """Tr(XY + conj(Y) conj(X)), the trace form on sym+ or sym-.

    The conjugate term is taken in reversed order so that the octonion trace
    is the scalar 2 Re Tr(XY); the result is returned as that scalar.
    """
    t = (mat_mul(x, y) + mat_mul(mat_conj(y), mat_conj(x))).trace()
    if not t.is_scalar():
        raise NonScalarValue(f"trace form value {t!r} is not scalar")
    return t.coeffs[0]


def trace_form_literal(x: OctMatrix, y: OctMatrix) -> Octonion:
    """Tr(XY + conj(X) conj(Y)) exactly as written, as an octonion (may be non-scalar)."""
    return (mat_mul(x, y) + mat_mul(mat_conj(x), mat_conj(y))).trace()
