from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from octlab.errors import CharacteristicForbidden, ConfigError, FieldMismatch, NotPrime
from octlab.exactnum import QQ, GF, FieldSpec, ModP, field_make, parse_rational, scalar_to_str


def test_parse_descriptors():
    assert FieldSpec.parse("q").descriptor() == "q"
    assert FieldSpec.parse("fp:7").modulus == 7
    with pytest.raises(ConfigError):
        FieldSpec.parse("reals")


def test_forbidden_characteristics():
    with pytest.raises(CharacteristicForbidden):
        GF(2)
    with pytest.raises(CharacteristicForbidden):
        GF(3)
    assert GF(3, exploratory=True).p == 3
    with pytest.raises(NotPrime):
        GF(9)


def test_decimals_rejected():
    with pytest.raises(ConfigError):
        parse_rational("0.5")
    assert parse_rational("-1/2") == Fraction(-1, 2)


def test_scalar_strings():
    assert scalar_to_str(Fraction(3, 1)) == "3"
    assert scalar_to_str(Fraction(-1, 2)) == "-1/2"
    assert scalar_to_str(ModP(-1, 7)) == "6"


def test_modp_mismatch():
    with pytest.raises(FieldMismatch):
        ModP(1, 5) + ModP(1, 7)


def test_half_in_prime_field():
    f = GF(7)
    assert f.half * 2 == f.one
    with pytest.raises(ZeroDivisionError):
        f(Fraction(1, 7))


residues = st.integers(min_value=-10**6, max_value=10**6)


@given(residues, residues, residues)
def test_prime_field_axioms(a, b, c):
    f = GF(10007)
    x, y, z = f(a), f(b), f(c)
    assert (x + y) * z == x * z + y * z
    assert (x * y) * z == x * (y * z)
    if x:
        assert x * f.inv(x) == f.one


@given(st.fractions(max_denominator=50))
def test_rational_round_trip(q):
    assert QQ.parse(scalar_to_str(q)) == q
    assert QQ.to_str(field_make(FieldSpec.rationals())(q)) == scalar_to_str(q)
