import random

import pytest

from octlab.errors import DimensionMismatch
from octlab.exactnum import QQ
from octlab.octmat import (OctMatrix, bracket, herm_split, involution_J, is_hermitian,
                           is_skew_hermitian, jordan, mat_conj, mat_mul, trace_form, trace_form_literal)
from octlab.octonion import Octonion


def _rand(n, seed):
    return OctMatrix.random(n, random.Random(seed))


def test_involution_properties():
    for seed in range(10):
        x, y = _rand(3, seed), _rand(3, seed + 100)
        assert involution_J(involution_J(x)) == x
        assert involution_J(mat_mul(x, y)) == mat_mul(involution_J(y), involution_J(x))


def test_split_into_hermitian_and_skew():
    x = _rand(3, 1)
    h, s = herm_split(x)
    assert is_hermitian(h) and is_skew_hermitian(s)
    assert h + s == x


def test_products_preserve_the_spaces():
    for seed in range(5):
        h1, _ = herm_split(_rand(2, seed))
        h2, _ = herm_split(_rand(2, seed + 7))
        _, s1 = herm_split(_rand(2, seed + 11))
        _, s2 = herm_split(_rand(2, seed + 13))
        assert is_hermitian(jordan(h1, h2))
        assert is_skew_hermitian(bracket(s1, s2))


def test_trace_form_on_identity():
    e = OctMatrix.identity(2)
    # Tr(EE) + Tr(EE) = 2 + 2
    assert trace_form(e, e) == 4


def test_trace_form_block_values():
    a = {(0, 1): 1, (1, 0): -1}
    x = OctMatrix.from_real(2, a, 1)
    y = OctMatrix.from_real(2, a, 1)
    # x (x) e1 with itself: 2 Re Tr(xy e1^2) = -2 Tr(a a) = 4
    assert trace_form(x, y) == 4
    z = OctMatrix.from_real(2, a, 2)
    assert trace_form(x, z) == 0


def test_literal_conjugate_order_is_not_scalar():
    a = {(0, 1): 1, (1, 0): -1}
    x = OctMatrix.from_real(2, a, 1)
    y = OctMatrix.from_real(2, a, 2)
    lit = trace_form_literal(x, y)
    # Tr(XY + conj(X)conj(Y)) = 2 Tr(a a) e1 e2 = -4 e4 here
    assert not lit.is_scalar()
    assert lit == Octonion.unit(4, QQ, -4)


def test_mismatched_orders():
    with pytest.raises(DimensionMismatch):
        mat_mul(OctMatrix.identity(2), OctMatrix.identity(3))


def test_json_round_trip():
    x = _rand(2, 4)
    assert OctMatrix.from_json(x.to_json()) == x


def test_conjugation_is_entrywise():
    x = _rand(2, 9)
    assert mat_conj(x)[0, 1] == x[0, 1].conj()
    assert mat_conj(mat_conj(x)) == x
