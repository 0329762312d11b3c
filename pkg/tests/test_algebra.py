import random

import pytest

from octlab.algebra import (AuxKind, Flavor, Sign, _build_herm, build_auxiliary, build_herm, cache_text,
                            direct_sum, element_product, from_matrix, product_span, read_cache,
                            subalgebra_closure, to_matrix, verify_product_formulas, write_cache)
from octlab.errors import DimensionMismatch
from octlab.exactnum import QQ, GF
from octlab.octmat import bracket, jordan


@pytest.mark.parametrize("n,plus,minus", [(1, 1, 7), (2, 10, 22), (3, 27, 45), (4, 52, 76), (5, 85, 115)])
def test_dimensions(n, plus, minus):
    assert build_herm(n, Sign.PLUS).dim == plus == 4 * n * n - 3 * n
    assert build_herm(n, Sign.MINUS).dim == minus == 4 * n * n + 3 * n


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("sign", list(Sign))
@pytest.mark.parametrize("field", [QQ, GF(7)], ids=["q", "f7"])
def test_blockwise_table_matches_matrix_products(n, sign, field):
    fast = _build_herm(n, sign, field)
    slow = _build_herm(n, sign, field, direct=True)
    assert fast.table == slow.table


def test_flavors_and_unit():
    plus, minus = build_herm(3, Sign.PLUS), build_herm(2, Sign.MINUS)
    assert plus.flavor is Flavor.COMMUTATIVE and plus.unit is not None
    assert minus.flavor is Flavor.ANTICOMMUTATIVE and minus.unit is None
    v = plus.random_element(random.Random(1))
    assert element_product(plus, plus.unit, v) == v
    for i in range(minus.dim):
        assert element_product(minus, minus.basis(i), minus.basis(i)) == minus.zero()


@pytest.mark.parametrize("sign", list(Sign))
def test_products_match_matrix_oracle(sign):
    alg = build_herm(2, sign)
    prod = jordan if sign is Sign.PLUS else bracket
    rng = random.Random(3)
    for _ in range(10):
        u, v = alg.random_element(rng), alg.random_element(rng)
        assert to_matrix(alg, alg.mul(u, v)) == prod(to_matrix(alg, u), to_matrix(alg, v))
        assert from_matrix(alg, to_matrix(alg, u)) == u


def test_auxiliary_algebras():
    so3 = build_auxiliary(AuxKind.SON, QQ, 3)
    assert so3.dim == 3
    gl2 = build_auxiliary(AuxKind.GLN, QQ, 2)
    assert gl2.dim == 4 and product_span(gl2).dim == 3
    im = build_auxiliary(AuxKind.IMAGINARY_OCTONIONS)
    assert im.dim == 7 and im.flavor is Flavor.ANTICOMMUTATIVE
    assert build_auxiliary(AuxKind.SLN, QQ, 2).dim == 3
    assert build_auxiliary(AuxKind.OCTONIONS).dim == 8
    assert build_auxiliary(AuxKind.MATRIX_JORDAN, QQ, 3).unit is not None


def test_direct_sum_blocks():
    im = build_auxiliary(AuxKind.IMAGINARY_OCTONIONS)
    s = direct_sum(im, im)
    assert s.dim == 14
    assert s.mul(s.basis(0), s.basis(8)) == s.zero()


def test_wrong_length_element():
    with pytest.raises(DimensionMismatch):
        build_herm(2, Sign.PLUS).element([1, 2])


def _span_of(alg, keys):
    return [alg.basis(i) for i, lab in enumerate(alg.labels) if keys(lab)]


@pytest.mark.parametrize("n", [2, 3])
def test_closures_of_natural_subalgebras(n):
    minus = build_herm(n, Sign.MINUS)
    # real skew block plus symmetric e1 block: so_n (+) sym_n (x) e1
    gens = _span_of(minus, lambda lab: "." not in lab or lab.endswith(".e1"))
    assert subalgebra_closure(minus, gens).dim == n * n
    plus = build_herm(n, Sign.PLUS)
    real = _span_of(plus, lambda lab: "." not in lab)
    assert subalgebra_closure(plus, real).dim == n * (n + 1) // 2


def test_identity_tensor_imaginary_octonions():
    minus = build_herm(2, Sign.MINUS)
    gens = []
    for k in range(1, 8):
        v = [0] * minus.dim
        v[minus.coord_index[(0, 0, k)]] = 1
        v[minus.coord_index[(1, 1, k)]] = 1
        gens.append(minus.element(v))
    assert subalgebra_closure(minus, gens).dim == 7


@pytest.mark.parametrize("n", [2, 3])
def test_product_formulas(n):
    rep = verify_product_formulas(n, QQ, trials=20, seed=n)
    assert set(rep["passed"].values()) == {20}
    assert rep["unhalved_jordan_formula"]["equals_twice_jordan_product"] == 20
    assert rep["unhalved_jordan_formula"]["matches_jordan_product"] == 0


def test_cache_round_trip_and_determinism(tmp_path):
    alg = build_herm(2, Sign.PLUS)
    p1 = write_cache(alg, tmp_path / "a.txt")
    p2 = write_cache(_build_herm(2, Sign.PLUS, QQ), tmp_path / "b.txt")
    assert p1.read_bytes() == p2.read_bytes()
    back = read_cache(p1)
    assert back.dim == 10 and back.table == alg.table and back.unit == alg.unit
    assert cache_text(build_herm(1, Sign.MINUS)).count("\n") > 1
    assert read_cache(write_cache(build_herm(1, Sign.MINUS), tmp_path / "m.txt")).dim == 7
