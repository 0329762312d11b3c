import random
from fractions import Fraction

import numpy as np
import pytest

from octlab.algebra import AuxKind, Sign, build_auxiliary, build_herm
from octlab.errors import DegenerateAlgebra, FlavorMismatch
from octlab.exactnum import QQ, GF
from octlab.structure import (Identity, Verdict, centroid, certify_simple, charpoly_mod_p, ideal_closure,
                              identity_check, irreducibility_test, is_ideal, lemma_kernels,
                              synthetic_direct_sum)
from octlab.algebra import StructureAlgebra, Flavor


def test_empty_generators_give_zero_ideal():
    assert ideal_closure(build_herm(2, Sign.PLUS), []).dim == 0


def test_random_element_generates_everything():
    alg = build_herm(2, Sign.PLUS)
    assert ideal_closure(alg, [alg.random_element(random.Random(7))]).dim == 10


def test_centre_of_gl3_is_an_ideal():
    gl3 = build_auxiliary(AuxKind.GLN, QQ, 3)
    e = gl3.element([1 if u == v else 0 for u in range(3) for v in range(3)])
    sub = ideal_closure(gl3, [e])
    assert sub.dim == 1 and is_ideal(gl3, sub)


def test_summand_generates_proper_ideal():
    s = synthetic_direct_sum()
    sub = ideal_closure(s, [s.basis(0)])
    assert sub.dim == 7 and is_ideal(s, sub)


def test_charpoly_against_sympy():
    import sympy
    rng = np.random.default_rng(1)
    m = rng.integers(0, 11, size=(5, 5))
    ours = charpoly_mod_p(m, 11)
    ref = sympy.Matrix(m.tolist()).charpoly().all_coeffs()
    assert ours == [int(c) % 11 for c in ref]


def test_malcev_algebra_over_f5_is_certified():
    cert = certify_simple(build_herm(1, Sign.MINUS, GF(5)))
    assert cert.verdict is Verdict.SIMPLE_CERTIFIED


@pytest.mark.parametrize("p", [5, 7, 11])
def test_order_four_jordan_product_is_certified_mod_p(p):
    assert irreducibility_test(build_herm(4, Sign.PLUS, GF(p)), p).verdict is Verdict.SIMPLE_CERTIFIED


def test_direct_sum_is_not_simple():
    for field in (QQ, GF(7)):
        cert = certify_simple(synthetic_direct_sum(field))
        assert cert.verdict is Verdict.NOT_SIMPLE and cert.witnesses


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("sign", list(Sign))
def test_simplicity_over_q(n, sign):
    cert = certify_simple(build_herm(n, sign), trials=5)
    assert cert.verdict is Verdict.SIMPLE_EVIDENCE
    assert sum(v == "SimpleCertified" for v in cert.details["modular"].values()) >= 3


def test_zero_product_algebra_is_degenerate():
    z = StructureAlgebra("null", QQ, ["a", "b"], [[(), ()], [(), ()]], Flavor.COMMUTATIVE)
    with pytest.raises(DegenerateAlgebra):
        certify_simple(z)


@pytest.mark.parametrize("n,sign", [(3, Sign.PLUS), (2, Sign.MINUS), (1, Sign.MINUS)])
def test_centroid_is_scalars(n, sign):
    sub = centroid(build_herm(n, sign))
    d = build_herm(n, sign).dim
    assert sub.dim == 1
    assert sub.contains([1 if i == j else 0 for i in range(d) for j in range(d)])


def test_centroid_of_direct_sum():
    assert centroid(synthetic_direct_sum()).dim == 2


@pytest.mark.parametrize("n", [2, 3])
def test_kernel_lemmas(n):
    rep = lemma_kernels(n)
    assert rep["skew_jordan_kernel_dim"] == 0
    assert rep["sym_bracket_skew_kernel_dim"] == 1 and rep["sym_bracket_sym_kernel_dim"] == 1
    assert rep["passed"]


def _jordan_defect(alg, a, b, c, y):
    """Linearized Jordan identity on basis elements, computed directly with exact products."""
    m = alg.mul
    x = [alg.basis(i) for i in (a, b, c)]
    yv = alg.basis(y)
    total = alg.zero()
    for p, q, r in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        pq = m(x[p], x[q])
        term = [u - v for u, v in zip(m(m(yv, pq), x[r]), m(m(yv, x[r]), pq))]
        total = tuple(s + t for s, t in zip(total, term))
    return total


@pytest.mark.parametrize("n", [1, 2, 3])
def test_jordan_identity_holds_up_to_order_three(n):
    assert identity_check(build_herm(n, Sign.PLUS), Identity.JORDAN).holds


def test_jordan_identity_fails_at_order_four():
    alg = build_herm(4, Sign.PLUS)
    res = identity_check(alg, Identity.JORDAN)
    assert not res.holds
    # frozen witness from the exhaustive search, re-checked with exact products
    assert res.witness == (0, 10, 19, 24)
    assert any(_jordan_defect(alg, *res.witness))
    assert [Fraction(v) for v in res.value] == list(_jordan_defect(alg, *res.witness))


def test_matrix_jordan_algebra_is_jordan():
    assert identity_check(build_auxiliary(AuxKind.MATRIX_JORDAN, QQ, 3), Identity.JORDAN).holds


def test_imaginary_octonions_malcev_not_lie():
    alg = build_herm(1, Sign.MINUS)
    assert identity_check(alg, Identity.MALCEV).holds
    assert identity_check(alg, Identity.ANTICOMMUTATIVE).holds
    res = identity_check(alg, Identity.JACOBI)
    assert not res.holds and res.witness == (0, 1, 2)
    x, y, z = (alg.basis(i) for i in res.witness)
    m = alg.mul
    jac = [a + b + c for a, b, c in zip(m(m(x, y), z), m(m(y, z), x), m(m(z, x), y))]
    assert any(jac)


def test_so3_is_lie():
    assert identity_check(build_auxiliary(AuxKind.SON, QQ, 3), Identity.JACOBI).holds


def test_flavor_mismatch():
    with pytest.raises(FlavorMismatch):
        identity_check(build_herm(2, Sign.MINUS), Identity.JORDAN)
    with pytest.raises(FlavorMismatch):
        identity_check(build_herm(2, Sign.PLUS), Identity.MALCEV)
