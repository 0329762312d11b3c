from fractions import Fraction

import pytest

from octlab.algebra import AuxKind, Sign, build_auxiliary, build_herm
from octlab.deltader import (compare_known_derivations, composition_check, delta_der_space, delta_scan,
                             derivation_dimension, gl_cross_checks, half_der_elements, half_der_via_elements,
                             identity_map, known_derivations, lemma_xdm_space, verify_delta_map)
from octlab.errors import FlavorMismatch, NoUnit
from octlab.exactnum import QQ, GF
from octlab.linsolve import Policy, Subspace


def test_half_derivations_are_scalars():
    alg = build_herm(2, Sign.MINUS)
    sp = delta_der_space(alg, Fraction(1, 2))
    assert sp.dim == 1
    ident = [x for row in identity_map(alg.dim) for x in row]
    assert sp.subspace() == Subspace.spanned([ident], alg.dim ** 2)


def test_no_antiderivations():
    assert delta_der_space(build_herm(2, Sign.MINUS), -1).dim == 0


def test_gl2_antiderivations():
    assert delta_der_space(build_auxiliary(AuxKind.GLN, QQ, 2), -1).dim == 6


@pytest.mark.parametrize("n,sign,dim", [(1, Sign.MINUS, 14), (2, Sign.MINUS, 15), (3, Sign.MINUS, 17),
                                        (3, Sign.PLUS, 52), (1, Sign.PLUS, 0)])
def test_derivation_dimensions(n, sign, dim):
    assert derivation_dimension(build_herm(n, sign)) == dim


def test_order_two_jordan_derivations():
    # sym+ of order two is the spin factor of a 9-dimensional form, whose derivations are so_9
    assert derivation_dimension(build_herm(2, Sign.PLUS)) == 36


def test_policies_agree():
    alg = build_herm(1, Sign.MINUS)
    a = delta_der_space(alg, 1, Policy.MULTIMODULAR.value)
    b = delta_der_space(alg, 1, Policy.DIRECT.value)
    assert a.basis == b.basis


def test_prime_field_agrees_in_dimension():
    assert derivation_dimension(build_herm(2, Sign.MINUS, GF(10007))) == 15


def test_solutions_are_verified_maps():
    alg = build_herm(2, Sign.MINUS)
    for m in delta_der_space(alg, 1).basis:
        verify_delta_map(alg, m, 1)


@pytest.mark.parametrize("sign", list(Sign))
def test_scan_order_two(sign):
    rep = delta_scan(build_herm(2, sign), [0, 1, Fraction(1, 2), -1, 2, 3])
    nonzero = {k for k, v in rep["dims"].items() if v}
    assert nonzero == {"1", "1/2"} and rep["dims"]["1/2"] == 1
    assert rep["half_is_identity"] and rep["only_one_and_half"]


def test_total_delta_span():
    rep = delta_scan(build_herm(3, Sign.MINUS), [1, Fraction(1, 2), -1])
    assert rep["total_dim"] == 18


def test_composition_of_half_and_one():
    alg = build_herm(1, Sign.MINUS)
    res = composition_check(alg, delta_der_space(alg, 1), delta_der_space(alg, Fraction(1, 2)))
    assert res["passed"] and res["pairs"] == 14


@pytest.mark.parametrize("n", [2, 3])
def test_half_derivation_elements(n):
    alg = build_herm(n, Sign.PLUS)
    sub = half_der_elements(alg)
    assert sub.dim == 1 and sub.contains(alg.unit)
    assert half_der_via_elements(alg) == delta_der_space(alg, Fraction(1, 2)).subspace()


def test_half_elements_need_unital_commutative():
    with pytest.raises(FlavorMismatch):
        half_der_elements(build_herm(2, Sign.MINUS))
    with pytest.raises(NoUnit):
        half_der_elements(build_auxiliary(AuxKind.GLN, QQ, 2).__class__(
            "c", QQ, ["a"], [[((0, Fraction(1)),)]], build_herm(2, Sign.PLUS).flavor))


@pytest.mark.parametrize("n,sign", [(1, Sign.MINUS), (2, Sign.MINUS), (3, Sign.MINUS)])
def test_known_derivations_span_solver_space(n, sign):
    rep = compare_known_derivations(n, sign)
    assert rep["equal"] and rep["known_dim"] == 14 + n * (n - 1) // 2


def test_known_derivations_inside_f4():
    rep = compare_known_derivations(3, Sign.PLUS)
    assert rep["known_dim"] == 17 and rep["solver_dim"] == 52 and rep["contained"]


def test_known_maps_are_derivations():
    alg = build_herm(2, Sign.PLUS)
    for m in known_derivations(2, Sign.PLUS):
        verify_delta_map(alg, m, 1)


@pytest.mark.parametrize("n,delta", [(2, Fraction(1, 2)), (3, Fraction(1, 2)), (3, Fraction(-1))])
def test_commutator_image_in_scalars(n, delta):
    rep = lemma_xdm_space(n, delta)
    assert rep["image_in_E"]
    if (n, delta) == (2, Fraction(1, 2)):
        assert rep["dim"] == 1


def test_commutator_image_order_two_antiderivations():
    # so_2 is abelian, so the skew action cannot force the image into span{E} at order two
    rep = lemma_xdm_space(2, -1)
    assert rep["dim"] == 3 and not rep["image_in_E"]


def test_gl_cross_checks():
    g3 = gl_cross_checks(3)
    assert g3["dims"]["-1"] == 1 and g3["dims"]["1/2"] == 2 and g3["passed"]
    g2 = gl_cross_checks(2)
    assert g2["sl2_minus_one"] == 5 and g2["gl2_minus_one"] == 6
