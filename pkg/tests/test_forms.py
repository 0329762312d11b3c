from fractions import Fraction

import pytest

from octlab.algebra import AuxKind, Sign, build_auxiliary, build_herm
from octlab.errors import NotProportional
from octlab.exactnum import QQ
from octlab.forms import (assoc_form_space, form_match, gram_rank, is_associative, killing_restriction_check,
                          proportionality, trace_form_block_table, trace_form_gram)


@pytest.mark.parametrize("n,sign", [(2, Sign.PLUS), (1, Sign.MINUS), (2, Sign.MINUS), (3, Sign.PLUS)])
def test_unique_invariant_form(n, sign):
    sol = assoc_form_space(build_herm(n, sign))
    assert sol.dim == 1 and sol.nondegenerate == [True]
    lam = form_match(sol, trace_form_gram(n, sign))
    assert lam != 0


def test_gl2_has_two_forms():
    assert assoc_form_space(build_auxiliary(AuxKind.GLN, QQ, 2)).dim == 2


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("sign", list(Sign))
def test_trace_form_matches_block_rules(n, sign):
    g = trace_form_gram(n, sign)
    assert g == trace_form_block_table(n, sign)
    assert gram_rank(g) == len(g)
    assert is_associative(build_herm(n, sign), g) is None


def test_proportionality():
    g = trace_form_gram(2, Sign.PLUS)
    assert proportionality(g, g) == 1
    assert proportionality([[Fraction(0)]], [[Fraction(3)]]) == 0
    with pytest.raises(NotProportional):
        proportionality([[1, 0], [0, 2]], [[1, 0], [0, 1]])


@pytest.mark.parametrize("n", [3, 4])
def test_killing_restriction(n):
    rep = killing_restriction_check(n)
    assert rep["proportional"]
    # Killing form of so_n is (n - 2) Tr(xy); the restricted form is 2 Tr(xy)
    assert Fraction(rep["constant"]) == Fraction(2, n - 2)
