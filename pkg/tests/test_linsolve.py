from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from octlab.algebra import AuxKind, Sign, build_auxiliary
from octlab.deltader import DeltaDerSystem
from octlab.exactnum import QQ, GF
from octlab.forms import trace_form_gram
from octlab.linsolve import (WORD_PRIMES, Echelon, Policy, SparseMatrix, Subspace, crt_pair, nullspace,
                             rank, rank_mod_p, rational_reconstruct, rref_mod_p, verify_kernel_exact)


def test_identity_has_trivial_kernel():
    m = SparseMatrix.from_dense([[int(i == j) for j in range(5)] for i in range(5)])
    assert nullspace(m).dim == 0


def test_single_row():
    res = nullspace(SparseMatrix.from_dense([[1, 1]]))
    assert res.dim == 1
    assert res.basis == [(Fraction(1), Fraction(-1))]


def test_imaginary_octonion_derivations():
    sys = DeltaDerSystem.assemble(build_auxiliary(AuxKind.IMAGINARY_OCTONIONS), 1)
    res = nullspace(sys.matrix)
    assert res.dim == 14
    assert verify_kernel_exact(sys.matrix, res.basis)
    assert len(res.primes_used) >= 3


def test_rank_examples():
    assert rank(SparseMatrix(3, 4, [{}, {}, {}])) == 0
    assert rank(SparseMatrix.from_dense(trace_form_gram(2, Sign.PLUS))) == 10
    assert rank(SparseMatrix.from_dense(trace_form_gram(3, Sign.MINUS))) == 45


def test_kernel_over_prime_field():
    f = GF(7)
    m = SparseMatrix.from_dense([[1, 2, 3], [2, 4, 6]], f)
    res = nullspace(m, f)
    assert res.dim == 2
    assert verify_kernel_exact(m, res.basis)


def test_rational_reconstruction():
    m = WORD_PRIMES[0] * WORD_PRIMES[1]
    for q in (Fraction(-3, 7), Fraction(22, 5), Fraction(0), Fraction(1, 12345)):
        a = q.numerator * pow(q.denominator, -1, m) % m
        assert rational_reconstruct(a, m) == q


def test_crt():
    r, m = crt_pair(2, 5, 3, 7)
    assert m == 35 and r % 5 == 2 and r % 7 == 3


def test_mod_p_rref():
    a = np.array([[2, 4, 1], [1, 2, 0]], dtype=np.int64)
    r, piv = rref_mod_p(a, 11)
    assert piv == [0, 2]
    assert rank_mod_p(a, 11) == 2


def test_echelon_membership():
    e = Echelon(3, QQ)
    assert e.add([1, 1, 0]) and e.add([0, 1, 1]) and not e.add([1, 2, 1])
    sub = e.subspace()
    assert sub.dim == 2 and sub.contains([2, 3, 1]) and not sub.contains([1, 0, 0])
    assert Subspace.full(3).is_full()


def test_dump_load_round_trip():
    m = SparseMatrix.from_triples(3, 4, [(0, 1, Fraction(1, 2)), (2, 3, -5)])
    back = SparseMatrix.load(m.dump())
    assert back.dump() == m.dump() and back.nnz() == 2


def test_duplicate_rows_do_not_change_kernel():
    rows = [[1, 2, 0, 1], [0, 1, 1, 1]]
    m1 = SparseMatrix.from_dense(rows)
    m2 = SparseMatrix.from_dense(rows + rows + [[2, 4, 0, 2]])
    assert nullspace(m1).basis == nullspace(m2).basis
    assert m2.deduplicated().nrows <= 3


small_ints = st.integers(min_value=-4, max_value=4)


@st.composite
def int_matrices(draw):
    r = draw(st.integers(min_value=1, max_value=6))
    c = draw(st.integers(min_value=1, max_value=7))
    return [[draw(small_ints) for _ in range(c)] for _ in range(r)]


@settings(max_examples=80, deadline=None)
@given(int_matrices())
def test_policies_agree_with_sympy(rows):
    m = SparseMatrix.from_dense(rows)
    mm = nullspace(m, policy=Policy.MULTIMODULAR)
    direct = nullspace(m, policy=Policy.DIRECT)
    assert mm.basis == direct.basis
    ref = sympy.Matrix(rows)
    assert mm.dim == len(ref.nullspace())
    assert rank(m) == ref.rank()
    assert rank(m) + mm.dim == len(rows[0])
    assert verify_kernel_exact(m, mm.basis)
    # canonical form: each vector's leading entry is 1
    for v in mm.basis:
        assert next(x for x in v if x) == 1


@settings(max_examples=30, deadline=None)
@given(int_matrices())
def test_results_are_deterministic(rows):
    m = SparseMatrix.from_dense(rows)
    assert nullspace(m).basis == nullspace(m).basis


@pytest.mark.parametrize("p,expected", [(5, 1), (10007, 2)])
def test_prime_field_rank_depends_on_characteristic(p, expected):
    rows = [[1, 0], [0, 5]]
    assert rank(SparseMatrix.from_dense(rows, GF(p)), GF(p)) == expected
