"""delta-derivations: linear maps D with D(xy) = delta (D(x) y + x D(y)).

A map is stored as a d x d matrix ``D`` with ``D(b_q) = sum_p D[p][q] b_p``;
flattened, unknown ``p * d + q`` is ``D[p][q]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .algebra import AuxKind, Flavor, Sign, StructureAlgebra, build_auxiliary, build_herm, from_matrix
from .errors import FlavorMismatch, NoUnit, VerificationFailed
from .exactnum import QQ, Field, scalar_to_str
from .linsolve import SparseMatrix, Subspace, nullspace
from .octmat import OctMatrix, bracket
from .octonion import Octonion
from .structure import _brk_real, _real_basis

DEFAULT_DELTAS = (Fraction(0), Fraction(1), Fraction(1, 2), Fraction(-1), Fraction(2), Fraction(3),
                  Fraction(-1, 2))


def _delta_parts(delta, field: Field) -> tuple[int, int]:
    """(num, den) integers with delta = num / den in the field."""
    if field.p:
        return int(field(delta)), 1
    d = Fraction(delta)
    return d.numerator, d.denominator


def _incidence(algebra: StructureAlgebra):
    d = algebra.dim
    _, tab = algebra.int_table()
    right = [[[] for _ in range(d)] for _ in range(d)]   # right[j][k] = [(p, c_pj^k)]
    left = [[[] for _ in range(d)] for _ in range(d)]    # left[i][k] = [(p, c_ip^k)]
    for a in range(d):
        for b in range(d):
            for k, c in tab[a][b]:
                right[b][k].append((a, c))
                left[a][k].append((b, c))
    return tab, right, left


def _pairs(algebra: StructureAlgebra):
    d = algebra.dim
    if algebra.flavor is Flavor.GENERAL:
        return ((i, j) for i in range(d) for j in range(d))
    return ((i, j) for i in range(d) for j in range(i, d))


@dataclass
class DeltaDerSystem:
    """The linear system D(b_i b_j) - delta D(b_i) b_j - delta b_i D(b_j) = 0."""

    algebra: StructureAlgebra
    delta: object
    matrix: SparseMatrix

    @classmethod
    def assemble(cls, algebra: StructureAlgebra, delta) -> "DeltaDerSystem":
        d = algebra.dim
        field = algebra.field
        num, den = _delta_parts(delta, field)
        tab, right, left = _incidence(algebra)
        rows = []
        for i, j in _pairs(algebra):
            prod = tab[i][j]
            for k in range(d):
                row: dict = {}
                for l, c in prod:
                    row[k * d + l] = row.get(k * d + l, 0) + den * c
                if num:
                    for p, c in right[j][k]:
                        key = p * d + i
                        row[key] = row.get(key, 0) - num * c
                    for p, c in left[i][k]:
                        key = p * d + j
                        row[key] = row.get(key, 0) - num * c
                if field.p:
                    row = {c: v % field.p for c, v in row.items() if v % field.p}
                else:
                    row = {c: v for c, v in row.items() if v}
                if row:
                    rows.append(row)
        return cls(algebra, field(delta), SparseMatrix(len(rows), d * d, rows, field))


@dataclass
class DerivationSpace:
    delta: object
    dim: int
    basis: list                      # d x d matrices (lists of rows)
    certification: str
    algebra: dict = dc_field(default_factory=dict)
    primes_used: list = dc_field(default_factory=list)

    def subspace(self, field: Field = QQ) -> Subspace:
        d = len(self.basis[0]) if self.basis else 0
        return Subspace.spanned([_flatten(m) for m in self.basis], d * d, field) if self.basis else \
            Subspace(0, (), field)

    def to_json(self) -> dict:
        return {"delta": scalar_to_str(self.delta), "dim": self.dim, "certification": self.certification,
                "algebra": self.algebra,
                "basis": [[[scalar_to_str(x) for x in row] for row in m] for m in self.basis]}


def _flatten(m) -> list:
    return [x for row in m for x in row]


def _unflatten(v, d) -> list:
    return [list(v[p * d:(p + 1) * d]) for p in range(d)]


# --------------------------------------------------------------------------
# exact re-verification


def _int_matrix(m, field: Field):
    """(scale, integer array) with array = scale * m; object dtype when entries are large."""
    if field.p:
        arr = np.array([[int(x) for x in row] for row in m], dtype=object)
        return 1, arr
    den = 1
    for row in m:
        for x in row:
            den = math.lcm(den, Fraction(x).denominator)
    ints = [[int(Fraction(x) * den) for x in row] for row in m]
    big = max((abs(x) for row in ints for x in row), default=0)
    dtype = np.int64 if big < 2**30 else object
    return den, np.array(ints, dtype=dtype)


def _tensor_int(algebra: StructureAlgebra, dtype=np.int64):
    den, tab = algebra.int_table()
    d = algebra.dim
    t = np.zeros((d, d, d), dtype=dtype)
    for i, row in enumerate(tab):
        for j, cell in enumerate(row):
            for k, c in cell:
                t[i, j, k] = c
    return den, t


_EXACT_FLOAT = 2**52


def _absmax(a: np.ndarray) -> int:
    if a.size == 0:
        return 0
    if a.dtype == object:
        return max(abs(int(x)) for x in a.flat)
    return int(np.abs(a).max())


class _DefectChecker:
    """Evaluates the delta-derivation defect of integer-scaled maps for one algebra.

    The structure tensor is built once.  Products run in float64 when an a
    priori bound keeps every intermediate below 2**52, where the arithmetic is
    exact; otherwise int64 or Python integers are used.
    """

    def __init__(self, algebra: StructureAlgebra):
        self.algebra = algebra
        self.d = algebra.dim
        _, self.t = _tensor_int(algebra, np.int64)
        self.tmax = int(np.abs(self.t).max()) if self.t.size else 0
        self.tf = self.t.astype(np.float64)

    def defect(self, dm: np.ndarray, delta):
        field = self.algebra.field
        d = self.d
        num, den = _delta_parts(delta, field)
        dmax = _absmax(dm)
        bound = dmax * self.tmax * d * (abs(den) + 2 * abs(num))
        if field.p or bound >= _EXACT_FLOAT:
            if field.p or bound >= 2**62:
                t, dm = self.t.astype(object), dm.astype(object)
            else:
                t, dm = self.t, dm.astype(np.int64)
        else:
            t, dm = self.tf, dm.astype(np.float64)
        # lhs[i, j, k] = sum_l c_ij^l D[k][l]; the right side contracts D with the table
        lhs = (t.reshape(d * d, d) @ dm.T).reshape(d, d, d)
        r1 = np.tensordot(dm, t, axes=([0], [0]))
        r2 = np.tensordot(t, dm, axes=([1], [0])).transpose(0, 2, 1)
        defect = den * lhs - num * (r1 + r2)
        if field.p:
            defect = defect % field.p
        nz = np.argwhere(defect != 0)
        if nz.size:
            i, j, _ = nz[0]
            return int(i), int(j)
        return None


_CHECKERS: dict = {}


def _checker(algebra: StructureAlgebra) -> _DefectChecker:
    hit = _CHECKERS.get(id(algebra))
    if hit is None or hit.algebra is not algebra:
        hit = _CHECKERS[id(algebra)] = _DefectChecker(algebra)
    return hit


def delta_defect(algebra: StructureAlgebra, m, delta):
    """First basis pair (i, j) where m violates the delta-derivation rule, or None."""
    _, dm = _int_matrix(m, algebra.field)
    return _checker(algebra).defect(dm, delta)


def verify_delta_map(algebra: StructureAlgebra, m, delta):
    bad = delta_defect(algebra, m, delta)
    if bad is not None:
        raise VerificationFailed(f"map fails the delta={delta} rule on basis pair {bad}",
                                 {"pair": bad, "map": [[str(x) for x in r] for r in m]})


# --------------------------------------------------------------------------
# solving


_SOLVED: dict = {}


def delta_der_space(algebra: StructureAlgebra, delta, policy: str = "MultiModular") -> DerivationSpace:
    """Certified basis of Der_delta(A); every basis map is re-verified exactly.

    Results are memoized per algebra object, delta and policy.
    """
    field = algebra.field
    delta = field(delta)
    key = (id(algebra), delta, policy)
    hit = _SOLVED.get(key)
    if hit is not None and hit[0] is algebra:
        return hit[1]
    space = _solve_delta(algebra, delta, policy)
    _SOLVED[key] = (algebra, space)
    return space


def _solve_delta(algebra: StructureAlgebra, delta, policy: str) -> DerivationSpace:
    field = algebra.field
    system = DeltaDerSystem.assemble(algebra, delta)
    res = nullspace(system.matrix, field, policy)
    d = algebra.dim
    maps = [_unflatten(v, d) for v in res.basis]
    for m in maps:
        verify_delta_map(algebra, m, delta)
    return DerivationSpace(delta, res.dim, maps, res.certification.value, algebra.descriptor(),
                           res.primes_used)


def derivation_dimension(algebra: StructureAlgebra) -> int:
    return delta_der_space(algebra, 1).dim


def identity_map(d: int, field: Field = QQ) -> list:
    return [[field.one if p == q else field.zero for q in range(d)] for p in range(d)]


def map_on_basis(algebra: StructureAlgebra, images: Sequence[Sequence]) -> list:
    """Matrix of the map sending b_q to ``images[q]``."""
    d = algebra.dim
    return [[algebra.field(images[q][p]) for q in range(d)] for p in range(d)]


def compose(a, b, field: Field = QQ) -> list:
    """Matrix of a after b."""
    d = len(a)
    return [[sum((a[p][r] * b[r][q] for r in range(d)), field.zero) for q in range(d)] for p in range(d)]


def commutator_map(a, b, field: Field = QQ) -> list:
    ab, ba = compose(a, b, field), compose(b, a, field)
    return [[x - y for x, y in zip(r, s)] for r, s in zip(ab, ba)]


def _int_commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    bound = _absmax(a) * _absmax(b) * 2 * a.shape[0]
    if bound < _EXACT_FLOAT:
        af, bf = a.astype(np.float64), b.astype(np.float64)
        return (af @ bf - bf @ af).astype(np.int64)
    a, b = a.astype(object), b.astype(object)
    return a @ b - b @ a


def composition_check(algebra: StructureAlgebra, first: DerivationSpace, second: DerivationSpace) -> dict:
    """[D, D'] lies in Der_{delta delta'} for every pair of basis maps."""
    field = algebra.field
    target = first.delta * second.delta
    checker = _checker(algebra)
    lhs = [_int_matrix(m, field)[1] for m in first.basis]
    rhs = [_int_matrix(m, field)[1] for m in second.basis]
    checked = 0
    for i, a in enumerate(lhs):
        for j, b in enumerate(rhs):
            c = _int_commutator(a, b)
            if field.p:
                c = c % field.p
            bad = checker.defect(c, target)
            if bad is not None:
                raise VerificationFailed(f"commutator of basis maps {i}, {j} is not a {target}-derivation",
                                         {"pair": bad, "maps": (i, j)})
            checked += 1
    return {"delta": scalar_to_str(first.delta), "delta_prime": scalar_to_str(second.delta),
            "product": scalar_to_str(target), "pairs": checked, "passed": True}


def delta_scan(algebra: StructureAlgebra, deltas: Iterable = DEFAULT_DELTAS) -> dict:
    """Dimension of Der_delta for each delta, plus dim of the span of all delta-derivations."""
    deltas = [algebra.field(x) for x in deltas]
    if len(set(deltas)) != len(deltas):
        raise ValueError("deltas must be pairwise distinct")
    spaces = {}
    for x in deltas:
        spaces[x] = delta_der_space(algebra, x)
    dims = {scalar_to_str(x): s.dim for x, s in spaces.items()}
    one, half = algebra.field(1), algebra.field(Fraction(1, 2))
    ident = identity_map(algebra.dim, algebra.field)
    half_is_id = (half in spaces and spaces[half].dim == 1
                  and spaces[half].subspace(algebra.field) == Subspace.spanned(
                      [_flatten(ident)], algebra.dim ** 2, algebra.field))
    only = all(s.dim == 0 for x, s in spaces.items() if x not in (one, half))
    out = {"dims": dims, "half_is_identity": half_is_id, "only_one_and_half": only}
    if one in spaces and half_is_id and only:
        out["total_dim"] = spaces[one].dim + 1
    out["spaces"] = spaces
    return out


# --------------------------------------------------------------------------
# derivations of a unital commutative algebra at delta = 1/2


def half_der_elements(algebra: StructureAlgebra) -> Subspace:
    """Elements a with 2(xy)a - (xa)y - (ya)x = 0 for all basis pairs x, y."""
    if algebra.flavor is not Flavor.COMMUTATIVE:
        raise FlavorMismatch("needs a commutative algebra")
    if algebra.unit is None:
        raise NoUnit(f"{algebra.name} has no unit")
    field = algebra.field
    d = algebra.dim
    _, t = _tensor_int(algebra, np.int64)
    tflat = t.reshape(d, d * d)
    tpair = t.reshape(d * d, d)
    seen = set()
    rows = []
    for i in range(d):
        a = (t[i] @ tflat).reshape(d, d, d)          # a[j, r, k] = ((b_i b_j) b_r)_k
        c = (tpair @ t[:, i, :]).reshape(d, d, d)    # c[j, r, k] = ((b_j b_r) b_i)_k
        m = 2 * a - a.transpose(1, 0, 2) - c         # m[j, r, k]; (b_i b_r) b_j = a[r, j, k]
        block = m[i:].transpose(0, 2, 1).reshape(-1, d)
        if field.p:
            block = block % field.p
        block = block[np.any(block != 0, axis=1)]
        for row in np.unique(block, axis=0):
            nz = np.flatnonzero(row)
            g = 0
            for x in row[nz]:
                g = math.gcd(g, int(x))
            key = tuple((int(cc), int(row[cc]) // g) for cc in nz)
            if key[0][1] < 0:
                key = tuple((cc, -v) for cc, v in key)
            if key not in seen:
                seen.add(key)
                rows.append(dict(key))
    res = nullspace(SparseMatrix(len(rows), d, rows, field), field)
    return Subspace(d, tuple(res.basis), field)


def right_multiplication(algebra: StructureAlgebra, a: Sequence) -> list:
    return map_on_basis(algebra, [algebra.mul(algebra.basis(q), a) for q in range(algebra.dim)])


def half_der_via_elements(algebra: StructureAlgebra) -> Subspace:
    """Der_1/2 for a unital commutative algebra as {R_a : a satisfies the element equation}."""
    elems = half_der_elements(algebra)
    maps = [_flatten(right_multiplication(algebra, a)) for a in elems.basis]
    return Subspace.spanned(maps, algebra.dim ** 2, algebra.field)


# --------------------------------------------------------------------------
# explicit derivations of the octonion matrix algebras


def octonion_derivations(field: Field = QQ) -> list:
    """A basis of Der(O) as 8 x 8 matrices, from the solver."""
    return delta_der_space(build_auxiliary(AuxKind.OCTONIONS, field), 1).basis


def _entrywise(x: OctMatrix, dmat) -> OctMatrix:
    rows = []
    for r in x.rows:
        out = []
        for a in r:
            c = [sum((dmat[p][q] * a.coeffs[q] for q in range(8)), x.field.zero) for p in range(8)]
            out.append(Octonion._raw(c, x.field))
        rows.append(out)
    return OctMatrix(rows, x.field)


def known_derivations(n: int, sign: Sign | str, field: Field = QQ) -> list:
    """Inner maps ad(g (x) 1) for real skew g, and entrywise extensions of Der(O).

    Every map is checked to preserve the algebra and to be a derivation.
    """
    sign = Sign(sign) if isinstance(sign, str) else sign
    alg = build_herm(n, sign, field)
    maps = []
    for g in _real_basis(n, "skew"):
        gm = OctMatrix.from_real(n, g, 0, field)
        maps.append(map_on_basis(alg, [from_matrix(alg, bracket(gm, rep)) for rep in alg.reps]))
    for dm in octonion_derivations(field):
        maps.append(map_on_basis(alg, [from_matrix(alg, _entrywise(rep, dm)) for rep in alg.reps]))
    for m in maps:
        verify_delta_map(alg, m, 1)
    return maps


def known_derivation_span(n: int, sign: Sign | str, field: Field = QQ) -> Subspace:
    alg = build_herm(n, sign, field)
    return Subspace.spanned([_flatten(m) for m in known_derivations(n, sign, field)], alg.dim ** 2, field)


def compare_known_derivations(n: int, sign: Sign | str, field: Field = QQ) -> dict:
    alg = build_herm(n, sign, field)
    known = known_derivation_span(n, sign, field)
    solved = delta_der_space(alg, 1).subspace(field)
    contained = all(solved.contains(v) for v in known.basis)
    return {"n": n, "sign": alg.sign.value, "known_dim": known.dim, "solver_dim": solved.dim,
            "expected_known_dim": 14 + n * (n - 1) // 2, "contained": contained,
            "equal": known == solved}


# --------------------------------------------------------------------------
# maps on real symmetric matrices and gl_n


def _sym_coords(m: dict, n: int) -> list:
    return [m.get((u, v), 0) for u in range(n) for v in range(u, n)]


def lemma_xdm_space(n: int, delta, field: Field = QQ) -> dict:
    """Maps D on real symmetric n x n matrices with D([x, m]) = delta [x, D(m)] for skew x."""
    if n < 2:
        raise ValueError("needs n >= 2")
    delta = field(delta)
    if delta in (field.zero, field.one):
        raise ValueError("delta must differ from 0 and 1")
    sym, skew = _real_basis(n, "sym"), _real_basis(n, "skew")
    s = len(sym)
    num, den = _delta_parts(delta, field)
    # act[x][q] = coordinates of [x, b_q]
    act = [[_sym_coords(_brk_real(x, b), n) for b in sym] for x in skew]
    rows = []
    for xi in range(len(skew)):
        for q in range(s):
            src = act[xi][q]
            for k in range(s):
                row: dict = {}
                for l, c in enumerate(src):
                    if c:
                        row[k * s + l] = row.get(k * s + l, 0) + den * c
                for p in range(s):
                    c = act[xi][p][k]
                    if c:
                        row[p * s + q] = row.get(p * s + q, 0) - num * c
                row = {key: v for key, v in row.items() if v}
                if row:
                    rows.append(row)
    res = nullspace(SparseMatrix(len(rows), s * s, rows, field), field)
    e = [field.one if u == v else field.zero for u in range(n) for v in range(u, n)]
    e_span = Subspace.spanned([e], s, field)
    image_in_e = True
    for v in res.basis:
        m = _unflatten(v, s)
        for q in range(s):
            col = [m[p][q] for p in range(s)]
            if any(col) and not e_span.contains(col):
                image_in_e = False
    return {"n": n, "delta": scalar_to_str(delta), "dim": res.dim, "image_in_E": image_in_e,
            "space": Subspace(s * s, tuple(res.basis), field)}


def _gl_xi(n: int, field: Field) -> list:
    """The map on gl_n vanishing on sl_n with E -> E (projection along sl_n)."""
    d = n * n
    m = [[field.zero] * d for _ in range(d)]
    inv = field(Fraction(1, n))
    for u in range(n):
        for w in range(n):
            m[w * n + w][u * n + u] = inv
    return m


def gl_cross_checks(n: int, field: Field = QQ, deltas: Sequence = (Fraction(-1), Fraction(2), Fraction(3),
                                                                     Fraction(-1, 2))) -> dict:
    """delta-derivation dimensions of gl_n (and sl_2) against the split central extension picture."""
    if n < 2:
        raise ValueError("needs n >= 2")
    gl = build_auxiliary(AuxKind.GLN, field, n)
    d = n * n
    xi = _flatten(_gl_xi(n, field))
    ident = _flatten(identity_map(d, field))
    xi_span = Subspace.spanned([xi], d * d, field)
    half_span = Subspace.spanned([xi, [a - b for a, b in zip(ident, xi)]], d * d, field)
    out = {"n": n, "dims": {}, "checks": {}}
    ok = True
    for x in deltas:
        sp = delta_der_space(gl, x)
        key = scalar_to_str(field(x))
        out["dims"][key] = sp.dim
        if n > 2:
            good = sp.subspace(field) == xi_span
            out["checks"][f"delta={key} spanned by xi"] = good
            ok &= good
    sp = delta_der_space(gl, Fraction(1, 2))
    out["dims"]["1/2"] = sp.dim
    if n > 2:
        good = sp.subspace(field) == half_span
        out["checks"]["delta=1/2 spanned by xi and id on sl"] = good
        ok &= good
    out["derived_delta_zero_dim"] = delta_der_space(gl, 0).dim
    if n == 2:
        sl = build_auxiliary(AuxKind.SLN, field, 2)
        out["sl2_minus_one"] = delta_der_space(sl, -1).dim
        out["gl2_minus_one"] = out["dims"].get("-1", delta_der_space(gl, -1).dim)
        ok &= out["sl2_minus_one"] == 5 and out["gl2_minus_one"] == 6
    else:
        ok &= all(v == 1 for k, v in out["dims"].items() if k != "1/2") and out["dims"]["1/2"] == 2
    out["passed"] = bool(ok)
    return out
