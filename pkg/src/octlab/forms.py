"""Symmetric associative bilinear forms and the octonion trace form."""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .algebra import AuxKind, Sign, StructureAlgebra, build_auxiliary, build_herm
from .errors import NotProportional, OctlabError, VerificationFailed
from .exactnum import QQ, Field, scalar_to_str
from .linsolve import SparseMatrix, nullspace, rank
from .octmat import trace_form
from .octonion import Octonion, oct_norm_polar


@dataclass
class BilinearFormSolution:
    dim: int
    basis: list                                  # symmetric Gram matrices
    ranks: list = dc_field(default_factory=list)
    certification: str = ""

    @property
    def nondegenerate(self) -> list:
        return [r == len(g) for r, g in zip(self.ranks, self.basis)]

    def to_json(self) -> dict:
        return {"dim": self.dim, "ranks": self.ranks, "nondegenerate": self.nondegenerate,
                "certification": self.certification,
                "basis": [[[scalar_to_str(x) for x in row] for row in g] for g in self.basis]}


def _tri_index(d: int):
    idx = {}
    for a in range(d):
        for b in range(a, d):
            idx[(a, b)] = len(idx)
    return idx


def gram_rank(gram, field: Field = QQ) -> int:
    return rank(SparseMatrix.from_dense(gram, field), field)


def is_associative(algebra: StructureAlgebra, gram) -> tuple | None:
    """First basis triple (i, j, k) with G(b_i b_j, b_k) != G(b_i, b_j b_k), or None."""
    d = algebra.dim
    zero = algebra.field.zero
    for i in range(d):
        for j in range(d):
            left = algebra.table[i][j]
            for k in range(d):
                lhs = sum((c * gram[l][k] for l, c in left), zero)
                rhs = sum((c * gram[i][l] for l, c in algebra.table[j][k]), zero)
                if lhs != rhs:
                    return i, j, k
    return None


def is_symmetric(gram) -> bool:
    return all(gram[a][b] == gram[b][a] for a in range(len(gram)) for b in range(a))


def assoc_form_space(algebra: StructureAlgebra) -> BilinearFormSolution:
    """All symmetric G with G(xy, z) = G(x, yz), solved over the upper triangle of G."""
    d = algebra.dim
    field = algebra.field
    idx = _tri_index(d)

    def key(a, b):
        return idx[(a, b)] if a <= b else idx[(b, a)]

    _, tab = algebra.int_table()
    rows = []
    for i in range(d):
        for j in range(d):
            left = tab[i][j]
            for k in range(d):
                row: dict = {}
                for l, c in left:
                    kk = key(l, k)
                    row[kk] = row.get(kk, 0) + c
                for l, c in tab[j][k]:
                    kk = key(i, l)
                    row[kk] = row.get(kk, 0) - c
                if field.p:
                    row = {a: v % field.p for a, v in row.items() if v % field.p}
                else:
                    row = {a: v for a, v in row.items() if v}
                if row:
                    rows.append(row)
    res = nullspace(SparseMatrix(len(rows), len(idx), rows, field), field)
    grams = []
    for v in res.basis:
        g = [[v[key(a, b)] for b in range(d)] for a in range(d)]
        bad = is_associative(algebra, g)
        if bad is not None or not is_symmetric(g):
            raise VerificationFailed(f"solver form fails associativity at {bad}", {"triple": bad})
        grams.append(g)
    ranks = [gram_rank(g, field) for g in grams]
    return BilinearFormSolution(res.dim, grams, ranks, res.certification.value)


def trace_form_gram(n: int, sign: Sign | str, field: Field = QQ) -> list:
    """Gram matrix of the octonion-matrix trace form on the canonical basis, verified."""
    alg = build_herm(n, sign, field)
    reps = alg.reps
    d = alg.dim
    g = [[field.zero] * d for _ in range(d)]
    for a in range(d):
        for b in range(a, d):
            v = trace_form(reps[a], reps[b])
            g[a][b] = v
            if a != b:
                g[b][a] = trace_form(reps[b], reps[a])
    if not is_symmetric(g):
        raise VerificationFailed("trace form Gram matrix is not symmetric", {})
    bad = is_associative(alg, g)
    if bad is not None:
        raise VerificationFailed(f"trace form is not associative at {bad}", {"triple": bad})
    return g


def _real_trace(a: dict, b: dict) -> Fraction:
    return sum((Fraction(x) * y for (i, j), x in a.items() for (j2, i2), y in b.items()
                if j == j2 and i == i2), Fraction(0))


def trace_form_block_table(n: int, sign: Sign | str, field: Field = QQ) -> list:
    """Gram matrix predicted by the block rules: 2 Tr on the real block, 0 across,
    N(a, b) Tr on imaginary blocks."""
    sign = Sign(sign) if isinstance(sign, str) else sign
    alg = build_herm(n, sign, field)
    d = alg.dim
    reals = []
    for i, rep in enumerate(alg.reps):
        k = next(k for k in range(8) for r in rep.rows for a in r if a.coeffs[k])
        mat = {(u, v): rep[u, v].coeffs[k] for u in range(n) for v in range(n) if rep[u, v].coeffs[k]}
        reals.append((k, mat))
    g = [[field.zero] * d for _ in range(d)]
    for a in range(d):
        ka, ma = reals[a]
        for b in range(d):
            kb, mb = reals[b]
            tr = _real_trace(ma, mb)
            if ka == 0 and kb == 0:
                g[a][b] = field(2 * tr)
            elif ka and kb:
                nab = oct_norm_polar(Octonion.unit(ka, field), Octonion.unit(kb, field))
                g[a][b] = field(nab * tr)
    return g


def form_match(solution: BilinearFormSolution, gram) -> Fraction:
    """lambda with solution form = lambda * gram, verified entrywise."""
    if solution.dim != 1:
        raise NotProportional(f"form space has dim {solution.dim}, expected 1")
    return proportionality(solution.basis[0], gram)


def proportionality(a, b):
    """lambda with a = lambda * b exactly; NotProportional otherwise."""
    lam = None
    for ra, rb in zip(a, b):
        for x, y in zip(ra, rb):
            if y:
                lam = x / y
                break
        if lam is not None:
            break
    if lam is None:
        if any(x for r in a for x in r):
            raise NotProportional("reference form is zero, candidate is not")
        return Fraction(0)
    for ra, rb in zip(a, b):
        for x, y in zip(ra, rb):
            if x != lam * y:
                raise NotProportional(f"entries {x} and {y} break the ratio {lam}")
    return lam


def killing_form(algebra: StructureAlgebra) -> list:
    """Tr(ad x ad y) on the basis, with ad_i[k][l] = c_il^k."""
    d = algebra.dim
    zero = algebra.field.zero
    ad = []
    for i in range(d):
        m = [[zero] * d for _ in range(d)]
        for l in range(d):
            for k, c in algebra.table[i][l]:
                m[k][l] = c
        ad.append(m)
    return [[sum((ad[i][k][l] * ad[j][l][k] for k in range(d) for l in range(d)), zero)
             for j in range(d)] for i in range(d)]


def killing_restriction_check(n: int, field: Field = QQ) -> dict:
    """Restriction of the trace form on sym- to the real skew block versus the Killing form of so_n."""
    if n < 3:
        raise ValueError("needs n >= 3")
    gram = trace_form_gram(n, Sign.MINUS, field)
    alg = build_herm(n, Sign.MINUS, field)
    lo, hi = alg.blocks["real"]
    block = [row[lo:hi] for row in gram[lo:hi]]
    so = build_auxiliary(AuxKind.SON, field, n)
    if so.labels != alg.labels[lo:hi]:
        raise OctlabError("so_n basis does not line up with the real block")
    kill = killing_form(so)
    const = proportionality(block, kill)
    return {"n": n, "constant": scalar_to_str(const), "proportional": const != 0}
