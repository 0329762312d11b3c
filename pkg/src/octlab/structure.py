"""Ideals, simplicity certificates, the centroid, kernel lemmas and identity checks."""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

import numpy as np
from sympy import ZZ
from sympy.polys.galoistools import gf_factor

from .algebra import AuxKind, Flavor, StructureAlgebra, build_auxiliary
from .errors import DegenerateAlgebra, FlavorMismatch, OctlabError, PrimeDividesDenominator
from .exactnum import QQ, Field
from .linsolve import (Echelon, SparseMatrix, Subspace, matmul_mod_p, nullspace, nullspace_mod_p,
                       rank_mod_p, rref_mod_p)

DEFAULT_PRIMES = (5, 7, 11, 13, 10007, 10009)
CLOSURE_PRIME = 10007


# --------------------------------------------------------------------------
# ideal closure


def _closure_mod_p(algebra: StructureAlgebra, gens: np.ndarray, p: int) -> int:
    """Dimension of the ideal generated by ``gens`` modulo p."""
    d = algebra.dim
    t = algebra.tensor_mod(p).astype(np.float64)
    left = t.reshape(d, d * d)                       # b_i * b_j, indexed by i
    right = t.transpose(1, 0, 2).reshape(d, d * d)   # b_i * b_j, indexed by j
    general = algebra.flavor is Flavor.GENERAL
    b, piv = rref_mod_p(gens % p, p)
    while True:
        r = len(piv)
        if r in (0, d):
            return r
        bf = b.astype(np.float64)
        parts = [b, (np.rint(bf @ left) % p).astype(np.int64).reshape(r * d, d)]
        if general:
            parts.append((np.rint(bf @ right) % p).astype(np.int64).reshape(r * d, d))
        b, piv = rref_mod_p(np.vstack(parts), p)
        if len(piv) == r:
            return r


def _p_integral(vecs, p) -> bool:
    return all(not isinstance(x, Fraction) or x.denominator % p for v in vecs for x in v)


def ideal_closure(algebra: StructureAlgebra, generators: Sequence[Sequence]) -> Subspace:
    """Smallest two-sided ideal containing ``generators``.

    Over the rationals a closure that is already full modulo a word-sized
    prime is full over Q (the reductions of the product words span), so the
    exact computation only runs when the ideal might be proper.
    """
    field = algebra.field
    d = algebra.dim
    gens = [tuple(field(x) for x in g) for g in generators]
    if not any(any(g) for g in gens):
        return Subspace(d, (), field)
    if field.is_rational and d * CLOSURE_PRIME ** 2 < 2**53 and _p_integral(gens, CLOSURE_PRIME):
        try:
            algebra.tensor_mod(CLOSURE_PRIME)
            arr = np.array([[int(field_mod(x, CLOSURE_PRIME)) for x in g] for g in gens], dtype=np.int64)
            if _closure_mod_p(algebra, arr, CLOSURE_PRIME) == d:
                return Subspace.full(d, field)
        except PrimeDividesDenominator:
            pass
    ideal = _closure_exact(algebra, gens)
    _verify_ideal(algebra, ideal)
    return ideal


def field_mod(x, p):
    x = Fraction(x)
    return x.numerator * pow(x.denominator, -1, p) % p


def _closure_exact(algebra, gens):
    ech = Echelon(algebra.dim, algebra.field)
    queue = [g for g in gens if ech.add(g)]
    general = algebra.flavor is Flavor.GENERAL
    while queue:
        new = []
        for u in queue:
            for j in range(algebra.dim):
                prods = [algebra.mul_basis_right(u, j)]
                if general:
                    prods.append(algebra.mul(algebra.basis(j), u))
                for pr in prods:
                    if pr and ech.add(pr):
                        v = [algebra.field.zero] * algebra.dim
                        for k, c in (pr.items() if isinstance(pr, dict) else enumerate(pr)):
                            v[k] = c
                        new.append(tuple(v))
        queue = new
    return ech.subspace()


def _verify_ideal(algebra: StructureAlgebra, sub: Subspace):
    """Assert A*I and I*A lie in I, with exact membership."""
    ech = Echelon(algebra.dim, algebra.field)
    for b in sub.basis:
        ech.add(b)
    for v in sub.basis:
        for j in range(algebra.dim):
            bj = algebra.basis(j)
            for pr in (algebra.mul(v, bj), algebra.mul(bj, v)):
                if not ech.contains(pr):
                    raise OctlabError("closure is not an ideal")


def is_ideal(algebra: StructureAlgebra, sub: Subspace) -> bool:
    try:
        _verify_ideal(algebra, sub)
    except OctlabError:
        return False
    return True


# --------------------------------------------------------------------------
# irreducibility test over a prime field


class Verdict(enum.Enum):
    SIMPLE_CERTIFIED = "SimpleCertified"
    SIMPLE_EVIDENCE = "SimpleEvidence"
    NOT_SIMPLE = "NotSimple"
    INCONCLUSIVE = "Inconclusive"


class Method(enum.Enum):
    IRREDUCIBILITY_TEST = "IrreducibilityTest"
    RANDOM_GENERATION = "RandomGeneration"


@dataclass
class SimplicityCertificate:
    verdict: Verdict
    method: Method
    witnesses: list = dc_field(default_factory=list)
    field: str = "q"
    details: dict = dc_field(default_factory=dict)

    @property
    def simple(self) -> bool:
        return self.verdict in (Verdict.SIMPLE_CERTIFIED, Verdict.SIMPLE_EVIDENCE)


def charpoly_mod_p(m: np.ndarray, p: int) -> list[int]:
    """Characteristic polynomial via Hessenberg reduction; coefficients high to low."""
    h = np.array(m, dtype=np.int64) % p
    n = h.shape[0]
    for j in range(n - 2):
        nz = np.flatnonzero(h[j + 1:, j])
        if nz.size == 0:
            continue
        i = j + 1 + int(nz[0])
        if i != j + 1:
            h[[i, j + 1]] = h[[j + 1, i]]
            h[:, [i, j + 1]] = h[:, [j + 1, i]]
        inv = pow(int(h[j + 1, j]), -1, p)
        for k in range(j + 2, n):
            if h[k, j]:
                u = int(h[k, j]) * inv % p
                h[k] = (h[k] - u * h[j + 1]) % p
                h[:, j + 1] = (h[:, j + 1] + u * h[:, k]) % p
    hl = h.tolist()
    # polys stored low to high
    polys = [[1]]
    for mi in range(1, n + 1):
        c = hl[mi - 1][mi - 1]
        prev = polys[mi - 1]
        cur = [0] + prev
        for t, a in enumerate(prev):
            cur[t] = (cur[t] - c * a) % p
        prod = 1
        for i in range(mi - 1, 0, -1):
            prod = prod * hl[i][i - 1] % p
            if not prod:
                break
            coef = hl[i - 1][mi - 1] * prod % p
            if coef:
                for t, a in enumerate(polys[i - 1]):
                    cur[t] = (cur[t] - coef * a) % p
        polys.append(cur)
    return polys[n][::-1]


def _poly_at(f: list[int], m: np.ndarray, p: int) -> np.ndarray:
    n = m.shape[0]
    acc = np.zeros((n, n), dtype=np.int64)
    eye = np.eye(n, dtype=np.int64)
    for c in f:
        acc = (matmul_mod_p(acc, m, p) + c * eye) % p
    return acc


def _spin(vecs: np.ndarray, gcat: np.ndarray, d: int, p: int) -> np.ndarray:
    """Smallest subspace containing ``vecs`` and stable under v -> v G_b."""
    b, piv = rref_mod_p(np.atleast_2d(vecs) % p, p)
    while len(piv) < d:
        r = len(piv)
        imgs = matmul_mod_p(b, gcat, p).reshape(-1, d)
        b, piv = rref_mod_p(np.vstack([b, imgs]), p)
        if len(piv) == r:
            break
    return b


def _generators_mod_p(algebra: StructureAlgebra, p: int) -> np.ndarray:
    t = algebra.tensor_mod(p)
    gens = [t[b] for b in range(algebra.dim)]
    if algebra.flavor is Flavor.GENERAL:
        gens += [t[:, b, :] for b in range(algebra.dim)]
    return np.array(gens, dtype=np.int64)


def _cat(gens: np.ndarray) -> np.ndarray:
    g, d, _ = gens.shape
    return gens.transpose(1, 0, 2).reshape(d, g * d)


def irreducibility_test(algebra: StructureAlgebra, p: int, seed: int = 0,
                        attempts: int = 40) -> SimplicityCertificate:
    """Holt-Rees style test of A as a module over its multiplication algebra mod p."""
    d = algebra.dim
    gens = _generators_mod_p(algebra, p)
    if not gens.any():
        raise DegenerateAlgebra(f"{algebra.name}: A*A = 0")
    rng = random.Random(seed)
    gcat = _cat(gens)
    gcat_t = _cat(gens.transpose(0, 2, 1))
    flat = gens.reshape(len(gens), d * d)

    def rand_comb():
        c = np.array([rng.randrange(p) for _ in range(len(gens))], dtype=np.int64)
        return matmul_mod_p(c[None, :], flat, p).reshape(d, d)

    for attempt in range(attempts):
        theta = (rand_comb() + matmul_mod_p(rand_comb(), rand_comb(), p)) % p
        cp = charpoly_mod_p(theta, p)
        _, factors = gf_factor(cp, p, ZZ)
        for f, _mult in sorted(factors, key=lambda fm: (len(fm[0]), fm[0])):
            deg = len(f) - 1
            ft = _poly_at(f, theta, p)
            left = nullspace_mod_p(ft.T, p)
            if left.shape[0] == 0:
                continue
            sub = _spin(left[0], gcat, d, p)
            if sub.shape[0] < d:
                return _not_simple(algebra, p, sub, attempt, "spin")
            if left.shape[0] != deg:
                continue
            right = nullspace_mod_p(ft, p)
            dual = _spin(right[0], gcat_t, d, p)
            if dual.shape[0] < d:
                ann = nullspace_mod_p(dual, p)
                return _not_simple(algebra, p, ann, attempt, "dual spin")
            return SimplicityCertificate(
                Verdict.SIMPLE_CERTIFIED, Method.IRREDUCIBILITY_TEST, [], f"fp:{p}",
                {"attempt": attempt, "factor_degree": deg, "seed": seed})
    return SimplicityCertificate(Verdict.INCONCLUSIVE, Method.IRREDUCIBILITY_TEST, [], f"fp:{p}",
                                 {"attempts": attempts, "seed": seed})


def _not_simple(algebra, p, sub, attempt, how):
    d = algebra.dim
    gens = _generators_mod_p(algebra, p)
    r = sub.shape[0]
    if not 0 < r < d:
        raise OctlabError("witness is not a proper nonzero subspace")
    for g in gens:
        if rank_mod_p(np.vstack([sub, matmul_mod_p(sub, g, p)]), p) != r:
            raise OctlabError("witness is not an ideal")
    # two-sided: also right multiplications for (anti)commutative algebras are +-L
    t = algebra.tensor_mod(p)
    for b in range(d):
        if rank_mod_p(np.vstack([sub, matmul_mod_p(sub, t[:, b, :], p)]), p) != r:
            raise OctlabError("witness is not a two-sided ideal")
    return SimplicityCertificate(Verdict.NOT_SIMPLE, Method.IRREDUCIBILITY_TEST,
                                 [[int(x) for x in row] for row in sub], f"fp:{p}",
                                 {"attempt": attempt, "found_by": how, "ideal_dim": r})


def certify_simple(algebra: StructureAlgebra, trials: int = 20, primes: Sequence[int] = DEFAULT_PRIMES,
                   seed: int = 0, min_certified: int = 3) -> SimplicityCertificate:
    """Simplicity certificate.

    Over F_p this is the module irreducibility test.  Over Q the ideal
    generated by every basis element and by ``trials`` random elements must
    be the whole algebra, and the reductions at the listed primes (those not
    dividing a denominator) must each be certified simple.  The combined
    verdict over Q is evidence, not a proof.
    """
    d = algebra.dim
    if not any(algebra.table[i][j] for i in range(d) for j in range(d)):
        raise DegenerateAlgebra(f"{algebra.name}: A*A = 0")
    if not algebra.field.is_rational:
        return irreducibility_test(algebra, algebra.field.p, seed)
    rng = random.Random(seed)
    gens = [algebra.basis(i) for i in range(d)] + [algebra.random_element(rng) for _ in range(trials)]
    for g in gens:
        sub = ideal_closure(algebra, [g])
        if 0 < sub.dim < d:
            return SimplicityCertificate(Verdict.NOT_SIMPLE, Method.RANDOM_GENERATION,
                                         [[str(x) for x in b] for b in sub.basis], "q",
                                         {"generator": [str(x) for x in g], "ideal_dim": sub.dim})
    den = algebra.denominators()
    modular = {}
    for p in primes:
        if den % p == 0:
            continue
        cert = irreducibility_test(algebra, p, seed)
        modular[p] = cert.verdict.value
    certified = [p for p, v in modular.items() if v == Verdict.SIMPLE_CERTIFIED.value]
    details = {"closures": len(gens), "seed": seed, "modular": modular,
               "note": "full ideal closures over Q plus modular irreducibility; evidence, not a proof over Q"}
    verdict = Verdict.SIMPLE_EVIDENCE if len(certified) >= min(min_certified, len(modular)) else Verdict.INCONCLUSIVE
    return SimplicityCertificate(verdict, Method.RANDOM_GENERATION, [], "q", details)


# --------------------------------------------------------------------------
# centroid


def centroid_system(algebra: StructureAlgebra) -> SparseMatrix:
    """Rows for G(b_i b_j) = G(b_i) b_j (and = b_i G(b_j) for general algebras)."""
    d = algebra.dim
    den, tab = algebra.int_table()
    rows = []
    right = [[[] for _ in range(d)] for _ in range(d)]   # right[j][k] = [(p, c_pj^k)]
    left = [[[] for _ in range(d)] for _ in range(d)]    # left[i][k] = [(p, c_ip^k)]
    for a in range(d):
        for b in range(d):
            for k, c in tab[a][b]:
                right[b][k].append((a, c))
                left[a][k].append((b, c))
    general = algebra.flavor is Flavor.GENERAL
    for i in range(d):
        for j in range(d):
            prod = tab[i][j]
            for k in range(d):
                base = {}
                for l, c in prod:
                    base[k * d + l] = base.get(k * d + l, 0) + c
                row = dict(base)
                for p, c in right[j][k]:
                    row[p * d + i] = row.get(p * d + i, 0) - c
                if any(row.values()):
                    rows.append(row)
                if general:
                    row = dict(base)
                    for p, c in left[i][k]:
                        row[p * d + j] = row.get(p * d + j, 0) - c
                    if any(row.values()):
                        rows.append(row)
    return SparseMatrix(len(rows), d * d, rows, algebra.field)


def centroid(algebra: StructureAlgebra) -> Subspace:
    """All maps commuting with every left and right multiplication, as flattened d x d matrices.

    Entry ``p * d + q`` of a basis vector is G[p][q], where G(b_q) = sum_p G[p][q] b_p.
    """
    res = nullspace(centroid_system(algebra), algebra.field)
    return Subspace(algebra.dim ** 2, tuple(res.basis), algebra.field)


# --------------------------------------------------------------------------
# kernel lemmas on real matrices


def _real_basis(n, kind):
    out = []
    for u in range(n):
        for v in range(u, n):
            if kind == "sym":
                m = {(u, v): 1, (v, u): 1} if u != v else {(u, u): 1}
            elif u != v:
                m = {(u, v): 1, (v, u): -1}
            else:
                continue
            out.append(m)
    return out


def _rm(a, b):
    out = {}
    for (i, j), x in a.items():
        for (j2, k), y in b.items():
            if j == j2:
                out[(i, k)] = out.get((i, k), 0) + x * y
    return out


def _kernel_of_products(n, domain, others, product, field):
    """Kernel of x -> (product(x, o))_o over x in span(domain)."""
    rows = {}
    for oi, o in enumerate(others):
        for xi, x in enumerate(domain):
            for key, c in product(x, o).items():
                if c:
                    r = (oi, key)
                    rows.setdefault(r, {})[xi] = rows.setdefault(r, {}).get(xi, 0) + c
    mat = SparseMatrix(len(rows), len(domain), list(rows.values()), field)
    return nullspace(mat, field)


def _jord_real(a, b):
    x, y = _rm(a, b), _rm(b, a)
    return {k: Fraction(x.get(k, 0) + y.get(k, 0), 2) for k in set(x) | set(y)}


def _brk_real(a, b):
    x, y = _rm(a, b), _rm(b, a)
    return {k: x.get(k, 0) - y.get(k, 0) for k in set(x) | set(y)}


def lemma_kernels(n: int, field: Field = QQ) -> dict:
    """(a) x o M- = 0 forces x = 0 on skew matrices; (b) [m, M-] = 0 and [m, M+] = 0 force m in span{E}."""
    if n < 2:
        raise ValueError("kernel lemmas need n >= 2")
    skew, sym = _real_basis(n, "skew"), _real_basis(n, "sym")
    identity = [field.one if (u == v) else field.zero for u in range(n) for v in range(u, n)]
    e_span = Subspace.spanned([identity], len(sym), field)
    a = _kernel_of_products(n, skew, skew, _jord_real, field)
    b_minus = _kernel_of_products(n, sym, skew, _brk_real, field)
    b_plus = _kernel_of_products(n, sym, sym, _brk_real, field)
    sub_minus = b_minus.as_subspace(field) if b_minus.dim else Subspace(len(sym), (), field)
    sub_plus = b_plus.as_subspace(field) if b_plus.dim else Subspace(len(sym), (), field)
    out = {
        "n": n,
        "skew_jordan_kernel_dim": a.dim,
        "sym_bracket_skew_kernel_dim": b_minus.dim,
        "sym_bracket_sym_kernel_dim": b_plus.dim,
        "sym_bracket_skew_kernel_is_E": sub_minus == e_span,
        "sym_bracket_sym_kernel_is_E": sub_plus == e_span,
    }
    out["passed"] = (a.dim == 0 and out["sym_bracket_skew_kernel_is_E"] and out["sym_bracket_sym_kernel_is_E"])
    return out


# --------------------------------------------------------------------------
# polynomial identities


class Identity(enum.Enum):
    COMMUTATIVE = "Commutative"
    ANTICOMMUTATIVE = "Anticommutative"
    JACOBI = "Jacobi"
    JORDAN = "Jordan"
    MALCEV = "Malcev"


@dataclass
class IdentityResult:
    identity: Identity
    holds: bool
    witness: tuple | None = None
    value: list | None = None
    checked: int = 0

    def to_json(self) -> dict:
        return {"identity": self.identity.value, "holds": self.holds, "witness": self.witness,
                "value": self.value, "checked": self.checked}


def _int_tensor(algebra: StructureAlgebra) -> tuple[int, np.ndarray]:
    """(L, T) with T[i, j, k] = L c_ij^k as exact float64 integers."""
    den, tab = algebra.int_table()
    if not algebra.field.is_rational:
        raise OctlabError("identity checks run over the rationals")
    d = algebra.dim
    t = np.zeros((d, d, d), dtype=np.float64)
    for i, row in enumerate(tab):
        for j, cell in enumerate(row):
            for k, c in cell:
                t[i, j, k] = c
    return den, t


def identity_check(algebra: StructureAlgebra, identity: Identity | str) -> IdentityResult:
    """Exhaustive check of a multilinear identity on basis tuples.

    Returns ``holds`` or the first failing basis tuple with the (exact)
    coordinate vector of the nonzero value.
    """
    identity = Identity(identity) if isinstance(identity, str) else identity
    fl = algebra.flavor
    if identity is Identity.JORDAN and fl is not Flavor.COMMUTATIVE:
        raise FlavorMismatch("the Jordan identity needs a commutative algebra")
    if identity in (Identity.JACOBI, Identity.MALCEV) and fl is not Flavor.ANTICOMMUTATIVE:
        raise FlavorMismatch(f"the {identity.value} identity needs an anticommutative algebra")
    d = algebra.dim
    if identity in (Identity.COMMUTATIVE, Identity.ANTICOMMUTATIVE):
        s = 1 if identity is Identity.COMMUTATIVE else -1
        count = 0
        for i in range(d):
            for j in range(i, d):
                count += 1
                x, y = algebra.basis(i), algebra.basis(j)
                v = [a - s * b for a, b in zip(algebra.mul(x, y), algebra.mul(y, x))]
                if identity is Identity.ANTICOMMUTATIVE and i == j:
                    v = list(algebra.mul(x, x))
                if any(v):
                    return IdentityResult(identity, False, (i, j), [str(c) for c in v], count)
        return IdentityResult(identity, True, None, None, count)
    den, t = _int_tensor(algebra)
    if identity is Identity.JORDAN:
        return _jordan_check(algebra, den, t)
    if identity is Identity.JACOBI:
        return _jacobi_check(algebra, den, t)
    return _malcev_check(algebra, den, t)


def _values(vec, scale) -> list[str]:
    return [str(Fraction(int(round(x)), scale)) for x in vec]


def _jordan_check(algebra, den, t) -> IdentityResult:
    # right multiplication operators in row convention: y R_x = y x
    d = algebra.dim
    r = t.transpose(1, 0, 2)                 # r[x][y, k] = c_yx^k
    rflat = r.reshape(d, d * d)
    count = 0
    for a in range(d):
        ra = t[a] @ rflat                    # ra[c] = L * R_{x_a x_c} (flattened)
        ra = ra.reshape(d, d, d)
        for b in range(a, d):
            rb = (t[b] @ rflat).reshape(d, d, d)
            rab = ra[b]
            cs = np.arange(b, d)
            # F = sum over the three ways of splitting {a, b, c} into a pair and a single
            f = (rab @ r[cs] - r[cs] @ rab) + (rb[cs] @ r[a] - r[a] @ rb[cs]) + (ra[cs] @ r[b] - r[b] @ ra[cs])
            count += len(cs) * d
            nz = np.argwhere(f != 0)
            if nz.size:
                ci, y, _ = nz[0]
                c = int(cs[ci])
                return IdentityResult(Identity.JORDAN, False, (a, b, c, int(y)),
                                      _values(f[ci, y], den ** 3), count)
    return IdentityResult(Identity.JORDAN, True, None, None, count)


def _jacobian(t, x, y, z):
    """J(x, y, z) = (xy)z + (yz)x + (zx)y on coordinate vectors (float, scaled)."""
    def m(u, v):
        return np.einsum("i,j,ijk->k", u, v, t)
    return m(m(x, y), z) + m(m(y, z), x) + m(m(z, x), y)


def _jacobi_check(algebra, den, t) -> IdentityResult:
    d = algebra.dim
    eye = np.eye(d)
    count = 0
    for i, j, k in itertools.combinations(range(d), 3):
        count += 1
        v = _jacobian(t, eye[i], eye[j], eye[k])
        if np.any(v != 0):
            return IdentityResult(Identity.JACOBI, False, (i, j, k), _values(v, den ** 2), count)
    return IdentityResult(Identity.JACOBI, True, None, None, count)


def _malcev_check(algebra, den, t) -> IdentityResult:
    # J(x1, y, x2 z) + J(x2, y, x1 z) - J(x1, y, z) x2 - J(x2, y, z) x1, degree 4 in products
    d = algebra.dim
    eye = np.eye(d)

    def m(u, v):
        return np.einsum("i,j,ijk->k", u, v, t)

    count = 0
    for x1 in range(d):
        for x2 in range(x1, d):
            for y in range(d):
                for z in range(d):
                    count += 1
                    a, b, yy, zz = eye[x1], eye[x2], eye[y], eye[z]
                    v = (_jacobian(t, a, yy, m(b, zz)) + _jacobian(t, b, yy, m(a, zz))
                         - m(_jacobian(t, a, yy, zz), b) - m(_jacobian(t, b, yy, zz), a))
                    if np.any(v != 0):
                        return IdentityResult(Identity.MALCEV, False, (x1, x2, y, z),
                                              _values(v, den ** 3), count)
    return IdentityResult(Identity.MALCEV, True, None, None, count)


def synthetic_direct_sum(field: Field = QQ) -> StructureAlgebra:
    """O- + O-, a semisimple but not simple test algebra."""
    from .algebra import direct_sum
    o = build_auxiliary(AuxKind.IMAGINARY_OCTONIONS, field)
    return direct_sum(o, o)
