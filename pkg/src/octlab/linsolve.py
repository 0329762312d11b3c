"""Exact sparse linear algebra over the rationals and prime fields.

Kernels over the rationals are computed multi-modularly: the system is split
into independent blocks (connected components of the row/column incidence
graph), each block is row-reduced modulo several word-sized primes with
numpy, the canonical kernel basis is lifted by CRT and rational
reconstruction, and every lifted vector is checked exactly over the
rationals.  Blocks that refuse to lift fall back to sparse fraction
elimination with Markowitz pivoting.
"""

from __future__ import annotations

import enum
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np
from sympy import prevprime

from .errors import DimensionDisagreement, DimensionMismatch, PrimeDividesDenominator
from .exactnum import QQ, Field, ModP, scalar_to_str

log = logging.getLogger(__name__)

DUMP_FORMAT_VERSION = 1
MAX_PRIMES = 16
MIN_PRIMES = 3


def _word_primes(count: int) -> tuple[int, ...]:
    out, p = [], 2**31 - 1
    while len(out) < count:
        out.append(p)
        p = prevprime(p)
    return tuple(out)


WORD_PRIMES = _word_primes(MAX_PRIMES)


class Policy(enum.Enum):
    DIRECT = "Direct"
    MULTIMODULAR = "MultiModular"


class Certification(enum.Enum):
    EXACT_VERIFIED = "ExactVerified"
    MODULAR_CONSENSUS = "ModularConsensus"


# --------------------------------------------------------------------------
# dense linear algebra modulo a word-sized prime


def rref_mod_p(a: np.ndarray, p: int, chunk: int | None = None) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``a`` mod p (nonzero rows only) and pivots.

    Entries must lie in [0, p) with p < 2**31.  Tall inputs are reduced in
    row chunks so the working array stays small.
    """
    a = np.asarray(a, dtype=np.int64)
    m, n = a.shape
    if chunk is None:
        chunk = max(4 * n, 256)
    if m <= chunk:
        return _rref_block(a.copy(), p)
    r = np.zeros((0, n), dtype=np.int64)
    pivots: list[int] = []
    for start in range(0, m, chunk):
        r, pivots = _rref_block(np.vstack([r, a[start:start + chunk]]), p)
        if len(pivots) == n:
            break
    return r, pivots


def _rref_block(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    m, n = a.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        inv = pow(int(a[r, c]), -1, p)
        if inv != 1:
            a[r, c:] = (a[r, c:] * inv) % p
        col = a[:, c].copy()
        col[r] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            a[np.ix_(rows, np.arange(c, n))] = (
                a[np.ix_(rows, np.arange(c, n))] - (np.outer(col[rows], a[r, c:]) % p)) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def kernel_from_rref(r: np.ndarray, pivots: Sequence[int], n: int, p: int) -> np.ndarray:
    """Canonical (reduced echelon) kernel basis mod p from an RREF."""
    pivset = set(pivots)
    free = [c for c in range(n) if c not in pivset]
    k = np.zeros((len(free), n), dtype=np.int64)
    for t, f in enumerate(free):
        k[t, f] = 1
        if len(pivots):
            k[t, list(pivots)] = (-r[:, f]) % p
    if not free:
        return k
    kr, _ = _rref_block(k, p)
    return kr


def nullspace_mod_p(a: np.ndarray, p: int) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64) % p
    r, piv = rref_mod_p(a, p)
    return kernel_from_rref(r, piv, a.shape[1], p)


def rank_mod_p(a: np.ndarray, p: int) -> int:
    return len(rref_mod_p(np.asarray(a, dtype=np.int64) % p, p)[1])


def matmul_mod_p(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Exact (a @ b) mod p, splitting operands so int64 never overflows."""
    a = np.asarray(a, dtype=np.int64) % p
    b = np.asarray(b, dtype=np.int64) % p
    k = a.shape[-1]
    if (p - 1) ** 2 * max(k, 1) < 2**53:
        return (a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64) % p
    lo_bits = 16
    mask = (1 << lo_bits) - 1
    b_lo, b_hi = b & mask, b >> lo_bits
    out = (_mm_small(a, b_hi, p) * ((1 << lo_bits) % p)) % p
    return (out + _mm_small(a, b_lo, p)) % p


def _mm_small(a, b, p):
    # b < 2**16, a < 2**31: split the inner dimension so sums stay below 2**63
    k = a.shape[-1]
    step = max(1, (2**62) // ((p - 1) * (1 << 16)))
    out = np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    for s in range(0, k, step):
        out = (out + (a[:, s:s + step] @ b[s:s + step]) % p) % p
    return out


# --------------------------------------------------------------------------
# exact dense/sparse echelon over a Field


class Echelon:
    """Incremental reduced row echelon basis over an exact field; rows are sparse dicts."""

    def __init__(self, dim: int, field: Field = QQ):
        self.dim = dim
        self.field = field
        self.rows: dict[int, dict] = {}

    def __len__(self):
        return len(self.rows)

    def reduce(self, v) -> dict:
        w = _sparse(v)
        for c in sorted(set(w) & self.rows.keys()):
            f = w.get(c)
            if f:
                for j, x in self.rows[c].items():
                    y = w.get(j, 0) - f * x
                    if y:
                        w[j] = y
                    else:
                        w.pop(j, None)
        return w

    def contains(self, v) -> bool:
        return not self.reduce(v)

    def add(self, v) -> bool:
        w = self.reduce(v)
        if not w:
            return False
        c = min(w)
        inv = self.field.inv(w[c])
        w = {j: x * inv for j, x in w.items()}
        for row in self.rows.values():
            f = row.get(c)
            if f:
                for j, x in w.items():
                    y = row.get(j, 0) - f * x
                    if y:
                        row[j] = y
                    else:
                        row.pop(j, None)
        self.rows[c] = w
        return True

    def subspace(self) -> "Subspace":
        zero = self.field.zero
        basis = []
        for c in sorted(self.rows):
            v = [zero] * self.dim
            for j, x in self.rows[c].items():
                v[j] = self.field(x)
            basis.append(tuple(v))
        return Subspace(self.dim, tuple(basis), self.field)


def _sparse(v) -> dict:
    if isinstance(v, dict):
        return {j: x for j, x in v.items() if x}
    return {j: x for j, x in enumerate(v) if x}


@dataclass(frozen=True)
class Subspace:
    """A subspace given by its reduced row echelon basis."""

    ambient: int
    basis: tuple
    field: Field = QQ

    @property
    def dim(self) -> int:
        return len(self.basis)

    @classmethod
    def spanned(cls, vectors: Iterable, ambient: int, field: Field = QQ) -> "Subspace":
        ech = Echelon(ambient, field)
        for v in vectors:
            ech.add(v)
        return ech.subspace()

    @classmethod
    def full(cls, ambient: int, field: Field = QQ) -> "Subspace":
        return cls.spanned([[field.one if i == j else field.zero for j in range(ambient)]
                            for i in range(ambient)], ambient, field)

    def contains(self, v) -> bool:
        ech = Echelon(self.ambient, self.field)
        for b in self.basis:
            ech.rows[next(j for j, x in enumerate(b) if x)] = _sparse(b)
        return ech.contains(v)

    def is_full(self) -> bool:
        return self.dim == self.ambient

    def to_strings(self) -> list[list[str]]:
        return [[scalar_to_str(x) for x in b] for b in self.basis]


# --------------------------------------------------------------------------
# sparse matrices


class SparseMatrix:
    """A sparse matrix over a field, stored as row dicts without explicit zeros."""

    def __init__(self, nrows: int, ncols: int, rows: Sequence[dict], field: Field = QQ):
        if len(rows) != nrows:
            raise DimensionMismatch("row count disagrees with the row list")
        self.nrows, self.ncols, self.field = nrows, ncols, field
        clean = []
        for row in rows:
            r = {}
            for c, v in row.items():
                if not 0 <= c < ncols:
                    raise DimensionMismatch(f"column {c} out of range")
                v = _to_storage(v, field)
                if v:
                    r[c] = v
            clean.append(r)
        self.rows = clean

    @classmethod
    def from_triples(cls, nrows: int, ncols: int, triples: Iterable, field: Field = QQ) -> "SparseMatrix":
        rows = [dict() for _ in range(nrows)]
        for r, c, v in triples:
            rows[r][c] = rows[r].get(c, 0) + v
        return cls(nrows, ncols, rows, field)

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence], field: Field = QQ) -> "SparseMatrix":
        ncols = len(dense[0]) if dense else 0
        return cls(len(dense), ncols, [dict(enumerate(r)) for r in dense], field)

    def entries(self):
        """Sorted (row, col, value) triples."""
        for r, row in enumerate(self.rows):
            for c in sorted(row):
                yield r, c, _from_storage(row[c], self.field)

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def mat_vec(self, v: Sequence) -> list:
        out = []
        for row in self.rows:
            s = 0
            for c, x in row.items():
                if v[c]:
                    s += x * _to_storage(v[c], self.field)
            out.append(s % self.field.p if self.field.p else s)
        return out

    def deduplicated(self) -> "SparseMatrix":
        """Drop zero rows and rows that are scalar multiples of earlier ones."""
        seen = set()
        rows = []
        for row in self.rows:
            key = _normalized_key(row, self.field)
            if key is None or key in seen:
                continue
            seen.add(key)
            rows.append(row)
        return SparseMatrix(len(rows), self.ncols, rows, self.field)

    def dump(self) -> str:
        lines = [f"octlab-sparse {DUMP_FORMAT_VERSION} {self.field.spec.descriptor()}",
                 f"{self.nrows} {self.ncols}"]
        for r, c, v in self.entries():
            lines.append(f"{r} {c} {scalar_to_str(v)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text: str) -> "SparseMatrix":
        from .exactnum import FieldSpec, field_make
        lines = text.splitlines()
        tag, version, desc = lines[0].split()
        if tag != "octlab-sparse" or int(version) != DUMP_FORMAT_VERSION:
            raise ValueError("not an octlab sparse dump")
        field = field_make(FieldSpec.parse(desc, exploratory=True))
        nrows, ncols = map(int, lines[1].split())
        triples = []
        for line in lines[2:]:
            r, c, v = line.split()
            triples.append((int(r), int(c), field.parse(v)))
        return cls.from_triples(nrows, ncols, triples, field)


def _to_storage(v, field: Field):
    if field.p:
        if isinstance(v, ModP):
            return v.v
        if isinstance(v, Fraction):
            return int(field(v))
        return v % field.p
    if isinstance(v, ModP):
        raise TypeError("residue in a rational matrix")
    if isinstance(v, Fraction) and v.denominator == 1:
        return v.numerator
    return v


def _from_storage(v, field: Field):
    return ModP(v, field.p) if field.p else Fraction(v)


def _normalized_key(row: dict, field: Field):
    if not row:
        return None
    cols = sorted(row)
    if field.p:
        inv = pow(row[cols[0]], -1, field.p)
        return tuple((c, row[c] * inv % field.p) for c in cols)
    lead = Fraction(row[cols[0]])
    return tuple((c, Fraction(row[c]) / lead) for c in cols)


def _integer_row(row: dict) -> tuple:
    """Primitive integer multiple of a rational row as sorted (col, int) pairs."""
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = math.lcm(den, v.denominator)
    items = sorted(row.items())
    ints = [(c, int(v * den)) for c, v in items]
    g = 0
    for _, v in ints:
        g = math.gcd(g, v)
    if ints[0][1] < 0:
        g = -g
    return tuple((c, v // g) for c, v in ints)


# --------------------------------------------------------------------------
# block decomposition


def _components(ncols: int, rows: Sequence[tuple]) -> list[tuple[list[int], list[tuple]]]:
    parent = list(range(ncols))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for row in rows:
        c0 = find(row[0][0])
        for c, _ in row[1:]:
            rc = find(c)
            if rc != c0:
                if rc < c0:
                    rc, c0 = c0, rc
                parent[rc] = c0
    cols_of: dict[int, list[int]] = defaultdict(list)
    for c in range(ncols):
        cols_of[find(c)].append(c)
    rows_of: dict[int, list[tuple]] = defaultdict(list)
    for row in rows:
        rows_of[find(row[0][0])].append(row)
    return [(cols_of[root], rows_of.get(root, [])) for root in sorted(cols_of)]


# --------------------------------------------------------------------------
# results


@dataclass
class NullspaceResult:
    dim: int
    basis: list
    certification: Certification
    primes_used: list = dc_field(default_factory=list)
    rank: int | None = None
    fallbacks: int = 0

    def as_subspace(self, field: Field = QQ) -> Subspace:
        return Subspace(len(self.basis[0]) if self.basis else 0, tuple(self.basis), field)


# --------------------------------------------------------------------------
# rational reconstruction


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> tuple[int, int]:
    t = ((r2 - r1) * pow(m1, -1, m2)) % m2
    return r1 + m1 * t, m1 * m2


def rational_reconstruct(a: int, m: int) -> Fraction | None:
    """The fraction r/s = a mod m with |r|, s <= sqrt(m/2), or None."""
    a %= m
    bound = math.isqrt(m // 2)
    r0, r1 = m, a
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound or math.gcd(r1, abs(s1)) != 1:
        return None
    return Fraction(r1, s1)


# --------------------------------------------------------------------------
# nullspace and rank


def _dense_block(cols: list[int], rows: list[tuple], p: int) -> np.ndarray:
    pos = {c: i for i, c in enumerate(cols)}
    a = np.zeros((len(rows), len(cols)), dtype=np.int64)
    for r, row in enumerate(rows):
        for c, v in row:
            a[r, pos[c]] = v % p
    return a


def _block_mod_p(cols, rows, p):
    if not rows:
        n = len(cols)
        return 0, (), np.eye(n, dtype=np.int64)
    r, piv = rref_mod_p(_dense_block(cols, rows, p), p)
    return len(piv), tuple(piv), kernel_from_rref(r, piv, len(cols), p)


def _verify_block(rows: list[tuple], cols: list[int], vecs: list[list[Fraction]]) -> bool:
    pos = {c: i for i, c in enumerate(cols)}
    for v in vecs:
        den = 1
        for x in v:
            den = math.lcm(den, x.denominator)
        iv = [int(x * den) for x in v]
        for row in rows:
            if sum(val * iv[pos[c]] for c, val in row):
                return False
    return True


def _lift_block(cols, rows, results):
    """CRT + rational reconstruction of agreeing modular kernels; None on failure."""
    primes = [p for p, _ in results]
    kernels = [k for _, k in results]
    nullity, n = kernels[0].shape
    out = []
    for t in range(nullity):
        vec = []
        for j in range(n):
            a, m = int(kernels[0][t, j]), primes[0]
            for p, k in zip(primes[1:], kernels[1:]):
                a, m = crt_pair(a, m, int(k[t, j]), p)
            q = rational_reconstruct(a, m)
            if q is None:
                return None
            vec.append(q)
        out.append(vec)
    return out


def _solve_block_rational(cols, rows, min_primes, pool):
    """Kernel of one block over Q; returns (vectors, primes used, fallback flag, rank)."""
    results = {}
    want = min_primes
    idx = 0
    while True:
        while sum(1 for _ in results) < want and idx < len(pool):
            p = pool[idx]
            idx += 1
            results[p] = _block_mod_p(cols, rows, p)
        best = max(((rk, tuple(-c for c in piv)) for rk, piv, _ in results.values()))
        agree = [(p, k) for p, (rk, piv, k) in results.items() if (rk, tuple(-c for c in piv)) == best]
        rank = best[0]
        if len(agree) < min_primes:
            if idx >= len(pool):
                raise DimensionDisagreement(
                    f"only {len(agree)} of {len(results)} primes agree on a block of {len(cols)} columns")
            want += min_primes - len(agree)
            continue
        if rank == len(cols):
            return [], [p for p, _ in agree], False, rank
        vecs = _lift_block(cols, rows, agree)
        if vecs is not None and _verify_block(rows, cols, vecs):
            return vecs, [p for p, _ in agree], False, rank
        if idx >= len(pool) or want >= len(pool):
            break
        want = min(len(pool), 2 * want)
    vecs = _markowitz_kernel(rows, cols)
    if len(vecs) != len(cols) - rank:
        raise DimensionDisagreement("exact elimination disagrees with modular rank")
    return vecs, [p for p, _ in agree], True, rank


def _markowitz_kernel(rows: list[tuple], cols: list[int]) -> list[list[Fraction]]:
    """Exact kernel by sparse fraction elimination, Markowitz pivot choice.

    Pivot = minimal (row length - 1) * (column count - 1); ties go to the
    lowest column index, then the lowest row id.  The result is returned in
    reduced echelon form over the block's local columns.
    """
    pos = {c: i for i, c in enumerate(cols)}
    active = {}
    for rid, row in enumerate(rows):
        d = {pos[c]: Fraction(v) for c, v in row if v}
        if d:
            active[rid] = d
    colrows: dict[int, set] = defaultdict(set)
    for rid, row in active.items():
        for c in row:
            colrows[c].add(rid)
    pivots = []
    while active:
        best = None
        for rid, row in active.items():
            rl = len(row) - 1
            for c in row:
                key = (rl * (len(colrows[c]) - 1), c, rid)
                if best is None or key < best:
                    best = key
        _, c, rid = best
        prow = active.pop(rid)
        for j in prow:
            colrows[j].discard(rid)
        a = prow[c]
        for other in sorted(colrows[c]):
            row = active[other]
            f = row[c] / a
            for j, x in prow.items():
                y = row.get(j, 0) - f * x
                if y:
                    if j not in row:
                        colrows[j].add(other)
                    row[j] = y
                elif j in row:
                    del row[j]
                    colrows[j].discard(other)
            if not row:
                del active[other]
        pivots.append((c, prow))
    n = len(cols)
    pivcols = {c for c, _ in pivots}
    vecs = []
    for f in range(n):
        if f in pivcols:
            continue
        x = {f: Fraction(1)}
        for c, prow in reversed(pivots):
            s = sum(v * x[j] for j, v in prow.items() if j != c and j in x)
            if s:
                x[c] = -s / prow[c]
        vecs.append(x)
    ech = Echelon(n, QQ)
    for v in vecs:
        ech.add(v)
    return [list(b) for b in ech.subspace().basis]


def _prepare(m: SparseMatrix, primes: Sequence[int] | None):
    if m.field.p:
        rows = [tuple(sorted(r.items())) for r in m.rows if r]
        rows = list({tuple(_normalized_key(dict(r), m.field)): None for r in rows})
        return rows
    if primes:
        for row in m.rows:
            for v in row.values():
                if isinstance(v, Fraction):
                    for p in primes:
                        if v.denominator % p == 0:
                            raise PrimeDividesDenominator(f"prime {p} divides a denominator")
    seen = {}
    for r in m.rows:
        if r:
            seen.setdefault(_integer_row(r), None)
    return list(seen)


def nullspace(m: SparseMatrix, field: Field | None = None, policy: Policy | str = Policy.MULTIMODULAR,
              primes: Sequence[int] | None = None, min_primes: int = MIN_PRIMES) -> NullspaceResult:
    """Certified kernel of ``m`` as a reduced echelon basis (first nonzero entry 1)."""
    field = field or m.field
    if field != m.field:
        raise DimensionMismatch(f"matrix over {m.field}, solve requested over {field}")
    policy = Policy(policy) if isinstance(policy, str) else policy
    rows = _prepare(m, primes)
    comps = _components(m.ncols, rows)
    basis_rows: list[dict] = []
    used: set = set()
    fallbacks = 0
    rank = 0
    if field.p:
        p = field.p
        for cols, crow in comps:
            rk, _, k = _block_mod_p(cols, crow, p)
            rank += rk
            for t in range(k.shape[0]):
                basis_rows.append({cols[j]: int(k[t, j]) for j in np.flatnonzero(k[t])})
        used.add(p)
        cert = Certification.EXACT_VERIFIED
        out = _assemble(basis_rows, m.ncols, field)
        _check_modular(m, out, p)
        return NullspaceResult(len(out), out, cert, [p], rank, 0)
    pool = list(primes) if primes else list(WORD_PRIMES)
    for cols, crow in comps:
        if not crow:
            for c in cols:
                basis_rows.append({c: Fraction(1)})
            continue
        if policy is Policy.DIRECT:
            vecs = _markowitz_kernel(crow, cols)
            rank += len(cols) - len(vecs)
        else:
            vecs, ps, fb, rk = _solve_block_rational(cols, crow, min_primes, pool)
            used.update(ps)
            fallbacks += fb
            rank += rk
            if fb:
                log.info("block with %d columns fell back to exact elimination", len(cols))
        for v in vecs:
            basis_rows.append({cols[j]: x for j, x in enumerate(v) if x})
    out = _assemble(basis_rows, m.ncols, field)
    return NullspaceResult(len(out), out, Certification.EXACT_VERIFIED, sorted(used), rank, fallbacks)


def _assemble(basis_rows: list[dict], ncols: int, field: Field) -> list[tuple]:
    basis_rows.sort(key=lambda d: min(d))
    zero = field.zero
    out = []
    for d in basis_rows:
        v = [zero] * ncols
        for c, x in d.items():
            v[c] = field(x) if not field.p else ModP(x, field.p)
        out.append(tuple(v))
    return out


def _check_modular(m: SparseMatrix, basis, p):
    for v in basis:
        if any(m.mat_vec(v)):
            raise DimensionDisagreement("modular kernel vector fails verification")


def rank(m: SparseMatrix, field: Field | None = None, primes: Sequence[int] | None = None,
         min_primes: int = MIN_PRIMES) -> int:
    """Exact rank; over Q, the maximum of block ranks over several primes."""
    field = field or m.field
    rows = _prepare(m, primes)
    comps = _components(m.ncols, rows)
    if field.p:
        return sum(_block_mod_p(c, r, field.p)[0] for c, r in comps if r)
    pool = list(primes) if primes else list(WORD_PRIMES[:min_primes])
    total = 0
    for cols, crow in comps:
        if crow:
            total += max(_block_mod_p(cols, crow, p)[0] for p in pool)
    return total


def verify_kernel_exact(m: SparseMatrix, basis: Sequence[Sequence]) -> bool:
    """M v = 0 with exact arithmetic for every basis vector."""
    for v in basis:
        if any(m.mat_vec(v)):
            return False
    return True
