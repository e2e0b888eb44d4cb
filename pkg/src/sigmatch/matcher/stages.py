"""Single-graph stages of one round: split, first and second generation, signatures."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .. import _kernels as K
from ..binomial import quantile_cutoffs
from ..graph import Graph, VertexSet
from .params import MAX_M, ParamError

# Centered counts |N(i; S)| - p|S| are compared through the integer
# threshold ceil(p|S|); this absorbs float error in p*|S| at exact ties.
_CEIL_EPS = 1e-9


def count_threshold(p: float, size) -> np.ndarray:
    """Smallest integer count c with c - p*size >= 0."""
    return np.ceil(np.asarray(size, dtype=np.float64) * p - _CEIL_EPS).astype(np.int64)


@dataclass(frozen=True)
class Split:
    a: VertexSet
    b: VertexSet
    c: VertexSet

    def map(self, perm) -> "Split":
        return Split(self.a.map(perm), self.b.map(perm), self.c.map(perm))


def split_vertices(n: int, beta: float, rng) -> Split:
    """Uniform partition with |B| = |C| = floor(0.5*beta*n) and the rest in A."""
    b = int(math.floor(0.5 * beta * n + 1e-9))
    if b < 1:
        raise ParamError(f"0.5*beta*n = {0.5 * beta * n:g} leaves B and C empty")
    if 2 * b > n:
        raise ParamError("B and C do not fit in the vertex set")
    order = rng.permutation(n)
    return Split(a=VertexSet(n, order[2 * b:]), b=VertexSet(n, order[:b]), c=VertexSet(n, order[b:2 * b]))


def first_generation(g: Graph, a: VertexSet, p: float, m: int) -> list[VertexSet]:
    """Bucket the vertices of ``a`` by induced degree against Binomial(|A|, p) m-quantiles.

    Returns Q_1..Q_m as a list indexed 0..m-1.
    """
    if a.size == 0:
        raise ParamError("first generation needs a nonempty vertex set")
    members = a.members
    deg = g.counts_into(members, a.bits[None, :])[:, 0]
    cut = quantile_cutoffs(a.size, p, m)
    bucket = cut.bucket_array(deg)
    return [VertexSet(g.n, members[bucket == ell]) for ell in range(1, m + 1)]


@dataclass(frozen=True)
class SecondGeneration:
    """Codes of B-vertices and the nonempty sets R_s.

    Bit ``ell-1`` of a code is 1 when the ell-th sign is +1.
    """

    m: int
    vertices: np.ndarray          # members of B, ascending
    codes: np.ndarray             # uint64 code per member of B
    buckets: dict                 # code -> VertexSet, nonempty only

    def get(self, code: int, n: int) -> VertexSet:
        s = self.buckets.get(int(code))
        return s if s is not None else VertexSet.empty(n)


def sign_codes(g: Graph, vertices: np.ndarray, sets: list[VertexSet], p: float) -> np.ndarray:
    """Packed sign bits: bit k of row a is 1 iff |N(vertices[a]; sets[k])| >= ceil(p|sets[k]|)."""
    counts = g.counts_into(vertices, sets)
    thr = count_threshold(p, [s.size for s in sets])
    return counts >= thr[None, :]


def second_generation(g: Graph, b: VertexSet, q: list[VertexSet], p: float) -> SecondGeneration:
    m = len(q)
    if m > MAX_M:
        raise ParamError(f"m={m} does not fit a 64-bit code")
    members = b.members
    signs = sign_codes(g, members, q, p)
    weights = np.left_shift(np.uint64(1), np.arange(m, dtype=np.uint64))
    codes = (signs.astype(np.uint64) * weights[None, :]).sum(axis=1, dtype=np.uint64)
    buckets = {}
    if members.size:
        uniq, inverse = np.unique(codes, return_inverse=True)
        for k, code in enumerate(uniq.tolist()):
            buckets[int(code)] = VertexSet(g.n, members[inverse == k])
    return SecondGeneration(m=m, vertices=members, codes=codes, buckets=buckets)


def sample_index_set(m: int, omega: int, rng) -> np.ndarray:
    """Uniform omega-subset of the 2^m codes, sorted ascending.

    Codes are drawn uniformly and duplicates rejected, so nothing of size 2^m
    is ever materialised; when omega is close to 2^m a direct choice is used.
    """
    if not 1 <= m <= MAX_M:
        raise ParamError(f"m must lie in [1, {MAX_M}]")
    total = 1 << m
    if omega > total:
        raise ParamError(f"omega={omega} exceeds 2^m={total}")
    if omega < 1:
        raise ParamError("omega must be >= 1")
    if total <= (1 << 16) and 2 * omega > total:
        return np.sort(rng.choice(total, size=omega, replace=False)).astype(np.uint64)
    chosen: set[int] = set()
    while len(chosen) < omega:
        draws = rng.integers(0, total, size=omega - len(chosen), dtype=np.uint64, endpoint=False)
        for d in draws.tolist():
            if len(chosen) < omega:
                chosen.add(d)
    return np.array(sorted(chosen), dtype=np.uint64)


@dataclass(frozen=True)
class SignatureTable:
    """Packed omega-bit signatures of the vertices of C, ordered by ``index_set``."""

    index_set: np.ndarray   # sorted codes
    vertices: np.ndarray    # members of C, ascending
    packed: np.ndarray      # (|C|, words) uint64

    @property
    def omega(self) -> int:
        return int(self.index_set.size)

    def bits(self, v: int) -> np.ndarray:
        """Signature of vertex ``v`` as a 0/1 vector (1 means sign +1)."""
        row = int(np.searchsorted(self.vertices, v))
        if row >= self.vertices.size or self.vertices[row] != v:
            raise KeyError(f"vertex {v} has no signature")
        return K.unpack_rows(self.packed[row:row + 1], self.omega)[0]

    def as_dict(self) -> dict[int, tuple[int, ...]]:
        bits = K.unpack_rows(self.packed, self.omega)
        return {int(v): tuple(int(x) for x in row) for v, row in zip(self.vertices, bits)}


def signatures(g: Graph, c: VertexSet, sg: SecondGeneration, index_set, p: float) -> SignatureTable:
    index_set = np.asarray(index_set, dtype=np.uint64)
    if index_set.size and int(index_set.max()) >> sg.m:
        raise ParamError("index set codes are wider than m bits")
    sets = [sg.get(s, g.n) for s in index_set.tolist()]
    signs = sign_codes(g, c.members, sets, p)
    return SignatureTable(index_set=index_set, vertices=c.members, packed=K.pack_rows(signs))


def agreement_threshold(omega: int, slack: float) -> int:
    """Smallest integer agreement strictly above (omega/2)(1 + slack)."""
    thr = 0.5 * omega * (1.0 + slack)
    nearest = round(thr)
    if abs(thr - nearest) < 1e-9:
        thr = nearest
    return int(math.floor(thr)) + 1


def potential_match(fi, fj, omega: int, slack: float) -> bool:
    fi = np.asarray(fi).astype(bool)
    fj = np.asarray(fj).astype(bool)
    if fi.shape != (omega,) or fj.shape != (omega,):
        raise ParamError(f"signatures must have width omega={omega}")
    return int(np.count_nonzero(fi == fj)) >= agreement_threshold(omega, slack)


def agreement_matrix(sig: SignatureTable, sig_prime: SignatureTable) -> np.ndarray:
    """agree[a, b] = number of coordinates where the two signatures coincide."""
    return sig.omega - K.hamming_matrix(sig.packed, sig_prime.packed)
