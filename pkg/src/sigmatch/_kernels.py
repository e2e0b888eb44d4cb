"""Bit-parallel inner loops.

Every kernel has a numba implementation and a pure numpy one with the same
signature and output.  The numba path is used when numba imports and the
environment variable ``SIGMATCH_DISABLE_NUMBA`` is unset (or "0").  Both
paths are always importable by name (``np_*`` / ``nb_*``) so they can be
cross-checked and benchmarked against each other.

Bit layout: element ``u`` of a packed vector lives in word ``u >> 6`` at bit
``u & 63``.
"""

from __future__ import annotations

import os

import numpy as np

WORD_BITS = 64

_flag = os.environ.get("SIGMATCH_DISABLE_NUMBA", "0").strip().lower()
_DISABLED = _flag not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None
BACKEND = "numba" if HAVE_NUMBA and not _DISABLED else "numpy"


def n_words(nbits: int) -> int:
    return max(1, (nbits + WORD_BITS - 1) // WORD_BITS)


def pack_rows(bits: np.ndarray) -> np.ndarray:
    """Pack a 2-D boolean array into little-endian uint64 rows."""
    bits = np.asarray(bits, dtype=bool)
    rows, nbits = bits.shape
    w = n_words(nbits)
    padded = np.zeros((rows, w * WORD_BITS), dtype=bool)
    padded[:, :nbits] = bits
    packed = np.packbits(padded, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").astype(np.uint64, copy=False)


def unpack_rows(words: np.ndarray, nbits: int) -> np.ndarray:
    words = np.ascontiguousarray(words, dtype="<u8")
    as_bytes = words.view(np.uint8).reshape(words.shape[0], -1)
    return np.unpackbits(as_bytes, axis=1, bitorder="little")[:, :nbits].astype(bool)


def pack_indices(indices, nbits: int) -> np.ndarray:
    """Packed 1-D mask with the given positions set."""
    idx = np.asarray(indices, dtype=np.int64)
    out = np.zeros(n_words(nbits), dtype=np.uint64)
    if idx.size:
        np.bitwise_or.at(out, idx >> 6, np.left_shift(np.uint64(1), (idx & 63).astype(np.uint64)))
    return out


# --------------------------------------------------------------------------
# numpy implementations

def np_count_in_sets(rows: np.ndarray, vertices: np.ndarray, masks: np.ndarray) -> np.ndarray:
    """out[a, b] = popcount(rows[vertices[a]] & masks[b])."""
    vertices = np.asarray(vertices, dtype=np.int64)
    k, s = vertices.size, masks.shape[0]
    out = np.empty((k, s), dtype=np.int64)
    if k == 0 or s == 0:
        return out.reshape(k, s)
    # chunk over vertices to keep the (chunk, s, W) temporary bounded
    w = rows.shape[1]
    step = max(1, (1 << 22) // max(1, s * w))
    for lo in range(0, k, step):
        sub = rows[vertices[lo:lo + step]]
        both = sub[:, None, :] & masks[None, :, :]
        out[lo:lo + step] = np.bitwise_count(both).sum(axis=2, dtype=np.int64)
    return out


def np_hamming_matrix(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """out[a, b] = popcount(x[a] ^ y[b])."""
    a, b = x.shape[0], y.shape[0]
    out = np.empty((a, b), dtype=np.int64)
    if a == 0 or b == 0:
        return out
    w = x.shape[1]
    step = max(1, (1 << 22) // max(1, b * w))
    for lo in range(0, a, step):
        diff = x[lo:lo + step, None, :] ^ y[None, :, :]
        out[lo:lo + step] = np.bitwise_count(diff).sum(axis=2, dtype=np.int64)
    return out


def np_greedy_assign(score: np.ndarray) -> np.ndarray:
    """Greedy max-score bijection.

    Pairs (row i, column j) are visited by descending score, then ascending
    column, then ascending row; a pair is taken when both ends are free.
    Returns ``assign`` with ``assign[j] = i``.
    """
    n_rows, n_cols = score.shape
    ii, jj = np.meshgrid(np.arange(n_rows), np.arange(n_cols), indexing="ij")
    order = np.lexsort((ii.ravel(), jj.ravel(), -score.ravel()))
    assign = np.full(n_cols, -1, dtype=np.int64)
    row_used = np.zeros(n_rows, dtype=bool)
    left = min(n_rows, n_cols)
    for flat in order:
        i, j = divmod(int(flat), n_cols)
        if row_used[i] or assign[j] >= 0:
            continue
        assign[j] = i
        row_used[i] = True
        left -= 1
        if left == 0:
            break
    return assign


# --------------------------------------------------------------------------
# numba implementations

if HAVE_NUMBA:

    @numba.njit(inline="always")
    def _popcount64(x):
        x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
        x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
        x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
        return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)

    @numba.njit(cache=True, nogil=True)
    def _nb_count_in_sets(rows, vertices, masks):
        k = vertices.shape[0]
        s = masks.shape[0]
        w = rows.shape[1]
        out = np.empty((k, s), dtype=np.int64)
        for a in range(k):
            r = rows[vertices[a]]
            for b in range(s):
                acc = np.uint64(0)
                for t in range(w):
                    acc += _popcount64(r[t] & masks[b, t])
                out[a, b] = acc
        return out

    @numba.njit(cache=True, nogil=True)
    def _nb_hamming_matrix(x, y):
        a_n = x.shape[0]
        b_n = y.shape[0]
        w = x.shape[1]
        out = np.empty((a_n, b_n), dtype=np.int64)
        for a in range(a_n):
            for b in range(b_n):
                acc = np.uint64(0)
                for t in range(w):
                    acc += _popcount64(x[a, t] ^ y[b, t])
                out[a, b] = acc
        return out

    @numba.njit(cache=True, nogil=True)
    def _nb_greedy_walk(order, n_rows, n_cols):
        assign = np.full(n_cols, -1, dtype=np.int64)
        row_used = np.zeros(n_rows, dtype=np.bool_)
        left = min(n_rows, n_cols)
        for flat in order:
            i = flat // n_cols
            j = flat % n_cols
            if row_used[i] or assign[j] >= 0:
                continue
            assign[j] = i
            row_used[i] = True
            left -= 1
            if left == 0:
                break
        return assign

    def nb_count_in_sets(rows, vertices, masks):
        vertices = np.ascontiguousarray(vertices, dtype=np.int64)
        return _nb_count_in_sets(
            np.ascontiguousarray(rows, dtype=np.uint64), vertices,
            np.ascontiguousarray(masks, dtype=np.uint64).reshape(-1, rows.shape[1]))

    def nb_hamming_matrix(x, y):
        return _nb_hamming_matrix(np.ascontiguousarray(x, dtype=np.uint64),
                                  np.ascontiguousarray(y, dtype=np.uint64))

    def nb_greedy_assign(score):
        n_rows, n_cols = score.shape
        ii, jj = np.meshgrid(np.arange(n_rows), np.arange(n_cols), indexing="ij")
        order = np.lexsort((ii.ravel(), jj.ravel(), -score.ravel())).astype(np.int64)
        return _nb_greedy_walk(order, n_rows, n_cols)

else:  # pragma: no cover
    nb_count_in_sets = np_count_in_sets
    nb_hamming_matrix = np_hamming_matrix
    nb_greedy_assign = np_greedy_assign


if BACKEND == "numba":
    count_in_sets = nb_count_in_sets
    hamming_matrix = nb_hamming_matrix
    greedy_assign = nb_greedy_assign
else:
    count_in_sets = np_count_in_sets
    hamming_matrix = np_hamming_matrix
    greedy_assign = np_greedy_assign
