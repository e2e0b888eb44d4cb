"""Binomial CDF and the integer quantile cutoffs behind the degree buckets."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

# Gap below which F(d) is treated as equal to a bucket boundary (ell-1)/m.
# Only exact rational coincidences (e.g. p = 1/2) come this close; the
# float CDF may land on either side of them.
_TIE_EPS = 1e-13


class BinomialInputError(ValueError):
    pass


def _check_p(p: float) -> None:
    if not 0.0 < p < 1.0:
        raise BinomialInputError(f"p must lie in (0, 1), got {p}")


def binom_cdf(k: int, p: float, t) -> float | np.ndarray:
    """P[Binomial(k, p) <= t], vectorised over ``t``."""
    _check_p(p)
    if k < 0:
        raise BinomialInputError("k must be >= 0")
    t_arr = np.asarray(t)
    tf = np.floor(t_arr).astype(np.float64)
    out = np.where(tf < 0, 0.0, np.where(tf >= k, 1.0, special.bdtr(np.clip(tf, 0, k), k, p)))
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=256)
def _cdf_table(k: int, p: float) -> np.ndarray:
    table = binom_cdf(k, p, np.arange(k + 1))
    table = np.atleast_1d(table)
    table.setflags(write=False)
    return table


@dataclass(frozen=True)
class QuantileCutoffs:
    """Integer cutoffs ``d[0..m]``; bucket ``ell`` (1-based) holds degrees in
    ``[d[ell-1], d[ell])`` and ``d[m]`` is an ``inf`` sentinel."""

    k: int
    p: float
    m: int
    d: tuple

    def bucket_of(self, deg) -> int:
        return bucket_of(self, deg)

    def bucket_array(self, degs: np.ndarray) -> np.ndarray:
        """Vectorised :func:`bucket_of` returning 1-based buckets."""
        degs = np.asarray(degs, dtype=np.int64)
        if degs.size and (degs.min() < 0 or degs.max() > self.k):
            raise BinomialInputError(f"degree outside [0, {self.k}]")
        finite = np.asarray(self.d[:self.m], dtype=np.int64)
        return np.searchsorted(finite, degs, side="right").astype(np.int64)


def quantile_cutoffs(k: int, p: float, m: int) -> QuantileCutoffs:
    """``d_ell = min{d >= 0 : F_{k,p}(d) > (ell-1)/m}`` for ell = 1..m."""
    _check_p(p)
    if m < 1:
        raise BinomialInputError("m must be >= 1")
    if k < 0:
        raise BinomialInputError("k must be >= 0")
    table = _cdf_table(int(k), float(p))
    levels = np.arange(m) / m
    # first index with table > level beyond the tie band
    cut = np.searchsorted(table, levels + _TIE_EPS, side="right")
    cut = np.minimum(cut, k)  # F(k) = 1 > any level < 1
    cut[0] = 0
    return QuantileCutoffs(k=int(k), p=float(p), m=int(m), d=tuple(int(c) for c in cut) + (float("inf"),))


def bucket_of(cutoffs: QuantileCutoffs, deg) -> int:
    """1-based bucket index of an integer degree."""
    deg = int(deg)
    if not 0 <= deg <= cutoffs.k:
        raise BinomialInputError(f"degree {deg} outside [0, {cutoffs.k}]")
    return int(cutoffs.bucket_array(np.array([deg]))[0])
