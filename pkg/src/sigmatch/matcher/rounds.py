"""Rounds of the multistage matcher, the every-time voting rule, and results.

Seeding: round ``r`` draws from ``SeedSequence(seed, spawn_key=(r,))``; inside
a round the draw order is split of G^pi, split of G', index set.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..graph import Graph
from ..model import CorrelatedInstance, check_permutation, estimate_p, make_rng
from .params import AlgoParams, ParamError
from .stages import (
    SecondGeneration, SignatureTable, Split, agreement_matrix, agreement_threshold,
    first_generation, second_generation, sample_index_set, signatures, split_vertices,
)


def round_rng(seed: int, r: int) -> np.random.Generator:
    return make_rng(np.random.SeedSequence(int(seed), spawn_key=(int(r),)))


@dataclass
class RoundResult:
    index: int
    split: Split
    split_prime: Split
    q: list
    q_prime: list
    sg: SecondGeneration
    sg_prime: SecondGeneration
    index_set: np.ndarray
    sig: SignatureTable
    sig_prime: SignatureTable
    agreement: np.ndarray   # (|C|, |C'|)
    threshold: int

    @property
    def c(self) -> np.ndarray:
        return self.sig.vertices

    @property
    def c_prime(self) -> np.ndarray:
        return self.sig_prime.vertices

    @property
    def relation(self) -> np.ndarray:
        """Potential-match indicator on C x C' (rows follow ``c``, columns ``c_prime``)."""
        return self.agreement >= self.threshold

    def summary(self) -> dict:
        rel = self.relation
        return {
            "round": self.index,
            "c_size": int(self.c.size),
            "nonempty_codes": len(self.sg.buckets),
            "nonempty_codes_prime": len(self.sg_prime.buckets),
            "potential_matches": int(rel.sum()),
            "threshold": int(self.threshold),
            "mean_agreement": round(float(self.agreement.mean()), 6) if self.agreement.size else 0.0,
        }


def run_round(g_pi: Graph, g_prime: Graph, p: float, params: AlgoParams, rng, index: int = 0,
              *, shared_split: bool = False, transport=None) -> RoundResult:
    """Steps 1-5 on one pair of graphs.

    Test hooks: ``shared_split`` reuses the first split for G'; ``transport``
    (a permutation) maps the split of G^pi through it, so running on a
    relabelled G^pi with the same seed reproduces the same round up to
    relabelling.
    """
    n = g_pi.n
    if g_prime.n != n:
        raise ParamError("graphs differ in vertex count")
    rng = make_rng(rng)
    split = split_vertices(n, params.beta, rng)
    split_prime = split_vertices(n, params.beta, rng)
    if shared_split:
        split_prime = split
    if transport is not None:
        split = split.map(check_permutation(transport, n))
    index_set = sample_index_set(params.m, params.omega, rng)

    q = first_generation(g_pi, split.a, p, params.m)
    q_prime = first_generation(g_prime, split_prime.a, p, params.m)
    sg = second_generation(g_pi, split.b, q, p)
    sg_prime = second_generation(g_prime, split_prime.b, q_prime, p)
    sig = signatures(g_pi, split.c, sg, index_set, p)
    sig_prime = signatures(g_prime, split_prime.c, sg_prime, index_set, p)
    agree = agreement_matrix(sig, sig_prime)
    return RoundResult(index, split, split_prime, q, q_prime, sg, sg_prime, index_set, sig, sig_prime,
                       agree, agreement_threshold(params.omega, params.slack_for(n)))


@dataclass
class MatchResult:
    """Outcome of a matcher run.

    ``pi_hat[j] = i`` maps vertex j of G' to vertex i of G^pi and is set only
    when ``outcome == "permutation"``.  ``partial`` is always present: j is
    assigned when it has exactly one surviving candidate, else -1.
    """

    outcome: str
    n: int
    pi_hat: np.ndarray | None
    partial: np.ndarray
    coverage: float
    candidates: int = 0
    stats: list = field(default_factory=list)
    variant: str = "full"

    @property
    def estimate(self) -> np.ndarray:
        return self.pi_hat if self.pi_hat is not None else self.partial


class MatchTally:
    """Co-occurrence counts and disqualification flags over all (i, j) pairs.

    Memory is two n x n planes (int32 + bool), about 5 n^2 bytes; fine up to
    n = 2^14.
    """

    def __init__(self, n: int):
        self.n = n
        self.cooccur = np.zeros((n, n), dtype=np.int32)
        self.disqualified = np.zeros((n, n), dtype=bool)
        self.rounds = 0

    def update(self, c: np.ndarray, c_prime: np.ndarray, relation: np.ndarray) -> None:
        ix = np.ix_(np.asarray(c, dtype=np.int64), np.asarray(c_prime, dtype=np.int64))
        self.cooccur[ix] += 1
        self.disqualified[ix] |= ~np.asarray(relation, dtype=bool)
        self.rounds += 1

    def result(self, stats=None) -> MatchResult:
        n = self.n
        if self.rounds == 0:
            raise ParamError("aggregation needs at least one round")
        seen = self.cooccur > 0
        cand = seen & ~self.disqualified
        per_j = cand.sum(axis=0)
        per_i = cand.sum(axis=1)
        partial = np.full(n, -1, dtype=np.int64)
        single = np.nonzero(per_j == 1)[0]
        partial[single] = np.argmax(cand[:, single], axis=0)
        ok = bool(np.all(per_j == 1) and np.all(per_i == 1))
        return MatchResult(
            outcome="permutation" if ok else "error",
            n=n,
            pi_hat=partial.copy() if ok else None,
            partial=partial,
            coverage=float(seen.sum()) / float(n * n),
            candidates=int(cand.sum()),
            stats=list(stats or []),
        )


def aggregate(rounds, n: int) -> MatchResult:
    """Match (i, j) iff they co-occurred at least once and were potentially matched every time."""
    rounds = list(rounds)
    if not rounds:
        raise ParamError("aggregation needs at least one round")
    tally = MatchTally(n)
    for rr in sorted(rounds, key=lambda r: r.index):
        tally.update(rr.c, rr.c_prime, rr.relation)
    return tally.result([rr.summary() for rr in sorted(rounds, key=lambda r: r.index)])


def resolve_p(instance: CorrelatedInstance, p) -> float:
    """``p`` as given, the model's p when None, or a pooled edge-density estimate for "estimate"."""
    if p is None:
        return float(instance.params.p)
    if isinstance(p, str):
        if p != "estimate":
            raise ParamError(f"unknown p specifier {p!r}")
        return 0.5 * (estimate_p(instance.g_pi) + estimate_p(instance.g_prime))
    p = float(p)
    if not 0.0 < p < 1.0:
        raise ParamError(f"p must lie in (0, 1), got {p}")
    return p


def match_graphs(instance: CorrelatedInstance, p=None, params: AlgoParams | None = None, *,
                 workers: int = 1, keep_rounds: bool = False, transport=None):
    """Run ``params.reps`` rounds and aggregate them.

    Returns a :class:`MatchResult`; with ``keep_rounds`` returns
    ``(result, rounds)``.  ``transport`` is the relabelling hook of
    :func:`run_round`.
    """
    params = params or AlgoParams()
    p = resolve_p(instance, p)
    n = instance.n
    params.half_beta_n(n)
    g_pi, g_prime = instance.g_pi, instance.g_prime
    tally = MatchTally(n)
    stats, kept = [], []

    def one(r):
        return run_round(g_pi, g_prime, p, params, round_rng(params.seed, r), r, transport=transport)

    def consume(rr):
        tally.update(rr.c, rr.c_prime, rr.relation)
        stats.append(rr.summary())
        if keep_rounds:
            kept.append(rr)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for rr in pool.map(one, range(params.reps)):
                consume(rr)
    else:
        for r in range(params.reps):
            consume(one(r))
    result = tally.result(stats)
    return (result, kept) if keep_rounds else result


def relabel_result(result: MatchResult, sigma) -> np.ndarray:
    """Estimate transported by sigma: the value i becomes sigma[i]."""
    sigma = np.asarray(sigma, dtype=np.int64)
    est = result.estimate
    return np.where(est >= 0, sigma[np.maximum(est, 0)], -1)


def write_match_result(result: MatchResult, path, extra: dict | None = None) -> None:
    """Header lines ``# key=value`` then one ``j i`` line per assigned j; round
    summaries go to ``<path>.rounds.jsonl``."""
    header = {"outcome": result.outcome, "variant": result.variant, "n": result.n,
              "coverage": f"{result.coverage:.6f}", "candidates": result.candidates}
    header.update(extra or {})
    est = result.estimate
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for k, v in header.items():
            fh.write(f"# {k}={v}\n")
        for j, i in enumerate(est.tolist()):
            if i >= 0:
                fh.write(f"{j} {i}\n")
    with open(os.fspath(path) + ".rounds.jsonl", "w", encoding="ascii", newline="\n") as fh:
        for rec in result.stats:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_match_result(path) -> tuple[dict, np.ndarray]:
    header, pairs = {}, []
    with open(path, encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                k, _, v = line[1:].strip().partition("=")
                header[k] = v
            else:
                j, i = line.split()
                pairs.append((int(j), int(i)))
    est = np.full(int(header["n"]), -1, dtype=np.int64)
    for j, i in pairs:
        est[j] = i
    return header, est
