"""Single-pass variant without splitting or sparsification, and a degree-rank control."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels as K
from ..graph import Graph, VertexSet
from .params import ParamError
from .rounds import MatchResult
from .stages import SecondGeneration, SignatureTable, first_generation, second_generation, signatures

MAX_SIMPLIFIED_M = 20


@dataclass
class SimplifiedState:
    q: list
    q_prime: list
    sg: SecondGeneration
    sg_prime: SecondGeneration
    sig: SignatureTable
    sig_prime: SignatureTable
    constant_coords: int    # codes empty in both graphs: always agree
    agreement: np.ndarray   # (n, n), rows G^pi, columns G'


def simplified_state(g_pi: Graph, g_prime: Graph, p: float, m: int) -> SimplifiedState:
    """Full-vertex-set partitions and 2^m-coordinate signatures.

    Coordinates whose set R_s is empty in both graphs are +1 for every vertex,
    so they are counted in ``constant_coords`` instead of being stored.
    """
    if not 1 <= m <= MAX_SIMPLIFIED_M:
        raise ParamError(f"simplified variant needs 1 <= m <= {MAX_SIMPLIFIED_M}, got {m}")
    n = g_pi.n
    if g_prime.n != n:
        raise ParamError("graphs differ in vertex count")
    everyone = VertexSet.full(n)
    q = first_generation(g_pi, everyone, p, m)
    q_prime = first_generation(g_prime, everyone, p, m)
    sg = second_generation(g_pi, everyone, q, p)
    sg_prime = second_generation(g_prime, everyone, q_prime, p)
    present = np.array(sorted(set(sg.buckets) | set(sg_prime.buckets)), dtype=np.uint64)
    sig = signatures(g_pi, everyone, sg, present, p)
    sig_prime = signatures(g_prime, everyone, sg_prime, present, p)
    constant = (1 << m) - int(present.size)
    agree = constant + present.size - K.hamming_matrix(sig.packed, sig_prime.packed)
    return SimplifiedState(q, q_prime, sg, sg_prime, sig, sig_prime, constant, agree)


def simplified_match(g_pi: Graph, g_prime: Graph, p: float, m: int) -> MatchResult:
    """Greedy assignment by descending signature agreement.

    Pairs are taken in order of descending agreement, ties by smaller j then
    smaller i, each vertex used once.  Over the complete n x n score table
    this always ends in a bijection.
    """
    st = simplified_state(g_pi, g_prime, p, m)
    assign = K.greedy_assign(st.agreement)
    n = g_pi.n
    return MatchResult(outcome="permutation", n=n, pi_hat=assign, partial=assign.copy(), coverage=1.0,
                       candidates=n, variant="simplified",
                       stats=[{"nonempty_codes": len(st.sg.buckets),
                               "nonempty_codes_prime": len(st.sg_prime.buckets),
                               "constant_coords": st.constant_coords}])


def degree_baseline_match(g_pi: Graph, g_prime: Graph) -> MatchResult:
    """Pair vertices by descending-degree rank (ties by index)."""
    n = g_pi.n
    order = np.lexsort((np.arange(n), -g_pi.degrees))
    order_prime = np.lexsort((np.arange(n), -g_prime.degrees))
    pi_hat = np.empty(n, dtype=np.int64)
    pi_hat[order_prime] = order
    return MatchResult(outcome="permutation", n=n, pi_hat=pi_hat, partial=pi_hat.copy(), coverage=1.0,
                       candidates=n, variant="degree-baseline")
