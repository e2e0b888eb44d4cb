"""Exact overlap counts between the partitions built on the two graphs.

Primed sets live on G' labels and are transported through the true ``pi``
before comparison.  CSV columns:

first_gen.csv
    ell, size, size_prime, intersection, sym_diff
second_gen.csv
    code, size, size_prime, intersection, with_b_prime
model.csv
    key, value   (n, edges_g_pi, edges_g_prime, density, retention)
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .graph import VertexSet
from .model import CorrelatedInstance, apply_permutation
from .matcher.stages import SecondGeneration


@dataclass
class FirstGenRow:
    ell: int
    size: int
    size_prime: int
    intersection: int
    sym_diff: int


@dataclass
class SecondGenRow:
    code: int
    size: int
    size_prime: int
    intersection: int
    with_b_prime: int


@dataclass
class DiagnosticsReport:
    first_gen: list = field(default_factory=list)
    second_gen: list = field(default_factory=list)
    bad_code_count: int | None = None
    bad_code_threshold: float | None = None
    m: int | None = None
    model: dict = field(default_factory=dict)

    @property
    def sym_diff_fraction(self) -> float:
        """Total symmetric difference over total size of both partitions."""
        tot = sum(r.size + r.size_prime for r in self.first_gen)
        return sum(r.sym_diff for r in self.first_gen) / tot if tot else 0.0

    @property
    def bad_code_fraction(self) -> float | None:
        if self.bad_code_count is None:
            return None
        return self.bad_code_count / float(1 << self.m)


def _transport(s: VertexSet, pi) -> VertexSet:
    return s.map(pi)


def first_gen_overlap_stats(q, q_prime, pi) -> list[FirstGenRow]:
    if len(q) != len(q_prime):
        raise ValueError("partitions have different numbers of buckets")
    rows = []
    for ell, (a, b) in enumerate(zip(q, q_prime), start=1):
        bt = _transport(b, pi)
        inter = a.intersection(bt).size
        rows.append(FirstGenRow(ell, a.size, bt.size, inter, a.size + bt.size - 2 * inter))
    return rows


def bad_code_threshold(beta: float, n: int, m: int) -> float:
    return beta * beta * n / 2.0 ** (m + 6)


def second_gen_overlap_stats(sg: SecondGeneration, sg_prime: SecondGeneration, pi, b_prime: VertexSet,
                             beta: float, n: int):
    """Per-code table over codes present in either graph, plus the bad-code count.

    A code is bad when |R_s ∩ pi(R'_s)| <= beta^2 n / 2^(m+6); codes absent
    from both graphs have empty intersection and count as bad.
    """
    if sg.m != sg_prime.m:
        raise ValueError("second generations use different code widths")
    bpt = _transport(b_prime, pi)
    thr = bad_code_threshold(beta, n, sg.m)
    rows = []
    good = 0
    for code in sorted(set(sg.buckets) | set(sg_prime.buckets)):
        r = sg.get(code, n)
        rp = _transport(sg_prime.get(code, n), pi)
        inter = r.intersection(rp).size
        rows.append(SecondGenRow(code, r.size, rp.size, inter, r.intersection(bpt).size))
        if inter > thr:
            good += 1
    return rows, (1 << sg.m) - good


def model_stats(instance: CorrelatedInstance) -> dict:
    """Edge density of G' and the fraction of its edges also present (after alignment) in G^pi.

    ``retention`` is None when G' has no edges.
    """
    g_pi, g_prime = instance.g_pi, instance.g_prime
    n = g_prime.n
    e_prime = g_prime.num_edges
    density = e_prime / (n * (n - 1) / 2) if n > 1 else 0.0
    if e_prime == 0:
        retention = None
    else:
        aligned = apply_permutation(g_prime, instance.truth)
        both = int(np.bitwise_count(aligned.rows & g_pi.rows).sum()) // 2
        retention = both / e_prime
    return {"n": n, "edges_g_pi": g_pi.num_edges, "edges_g_prime": e_prime,
            "density": density, "retention": retention}


def accuracy(pi_hat, pi) -> tuple[float, bool]:
    """Fraction of j with pi_hat[j] == pi[j] (unassigned entries are -1), and exactness."""
    pi_hat = np.asarray(pi_hat, dtype=np.int64)
    pi = np.asarray(pi, dtype=np.int64)
    if pi_hat.shape != pi.shape:
        raise ValueError(f"length mismatch: {pi_hat.shape} vs {pi.shape}")
    frac = float(np.mean(pi_hat == pi)) if pi.size else 1.0
    return frac, frac == 1.0


def write_report(report: DiagnosticsReport, out_dir) -> None:
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "first_gen.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["ell", "size", "size_prime", "intersection", "sym_diff"])
        for r in report.first_gen:
            w.writerow([r.ell, r.size, r.size_prime, r.intersection, r.sym_diff])
    with open(out / "second_gen.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["code", "size", "size_prime", "intersection", "with_b_prime"])
        for r in report.second_gen:
            w.writerow([r.code, r.size, r.size_prime, r.intersection, r.with_b_prime])
    with open(out / "model.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["key", "value"])
        for k, v in report.model.items():
            w.writerow([k, "" if v is None else (f"{v:.6f}" if isinstance(v, float) else v)])
        w.writerow(["sym_diff_fraction", f"{report.sym_diff_fraction:.6f}"])
        if report.bad_code_count is not None:
            w.writerow(["bad_code_count", report.bad_code_count])
            w.writerow(["bad_code_threshold", f"{report.bad_code_threshold:.6f}"])


def diagnose_round(instance: CorrelatedInstance, p: float, params, round_index: int = 0) -> DiagnosticsReport:
    """Report for one full-pipeline round drawn exactly as :func:`match_graphs` draws it."""
    from .matcher.rounds import round_rng, run_round

    rr = run_round(instance.g_pi, instance.g_prime, p, params, round_rng(params.seed, round_index),
                   round_index)
    n = instance.n
    rows, bad = second_gen_overlap_stats(rr.sg, rr.sg_prime, instance.truth, rr.split_prime.b,
                                         params.beta, n)
    return DiagnosticsReport(
        first_gen=first_gen_overlap_stats(rr.q, rr.q_prime, instance.truth),
        second_gen=rows, bad_code_count=bad,
        bad_code_threshold=bad_code_threshold(params.beta, n, params.m), m=params.m,
        model=model_stats(instance))


def diagnose_simplified(instance: CorrelatedInstance, p: float, m: int) -> DiagnosticsReport:
    """Report for the full-vertex-set partitions of the single-pass variant (no bad-code count)."""
    from .matcher.simplified import simplified_state

    st = simplified_state(instance.g_pi, instance.g_prime, p, m)
    n = instance.n
    rows, _ = second_gen_overlap_stats(st.sg, st.sg_prime, instance.truth, VertexSet.full(n), 1.0, n)
    return DiagnosticsReport(first_gen=first_gen_overlap_stats(st.q, st.q_prime, instance.truth),
                             second_gen=rows, m=m, model=model_stats(instance))
