"""Correlated Erdős–Rényi instances and permutation utilities.

A parent graph ``G0 ~ G(n, p / (1 - alpha))`` is thinned twice, independently,
keeping each parent edge with probability ``1 - alpha``.  The first copy is
relabelled by the hidden permutation ``pi`` (vertex ``i`` of ``G`` becomes
``pi[i]``) and published as ``g_pi``; the second copy is ``g_prime``.

Instance directory layout (see :func:`save_instance`)::

    g_pi.txt      edge list of G^pi
    g_prime.txt   edge list of G'
    truth.txt     one line "j pi(j)" per vertex
    params.txt    key=value lines: n, p, alpha, seed
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .graph import Graph, GraphInputError, read_edge_list, write_edge_list


class ModelInputError(ValueError):
    pass


@dataclass(frozen=True)
class ModelParams:
    n: int
    p: float
    alpha: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ModelInputError(f"n must be >= 1, got {self.n}")
        if not 0.0 < self.p < 1.0:
            raise ModelInputError(f"p must lie in (0, 1), got {self.p}")
        if not 0.0 <= self.alpha <= 1.0 - self.p:
            raise ModelInputError(f"alpha must lie in [0, 1 - p] = [0, {1 - self.p:g}], got {self.alpha}")

    @property
    def parent_p(self) -> float:
        return min(1.0, self.p / (1.0 - self.alpha))


@dataclass(frozen=True, eq=False)
class CorrelatedInstance:
    g_pi: Graph
    g_prime: Graph
    truth: np.ndarray | None
    params: ModelParams
    seed: int | None = None

    @property
    def n(self) -> int:
        return self.g_pi.n

    def __eq__(self, other):
        if not isinstance(other, CorrelatedInstance):
            return NotImplemented
        same_truth = (self.truth is None and other.truth is None) or (
            self.truth is not None and other.truth is not None
            and np.array_equal(self.truth, other.truth))
        return (self.g_pi == other.g_pi and self.g_prime == other.g_prime and same_truth
                and self.params == other.params and self.seed == other.seed)


def make_rng(seed) -> np.random.Generator:
    """PCG64 stream from an int seed, a SeedSequence, or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def check_permutation(pi, n: int | None = None) -> np.ndarray:
    pi = np.asarray(pi, dtype=np.int64)
    if pi.ndim != 1:
        raise ModelInputError("permutation must be one-dimensional")
    if n is not None and pi.size != n:
        raise ModelInputError(f"permutation has length {pi.size}, expected {n}")
    if not np.array_equal(np.sort(pi), np.arange(pi.size)):
        raise ModelInputError("not a bijection on 0..n-1")
    return pi


def invert(pi) -> np.ndarray:
    pi = np.asarray(pi, dtype=np.int64)
    inv = np.empty_like(pi)
    inv[pi] = np.arange(pi.size)
    return inv


def compose(sigma, pi) -> np.ndarray:
    """``(sigma ∘ pi)[v] = sigma[pi[v]]``."""
    return np.asarray(sigma, dtype=np.int64)[np.asarray(pi, dtype=np.int64)]


def sample_permutation(n: int, rng) -> np.ndarray:
    if n < 1:
        raise ModelInputError("n must be >= 1")
    return make_rng(rng).permutation(n).astype(np.int64)


def apply_permutation(g: Graph, pi) -> Graph:
    """Relabel ``g`` so that edge {i, j} becomes {pi[i], pi[j]}."""
    pi = check_permutation(pi, g.n)
    inv = invert(pi)
    adj = g.adjacency()
    return Graph.from_adjacency(adj[np.ix_(inv, inv)], check=False)


def sample_correlated(params: ModelParams, pi="uniform", rng=None) -> CorrelatedInstance:
    """Draw one correlated pair ``(G^pi, G')``.

    ``pi`` is a permutation array or ``"uniform"`` (drawn first from ``rng``).
    Draw order is fixed: permutation (if uniform), then for every unordered
    pair in row-major upper-triangular order a parent uniform, a keep uniform
    for ``G`` and a keep uniform for ``G'``.
    """
    seed = rng if isinstance(rng, (int, np.integer)) else None
    rng = make_rng(rng)
    n = params.n
    if isinstance(pi, str):
        if pi != "uniform":
            raise ModelInputError(f"unknown permutation spec {pi!r}")
        pi = sample_permutation(n, rng)
    else:
        pi = check_permutation(pi, n)

    iu, ju = np.triu_indices(n, k=1)
    draws = rng.random((3, iu.size))
    parent = draws[0] < params.parent_p
    keep = 1.0 - params.alpha
    in_g = parent & (draws[1] < keep)
    in_gp = parent & (draws[2] < keep)

    def _graph(mask, relabel=None):
        a, b = iu[mask], ju[mask]
        if relabel is not None:
            a, b = relabel[a], relabel[b]
        adj = np.zeros((n, n), dtype=bool)
        adj[a, b] = True
        adj[b, a] = True
        return Graph.from_adjacency(adj, check=False)

    return CorrelatedInstance(
        g_pi=_graph(in_g, pi),
        g_prime=_graph(in_gp),
        truth=pi,
        params=params,
        seed=None if seed is None else int(seed),
    )


def estimate_p(g: Graph) -> float:
    """Edge count over C(n, 2)."""
    if g.n < 2:
        raise ModelInputError("estimate_p needs at least two vertices")
    return g.num_edges / (g.n * (g.n - 1) / 2)


# --------------------------------------------------------------------------
# serialization

def save_instance(inst: CorrelatedInstance, out_dir, force: bool = False) -> Path:
    out = Path(out_dir)
    if out.exists() and any(out.iterdir()) and not force:
        raise FileExistsError(f"{out} exists and is not empty (use force to overwrite)")
    out.mkdir(parents=True, exist_ok=True)
    write_edge_list(inst.g_pi, out / "g_pi.txt")
    write_edge_list(inst.g_prime, out / "g_prime.txt")
    if inst.truth is not None:
        with open(out / "truth.txt", "w", encoding="ascii", newline="\n") as fh:
            fh.writelines(f"{j} {int(v)}\n" for j, v in enumerate(inst.truth))
    with open(out / "params.txt", "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"n={inst.params.n}\np={inst.params.p!r}\nalpha={inst.params.alpha!r}\n"
                 f"seed={'' if inst.seed is None else inst.seed}\n")
    return out


def _read_params(path: Path) -> dict[str, str]:
    rec = {}
    with open(path, encoding="ascii") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ModelInputError(f"{path}: malformed line {line!r}")
            rec[key.strip()] = value.strip()
    return rec


def load_instance(path) -> CorrelatedInstance:
    """Load an instance directory; ``truth.txt`` and ``params.txt`` are optional."""
    path = Path(path)
    if not path.is_dir():
        raise FileNotFoundError(f"instance directory {path} not found")
    g_pi = read_edge_list(path / "g_pi.txt")
    g_prime = read_edge_list(path / "g_prime.txt")
    if g_pi.n != g_prime.n:
        raise GraphInputError("the two graphs have different vertex counts")
    truth = None
    if (path / "truth.txt").exists():
        truth = np.full(g_pi.n, -1, dtype=np.int64)
        with open(path / "truth.txt", encoding="ascii") as fh:
            for line in fh:
                if line.strip():
                    j, v = line.split()
                    truth[int(j)] = int(v)
        truth = check_permutation(truth, g_pi.n)
    seed = None
    if (path / "params.txt").exists():
        rec = _read_params(path / "params.txt")
        params = ModelParams(int(rec["n"]), float(rec["p"]), float(rec.get("alpha", 0.0)))
        if rec.get("seed"):
            seed = int(rec["seed"])
    else:
        params = ModelParams(g_pi.n, min(max(estimate_p(g_prime), 1e-12), 1 - 1e-12), 0.0)
    return CorrelatedInstance(g_pi, g_prime, truth, params, seed)
