"""Compare the numba and pure-numpy kernel paths.

    python benchmarks/bench_backends.py [--n 2000] [--repeat 5]

Kernel timings run both implementations in-process; the end-to-end timing
re-runs ``match_graphs`` in a subprocess with SIGMATCH_DISABLE_NUMBA set.
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

from sigmatch import _kernels as K

END_TO_END = """
import time
from sigmatch import BACKEND, ModelParams, sample_correlated, match_graphs, simplified_match, practical_params
inst = sample_correlated(ModelParams({n}, 0.1, 0.05), rng=0)
match_graphs(inst, 0.1, practical_params(reps=1))
simplified_match(inst.g_pi, inst.g_prime, 0.1, 7)
t = time.perf_counter(); match_graphs(inst, 0.1, practical_params(reps=20)); full = time.perf_counter() - t
t = time.perf_counter(); simplified_match(inst.g_pi, inst.g_prime, 0.1, 7); simp = time.perf_counter() - t
print(BACKEND, full, simp)
"""


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    n, w = args.n, K.n_words(args.n)
    rng = np.random.default_rng(0)
    rows = rng.integers(0, 2 ** 63, size=(n, w), dtype=np.uint64)
    masks = rng.integers(0, 2 ** 63, size=(64, w), dtype=np.uint64)
    verts = np.arange(n // 5)
    sig = rng.integers(0, 2 ** 63, size=(n, 2), dtype=np.uint64)
    score = rng.integers(0, 128, size=(n // 2, n // 2))

    cases = [
        ("count_in_sets", lambda f: f(rows, verts, masks), K.np_count_in_sets, K.nb_count_in_sets),
        ("hamming_matrix", lambda f: f(sig, sig), K.np_hamming_matrix, K.nb_hamming_matrix),
        ("greedy_assign", lambda f: f(score), K.np_greedy_assign, K.nb_greedy_assign),
    ]
    print(f"{'kernel':<16}{'numpy [s]':>12}{'numba [s]':>12}{'speedup':>10}")
    for name, call, np_fn, nb_fn in cases:
        assert np.array_equal(call(np_fn), call(nb_fn)), name
        t_np = best_of(lambda: call(np_fn), args.repeat)
        t_nb = best_of(lambda: call(nb_fn), args.repeat)
        print(f"{name:<16}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>9.1f}x")

    print(f"\nend to end, n={n}: match_graphs (20 rounds), simplified_match (m=7)")
    for flag in ("0", "1"):
        env = dict(os.environ, SIGMATCH_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", END_TO_END.format(n=n)], env=env, capture_output=True,
                             text=True, check=True).stdout.split()
        print(f"  {out[0]:<8} full {float(out[1]):.3f}s   simplified {float(out[2]):.3f}s")


if __name__ == "__main__":
    main()
