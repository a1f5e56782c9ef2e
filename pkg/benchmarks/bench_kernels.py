"""Times the numba kernels against their pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--n 1000]

Each row reports the best wall time of ``--repeat`` runs per backend after one
warm-up call (which also triggers numba compilation), and checks that both
backends agree.
"""

import argparse
import time

import numpy as np

from tpc import _jit, kernels
from tpc.community import brute_force_partition, louvain
from tpc.similarity import SimilarityNetwork, similarity_matrix


def best_time(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - start)
    return min(times), out


def planted_bits(rng, n, v=18, m=5, k=3, noise=0.05):
    protos = rng.integers(0, 2, size=(k, v, m))
    bits = protos[rng.integers(0, k, size=n)]
    return (bits ^ (rng.random(bits.shape) < noise)).astype(np.uint8)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--n", type=int, default=1000, help="patients for the similarity and louvain rows")
    ap.add_argument("--brute-n", type=int, default=10, help="nodes for the exhaustive search row")
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    bits = planted_bits(rng, args.n)
    P = similarity_matrix(bits).weights
    net = SimilarityNetwork(tuple(f"p{i:05d}" for i in range(args.n)), P, 90.0)
    small = np.triu(rng.random((args.brute_n, args.brute_n)), 1)
    small_net = SimilarityNetwork(tuple(map(str, range(args.brute_n))), small + small.T, 1.0)

    cases = [
        (f"similarity N={args.n}", lambda b: similarity_matrix(bits, backend=b).weights,
         lambda x, y: np.allclose(x, y)),
        (f"louvain N={args.n} x4 restarts", lambda b: louvain(net, seed=0, restarts=4, backend=b).assignment,
         lambda x, y: x == y),
        (f"exhaustive N={args.brute_n}", lambda b: brute_force_partition(small_net, backend=b).assignment,
         lambda x, y: x == y),
    ]
    print(f"numba available: {_jit.HAVE_NUMBA}; default backend: {kernels.BACKEND}")
    print(f"{'kernel':<32}{'numba s':>10}{'numpy s':>10}{'speedup':>9}  agree")
    for name, fn, same in cases:
        t_numpy, out_numpy = best_time(lambda: fn("numpy"), args.repeat)
        if _jit.HAVE_NUMBA:
            t_numba, out_numba = best_time(lambda: fn("numba"), args.repeat)
            print(f"{name:<32}{t_numba:>10.4f}{t_numpy:>10.4f}{t_numpy / t_numba:>8.1f}x  {same(out_numba, out_numpy)}")
        else:
            print(f"{name:<32}{'-':>10}{t_numpy:>10.4f}{'-':>9}  -")


if __name__ == "__main__":
    main()
