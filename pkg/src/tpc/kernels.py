"""Hot numeric kernels.

Each kernel exists twice: a numba ``@njit`` loop (``*_numba``) and a vectorised
numpy equivalent (``*_numpy``). The dispatching wrappers at the bottom pick one
according to ``BACKEND``, which defaults to numba unless ``TPC_DISABLE_NUMBA``
is set. Both paths must return identical results for unit-weight inputs and
agree to rounding otherwise; ``tests/test_kernels.py`` holds them to that.

Kernels take plain arrays only. Validation lives in the calling modules.
"""

import numpy as np

from . import _jit
from ._jit import njit

BACKEND = "numba" if _jit.USE_NUMBA else "numpy"


# -- match-count similarity -------------------------------------------------


@njit
def similarity_numba(bits, weights):
    n, d = bits.shape
    out = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        for j in range(i + 1, n):
            s = 0.0
            for c in range(d):
                # branch-free match indicator lets the loop vectorise
                s += weights[c] * (1 - (bits[i, c] ^ bits[j, c]))
            out[i, j] = s
            out[j, i] = s
    return out


def similarity_numpy(bits, weights):
    on = bits.astype(np.float64)
    off = 1.0 - on
    full = (on * weights) @ on.T + (off * weights) @ off.T
    upper = np.triu(full, 1)
    # mirror the upper triangle so the result is bit-exact symmetric
    return upper + upper.T


# -- Louvain phase one: repeated local node moves ----------------------------


@njit
def local_moves_numba(adj, order, comm, degree, tot, two_m, tol):
    n = adj.shape[0]
    kin = np.zeros(n, dtype=np.float64)
    moves = 0
    improved = True
    while improved:
        improved = False
        for idx in range(n):
            i = order[idx]
            own = comm[i]
            ki = degree[i]
            for c in range(n):
                kin[c] = 0.0
            for j in range(n):
                if j != i:
                    kin[comm[j]] += adj[i, j]
            tot[own] -= ki
            own_gain = kin[own] - tot[own] * ki / two_m
            best = -np.inf
            for c in range(n):
                if c != own and kin[c] > 0.0:
                    g = kin[c] - tot[c] * ki / two_m
                    if g > best:
                        best = g
            target = own
            if best > own_gain + tol:
                for c in range(n):
                    if c != own and kin[c] > 0.0:
                        g = kin[c] - tot[c] * ki / two_m
                        if g >= best - tol and g > own_gain + tol:
                            target = c
                            break
            tot[target] += ki
            if target != own:
                comm[i] = target
                moves += 1
                improved = True
    return moves


def local_moves_numpy(adj, order, comm, degree, tot, two_m, tol):
    n = adj.shape[0]
    idx = np.arange(n)
    moves = 0
    improved = True
    while improved:
        improved = False
        for i in order:
            own = comm[i]
            ki = degree[i]
            row = adj[i].copy()
            row[i] = 0.0
            kin = np.bincount(comm, weights=row, minlength=n)
            tot[own] -= ki
            gains = kin - tot * ki / two_m
            own_gain = gains[own]
            cand = (kin > 0.0) & (idx != own)
            target = own
            if cand.any():
                best = gains[cand].max()
                if best > own_gain + tol:
                    ok = cand & (gains >= best - tol) & (gains > own_gain + tol)
                    target = int(np.flatnonzero(ok)[0])
            tot[target] += ki
            if target != own:
                comm[i] = target
                moves += 1
                improved = True
    return moves


# -- exhaustive partition scoring --------------------------------------------


def restricted_growth_strings(n):
    """All set partitions of ``n`` items as restricted growth strings, in
    lexicographic order. Row count is the Bell number of ``n``."""
    rgs = np.zeros((1, 1), dtype=np.int8)
    top = np.zeros(1, dtype=np.int8)
    for _ in range(1, n):
        counts = top.astype(np.int64) + 2
        parent = np.repeat(np.arange(len(rgs)), counts)
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        vals = (np.arange(counts.sum()) - starts).astype(np.int8)
        rgs = np.hstack([rgs[parent], vals[:, None]])
        top = np.maximum(top[parent], vals)
    return rgs


@njit
def partition_scores_numba(rgs, bmat):
    p, n = rgs.shape
    out = np.empty(p, dtype=np.float64)
    for r in range(p):
        s = 0.0
        for i in range(n):
            ci = rgs[r, i]
            for j in range(n):
                if rgs[r, j] == ci:
                    s += bmat[i, j]
        out[r] = s
    return out


def partition_scores_numpy(rgs, bmat, chunk=16384):
    out = np.empty(len(rgs), dtype=np.float64)
    for lo in range(0, len(rgs), chunk):
        block = rgs[lo:lo + chunk]
        same = block[:, :, None] == block[:, None, :]
        out[lo:lo + chunk] = np.einsum("pij,ij->p", same, bmat)
    return out


# -- dispatch ----------------------------------------------------------------


def _pick(numba_fn, numpy_fn, backend):
    backend = backend or BACKEND
    if backend == "numba":
        return numba_fn
    if backend == "numpy":
        return numpy_fn
    raise ValueError(f"unknown kernel backend {backend!r}")


def similarity(bits, weights, backend=None):
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    weights = np.ascontiguousarray(weights, dtype=np.float64)
    return _pick(similarity_numba, similarity_numpy, backend)(bits, weights)


def local_moves(adj, order, comm, degree, tot, two_m, tol, backend=None):
    fn = _pick(local_moves_numba, local_moves_numpy, backend)
    return fn(adj, order, comm, degree, tot, float(two_m), float(tol))


def partition_scores(rgs, bmat, backend=None):
    bmat = np.ascontiguousarray(bmat, dtype=np.float64)
    return _pick(partition_scores_numba, partition_scores_numpy, backend)(rgs, bmat)
