"""Small graph builders and a pure-Python modularity oracle shared by tests."""

import numpy as np

from tpc.similarity import SimilarityNetwork


def network(A, ids=None):
    A = np.asarray(A, dtype=float)
    if ids is None:
        ids = [f"n{i:02d}" for i in range(len(A))]
    return SimilarityNetwork(tuple(ids), A, float(A.max()))


def random_weighted(rng, n, density=0.7):
    A = np.triu(rng.random((n, n)) * (rng.random((n, n)) < density), 1)
    A = A + A.T
    if not A.any():
        A[0, 1] = A[1, 0] = 1.0
    return A


def planted_blocks(sizes, w_in=10.0, w_out=1.0):
    labels = np.repeat(np.arange(len(sizes)), sizes)
    A = np.where(labels[:, None] == labels[None, :], w_in, w_out).astype(float)
    np.fill_diagonal(A, 0.0)
    return A, labels


def cliques(*sizes):
    n = sum(sizes)
    A = np.zeros((n, n))
    start = 0
    for s in sizes:
        A[start:start + s, start:start + s] = 1.0
        start += s
    np.fill_diagonal(A, 0.0)
    return A


def modularity_oracle(A, labels):
    """Direct double sum over node pairs."""
    A = np.asarray(A, dtype=float).tolist()
    n = len(A)
    k = [sum(row) for row in A]
    two_m = sum(k)
    q = 0.0
    for i in range(n):
        for j in range(n):
            if labels[i] == labels[j]:
                q += A[i][j] - k[i] * k[j] / two_m
    return q / two_m


def set_partitions(items):
    """Every set partition of ``items`` by recursion (independent of the library)."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for b in range(len(part)):
            yield part[:b] + [[first] + part[b]] + part[b + 1:]
        yield [[first]] + part


def best_q_oracle(A):
    n = len(A)
    best = -np.inf
    for part in set_partitions(list(range(n))):
        labels = [0] * n
        for c, block in enumerate(part):
            for i in block:
                labels[i] = c
        best = max(best, modularity_oracle(A, labels))
    return best
