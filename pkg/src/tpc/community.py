"""Weighted Newman-Girvan modularity, Louvain optimisation and an exhaustive oracle.

Modularity of a partition ``c`` of a weighted graph ``A`` is::

    Q = 1/(2m) * sum_ij [A_ij - k_i k_j / (2m)] * delta(c_i, c_j)

with ``k`` the weighted degrees and ``2m = sum_ij A_ij``. Resolution is fixed at 1.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    ArgumentError,
    DegenerateNetworkError,
    ParseError,
    SizeLimitError,
    UndefinedModularityError,
)
from .similarity import SimilarityNetwork

MOVE_TOL = 1e-12
BRUTE_FORCE_LIMIT = 10


@dataclass(frozen=True)
class Partition:
    assignment: tuple
    modularity: float

    def __post_init__(self):
        labels = tuple(int(c) for c in self.assignment)
        if labels and sorted(set(labels)) != list(range(max(labels) + 1)):
            raise ArgumentError("community indices must be contiguous from 0")
        object.__setattr__(self, "assignment", labels)

    @property
    def n_communities(self):
        return max(self.assignment) + 1 if self.assignment else 0

    def sizes(self):
        return np.bincount(self.assignment, minlength=self.n_communities)

    def members(self, community):
        return [i for i, c in enumerate(self.assignment) if c == community]


def canonical_labels(labels):
    """Relabel communities 0, 1, ... in order of first appearance."""
    mapping = {}
    out = np.empty(len(labels), dtype=np.int64)
    for i, c in enumerate(np.asarray(labels).tolist()):
        out[i] = mapping.setdefault(c, len(mapping))
    return out


def _adjacency(network):
    if isinstance(network, SimilarityNetwork):
        return np.asarray(network.weights, dtype=np.float64)
    return np.asarray(network, dtype=np.float64)


def modularity(network, assignment):
    A = _adjacency(network)
    labels = np.asarray(assignment)
    if labels.shape != (A.shape[0],):
        raise ArgumentError(f"assignment has length {labels.size}, network has {A.shape[0]} nodes")
    two_m = A.sum()
    if not two_m > 0:
        raise UndefinedModularityError("modularity is undefined on a network with zero total weight")
    q = 0.0
    for c in np.unique(labels):
        idx = np.flatnonzero(labels == c)
        inside = A[np.ix_(idx, idx)].sum()
        tot = A[idx, :].sum()
        q += inside / two_m - (tot / two_m) ** 2
    return float(q)


def _one_level_aggregate(adj, comm):
    _, comm = np.unique(comm, return_inverse=True)
    size = comm.max() + 1
    S = np.zeros((adj.shape[0], size))
    S[np.arange(adj.shape[0]), comm] = 1.0
    return comm, S.T @ adj @ S


def _louvain_run(A, rng, backend=None):
    """One seeded Louvain run on an adjacency already in canonical node order."""
    two_m = A.sum()
    tol = MOVE_TOL * two_m / 2.0  # dQ = d(gain) * 2 / (2m)
    node_comm = np.arange(A.shape[0], dtype=np.int64)
    adj = np.ascontiguousarray(A)
    while True:
        size = adj.shape[0]
        degree = adj.sum(axis=1)
        comm = np.arange(size, dtype=np.int64)
        tot = degree.copy()
        order = rng.permutation(size).astype(np.int64)
        moves = kernels.local_moves(adj, order, comm, degree, tot, two_m, tol, backend=backend)
        if moves == 0:
            break
        comm, adj = _one_level_aggregate(adj, comm)
        adj = np.ascontiguousarray(adj)
        node_comm = comm[node_comm]
        if adj.shape[0] == size or adj.shape[0] == 1:
            break
    return node_comm


def louvain(network, seed=0, restarts=16, backend=None):
    """Best-of-``restarts`` Louvain partition.

    Nodes are first put in canonical order (sorted patient id), so relabelling the
    input permutes the output without changing it. Each restart draws its node
    visiting orders from its own child of ``SeedSequence(seed)``; a strictly
    better Q (beyond 1e-12) is needed to displace an earlier restart.
    """
    A = _adjacency(network)
    n = A.shape[0]
    if n < 2:
        raise DegenerateNetworkError("louvain needs at least two nodes")
    if restarts < 1:
        raise ArgumentError("restarts must be positive")
    if not A.sum() > 0:
        raise UndefinedModularityError("network has zero total weight")

    if isinstance(network, SimilarityNetwork):
        canon = np.array(sorted(range(n), key=lambda i: network.patient_ids[i]), dtype=np.int64)
    else:
        canon = np.arange(n)
    Ac = np.ascontiguousarray(A[np.ix_(canon, canon)])

    best, best_q = None, -np.inf
    for child in np.random.SeedSequence(seed).spawn(restarts):
        comm = _louvain_run(Ac, np.random.default_rng(child), backend=backend)
        q = modularity(Ac, comm)
        if best is None or q > best_q + MOVE_TOL:
            best, best_q = comm, q
    labels = np.empty(n, dtype=np.int64)
    labels[canon] = best
    labels = canonical_labels(labels)
    return Partition(tuple(labels), modularity(A, labels))


def brute_force_partition(network, backend=None):
    """Global modularity maximiser by enumeration of every set partition.

    Ties (within 1e-12) go to the partition with fewest communities, then to the
    lexicographically smallest assignment.
    """
    A = _adjacency(network)
    n = A.shape[0]
    if n > BRUTE_FORCE_LIMIT:
        raise SizeLimitError(f"brute force is limited to {BRUTE_FORCE_LIMIT} nodes, got {n}")
    if n == 0:
        raise DegenerateNetworkError("empty network")
    if n == 1:
        return Partition((0,), 0.0)
    two_m = A.sum()
    if not two_m > 0:
        raise UndefinedModularityError("network has zero total weight")
    k = A.sum(axis=1)
    B = A - np.outer(k, k) / two_m
    rgs = kernels.restricted_growth_strings(n)
    scores = kernels.partition_scores(rgs, B, backend=backend) / two_m
    near = np.flatnonzero(scores >= scores.max() - MOVE_TOL)
    counts = rgs[near].max(axis=1)
    pick = near[counts == counts.min()][0]
    labels = rgs[pick].astype(np.int64)
    return Partition(tuple(labels), modularity(A, labels))


def write_partition(path, patient_ids, partition):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["patient_id", "community"])
        for pid, c in zip(patient_ids, partition.assignment):
            w.writerow([pid, c])


def read_partition(path):
    """Returns ``{patient_id: community}`` in file order."""
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["patient_id", "community"]:
            raise ParseError("expected header patient_id,community", path, 1)
        for row in reader:
            if not row:
                continue
            try:
                out[row[0]] = int(row[1])
            except (IndexError, ValueError):
                raise ParseError(f"bad row {row!r}", path, reader.line_num) from None
    return out
