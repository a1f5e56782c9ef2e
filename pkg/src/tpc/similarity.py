"""Patient-patient trajectory similarity network."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ArgumentError, DegenerateNetworkError
from .trajectory import TrajectoryProfile, stack


@dataclass(frozen=True)
class WeightScheme:
    matrix: np.ndarray  # V x M

    def __post_init__(self):
        w = np.array(self.matrix, dtype=np.float64)
        if w.ndim != 2:
            raise ArgumentError("weight matrix must be V x M")
        if not np.isfinite(w).all() or (w < 0).any():
            raise ArgumentError("weights must be finite and non-negative")
        if not (w > 0).any():
            raise ArgumentError("weights must not all be zero")
        w.setflags(write=False)
        object.__setattr__(self, "matrix", w)

    @classmethod
    def uniform(cls, n_variables, n_times):
        return cls(np.ones((n_variables, n_times)))

    @property
    def total(self):
        return float(self.matrix.sum())

    def scaled(self, factor):
        return WeightScheme(self.matrix * factor)


def load_weights(path, variable_names, time_labels):
    """Long CSV ``variable,time,weight``; cells not listed keep weight 1."""
    vi = {v: k for k, v in enumerate(variable_names)}
    ti = {t: k for k, t in enumerate(time_labels)}
    w = np.ones((len(variable_names), len(time_labels)))
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["variable", "time", "weight"]:
            raise ArgumentError(f"{path}: expected header variable,time,weight")
        for row in reader:
            name, time = row["variable"].strip(), row["time"].strip()
            if name not in vi:
                raise ArgumentError(f"{path}:{reader.line_num}: unknown variable {name!r}")
            if time not in ti:
                raise ArgumentError(f"{path}:{reader.line_num}: unknown time {time!r}")
            try:
                w[vi[name], ti[time]] = float(row["weight"])
            except ValueError:
                raise ArgumentError(f"{path}:{reader.line_num}: bad weight {row['weight']!r}") from None
    return WeightScheme(w)


@dataclass(frozen=True)
class SimilarityNetwork:
    patient_ids: tuple
    weights: np.ndarray  # N x N, symmetric, zero diagonal
    max_weight: float

    @property
    def n(self):
        return len(self.patient_ids)

    def thresholded(self, min_edge):
        """Copy with every edge below ``min_edge`` set to zero."""
        w = np.where(self.weights >= min_edge, self.weights, 0.0)
        return SimilarityNetwork(self.patient_ids, w, self.max_weight)

    def permuted(self, perm):
        perm = np.asarray(perm)
        return SimilarityNetwork(
            tuple(self.patient_ids[i] for i in perm),
            self.weights[np.ix_(perm, perm)],
            self.max_weight,
        )

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["patient_id", *self.patient_ids])
            for pid, row in zip(self.patient_ids, self.weights):
                w.writerow([pid, *(repr(float(x)) for x in row)])


def similarity_matrix(profiles, weights=None, backend=None):
    """Weighted count of matching profile entries for every pair of patients.

    ``profiles`` is a list of :class:`TrajectoryProfile` or an N x V x M bit
    array. The diagonal is zero.
    """
    if isinstance(profiles, np.ndarray):
        bits = profiles
        ids = tuple(str(i) for i in range(len(bits)))
    else:
        profiles = list(profiles)
        ids = tuple(p.patient_id for p in profiles)
        shapes = {p.matrix.shape for p in profiles}
        if len(shapes) > 1:
            raise ArgumentError(f"profiles have mixed shapes {sorted(shapes)}")
        bits = stack(profiles)
    if len(bits) < 2:
        raise DegenerateNetworkError("a similarity network needs at least two profiles")
    _, v, m = bits.shape
    if weights is None:
        weights = WeightScheme.uniform(v, m)
    if weights.matrix.shape != (v, m):
        raise ArgumentError(f"weights are {weights.matrix.shape}, profiles are {(v, m)}")
    flat = bits.reshape(len(bits), v * m)
    P = kernels.similarity(flat, weights.matrix.reshape(-1), backend=backend)
    P.setflags(write=False)
    return SimilarityNetwork(ids, P, weights.total)


def hamming_check(profiles, i, j):
    """Number of differing entries, by an explicit element loop."""
    a = profiles[i].matrix if isinstance(profiles[i], TrajectoryProfile) else profiles[i]
    b = profiles[j].matrix if isinstance(profiles[j], TrajectoryProfile) else profiles[j]
    count = 0
    for x, y in zip(np.asarray(a).ravel().tolist(), np.asarray(b).ravel().tolist()):
        if x != y:
            count += 1
    return count
