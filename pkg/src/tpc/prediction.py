"""Nearest-subtype assignment of held-out patients and prediction accuracy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, EmptyModelError

TIE_TOL = 1e-12


@dataclass(frozen=True)
class Assignment:
    patient_id: str
    time_index: int
    subtype_id: int
    distance: float
    distances: tuple = ()  # distance to every retained subtype, in model order


@dataclass(frozen=True)
class AccuracyReport:
    time_index: int
    matched: int
    total: int
    accuracy: float
    trajectories: list  # per patient: list of Assignment, one per time index

    def to_dict(self, time_labels=None):
        label = time_labels[self.time_index] if time_labels is not None else self.time_index
        return {"time": label, "time_index": self.time_index, "matched": self.matched,
                "total": self.total, "accuracy": self.accuracy}


def subtype_distances(column, model, t, profile="raw"):
    """Euclidean distance from one patient column to every subtype's column ``t``."""
    column = np.asarray(column, dtype=np.float64)
    return np.array([
        np.sqrt(np.sum((column - s.matrix(profile)[:, t]) ** 2)) for s in model.subtypes
    ])


def _pick(dists, model):
    best = dists.min()
    tied = [k for k, d in enumerate(dists) if d <= best + TIE_TOL]
    # larger subtype wins a tie, then the lower id
    return min(tied, key=lambda k: (-model.subtypes[k].size, model.subtypes[k].subtype_id))


def assign_at_time(patient, model, t, profile="raw"):
    if not model.subtypes:
        raise EmptyModelError("model has no retained subtypes")
    matrix = np.asarray(patient.matrix)
    if not 0 <= t < matrix.shape[1]:
        raise ArgumentError(f"time index {t} outside 0..{matrix.shape[1] - 1}")
    if matrix.shape[0] != len(model.variables):
        raise ArgumentError(f"patient has {matrix.shape[0]} variables, model has {len(model.variables)}")
    dists = subtype_distances(matrix[:, t], model, t, profile)
    k = _pick(dists, model)
    return Assignment(patient.patient_id, t, model.subtypes[k].subtype_id, float(dists[k]),
                      tuple(float(d) for d in dists))


def trajectory(patient, model, profile="raw"):
    return [assign_at_time(patient, model, t, profile) for t in range(patient.matrix.shape[1])]


def prediction_accuracy(test_patients, model, t, profile="raw"):
    test_patients = list(test_patients)
    if not test_patients:
        raise ArgumentError("empty test set")
    if t < 1:
        raise ArgumentError("accuracy horizon must be a later time index (t >= 1)")
    trajectories = [trajectory(p, model, profile) for p in test_patients]
    matched = sum(tr[0].subtype_id == tr[t].subtype_id for tr in trajectories)
    total = len(trajectories)
    return AccuracyReport(t, matched, total, matched / total, trajectories)
