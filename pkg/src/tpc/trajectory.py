"""Severity orientation, baseline-median thresholds and binary trajectory profiles."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, EmptyCohortError


@dataclass(frozen=True)
class Thresholds:
    values: dict  # variable name -> baseline median of the oriented values
    provenance: str = ""

    def __getitem__(self, name):
        return self.values[name]

    def to_dict(self):
        return dict(self.values)


@dataclass(frozen=True)
class TrajectoryProfile:
    patient_id: str
    matrix: np.ndarray  # V x M, uint8 in {0, 1}

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=np.uint8)
        if mat.ndim != 2:
            raise ValueError("profile matrix must be 2-D")
        if (mat > 1).any():
            raise ValueError("profile entries must be 0 or 1")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)


def orient(cohort):
    """Oriented array: continuous variables multiplied by their direction so that
    larger always means more severe; binary variables untouched."""
    signs = np.array([v.direction if v.is_continuous else 1 for v in cohort.variables], dtype=np.float64)
    return cohort.values * signs[None, :, None]


def fit_thresholds(oriented_train, variables, provenance=""):
    oriented_train = np.asarray(oriented_train, dtype=np.float64)
    if oriented_train.shape[0] == 0:
        raise EmptyCohortError("cannot fit thresholds on zero patients")
    baseline = oriented_train[:, :, 0]
    # np.median averages the two central order statistics for even N
    values = {
        var.name: float(np.median(baseline[:, k]))
        for k, var in enumerate(variables)
        if var.is_continuous
    }
    return Thresholds(values, provenance)


def binarize_array(oriented, thresholds, variables):
    """N x V x M uint8 array of profile bits."""
    oriented = np.asarray(oriented, dtype=np.float64)
    out = np.empty(oriented.shape, dtype=np.uint8)
    for k, var in enumerate(variables):
        if var.is_continuous:
            try:
                theta = thresholds[var.name]
            except KeyError:
                raise ConfigurationError(f"no threshold for continuous variable {var.name!r}") from None
            out[:, k, :] = oriented[:, k, :] > theta
        else:
            # gender (male = 1) and genotype one-hot columns are already bits
            out[:, k, :] = oriented[:, k, :] > 0.5
    return out


def binarize(oriented, thresholds, variables, patient_ids=None):
    bits = binarize_array(oriented, thresholds, variables)
    if patient_ids is None:
        patient_ids = [str(i) for i in range(len(bits))]
    return [TrajectoryProfile(pid, b) for pid, b in zip(patient_ids, bits)]


def stack(profiles):
    """Profiles -> N x V x M uint8 array."""
    if len(profiles) == 0:
        return np.zeros((0, 0, 0), dtype=np.uint8)
    return np.stack([p.matrix for p in profiles])


def cohort_profiles(cohort, thresholds):
    return binarize(orient(cohort), thresholds, cohort.variables, cohort.patient_ids)
