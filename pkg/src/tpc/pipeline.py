"""End-to-end fitting on a training cohort and binarisation of new patients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .community import Partition, louvain
from .errors import CohortValueError, ModelIncompatibilityError
from .similarity import SimilarityNetwork, WeightScheme, similarity_matrix
from .subtype import (
    BaselineNorm,
    SubtypeModel,
    community_profiles,
    filter_small,
    population_profile,
)
from .trajectory import binarize, fit_thresholds, orient, stack


@dataclass
class FitResult:
    model: SubtypeModel
    partition: Partition
    network: SimilarityNetwork
    profiles: list
    retained_labels: np.ndarray  # retained subtype id per training patient, -1 if filtered

    @property
    def patient_ids(self):
        return self.network.patient_ids


def fit_model(train, seed=0, restarts=16, min_community_size=10, weights=None,
              min_edge=None, backend=None):
    if not train.is_complete:
        raise CohortValueError("training cohort has missing cells; run exclude_incomplete first")
    oriented = orient(train)
    thresholds = fit_thresholds(oriented, train.variables, provenance=train.fingerprint())
    profiles = binarize(oriented, thresholds, train.variables, train.patient_ids)
    bits = stack(profiles)
    if weights is None:
        weights = WeightScheme.uniform(train.n_variables, train.n_times)

    network = similarity_matrix(profiles, weights, backend=backend)
    clustered = network.thresholded(min_edge) if min_edge else network
    partition = louvain(clustered, seed=seed, restarts=restarts, backend=backend)

    norm = BaselineNorm.from_bits(bits)
    all_profiles = community_profiles(bits, partition, norm)
    retained, filtered = filter_small(all_profiles, min_community_size)

    remap = {}
    for p in all_profiles:
        if p.size >= min_community_size:
            remap[p.subtype_id] = len(remap)
    labels = np.array([remap.get(c, -1) for c in partition.assignment], dtype=np.int64)

    model = SubtypeModel(
        variables=list(train.variables),
        time_labels=list(train.time_labels),
        thresholds=thresholds,
        weights=weights,
        norm=norm,
        subtypes=retained,
        min_community_size=min_community_size,
        seed=int(seed),
        restarts=int(restarts),
        filtered_patients=int(filtered),
        population=population_profile(bits),
        modularity=partition.modularity,
        n_train=train.n_patients,
        community_sizes=[int(s) for s in partition.sizes()],
    )
    return FitResult(model, partition, network, profiles, labels)


def check_compatible(model, cohort):
    if cohort.variable_names != model.variable_names:
        raise ModelIncompatibilityError("cohort variables do not match the model's registry")
    if list(cohort.time_labels) != list(model.time_labels):
        raise ModelIncompatibilityError(
            f"cohort time labels {list(cohort.time_labels)} differ from the model's {model.time_labels}"
        )


def profiles_for(model, cohort):
    """Binarise new patients with the model's (training) thresholds."""
    check_compatible(model, cohort)
    if not cohort.is_complete:
        raise CohortValueError("cohort has missing cells; run exclude_incomplete first")
    return binarize(orient(cohort), model.thresholds, cohort.variables, cohort.patient_ids)
