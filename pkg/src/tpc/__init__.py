"""Trajectory profile clustering: subtype discovery and early subtype prediction
for longitudinal patient cohorts via a patient-patient similarity network."""

from .cohort import (
    CohortSplit,
    LongitudinalCohort,
    VariableSpec,
    exclude_incomplete,
    load_cohort,
    split_train_test,
    write_cohort,
)
from .community import Partition, brute_force_partition, louvain, modularity
from .pipeline import FitResult, fit_model, profiles_for
from .prediction import AccuracyReport, Assignment, assign_at_time, prediction_accuracy
from .similarity import SimilarityNetwork, WeightScheme, hamming_check, similarity_matrix
from .subtype import BaselineNorm, SubtypeModel, SubtypeProfile, community_profiles, filter_small
from .synthetic import SyntheticSpec, adjusted_rand_index, clinical_spec, generate_cohort
from .trajectory import Thresholds, TrajectoryProfile, binarize, fit_thresholds, orient

__version__ = "0.1.0"

__all__ = [
    "AccuracyReport",
    "adjusted_rand_index",
    "assign_at_time",
    "Assignment",
    "BaselineNorm",
    "binarize",
    "brute_force_partition",
    "clinical_spec",
    "CohortSplit",
    "community_profiles",
    "exclude_incomplete",
    "filter_small",
    "fit_model",
    "fit_thresholds",
    "FitResult",
    "generate_cohort",
    "hamming_check",
    "load_cohort",
    "LongitudinalCohort",
    "louvain",
    "modularity",
    "orient",
    "Partition",
    "prediction_accuracy",
    "profiles_for",
    "similarity_matrix",
    "SimilarityNetwork",
    "split_train_test",
    "SubtypeModel",
    "SubtypeProfile",
    "SyntheticSpec",
    "Thresholds",
    "TrajectoryProfile",
    "VariableSpec",
    "WeightScheme",
    "write_cohort",
]
