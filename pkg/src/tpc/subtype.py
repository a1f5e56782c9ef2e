"""Subtype profiles, the minimum-size filter and the persisted model document."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np

from .cohort import VariableSpec
from .errors import EmptyModelError, ModelIncompatibilityError, TPCError
from .similarity import WeightScheme
from .trajectory import Thresholds, stack

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class BaselineNorm:
    """Population mean of each variable's baseline bit."""

    values: np.ndarray  # (V,)

    @classmethod
    def from_bits(cls, bits):
        bits = np.asarray(bits)
        return cls(bits[:, :, 0].mean(axis=0))

    def normalize(self, raw):
        u = np.asarray(self.values, dtype=np.float64)[:, None]
        out = np.array(raw, dtype=np.float64)
        ok = np.broadcast_to(u > 0, out.shape)
        if not ok.all():
            warnings.warn(
                "baseline mean is zero for some variables; their normalized rows fall back to raw",
                RuntimeWarning,
                stacklevel=2,
            )
        np.divide(out, u, out=out, where=ok)
        return out


@dataclass(frozen=True)
class SubtypeProfile:
    subtype_id: int
    size: int
    raw: np.ndarray
    normalized: np.ndarray

    def matrix(self, kind="raw"):
        if kind == "raw":
            return self.raw
        if kind == "normalized":
            return self.normalized
        raise ValueError(f"profile kind must be raw or normalized, got {kind!r}")


def community_profiles(profiles, partition, norm):
    bits = stack(profiles) if not isinstance(profiles, np.ndarray) else profiles
    labels = np.asarray(partition.assignment)
    if len(labels) != len(bits):
        raise TPCError(f"partition covers {len(labels)} patients, got {len(bits)} profiles")
    out = []
    for c in range(partition.n_communities):
        members = bits[labels == c]
        if len(members) == 0:
            raise TPCError(f"community {c} is empty")
        raw = members.sum(axis=0, dtype=np.float64) / len(members)
        out.append(SubtypeProfile(c, len(members), raw, norm.normalize(raw)))
    return out


def filter_small(profiles_list, min_size=10):
    """Drops subtypes smaller than ``min_size`` and renumbers the survivors.

    Returns ``(retained, filtered_patient_count)``.
    """
    retained = [p for p in profiles_list if p.size >= min_size]
    filtered = sum(p.size for p in profiles_list if p.size < min_size)
    if not retained:
        raise EmptyModelError(f"no community has at least {min_size} patients")
    retained = [SubtypeProfile(k, p.size, p.raw, p.normalized) for k, p in enumerate(retained)]
    return retained, filtered


def population_profile(bits):
    return np.asarray(bits).mean(axis=0, dtype=np.float64)


@dataclass
class SubtypeModel:
    variables: list
    time_labels: list
    thresholds: Thresholds
    weights: WeightScheme
    norm: BaselineNorm
    subtypes: list
    min_community_size: int = 10
    seed: int = 0
    restarts: int = 16
    filtered_patients: int = 0
    population: np.ndarray | None = None
    modularity: float | None = None
    n_train: int | None = None
    community_sizes: list = field(default_factory=list)

    @property
    def variable_names(self):
        return [v.name for v in self.variables]

    def sizes(self):
        return [s.size for s in self.subtypes]

    def to_dict(self):
        names = self.variable_names
        return {
            "schema_version": SCHEMA_VERSION,
            "variables": [
                {
                    "name": v.name,
                    "domain": v.domain_label,
                    "kind": v.kind,
                    "direction": v.direction,
                    "source_locus": v.source_locus,
                }
                for v in self.variables
            ],
            "time_labels": list(self.time_labels),
            "thresholds": {k: float(x) for k, x in self.thresholds.values.items()},
            "threshold_provenance": self.thresholds.provenance,
            "weights": np.asarray(self.weights.matrix).tolist(),
            "u0": {n: float(u) for n, u in zip(names, self.norm.values)},
            "subtypes": [
                {
                    "id": s.subtype_id,
                    "size": s.size,
                    "raw": np.asarray(s.raw).tolist(),
                    "normalized": np.asarray(s.normalized).tolist(),
                }
                for s in self.subtypes
            ],
            "population": None if self.population is None else np.asarray(self.population).tolist(),
            "min_community_size": self.min_community_size,
            "seed": self.seed,
            "restarts": self.restarts,
            "filtered_patients": self.filtered_patients,
            "modularity": self.modularity,
            "n_train": self.n_train,
            "community_sizes": list(self.community_sizes),
        }

    def dumps(self):
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())

    @classmethod
    def from_dict(cls, doc):
        version = doc.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ModelIncompatibilityError(
                f"model schema_version {version!r} is not supported (expected {SCHEMA_VERSION})"
            )
        try:
            variables = [
                VariableSpec(v["name"], v.get("domain", ""), v["kind"], int(v["direction"]), v.get("source_locus"))
                for v in doc["variables"]
            ]
            names = [v.name for v in variables]
            subtypes = [
                SubtypeProfile(int(s["id"]), int(s["size"]), np.array(s["raw"], dtype=np.float64),
                               np.array(s["normalized"], dtype=np.float64))
                for s in doc["subtypes"]
            ]
            model = cls(
                variables=variables,
                time_labels=list(doc["time_labels"]),
                thresholds=Thresholds(dict(doc["thresholds"]), doc.get("threshold_provenance", "")),
                weights=WeightScheme(np.array(doc["weights"], dtype=np.float64)),
                norm=BaselineNorm(np.array([doc["u0"][n] for n in names], dtype=np.float64)),
                subtypes=subtypes,
                min_community_size=int(doc["min_community_size"]),
                seed=int(doc["seed"]),
                restarts=int(doc["restarts"]),
                filtered_patients=int(doc["filtered_patients"]),
                population=None if doc.get("population") is None else np.array(doc["population"]),
                modularity=doc.get("modularity"),
                n_train=doc.get("n_train"),
                community_sizes=list(doc.get("community_sizes", [])),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelIncompatibilityError(f"malformed model document: {exc!r}") from None
        shape = (len(variables), len(model.time_labels))
        for s in subtypes:
            if s.raw.shape != shape or s.normalized.shape != shape:
                raise ModelIncompatibilityError(f"subtype {s.subtype_id} profile is not {shape}")
        return model

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ModelIncompatibilityError(f"{path}: not a JSON model ({exc})") from None
        return cls.from_dict(doc)
