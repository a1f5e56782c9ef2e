"""Planted-subtype cohort generator and partition-recovery scoring.

Each synthetic patient copies the bit prototype of a drawn subtype, flips bits
with probability ``flip_noise`` and is emitted as raw values: continuous
variables become ``direction * (bit + U(-jitter, jitter))``, binary variables
carry the bit. Binary-static rows are flipped once per patient so they stay
constant over time; a genotype locus is flipped by redrawing its genotype.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cohort import BINARY_STATIC, CONTINUOUS, LongitudinalCohort, VariableSpec, write_cohort
from .errors import ArgumentError

CLINICAL_TIME_LABELS = ("bl", "1", "2", "3", "4")
REFERENCE_SUBTYPE_SIZES = (22, 72, 61)

# name, domain, direction; higher cognitive and functional scores are healthier
_CLINICAL = [
    ("Age", "Demographics", 1),
    ("MDS-UPDRS1", "General PD Severity", 1),
    ("MDS-UPDRS2", "General PD Severity", 1),
    ("MDS-UPDRS3", "General PD Severity", 1),
    ("T-MDS-UPDRS", "General PD Severity", 1),
    ("JOLO", "Cognitive", -1),
    ("SDM", "Cognitive", -1),
    ("MoCA", "Cognitive", -1),
    ("HVLT", "Cognitive", -1),
    ("LNS", "Cognitive", -1),
    ("SFT", "Cognitive", -1),
    ("SEADL", "Disability", -1),
    ("RBDQ", "Sleep", 1),
    ("ESS", "Sleep", 1),
    ("SCOPA-AUT", "Autonomic", 1),
    ("GDS", "Mental Health", 1),
    ("STAI", "Mental Health", 1),
]
_LOCI = [("G1", "rs11060180"), ("G2", "rs6430538"), ("G3", "rs823118"), ("G4", "rs356181")]
_GENOTYPES = ("CC", "CT", "TT")


def clinical_registry(genetics=False):
    """Gender plus the 17 continuous clinical scales (18 variables), optionally
    followed by 4 loci x 3 one-hot genotype columns."""
    variables = [VariableSpec("Gender", "Demographics", BINARY_STATIC, 1)]
    variables += [VariableSpec(n, d, CONTINUOUS, s) for n, d, s in _CLINICAL]
    if genetics:
        for name, rsid in _LOCI:
            variables += [
                VariableSpec(f"{name}-{g}", "Genetic Risk Loci", BINARY_STATIC, 1, rsid) for g in _GENOTYPES
            ]
    return variables


def generic_registry(n_variables, continuous_fraction=1.0):
    n_cont = int(round(n_variables * continuous_fraction))
    return [
        VariableSpec(f"V{k:02d}", "Synthetic", CONTINUOUS if k < n_cont else BINARY_STATIC, 1)
        for k in range(n_variables)
    ]


def _locus_groups(variables):
    groups = {}
    for k, var in enumerate(variables):
        if var.source_locus:
            groups.setdefault(var.source_locus, []).append(k)
    return list(groups.values())


@dataclass
class SyntheticSpec:
    k: int
    prototypes: np.ndarray  # K x V x M bits
    subtype_weights: np.ndarray
    n: int
    flip_noise: float = 0.05
    seed: int = 0
    variables: list = None
    time_labels: tuple = None
    jitter: float = 0.4
    assignment: str = "multinomial"  # or "quota": exact largest-remainder counts
    n_incomplete: int = 0

    def __post_init__(self):
        self.prototypes = np.asarray(self.prototypes, dtype=np.uint8)
        self.subtype_weights = np.asarray(self.subtype_weights, dtype=np.float64)
        if self.prototypes.ndim != 3:
            raise ArgumentError("prototypes must be K x V x M")
        k, v, m = self.prototypes.shape
        if k != self.k:
            raise ArgumentError(f"{k} prototypes given for K={self.k}")
        if self.k > self.n:
            raise ArgumentError(f"K={self.k} exceeds N={self.n}")
        if self.variables is None:
            self.variables = generic_registry(v)
        if self.time_labels is None:
            self.time_labels = tuple(["bl"] + [str(t) for t in range(1, m)])
        if len(self.variables) != v or len(self.time_labels) != m:
            raise ArgumentError("registry/time labels do not match prototype shape")
        if (self.prototypes > 1).any():
            raise ArgumentError("prototypes must be bit matrices")
        flat = self.prototypes.reshape(k, -1)
        if len({row.tobytes() for row in flat}) != k:
            raise ArgumentError("prototypes must be pairwise distinct")
        if self.subtype_weights.shape != (k,) or (self.subtype_weights <= 0).any():
            raise ArgumentError("subtype weights must be K positive numbers")
        self.subtype_weights = self.subtype_weights / self.subtype_weights.sum()
        if not 0.0 <= self.flip_noise < 0.5:
            raise ArgumentError("flip_noise must lie in [0, 0.5)")
        if not 0.0 <= self.jitter < 0.5:
            raise ArgumentError("jitter must lie in [0, 0.5)")
        if self.assignment not in ("multinomial", "quota"):
            raise ArgumentError("assignment must be multinomial or quota")
        if not 0 <= self.n_incomplete < self.n:
            raise ArgumentError("n_incomplete must leave at least one complete patient")

    @property
    def v(self):
        return self.prototypes.shape[1]

    @property
    def m(self):
        return self.prototypes.shape[2]

    @property
    def continuous_fraction(self):
        return float(np.mean([var.is_continuous for var in self.variables]))


@dataclass
class LabeledCohort:
    cohort: LongitudinalCohort
    true_labels: np.ndarray
    bits: np.ndarray = field(repr=False, default=None)  # emitted bits before value emission


def _balanced_patterns(k, weights, rng, tol=0.15):
    """Baseline bit patterns over the K prototypes whose weighted share of ones
    lies within ``tol`` of one half; falls back to the closest patterns."""
    patterns = np.array(list(itertools.product((0, 1), repeat=k)), dtype=np.uint8) if k <= 12 else None
    if patterns is None:
        patterns = rng.integers(0, 2, size=(4096, k), dtype=np.uint8)
    share = patterns @ weights
    gap = np.abs(share - 0.5)
    ok = gap <= tol
    if not ok.any():
        ok = gap <= gap.min() + 1e-12
    return patterns[ok]


def make_prototypes(k, variables, m, weights, rng, min_separation=0.4, column_separation=0.25,
                    candidates=32, max_tries=4000):
    """K distinct bit prototypes (K x V x M).

    Continuous rows get a baseline column drawn from patterns balanced under
    ``weights`` (so the baseline median tends to fall between bit clusters) and
    uniform random bits afterwards. Binary rows are constant over time and
    genotype trios are one-hot. Pairs must differ in at least
    ``min_separation * V * M`` entries overall and ``column_separation * V`` in
    every time column. Of the first ``candidates`` valid draws, the one with the
    largest minimum pairwise distance is kept.
    """
    v = len(variables)
    weights = np.asarray(weights, dtype=np.float64)
    weights = weights / weights.sum()
    patterns = _balanced_patterns(k, weights, rng)
    groups = _locus_groups(variables)
    in_group = {i for g in groups for i in g}
    best, best_gap, found = None, None, 0
    for _ in range(max_tries):
        protos = np.zeros((k, v, m), dtype=np.uint8)
        for j, var in enumerate(variables):
            if j in in_group:
                continue
            if var.is_continuous:
                protos[:, j, 0] = patterns[rng.integers(len(patterns))]
                protos[:, j, 1:] = rng.integers(0, 2, size=(k, m - 1))
            else:
                protos[:, j, :] = rng.integers(0, 2, size=(k, 1))
        for g in groups:
            pick = rng.integers(0, len(g), size=k)
            for p in range(k):
                protos[p, g[pick[p]], :] = 1
        if not _separated(protos, min_separation, column_separation):
            continue
        gap = min_pairwise_hamming(protos)
        if best is None or gap > best_gap:
            best, best_gap = protos, gap
        found += 1
        if found >= candidates:
            break
    if best is None:
        raise ArgumentError(
            f"could not draw {k} prototypes with separation {min_separation} in {max_tries} tries"
        )
    return best


def min_pairwise_hamming(protos):
    k = len(protos)
    if k < 2:
        return protos[0].size if k else 0
    return min(int((protos[a] != protos[b]).sum()) for a, b in itertools.combinations(range(k), 2))


def _separated(protos, min_separation, column_separation):
    k, v, m = protos.shape
    for a, b in itertools.combinations(range(k), 2):
        diff = protos[a] != protos[b]
        if diff.sum() < min_separation * v * m:
            return False
        if (diff.sum(axis=0) < column_separation * v).any():
            return False
    return k == 1 or len({p.tobytes() for p in protos}) == k


def clinical_spec(n=198, k=3, flip_noise=0.05, seed=0, genetics=False, weights=None,
                  n_incomplete=0, jitter=0.4, assignment="multinomial", min_separation=0.4):
    """Generator settings for a clinical-study shape: 18 variables, 5 visits and
    subtype weights proportional to 22/72/61 when K=3."""
    variables = clinical_registry(genetics)
    if weights is None:
        weights = REFERENCE_SUBTYPE_SIZES if k == 3 else np.ones(k)
    weights = np.asarray(weights, dtype=np.float64)
    if len(weights) != k:
        raise ArgumentError(f"{len(weights)} weights given for K={k}")
    rng = np.random.default_rng(np.random.SeedSequence([seed, 1]))
    protos = make_prototypes(k, variables, len(CLINICAL_TIME_LABELS), weights, rng, min_separation)
    return SyntheticSpec(k, protos, weights, n, flip_noise, seed, variables, CLINICAL_TIME_LABELS,
                         jitter, assignment, n_incomplete)


def _quota_counts(n, weights):
    raw = n * np.asarray(weights)
    counts = np.floor(raw).astype(np.int64)
    order = np.argsort(-(raw - counts), kind="stable")
    counts[order[: n - counts.sum()]] += 1
    return counts


def generate_cohort(spec):
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 2]))
    n, v, m = spec.n, spec.v, spec.m
    if spec.assignment == "quota":
        labels = rng.permutation(np.repeat(np.arange(spec.k), _quota_counts(n, spec.subtype_weights)))
    else:
        labels = rng.choice(spec.k, size=n, p=spec.subtype_weights)

    bits = spec.prototypes[labels].copy()
    cont = np.array([var.is_continuous for var in spec.variables])
    groups = _locus_groups(spec.variables)
    in_group = np.zeros(v, dtype=bool)
    for g in groups:
        in_group[g] = True
    static = ~cont & ~in_group

    flips = rng.random((n, v, m)) < spec.flip_noise
    bits[:, cont, :] ^= flips[:, cont, :].astype(np.uint8)
    static_flips = rng.random((n, v)) < spec.flip_noise
    bits[:, static, :] ^= static_flips[:, static, None].astype(np.uint8)
    for g in groups:
        redraw = rng.random(n) < spec.flip_noise
        shift = rng.integers(1, len(g), size=n)
        current = bits[:, g, 0].argmax(axis=1)
        new = np.where(redraw, (current + shift) % len(g), current)
        bits[:, g, :] = 0
        bits[np.arange(n), np.array(g)[new], :] = 1

    signs = np.array([var.direction for var in spec.variables], dtype=np.float64)
    jitter = rng.uniform(-spec.jitter, spec.jitter, size=(n, v, m))
    values = bits.astype(np.float64)
    values[:, cont, :] = signs[None, cont, None] * (values[:, cont, :] + jitter[:, cont, :])

    mask = np.ones((n, v, m), dtype=bool)
    if spec.n_incomplete:
        who = rng.choice(n, size=spec.n_incomplete, replace=False)
        var_pick = rng.integers(0, v, size=spec.n_incomplete)
        time_pick = rng.integers(0, m, size=spec.n_incomplete)
        for i, j, t in zip(who, var_pick, time_pick):
            mask[i, j, t] = False
            values[i, j, t] = np.nan

    ids = [f"P{i + 1:04d}" for i in range(n)]
    cohort = LongitudinalCohort(ids, spec.time_labels, spec.variables, values, mask)
    return LabeledCohort(cohort, labels.astype(np.int64), bits)


def write_synthetic(labeled, out_dir):
    """Writes ``data.csv``, ``varspec.csv`` and ``labels.csv`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_cohort(labeled.cohort, out / "data.csv", out / "varspec.csv", collapse_genotypes=True)
    write_labels(out / "labels.csv", labeled.cohort.patient_ids, labeled.true_labels)
    return out


def write_labels(path, patient_ids, labels):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["patient_id", "true_subtype"])
        for pid, lab in zip(patient_ids, labels):
            w.writerow([pid, int(lab)])


def read_labels(path):
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["patient_id", "true_subtype"]:
            raise ArgumentError(f"{path}: expected header patient_id,true_subtype")
        return {row["patient_id"]: int(row["true_subtype"]) for row in reader}


def _comb2(x):
    x = np.asarray(x, dtype=np.float64)
    return x * (x - 1.0) / 2.0


def adjusted_rand_index(labels_a, labels_b):
    a = np.asarray(labels_a)
    b = np.asarray(labels_b)
    if a.shape != b.shape or a.ndim != 1:
        raise ArgumentError(f"label lists differ in length: {a.shape} vs {b.shape}")
    n = a.size
    if n < 2:
        return 1.0
    _, ai = np.unique(a, return_inverse=True)
    _, bi = np.unique(b, return_inverse=True)
    table = np.zeros((ai.max() + 1, bi.max() + 1))
    np.add.at(table, (ai, bi), 1)
    index = _comb2(table).sum()
    rows = _comb2(table.sum(axis=1)).sum()
    cols = _comb2(table.sum(axis=0)).sum()
    expected = rows * cols / _comb2(n)
    top = 0.5 * (rows + cols)
    if top == expected:
        # both partitions trivial in the same way
        return 1.0
    return float((index - expected) / (top - expected))
