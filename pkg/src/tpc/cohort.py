"""Variable registry, longitudinal cohort container, CSV ingestion and splitting.

Data files are long format (``patient_id,time,variable,value``), one row per
measured cell. The variable registry comes from a separate varspec CSV
(``variable,domain,kind,direction,source_locus``). A varspec row of kind
``genotype`` expands at load time into three one-hot ``binary_static`` columns,
one per allele pair, named ``<variable>-<genotype>``.
"""

from __future__ import annotations

import csv
import hashlib
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    ArgumentError,
    CohortValueError,
    DuplicateCellError,
    EmptyCohortError,
    ParseError,
    RegistryError,
)

CONTINUOUS = "continuous"
BINARY_STATIC = "binary_static"
GENOTYPE = "genotype"

DATA_HEADER = ["patient_id", "time", "variable", "value"]
VARSPEC_HEADER = ["variable", "domain", "kind", "direction", "source_locus"]


@dataclass(frozen=True)
class VariableSpec:
    name: str
    domain_label: str = ""
    kind: str = CONTINUOUS
    direction: int = 1
    source_locus: str | None = None

    def __post_init__(self):
        if not self.name:
            raise RegistryError("variable name must be non-empty")
        if self.kind not in (CONTINUOUS, BINARY_STATIC):
            raise RegistryError(f"{self.name}: kind must be continuous or binary_static, got {self.kind!r}")
        if self.direction not in (1, -1):
            raise RegistryError(f"{self.name}: direction must be +1 or -1, got {self.direction!r}")
        if self.kind == BINARY_STATIC and self.direction != 1:
            raise RegistryError(f"{self.name}: binary_static variables must have direction +1")

    @property
    def is_continuous(self):
        return self.kind == CONTINUOUS


def validate_registry(variables):
    seen = set()
    loci = {}
    for var in variables:
        if var.name in seen:
            raise RegistryError(f"duplicate variable name {var.name!r}")
        seen.add(var.name)
        if var.source_locus:
            if var.kind != BINARY_STATIC:
                raise RegistryError(f"{var.name}: genotype columns must be binary_static")
            loci[var.source_locus] = loci.get(var.source_locus, 0) + 1
    for locus, count in loci.items():
        if count != 3:
            raise RegistryError(f"locus {locus!r} has {count} one-hot columns, expected 3")


def _time_key(label):
    if label.strip().lower() in ("bl", "baseline"):
        return (0, 0, "")
    m = re.search(r"(\d+)$", label)
    if m:
        return (1, int(m.group(1)), label)
    return (2, 0, label)


def order_time_labels(labels):
    """Baseline ("bl" or "baseline", any case) first, then integer suffixes in numeric order,
    then everything else lexicographically."""
    return sorted(set(labels), key=_time_key)


@dataclass(frozen=True)
class LongitudinalCohort:
    patient_ids: tuple
    time_labels: tuple
    variables: tuple
    values: np.ndarray
    completeness_mask: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "patient_ids", tuple(str(p) for p in self.patient_ids))
        object.__setattr__(self, "time_labels", tuple(str(t) for t in self.time_labels))
        object.__setattr__(self, "variables", tuple(self.variables))
        values = np.array(self.values, dtype=np.float64)
        mask = np.array(self.completeness_mask, dtype=bool)
        n, v, m = len(self.patient_ids), len(self.variables), len(self.time_labels)
        if v < 1 or m < 1:
            raise CohortValueError("a cohort needs at least one variable and one time point")
        if values.shape != (n, v, m) or mask.shape != (n, v, m):
            raise CohortValueError(
                f"array shapes {values.shape}/{mask.shape} do not match (N, V, M) = {(n, v, m)}"
            )
        if len(set(self.patient_ids)) != n:
            raise CohortValueError("patient ids must be unique")
        validate_registry(self.variables)
        for k, var in enumerate(self.variables):
            if var.kind != BINARY_STATIC:
                continue
            cells = values[:, k, :][mask[:, k, :]]
            if not np.isin(cells, (0.0, 1.0)).all():
                raise CohortValueError(f"{var.name}: binary_static values must be 0 or 1")
            both = mask[:, k, :].all(axis=1)
            rows = values[both, k, :]
            if rows.size and (rows != rows[:, :1]).any():
                raise CohortValueError(f"{var.name}: binary_static values must be constant over time")
        values.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "completeness_mask", mask)

    @property
    def n_patients(self):
        return len(self.patient_ids)

    @property
    def n_variables(self):
        return len(self.variables)

    @property
    def n_times(self):
        return len(self.time_labels)

    @property
    def variable_names(self):
        return [v.name for v in self.variables]

    @property
    def continuous(self):
        """Boolean mask over variables, True for continuous ones."""
        return np.array([v.is_continuous for v in self.variables], dtype=bool)

    @property
    def is_complete(self):
        return bool(self.completeness_mask.all())

    def subset(self, indices):
        idx = np.asarray(indices, dtype=np.int64)
        return LongitudinalCohort(
            patient_ids=[self.patient_ids[i] for i in idx],
            time_labels=self.time_labels,
            variables=self.variables,
            values=self.values[idx],
            completeness_mask=self.completeness_mask[idx],
        )

    def select(self, patient_ids):
        pos = {p: i for i, p in enumerate(self.patient_ids)}
        missing = [p for p in patient_ids if p not in pos]
        if missing:
            raise ArgumentError(f"unknown patient ids: {missing[:5]}")
        return self.subset([pos[p] for p in patient_ids])

    def fingerprint(self):
        h = hashlib.sha1("\n".join(self.patient_ids).encode("utf-8"))
        return h.hexdigest()[:12]


@dataclass(frozen=True)
class CohortSplit:
    train: LongitudinalCohort
    test: LongitudinalCohort
    seed: int


# -- ingestion ----------------------------------------------------------------


@dataclass
class _GenotypeDecl:
    name: str
    domain: str
    locus: str
    alleles: tuple | None
    observed: dict = field(default_factory=dict)


def _parse_direction(text, path, line):
    t = text.strip()
    if t in ("+1", "1"):
        return 1
    if t == "-1":
        return -1
    raise ParseError(f"direction must be +1 or -1, got {text!r}", path, line)


def _parse_locus(text):
    """``rs123`` or ``rs123:C/T`` -> (locus, alleles or None)."""
    text = (text or "").strip()
    if ":" in text:
        locus, _, pair = text.partition(":")
        alleles = tuple(a.strip().upper() for a in pair.split("/"))
        if len(alleles) != 2 or not all(len(a) == 1 for a in alleles) or alleles[0] == alleles[1]:
            raise RegistryError(f"bad allele pair in source_locus {text!r}")
        return locus.strip(), tuple(sorted(alleles))
    return text, None


def _read_rows(path, header):
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot open: {exc.strerror}", path) from exc
    with fh:
        reader = csv.reader(fh)
        try:
            first = next(reader)
        except StopIteration:
            raise ParseError("empty file", path, 1) from None
        if [h.strip() for h in first] != header:
            raise ParseError(f"expected header {','.join(header)}", path, 1)
        for row in reader:
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}", path, reader.line_num)
            yield reader.line_num, [c.strip() for c in row]


def load_varspec(path):
    """Returns the declared registry entries; genotype rows stay unexpanded."""
    entries = []
    names = set()
    for line, (name, domain, kind, direction, locus) in _read_rows(path, VARSPEC_HEADER):
        if not name:
            raise ParseError("empty variable name", path, line)
        if name in names:
            raise RegistryError(f"{path}:{line}: duplicate variable {name!r}")
        names.add(name)
        d = _parse_direction(direction, path, line)
        if kind == GENOTYPE:
            loc, alleles = _parse_locus(locus)
            entries.append(_GenotypeDecl(name, domain, loc or name, alleles))
        elif kind in (CONTINUOUS, BINARY_STATIC):
            try:
                entries.append(VariableSpec(name, domain, kind, d, locus or None))
            except RegistryError as exc:
                raise RegistryError(f"{path}:{line}: {exc}") from None
        else:
            raise ParseError(f"unknown kind {kind!r}", path, line)
    if not entries:
        raise RegistryError(f"{path}: no variables declared")
    return entries


def _genotype_columns(decl):
    alleles = decl.alleles
    if alleles is None:
        seen = sorted({a for g in decl.observed.values() for a in g})
        if len(seen) != 2:
            raise RegistryError(
                f"{decl.name}: cannot infer the two alleles from data (saw {seen}); "
                "declare them as source_locus 'rsid:A/B'"
            )
        alleles = tuple(seen)
    a, b = alleles
    return [a + a, a + b, b + b]


def load_cohort(data_path, varspec_path):
    entries = load_varspec(varspec_path)
    by_name = {e.name: e for e in entries}

    cells = {}
    patients = {}
    times = set()
    for line, (pid, time, name, raw) in _read_rows(data_path, DATA_HEADER):
        if not pid or not time:
            raise ParseError("empty patient_id or time", data_path, line)
        entry = by_name.get(name)
        if entry is None:
            raise RegistryError(f"{data_path}:{line}: unknown variable {name!r}")
        key = (pid, name, time)
        if key in cells:
            raise DuplicateCellError(f"{data_path}:{line}: duplicate cell {key}")
        if isinstance(entry, _GenotypeDecl):
            g = raw.upper()
            if len(g) != 2 or not g.isalpha():
                raise CohortValueError(f"{data_path}:{line}: bad genotype {raw!r}")
            value = "".join(sorted(g))
            entry.observed[key] = value
        else:
            try:
                value = float(raw)
            except ValueError:
                raise CohortValueError(f"{data_path}:{line}: non-numeric value {raw!r}") from None
            if not math.isfinite(value):
                raise CohortValueError(f"{data_path}:{line}: non-finite value {raw!r}")
        cells[key] = value
        patients.setdefault(pid, len(patients))
        times.add(time)

    if not patients:
        raise EmptyCohortError(f"{data_path}: no data rows")
    time_labels = order_time_labels(times)
    t_index = {t: k for k, t in enumerate(time_labels)}
    n, m = len(patients), len(time_labels)

    variables = []
    columns = []  # (entry, genotype category or None)
    for entry in entries:
        if isinstance(entry, _GenotypeDecl):
            for cat in _genotype_columns(entry):
                variables.append(VariableSpec(f"{entry.name}-{cat}", entry.domain, BINARY_STATIC, 1, entry.locus))
                columns.append((entry, cat))
        else:
            variables.append(entry)
            columns.append((entry, None))

    values = np.full((n, len(variables), m), np.nan)
    mask = np.zeros((n, len(variables), m), dtype=bool)
    col_of = {}
    for k, (entry, cat) in enumerate(columns):
        col_of.setdefault(entry.name, []).append((k, cat))

    for (pid, name, time), value in cells.items():
        i, t = patients[pid], t_index[time]
        for k, cat in col_of[name]:
            if cat is None:
                values[i, k, t] = value
            else:
                if not set(value) <= set(col_of[name][0][1] + col_of[name][2][1]):
                    raise CohortValueError(f"{name}: genotype {value!r} outside the declared alleles")
                values[i, k, t] = 1.0 if value == cat else 0.0
            mask[i, k, t] = True

    for k, var in enumerate(variables):
        if var.kind != BINARY_STATIC:
            continue
        present = mask[:, k, :]
        # baseline-only rows are replicated across every time point
        only_bl = present[:, 0] & (present.sum(axis=1) == 1)
        values[only_bl, k, :] = values[only_bl, k, :1]
        mask[only_bl, k, :] = True

    return LongitudinalCohort(list(patients), time_labels, variables, values, mask)


def _fmt(x):
    return repr(float(x))


def _genotype_groups(variables):
    """Locus groups that can be written back as a single ``genotype`` row:
    three adjacent columns ``<base>-AA``, ``<base>-AB``, ``<base>-BB``."""
    groups = {}
    k = 0
    while k < len(variables):
        var = variables[k]
        trio = variables[k:k + 3]
        if var.source_locus and len(trio) == 3 and len({v.source_locus for v in trio}) == 1:
            bases = {v.name.rpartition("-")[0] for v in trio}
            cats = [v.name.rpartition("-")[2] for v in trio]
            a, b = cats[0][:1], cats[2][:1]
            if len(bases) == 1 and "" not in bases and a < b and cats == [a + a, a + b, b + b]:
                groups[k] = (bases.pop(), cats, f"{var.source_locus}:{a}/{b}")
                k += 3
                continue
        k += 1
    return groups


def write_cohort(cohort, data_path, varspec_path, collapse_genotypes=False):
    """Writes the registry and every observed cell. Reloading the pair
    reproduces the values array and mask exactly.

    With ``collapse_genotypes`` one-hot locus columns are written back as one
    ``genotype`` variable holding allele-pair strings.
    """
    variables = cohort.variables
    values, mask = cohort.values, cohort.completeness_mask
    groups = _genotype_groups(variables) if collapse_genotypes else {}
    # a trio collapses only when every present cell is a clean one-hot triple
    for k in list(groups):
        trio_mask = mask[:, k:k + 3, :]
        same = (trio_mask == trio_mask[:, :1, :]).all()
        hot = np.where(trio_mask[:, 0, :], values[:, k:k + 3, :].sum(axis=1), 1.0)
        if not same or not np.all(hot == 1.0):
            del groups[k]
    skip = {k + d for k in groups for d in (1, 2)}
    with open(varspec_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(VARSPEC_HEADER)
        for k, var in enumerate(variables):
            if k in skip:
                continue
            if k in groups:
                base, _, locus = groups[k]
                w.writerow([base, var.domain_label, GENOTYPE, "+1", locus])
            else:
                w.writerow([var.name, var.domain_label, var.kind, f"{var.direction:+d}", var.source_locus or ""])
    with open(data_path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DATA_HEADER)
        for i, pid in enumerate(cohort.patient_ids):
            for t, label in enumerate(cohort.time_labels):
                for k, var in enumerate(variables):
                    if k in skip or not mask[i, k, t]:
                        continue
                    if k in groups:
                        base, cats, _ = groups[k]
                        hot = values[i, k:k + 3, t]
                        w.writerow([pid, label, base, cats[int(np.argmax(hot))]])
                    else:
                        w.writerow([pid, label, var.name, _fmt(values[i, k, t])])


# -- filtering and splitting --------------------------------------------------


def exclude_incomplete(cohort):
    keep = np.flatnonzero(cohort.completeness_mask.all(axis=(1, 2)))
    if keep.size == 0:
        raise EmptyCohortError("no patient has complete data")
    if keep.size == cohort.n_patients:
        return cohort
    return cohort.subset(keep)


def test_size(n, test_fraction):
    """Round-half-up of ``n * test_fraction``."""
    if not 0.0 <= test_fraction < 1.0:
        raise ArgumentError(f"test_fraction must lie in [0, 1), got {test_fraction}")
    return int(math.floor(n * test_fraction + 0.5))


test_size.__test__ = False  # keep pytest from collecting it


def split_train_test(cohort, test_fraction=0.2, seed=0, test_count=None):
    if not cohort.is_complete:
        raise CohortValueError("cohort has incomplete patients; run exclude_incomplete first")
    n = cohort.n_patients
    if test_count is None:
        n_test = test_size(n, test_fraction)
    else:
        n_test = int(test_count)
        if n_test < 0:
            raise ArgumentError("test_count must be non-negative")
    if n_test >= n:
        raise ArgumentError(f"a test set of {n_test} leaves no training patients out of {n}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    test_idx = np.sort(perm[:n_test])
    train_idx = np.sort(perm[n_test:])
    return CohortSplit(cohort.subset(train_idx), cohort.subset(test_idx), int(seed))
