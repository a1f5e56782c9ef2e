import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_cohort
from tpc.cohort import (
    DATA_HEADER,
    VARSPEC_HEADER,
    VariableSpec,
    exclude_incomplete,
    load_cohort,
    order_time_labels,
    split_train_test,
    write_cohort,
)
from tpc.errors import (
    ArgumentError,
    CohortValueError,
    DuplicateCellError,
    EmptyCohortError,
    ParseError,
    RegistryError,
)
from tpc.synthetic import generate_cohort, clinical_spec


@pytest.fixture
def files(tmp_path, csv_writer):
    def _files(rows, spec_rows=None):
        if spec_rows is None:
            spec_rows = [["A", "Motor", "continuous", "+1", ""], ["B", "Cognitive", "continuous", "-1", ""]]
        data = csv_writer(tmp_path / "data.csv", DATA_HEADER, rows)
        spec = csv_writer(tmp_path / "varspec.csv", VARSPEC_HEADER, spec_rows)
        return data, spec
    return _files


FULL = [
    [p, t, v, x]
    for p, base in (("p1", 1.0), ("p2", 5.0))
    for t in ("bl", "1")
    for v, x in (("A", base), ("B", base + 0.5))
]


def test_load_complete_small_file(files):
    cohort = load_cohort(*files(FULL))
    assert (cohort.n_patients, cohort.n_variables, cohort.n_times) == (2, 2, 2)
    assert cohort.completeness_mask.all()
    assert cohort.patient_ids == ("p1", "p2")
    assert cohort.values[1, 1, 0] == 5.5


def test_missing_row_flags_one_cell(files):
    cohort = load_cohort(*files(FULL[:-1]))
    assert (~cohort.completeness_mask).sum() == 1
    assert not cohort.completeness_mask[1, 1, 1]


def test_study_shaped_file(tmp_path):
    labeled = generate_cohort(clinical_spec(n=198, seed=2))
    write_cohort(labeled.cohort, tmp_path / "d.csv", tmp_path / "s.csv")
    cohort = load_cohort(tmp_path / "d.csv", tmp_path / "s.csv")
    assert (cohort.n_patients, cohort.n_variables, cohort.n_times) == (198, 18, 5)
    assert cohort.time_labels == ("bl", "1", "2", "3", "4")


def test_malformed_row_reports_line(files):
    rows = FULL[:3] + [["p2", "bl", "A"]] + FULL[4:]
    with pytest.raises(ParseError) as err:
        load_cohort(*files(rows))
    assert err.value.line == 5


def test_unknown_variable(files):
    with pytest.raises(RegistryError, match="unknown variable 'Z'"):
        load_cohort(*files(FULL + [["p1", "bl", "Z", "1"]]))


def test_duplicate_cell(files):
    with pytest.raises(DuplicateCellError):
        load_cohort(*files(FULL + [FULL[0]]))


def test_non_numeric_value(files):
    rows = [list(r) for r in FULL]
    rows[2][3] = "abc"
    with pytest.raises(CohortValueError, match="non-numeric"):
        load_cohort(*files(rows))


def test_bad_header(tmp_path, csv_writer):
    data = csv_writer(tmp_path / "d.csv", ["pid", "time", "variable", "value"], [])
    spec = csv_writer(tmp_path / "s.csv", VARSPEC_HEADER, [["A", "", "continuous", "+1", ""]])
    with pytest.raises(ParseError):
        load_cohort(data, spec)


@pytest.mark.parametrize("direction", ["0", "2", "+"])
def test_bad_direction(files, direction):
    with pytest.raises(ParseError):
        load_cohort(*files(FULL, [["A", "", "continuous", direction, ""], ["B", "", "continuous", "+1", ""]]))


def test_binary_with_negative_direction_rejected():
    with pytest.raises(RegistryError):
        VariableSpec("Gender", "", "binary_static", -1)


def test_time_ordering():
    assert order_time_labels(["4", "BL", "10", "2"]) == ["BL", "2", "4", "10"]
    assert order_time_labels(["4", "bl", "1", "3", "2"]) == ["bl", "1", "2", "3", "4"]
    assert order_time_labels(["V10", "V2", "Bl"]) == ["Bl", "V2", "V10"]
    assert order_time_labels(["b", "a", "bl"]) == ["bl", "a", "b"]
    assert order_time_labels(["2", "Baseline", "1"]) == ["Baseline", "1", "2"]
    assert order_time_labels(["2", "0", "1"]) == ["0", "1", "2"]


def test_binary_baseline_only_is_replicated(files):
    spec = [["A", "", "continuous", "+1", ""], ["Gender", "Demographics", "binary_static", "+1", ""]]
    rows = [["p1", t, "A", 1.0] for t in ("bl", "1", "2")] + [["p1", "bl", "Gender", 1]]
    cohort = load_cohort(*files(rows, spec))
    assert cohort.completeness_mask.all()
    assert cohort.values[0, 1].tolist() == [1.0, 1.0, 1.0]


def test_binary_must_be_zero_or_one(files):
    spec = [["A", "", "continuous", "+1", ""], ["Gender", "", "binary_static", "+1", ""]]
    rows = [["p1", "bl", "A", 1.0], ["p1", "bl", "Gender", 2]]
    with pytest.raises(CohortValueError):
        load_cohort(*files(rows, spec))


def test_binary_must_be_constant(files):
    spec = [["A", "", "continuous", "+1", ""], ["Gender", "", "binary_static", "+1", ""]]
    rows = [["p1", t, "A", 1.0] for t in ("bl", "1")] + [["p1", "bl", "Gender", 1], ["p1", "1", "Gender", 0]]
    with pytest.raises(CohortValueError):
        load_cohort(*files(rows, spec))


def test_genotype_expands_to_three_one_hot_columns(files):
    spec = [["A", "", "continuous", "+1", ""], ["G2", "Genetic Risk Loci", "genotype", "+1", "rs6430538"]]
    rows = []
    for pid, geno in (("p1", "CT"), ("p2", "TC"), ("p3", "cc"), ("p4", "TT")):
        rows += [[pid, t, "A", 1.0] for t in ("bl", "1")]
        rows.append([pid, "bl", "G2", geno])
    cohort = load_cohort(*files(rows, spec))
    assert cohort.variable_names == ["A", "G2-CC", "G2-CT", "G2-TT"]
    assert all(v.source_locus == "rs6430538" for v in cohort.variables[1:])
    assert cohort.values[:, 1:, 0].tolist() == [[0, 1, 0], [0, 1, 0], [1, 0, 0], [0, 0, 1]]
    assert cohort.completeness_mask.all()


def test_genotype_alleles_declared_when_only_one_seen(files):
    spec = [["A", "", "continuous", "+1", ""], ["G1", "", "genotype", "+1", "rs1:T/C"]]
    rows = [["p1", "bl", "A", 1.0], ["p1", "bl", "G1", "CC"]]
    cohort = load_cohort(*files(rows, spec))
    assert cohort.variable_names[1:] == ["G1-CC", "G1-CT", "G1-TT"]
    with pytest.raises(RegistryError):
        load_cohort(*files(rows, [spec[0], ["G1", "", "genotype", "+1", "rs1"]]))


def test_registry_rejects_incomplete_locus():
    variables = [VariableSpec("G-AA", "", "binary_static", 1, "rs1"), VariableSpec("G-AB", "", "binary_static", 1, "rs1")]
    with pytest.raises(RegistryError):
        make_cohort(np.zeros((1, 2, 1)), variables)


def test_round_trip(tmp_path):
    labeled = generate_cohort(clinical_spec(n=40, seed=4, genetics=True, n_incomplete=6))
    cohort = labeled.cohort
    for collapse in (False, True):
        write_cohort(cohort, tmp_path / "d.csv", tmp_path / "s.csv", collapse_genotypes=collapse)
        again = load_cohort(tmp_path / "d.csv", tmp_path / "s.csv")
        assert again.variables == cohort.variables
        assert np.array_equal(again.completeness_mask, cohort.completeness_mask)
        assert np.array_equal(again.values, cohort.values, equal_nan=True)


def test_exclude_incomplete_identity(small_cohort):
    assert exclude_incomplete(small_cohort) is small_cohort


def test_exclude_incomplete_drops_patient():
    mask = np.ones((3, 2, 5), dtype=bool)
    mask[1, 0, 4] = False
    cohort = make_cohort(np.zeros((3, 2, 5)), mask=mask)
    out = exclude_incomplete(cohort)
    assert out.patient_ids == ("p0", "p2")
    assert exclude_incomplete(out) is out


def test_exclude_incomplete_study_counts():
    labeled = generate_cohort(clinical_spec(n=430, n_incomplete=232, seed=1))
    assert exclude_incomplete(labeled.cohort).n_patients == 198


def test_exclude_incomplete_all_missing():
    mask = np.zeros((2, 1, 1), dtype=bool)
    with pytest.raises(EmptyCohortError):
        exclude_incomplete(make_cohort(np.zeros((2, 1, 1)), mask=mask))


def test_split_study_sizes():
    cohort = make_cohort(np.zeros((198, 1, 2)))
    split = split_train_test(cohort, 0.192, seed=11)
    assert (split.test.n_patients, split.train.n_patients) == (38, 160)
    assert split_train_test(cohort, 0.2, seed=1, test_count=38).test.n_patients == 38


def test_split_zero_fraction():
    cohort = make_cohort(np.zeros((5, 1, 2)))
    split = split_train_test(cohort, 0.0, seed=3)
    assert split.test.n_patients == 0
    assert split.train.patient_ids == cohort.patient_ids


def test_split_deterministic():
    cohort = make_cohort(np.zeros((50, 1, 2)))
    a = split_train_test(cohort, 0.3, seed=9)
    b = split_train_test(cohort, 0.3, seed=9)
    assert a.test.patient_ids == b.test.patient_ids
    assert a.train.patient_ids == b.train.patient_ids


@pytest.mark.parametrize("fraction", [1.0, 1.5, -0.1])
def test_split_bad_fraction(fraction):
    with pytest.raises(ArgumentError):
        split_train_test(make_cohort(np.zeros((5, 1, 2))), fraction, seed=0)


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 80), fraction=st.floats(0, 0.99), seed=st.integers(0, 2**32 - 1))
def test_split_partitions_patients(n, fraction, seed):
    cohort = make_cohort(np.zeros((n, 1, 1)))
    try:
        split = split_train_test(cohort, fraction, seed)
    except ArgumentError:
        assert int(np.floor(n * fraction + 0.5)) >= n
        return
    train, test = set(split.train.patient_ids), set(split.test.patient_ids)
    assert not train & test
    assert train | test == set(cohort.patient_ids)
    assert split.test.n_patients == int(np.floor(n * fraction + 0.5))
    assert split.train.variables == split.test.variables == cohort.variables
    assert split.train.time_labels == split.test.time_labels
