import numpy as np
import pytest

from tpc.cohort import BINARY_STATIC, CONTINUOUS, LongitudinalCohort, VariableSpec


def write_csv(path, header, rows):
    lines = [",".join(header)] + [",".join(str(c) for c in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


@pytest.fixture
def csv_writer():
    return write_csv


def make_cohort(values, variables=None, times=None, ids=None, mask=None):
    values = np.asarray(values, dtype=float)
    n, v, m = values.shape
    if variables is None:
        variables = [VariableSpec(f"X{k}", "Test", CONTINUOUS, 1) for k in range(v)]
    if times is None:
        times = ["bl"] + [str(t) for t in range(1, m)]
    if ids is None:
        ids = [f"p{i}" for i in range(n)]
    if mask is None:
        mask = np.ones(values.shape, dtype=bool)
    return LongitudinalCohort(ids, times, variables, values, mask)


@pytest.fixture
def small_cohort():
    rng = np.random.default_rng(5)
    values = rng.normal(size=(12, 3, 4))
    values[:, 2, :] = (rng.random((12, 1)) < 0.5).astype(float)
    variables = [
        VariableSpec("A", "Motor", CONTINUOUS, 1),
        VariableSpec("B", "Cognitive", CONTINUOUS, -1),
        VariableSpec("Gender", "Demographics", BINARY_STATIC, 1),
    ]
    return make_cohort(values, variables)
