import xml.etree.ElementTree as ET

import numpy as np
import pytest

from tpc.pipeline import fit_model
from tpc.render import fill, gray_level, profile_grid, render_population, render_prediction_trace, render_subtypes
from tpc.synthetic import generate_cohort, clinical_spec

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture(scope="module")
def model():
    return fit_model(generate_cohort(clinical_spec(n=160, seed=0)).cohort, seed=0).model


def cells(svg):
    root = ET.fromstring(svg)
    return [r for r in root.iter(f"{SVG}rect") if r.get("class") == "cell"]


@pytest.mark.parametrize("value, level", [(0.0, 255), (1.0, 0), (0.5, 127), (2.3, 0), (-0.1, 255), (0.25, 191)])
def test_gray_levels(value, level):
    assert gray_level(value) == level


def test_half_is_127():
    assert fill(0.5) == "#7f7f7f"


def test_all_zero_panel_is_white():
    svg = profile_grid([("zero", np.zeros((3, 2)))], ["a", "b", "c"], ["bl", "1"])
    assert {c.get("fill") for c in cells(svg)} == {"#ffffff"}


def test_cell_count_and_titles(model):
    svg = render_subtypes(model)
    v, m = len(model.variables), len(model.time_labels)
    assert len(cells(svg)) == (len(model.subtypes) + 1) * v * m
    for s in model.subtypes:
        assert f"Subtype {s.subtype_id + 1} (n={s.size})" in svg
    assert "Total population (n=160)" in svg
    texts = [t.text for t in ET.fromstring(svg).iter(f"{SVG}text")]
    for name in model.variable_names:
        assert name in texts


def test_three_subtypes_four_panels(model):
    assert len(model.subtypes) == 3
    svg = render_subtypes(model, "normalized")
    assert svg.count("Subtype ") == 3
    assert svg.count("Total population") == 1


def test_population_only(model):
    assert len(cells(render_population(model))) == len(model.variables) * len(model.time_labels)


def test_cell_fill_matches_profile(model):
    svg = render_subtypes(model)
    first = cells(svg)[: len(model.variables) * len(model.time_labels)]
    raw = model.subtypes[0].raw
    v = len(model.variables)
    for idx, rect in enumerate(first):
        t, k = divmod(idx, v)
        assert rect.get("fill") == fill(raw[k, t])


def test_bad_panel_shape():
    with pytest.raises(ValueError):
        profile_grid([("x", np.zeros((2, 2)))], ["a"], ["bl", "1"])


def test_prediction_trace():
    doc = {
        "time_labels": ["bl", "1"],
        "subtype_ids": [0, 1],
        "accuracy_by_time": {"1": {"accuracy": 0.5}},
        "patients": [
            {"patient_id": "a", "assignments": [{"subtype": 0, "distances": [0.1, 1.0]},
                                                {"subtype": 1, "distances": [0.9, 0.2]}]},
            {"patient_id": "b", "assignments": [{"subtype": 1, "distances": [1.0, 0.0]},
                                                {"subtype": 1, "distances": [1.2, 0.3]}]},
        ],
    }
    svg = render_prediction_trace(doc)
    root = ET.fromstring(svg)
    frames = [r for r in root.iter(f"{SVG}rect") if r.get("class") == "frame"]
    assert len(frames) == 2
    assert "accuracy 0.50" in svg
    red = [e for e in root.iter() if e.get("fill") == "#d62728"]
    # one red marker per patient per panel plus the legend entry
    assert len(red) == 2 * 2 + 1
