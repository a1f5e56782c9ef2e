"""SVG rendering of subtype profile grids and prediction traces.

Profile panels put time points on rows and variables on columns. A cell's grey
level is linear in the affected fraction: 0 is white, 1 is black, values above 1
(possible for normalized profiles) are clamped.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .errors import UsageError

CELL = 18
GAP = 26
LEFT = 48
TOP = 28
LABEL_BAND = 96
KINDS = ("subtypes", "population", "prediction-trace")
MARKERS = ("circle", "square", "triangle", "diamond", "cross", "star")


def gray_level(value):
    """0 -> 255 (white), 1 -> 0 (black); halves round toward black."""
    v = min(max(float(value), 0.0), 1.0)
    return 255 - int(math.floor(255.0 * v + 0.5))


def fill(value):
    g = gray_level(value)
    return f"#{g:02x}{g:02x}{g:02x}"


def _svg(width, height, body):
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="10">\n'
        + "\n".join(body)
        + "\n</svg>\n"
    )


def _text(x, y, s, **attrs):
    extra = "".join(f" {k.replace('_', '-')}={quoteattr(str(v))}" for k, v in attrs.items())
    return f'<text x="{x:.1f}" y="{y:.1f}"{extra}>{escape(str(s))}</text>'


def profile_grid(panels, variable_names, time_labels):
    """SVG for a stack of (title, V x M matrix) panels, variable names under the last."""
    v, m = len(variable_names), len(time_labels)
    grid_w, grid_h = v * CELL, m * CELL
    width = LEFT + grid_w + 80
    height = TOP + len(panels) * (grid_h + GAP) + LABEL_BAND
    body = []
    y0 = TOP
    for title, matrix in panels:
        matrix = np.asarray(matrix, dtype=np.float64)
        if matrix.shape != (v, m):
            raise ValueError(f"panel {title!r} is {matrix.shape}, expected {(v, m)}")
        body.append(_text(LEFT, y0 - 6, title, font_weight="bold"))
        for t in range(m):
            body.append(_text(LEFT - 6, y0 + t * CELL + CELL * 0.7, time_labels[t], text_anchor="end"))
            for k in range(v):
                val = matrix[k, t]
                body.append(
                    f'<rect class="cell" x="{LEFT + k * CELL}" y="{y0 + t * CELL}" width="{CELL}" '
                    f'height="{CELL}" fill="{fill(val)}" stroke="#999999" stroke-width="0.5">'
                    f"<title>{escape(variable_names[k])} @ {escape(time_labels[t])}: {val:.3f}</title></rect>"
                )
        y0 += grid_h + GAP
    label_y = y0 - GAP + 8
    for k, name in enumerate(variable_names):
        x = LEFT + k * CELL + CELL / 2
        body.append(_text(x, label_y, name, text_anchor="end", transform=f"rotate(-60 {x:.1f} {label_y:.1f})"))
    # legend: 11 steps from 0 to 1
    lx = LEFT + grid_w + 24
    for s in range(11):
        body.append(
            f'<rect class="legend" x="{lx}" y="{TOP + s * 10}" width="14" height="10" fill="{fill(s / 10)}" '
            'stroke="#999999" stroke-width="0.5"/>'
        )
    body.append(_text(lx + 18, TOP + 8, "0"))
    body.append(_text(lx + 18, TOP + 108, "1"))
    return _svg(width, height, body)


def subtype_panels(model, profile="raw"):
    panels = [(f"Subtype {s.subtype_id + 1} (n={s.size})", s.matrix(profile)) for s in model.subtypes]
    panels.append(population_panel(model))
    return panels


def population_panel(model):
    if model.population is None:
        raise UsageError("model carries no population profile")
    n = model.n_train if model.n_train is not None else sum(model.sizes()) + model.filtered_patients
    return (f"Total population (n={n})", model.population)


def render_subtypes(model, profile="raw"):
    return profile_grid(subtype_panels(model, profile), model.variable_names, list(model.time_labels))


def render_population(model):
    return profile_grid([population_panel(model)], model.variable_names, list(model.time_labels))


def _marker(shape, x, y, color, r=3.5):
    if shape == "circle":
        return f'<circle cx="{x:.1f}" cy="{y:.1f}" r="{r}" fill="{color}"/>'
    if shape == "square":
        return f'<rect x="{x - r:.1f}" y="{y - r:.1f}" width="{2 * r}" height="{2 * r}" fill="{color}"/>'
    if shape == "triangle":
        pts = f"{x:.1f},{y - r:.1f} {x - r:.1f},{y + r:.1f} {x + r:.1f},{y + r:.1f}"
        return f'<polygon points="{pts}" fill="{color}"/>'
    if shape == "diamond":
        pts = f"{x:.1f},{y - r:.1f} {x + r:.1f},{y:.1f} {x:.1f},{y + r:.1f} {x - r:.1f},{y:.1f}"
        return f'<polygon points="{pts}" fill="{color}"/>'
    if shape == "cross":
        return (f'<path d="M{x - r:.1f},{y - r:.1f}L{x + r:.1f},{y + r:.1f}M{x - r:.1f},{y + r:.1f}'
                f'L{x + r:.1f},{y - r:.1f}" stroke="{color}" stroke-width="1.5"/>')
    pts = " ".join(
        f"{x + (r if i % 2 == 0 else r / 2) * math.sin(i * math.pi / 5):.1f},"
        f"{y - (r if i % 2 == 0 else r / 2) * math.cos(i * math.pi / 5):.1f}"
        for i in range(10)
    )
    return f'<polygon points="{pts}" fill="{color}"/>'


def render_prediction_trace(predictions):
    """One panel per time point: distance from each test patient (x) to every
    subtype (marker shape). The subtype picked at baseline is drawn in red.

    ``predictions`` is the document written by ``tpc predict`` (accuracy.json).
    """
    patients = predictions["patients"]
    times = predictions["time_labels"]
    subtype_ids = predictions["subtype_ids"]
    if not patients:
        raise UsageError("prediction file lists no patients")
    n, m = len(patients), len(times)
    pw, ph = max(240, 12 * n), 110
    width, height = LEFT + pw + 120, TOP + m * (ph + GAP) + 20
    dmax = max(max(a["distances"]) for p in patients for a in p["assignments"]) or 1.0
    body = []
    for t in range(m):
        y0 = TOP + t * (ph + GAP)
        acc = predictions.get("accuracy_by_time", {}).get(times[t])
        title = f"time {times[t]}"
        if acc is not None and t > 0:
            title += f" (accuracy {acc['accuracy']:.2f})"
        body.append(_text(LEFT, y0 - 6, title, font_weight="bold"))
        body.append(f'<rect class="frame" x="{LEFT}" y="{y0}" width="{pw}" height="{ph}" fill="none" stroke="#000000"/>')
        body.append(_text(LEFT - 4, y0 + 8, f"{dmax:.2f}", text_anchor="end"))
        body.append(_text(LEFT - 4, y0 + ph, "0", text_anchor="end"))
        for i, p in enumerate(patients):
            x = LEFT + (i + 0.5) * pw / n
            baseline = p["assignments"][0]["subtype"]
            for k, d in enumerate(p["assignments"][t]["distances"]):
                y = y0 + ph - (d / dmax) * (ph - 8)
                color = "#d62728" if subtype_ids[k] == baseline else "#000000"
                body.append(_marker(MARKERS[k % len(MARKERS)], x, y, color))
    lx = LEFT + pw + 16
    for k, sid in enumerate(subtype_ids):
        body.append(_marker(MARKERS[k % len(MARKERS)], lx, TOP + 10 + 16 * k, "#000000"))
        body.append(_text(lx + 10, TOP + 14 + 16 * k, f"subtype {sid + 1}"))
    body.append(_marker("circle", lx, TOP + 10 + 16 * len(subtype_ids), "#d62728"))
    body.append(_text(lx + 10, TOP + 14 + 16 * len(subtype_ids), "baseline pick"))
    return _svg(width, height, body)
