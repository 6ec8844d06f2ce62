"""CSV and metadata writers for sweep tables.

Numbers are written with 12 significant digits; missing values (unstable
points) are empty cells. No timestamps go into any file, so identical
inputs give identical bytes.
"""

import csv
import io
import json
import math
import os

from . import __version__
from .config import AXIS_FACTORS, AXIS_UNITS, params_to_values
from .gaussian import MONOGAMY_FLOOR, PAIRING_TOL, PHYSICALITY_TOL
from .model import STABILITY_MARGIN

MEASURE_UNITS = {"e_am": "1", "e_mb": "1", "e_ab": "1", "r_min": "1"}


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float) and math.isnan(x):
        return ""
    return format(float(x), ".12g")


def columns(spec):
    names = [ax.name for ax in spec.axes]
    if spec.inner is not None:
        return names + [f"{o}_opt" for o in spec.outputs]
    return names + ["stable"] + list(spec.outputs)


def table_rows(result):
    spec = result.spec
    for point, row in zip(result.points, result.rows):
        cells = [fmt(v / AXIS_FACTORS[ax.name]) for ax, v in zip(spec.axes, point)]
        if spec.inner is None:
            cells.append(fmt(row.stable))
        cells.extend(fmt(row.measure(o)) for o in spec.outputs)
        yield cells


def to_csv(result) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns(result.spec))
    writer.writerows(table_rows(result))
    return buf.getvalue()


def summary(result):
    """Max of each measure with its location, plus the stable fraction."""
    spec = result.spec
    out = {"stable_fraction": result.stable_fraction, "points": len(result.rows),
           "failures": len(result.failures), "measures": {}}
    for name in spec.outputs:
        best = None
        for point, row in zip(result.points, result.rows):
            v = row.measure(name)
            if v is not None and (best is None or v > best[0]):
                best = (v, point)
        if best is None:
            out["measures"][name] = {"max": None, "argmax": None}
            continue
        where = {ax.name: p / AXIS_FACTORS[ax.name] for ax, p in zip(spec.axes, best[1])}
        out["measures"][name] = {"max": best[0], "argmax": where}
    return out


def metadata(result, figure=None):
    spec = result.spec
    meta = {
        "tool": "magnomech",
        "version": __version__,
        "figure": figure,
        "params": params_to_values(spec.base),
        "axes": [
            {
                "name": ax.name,
                "min": ax.lo / AXIS_FACTORS[ax.name],
                "max": ax.hi / AXIS_FACTORS[ax.name],
                "points": ax.points,
                "unit": AXIS_UNITS[ax.name],
            }
            for ax in spec.axes
        ],
        "inner_delta_a": None
        if spec.inner is None
        else {
            "min": spec.inner.lo / AXIS_FACTORS["delta_a"],
            "max": spec.inner.hi / AXIS_FACTORS["delta_a"],
            "points": spec.inner.points,
            "unit": "Hz",
        },
        "outputs": list(spec.outputs),
        "columns": columns(spec),
        "units": {**{ax.name: AXIS_UNITS[ax.name] for ax in spec.axes}, **MEASURE_UNITS},
        "order": "row-major, last axis fastest",
        "tolerances": {
            "stability_margin": STABILITY_MARGIN,
            "physicality": PHYSICALITY_TOL,
            "symplectic_pairing": PAIRING_TOL,
            "monogamy_floor": MONOGAMY_FLOOR,
        },
        "summary": summary(result),
    }
    return json.dumps(meta, indent=2, sort_keys=True) + "\n"


def write_result(result, directory, stem, figure=None):
    """Write ``<stem>.csv`` and ``<stem>.meta.json`` into ``directory``."""
    os.makedirs(directory, exist_ok=True)
    csv_path = os.path.join(directory, f"{stem}.csv")
    meta_path = os.path.join(directory, f"{stem}.meta.json")
    with open(csv_path, "w", newline="") as fh:
        fh.write(to_csv(result))
    with open(meta_path, "w", newline="") as fh:
        fh.write(metadata(result, figure))
    return csv_path, meta_path
