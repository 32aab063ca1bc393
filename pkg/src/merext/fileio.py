"""Plain-text file formats.

Domain files are JSON::

    {"curves": [{"coeffs": [[k, re, im], ...], "nodes": 256, "orientation": 1}],
     "band": null}

The outer curve is detected automatically; ``orientation`` and ``band`` are
optional. Samples files are CSV with header ``curve,node,re,im`` and one row
per node, in grid order. Complex numbers are always split into real and
imaginary decimal fields with 17 significant digits.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .cauchy import BoundarySamples
from .errors import SampleMismatch
from .geometry import BoundaryCurve, DomainBoundary, build_domain

SAMPLE_HEADER = ["curve", "node", "re", "im"]


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def atomic_write(path: str | os.PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _clean(obj):
    """Replace non-finite floats by None so the JSON stays standard."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> None:
    atomic_write(path, dumps_json(obj))


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    atomic_write(path, csv_text(header, rows))


def curve_to_dict(curve: BoundaryCurve) -> dict:
    return {
        "coeffs": [[int(k), float(a.real), float(a.imag)] for k, a in zip(curve.modes, curve.coeffs)],
        "nodes": curve.nodes,
        "orientation": curve.orientation,
    }


def domain_to_dict(curves, band: float | None = None) -> dict:
    curves = curves.curves if isinstance(curves, DomainBoundary) else curves
    out = {"curves": [curve_to_dict(c) for c in curves]}
    if band is not None:
        out["band"] = band
    return out


def parse_domain(spec: dict, nodes: int | None = None, band: float | None = None) -> DomainBoundary:
    curves = []
    for c in spec["curves"]:
        coeffs = {}
        for k, re, im in c["coeffs"]:
            coeffs[int(k)] = coeffs.get(int(k), 0) + complex(re, im)
        curves.append(BoundaryCurve.from_coeffs(
            coeffs, orientation=int(c.get("orientation", 1)),
            nodes=int(nodes or c.get("nodes", 256))))
    band = band if band is not None else spec.get("band")
    return build_domain(curves, band=band)


def load_domain(path, nodes: int | None = None, band: float | None = None) -> DomainBoundary:
    return parse_domain(read_json(path), nodes, band)


def samples_rows(samples: BoundarySamples):
    for j, vals in enumerate(samples.values):
        for i, v in enumerate(vals):
            yield j, i, float(v.real), float(v.imag)


def write_samples(path, samples: BoundarySamples) -> None:
    write_csv(path, SAMPLE_HEADER, samples_rows(samples))


def read_samples(path, domain: DomainBoundary) -> BoundarySamples:
    """Read a samples CSV; rows must follow the domain's node order exactly."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip() for h in rows[0]] != SAMPLE_HEADER:
        raise SampleMismatch(f"{path}: expected header {','.join(SAMPLE_HEADER)}")
    body = rows[1:]
    expected = [(j, i) for j, c in enumerate(domain.curves) for i in range(c.nodes)]
    if len(body) != len(expected):
        raise SampleMismatch(f"{path}: {len(body)} rows, domain grid has {len(expected)} nodes")
    values = [np.empty(c.nodes, dtype=complex) for c in domain.curves]
    for (j, i), row in zip(expected, body):
        if (int(row[0]), int(row[1])) != (j, i):
            raise SampleMismatch(f"{path}: row {row[:2]} out of grid order, expected {(j, i)}")
        values[j][i] = complex(float(row[2]), float(row[3]))
    return BoundarySamples(tuple(values))
