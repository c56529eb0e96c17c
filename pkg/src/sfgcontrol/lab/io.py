"""CSV and JSON writers.  Every file starts with (or embeds) the provenance record.

CSV files carry it as a single leading ``# provenance: {...}`` comment line;
skip that line when reading.  Floats are written with ``repr`` so output is
byte-stable and round-trips exactly.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from ..grid import angular_to_wavelength


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    v = float(v)
    return repr(v) if math.isfinite(v) else ("nan" if math.isnan(v) else repr(v))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_csv(path, columns, rows, provenance: dict) -> None:
    lines = ["# provenance: " + json.dumps(_jsonable(provenance), sort_keys=True,
                                           separators=(",", ":")),
             ",".join(columns)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n")


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def _col(a, n):
    return np.zeros(n) if a is None else a


def write_spectrum(out_dir, spectrum, provenance: dict) -> None:
    """spectrum.csv and spectrum.json for one SfgSpectrum."""
    out = Path(out_dir)
    om = spectrum.omega
    n = om.size
    cols = ("omega_rad_per_fs", "lambda_nm", "I_total", "I_q", "I_c", "stderr")
    data = [om, angular_to_wavelength(om), spectrum.intensity, _col(spectrum.quantum, n),
            _col(spectrum.classical, n), _col(spectrum.stderr, n)]
    write_csv(out / "spectrum.csv", cols, zip(*data), provenance)
    doc = {"provenance": provenance, "engine": spectrum.provenance}
    doc.update({c: d for c, d in zip(cols, data)})
    write_json(out / "spectrum.json", doc)


def write_scan(out_dir, scan, provenance: dict) -> None:
    cols = ("x", "x_unit", "I_total", "I_q", "I_c", "stderr")
    rows = ((x, scan.x_unit, t, q, c, e) for x, t, q, c, e in
            zip(scan.x, scan.total, scan.quantum, scan.classical, scan.stderr))
    write_csv(Path(out_dir) / "scan.csv", cols, rows, provenance)


def read_csv(path) -> tuple[dict, np.ndarray]:
    """(provenance, structured array) from a file written by :func:`write_csv`."""
    text = Path(path).read_text().splitlines()
    prov = json.loads(text[0].split(":", 1)[1])
    arr = np.genfromtxt(path, delimiter=",", skip_header=1, names=True, dtype=None,
                        encoding="utf-8")
    return prov, arr
