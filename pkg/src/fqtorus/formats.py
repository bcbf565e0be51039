"""CSV / JSON readers and writers for the artifact's file formats."""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

import mpmath
import numpy as np

from .rootfind import WeightedPointSet
from .spectrum import SpectrumEntry, SpectrumTable
from .torus_core import CompactificationMap
from .trigpoly import ExpPoly1D, LaurentPoly

_SYMBOLS = {
    "sqrt2": lambda: mpmath.sqrt(2),
    "sqrt3": lambda: mpmath.sqrt(3),
    "sqrt5": lambda: mpmath.sqrt(5),
    "1/sqrt2": lambda: 1 / mpmath.sqrt(2),
    "1/sqrt3": lambda: 1 / mpmath.sqrt(3),
    "golden": lambda: (1 + mpmath.sqrt(5)) / 2,
    "phi": lambda: (1 + mpmath.sqrt(5)) / 2,
    "inf": lambda: mpmath.inf,
}


def parse_real(text) -> float:
    """A real from a number or a symbolic name such as 'sqrt2', 'golden', '-1/sqrt2', '3/7'.

    Symbols are expanded at 50 digits before rounding to double.
    """
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip().lower().replace(" ", "")
    sign = 1
    if s.startswith("-"):
        sign, s = -1, s[1:]
    with mpmath.workdps(50):
        if s in _SYMBOLS:
            val = _SYMBOLS[s]()
        elif "/" in s:
            num, den = s.split("/", 1)
            val = mpmath.mpf(parse_real(num)) / mpmath.mpf(parse_real(den))
        else:
            val = mpmath.mpf(s)
        return sign * float(val)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_default)


def config_hash(obj) -> str:
    return hashlib.sha256(canonical_json(obj).encode()).hexdigest()[:16]


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n")


def read_json(path):
    return json.loads(Path(path).read_text())


def load_polynomial(path) -> LaurentPoly | ExpPoly1D:
    data = read_json(path)
    terms = data.get("terms") or []
    if "m" in data:
        return LaurentPoly.from_json(data)
    if terms and "freq" in terms[0]:
        return ExpPoly1D.from_json(data)
    raise ValueError(f"{path}: neither a LaurentPoly nor an ExpPoly1D document")


def load_map(path) -> CompactificationMap:
    return CompactificationMap.from_json(read_json(path))


# WeightedPointSet -------------------------------------------------------------

def write_points(path, pts: WeightedPointSet, meta: dict | None = None) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lambda", "multiplicity"])
        for x, c in zip(pts.points, pts.multiplicities):
            w.writerow([repr(float(x)), int(c)])
    side = {"window_radius": pts.window_radius,
            "min_gap": pts.min_gap if np.isfinite(pts.min_gap) else None,
            "count": len(pts), "total_multiplicity": pts.total_mass,
            "flagged": pts.flagged}
    if meta:
        side.update(meta)
    write_json(path.with_suffix(".json"), side)


def read_points(path) -> WeightedPointSet:
    path = Path(path)
    with path.open() as fh:
        rows = list(csv.DictReader(fh))
    side = read_json(path.with_suffix(".json"))
    return WeightedPointSet(np.array([float(r["lambda"]) for r in rows]),
                            np.array([int(r["multiplicity"]) for r in rows], dtype=np.int64),
                            float(side["window_radius"]))


# SpectrumTable ----------------------------------------------------------------

SPECTRUM_HEADER = ["k1", "k2", "y", "re", "im", "R", "err"]


def write_spectrum(path, table: SpectrumTable, extra: dict | None = None) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SPECTRUM_HEADER)
        for e in table.entries:
            w.writerow([*e.k, repr(e.y), repr(e.value.real), repr(e.value.imag),
                        repr(float(e.R)), repr(float(e.error_estimate))])
    doc = {"map": table.cmap.to_json(), "error_constant": table.error_constant,
           "error_convention": "err = C / R", **table.meta,
           "entries": [{"k": list(e.k), "y": e.y, "re": e.value.real, "im": e.value.imag,
                        "R": e.R, "err": e.error_estimate} for e in table.entries]}
    if extra:
        doc.update(extra)
    write_json(path.with_suffix(".json"), doc)


def read_spectrum(path) -> SpectrumTable:
    path = Path(path)
    doc = read_json(path.with_suffix(".json"))
    cmap = CompactificationMap.from_json(doc["map"])
    with path.open() as fh:
        rows = list(csv.DictReader(fh))
    entries = [SpectrumEntry((int(r["k1"]), int(r["k2"])), float(r["y"]),
                             complex(float(r["re"]), float(r["im"])), float(r["R"]), float(r["err"]))
               for r in rows]
    return SpectrumTable(entries, cmap, float(doc.get("error_constant", 5.0)))


# curve components -------------------------------------------------------------

def write_component(path, samples: np.ndarray, sidecar: dict) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta1", "theta2"])
        for a, b in samples:
            w.writerow([repr(float(a)), repr(float(b))])
    write_json(path.with_suffix(".json"), sidecar)
