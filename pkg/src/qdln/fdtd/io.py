"""Field snapshots and monitor spectra on disk."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .analysis import poynting_flux


def save_snapshot(path, array, spacing, step=None, polarization=None, component=None):
    """Raw little-endian float64 raster (row-major, shape ``(nx, ny)``) plus
    a JSON sidecar with the shape, spacing, step and polarization."""
    path = Path(path)
    a = np.ascontiguousarray(np.real(array), dtype="<f8")
    path.with_suffix(".bin").write_bytes(a.tobytes())
    meta = {"shape": list(a.shape), "spacing": [float(s) for s in spacing], "step": step,
            "polarization": polarization, "component": component, "dtype": "<f8", "order": "C"}
    path.with_suffix(".json").write_text(json.dumps(meta, indent=2) + "\n")
    return path.with_suffix(".bin")


def load_snapshot(path):
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    a = np.frombuffer(path.with_suffix(".bin").read_bytes(), dtype=meta["dtype"])
    return a.reshape(meta["shape"]).astype(float), meta


def state_snapshot(path, state, spec, component):
    """Snapshot one field component of a running simulation."""
    em = spec.eps_map
    return save_snapshot(path, state.fields[component], (em.dx, em.dy), state.step,
                         spec.polarization, component)


def save_spectra(path, result, names=None):
    """Poynting flux of each monitor vs frequency as CSV."""
    names = list(names or result.monitors)
    rows = [poynting_flux(result.monitors[n]) for n in names]
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["frequency_hz"] + [f"{n}_flux" for n in names])
        for k, fr in enumerate(result.frequencies):
            w.writerow([repr(float(fr))] + [repr(float(r[k])) for r in rows])
    return Path(path)
