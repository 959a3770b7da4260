"""Click-stream, histogram and fit serialization."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .emitter import ClickStream


def save_stream_csv(stream, path):
    """One timestamp per line in seconds, 15 significant digits."""
    path = Path(path)
    with open(path, "w", newline="\n") as f:
        f.write("time_s\n")
        for t in stream.times:
            f.write(f"{t:.15g}\n")
    return path


def load_stream_csv(path, duration):
    t = np.loadtxt(path, skiprows=1, ndmin=1)
    return ClickStream(t, duration)


def save_stream_bin(stream, path):
    """Little-endian float64 timestamps plus a JSON sidecar."""
    path = Path(path)
    raw = path.with_suffix(".bin")
    raw.write_bytes(np.ascontiguousarray(stream.times, dtype="<f8").tobytes())
    meta = {"count": len(stream), "duration": stream.duration, "det_eff": stream.det_eff,
            "dark_rate": stream.dark_rate, "dtype": "<f8", "meta": stream.meta}
    path.with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return raw


def load_stream_bin(path):
    path = Path(path)
    meta = json.loads(path.with_suffix(".json").read_text())
    t = np.frombuffer(path.with_suffix(".bin").read_bytes(), dtype="<f8").astype(float)
    return ClickStream(t, meta["duration"], meta["det_eff"], meta["dark_rate"], meta.get("meta", {}))


def histogram_document(hist, fit=None, seed=None, spec=None):
    """JSON-ready record of a histogram, its fit, the seed and the input parameters."""
    doc = {"histogram": hist.to_dict()}
    if fit is not None:
        doc["fit"] = fit.to_dict()
    if seed is not None:
        doc["seed"] = seed
    if spec is not None:
        doc["spec"] = spec
    return doc
