"""Bragg hole-array mirror: port-fed modal reflectance and transmittance."""

from __future__ import annotations

import numpy as np

from ..fdtd import LineMonitor, SimulationSpec, Source, mode_amplitudes, run
from ..geometry import DEVICE_DEFAULTS, build_straight_beam, line_cut, rasterize
from ..modesolver import solve_slab_modes
from ..parallel import run_jobs
from .common import Band, ExperimentError, full_span, grid_step

BRAGG_BAND = Band(1.1e-6, 1.6e-6, 26, 0.35)
LEAD = 4.0e-6  # straight beam before and after the mirror
SOURCE_X = 1.2e-6
REFLECT_X = 2.5e-6
TRANSMIT_INSET = 1.5e-6
STOPBAND_LEVEL = 0.5


def _geometry(p, count):
    q = dict(p)
    q["bragg_count"] = count
    length = 2 * LEAD + count * p["bragg_period"]
    return build_straight_beam(length, holes_at=LEAD if count else None, **q)


def _grid(p, resolution_scale):
    # the grid follows the hole size even for the bare reference beam
    q = dict(p)
    q["bragg_count"] = max(p["bragg_count"], 1)
    return grid_step(_geometry(q, q["bragg_count"]), p["wavelength"], scale=resolution_scale)


def _port_run(p, count, dx, band, backend):
    geom = _geometry(p, count)
    em = rasterize(geom, 1.0 / dx)
    prof = line_cut(em, SOURCE_X)
    modes = solve_slab_modes(prof, p["wavelength"], "TM") if prof is not None else []
    if not modes:
        raise ExperimentError("beam cross-section guides no mode")
    mode = modes[0]
    span = full_span(geom, dx)
    x_end = geom.bounds[1]
    mons = (LineMonitor("refl", "x", REFLECT_X, span), LineMonitor("trans", "x", x_end - TRANSMIT_INSET, span))
    src = Source("mode_port", (SOURCE_X, 0.0), band.pulse(p["wavelength"]), mode=mode, span=span)
    spec = SimulationSpec(em, "TM", tuple(band.frequencies), (src,), mons)
    res = run(spec, backend=backend)
    fwd, back = mode_amplitudes(res.monitors["refl"], mode)
    trans = mode_amplitudes(res.monitors["trans"], mode)[0]
    return {"incident": np.abs(fwd) ** 2, "reflected": np.abs(back) ** 2,
            "transmitted": np.abs(trans) ** 2, "converged": res.converged, "steps": res.steps}


def stopband(wavelengths, r, level=STOPBAND_LEVEL):
    """Wavelength interval around the reflectance peak where R > ``level``.

    Returns ``None`` when the peak stays below the level. Edges are the
    first samples on each side that fall below it (linearly interpolated).
    """
    r = np.asarray(r)
    k = int(np.argmax(r))
    if r[k] <= level:
        return None
    lo = k
    while lo > 0 and r[lo - 1] > level:
        lo -= 1
    hi = k
    while hi < len(r) - 1 and r[hi + 1] > level:
        hi += 1

    def cross(a, b):
        if r[a] == r[b]:
            return wavelengths[a]
        t = (level - r[a]) / (r[b] - r[a])
        return wavelengths[a] + t * (wavelengths[b] - wavelengths[a])

    left = cross(lo - 1, lo) if lo > 0 else wavelengths[0]
    right = cross(hi, hi + 1) if hi < len(r) - 1 else wavelengths[-1]
    return float(left), float(right)


def bragg_spectrum(period=None, radius=None, counts=(10,), params=None, band=None,
                   resolution_scale=1.0, threads=1, backend=None):
    """Modal reflectance and transmittance of the hole mirror vs wavelength.

    One bare-beam run supplies the incident power; each hole count is then
    a separate run. Returns ``{count: {"R", "T", "converged", ...}}`` plus
    the wavelength axis under key ``"wavelengths"``.
    """
    p = dict(DEVICE_DEFAULTS)
    p.update(params or {})
    if period is not None:
        p["bragg_period"] = period
    if radius is not None:
        p["bragg_radius"] = radius
    counts = [int(c) for c in counts]
    if any(c < 0 for c in counts):
        raise ExperimentError("hole counts must be >= 0")
    band = band or BRAGG_BAND
    # geometry checks (radius vs beam width, overlap) before any run
    for c in counts:
        _geometry(p, c)
    p["bragg_count"] = max(counts) if counts else 0
    dx = _grid(p, resolution_scale)
    ref = _port_run(p, 0, dx, band, backend)
    inc = ref["incident"]

    def job(c):
        if c == 0:
            return ref
        return _port_run(p, c, dx, band, backend)

    out = {"wavelengths": band.wavelengths, "incident": inc, "dx": dx}
    for c, res in zip(counts, run_jobs(job, counts, threads)):
        r = res["reflected"] / inc
        t = res["transmitted"] / inc
        out[c] = {"R": r, "T": t, "converged": res["converged"] and ref["converged"],
                  "stopband": stopband(band.wavelengths, r)}
    return out
