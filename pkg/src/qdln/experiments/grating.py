"""LN grating coupler: four-way power partition in the side-view model."""

from __future__ import annotations

import copy

import numpy as np

from ..fdtd import LineMonitor, SimulationSpec, Source, poynting_flux, run
from ..geometry import DEVICE_DEFAULTS, SIDE_DEFAULTS, build_grating_side_view, materials, rasterize, side_indices
from ..modesolver import IndexProfile, solve_slab_modes
from .common import Band, ExperimentError, full_span, grid_step

SOURCE_X = 1.0e-6
BOX_MARGIN = 2.0e-6  # flux box reaches this far past the grating ends
UP_HEIGHT = 1.0e-6  # "up" line above the film surface
DOWN_DEPTH = 1.0e-6  # "down" line below the film, inside the oxide


def _params(params):
    p = dict(DEVICE_DEFAULTS)
    p.update(SIDE_DEFAULTS)
    p.update(params or {})
    return p


def _scattered(mon, ref):
    d = copy.copy(mon)
    d.e = mon.e - ref.e
    d.h = mon.h - ref.h
    return d


def grating_extraction(period=None, duty=None, teeth=None, params=None, band=None,
                       resolution_scale=1.0, backend=None):
    """Fractions of the incident guided power leaving the grating box
    upward, downward, forward and backward, per wavelength.

    A run without teeth on the same grid gives the incident power and the
    incident fields; the backward share is the flux of the scattered field
    through the input side of the box.
    """
    p = _params(params)
    if period is not None:
        p["grating_period"] = period
    if duty is not None:
        p["grating_duty"] = duty
    if teeth is not None:
        p["grating_teeth"] = teeth
    if p["grating_teeth"] < 0:
        raise ExperimentError("teeth must be >= 0")
    band = band or Band()
    geom = build_grating_side_view(**p)
    bare = build_grating_side_view(**{**p, "grating_teeth": 0,
                                      "grating_lead_out": p["grating_lead_out"] + p["grating_teeth"] * p["grating_period"]})
    # one grid for both runs, fine enough for the grooves
    dx = grid_step(build_grating_side_view(**{**p, "grating_teeth": max(p["grating_teeth"], 1)}),
                   p["wavelength"], scale=resolution_scale)
    n_ln, _ = side_indices(p)
    lam = p["wavelength"]
    n_ox = materials(p["indices"], lam)["SiO2"].refractive_index
    modes = solve_slab_modes(IndexProfile((n_ox, n_ln, 1.0), (0.0, p["ln_thickness"])), lam, "TE")
    if not modes:
        raise ExperimentError("LN film guides no mode")

    x_g0 = geom.markers["grating_start"]
    x_g1 = x_g0 + p["grating_teeth"] * p["grating_period"]
    xl, xr = x_g0 - BOX_MARGIN, x_g1 + BOX_MARGIN
    yt = p["ln_thickness"] + UP_HEIGHT
    yb = -DOWN_DEPTH
    mons = (
        LineMonitor("back", "x", xl, (yb, yt)),
        LineMonitor("forward", "x", xr, (yb, yt)),
        LineMonitor("up", "y", yt, (xl, xr)),
        LineMonitor("down", "y", yb, (xl, xr)),
    )
    runs = {}
    for name, g in (("bare", bare), ("grating", geom)):
        em = rasterize(g, 1.0 / dx)
        src = Source("mode_port", (SOURCE_X, 0.0), band.pulse(lam), mode=modes[0],
                     span=(yb - 1e-6, full_span(g, dx)[1]))
        spec = SimulationSpec(em, "TE", tuple(band.frequencies), (src,), mons)
        runs[name] = run(spec, backend=backend)
    ref, m = runs["bare"].monitors, runs["grating"].monitors
    inc = poynting_flux(ref["back"])
    if np.any(inc <= 0):
        raise ExperimentError("no incident power reached the grating")
    up = poynting_flux(m["up"]) / inc
    down = -poynting_flux(m["down"]) / inc
    fwd = poynting_flux(m["forward"]) / inc
    back = -poynting_flux(_scattered(m["back"], ref["back"])) / inc
    return {
        "wavelengths": band.wavelengths,
        "up": up,
        "down": down,
        "transmitted": fwd,
        "reflected": back,
        "total": up + down + fwd + back,
        "converged": runs["bare"].converged and runs["grating"].converged,
        "dx": dx,
    }
