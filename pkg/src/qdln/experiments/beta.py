"""Emitter-to-beam coupling (beta factor) and the device field map."""

from __future__ import annotations

import math

import numpy as np

from ..fdtd import LineMonitor, SimulationSpec, Source, mode_amplitudes, run
from ..geometry import DEVICE_DEFAULTS, PermittivityMap, build_paper_device, build_straight_beam, line_cut, rasterize
from ..modesolver import C0, solve_slab_modes
from .common import Band, ExperimentError, box_outflow, clip_fraction, flux_box, full_span, grid_step

BEAM_LENGTH = 6e-6
BOX_HALF = 0.4e-6
GUIDE_OFFSET = 2.0e-6  # mode monitors on either side of the emitter
COUPLING_FLOOR = 1e-3


def _coupled_modes(modes, y, angle):
    """Modes the dipole can excite.

    A transverse (Ey) dipole couples to a mode when the mode's Ey at the
    dipole is a non-negligible fraction of its peak. Any longitudinal
    component can excite modes of either parity, so all modes count.
    """
    if abs(math.cos(math.radians(angle))) > 1e-12:
        return list(modes)
    out = []
    for m in modes:
        peak = np.abs(m.field_at(m.x) * m.efield_factor(m.x)).max()
        here = abs(float(m.field_at(y)[0] * m.efield_factor(np.array([y]))[0]))
        if here > COUPLING_FLOOR * peak:
            out.append(m)
    return out


def beta_factor(params=None, offset=(0.0, 0.0), band=None, resolution_scale=1.0, angle=90.0,
                geometry=None, backend=None):
    """Fraction of the dipole's emitted power captured by the beam's
    fundamental guided mode, both directions summed.

    The emitter sits ``offset`` from the middle of a straight beam with no
    mirror. Total power comes from a closed flux box around the dipole.
    A uniform cross-section has no guided mode and raises; so does a beam
    with more than one mode the dipole can excite.
    """
    band = band or Band()
    p = dict(DEVICE_DEFAULTS)
    p.update(params or {})
    p["bragg_count"] = 0
    dx_off, dy_off = offset
    if geometry is None:
        p["margin"] = max(p["margin"], abs(dy_off) + 2e-6)
        geometry = build_straight_beam(BEAM_LENGTH, **{k: v for k, v in p.items() if k in DEVICE_DEFAULTS})
    x0, x1, y0, y1 = geometry.bounds
    xe, ye = 0.5 * (x0 + x1) + dx_off, dy_off
    lam = band.center
    dx = grid_step(geometry, p["wavelength"], scale=resolution_scale)
    em = rasterize(geometry, 1.0 / dx)

    prof = line_cut(em, xe + GUIDE_OFFSET)
    modes = solve_slab_modes(prof, lam, "TM") if prof is not None else []
    if not modes:
        raise ExperimentError("no guided mode in the beam cross-section: beta is undefined")
    coupled = _coupled_modes(modes, ye, angle)
    if len(coupled) > 1:
        raise ExperimentError(
            f"beam supports {len(coupled)} modes the dipole couples to at {lam:.4g} m; "
            "use a single-mode geometry")
    fund = modes[0]

    span = full_span(geometry, dx)
    mons = flux_box("box", (xe, ye), BOX_HALF) + (
        LineMonitor("left", "x", xe - GUIDE_OFFSET, span),
        LineMonitor("right", "x", xe + GUIDE_OFFSET, span),
    )
    src = Source("point_dipole", (xe, ye), band.pulse(lam), angle=angle)
    spec = SimulationSpec(em, "TM", tuple(band.frequencies), (src,), mons)
    res = run(spec, backend=backend)
    total = box_outflow(res.monitors, "box")
    right = np.abs(mode_amplitudes(res.monitors["right"], fund)[0]) ** 2
    left = np.abs(mode_amplitudes(res.monitors["left"], fund)[1]) ** 2
    beta = clip_fraction((left + right) / total)
    return {
        "wavelengths": band.wavelengths,
        "beta": beta,
        "left": left / total,
        "right": right / total,
        "total_power": total,
        "n_eff": fund.n_eff,
        "modes": [m.n_eff for m in modes],
        "converged": res.converged,
        "steps": res.steps,
        "dx": dx,
    }


def device_field_map(params=None, band=None, resolution_scale=1.0, backend=None):
    """|E|^2 at the design wavelength for the full top-view device with a
    centred emitter, as a raster on the simulation grid."""
    band = band or Band(count=1)
    geom = build_paper_device(**(params or {}))
    lam = geom.markers["params"]["wavelength"]
    dx = grid_step(geom, lam, scale=resolution_scale)
    em = rasterize(geom, 1.0 / dx)
    src = Source("point_dipole", geom.markers["emitter"], band.pulse(lam), angle=90.0)
    spec = SimulationSpec(em, "TM", (C0 / lam,), (src,), (), field_dft_frequency=C0 / lam)
    res = run(spec, backend=backend)
    return PermittivityMap(res.field_dft, em.dx, em.dy, em.x0, em.y0), geom, res
