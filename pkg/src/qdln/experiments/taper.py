"""InP-to-LN taper: FDTD transmission in the side-view model and a
guided-mode cascade oracle.
"""

from __future__ import annotations

import numpy as np

from ..fdtd import LineMonitor, SimulationSpec, Source, mode_amplitudes, run
from ..geometry import DEVICE_DEFAULTS, DeviceGeometry, SIDE_DEFAULTS, build_taper_side_view, rasterize, vertical_profile
from ..modesolver import ETA0, _integrate_product, solve_slab_modes
from ..parallel import run_jobs
from .common import Band, ExperimentError, SweepResult, clip_fraction, full_span, grid_step

ORACLE_SLICES = 50
SOURCE_INSET = 1.0e-6  # source distance from the domain edge
MONITOR_INSET = 2.0e-6


def _params(params):
    p = dict(DEVICE_DEFAULTS)
    p.update(SIDE_DEFAULTS)
    p.update(params or {})
    return p


def _modes(params, width, wavelength):
    modes = solve_slab_modes(vertical_profile(params, width), wavelength, "TE")
    if not modes:
        raise ExperimentError(f"no guided mode for InP width {width:.3g} m")
    return modes


def interface_matrix(a_modes, b_modes):
    """Transmission matrix from the modes of one section to the next.

    Element (i, j) is the amplitude in b_i for unit power in a_j, from the
    mode-matching overlap of unit-power modes (no reflections kept).
    """
    t = np.zeros((len(b_modes), len(a_modes)), dtype=complex)
    for i, mb in enumerate(b_modes):
        for j, ma in enumerate(a_modes):
            if mb.polarization == "TE":
                t[i, j] = (mb.n_eff + ma.n_eff) / (4 * ETA0) * _integrate_product(mb, ma)
            else:
                t[i, j] = 0.25 * ETA0 * (ma.n_eff * _integrate_product(mb, ma, ma)
                                         + mb.n_eff * _integrate_product(mb, ma, mb))
    return t


def eme_cascade(length, params=None, slices=ORACLE_SLICES, wavelength=None):
    """Power transfer from the InP-beam fundamental mode to the LN
    fundamental mode through a linear taper of ``length``.

    The taper is cut into ``slices`` uniform sections, each with the
    guided modes of its mid-point cross-section; amplitudes pass through
    interface overlap matrices and accumulate propagation phase.
    Radiation and reflections are dropped.
    """
    p = _params(params)
    lam = wavelength or p["wavelength"]
    w0, w1 = p["beam_width"], p["taper_tip"]
    k0 = 2 * np.pi / lam
    a_modes = _modes(p, w0, lam)
    amp = np.zeros(len(a_modes), dtype=complex)
    amp[0] = 1.0
    if length > 0:
        for s in range(slices):
            w = w0 + (w1 - w0) * (s + 0.5) / slices
            b_modes = _modes(p, w, lam)
            amp = interface_matrix(a_modes, b_modes) @ amp
            amp *= np.exp(-1j * k0 * np.array([m.n_eff for m in b_modes]) * length / slices)
            a_modes = b_modes
    out = _modes(p, 0.0, lam)
    amp = interface_matrix(a_modes, out) @ amp
    return float(abs(amp[0]) ** 2)


def taper_grid_step(params=None, resolution_scale=1.0):
    """Cell size shared by every length of a sweep and its reference run."""
    p = _params(params)
    geom = build_taper_side_view(**{**p, "taper_length": DEVICE_DEFAULTS["taper_length"]})
    return grid_step(geom, p["wavelength"], scale=resolution_scale)


def _straight_geometry(params, kind, total):
    """Uniform input (``"beam"``) or output (``"ln"``) waveguide of the same cross-section."""
    geom = build_taper_side_view(**{**params, "taper_length": 0.0, "lead_in": 0.0,
                                    "beam_length": total, "lead_out": 0.0})
    if kind == "beam":
        return geom
    # drop the InP layer, keep oxide and LN
    return DeviceGeometry(geom.shapes[:2], geom.background, geom.bounds, geom.markers)


def _port_run(geom, dx, source_mode, x_src, monitors, band, backend=None):
    em = rasterize(geom, 1.0 / dx)
    span = full_span(geom, dx)
    src = Source("mode_port", (x_src, 0.0), band.pulse(), mode=source_mode, span=span)
    spec = SimulationSpec(em, "TE", tuple(band.frequencies), (src,), monitors)
    return run(spec, backend=backend)


def taper_transmission(length, params=None, band=None, resolution_scale=1.0, reverse=False,
                       reference=None, backend=None):
    """Mode-to-mode transmission of the taper from FDTD, per band sample.

    Forward: InP-beam fundamental in, LN fundamental out. ``reverse`` swaps
    the ports. The reference power comes from a straight-guide run with the
    same source (pass ``reference`` to reuse one).
    """
    if length < 0:
        raise ExperimentError("taper length must be >= 0")
    p = _params(params)
    p["taper_length"] = length
    band = band or Band()
    lam = p["wavelength"]
    geom = build_taper_side_view(**p)
    dx = taper_grid_step(p, resolution_scale)
    x_end = geom.bounds[1]
    span = full_span(geom, dx)
    beam = _modes(p, p["beam_width"], lam)[0]
    ln = _modes(p, 0.0, lam)[0]
    if reference is None:
        reference = taper_reference(p, band, dx, reverse, backend)
    if not reverse:
        mon = LineMonitor("out", "x", x_end - MONITOR_INSET, span)
        res = _port_run(geom, dx, beam, SOURCE_INSET, (mon,), band, backend)
        amp = mode_amplitudes(res.monitors["out"], ln)[0]
    else:
        mon = LineMonitor("out", "x", MONITOR_INSET, span)
        res = _port_run(geom, dx, ln, x_end - SOURCE_INSET, (mon,), band, backend)
        amp = mode_amplitudes(res.monitors["out"], beam)[1]
    eff = np.abs(amp) ** 2 / reference
    return {"efficiency": clip_fraction(eff), "converged": res.converged, "steps": res.steps, "dx": dx}


def taper_reference(params, band, dx, reverse=False, backend=None):
    """Source power in the launched mode, from a straight-guide run."""
    p = _params(params)
    lam = p["wavelength"]
    total = 8e-6
    if not reverse:
        geom = _straight_geometry(p, "beam", total)
        mode = _modes(p, p["beam_width"], lam)[0]
        mon = LineMonitor("ref", "x", total - MONITOR_INSET, full_span(geom, dx))
        res = _port_run(geom, dx, mode, SOURCE_INSET, (mon,), band, backend)
        amp = mode_amplitudes(res.monitors["ref"], mode)[0]
    else:
        geom = _straight_geometry(p, "ln", total)
        mode = _modes(p, 0.0, lam)[0]
        mon = LineMonitor("ref", "x", MONITOR_INSET, full_span(geom, dx))
        res = _port_run(geom, dx, mode, total - SOURCE_INSET, (mon,), band, backend)
        amp = mode_amplitudes(res.monitors["ref"], mode)[1]
    return np.abs(amp) ** 2


def taper_sweep(lengths=None, params=None, band=None, resolution_scale=1.0, threads=1,
                oracle=True, backend=None):
    """Taper efficiency at the design wavelength for each length.

    Lengths must be sorted and non-negative; 0 is a butt joint. Unconverged
    runs are flagged per point.
    """
    if lengths is None:
        lengths = [float(f"{k}e-6") for k in range(1, 11)]
    lengths = [float(x) for x in lengths]
    if any(x < 0 for x in lengths):
        raise ExperimentError("taper lengths must be >= 0")
    if any(b <= a for a, b in zip(lengths, lengths[1:])):
        raise ExperimentError("taper lengths must be strictly increasing")
    p = _params(params)
    band = band or Band()
    lam = p["wavelength"]
    k = band.index_of(lam)
    dx = taper_grid_step(p, resolution_scale)
    ref = taper_reference(p, band, dx, backend=backend)

    def job(length):
        return taper_transmission(length, p, band, reverse=False, reference=ref, backend=backend,
                                  resolution_scale=resolution_scale)

    results = run_jobs(job, lengths, threads)
    eff = [float(r["efficiency"][k]) for r in results]
    extra = {
        "band_mean": [float(np.mean(r["efficiency"])) for r in results],
        "steps": [r["steps"] for r in results],
    }
    if oracle:
        extra["oracle"] = [eme_cascade(x, p, wavelength=lam) for x in lengths]
    return SweepResult("taper_length", lengths, eff, [bool(r["converged"]) for r in results], extra)
