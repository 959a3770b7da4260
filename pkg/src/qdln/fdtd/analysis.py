"""Flux integrals and modal decomposition of DFT monitor data."""

import numpy as np

from ..modesolver import ModeSolverError

MIN_SPAN_DECAY_LENGTHS = 3.0


def poynting_flux(mon):
    """Time-averaged power through ``mon`` along +normal, per frequency."""
    return 0.5 * np.real(np.sum(mon.sign * mon.e * np.conj(mon.h), axis=1)) * mon.dl


def mode_amplitudes(mon, mode, offset=0.0, check_span=True):
    """Forward and backward amplitudes (a+, a-) of ``mode`` on ``mon``.

    The mode is unit-power, so ``|a|^2`` is in the same units as
    :func:`poynting_flux`. Only lines normal to the propagation axis of the
    mode make sense; ``offset`` shifts the mode's transverse coordinate.
    """
    if mode.polarization != mon.polarization:
        raise ModeSolverError(f"mode polarization {mode.polarization} does not match monitor {mon.polarization}")
    y = mon.positions - offset
    if check_span:
        dl, dr = mode.decay_lengths
        edges = mode.index_profile.edges
        lo = (edges[0] if edges else 0.0) - MIN_SPAN_DECAY_LENGTHS * dl
        hi = (edges[-1] if edges else 0.0) + MIN_SPAN_DECAY_LENGTHS * dr
        if y[0] > lo or y[-1] < hi:
            raise ModeSolverError(
                f"monitor {mon.name!r} does not span {MIN_SPAN_DECAY_LENGTHS:g} decay lengths of the mode")
    psi = mode.field_at(y)
    if mode.polarization == "TE":
        e_m = psi
        h_m = mon.sign * mode.efield_factor(y) * psi
    else:
        h_m = psi
        e_m = mon.sign * mode.efield_factor(y) * psi
    # For the unit-power mode 1/2 int sign e_m h_m dl = 1
    a = mon.sign * np.sum(mon.e * h_m[None, :], axis=1) * mon.dl
    b = mon.sign * np.sum(e_m[None, :] * mon.h, axis=1) * mon.dl
    return 0.25 * (a + b), 0.25 * (a - b)


def mode_expand(mon, modes, reference, direction="+", offset=0.0):
    """Power fraction carried by each mode, relative to ``reference``.

    ``reference`` is the source power per frequency from a normalization
    run. Returns an array of shape (n_modes, n_freq).
    """
    if reference is None:
        raise ValueError("mode expansion needs a reference power from a normalization run")
    ref = np.asarray(reference, dtype=float)
    if np.any(ref <= 0):
        raise ValueError("reference power must be positive")
    if not isinstance(modes, (list, tuple)):
        modes = [modes]
    out = []
    for m in modes:
        ap, am = mode_amplitudes(mon, m, offset)
        a = ap if direction == "+" else am
        out.append(np.abs(a) ** 2 / ref)
    return np.array(out)
