"""Shared pieces of the device experiments: grids, bands, sweeps, results."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..fdtd import GaussianPulse, LineMonitor, poynting_flux
from ..geometry import DEFAULT_INDICES, MIN_CELLS_PER_FEATURE
from ..modesolver import C0


CELLS_PER_WAVELENGTH = 25  # in InP at the design wavelength
PML_PAD = 14  # cells kept clear of the domain edge for full-height lines


class ExperimentError(ValueError):
    pass


@dataclass(frozen=True)
class Band:
    """Sampled wavelengths; an odd count puts the centre sample on ``center``."""

    lo: float = 1.25e-6
    hi: float = 1.35e-6
    count: int = 11
    pulse_bandwidth: float = 0.1

    def __post_init__(self):
        if not 0 < self.lo <= self.hi:
            raise ExperimentError("band needs 0 < lo <= hi")
        if self.count < 1:
            raise ExperimentError("band needs at least one sample")

    @property
    def wavelengths(self):
        if self.count == 1:
            return np.array([0.5 * (self.lo + self.hi)])
        return np.linspace(self.lo, self.hi, self.count)

    @property
    def frequencies(self):
        return C0 / self.wavelengths

    @property
    def center(self):
        return 0.5 * (self.lo + self.hi)

    def pulse(self, wavelength=None):
        return GaussianPulse(wavelength or self.center, self.pulse_bandwidth)

    def index_of(self, wavelength):
        return int(np.argmin(np.abs(self.wavelengths - wavelength)))

    @classmethod
    def from_dict(cls, d):
        return cls(**(d or {}))


def grid_step(geom, wavelength, cells=CELLS_PER_WAVELENGTH, scale=1.0, n_ref=None):
    """Cell size: ``cells`` per wavelength in InP, refined further if any
    feature would get fewer than the rasterizer's minimum cell count."""
    if scale <= 0:
        raise ExperimentError("resolution scale must be positive")
    n_ref = n_ref or DEFAULT_INDICES["InP"]
    dx = wavelength / (n_ref * cells)
    feat = geom.smallest_feature()
    if feat > 0:
        dx = min(dx, feat / MIN_CELLS_PER_FEATURE * (1 - 1e-9))
    return dx / scale


def full_span(geom, dx, axis="y"):
    """Extent of a line across the whole domain minus the PML."""
    x0, x1, y0, y1 = geom.bounds
    pad = PML_PAD * dx
    if axis == "y":
        return (y0 + pad, y1 - pad)
    return (x0 + pad, x1 - pad)


def flux_box(name, center, half):
    """Four monitors closing a rectangle around ``center``; names get suffixes
    ``_l``, ``_r``, ``_b``, ``_t``."""
    xc, yc = center
    hx, hy = (half, half) if np.isscalar(half) else half
    return (
        LineMonitor(f"{name}_l", "x", xc - hx, (yc - hy, yc + hy)),
        LineMonitor(f"{name}_r", "x", xc + hx, (yc - hy, yc + hy)),
        LineMonitor(f"{name}_b", "y", yc - hy, (xc - hx, xc + hx)),
        LineMonitor(f"{name}_t", "y", yc + hy, (xc - hx, xc + hx)),
    )


def box_outflow(monitors, name):
    return (poynting_flux(monitors[f"{name}_r"]) - poynting_flux(monitors[f"{name}_l"])
            + poynting_flux(monitors[f"{name}_t"]) - poynting_flux(monitors[f"{name}_b"]))


@dataclass
class SweepResult:
    """Efficiency per parameter value, with per-point convergence flags."""

    parameter: str
    values: list
    efficiency: list
    converged: list
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if len(v) != len(self.efficiency) or len(v) != len(self.converged):
            raise ExperimentError("sweep columns differ in length")
        if np.any(np.diff(v) <= 0):
            raise ExperimentError("sweep parameter values must be strictly increasing")
        e = np.asarray(self.efficiency, dtype=float)
        if np.any(e < 0) or np.any(e > 1):
            raise ExperimentError("sweep efficiencies must lie in [0, 1]")

    def rows(self):
        keys = list(self.extra)
        for k, (v, e, c) in enumerate(zip(self.values, self.efficiency, self.converged)):
            yield {self.parameter: v, "efficiency": e, "converged": c, **{x: self.extra[x][k] for x in keys}}


def clip_fraction(x, tol=0.02):
    """Clamp round-off excursions just outside [0, 1]; larger ones are errors."""
    x = np.asarray(x, dtype=float)
    if np.any(x < -tol) or np.any(x > 1 + tol):
        raise ExperimentError(f"fraction outside [0, 1] beyond tolerance: {x}")
    return np.clip(x, 0.0, 1.0)

