"""Device experiments built on the geometry, mode solver and FDTD engine."""

from .beta import beta_factor, device_field_map
from .bragg import BRAGG_BAND, bragg_spectrum, stopband
from .budget import EfficiencyBudget, efficiency_budget, percent
from .common import Band, ExperimentError, SweepResult
from .grating import grating_extraction
from .taper import eme_cascade, taper_reference, taper_sweep, taper_transmission

__all__ = [
    "beta_factor", "device_field_map", "BRAGG_BAND", "bragg_spectrum", "stopband",
    "EfficiencyBudget", "efficiency_budget", "percent", "Band", "ExperimentError",
    "SweepResult", "grating_extraction", "eme_cascade", "taper_reference", "taper_sweep",
    "taper_transmission",
]
