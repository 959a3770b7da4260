"""Two-dimensional FDTD engine."""

from .analysis import mode_amplitudes, mode_expand, poynting_flux
from .core import (
    COURANT, ContinuousWave, DftMonitor, FDTDError, FieldState, GaussianPulse, LineMonitor, PML,
    PlaneWave, RunResult, SimulationSpec, Source, SpecError, Stop, discrete_energy, initial_state, prepare, run, step,
    validate,
)
