"""Photon-correlation simulation and antibunching analysis."""

from .emitter import RNG_ALGORITHM, ClickStream, EmitterSpec, StreamError, hbt_split, make_rng, simulate_emitter
from .fit import FitError, G2Fit, classify_single_photon, fit_g2, g2_model
from .histogram import G2Histogram, brute_force_counts, coincidences, g2_histogram
from .pipeline import PipelineResult, g2_pipeline

__all__ = [
    "RNG_ALGORITHM", "ClickStream", "EmitterSpec", "StreamError", "hbt_split", "make_rng",
    "simulate_emitter", "FitError", "G2Fit", "classify_single_photon", "fit_g2", "g2_model",
    "G2Histogram", "brute_force_counts", "coincidences", "g2_histogram", "PipelineResult",
    "g2_pipeline",
]
