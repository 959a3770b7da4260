"""End-to-end HBT measurement: emitter, beamsplitter, detectors, histogram, fit."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .emitter import RNG_ALGORITHM, EmitterSpec, StreamError, hbt_split, simulate_emitter
from .fit import classify_single_photon, fit_g2
from .histogram import g2_histogram


@dataclass(frozen=True)
class PipelineResult:
    rho: float
    expected_g2_0: float
    spec: EmitterSpec
    histogram: object
    fit: object
    single_photon: bool
    margin: float
    detected: int

    def summary(self):
        return {
            "rho": self.rho,
            "expected_g2_0": self.expected_g2_0,
            "g2_0": self.fit.g2_0,
            "sigma_g2_0": self.fit.sigma_g2_0,
            "tau0": self.fit.tau0,
            "single_photon": self.single_photon,
            "margin": self.margin,
            "detected_events": self.detected,
            "flags": list(self.fit.flags),
            "rng": RNG_ALGORITHM,
            "emitter": asdict(self.spec),
        }


def g2_pipeline(rho, events=1_000_000, detected_rate=5e7, det_eff=0.5, lifetime=1e-9,
                split=0.5, dark_rate=0.0, jitter=0.0, bin_width=128e-12, max_tau=20e-9,
                seed=0, model="binned", partitions=1, threads=1):
    """Simulate and analyse one HBT measurement at signal fraction ``rho``.

    ``events`` is the expected number of detected clicks summed over both
    arms; it fixes the integration time as ``events / detected_rate``.
    The emitted rate is ``detected_rate / det_eff`` and the pump rate is
    chosen so the emitter supplies the fraction ``rho`` of it.
    """
    if not events > 0 or not detected_rate > 0:
        raise StreamError("events and detected_rate must be > 0")
    if not 0 < det_eff <= 1:
        raise StreamError("det_eff must lie in (0, 1] for a finite integration time")
    duration = events / detected_rate
    spec = EmitterSpec.from_fraction(rho, detected_rate / det_eff, lifetime, duration, seed)
    photons = simulate_emitter(spec)
    a, b = hbt_split(photons, split, det_eff, dark_rate, seed, jitter)
    hist = g2_histogram(a, b, bin_width, max_tau, partitions, threads)
    fit = fit_g2(hist, model=model)
    ok, margin = classify_single_photon(fit)
    return PipelineResult(rho, 1.0 - rho**2, spec, hist, fit, ok, margin, len(a) + len(b))
