"""Monte Carlo photon streams: renewal emitter, Poisson background, HBT split."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

RNG_ALGORITHM = "numpy.random.PCG64 (SeedSequence spawn tree)"


class StreamError(ValueError):
    pass


def make_rng(seed, *path):
    """Generator for child ``path`` of the seed tree rooted at ``seed``."""
    ss = np.random.SeedSequence(int(seed))
    for k in path:
        ss = ss.spawn(k + 1)[k]
    return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class EmitterSpec:
    """CW-pumped two-level emitter plus Poissonian background.

    After each emission the emitter waits an Exp(pump_rate) time to be
    re-excited and an Exp(1/lifetime) time to decay.
    """

    pump_rate: float
    lifetime: float
    background_rate: float = 0.0
    duration: float = 1e-3
    seed: int = 0

    def __post_init__(self):
        if self.pump_rate < 0 or self.background_rate < 0:
            raise StreamError("rates must be >= 0")
        if not self.lifetime > 0:
            raise StreamError("lifetime must be > 0")
        if not self.duration > 0:
            raise StreamError("duration must be > 0")

    @property
    def signal_rate(self):
        if self.pump_rate == 0:
            return 0.0
        return 1.0 / (1.0 / self.pump_rate + self.lifetime)

    @property
    def signal_fraction(self):
        total = self.signal_rate + self.background_rate
        return self.signal_rate / total if total > 0 else 0.0

    @classmethod
    def from_fraction(cls, rho, total_rate, lifetime, duration, seed=0):
        """Spec whose signal share of ``total_rate`` is ``rho``."""
        if not 0 <= rho <= 1:
            raise StreamError("signal fraction must lie in [0, 1]")
        s = rho * total_rate
        if s > 0 and s * lifetime >= 1:
            raise StreamError("signal rate must stay below 1/lifetime")
        pump = 1.0 / (1.0 / s - lifetime) if s > 0 else 0.0
        return cls(pump, lifetime, (1 - rho) * total_rate, duration, seed)


@dataclass(frozen=True, eq=False)
class ClickStream:
    """Sorted timestamps (s) in [0, duration]."""

    times: np.ndarray
    duration: float
    det_eff: float = 1.0
    dark_rate: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.ascontiguousarray(self.times, dtype=float)
        object.__setattr__(self, "times", t)
        if len(t) and (t[0] < 0 or t[-1] > self.duration):
            raise StreamError("timestamps must lie in [0, duration]")
        if len(t) > 1 and not np.all(np.diff(t) > 0):
            raise StreamError("timestamps must be strictly increasing")

    def __len__(self):
        return len(self.times)

    @property
    def rate(self):
        return len(self.times) / self.duration


def _renewal(rng, pump, lifetime, duration):
    if pump <= 0:
        return np.empty(0)
    mean = 1.0 / pump + lifetime
    out = []
    t = 0.0
    chunk = max(int(duration / mean * 1.05) + 16, 16)
    while t <= duration:
        iv = rng.exponential(1.0 / pump, chunk) + rng.exponential(lifetime, chunk)
        ts = t + np.cumsum(iv)
        out.append(ts)
        t = ts[-1]
        chunk = max(int((duration - t) / mean * 1.05) + 16, 16)
    ts = np.concatenate(out)
    return ts[ts <= duration]


def _poisson(rng, rate, duration):
    n = rng.poisson(rate * duration) if rate > 0 else 0
    return np.sort(rng.uniform(0.0, duration, n))


def _merge(*parts):
    t = np.sort(np.concatenate(parts), kind="stable")
    # exact float ties have probability ~0; drop them to keep the order strict
    if len(t) > 1:
        keep = np.concatenate(([True], np.diff(t) > 0))
        t = t[keep]
    return t


def simulate_emitter(spec):
    """Photon emission times of the emitter merged with its background.

    Deterministic for a given ``spec.seed``; signal and background draw
    from independent child streams of the seed.
    """
    sig = _renewal(make_rng(spec.seed, 0), spec.pump_rate, spec.lifetime, spec.duration)
    bg = _poisson(make_rng(spec.seed, 1), spec.background_rate, spec.duration)
    meta = {"rng": RNG_ALGORITHM, "seed": spec.seed, "signal_events": int(len(sig)),
            "background_events": int(len(bg))}
    return ClickStream(_merge(sig, bg), spec.duration, meta=meta)


def hbt_split(stream, split=0.5, det_eff=1.0, dark_rate=0.0, seed=0, jitter=0.0):
    """Route photons to two detectors and apply detection.

    Each photon goes to arm A with probability ``split``, is detected with
    probability ``det_eff``, and each detector adds Poissonian dark counts.
    ``jitter`` is an optional Gaussian timing spread (s); 0 disables it.
    """
    if not 0 <= split <= 1:
        raise StreamError("split must lie in [0, 1]")
    if not 0 <= det_eff <= 1:
        raise StreamError("det_eff must lie in [0, 1]")
    if dark_rate < 0 or jitter < 0:
        raise StreamError("dark_rate and jitter must be >= 0")
    rng = make_rng(seed, 2)
    n = len(stream)
    to_a = rng.random(n) < split
    kept = rng.random(n) < det_eff
    arms = []
    for k, sel in enumerate((to_a & kept, ~to_a & kept)):
        t = stream.times[sel]
        if jitter > 0:
            t = np.clip(t + rng.normal(0.0, jitter, len(t)), 0.0, stream.duration)
        dark = _poisson(make_rng(seed, 3 + k), dark_rate, stream.duration)
        meta = {"rng": RNG_ALGORITHM, "seed": seed, "arm": "ab"[k], "photons": int(len(t)),
                "dark": int(len(dark))}
        arms.append(ClickStream(_merge(t, dark), stream.duration, det_eff, dark_rate, meta))
    return arms[0], arms[1]
