"""Start-stop coincidence histograms between two click streams."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _core
from ..parallel import run_jobs
from .emitter import StreamError

MIN_HALF_BINS = 10


@dataclass(frozen=True, eq=False)
class G2Histogram:
    """Coincidences vs delay ``tau = t_b - t_a``.

    ``counts[k]`` is the integer number of pairs in bin ``k`` centred on
    ``(k - nhalf) * bin_width``; ``g = counts / norm`` with
    ``norm = N_a N_b bin_width / T``.
    """

    counts: np.ndarray
    bin_width: float
    nhalf: int
    norm: float
    n_a: int = 0
    n_b: int = 0
    duration: float = 0.0

    @property
    def centers(self):
        return (np.arange(2 * self.nhalf + 1) - self.nhalf) * self.bin_width

    @property
    def edges(self):
        return (np.arange(2 * self.nhalf + 2) - self.nhalf - 0.5) * self.bin_width

    @property
    def measured(self):
        """True for histograms counted from click streams (Poisson counts)."""
        return self.n_a > 0 and self.n_b > 0

    @property
    def g(self):
        return self.counts / self.norm

    @property
    def sigma(self):
        """Poisson standard error of ``g`` per bin (floor of one count)."""
        return np.sqrt(np.maximum(self.counts, 1.0)) / self.norm

    @classmethod
    def from_values(cls, g, bin_width, norm=1.0):
        """Histogram wrapper around given g values (e.g. synthetic curves)."""
        g = np.asarray(g, dtype=float)
        if len(g) % 2 != 1:
            raise StreamError("need an odd number of bins centred on zero")
        return cls(g * norm, bin_width, (len(g) - 1) // 2, norm)

    def to_dict(self):
        return {
            "bin_width": self.bin_width,
            "nhalf": self.nhalf,
            "centers": self.centers.tolist(),
            "counts": [int(c) if float(c).is_integer() else float(c) for c in self.counts],
            "g": self.g.tolist(),
            "norm": self.norm,
            "n_a": self.n_a,
            "n_b": self.n_b,
            "duration": self.duration,
        }


def _nhalf(bin_width, max_tau):
    if not bin_width > 0:
        raise StreamError("bin_width must be > 0")
    m = int(round(max_tau / bin_width))
    if m < MIN_HALF_BINS:
        raise StreamError(f"max_tau must cover at least {MIN_HALF_BINS} bins each side")
    return m


def brute_force_counts(a, b, bin_width, nhalf):
    """O(n_a n_b) reference counter with the same bin rule."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    nbins = 2 * nhalf + 1
    counts = np.zeros(nbins, dtype=np.int64)
    half = nhalf + 0.5
    for ta in a:
        for tb in b:
            x = (tb - ta) / bin_width + half
            if 0.0 <= x < nbins:
                counts[int(np.floor(x))] += 1
    return counts


def coincidences(a, b, bin_width, nhalf, partitions=1, threads=1):
    """Optimized counts; ``partitions`` splits stream ``a`` into time
    windows counted independently and summed (every start event belongs to
    exactly one window, so no pair is counted twice)."""
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    if partitions <= 1 or len(a) < 2:
        return _core.coincidence_counts(a, b, bin_width, nhalf)
    reach = (nhalf + 1.5) * bin_width
    cuts = np.linspace(0, len(a), partitions + 1).astype(int)

    def job(k):
        sa = a[cuts[k]:cuts[k + 1]]
        if len(sa) == 0:
            return np.zeros(2 * nhalf + 1, dtype=np.int64)
        lo = np.searchsorted(b, sa[0] - reach, side="left")
        hi = np.searchsorted(b, sa[-1] + reach, side="right")
        return _core.coincidence_counts(sa, b[lo:hi], bin_width, nhalf)

    parts = run_jobs(job, range(partitions), threads)
    return np.sum(parts, axis=0, dtype=np.int64)


def g2_histogram(a, b, bin_width=128e-12, max_tau=20e-9, partitions=1, threads=1):
    """Normalized second-order correlation histogram of two click streams."""
    if len(a) == 0 or len(b) == 0:
        raise StreamError("g2 histogram needs two non-empty streams")
    nhalf = _nhalf(bin_width, max_tau)
    duration = max(a.duration, b.duration)
    counts = coincidences(a.times, b.times, bin_width, nhalf, partitions, threads)
    norm = len(a) * len(b) * bin_width / duration
    return G2Histogram(counts, bin_width, nhalf, norm, len(a), len(b), duration)
