"""Guided modes of piecewise-constant 1D index profiles.

Modes are found with a transfer-matrix characteristic function scanned over
the guided range of effective index and refined by bisection. The field of
a solved mode can be evaluated exactly anywhere, which keeps overlap
integrals free of resampling error.

Polarization convention (the field stored in ``Mode`` is the component
parallel to the interfaces):

* ``"TE"``: electric field, continuity of psi and psi'.
* ``"TM"``: magnetic field, continuity of psi and psi'/n^2.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

C0 = 299792458.0
MU0 = 1.25663706212e-6
EPS0 = 1.0 / (MU0 * C0**2)
ETA0 = MU0 * C0

SCAN_SAMPLES = 2000
SCAN_MARGIN = 1e-6
NEFF_TOL = 1e-12
PROFILE_POINTS = 4096
WINDOW_DECAY_LENGTHS = 10.0

_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)
_trapz = getattr(np, "trapezoid", None) or np.trapz


class ModeSolverError(ValueError):
    pass


@dataclass(frozen=True)
class IndexProfile:
    """Piecewise-constant refractive index along one transverse axis.

    ``indices`` has one more entry than ``edges``: the first and last values
    are the semi-infinite claddings.
    """

    indices: tuple
    edges: tuple

    def __post_init__(self):
        idx = tuple(float(n) for n in self.indices)
        edg = tuple(float(e) for e in self.edges)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "edges", edg)
        if len(idx) != len(edg) + 1:
            raise ModeSolverError("need len(indices) == len(edges) + 1")
        if any(n <= 0 for n in idx):
            raise ModeSolverError("refractive indices must be positive")
        if any(b <= a for a, b in zip(edg, edg[1:])):
            raise ModeSolverError("edges must be strictly increasing")

    @classmethod
    def from_layers(cls, left, layers, right, origin=None):
        """Build from ``(index, thickness)`` layers between two claddings.

        With ``origin=None`` the layer stack is centred on zero.
        """
        thick = [float(t) for _, t in layers]
        if any(t <= 0 for t in thick):
            raise ModeSolverError("layer thickness must be positive")
        start = -0.5 * sum(thick) if origin is None else float(origin)
        edges = [start]
        for t in thick:
            edges.append(edges[-1] + t)
        if not layers:
            edges = []
        return cls((left, *[n for n, _ in layers], right), tuple(edges))

    @property
    def n_clad_max(self):
        return max(self.indices[0], self.indices[-1])

    @property
    def n_max(self):
        return max(self.indices)

    def shifted(self, dx):
        return IndexProfile(self.indices, tuple(e + dx for e in self.edges))

    def index_at(self, x):
        x = np.asarray(x, dtype=float)
        k = np.searchsorted(np.asarray(self.edges), x, side="right")
        return np.asarray(self.indices)[k]


def _layer_matrix(g2, t, p):
    """Transfer matrix for (psi, psi'/p) across a layer of thickness t."""
    if g2 > 0.0:
        g = np.sqrt(g2)
        gt = g * t
        if gt < 1e-8:
            return 1.0, p * t, g2 * t / p
        c = np.cosh(gt)
        s = np.sinh(gt)
        return c, p * s / g, g * s / p
    g = np.sqrt(-g2)
    gt = g * t
    if gt < 1e-8:
        return 1.0, p * t, g2 * t / p
    c = np.cos(gt)
    s = np.sin(gt)
    return c, p * s / g, -g * s / p


def _pfac(n, pol):
    return 1.0 if pol == "TE" else n * n


def _characteristic(neff, profile, k0, pol):
    """Mismatch of the right-cladding boundary condition; zero at a mode.

    Vectorized over ``neff``; the state vector is renormalized per layer,
    which preserves sign.
    """
    neff = np.asarray(neff, dtype=float)
    n = profile.indices
    n2 = neff * neff
    gl = k0 * np.sqrt(n2 - n[0] ** 2)
    gr = k0 * np.sqrt(n2 - n[-1] ** 2)
    u = np.ones_like(neff)
    v = gl / _pfac(n[0], pol)
    for k in range(1, len(n) - 1):
        t = profile.edges[k] - profile.edges[k - 1]
        p = _pfac(n[k], pol)
        g2 = k0**2 * (n2 - n[k] ** 2)
        g = np.sqrt(np.abs(g2))
        gt = g * t
        small = gt < 1e-8
        gs = np.where(small, 1.0, g)
        with np.errstate(over="ignore"):
            a = np.where(g2 > 0, np.cosh(gt), np.cos(gt))
            sg = np.where(g2 > 0, np.sinh(gt), np.sin(gt))
        b = np.where(small, p * t, p * sg / gs)
        c = np.where(small, g2 * t / p, np.where(g2 > 0, 1.0, -1.0) * gs * sg / p)
        u, v = a * u + b * v, c * u + a * v
        norm = np.hypot(u, v)
        u, v = u / norm, v / norm
    return v + gr / _pfac(n[-1], pol) * u


@dataclass(frozen=True)
class Mode:
    """A guided mode normalized to unit power flux (1 W per metre in 2D)."""

    wavelength: float
    polarization: str
    n_eff: float
    order: int
    index_profile: IndexProfile
    # (psi, psi'/p) at the left edge of every interior layer, already scaled
    _coeffs: tuple = field(repr=False, default=())
    _scale: float = field(repr=False, default=1.0)

    @property
    def k0(self):
        return 2 * np.pi / self.wavelength

    def _gamma(self, n):
        return self.k0 * np.sqrt(max(self.n_eff**2 - n**2, 0.0))

    @property
    def decay_lengths(self):
        n = self.index_profile.indices
        return 1.0 / self._gamma(n[0]), 1.0 / self._gamma(n[-1])

    def field_at(self, x):
        """Exact transverse field (E for TE, H for TM) at positions ``x``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        prof = self.index_profile
        n = prof.indices
        e = prof.edges
        out = np.empty_like(x)
        k = np.searchsorted(np.asarray(e), x, side="right")
        left = k == 0
        out[left] = self._coeffs[0][0] * np.exp(self._gamma(n[0]) * (x[left] - e[0]))
        right = k == len(n) - 1
        u_end, _ = self._coeffs[-1]
        out[right] = u_end * np.exp(-self._gamma(n[-1]) * (x[right] - e[-1]))
        for m in range(1, len(n) - 1):
            sel = k == m
            if not np.any(sel):
                continue
            u0, v0 = self._coeffs[m - 1]
            p = _pfac(n[m], self.polarization)
            g2 = self.k0**2 * (self.n_eff**2 - n[m] ** 2)
            dx = x[sel] - e[m - 1]
            if g2 > 0:
                g = np.sqrt(g2)
                out[sel] = u0 * np.cosh(g * dx) + p * v0 * np.sinh(g * dx) / g
            elif g2 < 0:
                g = np.sqrt(-g2)
                out[sel] = u0 * np.cos(g * dx) + p * v0 * np.sin(g * dx) / g
            else:
                out[sel] = u0 + p * v0 * dx
        return out * self._scale

    def weight_at(self, x):
        """Integration weight 1/n^2 for TM (power density), 1 for TE."""
        if self.polarization == "TE":
            return np.ones_like(np.asarray(x, dtype=float))
        return 1.0 / self.index_profile.index_at(x) ** 2

    def efield_factor(self, x):
        """Ratio of transverse E (TM) or H (TE) to the stored field for a
        forward-propagating mode.

        TE: H_t = n_eff / eta0 * psi.  TM: E_t = n_eff * eta0 / n(x)^2 * psi.
        """
        if self.polarization == "TE":
            return np.full_like(np.asarray(x, dtype=float), self.n_eff / ETA0)
        return self.n_eff * ETA0 / self.index_profile.index_at(x) ** 2

    def window(self, n_decay=WINDOW_DECAY_LENGTHS):
        dl, dr = self.decay_lengths
        e = self.index_profile.edges
        lo = e[0] if e else 0.0
        hi = e[-1] if e else 0.0
        return lo - n_decay * dl, hi + n_decay * dr

    @property
    def x(self):
        lo, hi = self.window()
        return np.linspace(lo, hi, PROFILE_POINTS)

    @property
    def profile(self):
        """Sampled field on ``self.x``."""
        return self.field_at(self.x)

    def zero_crossings(self):
        f = self.profile
        f = f[np.abs(f) > 1e-9 * np.abs(f).max()]
        return int(np.count_nonzero(np.signbit(f[1:]) != np.signbit(f[:-1])))

    def shifted(self, dx):
        """Same mode with the structure translated by ``dx``."""
        return Mode(self.wavelength, self.polarization, self.n_eff, self.order,
                    self.index_profile.shifted(dx), self._coeffs, self._scale)

    def power(self):
        """Power flux 1/2 Re int(E x H*) per unit length; 1 after normalization."""
        if self.polarization == "TE":
            return 0.5 * self.n_eff / ETA0 * _integrate_product(self, self, self)
        return 0.5 * self.n_eff * ETA0 * _integrate_product(self, self, self)

    def to_csv(self, path):
        """Write ``<path>.csv`` (position, field) and a ``<path>.json`` header."""
        path = Path(path)
        stem = path.with_suffix("")
        with open(stem.with_suffix(".csv"), "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["position_m", "field"])
            for xi, fi in zip(self.x, self.profile):
                w.writerow([f"{xi:.15g}", f"{fi:.15g}"])
        header = {
            "n_eff": self.n_eff,
            "order": self.order,
            "polarization": self.polarization,
            "wavelength_m": self.wavelength,
            "indices": list(self.index_profile.indices),
            "edges_m": list(self.index_profile.edges),
        }
        stem.with_suffix(".json").write_text(json.dumps(header, indent=2, sort_keys=True) + "\n")


def _build_mode(neff, profile, wavelength, pol, order):
    k0 = 2 * np.pi / wavelength
    n = profile.indices
    gl = k0 * np.sqrt(neff**2 - n[0] ** 2)
    u, v = 1.0, gl / _pfac(n[0], pol)
    coeffs = [(u, v)]
    for k in range(1, len(n) - 1):
        t = profile.edges[k] - profile.edges[k - 1]
        a, b, c = _layer_matrix(k0**2 * (neff**2 - n[k] ** 2), t, _pfac(n[k], pol))
        u, v = a * u + b * v, c * u + a * v
        coeffs.append((u, v))
    mode = Mode(wavelength, pol, float(neff), order, profile, tuple(coeffs), 1.0)
    # sign convention: positive at the field maximum closest to the left
    xs = mode.x
    f = mode.field_at(xs)
    sign = 1.0 if f[np.argmax(np.abs(f) > 0.5 * np.abs(f).max())] > 0 else -1.0
    scale = sign / np.sqrt(mode.power())
    return Mode(wavelength, pol, float(neff), order, profile, tuple(coeffs), scale)


def _scan_grid(profile, k0, lo, hi):
    """Scan points in n_eff, uniform in the transverse wavenumber of the
    highest-index layer (where guided modes are evenly spaced), with at
    least ``SCAN_SAMPLES`` points and 20 per expected mode."""
    n = profile.indices
    edges = profile.edges
    modes = 1.0
    for k in range(1, len(n) - 1):
        if n[k] > profile.n_clad_max:
            modes += k0 * (edges[k] - edges[k - 1]) * np.sqrt(n[k] ** 2 - profile.n_clad_max**2) / np.pi
    count = max(SCAN_SAMPLES, int(20 * modes))
    nm = profile.n_max
    q = np.linspace(np.sqrt(nm**2 - hi**2), np.sqrt(nm**2 - lo**2), count)
    return np.sqrt(nm**2 - q**2)[::-1]


def solve_slab_modes(profile, wavelength, polarization="TE"):
    """All guided modes of ``profile``, sorted by descending effective index.

    Returns an empty list when nothing is guided.
    """
    if polarization not in ("TE", "TM"):
        raise ModeSolverError(f"polarization must be 'TE' or 'TM', got {polarization!r}")
    if wavelength <= 0:
        raise ModeSolverError("wavelength must be positive")
    lo = profile.n_clad_max + SCAN_MARGIN
    hi = profile.n_max - SCAN_MARGIN
    if hi <= lo or len(profile.indices) < 3:
        return []
    k0 = 2 * np.pi / wavelength
    grid = _scan_grid(profile, k0, lo, hi)
    vals = _characteristic(grid, profile, k0, polarization)
    roots = []
    for i in np.nonzero(np.signbit(vals[1:]) != np.signbit(vals[:-1]))[0]:
        a, b = grid[i], grid[i + 1]
        fa = vals[i]
        while b - a > NEFF_TOL:
            mid = 0.5 * (a + b)
            fm = float(_characteristic(mid, profile, k0, polarization))
            if np.signbit(fm) == np.signbit(fa):
                a, fa = mid, fm
            else:
                b = mid
        roots.append(0.5 * (a + b))
    roots.sort(reverse=True)
    return [_build_mode(r, profile, wavelength, polarization, k) for k, r in enumerate(roots)]


def _breakpoints(*modes):
    pts = sorted({e for m in modes for e in m.index_profile.edges})
    return pts


def _clad_weight(mode, side):
    if mode.polarization == "TE":
        return 1.0
    return 1.0 / mode.index_profile.indices[side] ** 2


def _integrate_product(a, b, weight_mode=None):
    """Integral of psi_a * psi_b (times weight_mode's 1/n^2 for TM) over R."""
    pts = _breakpoints(a, b)
    if not pts:
        pts = [0.0]
    total = 0.0
    lam = min(a.wavelength / max(a.index_profile.indices), b.wavelength / max(b.index_profile.indices))

    def wfun(x):
        return 1.0 if weight_mode is None else weight_mode.weight_at(x)

    for x0, x1 in zip(pts, pts[1:]):
        nsub = max(1, int(np.ceil((x1 - x0) / (0.5 * lam))))
        sub = np.linspace(x0, x1, nsub + 1)
        for s0, s1 in zip(sub, sub[1:]):
            xs = 0.5 * (s1 - s0) * _GL_X + 0.5 * (s1 + s0)
            total += 0.5 * (s1 - s0) * np.sum(_GL_W * a.field_at(xs) * b.field_at(xs) * wfun(xs))
    # exponential tails beyond all interfaces
    left, right = pts[0], pts[-1]
    ga = a._gamma(a.index_profile.indices[0])
    gb = b._gamma(b.index_profile.indices[0])
    wl = 1.0 if weight_mode is None else _clad_weight(weight_mode, 0)
    total += a.field_at(left)[0] * b.field_at(left)[0] * wl / (ga + gb)
    ga = a._gamma(a.index_profile.indices[-1])
    gb = b._gamma(b.index_profile.indices[-1])
    wr = 1.0 if weight_mode is None else _clad_weight(weight_mode, -1)
    total += a.field_at(right)[0] * b.field_at(right)[0] * wr / (ga + gb)
    return float(total)


def mode_overlap(a, b):
    """Power-coupling fraction between two modes, symmetric in its arguments.

    TE: (int psi_a psi_b)^2 / (int psi_a^2 int psi_b^2).
    TM: the same with each cross integral weighted by one structure's 1/n^2.
    """
    if a.polarization != b.polarization:
        raise ModeSolverError("mode_overlap needs equal polarizations")
    if not np.isclose(a.wavelength, b.wavelength, rtol=1e-12, atol=0):
        raise ModeSolverError("mode_overlap needs equal wavelengths")
    if a.polarization == "TE":
        ab = _integrate_product(a, b)
        num = ab * ab
        den = _integrate_product(a, a) * _integrate_product(b, b)
    else:
        num = _integrate_product(a, b, a) * _integrate_product(a, b, b)
        den = _integrate_product(a, a, a) * _integrate_product(b, b, b)
    return float(min(max(num / den, 0.0), 1.0))


def field_overlap(x, field_samples, mode):
    """Power fraction of a sampled transverse field carried by ``mode``.

    The field is treated as living in the mode's own structure (TM weights
    use that structure's 1/n^2); integrals use the trapezoid rule on ``x``.
    """
    x = np.asarray(x, dtype=float)
    f = np.asarray(field_samples, dtype=float)
    psi = mode.field_at(x)
    w = mode.weight_at(x)
    num = _trapz(f * psi * w, x) ** 2
    den = _trapz(f * f * w, x) * _trapz(psi * psi * w, x)
    return float(num / den)


def slab_oracle_neff(n_core, n_clad, thickness, wavelength, polarization="TE"):
    """Effective indices of a symmetric slab from its closed-form dispersion.

    Even modes: kappa tan(kappa d/2) = r gamma; odd: -kappa cot(kappa d/2) = r gamma,
    with r = 1 (TE) or (n_core/n_clad)^2 (TM). Roots by plain bisection in
    the phase variable, independent of the transfer-matrix path.
    """
    k0 = 2 * np.pi / wavelength
    r = 1.0 if polarization == "TE" else (n_core / n_clad) ** 2
    v = 0.5 * k0 * thickness * np.sqrt(n_core**2 - n_clad**2)
    out = []
    # u = kappa d/2 in (0, v); each branch m covers (m pi/2, (m+1) pi/2)
    m = 0
    while m * np.pi / 2 < v:
        lo = m * np.pi / 2 + 1e-14
        hi = min((m + 1) * np.pi / 2, v) - 1e-14

        def f(u, m=m):
            w = np.sqrt(max(v * v - u * u, 0.0))
            if m % 2 == 0:
                return u * np.sin(u) - r * w * np.cos(u)
            return -u * np.cos(u) - r * w * np.sin(u)

        a, b = lo, hi
        fa, fb = f(a), f(b)
        if np.signbit(fa) != np.signbit(fb):
            for _ in range(200):
                mid = 0.5 * (a + b)
                fm = f(mid)
                if np.signbit(fm) == np.signbit(fa):
                    a, fa = mid, fm
                else:
                    b = mid
            u = 0.5 * (a + b)
            kappa = 2 * u / thickness
            out.append(float(np.sqrt(n_core**2 - (kappa / k0) ** 2)))
        m += 1
    return sorted(out, reverse=True)
