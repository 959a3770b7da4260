"""Antibunching fit g2(tau) = 1 - (1 - g2_0) exp(-|tau| / tau0).

The fit is a damped Gauss-Newton (Levenberg-Marquardt style) iteration on
Poisson-weighted residuals. By default the model is averaged over each
histogram bin, which removes the bias a point-sampled model picks up
when the dip is only a few bins wide.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_ITER = 200
STEP_TOL = 1e-9
BUNCHING_LIMIT = 1.5
CLASSICAL_LIMIT = 0.5
MIN_BINS = 20
PLATEAU_FACTOR = 5.0


class FitError(RuntimeError):
    def __init__(self, msg, last=None):
        super().__init__(msg)
        self.last = last


def _prim(x, tau0):
    """Integral of exp(-s/tau0) from 0 to x >= 0, and its tau0-derivative."""
    e = np.exp(-x / tau0)
    return tau0 * (1.0 - e), 1.0 - (1.0 + x / tau0) * e


def dip_shape(centers, tau0, bin_width=None):
    """exp(-|tau|/tau0) at bin centres, or averaged over each bin.

    Returns the shape and its derivative with respect to tau0.
    """
    c = np.asarray(centers, dtype=float)
    if bin_width is None:
        a = np.abs(c)
        e = np.exp(-a / tau0)
        return e, a / tau0**2 * e
    lo, hi = c - 0.5 * bin_width, c + 0.5 * bin_width
    f_hi, d_hi = _prim(np.abs(hi), tau0)
    f_lo, d_lo = _prim(np.abs(lo), tau0)
    s_hi, s_lo = np.sign(hi), np.sign(lo)
    return (s_hi * f_hi - s_lo * f_lo) / bin_width, (s_hi * d_hi - s_lo * d_lo) / bin_width


def g2_model(centers, g2_0, tau0, bin_width=None):
    e, _ = dip_shape(centers, tau0, bin_width)
    return 1.0 - (1.0 - g2_0) * e


@dataclass(frozen=True)
class G2Fit:
    g2_0: float
    tau0: float
    residual: float
    covariance: np.ndarray = field(repr=False, default=None)
    iterations: int = 0
    flags: tuple = ()
    model: str = "binned"

    @property
    def sigma_g2_0(self):
        if self.covariance is None:
            return float("nan")
        return float(np.sqrt(max(self.covariance[0, 0], 0.0)))

    @property
    def sigma_tau0(self):
        if self.covariance is None:
            return float("nan")
        return float(np.sqrt(max(self.covariance[1, 1], 0.0)))

    def __call__(self, tau):
        """Fitted curve at delays ``tau`` (point model); equals g2_0 at 0."""
        if not np.isfinite(self.tau0):
            return np.full_like(np.asarray(tau, dtype=float), self.g2_0)
        return g2_model(tau, self.g2_0, self.tau0)

    def to_dict(self):
        cov = None if self.covariance is None else np.asarray(self.covariance).tolist()
        return {"g2_0": self.g2_0, "sigma_g2_0": self.sigma_g2_0, "tau0": self.tau0,
                "sigma_tau0": self.sigma_tau0, "residual": self.residual, "covariance": cov,
                "iterations": self.iterations, "flags": list(self.flags), "model": self.model}


def initial_guess(centers, g):
    """g2_0 from the centre bin; tau0 from the first non-negative delay at
    which g recovers to 1 - (1 - g(0))/e, or the largest delay if it
    never does (which then fails the plateau check)."""
    k0 = int(np.argmin(np.abs(centers)))
    g0 = float(g[k0])
    target = 1.0 - (1.0 - g0) / np.e
    right = np.flatnonzero((centers >= 0) & ((g >= target) if g0 < 1 else (g <= target)))
    w = np.min(np.diff(centers)) if len(centers) > 1 else 1.0
    tau0 = float(centers[right[0]]) if len(right) else float(centers[-1])
    return g0, max(tau0, w)


def fit_g2(hist, model="binned", weighted=None, max_iter=MAX_ITER, tol=STEP_TOL):
    """Least-squares fit of the antibunching model to a histogram.

    ``model`` is ``"binned"`` (bin-averaged) or ``"point"`` (evaluated at
    bin centres). Weights are 1/variance from the raw Poisson counts;
    ``weighted=False`` gives an unweighted fit (used for noiseless curves).
    No dark-count subtraction or deconvolution is applied.
    """
    if model not in ("binned", "point"):
        raise ValueError("model must be 'binned' or 'point'")
    x = hist.centers
    g = hist.g
    if len(x) < MIN_BINS:
        raise FitError(f"need at least {MIN_BINS} bins, got {len(x)}")
    bw = hist.bin_width if model == "binned" else None
    if weighted is None:
        weighted = hist.measured
    if weighted:
        sig = hist.sigma
        w = 1.0 / sig**2
    else:
        w = np.ones_like(g)
    g0, t0 = initial_guess(x, g)
    if np.max(np.abs(x)) < PLATEAU_FACTOR * t0:
        raise FitError("histogram has no plateau: max |tau| below 5x the initial tau0 guess")

    # no visible dip: the amplitude is below noise in the centre bin
    amp_noise = 3.0 * float(hist.sigma[np.argmin(np.abs(x))]) if weighted else 0.0
    if abs(1.0 - g0) <= max(amp_noise, 1e-12):
        return _degenerate(hist, x, g, w, model)

    theta = np.array([g0, t0])
    lam = 1e-3

    def resid(th):
        return g - g2_model(x, th[0], th[1], bw)

    r = resid(theta)
    cost = float(np.sum(w * r * r))
    it = 0
    converged = False
    for it in range(1, max_iter + 1):
        e, de = dip_shape(x, theta[1], bw)
        jac = np.column_stack((e, -(1.0 - theta[0]) * de))  # d model / d theta
        jw = jac * w[:, None]
        a = jac.T @ jw
        grad = jw.T @ r
        while True:
            step = np.linalg.solve(a + lam * np.diag(np.diag(a)), grad)
            trial = theta + step
            if trial[1] <= 0:
                lam *= 10
                if lam > 1e12:
                    break
                continue
            rt = resid(trial)
            ct = float(np.sum(w * rt * rt))
            if ct <= cost:
                lam = max(lam / 10, 1e-12)
                break
            lam *= 10
            if lam > 1e12:
                break
        if lam > 1e12:
            break
        rel = np.max(np.abs(step) / np.maximum(np.abs(trial), 1e-300))
        theta, r, cost = trial, rt, ct
        if rel < tol:
            converged = True
            break
    if not converged:
        # a zero residual can stall the step test one iteration early
        if cost <= 1e-30 * max(len(x), 1):
            converged = True
        else:
            raise FitError(f"fit did not converge in {it} iterations", last=tuple(theta))
    e, de = dip_shape(x, theta[1], bw)
    jac = np.column_stack((e, -(1.0 - theta[0]) * de))
    a = jac.T @ (jac * w[:, None])
    try:
        cov = np.linalg.inv(a)
    except np.linalg.LinAlgError:
        cov = np.full((2, 2), np.nan)
    if not weighted:
        dof = max(len(x) - 2, 1)
        cov = cov * cost / dof
    flags = []
    if theta[0] > BUNCHING_LIMIT:
        flags.append("bunching/invalid model")
    return G2Fit(float(theta[0]), float(theta[1]), cost, cov, it, tuple(flags), model)


def _degenerate(hist, x, g, w, model):
    """No dip: report g2_0 = 1 with tau0 unidentifiable."""
    r = g - 1.0
    cost = float(np.sum(w * r * r))
    k0 = int(np.argmin(np.abs(x)))
    var = float(hist.sigma[k0] ** 2) if hist.measured else 0.0
    cov = np.array([[var, np.nan], [np.nan, np.nan]])
    return G2Fit(1.0, float("nan"), cost, cov, 0, ("degenerate: no dip",), model)


def classify_single_photon(fit):
    """(is_single_photon, margin): true iff g2_0 + 3 sigma < 0.5."""
    s = fit.sigma_g2_0
    if not np.isfinite(s):
        s = 0.0
    return bool(fit.g2_0 + 3.0 * s < CLASSICAL_LIMIT), CLASSICAL_LIMIT - fit.g2_0
