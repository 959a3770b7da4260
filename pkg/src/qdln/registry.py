"""Registered experiments: config parameters in, tables and summaries out.

Each runner takes the validated ``params`` object of a config plus the
run context (seed, threads, resolution scale) and returns an
:class:`Outcome`. Runners never touch the filesystem; the CLI writes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .experiments import (
    BRAGG_BAND, Band, bragg_spectrum, beta_factor, efficiency_budget, grating_extraction, percent,
    taper_sweep,
)

# reference values of the full 3D device for side-by-side reporting
REFERENCE_3D = {"taper_5um": 0.401, "beta": 0.85, "grating_up": 0.267}


@dataclass
class Outcome:
    tables: dict  # file name -> (header, rows)
    summary: dict
    flags: list = field(default_factory=list)  # unconverged points
    extra_json: dict = field(default_factory=dict)  # file name -> JSON document

    @property
    def converged(self):
        return not self.flags


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    runner: object


def _geometry(params):
    return dict(params.get("geometry", {}))


def _band(params, default=None):
    b = params.get("band")
    if b is None:
        return default or Band()
    return Band.from_dict(b)


def _spectrum_rows(wl, cols):
    return [[float(w)] + [float(c[k]) for c in cols] for k, w in enumerate(wl)]


def _at(band, arr, wavelength):
    """Value at ``wavelength``, linearly interpolated between band samples."""
    arr = np.asarray(arr, dtype=float)
    if band.count == 1:
        return float(arr[0])
    return float(np.interp(wavelength, band.wavelengths, arr))


def run_taper_sweep(params, ctx):
    band = _band(params)
    geo = _geometry(params)
    res = taper_sweep(params.get("lengths"), geo, band, ctx["resolution_scale"], ctx["threads"],
                      oracle=params.get("oracle", True))
    header = ["taper_length_m", "efficiency", "converged", "band_mean", "steps"]
    has_oracle = "oracle" in res.extra
    if has_oracle:
        header.append("oracle_efficiency")
    rows = []
    for r in res.rows():
        row = [r["taper_length"], r["efficiency"], r["converged"], r["band_mean"], r["steps"]]
        if has_oracle:
            row.append(r["oracle"])
        rows.append(row)
    flags = [f"taper_length={v!r}" for v, c in zip(res.values, res.converged) if not c]
    summary = {"lengths_m": res.values, "efficiency": res.efficiency, "converged": res.converged,
               "reference_3d_at_5um": REFERENCE_3D["taper_5um"]}
    at5 = [k for k, v in enumerate(res.values) if abs(v - 5e-6) < 1e-12]
    if at5:
        summary["efficiency_at_5um"] = res.efficiency[at5[0]]
    if has_oracle:
        summary["oracle"] = res.extra["oracle"]
    return Outcome({"taper_sweep.csv": (header, rows)}, summary, flags)


def run_beta_factor(params, ctx):
    band = _band(params)
    r = beta_factor(_geometry(params), tuple(params.get("offset", (0.0, 0.0))), band,
                    ctx["resolution_scale"], params.get("angle", 90.0))
    rows = _spectrum_rows(r["wavelengths"], (r["beta"], r["left"], r["right"]))
    summary = {"beta_center": _at(band, r["beta"], band.center), "center_wavelength_m": band.center,
               "n_eff": r["n_eff"], "guided_modes": r["modes"], "converged": r["converged"],
               "reference_3d": REFERENCE_3D["beta"]}
    flags = [] if r["converged"] else ["beta run"]
    return Outcome({"beta_factor.csv": (["wavelength_m", "beta", "left", "right"], rows)}, summary, flags)


def run_bragg_spectrum(params, ctx):
    band = _band(params, BRAGG_BAND)
    counts = list(params.get("counts", [10]))
    r = bragg_spectrum(params.get("period"), params.get("radius"), counts, _geometry(params), band,
                       ctx["resolution_scale"], ctx["threads"])
    header = ["wavelength_m"]
    cols = []
    for c in counts:
        header += [f"R_{c}", f"T_{c}"]
        cols += [r[c]["R"], r[c]["T"]]
    lam = params.get("design_wavelength", 1.3e-6)
    summary = {
        "counts": counts,
        "design_wavelength_m": lam,
        "R_at_design": [_at(band, r[c]["R"], lam) for c in counts],
        "T_at_design": [_at(band, r[c]["T"], lam) for c in counts],
        "max_R_plus_T": [float(np.max(r[c]["R"] + r[c]["T"])) for c in counts],
        "stopband_m": [r[c]["stopband"] for c in counts],
        "converged": [bool(r[c]["converged"]) for c in counts],
    }
    flags = [f"count={c}" for c in counts if not r[c]["converged"]]
    return Outcome({"bragg_spectrum.csv": (header, _spectrum_rows(r["wavelengths"], cols))}, summary, flags)


def run_grating_extraction(params, ctx):
    band = _band(params)
    r = grating_extraction(params.get("period"), params.get("duty"), params.get("teeth"),
                           _geometry(params), band, ctx["resolution_scale"])
    keys = ("up", "down", "transmitted", "reflected", "total")
    rows = _spectrum_rows(r["wavelengths"], [r[k] for k in keys])
    summary = {f"{k}_center": _at(band, r[k], band.center) for k in keys}
    summary.update({"center_wavelength_m": band.center, "total_min": float(np.min(r["total"])),
                    "total_max": float(np.max(r["total"])), "converged": r["converged"],
                    "reference_3d_up": REFERENCE_3D["grating_up"]})
    flags = [] if r["converged"] else ["grating run"]
    return Outcome({"grating_extraction.csv": (["wavelength_m", *keys], rows)}, summary, flags)


def run_efficiency_budget(params, ctx):
    b = efficiency_budget(params["beta"], params["taper"], params.get("grating"), params.get("setup"))
    d = b.to_dict()
    summary = dict(d)
    for k in ("total_on_chip", "ideal_collection", "first_lens_predicted"):
        if d[k] is not None:
            summary[f"{k}_percent"] = percent(d[k])
    measured = params.get("measured_first_lens")
    if measured is not None and b.ideal_collection is not None:
        summary["measured_first_lens"] = measured
        summary["excess_loss_ratio"] = b.excess_loss_ratio(measured)
    rows = [[k, v] for k, v in summary.items() if isinstance(v, float)]
    return Outcome({"efficiency_budget.csv": (["quantity", "value"], rows)}, summary)


def run_g2_pipeline(params, ctx):
    from .photonstats import g2_pipeline
    from .photonstats.io import histogram_document

    kw = {k: v for k, v in params.items() if k not in ("rho", "save_streams")}
    res = g2_pipeline(params["rho"], seed=ctx["seed"], threads=ctx["threads"], **kw)
    h, f = res.histogram, res.fit
    curve = f(h.centers)
    rows = [[float(t), int(c), float(g), float(s), float(m)]
            for t, c, g, s, m in zip(h.centers, h.counts, h.g, h.sigma, curve)]
    summary = res.summary()
    summary["seed"] = ctx["seed"]
    doc = histogram_document(h, f, ctx["seed"], {"rho": params["rho"], **kw})
    return Outcome({"g2_histogram.csv": (["tau_s", "counts", "g", "sigma", "fit"], rows)}, summary,
                   extra_json={"g2_histogram.json": doc})


EXPERIMENTS = {
    e.name: e
    for e in (
        Experiment("taper_sweep", "InP-to-LN taper mode transfer vs taper length, with mode-cascade oracle",
                   run_taper_sweep),
        Experiment("beta_factor", "fraction of dipole power captured by the nanobeam guided mode",
                   run_beta_factor),
        Experiment("bragg_spectrum", "hole-array mirror modal reflectance and transmittance vs wavelength",
                   run_bragg_spectrum),
        Experiment("grating_extraction", "grating coupler up/down/forward/backward power partition",
                   run_grating_extraction),
        Experiment("efficiency_budget", "chained beta x taper x grating x setup efficiency budget",
                   run_efficiency_budget),
        Experiment("g2_pipeline", "simulated HBT measurement: emitter, split, histogram, antibunching fit",
                   run_g2_pipeline),
    )
}


def list_experiments():
    return [(name, EXPERIMENTS[name].description) for name in EXPERIMENTS]

