"""End-to-end acceptance checks, one test per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary
and then asserts, so a failing criterion fails the run.
"""

import json
import time
from pathlib import Path

import numpy as np
import pytest
from conftest import ACCEPTANCE
from test_fdtd import DX, FREQS, plane_wave_spec, scattered, xline

from qdln import cli
from qdln.experiments import beta_factor, grating_extraction
from qdln.fdtd import (
    SimulationSpec, discrete_energy, initial_state, poynting_flux, prepare, run, step,
)
from qdln.geometry import PermittivityMap
from qdln.modesolver import C0, IndexProfile, slab_oracle_neff, solve_slab_modes
from qdln.photonstats import EmitterSpec, brute_force_counts, coincidences, hbt_split, simulate_emitter

pytestmark = pytest.mark.acceptance

_RUNS = {}


def run_config(name, tmp_root, k=0):
    """Run a shipped config through the CLI machinery once per (name, k)."""
    key = (name, k)
    if key not in _RUNS:
        cfg = cli.effective_config(cli.read_config(cli.shipped_config(name)))
        out = Path(tmp_root) / f"run{k}" / name
        manifest = cli.execute(cfg, out)
        _RUNS[key] = (out, manifest)
    return _RUNS[key]


def summary_of(name, tmp_root):
    out, manifest = run_config(name, tmp_root)
    return json.loads((out / "summary.json").read_text())["results"], manifest


@pytest.fixture(scope="module")
def root(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


def record(n, checks, detail, seconds, limit):
    checks = dict(checks)
    if limit is not None:
        checks[f"runtime < {limit:g} s"] = seconds < limit
    failed = [k for k, ok in checks.items() if not ok]
    status = "PASS" if not failed else "FAIL"
    line = f"[{status}] criterion {n}: {detail}; runtime {seconds:.1f} s"
    if failed:
        line += "; failed: " + ", ".join(failed)
    ACCEPTANCE[n] = line
    print(line)
    assert not failed, line


def test_criterion_1_analytic_oracles():
    t0 = time.perf_counter()
    sets = [(3.17, 1.0, 280e-9), (2.21, 1.45, 600e-9), (3.5, 1.45, 220e-9), (1.6, 1.45, 4e-6),
            (2.21, 1.0, 1.2e-6), (3.17, 1.0, 900e-9), (2.0, 1.0, 150e-9), (1.9, 1.45, 1e-6),
            (3.17, 2.21, 500e-9), (2.5, 1.0, 300e-9)]
    worst = 0.0
    for n_core, n_clad, t in sets:
        for pol in ("TE", "TM"):
            prof = IndexProfile.from_layers(n_clad, [(n_core, t)], n_clad)
            got = [m.n_eff for m in solve_slab_modes(prof, 1.3e-6, pol)]
            ref = slab_oracle_neff(n_core, n_clad, t, 1.3e-6, pol)
            worst = max(worst, 1.0 if len(got) != len(ref) else max(abs(a - b) for a, b in zip(got, ref)))

    # vacuum pulse speed
    nx, ny = 1000, 4
    spec = plane_wave_spec(np.ones((nx, ny)), "TE", (), ())
    prep = prepare(spec)
    st = initial_state(spec, prep)
    i1, i2 = 100, 100 + int(round(20e-6 / DX))
    a, b = [], []
    for _ in range(3600):
        step(st, spec, prep)
        a.append(st.fields["ez"][i1, 1])
        b.append(st.fields["ez"][i2, 1])
    tt = np.arange(1, len(a) + 1) * prep.dt
    a, b = np.array(a) ** 2, np.array(b) ** 2
    delay = np.sum(tt * b) / np.sum(b) - np.sum(tt * a) / np.sum(a)
    speed = 20e-6 / delay / C0

    # Fresnel n = 1 -> 1.5
    nx = 600
    mons = (xline("r", 150, ny), xline("t", 450, ny))
    eps = np.ones((nx, ny))
    eps[350:] = 1.5**2
    res = run(plane_wave_spec(eps, "TE", mons, FREQS))
    ref = run(plane_wave_spec(np.ones((nx, ny)), "TE", mons, FREQS))
    r = -poynting_flux(scattered(res.monitors["r"], ref.monitors["r"])) / poynting_flux(ref.monitors["t"])
    r_err = float(np.max(np.abs(r - 0.04)))

    # closed PEC box energy over 1e4 steps
    n = 40
    eps = 1 + 4 * np.random.default_rng(3).random((n, n))
    spec = SimulationSpec(PermittivityMap(eps, DX, DX), "TE", (), boundary_x="pec", boundary_y="pec")
    prep = prepare(spec)
    st = initial_state(spec, prep)
    st.fields["ez"][n // 2, n // 2] = 1.0
    h_prev = {k: v.copy() for k, v in st.fields.items() if k.startswith("h")}
    prep.update_h(st)
    w0 = discrete_energy(prep, st, h_prev)
    for _ in range(10_000):
        prep.update_e(st)
        h_prev = {k: v.copy() for k, v in st.fields.items() if k.startswith("h")}
        prep.update_h(st)
    drift = abs(discrete_energy(prep, st, h_prev) - w0) / w0

    record(1, {
        "n_eff within 1e-6 on 10 slabs": worst < 1e-6,
        "pulse speed within 1%": abs(speed - 1) < 0.01,
        "Fresnel 0.040 +- 0.002": r_err <= 0.002,
        "energy drift < 1e-10": drift < 1e-10,
    }, f"max |dn_eff| {worst:.1e}, v/c {speed:.4f}, max |R - 0.04| {r_err:.1e}, energy drift {drift:.1e}",
        time.perf_counter() - t0, 120)


def test_criterion_2_taper(root):
    s, m = summary_of("taper_sweep", root)
    lengths, eff, oracle = s["lengths_m"], s["efficiency"], s["oracle"]
    mono = all(b >= a * (1 - 0.02) for a, b in zip(eff, eff[1:]))
    picks = [lengths.index(x) for x in (2e-6, 5e-6, 10e-6)]
    rel = [abs(eff[k] - oracle[k]) / oracle[k] for k in picks]
    at5 = s["efficiency_at_5um"]
    record(2, {
        "nondecreasing within 2%": mono,
        "oracle within 10% at 2/5/10 um": max(rel) < 0.10,
        "5 um value in [0.25, 0.65]": 0.25 <= at5 <= 0.65,
        "all runs converged": all(s["converged"]),
    }, f"eff {eff[0]:.3f}..{eff[-1]:.3f}, FDTD vs oracle rel. diff {', '.join(f'{x:.3f}' for x in rel)}, "
       f"5 um: 2D {at5:.3f} vs 3D reference {s['reference_3d_at_5um']:.3f}",
        m["wall_time_s"], 600)


def test_criterion_3_beta(root):
    s, m = summary_of("beta_factor", root)
    t0 = time.perf_counter()
    ctrl = beta_factor(offset=(0.0, 5e-6))
    ctrl_beta = float(ctrl["beta"][len(ctrl["beta"]) // 2])
    elapsed = m["wall_time_s"] + time.perf_counter() - t0
    record(3, {
        "beta in [0.6, 0.95]": 0.6 <= s["beta_center"] <= 0.95,
        "control beta < 0.05": ctrl_beta < 0.05,
    }, f"beta {s['beta_center']:.3f} (3D reference {s['reference_3d']:.2f}), control 5 um outside {ctrl_beta:.4f}",
        elapsed, 300)


def test_criterion_4_bragg(root):
    s, m = summary_of("bragg_spectrum", root)
    counts = s["counts"]
    k10 = counts.index(10)
    r = s["R_at_design"]
    sb = s["stopband_m"][k10]
    out, _ = run_config("bragg_spectrum", root)
    rows = np.genfromtxt(out / "bragg_spectrum.csv", delimiter=",", names=True)
    lam = 1.3e-6
    contains = sb is not None and sb[0] <= lam <= sb[1]
    record(4, {
        "stopband contains 1300 nm": contains,
        "R > 0.8 at 1300 nm": r[k10] > 0.8,
        "R + T <= 1.02": max(s["max_R_plus_T"]) <= 1.02,
        "R monotone in period count": all(b >= a for a, b in zip(r, r[1:])),
    }, f"R(1300 nm) for {counts} periods = {', '.join(f'{x:.3f}' for x in r)}; "
       f"10-period stopband {'none' if sb is None else f'{sb[0]*1e9:.0f}-{sb[1]*1e9:.0f} nm'}, "
       f"peak R {float(np.max(rows['R_10'])):.3f}; max R + T {max(s['max_R_plus_T']):.3f}",
        m["wall_time_s"], 600)


def test_criterion_5_grating(root):
    s, m = summary_of("grating_extraction", root)
    t0 = time.perf_counter()
    ctrl = grating_extraction(teeth=0)
    ctrl_up = float(np.max(np.abs(ctrl["up"])))
    elapsed = m["wall_time_s"] + time.perf_counter() - t0
    record(5, {
        "partition sums to 1 +- 0.03": abs(s["total_min"] - 1) <= 0.03 and abs(s["total_max"] - 1) <= 0.03,
        "zero-teeth up-fraction < 0.02": ctrl_up < 0.02,
    }, f"partition {s['total_min']:.3f}..{s['total_max']:.3f}, up {s['up_center']:.3f} "
       f"(2D; 3D reference {s['reference_3d_up']:.3f}), zero-teeth up {ctrl_up:.1e}",
        elapsed, 600)


def test_criterion_6_budget(root):
    s, m = summary_of("efficiency_budget", root)
    record(6, {
        "0.34085 exact": s["total_on_chip"] == 0.85 * 0.401 and abs(s["total_on_chip"] - 0.34085) < 1e-15,
        "34%": s["total_on_chip_percent"] == "34%",
        "0.0910": abs(s["ideal_collection"] - 0.0910) < 5e-5,
        "9%": s["ideal_collection_percent"] == "9%",
        "excess ratio 0.242 +- 0.001": abs(s["excess_loss_ratio"] - 0.242) <= 0.001,
    }, f"on-chip {s['total_on_chip']!r} ({s['total_on_chip_percent']}), ideal {s['ideal_collection']:.5f} "
       f"({s['ideal_collection_percent']}), excess-loss ratio {s['excess_loss_ratio']:.4f}",
        m["wall_time_s"], 1)


def test_criterion_7_photon_statistics(root):
    t0 = time.perf_counter()
    qd, _ = summary_of("g2_pipeline", root)
    mixed, _ = summary_of("g2_pipeline_rho080", root)
    poisson, _ = summary_of("g2_pipeline_poisson", root)
    exact = 0
    for seed in range(50):
        spec = EmitterSpec.from_fraction(0.9, 1e8, 1e-9, 2e-5, seed=seed)
        a, b = hbt_split(simulate_emitter(spec), 0.5, 1.0, seed=seed)
        ta, tb = a.times[:200], b.times[:200]
        exact += np.array_equal(coincidences(ta, tb, 128e-12, 156), brute_force_counts(ta, tb, 128e-12, 156))
    record(7, {
        "rho 0.959 -> 0.08 +- 0.02": abs(qd["g2_0"] - 0.08) <= 0.02,
        "rho 0.8 -> 0.36 +- 0.05": abs(mixed["g2_0"] - 0.36) <= 0.05,
        "Poisson -> 1.00 +- 0.02": abs(poisson["g2_0"] - 1.0) <= 0.02,
        "QD cases single-photon": qd["single_photon"] and mixed["single_photon"],
        "Poisson not single-photon": not poisson["single_photon"],
        "brute force exact on 50 seeds": exact == 50,
    }, f"g2(0) {qd['g2_0']:.3f} +- {qd['sigma_g2_0']:.3f} (rho 0.959), {mixed['g2_0']:.3f} +- "
       f"{mixed['sigma_g2_0']:.3f} (rho 0.8), {poisson['g2_0']:.3f} (Poisson); brute force {exact}/50 exact",
        time.perf_counter() - t0, 300)


def test_criterion_8_determinism(root):
    t0 = time.perf_counter()
    names = list(cli._registry()) + ["g2_pipeline_rho080", "g2_pipeline_poisson"]
    same, differing = 0, []
    for name in names:
        d0, _ = run_config(name, root, 0)
        d1, _ = run_config(name, root, 1)
        files = sorted(p.name for p in d0.iterdir() if p.name != "manifest.json")
        for f in files:
            if (d0 / f).read_bytes() == (d1 / f).read_bytes():
                same += 1
            else:
                differing.append(f"{name}/{f}")
        m0 = json.loads((d0 / "manifest.json").read_text())
        m1 = json.loads((d1 / "manifest.json").read_text())
        if m0["files"] != m1["files"] or m0["config_sha256"] != m1["config_sha256"]:
            differing.append(f"{name}/manifest.json hashes")
    record(8, {"byte-identical reruns": not differing},
           f"{same} CSV/JSON artifacts identical across reruns of {len(names)} configs"
           + (f"; differing: {', '.join(differing)}" if differing else ""),
           time.perf_counter() - t0, None)
