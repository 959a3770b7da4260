import numpy as np
import pytest

from qdln.experiments import (
    Band, EfficiencyBudget, ExperimentError, SweepResult, beta_factor, bragg_spectrum, device_field_map,
    efficiency_budget, eme_cascade, percent, stopband, taper_transmission,
)
from qdln.experiments.bragg import BRAGG_BAND
from qdln.geometry import DeviceGeometry, Material, Shape

ONE = Band(1.3e-6, 1.3e-6, 1)


def test_budget_reference_numbers():
    b = efficiency_budget(0.85, 0.401)
    assert b.total_on_chip == 0.85 * 0.401
    assert b.total_on_chip == pytest.approx(0.34085, abs=1e-15)
    assert percent(b.total_on_chip) == "34%"
    assert b.ideal_collection is None
    g = efficiency_budget(0.85, 0.401, 0.267)
    assert g.ideal_collection == g.total_on_chip * 0.267
    assert g.ideal_collection == pytest.approx(0.0910, abs=1e-4)
    assert percent(g.ideal_collection) == "9%"
    assert g.excess_loss_ratio(0.022) == pytest.approx(0.242, abs=1e-3)


def test_budget_all_ones_and_setup():
    b = EfficiencyBudget(1.0, 1.0, 1.0, 1.0)
    assert b.total_on_chip == b.ideal_collection == b.first_lens_predicted == 1.0
    assert EfficiencyBudget(0.5, 0.5, 0.5, 0.5).first_lens_predicted == 0.0625


@pytest.mark.parametrize("args", [(1.2, 0.4), (0.8, -0.1), (0.8, 0.4, 2.0), (None, 0.4)])
def test_budget_rejects_out_of_range(args):
    with pytest.raises(ExperimentError):
        efficiency_budget(*args)


def test_budget_excess_needs_grating():
    with pytest.raises(ExperimentError):
        efficiency_budget(0.85, 0.401).excess_loss_ratio(0.022)


def test_sweep_result_invariants():
    SweepResult("x", [1, 2], [0.1, 0.2], [True, True])
    with pytest.raises(ExperimentError):
        SweepResult("x", [2, 1], [0.1, 0.2], [True, True])
    with pytest.raises(ExperimentError):
        SweepResult("x", [1, 2], [0.1, 1.2], [True, True])
    with pytest.raises(ExperimentError):
        SweepResult("x", [1, 2], [0.1], [True, True])


def test_band():
    b = Band()
    assert b.wavelengths[b.index_of(1.3e-6)] == pytest.approx(1.3e-6)
    with pytest.raises(ExperimentError):
        Band(1.4e-6, 1.3e-6)


def test_stopband_edges():
    wl = np.linspace(1.0, 2.0, 11)
    r = np.array([0, 0, 0.2, 0.6, 0.9, 0.95, 0.9, 0.6, 0.2, 0, 0])
    lo, hi = stopband(wl, r)
    assert 1.2 < lo < 1.3 and 1.7 < hi < 1.8
    assert stopband(wl, 0.3 * r) is None


def test_mode_cascade_oracle_trends():
    butt = eme_cascade(0.0)
    five = eme_cascade(5e-6)
    assert 0 < butt < five < 1
    # slice doubling changes the cascade result by < 1%
    assert eme_cascade(5e-6, slices=100) == pytest.approx(five, rel=0.01)


def test_taper_rejects_negative_length():
    with pytest.raises(ExperimentError):
        taper_transmission(-1e-6, band=ONE)


def test_taper_is_deterministic():
    a = taper_transmission(2e-6, band=ONE)
    b = taper_transmission(2e-6, band=ONE)
    assert a["efficiency"].tobytes() == b["efficiency"].tobytes()
    assert a["steps"] == b["steps"]


@pytest.mark.slow
def test_taper_reciprocity():
    fwd = taper_transmission(5e-6, band=ONE)["efficiency"][0]
    rev = taper_transmission(5e-6, band=ONE, reverse=True)["efficiency"][0]
    assert rev == pytest.approx(fwd, rel=0.02)


@pytest.mark.slow
def test_taper_grid_convergence():
    r1 = taper_transmission(5e-6, band=ONE)["efficiency"][0]
    r2 = taper_transmission(5e-6, band=ONE, resolution_scale=2.0)["efficiency"][0]
    assert abs(r2 - r1) / r2 < 0.03


def test_beta_uniform_medium_is_an_error():
    m = Material("slab", 1.8)
    g = DeviceGeometry((Shape("rectangle", (0, -2e-6), (6e-6, 4e-6), m),), m, (0, 6e-6, -2.6e-6, 2.6e-6))
    with pytest.raises(ExperimentError, match="no guided mode"):
        beta_factor(geometry=g, band=ONE)


def test_beta_multimode_beam_is_an_error():
    with pytest.raises(ExperimentError, match="single-mode"):
        beta_factor({"beam_width": 1.2e-6, "ln_width": 1.2e-6}, offset=(0.0, 0.15e-6), band=ONE)


@pytest.fixture(scope="module")
def bragg():
    return bragg_spectrum(counts=(0, 4, 10))


def test_bragg_bare_beam_reflects_nothing(bragg):
    assert np.all(bragg[0]["R"] < 0.05)


def test_bragg_passivity(bragg):
    for c in (4, 10):
        assert np.all(bragg[c]["R"] + bragg[c]["T"] <= 1.02)


def test_bragg_more_periods_reflect_more(bragg):
    k = BRAGG_BAND.index_of(1.3e-6)
    assert bragg[10]["R"][k] >= bragg[4]["R"][k]


def test_bragg_mirror_blocks_transmission_in_stopband(bragg):
    sb = bragg[10]["stopband"]
    assert sb is not None
    wl = bragg["wavelengths"]
    inside = (wl >= sb[0]) & (wl <= sb[1])
    assert np.all(bragg[10]["T"][inside] < 0.10)


def test_bragg_geometry_violation():
    with pytest.raises(Exception, match="half the beam width"):
        bragg_spectrum(radius=260e-9)


@pytest.mark.slow
def test_device_field_map_shows_transfer_into_ln():
    fm, g, res = device_field_map()
    p = g.markers["params"]
    x0, x1 = g.markers["taper_start"], g.markers["taper_end"]

    def shares(f):
        i = int((x0 + f * (x1 - x0) - fm.x0) / fm.dx)
        col = fm.eps[i]
        w = p["beam_width"] * (1 - f)
        tot = col.sum()
        return col[np.abs(fm.yc) < w / 2].sum() / tot, col[np.abs(fm.yc) < p["ln_width"] / 2].sum() / tot

    beam_in, _ = shares(0.1)
    beam_out, ln_out = shares(0.9)
    assert res.converged
    assert beam_in > 0.4 and beam_out < 0.1 and ln_out > 0.8
