import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdln.modesolver import (
    IndexProfile, ModeSolverError, field_overlap, mode_overlap, slab_oracle_neff, solve_slab_modes,
)

LAM = 1.3e-6


def slab(n_core, t, n_clad=1.0):
    return IndexProfile.from_layers(n_clad, [(n_core, t)], n_clad)


def test_uniform_profile_has_no_modes():
    assert solve_slab_modes(slab(1.45, 1e-6, 1.45), LAM) == []


def test_inp_slab_matches_oracle():
    modes = solve_slab_modes(slab(3.17, 280e-9), LAM, "TE")
    ref = slab_oracle_neff(3.17, 1.0, 280e-9, LAM, "TE")
    assert len(modes) == len(ref)
    assert abs(modes[0].n_eff - ref[0]) < 1e-6


@pytest.mark.parametrize("pol", ["TE", "TM"])
@pytest.mark.parametrize("n_core,n_clad,t", [
    (3.17, 1.0, 280e-9), (2.21, 1.45, 600e-9), (3.5, 1.45, 220e-9), (1.6, 1.45, 4e-6),
    (2.21, 1.0, 1.2e-6), (3.17, 1.0, 900e-9), (2.0, 1.0, 150e-9),
])
def test_symmetric_slabs_match_transcendental_roots(n_core, n_clad, t, pol):
    modes = solve_slab_modes(slab(n_core, t, n_clad), LAM, pol)
    ref = slab_oracle_neff(n_core, n_clad, t, LAM, pol)
    assert [m.order for m in modes] == list(range(len(ref)))
    for m, r in zip(modes, ref):
        assert abs(m.n_eff - r) < 1e-6


def test_ln_strip_is_single_mode():
    # effective-index line cut of the 1.2 um LN strip (ridge index, slab index outside)
    from qdln.geometry import effective_indices
    eff = effective_indices()
    modes = solve_slab_modes(slab(eff["ridge"].refractive_index, 1.2e-6, eff["slab"].refractive_index), LAM, "TE")
    assert len(modes) == 1


def test_mode_invariants():
    modes = solve_slab_modes(slab(3.17, 900e-9), LAM, "TE")
    assert len(modes) >= 2
    for m in modes:
        assert 1.0 < m.n_eff < 3.17
        assert m.power() == pytest.approx(1.0, abs=1e-9)
        assert m.zero_crossings() == m.order
    assert all(a.n_eff > b.n_eff for a, b in zip(modes, modes[1:]))


def test_self_overlap_and_orthogonality():
    for pol in ("TE", "TM"):
        m0, m1 = solve_slab_modes(slab(3.17, 900e-9), LAM, pol)[:2]
        assert mode_overlap(m0, m0) == pytest.approx(1.0, abs=1e-9)
        assert mode_overlap(m0, m1) < 1e-6
        assert mode_overlap(m0, m1) == pytest.approx(mode_overlap(m1, m0), abs=1e-15)


def test_shifted_mode_overlap_vanishes():
    m = solve_slab_modes(slab(3.17, 280e-9), LAM, "TE")[0]
    assert mode_overlap(m, m.shifted(5e-6)) < 1e-3


def test_overlap_errors():
    a = solve_slab_modes(slab(3.17, 280e-9), LAM, "TE")[0]
    b = solve_slab_modes(slab(3.17, 280e-9), LAM, "TM")[0]
    c = solve_slab_modes(slab(3.17, 280e-9), 1.5e-6, "TE")[0]
    with pytest.raises(ModeSolverError):
        mode_overlap(a, b)
    with pytest.raises(ModeSolverError):
        mode_overlap(a, c)


def test_completeness_bound():
    guide = slab(3.17, 1.5e-6)
    modes = solve_slab_modes(guide, LAM, "TE")
    x = np.linspace(-6e-6, 6e-6, 20001)
    f = np.exp(-((x - 0.2e-6) / 0.4e-6) ** 2)
    assert sum(field_overlap(x, f, m) for m in modes) <= 1 + 1e-6


def test_neff_nondecreasing_in_thickness():
    ts = np.linspace(100e-9, 1e-6, 10)
    n = [solve_slab_modes(slab(3.17, t), LAM, "TE")[0].n_eff for t in ts]
    assert np.all(np.diff(n) >= 0)


def test_asymmetric_profile_and_csv(tmp_path):
    prof = IndexProfile.from_layers(1.45, [(2.21, 600e-9)], 1.0)
    m = solve_slab_modes(prof, LAM, "TE")[0]
    assert 1.45 < m.n_eff < 2.21
    m.to_csv(tmp_path / "mode")
    data = np.loadtxt(tmp_path / "mode.csv", delimiter=",", skiprows=1)
    assert data.shape[1] == 2
    assert (tmp_path / "mode.json").exists()


def test_bad_inputs():
    with pytest.raises(ModeSolverError):
        solve_slab_modes(slab(3.17, 280e-9), LAM, "XX")
    with pytest.raises(ModeSolverError):
        IndexProfile((1.0, 2.0), (0.0, 1.0))


@settings(max_examples=25, deadline=None)
@given(n_core=st.floats(1.6, 3.6), n_clad=st.floats(1.0, 1.5), t=st.floats(100e-9, 2e-6),
       pol=st.sampled_from(["TE", "TM"]))
def test_oracle_equivalence_property(n_core, n_clad, t, pol):
    modes = solve_slab_modes(slab(n_core, t, n_clad), LAM, pol)
    ref = slab_oracle_neff(n_core, n_clad, t, LAM, pol)
    # roots within the scan margin of cutoff can be missed by either method
    ref = [r for r in ref if r > n_clad + 2e-6]
    got = [m.n_eff for m in modes if m.n_eff > n_clad + 2e-6]
    assert len(got) == len(ref)
    assert np.allclose(got, ref, atol=1e-6, rtol=0)


def test_strongly_multimode_slab_finds_every_mode():
    t = 50e-6
    modes = solve_slab_modes(slab(3.17, t), LAM, "TE")
    ref = slab_oracle_neff(3.17, 1.0, t, LAM, "TE")
    assert len(modes) == len(ref) > 200
    assert np.allclose([m.n_eff for m in modes], ref, atol=1e-6, rtol=0)
