import numpy as np
import pytest

from qdln.geometry import (
    DEFAULT_INDICES, DeviceGeometry, GeometryError, Material, DEVICE_DEFAULTS, PermittivityMap, Shape,
    build_grating_side_view, build_paper_device, build_straight_beam, build_taper_side_view,
    effective_index_reduce, effective_indices, line_cut, materials, rasterize,
)
from qdln.modesolver import slab_oracle_neff

VAC = Material("vacuum", 1.0)
INP = Material("InP", 3.17)


def box(shapes, bounds=(0, 1e-6, 0, 1e-6)):
    return DeviceGeometry(tuple(shapes), VAC, bounds)


def test_device_defaults():
    g = build_paper_device()
    p = g.markers["params"]
    assert p["taper_length"] == 5e-6
    assert p["bragg_period"] == 290e-9 and p["bragg_radius"] == 100e-9
    kinds = [s.kind for s in g.shapes]
    assert "linear_taper" in kinds and "hole_array" in kinds


def test_butt_joint_has_no_trapezoid():
    g = build_paper_device(taper_length=0.0)
    assert "linear_taper" not in [s.kind for s in g.shapes]


@pytest.mark.parametrize("bad", [{"bragg_radius": 260e-9}, {"taper_length": -1e-6}, {"beam_width": 0.0},
                                 {"bragg_period": 150e-9}, {"etch_depth": 700e-9}, {"nonsense": 1}])
def test_device_rejects_bad_params(bad):
    with pytest.raises(GeometryError):
        build_paper_device(**bad)


def test_vacuum_only_raster():
    g = DeviceGeometry((Shape("rectangle", (0, 0), (1e-6, 1e-6), VAC),), VAC, (0, 1e-6, 0, 1e-6))
    em = rasterize(g, 50e6)
    assert np.all(em.eps == 1.0)


def test_inp_interior_and_partial_cells():
    g = box([Shape("rectangle", (0.205e-6, 0.2e-6), (0.5e-6, 0.5e-6), INP)])
    em = rasterize(g, 1e8)  # 10 nm cells; the left edge cuts cell 20 in half
    assert em.eps[40, 40] == pytest.approx(3.17**2, abs=1e-12)
    assert 3.17**2 == pytest.approx(10.0489)
    edge = em.eps[20, 40]
    assert 1.0 < edge < 10.0489
    assert edge == pytest.approx(1 + 0.5 * 9.0489, rel=1e-9)
    assert em.eps.min() >= 1.0 and em.eps.max() <= 10.0489 + 1e-12


def test_resolution_floor():
    g = box([Shape("rectangle", (0, 0), (100e-9, 1e-6), INP)])
    with pytest.raises(GeometryError):
        rasterize(g, 5e7)  # 5 cells across 100 nm
    rasterize(g, 1e8)


def test_overwrite_order():
    lo = Material("lo", 1.5)
    g = box([Shape("rectangle", (0, 0), (1e-6, 1e-6), lo), Shape("rectangle", (0.3e-6, 0.3e-6), (0.4e-6, 0.4e-6), INP)])
    em = rasterize(g, 1e8)
    assert np.all(em.eps[32:68, 32:68] == INP.eps)
    assert em.eps[5, 5] == lo.eps


def test_rasterize_idempotent():
    em1 = rasterize(build_paper_device(), 6e7)
    em2 = rasterize(build_paper_device(), 6e7)
    assert np.array_equal(em1.eps, em2.eps)


def test_monotone_refinement():
    g = build_paper_device()
    a = rasterize(g, 6e7)
    b = rasterize(g, 12e7)
    ia = a.eps.sum() * a.dx * a.dy
    ib = b.eps.sum() * b.dx * b.dy
    assert abs(ia - ib) / ib < 0.01


def test_hole_array_and_shape_errors():
    with pytest.raises(GeometryError):
        Shape("tooth_array", (0, 0), (0, 1e-7), INP, period=1e-7, duty=1.0, count=3)
    with pytest.raises(GeometryError):
        Shape("blob", (0, 0), (1, 1), INP)
    with pytest.raises(GeometryError):
        box([Shape("rectangle", (0.9e-6, 0), (0.5e-6, 1e-6), INP)])
    with pytest.raises(GeometryError):
        Material("x", 0.5)


def test_effective_index_reduce():
    inp, air = materials()["InP"], materials()["vacuum"]
    assert effective_index_reduce([(inp, 0), (inp, 1e-6), (inp, 0)], 1.3e-6).refractive_index == 3.17
    n = effective_index_reduce([(air, 0), (inp, 280e-9), (air, 0)], 1.3e-6).refractive_index
    assert abs(n - slab_oracle_neff(3.17, 1.0, 280e-9, 1.3e-6)[0]) < 1e-6
    thick = effective_index_reduce([(air, 0), (inp, 10e-6), (air, 0)], 1.3e-6).refractive_index
    assert abs(thick - 3.17) < 1e-3
    with pytest.raises(GeometryError):
        effective_index_reduce([(inp, 0), (air, 1e-6), (inp, 0)], 1.3e-6)


def test_effective_indices_ordering():
    eff = effective_indices()
    assert eff["hybrid"].refractive_index > eff["ridge"].refractive_index > eff["slab"].refractive_index


def test_geometry_json_roundtrip(tmp_path):
    g = build_paper_device()
    g.save(tmp_path / "g.json")
    h = DeviceGeometry.load(tmp_path / "g.json")
    assert h.shapes == g.shapes and h.bounds == g.bounds


def test_permittivity_export(tmp_path):
    em = rasterize(build_paper_device(), 5e7)
    em.save(tmp_path / "eps")
    raw = (tmp_path / "eps.bin").read_bytes()
    assert len(raw) == em.nx * em.ny * 8
    back = PermittivityMap.load(tmp_path / "eps")
    assert np.array_equal(back.eps, em.eps)
    assert back.dx == em.dx


def test_side_views_and_line_cut():
    t = build_taper_side_view()
    assert t.markers["taper_end"] - t.markers["taper_start"] == pytest.approx(5e-6)
    em = rasterize(t, 1.0 / 16e-9)
    prof = line_cut(em, 1e-6)
    assert prof is not None and len(prof.indices) >= 3
    g = build_grating_side_view(grating_teeth=5)
    assert g.markers["grating_end"] - g.markers["grating_start"] == pytest.approx(5 * 700e-9)
    with pytest.raises(GeometryError):
        build_grating_side_view(grating_duty=1.2)


def test_straight_beam_holes():
    g = build_straight_beam(8e-6, holes_at=2e-6)
    assert g.markers["bragg_end"] - g.markers["bragg_start"] == pytest.approx(10 * 290e-9)
    with pytest.raises(GeometryError):
        build_straight_beam(2e-6, holes_at=0.5e-6)


def test_index_overrides():
    assert materials({"InP": 3.2})["InP"].refractive_index == 3.2
    assert DEFAULT_INDICES["InP"] == 3.17
    assert DEVICE_DEFAULTS["beam_width"] == 500e-9
