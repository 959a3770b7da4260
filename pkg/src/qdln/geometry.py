"""Parametric device geometry, rasterization and effective-index reduction.

Shapes are painted in list order onto a background; each cell receives the
area-weighted average of relative permittivity (eps = n^2) over the cell.
All lengths are in metres.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import modesolver

SUBSAMPLES = 10
MIN_CELLS_PER_FEATURE = 10

# handbook values at 1300 nm; overridable through ``materials(...)``
DEFAULT_INDICES = {
    "vacuum": 1.0,
    "InP": 3.17,
    "LiNbO3": 2.21,
    "SiO2": 1.45,
    "Si": 3.5,
}
DESIGN_WAVELENGTH = 1.3e-6


class GeometryError(ValueError):
    pass


@dataclass(frozen=True)
class Material:
    name: str
    refractive_index: float
    wavelength: float = DESIGN_WAVELENGTH

    def __post_init__(self):
        if not self.refractive_index >= 1.0:
            raise GeometryError(f"material {self.name!r}: refractive index must be >= 1")
        if self.wavelength <= 0:
            raise GeometryError(f"material {self.name!r}: wavelength must be positive")

    @property
    def eps(self):
        return self.refractive_index**2


def materials(overrides=None, wavelength=DESIGN_WAVELENGTH):
    """Default material table, with optional ``{name: index}`` overrides."""
    table = dict(DEFAULT_INDICES)
    table.update(overrides or {})
    return {k: Material(k, float(v), wavelength) for k, v in table.items()}


SHAPE_KINDS = ("rectangle", "linear_taper", "hole_array", "tooth_array", "graded_strip")


@dataclass(frozen=True)
class Shape:
    """One painted primitive.

    rectangle
        ``anchor`` is the lower-left corner, ``extent`` = (w, h).
    linear_taper
        Trapezoid inside the box anchored at its lower-left corner with
        ``extent`` = (length, h); its width goes linearly from
        ``widths[0]`` at the left end to ``widths[1]`` at the right end,
        centred on the box mid-line.
    hole_array
        ``count`` discs of ``radius`` spaced by ``period`` along x; ``anchor``
        is the centre of the first disc.
    tooth_array
        ``count`` rectangles of width ``duty * period`` and height
        ``extent[1]``; ``anchor`` is the lower-left corner of the first.
    graded_strip
        Rectangle like ``rectangle`` cut into ``len(grades)`` equal slices
        along x; slice k has refractive index ``grades[k]``. Used for
        index ramps in side-view models.
    """

    kind: str
    anchor: tuple
    extent: tuple
    material: Material
    widths: tuple = ()
    period: float = 0.0
    radius: float = 0.0
    count: int = 0
    duty: float = 0.0
    grades: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "grades", tuple(float(a) for a in self.grades))
        object.__setattr__(self, "anchor", tuple(float(a) for a in self.anchor))
        object.__setattr__(self, "extent", tuple(float(a) for a in self.extent))
        object.__setattr__(self, "widths", tuple(float(a) for a in self.widths))
        if self.kind not in SHAPE_KINDS:
            raise GeometryError(f"unknown shape kind {self.kind!r}")
        if self.count < 0:
            raise GeometryError("count must be >= 0")
        if self.kind == "graded_strip" and (not self.grades or min(self.grades) < 1.0):
            raise GeometryError("graded_strip: needs at least one grade, all indices >= 1")
        if self.kind in ("rectangle", "linear_taper", "graded_strip"):
            if min(self.extent) <= 0:
                raise GeometryError(f"{self.kind}: extent must be positive")
        if self.kind == "linear_taper":
            if len(self.widths) != 2 or min(self.widths) < 0 or max(self.widths) > self.extent[1] * (1 + 1e-12):
                raise GeometryError("linear_taper: widths must be two values in [0, h]")
            if max(self.widths) <= 0:
                raise GeometryError("linear_taper: at least one end must have positive width")
        if self.kind == "hole_array":
            if self.radius <= 0 or (self.count > 1 and self.period <= 0):
                raise GeometryError("hole_array: radius and period must be positive")
        if self.kind == "tooth_array":
            if not 0 < self.duty < 1:
                raise GeometryError("tooth_array: duty must be in (0, 1)")
            if self.period <= 0 or self.extent[1] <= 0:
                raise GeometryError("tooth_array: period and height must be positive")

    @property
    def bbox(self):
        x, y = self.anchor
        if self.kind == "hole_array":
            r = self.radius
            return x - r, x + max(self.count - 1, 0) * self.period + r, y - r, y + r
        if self.kind == "tooth_array":
            return x, x + max(self.count - 1, 0) * self.period + self.duty * self.period, y, y + self.extent[1]
        return x, x + self.extent[0], y, y + self.extent[1]

    def smallest_feature(self):
        if self.kind in ("rectangle", "graded_strip"):
            return min(self.extent)
        if self.kind == "linear_taper":
            return min(self.extent[0], max(self.widths))
        if self.kind == "hole_array":
            return 2 * self.radius
        return min(min(self.duty, 1 - self.duty) * self.period, self.extent[1])

    def to_dict(self):
        d = asdict(self)
        d["material"] = asdict(self.material)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        d["material"] = Material(**d["material"])
        return cls(**d)


@dataclass(frozen=True)
class DeviceGeometry:
    shapes: tuple
    background: Material
    bounds: tuple
    markers: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "shapes", tuple(self.shapes))
        object.__setattr__(self, "bounds", tuple(float(b) for b in self.bounds))
        x0, x1, y0, y1 = self.bounds
        if not (x1 > x0 and y1 > y0):
            raise GeometryError("bounds must satisfy x_min < x_max and y_min < y_max")
        if not self.shapes:
            raise GeometryError("geometry needs at least one shape")
        tol = 1e-12
        for s in self.shapes:
            if s.kind in ("hole_array", "tooth_array") and s.count == 0:
                continue
            a, b, c, d = s.bbox
            if a < x0 - tol or b > x1 + tol or c < y0 - tol or d > y1 + tol:
                raise GeometryError(f"{s.kind} at {s.anchor} lies outside the bounds")

    def max_index(self):
        return max([self.background.refractive_index] + [s.material.refractive_index for s in self.shapes])

    def smallest_feature(self):
        feats = [s.smallest_feature() for s in self.shapes
                 if not (s.kind in ("hole_array", "tooth_array") and s.count == 0)]
        return min(feats)

    def to_dict(self):
        return {
            "shapes": [s.to_dict() for s in self.shapes],
            "background": asdict(self.background),
            "bounds": list(self.bounds),
            "markers": {k: list(v) if isinstance(v, (tuple, list)) else v for k, v in self.markers.items()},
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            shapes=tuple(Shape.from_dict(s) for s in d["shapes"]),
            background=Material(**d["background"]),
            bounds=tuple(d["bounds"]),
            markers=dict(d.get("markers", {})),
        )

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path):
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True, eq=False)
class PermittivityMap:
    """Relative permittivity sampled on cell centres.

    Cell ``(i, j)`` covers ``[x0 + i dx, x0 + (i+1) dx] x [y0 + j dy, ...]``.
    """

    eps: np.ndarray
    dx: float
    dy: float
    x0: float = 0.0
    y0: float = 0.0

    @property
    def nx(self):
        return self.eps.shape[0]

    @property
    def ny(self):
        return self.eps.shape[1]

    @property
    def xc(self):
        return self.x0 + (np.arange(self.nx) + 0.5) * self.dx

    @property
    def yc(self):
        return self.y0 + (np.arange(self.ny) + 0.5) * self.dy

    def index_of(self, x, y):
        """Cell containing point (x, y)."""
        return int(np.floor((x - self.x0) / self.dx)), int(np.floor((y - self.y0) / self.dy))

    def save(self, path):
        """Little-endian float64 raster (C order, shape (nx, ny)) plus JSON sidecar."""
        path = Path(path)
        raw = path.with_suffix(".bin")
        raw.write_bytes(np.ascontiguousarray(self.eps, dtype="<f8").tobytes())
        meta = {"nx": self.nx, "ny": self.ny, "dx": self.dx, "dy": self.dy,
                "x0": self.x0, "y0": self.y0, "dtype": "<f8", "order": "C"}
        path.with_suffix(".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
        return raw

    @classmethod
    def load(cls, path):
        path = Path(path)
        meta = json.loads(path.with_suffix(".json").read_text())
        eps = np.frombuffer(path.with_suffix(".bin").read_bytes(), dtype="<f8").reshape(meta["nx"], meta["ny"])
        return cls(eps.astype(float), meta["dx"], meta["dy"], meta.get("x0", 0.0), meta.get("y0", 0.0))


def _axis_cover(lo, hi, origin, step, n):
    """Fraction of each cell along one axis covered by [lo, hi]."""
    edges = origin + np.arange(n + 1) * step
    f = np.clip((np.minimum(edges[1:], hi) - np.maximum(edges[:-1], lo)) / step, 0.0, 1.0)
    # round-off at coincident edges must not leak into fully covered cells
    f[f > 1.0 - 1e-9] = 1.0
    f[f < 1e-9] = 0.0
    return f


def _supersampled(shape, emap_shape, x0, y0, dx, dy):
    """Coverage fractions of a curved/slanted shape in its bounding cells."""
    nx, ny = emap_shape
    a, b, c, d = shape.bbox
    i0 = max(int(np.floor((a - x0) / dx)), 0)
    i1 = min(int(np.ceil((b - x0) / dx)), nx)
    j0 = max(int(np.floor((c - y0) / dy)), 0)
    j1 = min(int(np.ceil((d - y0) / dy)), ny)
    if i1 <= i0 or j1 <= j0:
        return None
    sub = (np.arange(SUBSAMPLES) + 0.5) / SUBSAMPLES
    xs = x0 + (np.arange(i0, i1)[:, None] + sub[None, :]).ravel() * dx
    ys = y0 + (np.arange(j0, j1)[:, None] + sub[None, :]).ravel() * dy
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    if shape.kind == "linear_taper":
        (ax, ay), (length, h) = shape.anchor, shape.extent
        w0, w1 = shape.widths
        t = (X - ax) / length
        half = 0.5 * (w0 + (w1 - w0) * t)
        inside = (t >= 0) & (t <= 1) & (np.abs(Y - (ay + 0.5 * h)) <= half)
    else:
        inside = np.zeros_like(X, dtype=bool)
        cx, cy = shape.anchor
        r2 = shape.radius**2
        for k in range(shape.count):
            inside |= (X - (cx + k * shape.period)) ** 2 + (Y - cy) ** 2 <= r2
    frac = inside.reshape(i1 - i0, SUBSAMPLES, j1 - j0, SUBSAMPLES).mean(axis=(1, 3))
    return (slice(i0, i1), slice(j0, j1)), frac


def rasterize(geom, resolution, min_cells=MIN_CELLS_PER_FEATURE):
    """Paint ``geom`` onto a uniform grid of ``resolution`` cells per metre."""
    if resolution <= 0:
        raise GeometryError("resolution must be positive")
    feature = geom.smallest_feature()
    if feature * resolution < min_cells - 1e-9:
        raise GeometryError(
            f"resolution {resolution:.4g} /m gives {feature * resolution:.2f} cells across the "
            f"smallest feature ({feature:.3g} m); need >= {min_cells}")
    x0, x1, y0, y1 = geom.bounds
    nx = max(int(round((x1 - x0) * resolution)), 1)
    ny = max(int(round((y1 - y0) * resolution)), 1)
    dx = (x1 - x0) / nx
    dy = (y1 - y0) / ny
    eps = np.full((nx, ny), geom.background.eps)
    for s in geom.shapes:
        e = s.material.eps
        if s.kind == "rectangle":
            fx = _axis_cover(s.anchor[0], s.anchor[0] + s.extent[0], x0, dx, nx)
            fy = _axis_cover(s.anchor[1], s.anchor[1] + s.extent[1], y0, dy, ny)
            f = np.outer(fx, fy)
            eps = eps * (1.0 - f) + f * e
        elif s.kind == "tooth_array":
            fy = _axis_cover(s.anchor[1], s.anchor[1] + s.extent[1], y0, dy, ny)
            fx = np.zeros(nx)
            for k in range(s.count):
                left = s.anchor[0] + k * s.period
                fx += _axis_cover(left, left + s.duty * s.period, x0, dx, nx)
            f = np.outer(np.minimum(fx, 1.0), fy)
            eps = eps * (1.0 - f) + f * e
        elif s.kind == "graded_strip":
            fy = _axis_cover(s.anchor[1], s.anchor[1] + s.extent[1], y0, dy, ny)
            step = s.extent[0] / len(s.grades)
            # slices are painted as one shape so shared cells mix correctly
            fx = np.zeros(nx)
            ex = np.zeros(nx)
            for k, n in enumerate(s.grades):
                left = s.anchor[0] + k * step
                c = _axis_cover(left, left + step, x0, dx, nx)
                fx += c
                ex += c * n**2
            f = np.outer(fx, fy)
            eps = eps * (1.0 - f) + np.outer(ex, fy)
        elif s.count or s.kind == "linear_taper":
            res = _supersampled(s, eps.shape, x0, y0, dx, dy)
            if res is None:
                continue
            sl, f = res
            eps[sl] = eps[sl] * (1.0 - f) + f * e
    return PermittivityMap(eps, dx, dy, x0, y0)


def effective_index_reduce(stack, wavelength, polarization="TE"):
    """Collapse a vertical layer stack to the index of its fundamental slab mode.

    ``stack`` lists ``(Material, thickness)`` from bottom to top; the first
    and last entries are semi-infinite claddings (their thickness is ignored).
    """
    if len(stack) == 0:
        raise GeometryError("empty stack")
    names = {m.name for m, _ in stack}
    idx = [m.refractive_index for m, _ in stack]
    if len(set(idx)) == 1:
        return Material(f"eff({stack[0][0].name})", idx[0], wavelength)
    if len(stack) < 3:
        raise GeometryError("stack not guiding")
    prof = modesolver.IndexProfile.from_layers(
        idx[0], [(m.refractive_index, t) for m, t in stack[1:-1]], idx[-1])
    modes = modesolver.solve_slab_modes(prof, wavelength, polarization)
    if not modes:
        raise GeometryError("stack not guiding")
    label = "/".join(m.name for m, _ in stack[1:-1]) if len(names) > 1 else stack[0][0].name
    return Material(f"eff({label})", modes[0].n_eff, wavelength)


# --- reference device ------------------------------------------------------

DEVICE_DEFAULTS = {
    "wavelength": 1.3e-6,
    "beam_width": 500e-9,
    "beam_thickness": 280e-9,
    "ln_width": 1.2e-6,
    "ln_thickness": 600e-9,
    "etch_depth": 150e-9,
    "taper_length": 5e-6,
    "taper_tip": 0.0,
    "bragg_period": 290e-9,
    "bragg_radius": 100e-9,
    "bragg_count": 10,
    "beam_length": 3e-6,
    "lead_in": 2e-6,
    "lead_out": 4e-6,
    "margin": 2e-6,
    "vertical_polarization": "TE",
    "indices": {},
}


def effective_indices(params=None):
    """Effective indices of the three vertical stacks of the top-view model.

    Returns ``{"hybrid": InP on LN ridge, "ridge": bare LN ridge, "slab": etched LN}``.
    """
    p = dict(DEVICE_DEFAULTS)
    p.update(params or {})
    mats = materials(p["indices"], p["wavelength"])
    lam, pol = p["wavelength"], p["vertical_polarization"]
    air, ln, inp, ox = mats["vacuum"], mats["LiNbO3"], mats["InP"], mats["SiO2"]
    ridge = effective_index_reduce([(ox, 0), (ln, p["ln_thickness"]), (air, 0)], lam, pol)
    slab_t = p["ln_thickness"] - p["etch_depth"]
    if slab_t > 0:
        slab = effective_index_reduce([(ox, 0), (ln, slab_t), (air, 0)], lam, pol)
    else:
        slab = ox
    hybrid = effective_index_reduce(
        [(ox, 0), (ln, p["ln_thickness"]), (inp, p["beam_thickness"]), (air, 0)], lam, pol)
    return {
        "hybrid": Material("InP/LN", hybrid.refractive_index, lam),
        "ridge": Material("LN ridge", ridge.refractive_index, lam),
        "slab": Material("LN slab", slab.refractive_index, lam),
    }


def check_device_params(p):
    for key in ("beam_width", "ln_width", "ln_thickness", "beam_thickness", "wavelength",
                "bragg_period", "bragg_radius", "beam_length"):
        if not p[key] > 0:
            raise GeometryError(f"{key} must be positive")
    if p["taper_length"] < 0:
        raise GeometryError("taper_length must be >= 0 (0 gives a butt joint)")
    if not 0 <= p["etch_depth"] <= p["ln_thickness"]:
        raise GeometryError("etch_depth must lie in [0, ln_thickness]")
    if p["bragg_radius"] >= 0.5 * p["beam_width"]:
        raise GeometryError("bragg_radius must be smaller than half the beam width (holes breach beam)")
    if p["bragg_count"] < 0:
        raise GeometryError("bragg_count must be >= 0")
    if p["bragg_count"] > 1 and 2 * p["bragg_radius"] >= p["bragg_period"]:
        raise GeometryError("bragg holes overlap: need 2*radius < period")
    if not 0 <= p["taper_tip"] < p["beam_width"]:
        raise GeometryError("taper_tip must lie in [0, beam_width)")
    if p["beam_width"] > p["ln_width"]:
        raise GeometryError("beam_width must not exceed ln_width")


def build_paper_device(**overrides):
    """Top view of the hybrid device with the reference dimensions as defaults.

    Along +x: lead-in LN strip, Bragg hole array, straight InP section with
    the emitter at its centre, linear taper, lead-out LN strip. The strip
    runs along y = 0. Regions are effective-index materials from
    :func:`effective_indices`.
    """
    unknown = set(overrides) - set(DEVICE_DEFAULTS)
    if unknown:
        raise GeometryError(f"unknown device parameters: {sorted(unknown)}")
    p = dict(DEVICE_DEFAULTS)
    p.update(overrides)
    check_device_params(p)
    eff = effective_indices(p)
    wb, wl = p["beam_width"], p["ln_width"]
    nb = p["bragg_count"]
    bragg_len = nb * p["bragg_period"]
    x = 0.0
    x_beam0 = p["lead_in"]
    x_bragg_end = x_beam0 + bragg_len
    x_taper0 = x_bragg_end + p["beam_length"]
    x_taper1 = x_taper0 + p["taper_length"]
    x_end = x_taper1 + p["lead_out"]
    half_y = 0.5 * wl + p["margin"]
    shapes = [Shape("rectangle", (x, -0.5 * wl), (x_end - x, wl), eff["ridge"])]
    shapes.append(Shape("rectangle", (x_beam0, -0.5 * wb), (x_taper0 - x_beam0, wb), eff["hybrid"]))
    if p["taper_length"] > 0:
        shapes.append(Shape("linear_taper", (x_taper0, -0.5 * wb), (p["taper_length"], wb), eff["hybrid"],
                            widths=(wb, p["taper_tip"])))
    if nb > 0:
        shapes.append(Shape("hole_array", (x_beam0 + 0.5 * p["bragg_period"], 0.0), (bragg_len, 2 * p["bragg_radius"]),
                            eff["ridge"], period=p["bragg_period"], radius=p["bragg_radius"], count=nb))
    markers = {
        "emitter": (0.5 * (x_bragg_end + x_taper0), 0.0),
        "beam_start": x_beam0,
        "bragg_end": x_bragg_end,
        "taper_start": x_taper0,
        "taper_end": x_taper1,
        "params": {k: v for k, v in p.items()},
    }
    return DeviceGeometry(tuple(shapes), eff["slab"], (x, x_end, -half_y, half_y), markers)


# --- side views ------------------------------------------------------------

SIDE_DEFAULTS = {
    "taper_slices": 100,
    "box_thickness": 2e-6,
    "grating_period": 700e-9,
    "grating_duty": 0.5,
    "grating_teeth": 20,
    "grating_etch": None,  # None: same as the LN ridge etch depth
    "grating_lead_in": 4e-6,
    "grating_lead_out": 4e-6,
}


def lateral_index(n_core, width, wavelength, clad=1.0, polarization="TM"):
    """Fundamental-mode index of a strip of ``width`` in ``clad`` (lateral line cut).

    A vanishing strip returns the cladding index.
    """
    if width <= 0:
        return clad
    prof = modesolver.IndexProfile.from_layers(clad, [(n_core, width)], clad)
    modes = modesolver.solve_slab_modes(prof, wavelength, polarization)
    return modes[0].n_eff if modes else clad


def side_indices(params=None):
    """Lateral effective indices of the LN ridge and of an InP strip of width w.

    Returns ``(n_ln, f)`` where ``f(w)`` gives the InP index for width ``w``.
    The in-plane E field is normal to the strip side walls, so the lateral
    line cut is solved for TM.
    """
    p = dict(DEVICE_DEFAULTS)
    p.update(params or {})
    mats = materials(p["indices"], p["wavelength"])
    lam = p["wavelength"]
    n_ln = lateral_index(mats["LiNbO3"].refractive_index, p["ln_width"], lam)
    n_inp = mats["InP"].refractive_index

    def inp(w):
        return lateral_index(n_inp, w, lam)

    return n_ln, inp


def vertical_profile(params, width):
    """Vertical index profile (oxide | LN | InP of lateral width ``width`` | air).

    ``y = 0`` is the oxide/LN interface. A zero width drops the InP layer.
    """
    p = dict(DEVICE_DEFAULTS)
    p.update(params or {})
    mats = materials(p["indices"], p["wavelength"])
    n_ln, inp = side_indices(p)
    n_ox = mats["SiO2"].refractive_index
    t = p["ln_thickness"]
    ni = inp(width)
    if ni <= 1.0 + 1e-12:
        return modesolver.IndexProfile((n_ox, n_ln, 1.0), (0.0, t))
    return modesolver.IndexProfile((n_ox, n_ln, ni, 1.0), (0.0, t, t + p["beam_thickness"]))


def _split(overrides):
    unknown = set(overrides) - set(DEVICE_DEFAULTS) - set(SIDE_DEFAULTS)
    if unknown:
        raise GeometryError(f"unknown device parameters: {sorted(unknown)}")
    p = dict(DEVICE_DEFAULTS)
    p.update(SIDE_DEFAULTS)
    p.update(overrides)
    check_device_params(p)
    return p


def build_taper_side_view(**overrides):
    """Side (x-z) cross-section of the InP-to-LN taper.

    The vertical axis of the returned geometry is y; the oxide fills y < 0,
    the LN film 0 < y < t_LN and the InP beam sits on top. Each layer uses
    its lateral effective index, so the InP layer index follows the taper
    width along x (``taper_slices`` uniform steps).
    """
    p = _split(overrides)
    mats = materials(p["indices"], p["wavelength"])
    n_ln, inp = side_indices(p)
    t, tb = p["ln_thickness"], p["beam_thickness"]
    x_t0 = p["lead_in"] + p["beam_length"]
    x_t1 = x_t0 + p["taper_length"]
    x_end = x_t1 + p["lead_out"]
    m = p["margin"]
    lam = p["wavelength"]
    air = mats["vacuum"]
    ln = Material("LN lateral", n_ln, lam)
    shapes = [
        Shape("rectangle", (0.0, -m), (x_end, m), mats["SiO2"]),
        Shape("rectangle", (0.0, 0.0), (x_end, t), ln),
        Shape("rectangle", (0.0, t), (x_t0, tb), Material("InP lateral", inp(p["beam_width"]), lam)),
    ]
    if p["taper_length"] > 0:
        ns = int(p["taper_slices"])
        if ns < 1:
            raise GeometryError("taper_slices must be >= 1")
        w0, w1 = p["beam_width"], p["taper_tip"]
        grades = tuple(inp(w0 + (w1 - w0) * (k + 0.5) / ns) for k in range(ns))
        shapes.append(Shape("graded_strip", (x_t0, t), (p["taper_length"], tb),
                            Material("InP lateral", inp(w0), lam), grades=grades))
    markers = {
        "taper_start": x_t0,
        "taper_end": x_t1,
        "beam_top": t + tb,
        "params": dict(p),
    }
    return DeviceGeometry(tuple(shapes), air, (0.0, x_end, -m, t + tb + m), markers)


def build_grating_side_view(**overrides):
    """Side (x-z) cross-section of the LN grating coupler.

    Layers from the bottom: Si substrate, buried oxide, LN film (lateral
    effective index of the ridge), air. ``grating_teeth`` grooves of depth
    ``grating_etch`` are cut from the top of the film.
    """
    p = _split(overrides)
    mats = materials(p["indices"], p["wavelength"])
    n_ln, _ = side_indices(p)
    lam = p["wavelength"]
    t = p["ln_thickness"]
    etch = p["etch_depth"] if p["grating_etch"] is None else p["grating_etch"]
    if not 0 < etch <= t:
        raise GeometryError("grating_etch must lie in (0, ln_thickness]")
    if not 0 < p["grating_duty"] < 1:
        raise GeometryError("grating_duty must lie in (0, 1)")
    nt = int(p["grating_teeth"])
    if nt < 0:
        raise GeometryError("grating_teeth must be >= 0")
    period = p["grating_period"]
    box = p["box_thickness"]
    x_g0 = p["grating_lead_in"]
    x_g1 = x_g0 + nt * period
    x_end = x_g1 + p["grating_lead_out"]
    m = p["margin"]
    air = mats["vacuum"]
    y_lo = -box - m
    shapes = [
        Shape("rectangle", (0.0, y_lo), (x_end, m), mats["Si"]),
        Shape("rectangle", (0.0, -box), (x_end, box), mats["SiO2"]),
        Shape("rectangle", (0.0, 0.0), (x_end, t), Material("LN lateral", n_ln, lam)),
    ]
    if nt > 0:
        # grooves: the unetched tooth is the duty fraction of each period
        shapes.append(Shape("tooth_array", (x_g0 + p["grating_duty"] * period, t - etch), (0.0, etch), air,
                            period=period, count=nt, duty=1 - p["grating_duty"]))
    markers = {
        "grating_start": x_g0,
        "grating_end": x_g1,
        "surface": t,
        "box": box,
        "etch": etch,
        "params": dict(p),
    }
    return DeviceGeometry(tuple(shapes), air, (0.0, x_end, y_lo, t + m), markers)


def build_straight_beam(length, holes_at=None, **overrides):
    """Top view of a uniform InP-on-LN beam crossing the whole domain.

    Used for port-fed and emitter measurements without end facets. With
    ``holes_at`` set, the Bragg hole array (``bragg_*`` parameters) starts
    at that x (left edge of the first period).
    """
    unknown = set(overrides) - set(DEVICE_DEFAULTS)
    if unknown:
        raise GeometryError(f"unknown device parameters: {sorted(unknown)}")
    p = dict(DEVICE_DEFAULTS)
    p.update(overrides)
    check_device_params(p)
    if length <= 0:
        raise GeometryError("length must be positive")
    eff = effective_indices(p)
    wb, wl = p["beam_width"], p["ln_width"]
    half_y = 0.5 * wl + p["margin"]
    shapes = [
        Shape("rectangle", (0.0, -0.5 * wl), (length, wl), eff["ridge"]),
        Shape("rectangle", (0.0, -0.5 * wb), (length, wb), eff["hybrid"]),
    ]
    nb = p["bragg_count"]
    markers = {"params": dict(p)}
    if holes_at is not None and nb > 0:
        per = p["bragg_period"]
        if holes_at < 0 or holes_at + nb * per > length:
            raise GeometryError("hole array does not fit inside the beam")
        shapes.append(Shape("hole_array", (holes_at + 0.5 * per, 0.0), (nb * per, 2 * p["bragg_radius"]),
                            eff["ridge"], period=per, radius=p["bragg_radius"], count=nb))
        markers["bragg_start"] = holes_at
        markers["bragg_end"] = holes_at + nb * per
    return DeviceGeometry(tuple(shapes), eff["slab"], (0.0, length, -half_y, half_y), markers)


def line_cut(emap, x):
    """Piecewise-constant index profile along y through the column at ``x``.

    Runs of equal cells merge into layers; the first and last runs become
    semi-infinite claddings. Returns ``None`` for a uniform column.
    """
    i = min(max(int(np.floor((x - emap.x0) / emap.dx)), 0), emap.nx - 1)
    n = np.sqrt(emap.eps[i])
    change = np.flatnonzero(n[1:] != n[:-1]) + 1
    if len(change) == 0:
        return None
    edges = tuple(float(emap.y0 + k * emap.dy) for k in change)
    starts = np.concatenate(([0], change))
    return modesolver.IndexProfile(tuple(float(n[k]) for k in starts), edges)
