"""2D Yee-grid FDTD with CPML boundaries, soft sources and DFT line monitors.

Polarizations follow the field triplet simulated:

* ``"TE"``: (Ez, Hx, Hy), electric field out of the simulation plane.
* ``"TM"``: (Hz, Ex, Ey), electric field in the plane.

Grid convention: permittivity cell ``(i, j)`` is centred at
``x0 + (i + 1/2) dx``; an integer Yee index sits at a cell centre and a
half-integer index on the cell face to its upper side.

Timing: after ``n`` steps E is known at ``n dt`` and H at ``(n - 1/2) dt``.
Sources are injected with the E update at time ``(n - 1/2) dt``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .. import _core
from ..modesolver import C0, EPS0, ETA0, MU0

log = logging.getLogger(__name__)

COURANT = 0.7
MIN_PML_CELLS = 8
MIN_CELLS_PER_WAVELENGTH = 15


class FDTDError(RuntimeError):
    pass


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class PML:
    cells: int = 12
    order: float = 3.0
    kappa_max: float = 5.0
    alpha_max: float = 0.0
    sigma_scale: float = 1.0


@dataclass(frozen=True)
class GaussianPulse:
    """Modulated Gaussian: exp(-((t - t0)/tau)^2) sin(w0 (t - t0)).

    ``bandwidth`` is the fractional frequency half-width at which the
    spectral amplitude falls to 1/e.
    """

    wavelength: float
    bandwidth: float = 0.1
    delay: float = 4.0

    @property
    def omega(self):
        return 2 * np.pi * C0 / self.wavelength

    @property
    def tau(self):
        return 2.0 / (self.bandwidth * self.omega)

    @property
    def t0(self):
        return self.delay * self.tau

    @property
    def t_end(self):
        return self.t0 + self.delay * self.tau

    def __call__(self, t):
        s = (t - self.t0) / self.tau
        return math.exp(-s * s) * math.sin(self.omega * (t - self.t0))


@dataclass(frozen=True)
class ContinuousWave:
    """sin(w0 t) switched on with a smooth ramp of ``ramp`` periods."""

    wavelength: float
    ramp: float = 10.0

    @property
    def omega(self):
        return 2 * np.pi * C0 / self.wavelength

    @property
    def t_end(self):
        return math.inf

    def __call__(self, t):
        tr = self.ramp * 2 * np.pi / self.omega
        r = 1.0 if t >= tr else 0.5 * (1 - math.cos(np.pi * t / tr))
        return r * math.sin(self.omega * t)


@dataclass(frozen=True)
class PlaneWave:
    """Uniform transverse profile for a ``mode_port`` (a plane-wave port
    when the port spans a periodic domain)."""

    polarization: str

    def field_at(self, y):
        return np.ones_like(np.asarray(y, dtype=float))

    def efield_factor(self, y):
        return np.ones_like(np.asarray(y, dtype=float))


@dataclass(frozen=True)
class Source:
    """A soft current source.

    ``point_dipole``: ``position`` = (x, y); TM dipoles are oriented by
    ``angle`` in degrees from +x (90 = along y).
    ``mode_port``: a line at ``position[0]`` spanning ``span`` in y
    carrying a transverse current shaped like the stored field of ``mode``
    (E for TE, H for TM); lateral coordinates of the mode are absolute y.
    """

    kind: str
    position: tuple
    envelope: object
    amplitude: float = 1.0
    angle: float = 90.0
    mode: object = None
    span: tuple = None

    def __post_init__(self):
        if self.kind not in ("point_dipole", "mode_port"):
            raise SpecError(f"unknown source kind {self.kind!r}")
        if self.kind == "mode_port" and self.mode is None:
            raise SpecError("mode_port source needs a mode")


@dataclass(frozen=True)
class LineMonitor:
    """Frequency-domain monitor on a grid line.

    ``normal`` is the axis the line is perpendicular to; ``position`` its
    coordinate along that axis and ``span`` its extent along the other.
    """

    name: str
    normal: str
    position: float
    span: tuple

    def __post_init__(self):
        if self.normal not in ("x", "y"):
            raise SpecError("monitor normal must be 'x' or 'y'")


@dataclass(frozen=True)
class Stop:
    max_steps: int = 200_000
    decay: float = 1e-5
    fixed_steps: int | None = None
    check_every: int = 100


@dataclass(frozen=True, eq=False)
class SimulationSpec:
    eps_map: object
    polarization: str
    frequencies: tuple
    sources: tuple = ()
    monitors: tuple = ()
    pml: PML = PML()
    boundary_x: str = "pml"
    boundary_y: str = "pml"
    courant: float = COURANT
    stop: Stop = Stop()
    field_dft_frequency: float | None = None
    field_dft_stride: int = 4

    @property
    def dx(self):
        return self.eps_map.dx

    @property
    def dy(self):
        return self.eps_map.dy

    @property
    def dt_limit(self):
        return 1.0 / (C0 * math.sqrt(self.dx**-2 + self.dy**-2))

    @property
    def dt(self):
        return self.courant * self.dt_limit


def validate(spec):
    """Raise :class:`SpecError` for any inconsistency; nothing is simulated."""
    if spec.polarization not in ("TE", "TM"):
        raise SpecError(f"polarization must be 'TE' or 'TM', got {spec.polarization!r}")
    if not 0 < spec.courant <= 1.0:
        raise SpecError(f"Courant factor {spec.courant} outside (0, 1]: dt above the stability limit")
    if spec.boundary_x not in ("pml", "pec"):
        raise SpecError("boundary_x must be 'pml' or 'pec'")
    if spec.boundary_y not in ("pml", "pec", "periodic"):
        raise SpecError("boundary_y must be 'pml', 'pec' or 'periodic'")
    uses_pml = "pml" in (spec.boundary_x, spec.boundary_y)
    if uses_pml and spec.pml.cells < MIN_PML_CELLS:
        raise SpecError(f"PML needs >= {MIN_PML_CELLS} cells, got {spec.pml.cells}")
    eps = spec.eps_map.eps
    if not np.all(np.isfinite(eps)) or eps.min() < 1.0:
        raise SpecError("permittivity must be finite and >= 1")
    nx, ny = eps.shape
    n_edge = 2 * spec.pml.cells + 4
    if spec.boundary_x == "pml" and nx < n_edge:
        raise SpecError("grid too small in x for the PML")
    if spec.boundary_y == "pml" and ny < n_edge:
        raise SpecError("grid too small in y for the PML")
    if len(spec.frequencies) == 0 and spec.monitors:
        raise SpecError("monitors need at least one frequency")
    n_max = math.sqrt(eps.max())
    for s in spec.sources:
        lam = s.envelope.wavelength
        cells = lam / n_max / max(spec.dx, spec.dy)
        if cells < MIN_CELLS_PER_WAVELENGTH:
            raise SpecError(
                f"source wavelength {lam:.4g} m resolved by only {cells:.1f} cells in the densest "
                f"material; need >= {MIN_CELLS_PER_WAVELENGTH}")
        i, j = spec.eps_map.index_of(*_source_anchor(s, spec))
        if not (0 <= i < nx and 0 <= j < ny):
            raise SpecError(f"source at {s.position} lies outside the grid")
        if _in_pml(i, j, spec):
            raise SpecError(f"source at {s.position} lies inside the PML")
    names = set()
    for m in spec.monitors:
        if m.name in names:
            raise SpecError(f"duplicate monitor name {m.name!r}")
        names.add(m.name)
        _monitor_indices(m, spec)
    return True


def _source_anchor(s, spec):
    if s.kind == "mode_port":
        lo, hi = s.span
        return s.position[0], 0.5 * (lo + hi)
    return s.position


def _in_pml(i, j, spec):
    n = spec.pml.cells
    nx, ny = spec.eps_map.eps.shape
    if spec.boundary_x == "pml" and (i < n or i >= nx - n):
        return True
    return spec.boundary_y == "pml" and (j < n or j >= ny - n)


def _pml_profiles(n_cells, npml, delta, dt, pml, active):
    """CPML (kinv, b, c) on integer (E) and half-integer (H) nodes of one axis."""
    out = {}
    for key, off in (("e", 0.0), ("h", 0.5)):
        pos = np.arange(n_cells) + off
        d = np.zeros(n_cells)
        if active:
            d = np.maximum(d, (npml - pos) / npml)
            d = np.maximum(d, (pos - (n_cells - 1 - npml)) / npml)
            d = np.clip(d, 0.0, 1.0)
        g = d**pml.order
        sigma_max = pml.sigma_scale * 0.8 * (pml.order + 1) / (ETA0 * delta)
        sigma = sigma_max * g
        kappa = 1.0 + (pml.kappa_max - 1.0) * g
        alpha = np.where(d > 0, pml.alpha_max * (1.0 - d), 0.0)
        b = np.exp(-(sigma / kappa + alpha) * dt / EPS0)
        den = sigma * kappa + kappa**2 * alpha
        c = np.where(sigma > 0, sigma / np.where(den > 0, den, 1.0) * (b - 1.0), 0.0)
        out[key] = (np.ascontiguousarray(1.0 / kappa), np.ascontiguousarray(b), np.ascontiguousarray(c))
    return out


def _monitor_indices(m, spec):
    """Snap a monitor to grid indices: (fixed index, lo, hi) inclusive range."""
    em = spec.eps_map
    nx, ny = em.eps.shape
    if m.normal == "x":
        k = int(round((m.position - em.x0) / em.dx - 0.5))
        lo = int(math.ceil((m.span[0] - em.y0) / em.dy - 0.5 - 1e-9))
        hi = int(math.floor((m.span[1] - em.y0) / em.dy - 0.5 + 1e-9))
        nfix, nrun = nx, ny
    else:
        k = int(round((m.position - em.y0) / em.dy - 0.5))
        lo = int(math.ceil((m.span[0] - em.x0) / em.dx - 0.5 - 1e-9))
        hi = int(math.floor((m.span[1] - em.x0) / em.dx - 0.5 + 1e-9))
        nfix, nrun = ny, nx
    if not (1 <= k < nfix - 1) or lo < 0 or hi > nrun - 1 or hi < lo:
        raise SpecError(f"monitor {m.name!r} does not fit inside the grid")
    return k, lo, hi


@dataclass
class FieldState:
    """Field arrays, CPML memory and the step counter of one run."""

    fields: dict
    psi: dict
    step: int = 0
    energy: float = 0.0

    def copy(self):
        return FieldState({k: v.copy() for k, v in self.fields.items()},
                          {k: v.copy() for k, v in self.psi.items()}, self.step, self.energy)


class _Prepared:
    """Coefficient arrays and index tables derived once from a spec."""

    def __init__(self, spec, backend=None):
        validate(spec)
        self.spec = spec
        self.k = _core.get_backend(backend) if backend else _core
        em = spec.eps_map
        self.nx, self.ny = em.eps.shape
        self.dt = spec.dt
        self.rdx = 1.0 / em.dx
        self.rdy = 1.0 / em.dy
        self.ch = self.dt / MU0
        eps = np.ascontiguousarray(em.eps, dtype=float)
        self.periodic = spec.boundary_y == "periodic"
        if spec.polarization == "TE":
            self.eps_e = {"ez": eps}
        else:
            ex = eps.copy()
            ex[:-1, :] = 0.5 * (eps[:-1, :] + eps[1:, :])
            ey = eps.copy()
            if self.periodic:
                ey = 0.5 * (eps + np.roll(eps, -1, axis=1))
            else:
                ey[:, :-1] = 0.5 * (eps[:, :-1] + eps[:, 1:])
            self.eps_e = {"ex": ex, "ey": ey}
        self.ce = {k: np.ascontiguousarray(self.dt / (EPS0 * v)) for k, v in self.eps_e.items()}
        npml = spec.pml.cells
        px = _pml_profiles(self.nx, npml, em.dx, self.dt, spec.pml, spec.boundary_x == "pml")
        py = _pml_profiles(self.ny, npml, em.dy, self.dt, spec.pml, spec.boundary_y == "pml")
        self.px, self.py = px, py
        if spec.boundary_x == "pml":
            self.xlo, self.xhi = npml + 1, self.nx - npml - 2
        else:
            self.xlo, self.xhi = 0, self.nx
        if spec.boundary_y == "pml":
            self.ylo, self.yhi = npml + 1, self.ny - npml - 2
        else:
            self.ylo, self.yhi = 0, self.ny
        self._prepare_sources()
        self._prepare_monitors()

    # -- sources --------------------------------------------------------
    def _prepare_sources(self):
        em = self.spec.eps_map
        self.src = []
        for s in self.spec.sources:
            if s.kind == "point_dipole":
                x, y = s.position
                if self.spec.polarization == "TE":
                    i, j = em.index_of(x, y)
                    self.src.append(("ez", np.array([i]), np.array([j]), np.array([1.0]), s))
                else:
                    a = math.radians(s.angle)
                    ax, ay = math.cos(a), math.sin(a)
                    if abs(ay) > 1e-12:
                        i = int(round((x - em.x0) / em.dx - 0.5))
                        j = int(round((y - em.y0) / em.dy - 1.0))
                        self.src.append(("ey", np.array([i]), np.array([j]), np.array([ay]), s))
                    if abs(ax) > 1e-12:
                        i = int(round((x - em.x0) / em.dx - 1.0))
                        j = int(round((y - em.y0) / em.dy - 0.5))
                        self.src.append(("ex", np.array([i]), np.array([j]), np.array([ax]), s))
            else:
                i = int(round((s.position[0] - em.x0) / em.dx - 0.5))
                lo, hi = s.span
                if self.spec.polarization == "TE":
                    comp = "ez"
                    j = np.arange(self.ny)
                    yj = em.y0 + (j + 0.5) * em.dy
                else:
                    comp = "ey"
                    j = np.arange(self.ny)
                    yj = em.y0 + (j + 1.0) * em.dy
                sel = (yj >= lo) & (yj <= hi)
                j, yj = j[sel], yj[sel]
                # current sheet shaped like the stored field (E for TE, H for
                # TM): by mode orthogonality it excites no other mode
                prof = s.mode.field_at(yj)
                prof = prof / np.abs(prof).max()
                self.src.append((comp, np.full(len(j), i), j, prof, s))

    # -- monitors -------------------------------------------------------
    def _prepare_monitors(self):
        em = self.spec.eps_map
        pol = self.spec.polarization
        self.mon = []
        e_idx, h_idx_a, h_idx_b = {}, {}, {}
        for m in self.spec.monitors:
            k, lo, hi = _monitor_indices(m, self.spec)
            run = np.arange(lo, hi + 1)
            if m.normal == "x":
                i = np.full(len(run), k)
                if pol == "TE":
                    e = ("ez", i, run)
                    ha = ("hy", i - 1, run)
                    hb = ("hy", i, run)
                    pos = em.y0 + (run + 0.5) * em.dy
                    sgn = -1.0
                else:
                    e = ("ey", i, run)
                    ha = ("hz", i - 1, run)
                    hb = ("hz", i, run)
                    pos = em.y0 + (run + 1.0) * em.dy
                    sgn = 1.0
                dl = em.dy
                coord = em.x0 + (k + 0.5) * em.dx
            else:
                j = np.full(len(run), k)
                if pol == "TE":
                    e = ("ez", run, j)
                    ha = ("hx", run, j - 1)
                    hb = ("hx", run, j)
                    pos = em.x0 + (run + 0.5) * em.dx
                    sgn = 1.0
                else:
                    e = ("ex", run, j)
                    ha = ("hz", run, j - 1)
                    hb = ("hz", run, j)
                    pos = em.x0 + (run + 1.0) * em.dx
                    sgn = -1.0
                dl = em.dx
                coord = em.y0 + (k + 0.5) * em.dy
            self.mon.append(dict(monitor=m, e=e, ha=ha, hb=hb, pos=pos, sgn=sgn, dl=dl, coord=coord))
        # group gathers by component into flat index vectors
        self.gather_e, self.gather_h = [], []
        off_e = 0
        for rec in self.mon:
            comp, i, j = rec["e"]
            rec["slice"] = slice(off_e, off_e + len(i))
            off_e += len(i)
            self.gather_e.append((comp, np.ravel_multi_index((i, j), (self.nx, self.ny))))
            ca, ia, ja = rec["ha"]
            cb, ib, jb = rec["hb"]
            self.gather_h.append((ca, np.ravel_multi_index((ia, ja), (self.nx, self.ny)),
                                  np.ravel_multi_index((ib, jb), (self.nx, self.ny))))
        self.n_mon = off_e

    def new_state(self):
        shape = (self.nx, self.ny)
        if self.spec.polarization == "TE":
            names, pnames = ("ez", "hx", "hy"), ("hyx", "hxy", "ezx", "ezy")
        else:
            names, pnames = ("hz", "ex", "ey"), ("hzx", "hzy", "eyx", "exy")
        return FieldState({n: np.zeros(shape) for n in names}, {n: np.zeros(shape) for n in pnames})

    # -- stepping -------------------------------------------------------
    def update_h(self, st):
        f, p = st.fields, st.psi
        kxh, bxh, cxh = self.px["h"]
        kyh, byh, cyh = self.py["h"]
        if self.spec.polarization == "TE":
            self.k.update_h_te(f["ez"], f["hx"], f["hy"], self.ch, self.rdx, self.rdy, kxh, kyh,
                               p["hyx"], p["hxy"], bxh, cxh, byh, cyh,
                               self.xlo, self.xhi, self.ylo, self.yhi, self.periodic)
        else:
            self.k.update_h_tm(f["hz"], f["ex"], f["ey"], self.ch, self.rdx, self.rdy, kxh, kyh,
                               p["hzx"], p["hzy"], bxh, cxh, byh, cyh,
                               self.xlo, self.xhi, self.ylo, self.yhi, self.periodic)

    def update_e(self, st):
        f, p = st.fields, st.psi
        kxe, bxe, cxe = self.px["e"]
        kye, bye, cye = self.py["e"]
        if self.spec.polarization == "TE":
            self.k.update_e_te(f["ez"], f["hx"], f["hy"], self.ce["ez"], self.rdx, self.rdy, kxe, kye,
                               p["ezx"], p["ezy"], bxe, cxe, bye, cye,
                               self.xlo, self.xhi, self.ylo, self.yhi, self.periodic)
        else:
            self.k.update_e_tm(f["hz"], f["ex"], f["ey"], self.ce["ex"], self.ce["ey"], self.rdx, self.rdy,
                               kxe, kye, p["eyx"], p["exy"], bxe, cxe, bye, cye,
                               self.xlo, self.xhi, self.ylo, self.yhi, self.periodic)

    def inject(self, st, t):
        for comp, i, j, prof, s in self.src:
            a = s.amplitude * s.envelope(t)
            if a != 0.0:
                st.fields[comp][i, j] -= self.ce[comp][i, j] * (a * prof)

    def energy(self, st):
        """Electromagnetic energy per unit length (J/m) on the whole grid."""
        f = st.fields
        area = self.spec.dx * self.spec.dy
        we = sum(float(np.sum(self.eps_e[k] * f[k] ** 2)) for k in self.eps_e)
        wh = sum(float(np.sum(f[k] ** 2)) for k in f if k.startswith("h"))
        return 0.5 * area * (EPS0 * we + MU0 * wh)

    def check_finite(self, st):
        for name, a in st.fields.items():
            if not np.all(np.isfinite(a)):
                cell = tuple(int(c) for c in np.argwhere(~np.isfinite(a))[0])
                raise FDTDError(f"non-finite {name} at step {st.step}, cell {cell}")


def prepare(spec, backend=None):
    """Validate ``spec`` and build the coefficient tables reused by :func:`step`."""
    return _Prepared(spec, backend)


def initial_state(spec, prepared=None):
    """All-zero fields for ``spec``."""
    return (prepared or _Prepared(spec)).new_state()


def step(state, spec, prepared=None):
    """Advance ``state`` by one leapfrog step and return it.

    Aborts with :class:`FDTDError` if any field value is not finite.
    """
    prep = prepared or _Prepared(spec)
    t_src = (state.step + 0.5) * prep.dt
    prep.update_h(state)
    prep.update_e(state)
    prep.inject(state, t_src)
    state.step += 1
    prep.check_finite(state)
    state.energy = prep.energy(state)
    return state


def discrete_energy(prep, e_state, h_prev):
    """Energy invariant of the leapfrog scheme in a closed lossless box.

    ``1/2 sum eps E^n E^n + 1/2 sum mu H^(n-1/2) H^(n+1/2)``, with ``e_state``
    holding E^n and H^(n+1/2) and ``h_prev`` the H arrays at n-1/2.
    """
    f = e_state.fields
    area = prep.spec.dx * prep.spec.dy
    we = sum(float(np.sum(prep.eps_e[k] * f[k] ** 2)) for k in prep.eps_e)
    wh = sum(float(np.sum(h_prev[k] * f[k])) for k in h_prev)
    return 0.5 * area * (EPS0 * we + MU0 * wh)


@dataclass(eq=False)
class DftMonitor:
    """Accumulated complex spectra on one line.

    ``e`` and ``h`` have shape (n_freq, n_points): the transverse E and H
    components whose product gives the flux through the line, colocated at
    ``positions``. Flux along +normal is ``1/2 Re sum(sign * e * conj(h)) dl``.
    """

    name: str
    normal: str
    coordinate: float
    positions: np.ndarray
    frequencies: np.ndarray
    e: np.ndarray
    h: np.ndarray
    sign: float
    dl: float
    polarization: str


@dataclass(eq=False)
class RunResult:
    frequencies: np.ndarray
    monitors: dict
    steps: int
    converged: bool
    energy_trace: list
    field_dft: np.ndarray | None = None
    field_dft_components: dict = field(default_factory=dict)
    dt: float = 0.0

    @property
    def wavelengths(self):
        return C0 / self.frequencies


def run(spec, backend=None, progress=None):
    """Run until the stop condition and return monitor spectra.

    Deterministic for a given spec and backend. A run that hits the step
    cap before the energy decays returns with ``converged=False``.
    """
    prep = _Prepared(spec, backend)
    st = prep.new_state()
    dt = prep.dt
    freqs = np.asarray(spec.frequencies, dtype=float)
    omega = 2 * np.pi * freqs
    acc_e = np.zeros((len(freqs), prep.n_mon), dtype=complex)
    acc_h = np.zeros((len(freqs), prep.n_mon), dtype=complex)
    ev = np.empty(prep.n_mon)
    hv = np.empty(prep.n_mon)
    flat = {k: v.reshape(-1) for k, v in st.fields.items()}
    e_slices = [rec["slice"] for rec in prep.mon]

    full_dft = None
    if spec.field_dft_frequency is not None:
        w_full = 2 * np.pi * spec.field_dft_frequency
        full_dft = {k: np.zeros(v.shape, dtype=complex) for k, v in st.fields.items() if k.startswith("e")}

    t_off = max((s.envelope.t_end for s in spec.sources), default=0.0)
    stop = spec.stop
    cap = stop.fixed_steps if stop.fixed_steps is not None else stop.max_steps
    peak = 0.0
    trace = []
    converged = stop.fixed_steps is not None
    # E-field DFT phase: e^{-i w n dt}, rotated incrementally per step
    rot = np.exp(-1j * omega * dt)
    ph_e = np.ones(len(freqs), dtype=complex)
    ph_h = np.exp(1j * omega * 0.5 * dt)
    n = 0
    while n < cap:
        prep.update_h(st)
        prep.update_e(st)
        prep.inject(st, (n + 0.5) * dt)
        n += 1
        st.step = n
        ph_e = ph_e * rot
        ph_h = ph_h * rot
        if prep.n_mon:
            for (comp, idx), sl in zip(prep.gather_e, e_slices):
                ev[sl] = flat[comp][idx]
            for (comp, ia, ib), sl in zip(prep.gather_h, e_slices):
                hv[sl] = 0.5 * (flat[comp][ia] + flat[comp][ib])
            acc_e += ph_e[:, None] * ev[None, :]
            acc_h += ph_h[:, None] * hv[None, :]
        if full_dft is not None and n % spec.field_dft_stride == 0:
            ph = np.exp(-1j * w_full * n * dt)
            for k in full_dft:
                full_dft[k] += ph * st.fields[k]
        if n % stop.check_every == 0:
            prep.check_finite(st)
            w = prep.energy(st)
            st.energy = w
            trace.append((n, w))
            peak = max(peak, w)
            if progress:
                progress(n, w, peak)
            if stop.fixed_steps is None and n * dt > t_off and peak > 0 and w < stop.decay * peak:
                converged = True
                break
    prep.check_finite(st)
    if not converged:
        log.warning("run stopped at the step cap (%d) before the field energy decayed", cap)
    monitors = {}
    for rec in prep.mon:
        sl = rec["slice"]
        m = rec["monitor"]
        monitors[m.name] = DftMonitor(
            name=m.name, normal=m.normal, coordinate=rec["coord"], positions=rec["pos"],
            frequencies=freqs, e=acc_e[:, sl] * dt, h=acc_h[:, sl] * dt, sign=rec["sgn"], dl=rec["dl"],
            polarization=spec.polarization)
    intensity = None
    if full_dft is not None:
        intensity = sum(np.abs(v * dt * spec.field_dft_stride) ** 2 for v in full_dft.values())
    return RunResult(freqs, monitors, n, converged, trace, intensity,
                     {k: v * dt * spec.field_dft_stride for k, v in (full_dft or {}).items()}, dt)
