"""Pure-numpy implementations of the compiled kernels.

Every function mirrors its counterpart in ``_yee.pyx`` / ``_coinc.pyx``
argument for argument, with the same per-cell floating-point operation order,
so the two backends agree to round-off (bit-exactly for the coincidence
counter).
"""

import numpy as np


def _slabs(lo, hi, start, stop):
    """Index slices of the two PML slabs clipped to [start, stop)."""
    out = []
    a, b = start, min(lo, stop)
    if b > a:
        out.append(slice(a, b))
    a, b = max(hi, start), stop
    if b > a:
        out.append(slice(a, b))
    return out


def update_h_te(ez, hx, hy, ch, rdx, rdy, kxh, kyh, psi_hyx, psi_hxy,
                bxh, cxh, byh, cyh, xlo, xhi, ylo, yhi, periodic_y):
    nx, ny = ez.shape
    if periodic_y:
        d = np.roll(ez, -1, axis=1) - ez
        hx[:, :] = hx - ch * ((kyh[None, :] * d) * rdy)
    else:
        d = ez[:, 1:] - ez[:, :-1]
        hx[:, :-1] = hx[:, :-1] - ch * ((kyh[None, :-1] * d) * rdy)
    d = ez[1:, :] - ez[:-1, :]
    hy[:-1, :] = hy[:-1, :] + ch * ((kxh[:-1, None] * d) * rdx)
    if not periodic_y:
        for s in _slabs(ylo, yhi, 0, ny - 1):
            d = ez[:, s.start + 1:s.stop + 1] - ez[:, s]
            psi_hxy[:, s] = byh[None, s] * psi_hxy[:, s] + cyh[None, s] * d
            hx[:, s] = hx[:, s] - ch * (psi_hxy[:, s] * rdy)
    for s in _slabs(xlo, xhi, 0, nx - 1):
        d = ez[s.start + 1:s.stop + 1, :] - ez[s, :]
        psi_hyx[s, :] = bxh[s, None] * psi_hyx[s, :] + cxh[s, None] * d
        hy[s, :] = hy[s, :] + ch * (psi_hyx[s, :] * rdx)


def update_e_te(ez, hx, hy, ce, rdx, rdy, kxe, kye, psi_ezx, psi_ezy,
                bxe, cxe, bye, cye, xlo, xhi, ylo, yhi, periodic_y):
    nx, ny = ez.shape
    if periodic_y:
        js = slice(0, ny)
        dhx = (hx - np.roll(hx, 1, axis=1))[1:-1, :]
    else:
        js = slice(1, ny - 1)
        dhx = hx[1:-1, 1:-1] - hx[1:-1, :-2]
    dhy = hy[1:-1, js] - hy[:-2, js]
    ez[1:-1, js] = ez[1:-1, js] + ce[1:-1, js] * (
        (kxe[1:-1, None] * dhy) * rdx - (kye[None, js] * dhx) * rdy)
    for s in _slabs(xlo, xhi, 1, nx - 1):
        dhy = hy[s, js] - hy[s.start - 1:s.stop - 1, js]
        psi_ezx[s, js] = bxe[s, None] * psi_ezx[s, js] + cxe[s, None] * dhy
        ez[s, js] = ez[s, js] + ce[s, js] * (psi_ezx[s, js] * rdx)
    if not periodic_y:
        for s in _slabs(ylo, yhi, 1, ny - 1):
            dhx = hx[1:-1, s] - hx[1:-1, s.start - 1:s.stop - 1]
            psi_ezy[1:-1, s] = bye[None, s] * psi_ezy[1:-1, s] + cye[None, s] * dhx
            ez[1:-1, s] = ez[1:-1, s] - ce[1:-1, s] * (psi_ezy[1:-1, s] * rdy)


def update_h_tm(hz, ex, ey, ch, rdx, rdy, kxh, kyh, psi_hzx, psi_hzy,
                bxh, cxh, byh, cyh, xlo, xhi, ylo, yhi, periodic_y):
    nx, ny = hz.shape
    jend = ny if periodic_y else ny - 1
    js = slice(0, jend)
    if periodic_y:
        dex = (np.roll(ex, -1, axis=1) - ex)[:-1, :]
    else:
        dex = ex[:-1, 1:] - ex[:-1, :-1]
    dey = ey[1:, js] - ey[:-1, js]
    hz[:-1, js] = hz[:-1, js] + ch * (
        (kyh[None, js] * dex) * rdy - (kxh[:-1, None] * dey) * rdx)
    if not periodic_y:
        for s in _slabs(ylo, yhi, 0, jend):
            dex = ex[:-1, s.start + 1:s.stop + 1] - ex[:-1, s]
            psi_hzy[:-1, s] = byh[None, s] * psi_hzy[:-1, s] + cyh[None, s] * dex
            hz[:-1, s] = hz[:-1, s] + ch * (psi_hzy[:-1, s] * rdy)
    for s in _slabs(xlo, xhi, 0, nx - 1):
        dey = ey[s.start + 1:s.stop + 1, js] - ey[s, js]
        psi_hzx[s, js] = bxh[s, None] * psi_hzx[s, js] + cxh[s, None] * dey
        hz[s, js] = hz[s, js] - ch * (psi_hzx[s, js] * rdx)


def update_e_tm(hz, ex, ey, cex, cey, rdx, rdy, kxe, kye, psi_eyx, psi_exy,
                bxe, cxe, bye, cye, xlo, xhi, ylo, yhi, periodic_y):
    nx, ny = hz.shape
    if periodic_y:
        j01 = slice(0, ny)
        jend = slice(0, ny)
        d = (hz - np.roll(hz, 1, axis=1))[:-1, :]
    else:
        j01 = slice(1, ny - 1)
        jend = slice(0, ny - 1)
        d = hz[:-1, 1:-1] - hz[:-1, :-2]
    ex[:-1, j01] = ex[:-1, j01] + cex[:-1, j01] * ((kye[None, j01] * d) * rdy)
    d = hz[1:-1, jend] - hz[:-2, jend]
    ey[1:-1, jend] = ey[1:-1, jend] - cey[1:-1, jend] * ((kxe[1:-1, None] * d) * rdx)
    if not periodic_y:
        for s in _slabs(ylo, yhi, 1, ny - 1):
            d = hz[:-1, s] - hz[:-1, s.start - 1:s.stop - 1]
            psi_exy[:-1, s] = bye[None, s] * psi_exy[:-1, s] + cye[None, s] * d
            ex[:-1, s] = ex[:-1, s] + cex[:-1, s] * (psi_exy[:-1, s] * rdy)
    for s in _slabs(xlo, xhi, 1, nx - 1):
        d = hz[s, jend] - hz[s.start - 1:s.stop - 1, jend]
        psi_eyx[s, jend] = bxe[s, None] * psi_eyx[s, jend] + cxe[s, None] * d
        ey[s, jend] = ey[s, jend] - cey[s, jend] * (psi_eyx[s, jend] * rdx)


def coincidence_counts(a, b, bin_width, nhalf):
    nbins = 2 * nhalf + 1
    half = nhalf + 0.5
    counts = np.zeros(nbins, dtype=np.int64)
    if len(a) == 0 or len(b) == 0:
        return counts
    # conservative window; exact inclusion is decided by the bin index below
    reach = (half + 1.0) * bin_width
    lo = np.searchsorted(b, a - reach, side="left")
    hi = np.searchsorted(b, a + reach, side="right")
    width = hi - lo
    for k in range(int(width.max()) if len(width) else 0):
        sel = width > k
        x = (b[lo[sel] + k] - a[sel]) / bin_width + half
        x = x[(x >= 0.0) & (x < nbins)]
        counts += np.bincount(np.floor(x).astype(np.int64), minlength=nbins)
    return counts
