# cython: language_level=3
"""Compiled 2D Yee-grid update kernels with CPML auxiliary fields.

Field layout (index [i, j] -> position in cell units):

    TE  Ez (i, j)          Hx (i, j+1/2)       Hy (i+1/2, j)
    TM  Hz (i+1/2, j+1/2)  Ex (i+1/2, j)       Ey (i, j+1/2)

CPML psi arrays are full size but only touched inside the slabs
``i < xlo`` / ``i >= xhi`` and ``j < ylo`` / ``j >= yhi``. Operation order
per cell matches ``qdln._core.pure`` exactly.
"""

cimport cython


@cython.boundscheck(False)
@cython.wraparound(False)
def update_h_te(double[:, ::1] ez, double[:, ::1] hx, double[:, ::1] hy,
                double ch, double rdx, double rdy,
                double[::1] kxh, double[::1] kyh,
                double[:, ::1] psi_hyx, double[:, ::1] psi_hxy,
                double[::1] bxh, double[::1] cxh,
                double[::1] byh, double[::1] cyh,
                int xlo, int xhi, int ylo, int yhi, bint periodic_y):
    cdef Py_ssize_t nx = ez.shape[0], ny = ez.shape[1]
    cdef Py_ssize_t i, j, jp, jend
    cdef double d
    jend = ny if periodic_y else ny - 1
    with nogil:
        for i in range(nx):
            for j in range(jend):
                jp = j + 1
                if jp == ny:
                    jp = 0
                d = ez[i, jp] - ez[i, j]
                hx[i, j] = hx[i, j] - ch * ((kyh[j] * d) * rdy)
        for i in range(nx - 1):
            for j in range(ny):
                d = ez[i + 1, j] - ez[i, j]
                hy[i, j] = hy[i, j] + ch * ((kxh[i] * d) * rdx)
        if not periodic_y:
            for i in range(nx):
                for j in range(min(ylo, jend)):
                    d = ez[i, j + 1] - ez[i, j]
                    psi_hxy[i, j] = byh[j] * psi_hxy[i, j] + cyh[j] * d
                    hx[i, j] = hx[i, j] - ch * (psi_hxy[i, j] * rdy)
                for j in range(max(yhi, 0), jend):
                    d = ez[i, j + 1] - ez[i, j]
                    psi_hxy[i, j] = byh[j] * psi_hxy[i, j] + cyh[j] * d
                    hx[i, j] = hx[i, j] - ch * (psi_hxy[i, j] * rdy)
        for i in range(nx - 1):
            if i >= xlo and i < xhi:
                continue
            for j in range(ny):
                d = ez[i + 1, j] - ez[i, j]
                psi_hyx[i, j] = bxh[i] * psi_hyx[i, j] + cxh[i] * d
                hy[i, j] = hy[i, j] + ch * (psi_hyx[i, j] * rdx)


@cython.boundscheck(False)
@cython.wraparound(False)
def update_e_te(double[:, ::1] ez, double[:, ::1] hx, double[:, ::1] hy,
                double[:, ::1] ce, double rdx, double rdy,
                double[::1] kxe, double[::1] kye,
                double[:, ::1] psi_ezx, double[:, ::1] psi_ezy,
                double[::1] bxe, double[::1] cxe,
                double[::1] bye, double[::1] cye,
                int xlo, int xhi, int ylo, int yhi, bint periodic_y):
    cdef Py_ssize_t nx = ez.shape[0], ny = ez.shape[1]
    cdef Py_ssize_t i, j, jm, j0, j1
    cdef double dhy, dhx
    j0 = 0 if periodic_y else 1
    j1 = ny if periodic_y else ny - 1
    with nogil:
        for i in range(1, nx - 1):
            for j in range(j0, j1):
                jm = j - 1
                if jm < 0:
                    jm = ny - 1
                dhy = hy[i, j] - hy[i - 1, j]
                dhx = hx[i, j] - hx[i, jm]
                ez[i, j] = ez[i, j] + ce[i, j] * ((kxe[i] * dhy) * rdx - (kye[j] * dhx) * rdy)
        for i in range(1, nx - 1):
            if i >= xlo and i < xhi:
                continue
            for j in range(j0, j1):
                dhy = hy[i, j] - hy[i - 1, j]
                psi_ezx[i, j] = bxe[i] * psi_ezx[i, j] + cxe[i] * dhy
                ez[i, j] = ez[i, j] + ce[i, j] * (psi_ezx[i, j] * rdx)
        if not periodic_y:
            for i in range(1, nx - 1):
                for j in range(j0, min(ylo, j1)):
                    dhx = hx[i, j] - hx[i, j - 1]
                    psi_ezy[i, j] = bye[j] * psi_ezy[i, j] + cye[j] * dhx
                    ez[i, j] = ez[i, j] - ce[i, j] * (psi_ezy[i, j] * rdy)
                for j in range(max(yhi, j0), j1):
                    dhx = hx[i, j] - hx[i, j - 1]
                    psi_ezy[i, j] = bye[j] * psi_ezy[i, j] + cye[j] * dhx
                    ez[i, j] = ez[i, j] - ce[i, j] * (psi_ezy[i, j] * rdy)


@cython.boundscheck(False)
@cython.wraparound(False)
def update_h_tm(double[:, ::1] hz, double[:, ::1] ex, double[:, ::1] ey,
                double ch, double rdx, double rdy,
                double[::1] kxh, double[::1] kyh,
                double[:, ::1] psi_hzx, double[:, ::1] psi_hzy,
                double[::1] bxh, double[::1] cxh,
                double[::1] byh, double[::1] cyh,
                int xlo, int xhi, int ylo, int yhi, bint periodic_y):
    cdef Py_ssize_t nx = hz.shape[0], ny = hz.shape[1]
    cdef Py_ssize_t i, j, jp, jend
    cdef double dex, dey
    jend = ny if periodic_y else ny - 1
    with nogil:
        for i in range(nx - 1):
            for j in range(jend):
                jp = j + 1
                if jp == ny:
                    jp = 0
                dex = ex[i, jp] - ex[i, j]
                dey = ey[i + 1, j] - ey[i, j]
                hz[i, j] = hz[i, j] + ch * ((kyh[j] * dex) * rdy - (kxh[i] * dey) * rdx)
        if not periodic_y:
            for i in range(nx - 1):
                for j in range(min(ylo, jend)):
                    dex = ex[i, j + 1] - ex[i, j]
                    psi_hzy[i, j] = byh[j] * psi_hzy[i, j] + cyh[j] * dex
                    hz[i, j] = hz[i, j] + ch * (psi_hzy[i, j] * rdy)
                for j in range(max(yhi, 0), jend):
                    dex = ex[i, j + 1] - ex[i, j]
                    psi_hzy[i, j] = byh[j] * psi_hzy[i, j] + cyh[j] * dex
                    hz[i, j] = hz[i, j] + ch * (psi_hzy[i, j] * rdy)
        for i in range(nx - 1):
            if i >= xlo and i < xhi:
                continue
            for j in range(jend):
                dey = ey[i + 1, j] - ey[i, j]
                psi_hzx[i, j] = bxh[i] * psi_hzx[i, j] + cxh[i] * dey
                hz[i, j] = hz[i, j] - ch * (psi_hzx[i, j] * rdx)


@cython.boundscheck(False)
@cython.wraparound(False)
def update_e_tm(double[:, ::1] hz, double[:, ::1] ex, double[:, ::1] ey,
                double[:, ::1] cex, double[:, ::1] cey, double rdx, double rdy,
                double[::1] kxe, double[::1] kye,
                double[:, ::1] psi_eyx, double[:, ::1] psi_exy,
                double[::1] bxe, double[::1] cxe,
                double[::1] bye, double[::1] cye,
                int xlo, int xhi, int ylo, int yhi, bint periodic_y):
    cdef Py_ssize_t nx = hz.shape[0], ny = hz.shape[1]
    cdef Py_ssize_t i, j, jm, j0, j1, jend
    cdef double d
    j0 = 0 if periodic_y else 1
    j1 = ny if periodic_y else ny - 1
    jend = ny if periodic_y else ny - 1
    with nogil:
        for i in range(nx - 1):
            for j in range(j0, j1):
                jm = j - 1
                if jm < 0:
                    jm = ny - 1
                d = hz[i, j] - hz[i, jm]
                ex[i, j] = ex[i, j] + cex[i, j] * ((kye[j] * d) * rdy)
        for i in range(1, nx - 1):
            for j in range(jend):
                d = hz[i, j] - hz[i - 1, j]
                ey[i, j] = ey[i, j] - cey[i, j] * ((kxe[i] * d) * rdx)
        if not periodic_y:
            for i in range(nx - 1):
                for j in range(j0, min(ylo, j1)):
                    d = hz[i, j] - hz[i, j - 1]
                    psi_exy[i, j] = bye[j] * psi_exy[i, j] + cye[j] * d
                    ex[i, j] = ex[i, j] + cex[i, j] * (psi_exy[i, j] * rdy)
                for j in range(max(yhi, j0), j1):
                    d = hz[i, j] - hz[i, j - 1]
                    psi_exy[i, j] = bye[j] * psi_exy[i, j] + cye[j] * d
                    ex[i, j] = ex[i, j] + cex[i, j] * (psi_exy[i, j] * rdy)
        for i in range(1, nx - 1):
            if i >= xlo and i < xhi:
                continue
            for j in range(jend):
                d = hz[i, j] - hz[i - 1, j]
                psi_eyx[i, j] = bxe[i] * psi_eyx[i, j] + cxe[i] * d
                ey[i, j] = ey[i, j] - cey[i, j] * (psi_eyx[i, j] * rdx)
