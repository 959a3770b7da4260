# cython: language_level=3
"""Compiled start-stop coincidence counter for two sorted timestamp streams."""

cimport cython
from libc.math cimport floor

import numpy as np


@cython.boundscheck(False)
@cython.wraparound(False)
def coincidence_counts(double[::1] a, double[::1] b, double bin_width, Py_ssize_t nhalf):
    """Histogram all delays ``b[j] - a[i]`` into ``2 * nhalf + 1`` bins.

    Bin ``k`` holds delays with ``floor((b - a) / bin_width + nhalf + 0.5) == k``;
    both streams must be sorted ascending.
    """
    cdef Py_ssize_t nbins = 2 * nhalf + 1
    counts_arr = np.zeros(nbins, dtype=np.int64)
    cdef long long[::1] counts = counts_arr
    cdef Py_ssize_t na = a.shape[0], nb = b.shape[0]
    cdef Py_ssize_t i, j, lo = 0
    cdef double half = nhalf + 0.5
    cdef double x, ta
    with nogil:
        for i in range(na):
            ta = a[i]
            while lo < nb and (b[lo] - ta) / bin_width + half < 0.0:
                lo += 1
            j = lo
            while j < nb:
                x = (b[j] - ta) / bin_width + half
                if x >= nbins:
                    break
                counts[<Py_ssize_t>floor(x)] += 1
                j += 1
    return counts_arr
