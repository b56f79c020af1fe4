# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for the box-enumeration order-embedding oracle.

Scans every x in [-bound, bound]^cols in odometer order (x[0] most
significant, each digit running from -bound up) and reports the index of the
first x violating (x >= 0) <=> (M @ x >= 0).  Row sums are updated
incrementally, so one odometer step costs O(rows).  Callers guarantee that
every |row| . |x| fits comfortably in int64.
"""

from libc.stdlib cimport free, malloc


def check_box(long long[::1] mat, Py_ssize_t nrows, Py_ssize_t ncols,
              long long bound):
    """Return the odometer index of the first violating x, or -1."""
    if ncols == 0 or bound <= 0:
        return -1
    cdef long long *x = <long long *> malloc(ncols * sizeof(long long))
    cdef long long *y = <long long *> malloc(nrows * sizeof(long long))
    if x == NULL or y == NULL:
        if x != NULL:
            free(x)
        if y != NULL:
            free(y)
        raise MemoryError()
    cdef Py_ssize_t i, j
    cdef long long idx = 0
    cdef long long span = 2 * bound
    cdef bint nonneg_x, nonneg_y
    try:
        for j in range(ncols):
            x[j] = -bound
        for i in range(nrows):
            y[i] = 0
            for j in range(ncols):
                y[i] -= mat[i * ncols + j] * bound
        while True:
            nonneg_x = True
            for j in range(ncols):
                if x[j] < 0:
                    nonneg_x = False
                    break
            nonneg_y = True
            for i in range(nrows):
                if y[i] < 0:
                    nonneg_y = False
                    break
            if nonneg_x != nonneg_y:
                return idx
            j = ncols - 1
            while j >= 0 and x[j] == bound:
                x[j] = -bound
                for i in range(nrows):
                    y[i] -= mat[i * ncols + j] * span
                j -= 1
            if j < 0:
                return -1
            x[j] += 1
            for i in range(nrows):
                y[i] += mat[i * ncols + j]
            idx += 1
    finally:
        free(x)
        free(y)
