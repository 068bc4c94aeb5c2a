# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Row reduction over F_p on contiguous int64 arrays (in place).

Entries must already lie in [0, p) with p < 2**31, so every product fits in
an int64.  Pivot rows are scanned for their nonzero columns once, and only
rows with a nonzero in the pivot column are touched; the permutation-like
matrices produced by free FI-modules stay cheap this way.
"""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, free

ctypedef cnp.int64_t i64


cdef inline i64 _inv(i64 a, i64 p):
    cdef i64 t = 0, newt = 1, r = p, newr = a, q, tmp
    while newr != 0:
        q = r // newr
        tmp = t - q * newt
        t = newt
        newt = tmp
        tmp = r - q * newr
        r = newr
        newr = tmp
    if t < 0:
        t += p
    return t


cdef list _reduce(i64[:, ::1] A, i64 p, bint full):
    cdef Py_ssize_t nrows = A.shape[0], ncols = A.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, k, nnz
    cdef i64 f, inv, v
    cdef Py_ssize_t *nz
    cdef list pivots = []
    if nrows == 0 or ncols == 0:
        return pivots
    nz = <Py_ssize_t *> malloc(ncols * sizeof(Py_ssize_t))
    try:
        for c in range(ncols):
            if r >= nrows:
                break
            i = r
            while i < nrows and A[i, c] == 0:
                i += 1
            if i == nrows:
                continue
            if i != r:
                for j in range(c, ncols):
                    v = A[i, j]
                    A[i, j] = A[r, j]
                    A[r, j] = v
            inv = _inv(A[r, c], p)
            nnz = 0
            for j in range(c, ncols):
                if A[r, j] != 0:
                    if inv != 1:
                        A[r, j] = (A[r, j] * inv) % p
                    nz[nnz] = j
                    nnz += 1
            for i in range(0 if full else r + 1, nrows):
                if i == r:
                    continue
                f = A[i, c]
                if f == 0:
                    continue
                f = p - f
                for k in range(nnz):
                    j = nz[k]
                    A[i, j] = (A[i, j] + f * A[r, j]) % p
            pivots.append(c)
            r += 1
    finally:
        free(nz)
    return pivots


def rref_modp(cnp.ndarray A, long long p):
    """Reduce ``A`` to reduced row echelon form in place; return pivot columns."""
    return _reduce(A, p, True)


def echelon_modp(cnp.ndarray A, long long p):
    """Forward elimination only (row echelon form, unit pivots); return pivot columns."""
    return _reduce(A, p, False)
