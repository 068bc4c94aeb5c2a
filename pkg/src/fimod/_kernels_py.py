"""Pure Python (numpy) implementation of the F_p row reduction kernels.

Same contract as the compiled ``_kernels`` extension: operate in place on a
C-contiguous int64 array with entries in ``[0, p)`` and return pivot columns.
"""

import numpy as np


def _reduce(A, p, full):
    nrows, ncols = A.shape
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        col = A[r:, c]
        nzr = np.flatnonzero(col)
        if nzr.size == 0:
            continue
        i = r + int(nzr[0])
        if i != r:
            A[[r, i], c:] = A[[i, r], c:]
        inv = pow(int(A[r, c]), -1, p)
        if inv != 1:
            A[r, c:] = (A[r, c:] * inv) % p
        piv = A[r, c:]
        cols = np.flatnonzero(piv)
        lo = 0 if full else r + 1
        rows = lo + np.flatnonzero(A[lo:, c])
        rows = rows[rows != r]
        if rows.size:
            f = (p - A[rows, c])[:, None]
            sub = A[np.ix_(rows, c + cols)]
            A[np.ix_(rows, c + cols)] = (sub + f * piv[cols][None, :]) % p
        pivots.append(c)
        r += 1
    return pivots


def rref_modp(A, p):
    return _reduce(A, p, True)


def echelon_modp(A, p):
    return _reduce(A, p, False)
