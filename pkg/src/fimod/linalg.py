"""Dense exact matrices and subspace calculus over a :class:`FieldSpec`.

Matrices are numpy arrays: ``int64`` residues for F_p, ``object`` arrays of
``flint.fmpq`` for Q.  Subspaces are stored as reduced row echelon bases
(rows are basis vectors), so two subspaces are equal exactly when their
bases are equal entry by entry.
"""

from __future__ import annotations

import flint
import numpy as np

from . import kernels
from .scalars import FieldSpec

_FLOAT_EXACT = 2**53


class DimensionError(ValueError):
    pass


# construction ---------------------------------------------------------------

def zeros(field: FieldSpec, rows: int, cols: int) -> np.ndarray:
    if field.is_rational:
        out = np.empty((rows, cols), dtype=object)
        out.fill(flint.fmpq(0))
        return out
    return np.zeros((rows, cols), dtype=np.int64)


def eye(field: FieldSpec, n: int) -> np.ndarray:
    out = zeros(field, n, n)
    for i in range(n):
        out[i, i] = field.one
    return out


def matrix(field: FieldSpec, data, shape=None) -> np.ndarray:
    """Coerce nested lists / arrays of ints, Fractions or strings into ``field``."""
    arr = np.array(data, dtype=object)
    if shape is not None:
        arr = arr.reshape(shape)
    if arr.ndim == 1 and shape is None and arr.size == 0:
        arr = arr.reshape(0, 0)
    if field.is_rational:
        out = np.empty(arr.shape, dtype=object)
        flat = out.reshape(-1)
        for i, x in enumerate(arr.reshape(-1)):
            flat[i] = field.coerce(x)
        return out
    out = np.empty(arr.shape, dtype=np.int64)
    flat = out.reshape(-1)
    for i, x in enumerate(arr.reshape(-1)):
        flat[i] = field.coerce(x)
    return out


def vector(field: FieldSpec, data) -> np.ndarray:
    return matrix(field, list(data)).reshape(-1)


def from_ints(field: FieldSpec, arr) -> np.ndarray:
    """Fast coercion of an integer array."""
    arr = np.asarray(arr)
    if field.is_rational:
        out = np.empty(arr.shape, dtype=object)
        flat = out.reshape(-1)
        for i, x in enumerate(arr.reshape(-1).tolist()):
            flat[i] = flint.fmpq(x)
        return out
    return np.mod(arr.astype(np.int64), field.p)


def normalize(field: FieldSpec, A: np.ndarray) -> np.ndarray:
    if field.is_rational:
        return A
    return np.mod(A, field.p)


def copy(A: np.ndarray) -> np.ndarray:
    return A.copy()


# arithmetic -----------------------------------------------------------------

def _to_fmpq_mat(A):
    r, c = A.shape
    return flint.fmpq_mat(r, c, A.reshape(-1).tolist())


def _from_fmpq_mat(M, r, c):
    out = np.empty((r, c), dtype=object)
    if r and c:
        out.reshape(-1)[:] = M.entries()
    return out


def matmul(field: FieldSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    if A.shape[1] != B.shape[0]:
        raise DimensionError(f"cannot multiply {A.shape} by {B.shape}")
    r, k = A.shape
    c = B.shape[1]
    if r == 0 or c == 0 or k == 0:
        return zeros(field, r, c)
    if field.is_rational:
        if r * k * c <= 512:
            return A.dot(B)
        return _from_fmpq_mat(_to_fmpq_mat(A) * _to_fmpq_mat(B), r, c)
    p = field.p
    bound = (p - 1) ** 2
    if k * bound < _FLOAT_EXACT:
        prod = A.astype(np.float64) @ B.astype(np.float64)
        return np.mod(prod.astype(np.int64), p)
    step = max(1, (2**62) // max(bound, 1))
    out = np.zeros((r, c), dtype=np.int64)
    for s in range(0, k, step):
        out = np.mod(out + np.mod(A[:, s:s + step] @ B[s:s + step], p), p)
    return out


def matvec(field: FieldSpec, A: np.ndarray, v: np.ndarray) -> np.ndarray:
    return matmul(field, A, v.reshape(-1, 1)).reshape(-1)


def add(field, A, B):
    return normalize(field, A + B)


def sub(field, A, B):
    return normalize(field, A - B)


def neg(field, A):
    return normalize(field, -A)


def scale(field, c, A):
    return normalize(field, A * field.coerce(c))


def is_zero(A: np.ndarray) -> bool:
    if A.size == 0:
        return True
    return not bool(np.any(A.astype(bool) if A.dtype == object else A))


def equal(A: np.ndarray, B: np.ndarray) -> bool:
    return A.shape == B.shape and (A.size == 0 or bool(np.all(A == B)))


def block(field: FieldSpec, rows) -> np.ndarray:
    """Assemble a block matrix from a nested list of arrays (``None`` = zero)."""
    heights = []
    widths = None
    for row in rows:
        h = None
        for blk in row:
            if blk is not None:
                h = blk.shape[0]
        heights.append(h)
    widths = [None] * len(rows[0])
    for row in rows:
        for j, blk in enumerate(row):
            if blk is not None:
                widths[j] = blk.shape[1]
    if None in heights or None in widths:
        raise DimensionError("every block row and column needs one explicit block")
    out = zeros(field, sum(heights), sum(widths))
    r0 = 0
    for i, row in enumerate(rows):
        c0 = 0
        for j, blk in enumerate(row):
            if blk is not None:
                out[r0:r0 + heights[i], c0:c0 + widths[j]] = blk
            c0 += widths[j]
        r0 += heights[i]
    return out


def vstack(field, mats, cols):
    mats = [m for m in mats if m.shape[0]]
    if not mats:
        return zeros(field, 0, cols)
    return np.vstack(mats)


def hstack(field, mats, rows):
    mats = [m for m in mats if m.shape[1]]
    if not mats:
        return zeros(field, rows, 0)
    return np.hstack(mats)


# elimination ----------------------------------------------------------------

def rref(field: FieldSpec, A: np.ndarray):
    """Reduced row echelon form: ``(R, pivots)`` with ``R`` holding only the nonzero rows."""
    r, c = A.shape
    if r == 0 or c == 0:
        return zeros(field, 0, c), ()
    if field.is_rational:
        R, rank = _to_fmpq_mat(A).rref()
        out = _from_fmpq_mat(R, r, c)[:rank]
        return out, _pivots_of(out)
    work = np.ascontiguousarray(A, dtype=np.int64).copy()
    pivots = kernels.rref_modp(work, field.p)
    return work[:len(pivots)], tuple(pivots)


def rank(field: FieldSpec, A: np.ndarray) -> int:
    r, c = A.shape
    if r == 0 or c == 0:
        return 0
    if field.is_rational:
        return _to_fmpq_mat(A).rank()
    if r > c:
        A = A.T
    work = np.ascontiguousarray(A, dtype=np.int64).copy()
    return len(kernels.echelon_modp(work, field.p))


def nullspace(field: FieldSpec, A: np.ndarray) -> np.ndarray:
    """Rows spanning {x : A x = 0}, in reduced row echelon form."""
    rows, cols = A.shape
    if cols == 0:
        return zeros(field, 0, 0)
    R, pivots = rref(field, A)
    pset = set(pivots)
    free = [j for j in range(cols) if j not in pset]
    K = zeros(field, len(free), cols)
    if not free:
        return K
    K[np.arange(len(free)), free] = field.one
    if pivots:
        K[:, list(pivots)] = neg(field, np.ascontiguousarray(R[:, free].T))
    return rref(field, K)[0]


def inverse(field: FieldSpec, A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    if A.shape != (n, n):
        raise DimensionError("inverse of a non-square matrix")
    R, piv = rref(field, np.hstack([A, eye(field, n)]) if n else zeros(field, 0, 0))
    if n and (len(piv) < n or piv[n - 1] != n - 1):
        raise ZeroDivisionError("matrix is singular")
    return R[:n, n:] if n else zeros(field, 0, 0)


def solve(field: FieldSpec, A: np.ndarray, b: np.ndarray):
    """Some ``x`` with ``A x = b``, or ``None`` when ``b`` is outside the image."""
    rows, cols = A.shape
    b = np.asarray(b).reshape(-1)
    if b.shape[0] != rows:
        raise DimensionError("right-hand side has the wrong length")
    aug = np.hstack([A, b.reshape(-1, 1)]) if rows else zeros(field, 0, cols + 1)
    R, piv = rref(field, aug)
    if piv and piv[-1] == cols:
        return None
    x = zeros(field, 1, cols).reshape(-1)
    for i, pc in enumerate(piv):
        x[pc] = R[i, cols]
    return x


# subspaces ------------------------------------------------------------------

class Subspace:
    """A subspace of ``field^ambient`` held by its reduced row echelon basis."""

    __slots__ = ("field", "ambient", "basis", "pivots")

    def __init__(self, field: FieldSpec, ambient: int, basis: np.ndarray, pivots):
        self.field = field
        self.ambient = ambient
        self.basis = basis
        self.pivots = tuple(pivots)

    @classmethod
    def span(cls, field: FieldSpec, ambient: int, vectors) -> "Subspace":
        V = np.asarray(vectors) if not isinstance(vectors, np.ndarray) else vectors
        if V.size == 0:
            return cls.zero(field, ambient)
        V = V.reshape(-1, ambient)
        R, piv = rref(field, V)
        return cls(field, ambient, R, piv)

    @classmethod
    def zero(cls, field, ambient):
        return cls(field, ambient, zeros(field, 0, ambient), ())

    @classmethod
    def full(cls, field, ambient):
        return cls(field, ambient, eye(field, ambient), tuple(range(ambient)))

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def __len__(self):
        return self.dim

    def is_zero(self):
        return self.dim == 0

    def is_full(self):
        return self.dim == self.ambient

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (self.field == other.field and self.ambient == other.ambient
                and self.pivots == other.pivots and equal(self.basis, other.basis))

    def __hash__(self):
        return hash((self.field, self.ambient, self.pivots))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient}, {self.field})"

    def reduce(self, vectors: np.ndarray) -> np.ndarray:
        """Remainders of the rows of ``vectors`` after clearing this basis' pivots."""
        V = vectors.reshape(-1, self.ambient)
        if self.dim == 0 or V.shape[0] == 0:
            return V.copy()
        coeffs = V[:, list(self.pivots)]
        return sub(self.field, V, matmul(self.field, coeffs, self.basis))

    def contains(self, v) -> bool:
        v = np.asarray(v)
        if v.reshape(-1).shape[0] != self.ambient:
            raise DimensionError("vector does not live in the ambient space")
        return is_zero(self.reduce(v.reshape(1, -1)))

    def contains_all(self, vectors: np.ndarray) -> bool:
        if vectors.size == 0:
            return True
        return is_zero(self.reduce(vectors))

    def contains_subspace(self, other: "Subspace") -> bool:
        return self.contains_all(other.basis)

    def coordinates(self, vectors: np.ndarray) -> np.ndarray:
        """Coefficients expressing rows of ``vectors`` (assumed inside) in this basis."""
        V = vectors.reshape(-1, self.ambient)
        return V[:, list(self.pivots)].copy()

    def add_vectors(self, vectors: np.ndarray) -> "Subspace":
        if vectors.size == 0:
            return self
        rem = self.reduce(vectors)
        if is_zero(rem):
            return self
        return Subspace.span(self.field, self.ambient, np.vstack([self.basis, rem]))


def _check(a: Subspace, b: Subspace):
    if a.ambient != b.ambient or a.field != b.field:
        raise DimensionError("subspaces live in different ambient spaces")


def kernel(field: FieldSpec, A: np.ndarray) -> Subspace:
    K = nullspace(field, A)
    return Subspace(field, A.shape[1], K, _pivots_of(K))


def image(field: FieldSpec, A: np.ndarray) -> Subspace:
    return Subspace.span(field, A.shape[0], np.ascontiguousarray(A.T))


def span(field: FieldSpec, ambient: int, vectors) -> Subspace:
    return Subspace.span(field, ambient, vectors)


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check(a, b)
    if b.dim == 0:
        return a
    if a.dim == 0:
        return b
    return a.add_vectors(b.basis)


def intersect(a: Subspace, b: Subspace) -> Subspace:
    _check(a, b)
    if a.dim == 0 or b.dim == 0:
        return Subspace.zero(a.field, a.ambient)
    f = a.field
    # (x, y) with x·A = y·B  <=>  [A; -B]^T (x, y) = 0
    stacked = np.vstack([a.basis, neg(f, b.basis)])
    K = nullspace(f, np.ascontiguousarray(stacked.T))
    if K.shape[0] == 0:
        return Subspace.zero(f, a.ambient)
    vecs = matmul(f, K[:, :a.dim], a.basis)
    return Subspace.span(f, a.ambient, vecs)


def contains(a: Subspace, v) -> bool:
    return a.contains(v)


def quotient_basis(ambient: int, w: Subspace):
    """Projection onto ``k^ambient / w`` and a section, using non-pivot coordinates.

    Returns ``(P, S)`` with ``P`` of shape ``(q, ambient)`` killing exactly ``w``
    and ``S`` of shape ``(ambient, q)`` satisfying ``P S = I``.
    """
    if w.ambient != ambient:
        raise DimensionError("subspace lives in another ambient space")
    f = w.field
    piv = set(w.pivots)
    rest = [j for j in range(ambient) if j not in piv]
    q = len(rest)
    P = zeros(f, q, ambient)
    S = zeros(f, ambient, q)
    for t, j in enumerate(rest):
        P[t, j] = f.one
        S[j, t] = f.one
    if w.dim and q:
        # x mod w = x - sum_pivots x_p * w_p; read off non-pivot coordinates
        P[:, list(w.pivots)] = neg(f, np.ascontiguousarray(w.basis[:, rest].T))
    return P, S


def complement_indices(ambient: int, w: Subspace):
    piv = set(w.pivots)
    return [j for j in range(ambient) if j not in piv]


def _pivots_of(R: np.ndarray):
    if R.shape[0] == 0:
        return ()
    nz = R.astype(bool) if R.dtype == object else R != 0
    return tuple(int(j) for j in np.argmax(nz, axis=1))


def subquotient(field: FieldSpec, big: Subspace, small: Subspace):
    """Basis of ``big / small`` as rows reduced modulo ``small`` (RREF).

    Returns ``(C, coords)`` where ``coords(vectors)`` gives coordinates in the
    basis ``C`` of the classes of vectors lying in ``big``.
    """
    rem = small.reduce(big.basis) if big.dim else big.basis
    C = Subspace.span(field, big.ambient, rem) if rem.size else Subspace.zero(field, big.ambient)

    def coords(vectors):
        red = small.reduce(vectors)
        return C.coordinates(red)

    return C, coords
