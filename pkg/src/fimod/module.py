"""FI-modules truncated to degrees 0..N.

An :class:`FIModule` stores, for every degree n, the matrix ``incl(n)`` of the
inclusion pi_n : [n] -> [n+1] and the matrices ``sym(n, i)`` of the adjacent
transpositions s_i of S_n.  Matrices act on column vectors.  Free modules
keep index maps instead of dense matrices and only densify on demand.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import lru_cache
from math import inf

import numpy as np

from . import fi
from . import linalg as la
from .linalg import Subspace
from .scalars import FieldSpec

NEG_INF = -inf


@dataclass(frozen=True)
class Degree:
    """A degree in Z or -inf, with a flag saying whether the window proves it."""
    value: float
    certified: bool = True

    @property
    def is_neg_inf(self):
        return self.value == NEG_INF

    def to_json(self):
        return {"value": degree_json(self.value), "certified": self.certified}

    def __str__(self):
        v = "-inf" if self.is_neg_inf else str(int(self.value))
        return v if self.certified else v + "?"


def degree_json(value):
    if value is None:
        return None
    return "-inf" if value == NEG_INF else int(value)


def dmax(*values):
    out = NEG_INF
    for v in values:
        if v is not None and v > out:
            out = v
    return out


class ModuleError(ValueError):
    pass


class FIModule:
    """Truncated FI-module (field, window N, dims, inclusions, transpositions).

    ``bounds`` is ``(g, r)``: upper bounds for the generating degree and for
    hd_1 when they are known from a presentation, else ``None``.
    """

    def __init__(self, field: FieldSpec, N: int, dims, incl=None, sym=None,
                 bounds=None, name=None):
        self.field = field
        self.N = int(N)
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) != self.N + 1:
            raise ModuleError(f"expected {self.N + 1} dims, got {len(self.dims)}")
        if incl is not None:
            incl = list(incl)
            if len(incl) != self.N:
                raise ModuleError(f"expected {self.N} inclusion matrices")
        if sym is not None:
            sym = [list(s) for s in sym]
            if len(sym) != self.N + 1:
                raise ModuleError(f"expected transposition lists for {self.N + 1} degrees")
        self._incl = incl
        self._sym = sym
        self.bounds = bounds
        self.name = name
        self._coset = {}
        self._perm = {}

    # raw data ----------------------------------------------------------------

    def incl(self, n: int) -> np.ndarray:
        return self._incl[n]

    def sym(self, n: int, i: int) -> np.ndarray:
        """Matrix of s_i = (i, i+1) acting on V_n (1 <= i < n)."""
        return self._sym[n][i - 1]

    def apply_incl(self, n, X):
        return la.matmul(self.field, self.incl(n), X)

    def apply_sym(self, n, i, X):
        return la.matmul(self.field, self.sym(n, i), X)

    def apply_coset(self, n, k, X):
        return la.matmul(self.field, self.coset_maps(n)[k - 1], X)

    def check_shapes(self):
        bad = []
        for n in range(self.N):
            if self.incl(n).shape != (self.dims[n + 1], self.dims[n]):
                bad.append(f"incl {n} has shape {self.incl(n).shape}")
        for n in range(self.N + 1):
            if len(self._sym_list(n)) != max(n - 1, 0):
                bad.append(f"degree {n} needs {max(n - 1, 0)} transpositions")
                continue
            for i in range(1, n):
                if self.sym(n, i).shape != (self.dims[n], self.dims[n]):
                    bad.append(f"sym {n} {i} has shape {self.sym(n, i).shape}")
        return bad

    def _sym_list(self, n):
        return self._sym[n]

    # derived actions -----------------------------------------------------------

    def coset_maps(self, n: int):
        """[V(f_1), ..., V(f_{n+1})] with f_k : [n] -> [n+1] order-preserving missing k.

        f_k = s_{k-1} o ... o s_1 o pi_n.
        """
        if n not in self._coset:
            F = self.incl(n)
            out = [F]
            for k in range(2, n + 2):
                F = la.matmul(self.field, self.sym(n + 1, k - 1), F)
                out.append(F)
            self._coset[n] = out
        return self._coset[n]

    def perm_action(self, perm) -> np.ndarray:
        """Matrix of a permutation of [n] given as an image tuple."""
        perm = tuple(perm)
        if perm not in self._perm:
            n = len(perm)
            A = la.eye(self.field, self.dims[n])
            for i in reversed(fi.transposition_word(perm)):
                A = la.matmul(self.field, self.sym(n, i), A)
            self._perm[perm] = A
        return self._perm[perm]

    def action(self, f: fi.Injection) -> np.ndarray:
        """Matrix of V(f) for any injection f : [m] -> [n] with n <= N."""
        m, n = f.source, f.target
        if n > self.N:
            raise ModuleError(f"target degree {n} beyond window {self.N}")
        A = la.eye(self.field, self.dims[m])
        for d in range(m, n):
            A = self.apply_incl(d, A)
        return la.matmul(self.field, self.perm_action(fi.factor_through_pi(f)), A)

    def push(self, d: int, n: int, X: np.ndarray) -> np.ndarray:
        """Columns V(a) x for every vector x (column of X in V_d) and every a in Inj(d, n).

        Column order is vector-major, injections in lexicographic order, which
        matches the basis order of a free module on these vectors.
        """
        k = X.shape[1]
        perms = fi.injection_tuples(d, d)
        cols = {}
        order = sorted(perms, key=_inversions)
        for p in order:
            if k == 0:
                cols[p] = X
                continue
            for i in range(1, d):
                # value i+1 sits before value i: p = s_i o q with fewer inversions
                if p.index(i + 1) < p.index(i):
                    q = tuple(i + 1 if a == i else i if a == i + 1 else a for a in p)
                    cols[p] = self.apply_sym(d, i, cols[q])
                    break
            else:
                cols[p] = X
        layer = [cols[p] for p in perms]
        dimd = self.dims[d]
        Y = _stack_layer(self.field, layer, dimd, k)
        for m in range(d + 1, n + 1):
            tuples = fi.injection_tuples(d, m)
            prev_index = fi.injection_index(d, m - 1)
            groups = {}
            for a_idx, a in enumerate(tuples):
                seen = set(a)
                kmiss = next(v for v in range(1, m + 1) if v not in seen)
                h = tuple(v if v < kmiss else v - 1 for v in a)
                groups.setdefault(kmiss, ([], []))
                groups[kmiss][0].append(a_idx)
                groups[kmiss][1].append(prev_index[h])
            Ynew = la.zeros(self.field, self.dims[m], len(tuples) * k)
            Ynew = Ynew.reshape(self.dims[m], len(tuples), k)
            Yp = Y.reshape(self.dims[m - 1], len(prev_index), k)
            for kmiss, (dst, src) in groups.items():
                block = Yp[:, src, :].reshape(self.dims[m - 1], len(src) * k)
                img = self.apply_coset(m - 1, kmiss, block)
                Ynew[:, dst, :] = img.reshape(self.dims[m], len(dst), k)
            Y = Ynew.reshape(self.dims[m], len(tuples) * k)
        A = len(fi.injection_tuples(d, n))
        Y = Y.reshape(self.dims[n], A, k)
        return np.ascontiguousarray(Y.transpose(0, 2, 1)).reshape(self.dims[n], k * A)

    # conveniences ----------------------------------------------------------------

    @property
    def total_dim(self):
        return sum(self.dims)

    def is_zero(self):
        return all(d == 0 for d in self.dims)

    def dense(self) -> "FIModule":
        return self

    def __repr__(self):
        nm = f" {self.name}" if self.name else ""
        return f"<FIModule{nm} over {self.field}, N={self.N}, dims={self.dims}>"


def _inversions(p):
    return sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j])


def _stack_layer(field, layer, rows, k):
    A = len(layer)
    Y = la.zeros(field, rows, A * k).reshape(rows, A, k)
    for a, block in enumerate(layer):
        if k:
            Y[:, a, :] = block
    return Y.reshape(rows, A * k)


class FreeModule(FIModule):
    """The free module on generators of the given degrees, sum of M(d) = k[Inj(d, -)]."""

    def __init__(self, field: FieldSpec, degrees, N: int, name=None):
        self.degrees = tuple(int(d) for d in degrees)
        if any(d < 0 for d in self.degrees):
            raise ModuleError("generator degrees must be nonnegative")
        dims = [sum(fi.count_injections(d, n) for d in self.degrees) for n in range(N + 1)]
        g = max(self.degrees) if self.degrees else NEG_INF
        super().__init__(field, N, dims, None, None, bounds=(g, NEG_INF), name=name)
        self._incl_idx = {}
        self._sym_idx = {}
        self._dense_incl = {}
        self._dense_sym = {}
        self._comp = {}

    def offsets(self, n):
        out, off = [], 0
        for d in self.degrees:
            out.append(off)
            off += fi.count_injections(d, n)
        return out

    def basis(self, n):
        return [(j, t) for j, d in enumerate(self.degrees) for t in fi.injection_tuples(d, n)]

    def index_of(self, j, images, n):
        return self.offsets(n)[j] + fi.injection_index(self.degrees[j], n)[tuple(images)]

    def top_indices(self, n):
        """Coordinates of degree-n generators (the complement of (JP)_n)."""
        offs = self.offsets(n)
        out = []
        for j, d in enumerate(self.degrees):
            if d == n:
                out.extend(range(offs[j], offs[j] + fi.count_injections(d, n)))
        return out

    def _map_index(self, n, fn, m):
        offs_m = self.offsets(m)
        out = np.empty(self.dims[n], dtype=np.int64)
        pos = 0
        for j, d in enumerate(self.degrees):
            idx = fi.injection_index(d, m)
            for t in fi.injection_tuples(d, n):
                out[pos] = offs_m[j] + idx[fn(t)]
                pos += 1
        return out

    def incl_index(self, n):
        if n not in self._incl_idx:
            self._incl_idx[n] = self._map_index(n, lambda t: tuple(a + 1 for a in t), n + 1)
        return self._incl_idx[n]

    def sym_index(self, n, i):
        key = (n, i)
        if key not in self._sym_idx:
            def sw(t):
                return tuple(i + 1 if a == i else i if a == i + 1 else a for a in t)
            self._sym_idx[key] = self._map_index(n, sw, n)
        return self._sym_idx[key]

    def coset_index(self, n, k):
        def f(t):
            return tuple(a if a < k else a + 1 for a in t)
        return self._map_index(n, f, n + 1)

    def _scatter(self, idx, rows, X):
        out = la.zeros(self.field, rows, X.shape[1])
        if X.shape[1] and len(idx):
            out[idx] = X
        return out

    def apply_incl(self, n, X):
        return self._scatter(self.incl_index(n), self.dims[n + 1], X)

    def apply_sym(self, n, i, X):
        return self._scatter(self.sym_index(n, i), self.dims[n], X)

    def apply_coset(self, n, k, X):
        key = ("coset", n, k)
        if key not in self._sym_idx:
            self._sym_idx[key] = self.coset_index(n, k)
        return self._scatter(self._sym_idx[key], self.dims[n + 1], X)

    def incl(self, n):
        if n not in self._dense_incl:
            self._dense_incl[n] = self.apply_incl(n, la.eye(self.field, self.dims[n]))
        return self._dense_incl[n]

    def sym(self, n, i):
        if (n, i) not in self._dense_sym:
            self._dense_sym[(n, i)] = self.apply_sym(n, i, la.eye(self.field, self.dims[n]))
        return self._dense_sym[(n, i)]

    def _sym_list(self, n):
        return [None] * max(n - 1, 0)

    def coset_maps(self, n):
        if n not in self._coset:
            self._coset[n] = [self.apply_coset(n, k, la.eye(self.field, self.dims[n]))
                              for k in range(1, n + 2)]
        return self._coset[n]

    def compose_table(self, d, n):
        """T[a, b] = index in P_n of (a o basis_b) for a in Inj(d, n), b a basis element of P_d."""
        key = (d, n)
        if key not in self._comp:
            offs_n = self.offsets(n)
            cols = [composition_ranks(e, d, n) + offs_n[j]
                    for j, e in enumerate(self.degrees) if e <= d]
            A = fi.count_injections(d, n)
            self._comp[key] = np.hstack(cols) if cols else np.zeros((A, 0), dtype=np.int64)
        return self._comp[key]

    def push(self, d, n, X):
        k = X.shape[1]
        T = self.compose_table(d, n)
        A = T.shape[0]
        out = la.zeros(self.field, self.dims[n], k * A)
        if k == 0 or A == 0:
            return out
        for j in range(k):
            x = X[:, j]
            nz = np.flatnonzero(x != 0)
            if len(nz) == 0:
                continue
            block = out[:, j * A:(j + 1) * A]
            cols = np.arange(A)
            for b in nz:
                # each injection a sends basis b to a distinct basis element
                block[T[:, b], cols] = x[b]
        return out

    def action(self, f):
        if f.target > self.N:
            raise ModuleError(f"target degree {f.target} beyond window {self.N}")
        A = la.zeros(self.field, self.dims[f.target], self.dims[f.source])
        T = self.compose_table(f.source, f.target)
        a = fi.injection_index(f.source, f.target)[f.images]
        for b in range(self.dims[f.source]):
            A[T[a, b], b] = self.field.one
        return A

    def dense(self):
        return FIModule(self.field, self.N, self.dims,
                        [self.incl(n) for n in range(self.N)],
                        [[self.sym(n, i) for i in range(1, n)] for n in range(self.N + 1)],
                        bounds=self.bounds, name=self.name)

    def __repr__(self):
        return f"<FreeModule {self.degrees} over {self.field}, N={self.N}>"


def _rank_tuples(X: np.ndarray, n: int) -> np.ndarray:
    """Vectorised lexicographic rank of injection tuples (rows of X) into [n]."""
    K, m = X.shape
    r = np.zeros(K, dtype=np.int64)
    for j in range(m):
        smaller = X[:, j] - 1
        for l in range(j):
            smaller -= (X[:, l] < X[:, j])
        r += smaller * fi.count_injections(m - j - 1, n - j - 1)
    return r


@lru_cache(maxsize=256)
def composition_ranks(e, d, n):
    """R[a, b] = rank of (alpha_a o beta_b) in Inj(e, n) for alpha in Inj(d, n), beta in Inj(e, d)."""
    tup = fi.injection_tuples(d, n)
    alphas = np.array(tup, dtype=np.int64).reshape(len(tup), d)
    btup = fi.injection_tuples(e, d)
    betas = np.array(btup, dtype=np.int64).reshape(len(btup), e)
    comp = alphas[:, betas - 1]
    flat = comp.reshape(alphas.shape[0] * betas.shape[0], e)
    out = _rank_tuples(flat, n).reshape(alphas.shape[0], betas.shape[0])
    out.setflags(write=False)
    return out


# constructors -------------------------------------------------------------------

def free_module(field, degrees, N, name=None) -> FreeModule:
    return FreeModule(field, degrees, N, name=name)


def zero_module(field, N) -> FIModule:
    return FIModule(field, N, [0] * (N + 1),
                    [la.zeros(field, 0, 0) for _ in range(N)],
                    [[la.zeros(field, 0, 0)] * max(n - 1, 0) for n in range(N + 1)],
                    bounds=(NEG_INF, NEG_INF), name="0")


def point_module(field, N, degree=0) -> FIModule:
    """k concentrated in one degree with trivial symmetric action (k@0 for degree 0)."""
    dims = [1 if n == degree else 0 for n in range(N + 1)]
    incl = [la.zeros(field, dims[n + 1], dims[n]) for n in range(N)]
    sym = [[la.eye(field, dims[n])] * max(n - 1, 0) for n in range(N + 1)]
    return FIModule(field, N, dims, incl, sym, bounds=(degree, degree + 1), name=f"k@{degree}")


# validation ----------------------------------------------------------------------

@dataclass
class ValidationReport:
    failures: list = dc_field(default_factory=list)

    @property
    def valid(self):
        return not self.failures

    def to_json(self):
        return {"valid": self.valid, "failures": self.failures}


def _first_diff(A, B):
    diff = np.argwhere(A != B)
    if len(diff) == 0:
        return None
    r, c = diff[0]
    return [int(r), int(c), str(A[r, c]), str(B[r, c])]


def validate(v: FIModule) -> ValidationReport:
    """Check every defining relation of FI on the stored generator matrices."""
    rep = ValidationReport()
    shape_errors = v.check_shapes() if not isinstance(v, FreeModule) else []
    for msg in shape_errors:
        rep.failures.append({"relation": "shape", "detail": msg})
    if shape_errors:
        return rep
    F = v.field
    mm = la.matmul

    def check(name, n, A, B, detail):
        d = _first_diff(A, B)
        if d is not None:
            rep.failures.append({"relation": name, "degree": n, "generators": detail,
                                 "first_difference": d})

    for n in range(v.N + 1):
        I = la.eye(F, v.dims[n])
        S = [None] + [v.sym(n, i) for i in range(1, n)]
        for i in range(1, n):
            check("involution", n, mm(F, S[i], S[i]), I, [i])
            if i + 1 < n:
                lhs = mm(F, mm(F, S[i], S[i + 1]), S[i])
                rhs = mm(F, mm(F, S[i + 1], S[i]), S[i + 1])
                check("braid", n, lhs, rhs, [i, i + 1])
            for j in range(i + 2, n):
                check("commute", n, mm(F, S[i], S[j]), mm(F, S[j], S[i]), [i, j])
        if n < v.N:
            M = v.incl(n)
            for i in range(1, n):
                check("compatibility", n, mm(F, v.sym(n + 1, i + 1), M), mm(F, M, S[i]), [i])
        if n + 1 < v.N:
            MM = mm(F, v.incl(n + 1), v.incl(n))
            check("new-points", n, mm(F, v.sym(n + 2, 1), MM), MM, [1])
    return rep


# submodules -----------------------------------------------------------------------

class GradedSubmodule:
    """A family of subspaces W_n of V_n, closed under the generator actions."""

    def __init__(self, parent: FIModule, spaces):
        self.parent = parent
        self.spaces = list(spaces)
        if len(self.spaces) != parent.N + 1:
            raise ModuleError("one subspace per degree required")

    @property
    def dims(self):
        return tuple(s.dim for s in self.spaces)

    def is_zero(self):
        return all(s.dim == 0 for s in self.spaces)

    def closure_failures(self):
        v, out = self.parent, []
        for n in range(v.N + 1):
            W = self.spaces[n]
            if W.dim == 0:
                continue
            B = np.ascontiguousarray(W.basis.T)
            for i in range(1, n):
                if not W.contains_all(np.ascontiguousarray(v.apply_sym(n, i, B).T)):
                    out.append((n, f"s_{i}"))
            if n < v.N and not self.spaces[n + 1].contains_all(np.ascontiguousarray(v.apply_incl(n, B).T)):
                out.append((n, "pi"))
        return out

    def contains(self, other: "GradedSubmodule"):
        return all(a.contains_subspace(b) for a, b in zip(self.spaces, other.spaces))

    def __eq__(self, other):
        return isinstance(other, GradedSubmodule) and self.spaces == other.spaces


def sym_closure(v: FIModule, n: int, W: Subspace) -> Subspace:
    """Smallest S_n-stable subspace containing W."""
    new = W.basis
    while new.shape[0] and n >= 2:
        X = np.ascontiguousarray(new.T)
        imgs = np.vstack([np.ascontiguousarray(v.apply_sym(n, i, X).T) for i in range(1, n)])
        rem = W.reduce(imgs)
        if la.is_zero(rem):
            break
        grown = W.add_vectors(rem)
        new = Subspace.span(v.field, W.ambient, rem).basis
        W = grown
    return W


def translate_up(v: FIModule, n: int, W: Subspace) -> Subspace:
    """Sum over k of V(f_k)(W), an S_{n+1}-stable space when W is S_n-stable."""
    if W.dim == 0:
        return Subspace.zero(v.field, v.dims[n + 1])
    X = np.ascontiguousarray(W.basis.T)
    imgs = [np.ascontiguousarray(v.apply_coset(n, k, X).T) for k in range(1, n + 2)]
    return Subspace.span(v.field, v.dims[n + 1], np.vstack(imgs))


def submodule_generated_by(v: FIModule, vectors) -> GradedSubmodule:
    by_degree = {}
    for deg, vec in vectors:
        vec = np.asarray(vec).reshape(-1)
        if deg < 0 or deg > v.N or vec.shape[0] != v.dims[deg]:
            raise ModuleError(f"vector of length {vec.shape[0]} does not live in degree {deg}")
        by_degree.setdefault(deg, []).append(vec)
    spaces = []
    for n in range(v.N + 1):
        W = translate_up(v, n - 1, spaces[-1]) if n else Subspace.zero(v.field, v.dims[0])
        if n in by_degree:
            G = Subspace.span(v.field, v.dims[n], np.vstack(by_degree[n]))
            G = sym_closure(v, n, G)
            W = la.subspace_sum(W, G)
        spaces.append(W)
    return GradedSubmodule(v, spaces)


def below_degree_submodule(v: FIModule, n: int) -> GradedSubmodule:
    """Submodule generated by V_0, ..., V_n."""
    spaces = []
    for m in range(v.N + 1):
        if m <= n:
            spaces.append(Subspace.full(v.field, v.dims[m]))
        else:
            spaces.append(translate_up(v, m - 1, spaces[-1]))
    return GradedSubmodule(v, spaces)


def zero_submodule(v: FIModule) -> GradedSubmodule:
    return GradedSubmodule(v, [Subspace.zero(v.field, d) for d in v.dims])


def full_submodule(v: FIModule) -> GradedSubmodule:
    return GradedSubmodule(v, [Subspace.full(v.field, d) for d in v.dims])


def submodule_sum(a: GradedSubmodule, b: GradedSubmodule) -> GradedSubmodule:
    return GradedSubmodule(a.parent, [la.subspace_sum(x, y) for x, y in zip(a.spaces, b.spaces)])


def submodule_intersection(a: GradedSubmodule, b: GradedSubmodule) -> GradedSubmodule:
    return GradedSubmodule(a.parent, [la.intersect(x, y) for x, y in zip(a.spaces, b.spaces)])


# quotients and subobjects as modules -------------------------------------------------

def _project(field, W: Subspace, rest, X):
    """Coordinates of the classes of the columns of X in V / W (non-pivot coordinates)."""
    out = X[rest, :]
    if W.dim and len(rest) and X.shape[1]:
        out = la.sub(field, out, la.matmul(field, np.ascontiguousarray(W.basis[:, rest].T),
                                            X[list(W.pivots), :]))
    return out


def quotient(v: FIModule, w: GradedSubmodule, bounds="inherit", check=False) -> FIModule:
    """V / W with bases given by the non-pivot coordinates of each W_n."""
    if w.parent is not v:
        if w.parent.dims != v.dims:
            raise ModuleError("submodule belongs to a different module")
    if check:
        bad = w.closure_failures()
        if bad:
            raise ModuleError(f"not a submodule: closure fails at {bad[:3]}")
    F = v.field
    rests = [la.complement_indices(v.dims[n], w.spaces[n]) for n in range(v.N + 1)]
    dims = [len(r) for r in rests]
    free = isinstance(v, FreeModule)
    incl = []
    for n in range(v.N):
        if free:
            idx = v.incl_index(n)[rests[n]]
            cols = la.zeros(F, v.dims[n + 1], dims[n])
            cols[idx, np.arange(dims[n])] = F.one
        else:
            cols = v.incl(n)[:, rests[n]]
        incl.append(_project(F, w.spaces[n + 1], rests[n + 1], cols))
    sym = []
    for n in range(v.N + 1):
        row = []
        for i in range(1, n):
            if free:
                idx = v.sym_index(n, i)[rests[n]]
                cols = la.zeros(F, v.dims[n], dims[n])
                cols[idx, np.arange(dims[n])] = F.one
            else:
                cols = v.sym(n, i)[:, rests[n]]
            row.append(_project(F, w.spaces[n], rests[n], cols))
        sym.append(row)
    if bounds == "inherit":
        bounds = None
    q = FIModule(F, v.N, dims, incl, sym, bounds=bounds)
    q.quotient_data = (v, w, rests)
    return q


def quotient_projection(q: FIModule, n: int, X):
    """Classes in q = V / W of the columns of X (vectors of V_n)."""
    v, w, rests = q.quotient_data
    return _project(q.field, w.spaces[n], rests[n], X)


def quotient_lift(q: FIModule, n: int):
    """Section q_n -> V_n: unit vectors at the non-pivot coordinates."""
    v, w, rests = q.quotient_data
    S = la.zeros(q.field, v.dims[n], q.dims[n])
    S[rests[n], np.arange(q.dims[n])] = q.field.one
    return S


# quotients of free modules via functionals ---------------------------------------------

def _cut_down(field, K, C, chunk=256):
    """Rows of K spanning {x in rowspace(K) : C x = 0}, imposing C a chunk at a time."""
    for s in range(0, C.shape[0], chunk):
        if K.shape[0] == 0:
            break
        M = la.matmul(field, C[s:s + chunk], np.ascontiguousarray(K.T))
        if la.is_zero(M):
            continue
        Y = la.nullspace(field, M)
        K = la.matmul(field, Y, K) if Y.shape[0] else la.zeros(field, 0, K.shape[1])
    return K


def free_quotient(P: FreeModule, vectors, bounds=None) -> FIModule:
    """P / <vectors> built from the annihilator of the relation submodule.

    Degree by degree we find the functionals Q_n on P_n (rows) that kill the
    relations.  A functional phi on P_n kills everything coming from degree
    n-1 iff phi o f_k = psi_k Q_{n-1} for every coset injection f_k, so phi is
    parametrised by the psi_k and its values on the new generators.  V_n is
    then the coordinate space of Q_n, and no basis of the relation submodule
    is ever formed.
    """
    F = P.field
    by_degree = {}
    for deg, vec in vectors:
        vec = np.asarray(vec).reshape(-1)
        if deg < 0 or deg > P.N or vec.shape[0] != P.dims[deg]:
            raise ModuleError(f"vector of length {vec.shape[0]} does not live in degree {deg}")
        by_degree.setdefault(deg, []).append(vec)
    Qs, incl = [], []
    for n in range(P.N + 1):
        dimP = P.dims[n]
        top = np.array(P.top_indices(n), dtype=np.int64)
        if n == 0:
            d, reps = 0, (np.zeros(0, np.int64),) * 3
        else:
            Qp = Qs[-1]
            d = Qp.shape[0]
            E, Kk, B = [], [], []
            for k in range(1, n + 1):
                idx = P.coset_index(n - 1, k)
                E.append(idx)
                Kk.append(np.full(len(idx), k, dtype=np.int64))
                B.append(np.arange(len(idx), dtype=np.int64))
            E, Kk, B = np.concatenate(E), np.concatenate(Kk), np.concatenate(B)
            order = np.lexsort((Kk, E))
            reps = (E[order], Kk[order], B[order])
        E, Kk, B = reps
        U = n * d + len(top)
        K = la.eye(F, U)
        if len(E) > 1 and d:
            same = np.flatnonzero(E[1:] == E[:-1])
            if len(same):
                Qt = np.ascontiguousarray(Qp.T)
                negQt = la.neg(F, Qt)
                c = len(same)
                C = la.zeros(F, c, U)
                rows = np.arange(c)[:, None]
                cols = np.arange(d)[None, :]
                C[rows, (Kk[same] - 1)[:, None] * d + cols] = Qt[B[same]]
                C[rows, (Kk[same + 1] - 1)[:, None] * d + cols] = negQt[B[same + 1]]
                K = _cut_down(F, K, C)
        first = np.ones(len(E), dtype=bool)
        if len(E) > 1:
            first[1:] = E[1:] != E[:-1]
        pe, pk, pb = E[first], Kk[first], B[first]

        def expand(R):
            """Pull row vectors on P_n back to the parameters (psi_1..psi_n, t)."""
            out = la.zeros(F, R.shape[0], U)
            if d:
                for k in range(1, n + 1):
                    sel = pk == k
                    if sel.any():
                        out[:, (k - 1) * d:k * d] = la.matmul(
                            F, np.ascontiguousarray(R[:, pe[sel]]), np.ascontiguousarray(Qp[:, pb[sel]].T))
            if len(top):
                out[:, n * d:] = R[:, top]
            return out

        if n in by_degree:
            G = Subspace.span(F, dimP, np.vstack(by_degree[n]))
            G = sym_closure(P, n, G)
            if G.dim:
                K = _cut_down(F, K, expand(G.basis))
        m = K.shape[0]
        Q = la.zeros(F, m, dimP)
        if d:
            for k in range(1, n + 1):
                sel = pk == k
                if sel.any():
                    Q[:, pe[sel]] = la.matmul(F, np.ascontiguousarray(K[:, (k - 1) * d:k * d]),
                                              np.ascontiguousarray(Qp[:, pb[sel]]))
            incl.append(np.ascontiguousarray(K[:, :d]))
        elif n:
            incl.append(la.zeros(F, m, 0))
        if len(top):
            Q[:, top] = K[:, n * d:]
        Qs.append(Q)
    sym = []
    for n in range(P.N + 1):
        Q = Qs[n]
        row = []
        if n >= 2 and Q.shape[0]:
            _, piv = la.rref(F, Q)
            piv = list(piv)
            inv = la.inverse(F, np.ascontiguousarray(Q[:, piv]))
            for i in range(1, n):
                QS = Q[:, P.sym_index(n, i)[piv]]
                row.append(la.matmul(F, np.ascontiguousarray(QS), inv))
        else:
            row = [la.zeros(F, Q.shape[0], Q.shape[0]) for _ in range(1, n)]
        sym.append(row)
    q = FIModule(F, P.N, [Q.shape[0] for Q in Qs], incl, sym, bounds=bounds)
    q.functionals = (P, Qs)
    return q


def as_module(w: GradedSubmodule, bounds=None) -> FIModule:
    """The submodule W as an FI-module in the coordinates of its echelon bases."""
    v, F = w.parent, w.parent.field
    incl = []
    for n in range(v.N):
        B = np.ascontiguousarray(w.spaces[n].basis.T)
        img = v.apply_incl(n, B)
        incl.append(np.ascontiguousarray(img[list(w.spaces[n + 1].pivots), :]))
    sym = []
    for n in range(v.N + 1):
        B = np.ascontiguousarray(w.spaces[n].basis.T)
        piv = list(w.spaces[n].pivots)
        sym.append([np.ascontiguousarray(v.apply_sym(n, i, B)[piv, :]) for i in range(1, n)])
    out = FIModule(F, v.N, w.dims, incl, sym, bounds=bounds)
    out.sub_data = w
    return out


def direct_sum(a: FIModule, b: FIModule) -> FIModule:
    if a.field != b.field or a.N != b.N:
        raise ModuleError("direct sum needs a common field and window")
    bounds = None
    if a.bounds is not None and b.bounds is not None:
        bounds = (dmax(a.bounds[0], b.bounds[0]), dmax(a.bounds[1], b.bounds[1]))
    if isinstance(a, FreeModule) and isinstance(b, FreeModule):
        return FreeModule(a.field, a.degrees + b.degrees, a.N)
    F = a.field
    incl = [la.block(F, [[a.incl(n), la.zeros(F, a.dims[n + 1], b.dims[n])],
                         [la.zeros(F, b.dims[n + 1], a.dims[n]), b.incl(n)]]) for n in range(a.N)]
    sym = [[la.block(F, [[a.sym(n, i), la.zeros(F, a.dims[n], b.dims[n])],
                         [la.zeros(F, b.dims[n], a.dims[n]), b.sym(n, i)]]) for i in range(1, n)]
           for n in range(a.N + 1)]
    return FIModule(F, a.N, [x + y for x, y in zip(a.dims, b.dims)], incl, sym, bounds=bounds)


# functors ---------------------------------------------------------------------------

def restrict(v: FIModule, M: int) -> FIModule:
    """Forget degrees above M."""
    if M > v.N:
        raise ModuleError(f"cannot restrict window {v.N} to {M}")
    if M == v.N:
        return v
    if isinstance(v, FreeModule):
        return FreeModule(v.field, v.degrees, M, name=v.name)
    out = FIModule(v.field, M, v.dims[:M + 1], [v.incl(n) for n in range(M)],
                   [[v.sym(n, i) for i in range(1, n)] for n in range(M + 1)],
                   bounds=v.bounds, name=v.name)
    return out


def truncate(v: FIModule, n: int) -> FIModule:
    """tau_n: zero below degree n."""
    if n > v.N or n < 0:
        raise ModuleError(f"truncation degree {n} outside window {v.N}")
    F = v.field
    dims = [0 if m < n else v.dims[m] for m in range(v.N + 1)]
    incl = []
    for m in range(v.N):
        incl.append(v.incl(m) if m >= n else la.zeros(F, dims[m + 1], 0))
    sym = [[v.sym(m, i) if m >= n else la.zeros(F, 0, 0) for i in range(1, m)]
           for m in range(v.N + 1)]
    bounds = None
    if v.bounds is not None:
        bounds = (dmax(v.bounds[0], n), dmax(v.bounds[1], n + 1))
    return FIModule(F, v.N, dims, incl, sym, bounds=bounds)


def shift(v: FIModule) -> FIModule:
    """Sigma: (Sigma V)_n = V_{n+1}, S_n acting through the permutations fixing 1."""
    if v.N < 1:
        raise ModuleError("shift needs window N >= 1")
    F = v.field
    N = v.N - 1
    incl = [la.matmul(F, v.sym(n + 2, 1), v.incl(n + 1)) for n in range(N)]
    sym = [[v.sym(n + 1, i + 1) for i in range(1, n)] for n in range(N + 1)]
    return FIModule(F, N, v.dims[1:], incl, sym, bounds=v.bounds)


def shift_by(v: FIModule, d: int) -> FIModule:
    for _ in range(d):
        v = shift(v)
    return v


class ModuleMap:
    """Degreewise matrices f_n : source_n -> target_n over a common window."""

    def __init__(self, source: FIModule, target: FIModule, comps):
        if source.N != target.N:
            raise ModuleError(f"windows differ: {source.N} vs {target.N}")
        self.source, self.target = source, target
        self.comps = list(comps)
        for n, c in enumerate(self.comps):
            if c.shape != (target.dims[n], source.dims[n]):
                raise ModuleError(f"component {n} has shape {c.shape}")

    @property
    def N(self):
        return self.source.N

    @property
    def field(self):
        return self.source.field

    def failures(self):
        F, s, t = self.field, self.source, self.target
        out = []
        for n in range(self.N):
            if not la.equal(la.matmul(F, self.comps[n + 1], s.incl(n)),
                            t.apply_incl(n, self.comps[n])):
                out.append((n, "pi"))
        for n in range(self.N + 1):
            for i in range(1, n):
                if not la.equal(la.matmul(F, self.comps[n], s.sym(n, i)),
                                t.apply_sym(n, i, self.comps[n])):
                    out.append((n, f"s_{i}"))
        return out

    def verify(self):
        return not self.failures()

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """self o other."""
        return ModuleMap(other.source, self.target,
                         [la.matmul(self.field, a, b) for a, b in zip(self.comps, other.comps)])

    def kernel(self) -> GradedSubmodule:
        return GradedSubmodule(self.source, [la.kernel(self.field, c) for c in self.comps])

    def image(self) -> GradedSubmodule:
        return GradedSubmodule(self.target, [la.image(self.field, c) for c in self.comps])

    def cokernel(self, bounds="inherit") -> FIModule:
        return quotient(self.target, self.image(), bounds=bounds)

    def ranks(self):
        return [la.rank(self.field, c) for c in self.comps]

    def is_iso(self):
        return all(c.shape[0] == c.shape[1] and la.rank(self.field, c) == c.shape[0]
                   for c in self.comps)

    def is_zero(self):
        return all(la.is_zero(c) for c in self.comps)

    def restrict(self, M):
        return ModuleMap(restrict(self.source, M), restrict(self.target, M), self.comps[:M + 1])

    def shifted(self, d=1):
        """Sigma^d applied to the map."""
        return ModuleMap(shift_by(self.source, d), shift_by(self.target, d), self.comps[d:])


def identity_map(v: FIModule) -> ModuleMap:
    return ModuleMap(v, v, [la.eye(v.field, d) for d in v.dims])


def natural_map(v: FIModule) -> ModuleMap:
    """pi*_V : V -> Sigma V, with V restricted to the window of Sigma V."""
    if v.N < 1:
        raise ModuleError("natural map needs window N >= 1")
    return ModuleMap(restrict(v, v.N - 1), shift(v), [v.incl(n) for n in range(v.N)])


def natural_map_iterated(v: FIModule, d: int) -> ModuleMap:
    """V -> Sigma^d V, the composite of natural maps, V restricted to window N - d."""
    F = v.field
    M = v.N - d
    comps = [la.eye(F, v.dims[n]) for n in range(M + 1)]
    s = v
    for _ in range(d):
        comps = [la.matmul(F, s.incl(n), comps[n]) for n in range(M + 1)]
        s = shift(s)
    return ModuleMap(restrict(v, M), restrict(s, M) if s.N > M else s, comps)


def derivative(v: FIModule) -> FIModule:
    """D V = coker(V -> Sigma V)."""
    nat = natural_map(v)
    bounds = None
    if v.bounds is not None:
        g, r = v.bounds
        bounds = (NEG_INF, NEG_INF) if g <= 0 else (g - 1, r - 1)
    out = quotient(nat.target, nat.image(), bounds=bounds)
    return out


def sigma_d_commute_iso(v: FIModule) -> ModuleMap:
    """Sigma D V -> D Sigma V, [x] -> [s_1 x] on V_{n+2}."""
    if v.N < 2:
        raise ModuleError("need window N >= 2")
    F = v.field
    dv = derivative(v)
    sdv = shift(dv)
    dsv = derivative(shift(v))
    comps = []
    for n in range(v.N - 1):
        lift = quotient_lift(dv, n + 1)            # (DV)_{n+1} -> V_{n+2}
        x = la.matmul(F, v.sym(n + 2, 1), lift)
        comps.append(quotient_projection(dsv, n, x))
    sdv.bounds = dsv.bounds
    return ModuleMap(sdv, dsv, comps)


# torsion ------------------------------------------------------------------------------

def _composites_to_top(v: FIModule):
    """C_n = M_{N-1} ... M_n : V_n -> V_N."""
    F = v.field
    comps = [None] * (v.N + 1)
    comps[v.N] = la.eye(F, v.dims[v.N])
    for n in range(v.N - 1, -1, -1):
        comps[n] = la.matmul(F, comps[n + 1], v.incl(n))
    return comps


def kernel_dims_of_incl(v: FIModule):
    return [v.dims[n] - la.rank(v.field, v.incl(n)) for n in range(v.N)]


def torsion_degree(v: FIModule, margin: int = 2) -> Degree:
    if isinstance(v, FreeModule):
        return Degree(NEG_INF, True)
    ker = kernel_dims_of_incl(v)
    td = max((n for n in range(v.N) if ker[n]), default=NEG_INF)
    bound = torsion_bound(v)
    if bound is not None:
        # all torsion sits in degrees <= bound, so the scan is exact once bound < N
        certified = bound < v.N
    else:
        certified = all(ker[n] == 0 for n in range(max(0, v.N - margin), v.N))
    return Degree(td, certified)


def torsion_bound(v: FIModule):
    """td(V) <= g + r - 1 for V presented in degrees (g, r); None without bounds."""
    if v.bounds is None:
        return None
    g, r = v.bounds
    if g == NEG_INF or r == NEG_INF:
        return NEG_INF
    return g + r - 1


@dataclass
class TorsionSplit:
    torsion: GradedSubmodule
    free_part: FIModule
    certified: bool
    degree: Degree


def torsion_split(v: FIModule, margin: int = 2) -> TorsionSplit:
    """0 -> V_T -> V -> V_F -> 0 with (V_T)_n = ker(V_n -> V_N)."""
    td = torsion_degree(v, margin)
    if td.is_neg_inf and (td.certified or isinstance(v, FreeModule)):
        return TorsionSplit(zero_submodule(v), v, td.certified, td)
    comps = _composites_to_top(v)
    T = GradedSubmodule(v, [la.kernel(v.field, c) for c in comps])
    bounds = None
    if v.bounds is not None and td.certified:
        bounds = (v.bounds[0], dmax(v.bounds[1], td.value))
    VF = quotient(v, T, bounds=bounds)
    return TorsionSplit(T, VF, td.certified, td)


class GradedVectorSequence:
    """A C_0-module: vector spaces per degree with S_n actions and zero connecting maps.

    ``sym`` may be ``None`` when only dimensions were computed.
    """

    def __init__(self, field, dims, sym=None, known_to=None):
        self.field = field
        self.dims = list(dims)
        self.sym = sym
        self.known_to = len(self.dims) - 1 if known_to is None else known_to

    def top_degree(self):
        return max((n for n, d in enumerate(self.dims) if d), default=NEG_INF)

    def is_zero(self):
        return not any(self.dims)

    def to_json(self):
        return {"dims": list(self.dims), "known_to": self.known_to}

    def __repr__(self):
        return f"GradedVectorSequence({self.dims})"
