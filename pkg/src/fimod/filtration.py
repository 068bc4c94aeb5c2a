"""Filtrations by induced modules, projectivity over group algebras, and pd.

The layers of the filtration are the quotients V^s / V^{s-1} where V^s is the
submodule generated in degrees <= s.  A layer is "basic" when it is induced
from its degree-s part T_s, i.e. isomorphic to C (x)_{kS_s} T_s.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np

from . import fi
from . import linalg as la
from . import module as md
from .homology import DEFAULT_BUDGET, BudgetExceeded, homology, koszul_cycle_witness
from .module import NEG_INF, FIModule, ModuleMap

YES, NO, UNCERTIFIED = "Yes", "No", "Uncertified"
PROJECTIVE, INFINITE_PD = "Projective", "InfinitePd"


class FiltrationError(RuntimeError):
    pass


# modules over k S_n ----------------------------------------------------------------------

class SymmetricGroupModule:
    """A k S_n-module given by the matrices of s_1, ..., s_{n-1}."""

    def __init__(self, field, n: int, dim: int, sym=None):
        self.field, self.n, self.dim = field, n, dim
        self.sym = list(sym) if sym is not None else []
        if len(self.sym) != max(n - 1, 0):
            raise ValueError(f"S_{n} needs {max(n - 1, 0)} generator matrices")
        self._cache = {}

    def action(self, perm):
        """Matrix of a permutation given as an image tuple."""
        perm = tuple(perm)
        if perm not in self._cache:
            A = la.eye(self.field, self.dim)
            for i in fi.transposition_word(perm):
                A = la.matmul(self.field, A, self.sym[i - 1])
            self._cache[perm] = A
        return self._cache[perm]

    def failures(self):
        F, I = self.field, la.eye(self.field, self.dim)
        bad = []
        for i, s in enumerate(self.sym, start=1):
            if not la.equal(la.matmul(F, s, s), I):
                bad.append(f"s_{i}^2")
            if i < len(self.sym):
                t = self.sym[i]
                if not la.equal(la.matmul(F, la.matmul(F, s, t), s), la.matmul(F, la.matmul(F, t, s), t)):
                    bad.append(f"braid {i}")
            for j in range(i + 2, len(self.sym) + 1):
                t = self.sym[j - 1]
                if not la.equal(la.matmul(F, s, t), la.matmul(F, t, s)):
                    bad.append(f"commute {i},{j}")
        return bad

    def __repr__(self):
        return f"SymmetricGroupModule(n={self.n}, dim={self.dim}, {self.field})"


def regular_module(field, n):
    perms = fi.all_permutations(n)
    index = {p: i for i, p in enumerate(perms)}
    mats = []
    for i in range(1, n):
        s = fi.adjacent_transposition(n, i).images
        A = la.zeros(field, len(perms), len(perms))
        for j, p in enumerate(perms):
            A[index[fi.compose_tuples(s, p)], j] = field.one
        mats.append(A)
    return SymmetricGroupModule(field, n, len(perms), mats)


def trivial_module(field, n):
    return SymmetricGroupModule(field, n, 1, [la.eye(field, 1) for _ in range(n - 1)])


def sign_module(field, n):
    return SymmetricGroupModule(field, n, 1, [la.neg(field, la.eye(field, 1)) for _ in range(n - 1)])


def zero_group_module(field, n):
    return SymmetricGroupModule(field, n, 0, [la.zeros(field, 0, 0) for _ in range(n - 1)])


def degree_part(v: FIModule, s: int) -> SymmetricGroupModule:
    return SymmetricGroupModule(v.field, s, v.dims[s], [v.sym(s, i) for i in range(1, s)])


# induction -----------------------------------------------------------------------------------

def induce(t: SymmetricGroupModule, N: int) -> FIModule:
    """C (x)_{kS_i} T on degrees 0..N.

    Degree n has basis g (x) b with g an increasing injection [i] -> [n].  An
    injection f acts by f g = h sigma with h increasing, so f (g (x) b) = h (x) sigma b.
    """
    F, i, d = t.field, t.n, t.dim
    if i > N:
        raise md.ModuleError(f"cannot induce from S_{i} into window {N}")
    bases = [fi.increasing_injections(i, n) for n in range(N + 1)]
    index = [{g: k for k, g in enumerate(b)} for b in bases]
    dims = [len(b) * d for b in bases]

    def act(images_of, n, m):
        A = la.zeros(F, dims[m], dims[n])
        if d == 0:
            return A
        for k, g in enumerate(bases[n]):
            h, sigma = fi.standardize(images_of(g))
            r = index[m][h]
            A[r * d:(r + 1) * d, k * d:(k + 1) * d] = t.action(sigma)
        return A

    incl = [act(lambda g: tuple(a + 1 for a in g), n, n + 1) for n in range(N)]
    sym = []
    for n in range(N + 1):
        row = []
        for j in range(1, n):
            sw = fi.adjacent_transposition(n, j)
            row.append(act(lambda g: tuple(sw(a) for a in g), n, n))
        sym.append(row)
    bounds = (NEG_INF, NEG_INF) if d == 0 else (i, i)
    out = FIModule(F, N, dims, incl, sym, bounds=bounds, name=f"induced from S_{i}")
    out.induced_from = t
    return out


def counit(t: SymmetricGroupModule, layer: FIModule, induced=None) -> ModuleMap:
    """C (x) T_s -> L sending g (x) b to L(g) b, where T_s = L_s."""
    F, s = layer.field, t.n
    ind = induced if induced is not None else induce(t, layer.N)
    comps = []
    for n in range(layer.N + 1):
        cols = [layer.action(fi.Injection(g, n)) for g in fi.increasing_injections(s, n)]
        comps.append(la.hstack(F, cols, layer.dims[n]) if cols else la.zeros(F, layer.dims[n], 0))
    return ModuleMap(ind, layer, comps)


# projectivity over k S_n ------------------------------------------------------------------

def _all_actions(t: SymmetricGroupModule):
    return [(p, t.action(p)) for p in fi.all_permutations(t.n)]


def is_projective_over_group_algebra(t: SymmetricGroupModule, budget=DEFAULT_BUDGET) -> bool:
    """Higman's criterion: T is projective iff some phi in End_k(T) has
    sum over sigma of sigma phi sigma^{-1} equal to the identity."""
    F, d = t.field, t.dim
    if d == 0:
        return True
    acts = dict(_all_actions(t))
    if d * d * d * d > budget:
        raise BudgetExceeded(f"projectivity system of size {d * d}")
    # vec(A phi B) = kron(B^T, A) vec(phi) with column-major vec
    M = la.zeros(F, d * d, d * d)
    for p, A in acts.items():
        B = acts[fi.inverse_permutation(p)]
        M = la.add(F, M, _kron(F, np.ascontiguousarray(B.T), A))
    rhs = la.eye(F, d).T.reshape(-1)
    return la.solve(F, M, rhs) is not None


def _kron(F, A, B):
    if F.is_rational:
        return np.kron(A, B)
    return la.normalize(F, np.kron(A, B))


def is_projective_by_section(t: SymmetricGroupModule) -> bool:
    """Decides whether k S_n (x)_k T -> T (sigma (x) b -> sigma b) splits equivariantly.

    Unknown: the section as a (n! d) x d matrix X.  Equations: mu X = I and
    L(s_i) X = X T(s_i) for every adjacent transposition.
    """
    F, n, d = t.field, t.n, t.dim
    if d == 0:
        return True
    perms = fi.all_permutations(n)
    index = {p: i for i, p in enumerate(perms)}
    big = len(perms) * d
    mu = la.hstack(F, [t.action(p) for p in perms], d)
    # left multiplication by s_i permutes the sigma blocks
    eqs, rhs = [], []
    I = la.eye(F, d)
    unknowns = big * d
    # X column-major: vec(X)[c * big + r] = X[r, c]
    for c in range(d):
        blk = la.zeros(F, d, unknowns)
        blk[:, c * big:(c + 1) * big] = mu
        eqs.append(blk)
        rhs.append(I[:, c])
    for i in range(1, n):
        s = fi.adjacent_transposition(n, i).images
        L = la.zeros(F, big, big)
        for j, p in enumerate(perms):
            k = index[fi.compose_tuples(s, p)]
            L[k * d:(k + 1) * d, j * d:(j + 1) * d] = I
        Ts = t.sym[i - 1]
        # vec(L X - X T) = (I (x) L - T^T (x) I) vec(X)
        eqs.append(la.sub(F, _kron(F, I, L), _kron(F, np.ascontiguousarray(Ts.T), la.eye(F, big))))
        rhs.append(la.zeros(F, 1, big * d).reshape(-1))
    A = la.vstack(F, eqs, unknowns)
    b = np.concatenate(rhs)
    return la.solve(F, A, b) is not None


# the filtered test -------------------------------------------------------------------------

@dataclass
class FiltrationReport:
    is_filtered: str
    certified_up_to: int
    witness: dict = None
    layers: list = dc_field(default_factory=list)     # (s, T_s)
    chain_dims: list = dc_field(default_factory=list)
    notes: list = dc_field(default_factory=list)

    def to_json(self):
        out = {"is_filtered": self.is_filtered, "certified_up_to": self.certified_up_to,
               "witness": self.witness, "notes": list(self.notes)}
        if self.layers:
            out["layers"] = [{"s": s, "dim_T": t.dim} for s, t in self.layers]
            out["chain_dims"] = [list(d) for d in self.chain_dims]
        return out


def is_sharp_filtered(v: FIModule, budget=DEFAULT_BUDGET, rep=None) -> FiltrationReport:
    """Yes iff H_1(V) = 0 is certified; No with a nonzero H_1 class; else Uncertified."""
    rep = rep or homology(v, 1, budget)
    dims = rep.dims(1)
    for n, dim in enumerate(dims):
        if dim:
            w = koszul_cycle_witness(v, 1, n)
            vec = [str(x) for x in w] if w is not None else None
            return FiltrationReport(NO, rep.computed_to[1],
                                    {"degree": n, "dim_H1": dim, "cycle": vec})
    if rep.hd[1].certified:
        return FiltrationReport(YES, v.N)
    return FiltrationReport(UNCERTIFIED, rep.computed_to[1], notes=list(rep.notes))


def layer_module(v: FIModule, lower: md.GradedSubmodule, upper: md.GradedSubmodule) -> FIModule:
    """upper / lower as an FI-module (lower must sit inside upper)."""
    U = md.as_module(upper)
    spaces = []
    for n in range(v.N + 1):
        piv = list(upper.spaces[n].pivots)
        coords = np.ascontiguousarray(lower.spaces[n].basis[:, piv])
        spaces.append(la.Subspace.span(v.field, U.dims[n], coords))
    return md.quotient(U, md.GradedSubmodule(U, spaces))


def extract_filtration(v: FIModule, certified=None) -> FiltrationReport:
    """Build V^0 <= V^1 <= ... and check every layer against the module induced from it.

    Succeeds (Yes) when each nonzero layer L = V^s / V^{s-1} has the dimensions of
    C (x) L_s and the counit onto L is surjective in every degree of the window.
    ``certified`` tells whether the verdict is known to hold beyond the window.
    """
    N = v.N
    chain, layers, notes = [], [], []
    prev = md.zero_submodule(v)
    ok = True
    for s in range(N + 1):
        cur = md.below_degree_submodule(v, s)
        chain.append(cur.dims)
        if cur.dims != prev.dims:
            L = layer_module(v, prev, cur)
            T = degree_part(L, s)
            ind = induce(T, N)
            if ind.dims != L.dims:
                ok = False
                bad = next(n for n in range(N + 1) if ind.dims[n] != L.dims[n])
                notes.append(f"layer {s}: degree {bad} has dimension {L.dims[bad]}, "
                             f"induced module has {ind.dims[bad]}")
            else:
                eps = counit(T, L, ind)
                ranks = eps.ranks()
                short = [n for n in range(N + 1) if ranks[n] < L.dims[n]]
                if short:
                    ok = False
                    notes.append(f"layer {s}: counit not onto in degree {short[0]}")
            layers.append((s, T))
        prev = cur
        if list(cur.dims) == list(v.dims):
            break
    if certified is None:
        certified = False
    verdict = YES if ok else NO
    if not certified:
        notes.append("verdict holds on the window only")
    return FiltrationReport(verdict, N, None, layers, chain, notes)


def dimension_polynomial_check(v: FIModule, layers):
    """dims(V)_n == sum_s binom(n, s) dim T_s at every degree; returns (ok, coefficients)."""
    coeffs = {s: t.dim for s, t in layers}
    predicted = [sum(fi.binomial(n, s) * c for s, c in coeffs.items()) for n in range(v.N + 1)]
    return predicted == list(v.dims), sorted(coeffs.items()), predicted


# projective dimension --------------------------------------------------------------------

@dataclass
class PdReport:
    classification: str
    components: list = dc_field(default_factory=list)   # (s, dim T_s, projective)
    filtered: FiltrationReport = None

    def to_json(self):
        return {"classification": self.classification,
                "pd": 0 if self.classification == PROJECTIVE else None,
                "components": [{"s": s, "dim_T": d, "projective": p} for s, d, p in self.components],
                "filtered": self.filtered.to_json() if self.filtered else None}


def classify_pd(v: FIModule, budget=DEFAULT_BUDGET) -> PdReport:
    """Over a field a finitely generated module has finite pd iff it is projective,
    and it is projective iff it is filtered with projective components."""
    rep = is_sharp_filtered(v, budget)
    if rep.is_filtered == NO:
        return PdReport(INFINITE_PD, [], rep)
    if rep.is_filtered == UNCERTIFIED:
        return PdReport(UNCERTIFIED, [], rep)
    ext = extract_filtration(v, certified=True)
    if ext.is_filtered != YES:
        raise FiltrationError("H_1 vanishes but the layers are not induced: " + "; ".join(ext.notes))
    comps = [(s, t.dim, is_projective_over_group_algebra(t, budget)) for s, t in ext.layers]
    cls = PROJECTIVE if all(p for _, _, p in comps) else INFINITE_PD
    return PdReport(cls, comps, ext)


def shift_until_filtered(v: FIModule, dmax: int, budget=DEFAULT_BUDGET):
    """Smallest d <= dmax with Sigma_d V certified filtered; (d or None, per-d verdicts)."""
    tried = []
    w = v
    for d in range(dmax + 1):
        if d:
            if w.N < 1:
                break
            w = md.shift(w)
        try:
            rep = is_sharp_filtered(w, budget)
        except BudgetExceeded:
            tried.append((d, UNCERTIFIED))
            continue
        tried.append((d, rep.is_filtered))
        if rep.is_filtered == YES:
            return d, tried
    return None, tried
