"""FI-homology H_s(V) = Tor_s(C_0, V) and free resolutions.

Main route: the Koszul-type complex whose degree-n, position-p term is the sum
over p-subsets T of [n] of V([n] - T), with differential removing one point of
T (alternating signs).  Oracle route: a deliberately redundant free resolution
tensored down to C_0 (keep the top generator coordinates).  A third reading of
the same numbers comes from any resolution through the cycles Z^s.

Certification: with presentation bounds (g, r) we know hd_1 <= r and
hd_s <= g + r + s - 1, so H_s vanishes above B_1 = r, B_s = g + r + s - 1.
A degree is certified when everything up to the horizon was computed.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import combinations
from math import comb

import numpy as np

from . import fi
from . import linalg as la
from .linalg import Subspace
from .module import (NEG_INF, Degree, FIModule, FreeModule, GradedSubmodule,
                     GradedVectorSequence, ModuleMap, dmax, restrict, shift,
                     sym_closure, translate_up)

# largest matrix (rows * cols) we are willing to row-reduce in one go
DEFAULT_BUDGET = 6_000_000


class BudgetExceeded(RuntimeError):
    pass


# H_0 -----------------------------------------------------------------------------

def j_subspaces(v: FIModule):
    """(JV)_n for every degree via coset translates of V_{n-1}."""
    out = [Subspace.zero(v.field, v.dims[0])]
    for n in range(1, v.N + 1):
        out.append(translate_up(v, n - 1, Subspace.full(v.field, v.dims[n - 1])))
    return out


def j_subspaces_orbit_closure(v: FIModule):
    """(JV)_n as the S_n-closure of im(pi_{n-1}); independent of the coset formula."""
    out = [Subspace.zero(v.field, v.dims[0])]
    for n in range(1, v.N + 1):
        out.append(sym_closure(v, n, la.image(v.field, v.incl(n - 1))))
    return out


def _h0_from(v, J):
    dims, sym = [], []
    for n in range(v.N + 1):
        P, S = la.quotient_basis(v.dims[n], J[n])
        dims.append(P.shape[0])
        sym.append([la.matmul(v.field, P, v.apply_sym(n, i, S)) for i in range(1, n)])
    return GradedVectorSequence(v.field, dims, sym)


def h0(v: FIModule) -> GradedVectorSequence:
    """H_0(V) = V / JV with the induced symmetric-group actions."""
    return _h0_from(v, j_subspaces(v))


def h0_oracle(v: FIModule) -> GradedVectorSequence:
    return _h0_from(v, j_subspaces_orbit_closure(v))


def generating_degree(v: FIModule) -> Degree:
    if isinstance(v, FreeModule):
        return Degree(max(v.degrees) if v.degrees else NEG_INF, True)
    J = j_subspaces(v)
    top = max((n for n in range(v.N + 1) if J[n].dim < v.dims[n]), default=NEG_INF)
    certified = v.bounds is not None and v.bounds[0] <= v.N
    return Degree(top, certified)


# horizons ----------------------------------------------------------------------------

def horizon(v: FIModule, s: int):
    """Degree above which H_s(V) vanishes, from the presentation bounds (None if unknown)."""
    if v.bounds is None:
        return None
    g, r = v.bounds
    if g == NEG_INF:
        return NEG_INF
    if s == 0:
        return g
    if r == NEG_INF:
        return NEG_INF
    if s == 1:
        return r
    return g + r + s - 1


# Koszul complex ------------------------------------------------------------------------

def koszul_dim(v: FIModule, p: int, n: int) -> int:
    if p < 0 or p > n:
        return 0
    return comb(n, p) * v.dims[n - p]


def koszul_differential(v: FIModule, p: int, n: int) -> np.ndarray:
    """d_p : C_p(n) -> C_{p-1}(n).

    The T-summand maps to the (T - t_j)-summand by (-1)^j V(f_q) where q is the
    position of t_j inside [n] - (T - t_j), i.e. q = t_j - j (0-based j).
    """
    F = v.field
    rows, cols = koszul_dim(v, p - 1, n), koszul_dim(v, p, n)
    D = la.zeros(F, rows, cols)
    if rows == 0 or cols == 0:
        return D
    m = n - p
    a, b = v.dims[m + 1], v.dims[m]
    index = {T: i for i, T in enumerate(combinations(range(1, n + 1), p - 1))}
    cosets = v.coset_maps(m)
    negs = [la.neg(F, c) for c in cosets]
    for ci, T in enumerate(combinations(range(1, n + 1), p)):
        for j, t in enumerate(T):
            ri = index[T[:j] + T[j + 1:]]
            q = t - j
            D[ri * a:(ri + 1) * a, ci * b:(ci + 1) * b] = cosets[q - 1] if j % 2 == 0 else negs[q - 1]
    return D


def koszul_rank(v, p, n, budget=DEFAULT_BUDGET):
    rows, cols = koszul_dim(v, p - 1, n), koszul_dim(v, p, n)
    if rows == 0 or cols == 0:
        return 0
    if rows * cols > budget:
        raise BudgetExceeded(f"d_{p} at degree {n} is {rows}x{cols}")
    return la.rank(v.field, koszul_differential(v, p, n))


def koszul_cycle_witness(v: FIModule, p: int, n: int):
    """A cycle of C_p(n) that is not a boundary, or None."""
    F = v.field
    Z = la.kernel(F, koszul_differential(v, p, n)) if koszul_dim(v, p, n) else Subspace.zero(F, 0)
    B = la.image(F, koszul_differential(v, p + 1, n)) if koszul_dim(v, p + 1, n) else Subspace.zero(F, Z.ambient)
    for row in Z.basis:
        if not B.contains(row):
            return row
    return None


@dataclass
class HomologyReport:
    field: object
    smax: int
    groups: list                    # GradedVectorSequence per s
    hd: list                        # Degree per s
    horizons: list                  # B_s (None when unknown)
    computed_to: list               # last degree computed for each s
    route: str = "koszul"
    notes: list = dc_field(default_factory=list)

    def certified(self, s):
        return self.hd[s].certified

    def dims(self, s):
        return self.groups[s].dims

    def to_json(self):
        out = []
        for s in range(self.smax + 1):
            out.append({
                "s": s,
                "dims": list(self.groups[s].dims),
                "hd": self.hd[s].to_json(),
                "horizon": _json_deg(self.horizons[s]),
                "computed_to": self.computed_to[s],
            })
        return {"route": self.route, "homology": out, "notes": list(self.notes)}


def _json_deg(x):
    if x is None:
        return None
    return "-inf" if x == NEG_INF else int(x)


def _finish(v, smax, dims_per_s, computed_to, route, notes):
    """Turn per-degree dimensions into a report with hd_s and certification flags."""
    groups, hds, hors = [], [], []
    for s in range(smax + 1):
        B = horizon(v, s)
        hors.append(B)
        dims = dims_per_s[s]
        top = max((n for n, d in enumerate(dims) if d), default=NEG_INF)
        upto = computed_to[s]
        certified = B is not None and B <= upto
        # a nonzero class is certain, but hd itself needs the whole horizon
        groups.append(GradedVectorSequence(v.field, dims, known_to=upto))
        hds.append(Degree(top, bool(certified)))
    return HomologyReport(v.field, smax, groups, hds, hors, computed_to, route, notes)


def _targets(v, smax):
    out = []
    for s in range(smax + 1):
        B = horizon(v, s)
        out.append(v.N if B is None else int(min(v.N, B)) if B != NEG_INF else -1)
    return out


def homology(v: FIModule, smax: int, budget=DEFAULT_BUDGET) -> HomologyReport:
    """H_0..H_smax via the Koszul complex, computed up to each certification horizon."""
    tops = _targets(v, smax)
    need = {}
    for s, t in enumerate(tops):
        for p in (s, s + 1):
            if p >= 1:
                need[p] = max(need.get(p, -1), t)
    ranks = {}
    notes = []
    failed = {}
    for p, t in sorted(need.items()):
        for n in range(0, t + 1):
            if p in failed:
                break
            try:
                ranks[(p, n)] = koszul_rank(v, p, n, budget)
            except BudgetExceeded as exc:
                failed[p] = n
                notes.append(f"budget: {exc}")
    dims_per_s, computed_to = [], []
    for s in range(smax + 1):
        dims = []
        upto = -1
        for n in range(tops[s] + 1):
            if (s >= 1 and (s, n) not in ranks) or (s + 1, n) not in ranks:
                break
            r_in = ranks[(s + 1, n)]
            r_out = ranks[(s, n)] if s >= 1 else 0
            dims.append(koszul_dim(v, s, n) - r_in - r_out)
            upto = n
        B = horizon(v, s)
        if B is not None and B <= upto:
            upto = v.N
        dims = dims + [0] * (upto + 1 - len(dims)) if upto >= len(dims) else dims
        dims_per_s.append(dims)
        computed_to.append(upto)
    return _finish(v, smax, dims_per_s, computed_to, "koszul", notes)


# free resolutions ------------------------------------------------------------------------

@dataclass
class CoverStep:
    """One free cover P -> target (target = V or the previous free module)."""
    P: FreeModule
    gens: list          # (degree, vector in the target at that degree)
    maps: list          # per degree n: target_n x P_n matrix
    kernels: list       # Z_n as Subspace of P_n
    top: int            # last degree computed

    @property
    def degree(self):
        return max(self.P.degrees) if self.P.degrees else NEG_INF


def _cover(target: FIModule, spaces, top: int, redundant: bool, budget: int):
    """Choose generators of the submodule with degreewise spaces ``spaces`` of ``target``.

    Generators are added greedily in increasing degree: a vector of the space
    not yet reached becomes a free generator and its S_n-orbit span joins the
    image.  With ``redundant`` one extra copy of the first generator is added
    so the cover is never minimal.
    """
    F = target.field
    gens = []
    maps = []
    by_degree = {}
    for n in range(top + 1):
        blocks = []
        for d in sorted(by_degree):
            blocks.append(target.push(d, n, by_degree[d]))
        cols = la.hstack(F, blocks, target.dims[n])
        img = la.image(F, cols) if cols.shape[1] else Subspace.zero(F, target.dims[n])
        S = spaces[n]
        new = []
        if img.dim < S.dim:
            # rows of S not yet reached, reduced in one batch per new generator
            cand = np.arange(S.dim)
            while img.dim < S.dim and len(cand):
                rem = img.reduce(S.basis[cand])
                alive = np.flatnonzero(np.any(rem.astype(bool), axis=1))
                if not len(alive):
                    break
                cand = cand[alive]
                row = S.basis[cand[0]]
                orbit = sym_closure(target, n, Subspace.span(F, target.dims[n], row.reshape(1, -1)))
                img = la.subspace_sum(img, orbit)
                new.append(row)
                cand = cand[1:]
            if redundant and not gens and new:
                new.append(new[0].copy())
        if new:
            X = np.ascontiguousarray(np.vstack(new).T)
            by_degree[n] = X
            gens.extend((n, row) for row in new)
            blocks.append(target.push(n, n, X))
            cols = la.hstack(F, blocks, target.dims[n])
        if cols.shape[0] * cols.shape[1] > budget:
            raise BudgetExceeded(f"cover map at degree {n} is {cols.shape[0]}x{cols.shape[1]}")
        maps.append(cols)
    P = FreeModule(F, [d for d, _ in gens], top)
    kernels = [la.kernel(F, maps[n]) for n in range(top + 1)]
    return CoverStep(P, gens, maps, kernels, top)


def _run_resolution(v: FIModule, steps: int, top: int, redundant: bool, budget: int):
    """Steps 0..steps of a free resolution, computed through degree ``top``.

    When the budget is hit, the offending step and all later ones are
    recomputed through a smaller top degree.
    """
    out = []
    target = restrict(v, top) if top < v.N else v
    spaces = [Subspace.full(v.field, target.dims[n]) for n in range(top + 1)]
    for s in range(steps + 1):
        cur = top
        while True:
            try:
                step = _cover(target if cur == top else restrict(target, cur),
                              spaces[:cur + 1], cur, redundant, budget)
                break
            except BudgetExceeded:
                cur -= 1
                if cur < 0:
                    return out
        out.append(step)
        if cur < top:
            top = cur
        target, spaces = step.P, step.kernels
        if all(Z.dim == 0 for Z in spaces):
            # the cover is injective in every computed degree: nothing left to resolve
            for _ in range(s + 1, steps + 1):
                out.append(CoverStep(FreeModule(v.field, [], top), [],
                                     [la.zeros(v.field, d, 0) for d in step.P.dims],
                                     [Subspace.zero(v.field, 0) for _ in range(top + 1)], top))
            break
    return out


@dataclass
class FreeResolution:
    module: FIModule
    steps: list
    minimal: bool
    top: int

    @property
    def d(self):
        return [st.degree for st in self.steps]

    def cycles(self, s):
        return self.steps[s].kernels

    def map(self, s) -> ModuleMap:
        st = self.steps[s]
        tgt = restrict(self.module, st.top) if s == 0 else restrict(self.steps[s - 1].P, st.top)
        return ModuleMap(st.P, tgt, st.maps)

    def composites_vanish(self):
        F = self.module.field
        for s in range(1, len(self.steps)):
            a, b = self.steps[s - 1], self.steps[s]
            for n in range(b.top + 1):
                if a.maps[n].shape[1] and b.maps[n].shape[1]:
                    if not la.is_zero(la.matmul(F, a.maps[n], b.maps[n])):
                        return False
        return True

    def exact(self):
        """Image of each step equals the previous kernels (and the cover is onto V)."""
        F = self.module.field
        for s, st in enumerate(self.steps):
            for n in range(st.top + 1):
                img = la.image(F, st.maps[n]) if st.maps[n].shape[1] else None
                want = (self.module.dims[n] if s == 0 else self.steps[s - 1].kernels[n].dim)
                if (img.dim if img is not None else 0) != want:
                    return False
        return True

    def is_adaptable(self):
        """gd(P^{s+1}) = gd(Z^s), reading gd(Z^s) off a cover of Z^s."""
        for s in range(len(self.steps) - 1):
            if self.steps[s + 1].degree != gd_of_cycles(self, s):
                return False
        return True


def gd_of_cycles(res: FreeResolution, s: int):
    """Top degree where Z^s is not generated by lower degrees."""
    st = res.steps[s]
    P = st.P
    top = NEG_INF
    for n in range(st.top + 1):
        Z = st.kernels[n]
        if Z.dim == 0:
            continue
        if n == 0:
            top = 0
            continue
        JZ = _translate_free(P, n - 1, st.kernels[n - 1])
        if JZ.dim < Z.dim:
            top = n
    return top


def _translate_free(P: FreeModule, n: int, W: Subspace) -> Subspace:
    if W.dim == 0:
        return Subspace.zero(P.field, P.dims[n + 1])
    X = np.ascontiguousarray(W.basis.T)
    imgs = [np.ascontiguousarray(P.apply_coset(n, k, X).T) for k in range(1, n + 2)]
    return Subspace.span(P.field, P.dims[n + 1], np.vstack(imgs))


def minimal_cover(v: FIModule, top=None, budget=DEFAULT_BUDGET):
    """(P, cover map, Z) with generators chosen greedily from H_0 lifts."""
    top = v.N if top is None else top
    res = _run_resolution(v, 0, top, False, budget)
    st = res[0]
    tgt = restrict(v, st.top)
    cover = ModuleMap(st.P, tgt, st.maps)
    return st.P, cover, GradedSubmodule(st.P, st.kernels)


def resolve(v: FIModule, smax: int, top=None, budget=DEFAULT_BUDGET, redundant=False) -> FreeResolution:
    top = v.N if top is None else top
    steps = _run_resolution(v, smax, top, redundant, budget)
    minimal = all(_kernel_in_jp(st) for st in steps)
    last = min((st.top for st in steps), default=-1)
    return FreeResolution(v, steps, minimal, last)


def _kernel_in_jp(st: CoverStep) -> bool:
    for n in range(st.top + 1):
        Z = st.kernels[n]
        if Z.dim == 0:
            continue
        topc = st.P.top_indices(n)
        if topc and not la.is_zero(Z.basis[:, topc]):
            return False
    return True


def homology_from_resolution(res: FreeResolution, smax: int):
    """Dimension shifting: H_{s+1}(V) = H_1(Z^{s-1}) = (Z^s meet JP^s) / JZ^s.

    Only steps 0..smax-1 are used.  H_0 is V modulo the image of the
    lower-degree generators of the first cover.  Returns per-s dims through
    the common computed degree.
    """
    F = res.module.field
    out = []
    top = res.top
    st0 = res.steps[0]
    h0dims = []
    for n in range(top + 1):
        cols = _lower_columns(st0, n)
        h0dims.append(res.module.dims[n] - (la.rank(F, cols) if cols.shape[1] else 0))
    out.append(h0dims)
    for s in range(min(smax, len(res.steps))):
        out.append([_h1_of_cover(res.steps[s], n) for n in range(top + 1)])
    return out


def _h1_of_cover(st: CoverStep, n: int) -> int:
    """dim (Z meet JP)_n - dim (JZ)_n for the cover P -> M with kernel Z."""
    F, P = st.P.field, st.P
    topc = set(P.top_indices(n))
    nontop = [c for c in range(P.dims[n]) if c not in topc]
    D = st.maps[n][:, nontop]
    meet = len(nontop) - (la.rank(F, D) if D.size else 0)
    jz = _translate_free(P, n - 1, st.kernels[n - 1]).dim if n >= 1 else 0
    return meet - jz


def _lower_columns(st: CoverStep, n: int):
    """Columns of the degree-n map coming from generators of degree < n."""
    P = st.P
    offs = P.offsets(n)
    keep = []
    for j, d in enumerate(P.degrees):
        if d < n:
            keep.extend(range(offs[j], offs[j] + fi.count_injections(d, n)))
    return st.maps[n][:, keep]


def _report_from_dims(v, smax, per_s, reached, tops, route, notes):
    dims_per_s, computed_to = [], []
    for s in range(smax + 1):
        upto = min(reached, tops[s])
        dims = list(per_s[s][:upto + 1]) if s < len(per_s) else []
        upto = min(upto, len(dims) - 1)
        B = horizon(v, s)
        if B is not None and B <= upto:
            upto = v.N
        dims = dims + [0] * (upto + 1 - len(dims))
        dims_per_s.append(dims)
        computed_to.append(upto)
    return _finish(v, smax, dims_per_s, computed_to, route, notes)


def homology_oracle(v: FIModule, smax: int, budget=DEFAULT_BUDGET) -> HomologyReport:
    """Tor from a deliberately redundant free resolution, by dimension shifting.

    Shares no code with the Koszul route beyond linear algebra and the module
    actions.
    """
    tops = _targets(v, smax)
    top = max(tops) if tops else -1
    notes = []
    nsteps = max(smax - 1, 0)
    steps = _run_resolution(v, nsteps, top, True, budget) if top >= 0 else []
    reached = min((st.top for st in steps), default=-1)
    if top >= 0 and len(steps) < nsteps + 1:
        reached = -1
        notes.append("resolution stopped early")
    if reached < top:
        notes.append(f"oracle computed through degree {reached}")
    per_s = []
    if steps and reached >= 0:
        res = FreeResolution(v, steps, False, reached)
        per_s = homology_from_resolution(res, smax)
    return _report_from_dims(v, smax, per_s, reached, tops, "resolution", notes)


def homology_top_blocks(v: FIModule, smax: int, budget=DEFAULT_BUDGET) -> HomologyReport:
    """Tor as the homology of C_0 (x) P for a redundant resolution P (top-coordinate blocks).

    Needs steps 0..smax+1, so it is only practical on small modules.
    """
    F = v.field
    tops = _targets(v, smax)
    top = max(tops) if tops else -1
    notes = []
    steps = _run_resolution(v, smax + 1, top, True, budget) if top >= 0 else []
    reached = min((st.top for st in steps), default=-1)
    if top >= 0 and len(steps) < smax + 2:
        reached = -1
        notes.append("resolution stopped early")

    def block(s, n):
        """Induced map C_0 (x) P^s -> C_0 (x) P^{s-1} at degree n."""
        cols = steps[s].P.top_indices(n)
        rows = steps[s - 1].P.top_indices(n)
        return steps[s].maps[n][np.ix_(rows, cols)] if rows and cols else la.zeros(F, len(rows), len(cols))

    per_s = []
    for s in range(smax + 1):
        dims = []
        for n in range(reached + 1):
            size = len(steps[s].P.top_indices(n))
            r_out = la.rank(F, block(s, n)) if s >= 1 else 0
            r_in = la.rank(F, block(s + 1, n))
            dims.append(size - r_out - r_in)
        per_s.append(dims)
    return _report_from_dims(v, smax, per_s, reached, tops, "top-blocks", notes)


def compare_reports(a: HomologyReport, b: HomologyReport):
    """Degrees where both routes computed H_s; returns (compared, mismatches)."""
    compared, bad = 0, []
    for s in range(min(a.smax, b.smax) + 1):
        da, db = a.groups[s].dims, b.groups[s].dims
        for n in range(min(len(da), len(db))):
            compared += 1
            if da[n] != db[n]:
                bad.append((s, n, da[n], db[n]))
    return compared, bad


# inequality checks ------------------------------------------------------------------------

@dataclass
class InequalityCheck:
    name: str
    s: int
    lhs: float
    rhs: float
    certified: bool

    @property
    def holds(self):
        return self.lhs <= self.rhs

    def to_json(self):
        return {"name": self.name, "s": self.s, "lhs": _json_deg(self.lhs),
                "rhs": _json_deg(self.rhs), "holds": self.holds, "certified": self.certified}


def check_shift_inequality(v: FIModule, smax: int, budget=DEFAULT_BUDGET, rep=None):
    """hd_s(V) <= max{hd_0(V)+1, ..., hd_{s-1}(V)+1, hd_s(Sigma V)+1}."""
    rep = rep or homology(v, smax, budget)
    srep = homology(shift(v), smax, budget)
    out = []
    for s in range(smax + 1):
        rhs = dmax(*[rep.hd[t].value + 1 for t in range(s)], srep.hd[s].value + 1)
        cert = all(rep.hd[t].certified for t in range(s + 1)) and srep.hd[s].certified
        out.append(InequalityCheck("shift", s, rep.hd[s].value, rhs, cert))
    return out


def regularity_checks(v: FIModule, smax: int, rep: HomologyReport, td: Degree, torsion_free: bool,
                      is_torsion: bool):
    """Theorem-style upper bounds on hd_s for 1 <= s <= smax."""
    out = []
    gd = rep.hd[0]
    h1 = rep.hd[1] if smax >= 1 else None
    for s in range(1, smax + 1):
        hd = rep.hd[s]
        base = gd.certified and hd.certified
        out.append(InequalityCheck("regularity", s, hd.value,
                                   dmax(2 * gd.value - 1, td.value) + s,
                                   base and td.certified))
        out.append(InequalityCheck("ce", s, hd.value, gd.value + h1.value + s - 1,
                                   base and h1.certified))
        if is_torsion:
            out.append(InequalityCheck("torsion", s, hd.value, td.value + s, hd.certified and td.certified))
        if torsion_free:
            out.append(InequalityCheck("torsionless", s, hd.value, 2 * gd.value + s - 1, base))
    return out
