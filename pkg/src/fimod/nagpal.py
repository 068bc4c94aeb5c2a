"""The finite complex 0 -> V -> F^0 -> ... -> F^n -> 0 of filtered modules.

Step i: split V^i into torsion and torsionless parts, shift the torsionless
part V^i_F until it is filtered (F^i = Sigma_{N_i} V^i_F, N_i minimal), and
continue with V^{i+1} = coker(V^i -> F^i).  Every shift eats window degrees,
so all terms end up restricted to a common window.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from . import linalg as la
from . import module as md
from .filtration import shift_until_filtered
from .homology import DEFAULT_BUDGET, generating_degree, homology
from .module import NEG_INF, Degree, FIModule, ModuleMap, dmax


@dataclass
class Step:
    V: FIModule                 # V^i on its own window
    split: md.TorsionSplit
    shift: int = None           # N_i
    F: FIModule = None          # Sigma_{N_i} V^i_F
    delta: ModuleMap = None     # V^i -> F^i (window of F^i)
    filtered_certified: bool = False


@dataclass
class FilteredComplex:
    v: FIModule
    steps: list
    window: int
    complete: bool
    terms: list = dc_field(default_factory=list)     # F^0..F^n on the common window
    maps: list = dc_field(default_factory=list)      # V -> F^0, F^0 -> F^1, ...
    source: FIModule = None                          # V on the common window
    notes: list = dc_field(default_factory=list)

    @property
    def length(self):
        return len(self.terms) - 1

    @property
    def shifts(self):
        return [st.shift for st in self.steps if st.F is not None]


def _bounds_after(st: Step):
    """Presentation bounds of coker(V^i -> F^i)."""
    if st.F.bounds is None or st.V.bounds is None:
        return None
    gF, rF = st.F.bounds
    return (gF, dmax(rF, st.V.bounds[0]))


def _projection_to_free_part(st: Step, M: int):
    """Components of V^i -> V^i_F on degrees 0..M."""
    F, VF = st.V.field, st.split.free_part
    if VF is st.V:
        return [la.eye(F, st.V.dims[n]) for n in range(M + 1)]
    return [md.quotient_projection(VF, n, la.eye(F, st.V.dims[n])) for n in range(M + 1)]


def build_nagpal_complex(v: FIModule, margin: int = 2, budget=DEFAULT_BUDGET,
                         max_steps=None) -> FilteredComplex:
    steps, notes = [], []
    cur = v
    complete = False
    limit = max_steps if max_steps is not None else v.N + 1
    for _ in range(limit):
        if cur.is_zero():
            complete = True
            break
        split = md.torsion_split(cur, margin)
        st = Step(cur, split)
        steps.append(st)
        if not split.certified:
            notes.append(f"step {len(steps) - 1}: torsion degree not certified")
        VF = split.free_part
        if VF.is_zero():
            complete = True
            break
        d, tried = shift_until_filtered(VF, VF.N - 1, budget)
        if d is None:
            notes.append(f"step {len(steps) - 1}: no certified filtered shift in window ({tried})")
            break
        nat = md.natural_map_iterated(VF, d)
        F = nat.target
        F.bounds = VF.bounds
        proj = _projection_to_free_part(st, F.N)
        comps = [la.matmul(v.field, nat.comps[n], proj[n]) for n in range(F.N + 1)]
        st.shift, st.F = d, F
        st.delta = ModuleMap(md.restrict(cur, F.N), F, comps)
        st.filtered_certified = True
        cur = st.delta.cokernel(bounds=_bounds_after(st))
    else:
        notes.append("step limit reached")
    c = FilteredComplex(v, steps, None, complete, notes=notes)
    _assemble(c)
    return c


def _assemble(c: FilteredComplex):
    """Restrict everything to the smallest window and compose the differentials."""
    filled = [st for st in c.steps if st.F is not None]
    W = min([st.F.N for st in filled], default=c.v.N)
    c.window = W
    c.source = md.restrict(c.v, W)
    c.terms = [md.restrict(st.F, W) for st in filled]
    c.maps = []
    fld = c.v.field
    for i, st in enumerate(filled):
        delta = [st.delta.comps[n] for n in range(W + 1)]
        if i == 0:
            c.maps.append(ModuleMap(c.source, c.terms[0], delta))
        else:
            # F^{i-1} -> V^i = coker(delta_{i-1}) -> F^i
            Vi = st.V
            comps = [la.matmul(fld, delta[n], md.quotient_projection(Vi, n, la.eye(fld, c.terms[i - 1].dims[n])))
                     for n in range(W + 1)]
            c.maps.append(ModuleMap(c.terms[i - 1], c.terms[i], comps))


# verification ----------------------------------------------------------------------------

@dataclass
class ComplexReport:
    checks: list = dc_field(default_factory=list)    # (name, holds, certified, detail)
    homology_dims: list = dc_field(default_factory=list)
    window: int = 0
    length: int = -1
    shifts: list = dc_field(default_factory=list)
    observations: list = dc_field(default_factory=list)

    @property
    def ok(self):
        return all(h for _, h, _, _ in self.checks)

    @property
    def certified(self):
        return all(c for _, _, c, _ in self.checks)

    def violations(self):
        return [(n, d) for n, h, c, d in self.checks if not h]

    def to_json(self):
        return {"window": self.window, "length": self.length, "shifts": self.shifts,
                "homology_dims": [list(d) for d in self.homology_dims],
                "observations": list(self.observations),
                "checks": [{"name": n, "holds": h, "certified": c, "detail": d}
                           for n, h, c, d in self.checks]}


def homology_dims(c: FilteredComplex):
    """Dimensions of the homology at V, F^0, ..., F^n on the common window."""
    fld, W = c.v.field, c.window
    out = []
    positions = [c.source] + c.terms
    for p, X in enumerate(positions):
        dims = []
        for n in range(W + 1):
            out_rank = la.rank(fld, c.maps[p].comps[n]) if p < len(c.maps) else 0
            in_rank = la.rank(fld, c.maps[p - 1].comps[n]) if p >= 1 else 0
            dims.append(X.dims[n] - out_rank - in_rank)
        out.append(dims)
    return out


def _gd(v: FIModule) -> Degree:
    return generating_degree(v)


def verify_complex(c: FilteredComplex, margin: int = 2) -> ComplexReport:
    fld, W = c.v.field, c.window
    rep = ComplexReport(window=W, length=c.length, shifts=c.shifts)
    add = rep.checks.append

    for i in range(1, len(c.maps)):
        zero = all(la.is_zero(la.matmul(fld, c.maps[i].comps[n], c.maps[i - 1].comps[n]))
                   for n in range(W + 1))
        add(("composite_zero", zero, True, f"at F^{i - 1}"))
    for i, m in enumerate(c.maps):
        bad = m.failures()
        add(("equivariant", not bad, True, f"map {i}: {bad[:2]}" if bad else f"map {i}"))

    gd = _gd(c.v)
    filled = [st for st in c.steps if st.F is not None]
    for i, st in enumerate(filled):
        g = _gd(st.F)
        add(("gd_bound", g.value <= gd.value - i, g.certified and gd.certified,
             f"gd(F^{i}) = {g} vs gd(V) - {i} = {gd.value - i}"))
        gvf = _gd(st.split.free_part)
        gvi = _gd(st.V)
        add(("chain_4_2", g.value <= gvf.value <= gvi.value,
             g.certified and gvf.certified and gvi.certified,
             f"gd(F^{i})={g} gd(V^{i}_F)={gvf} gd(V^{i})={gvi}"))
        if i >= 1:
            # V^i is a quotient of Sigma_N V^{i-1}_F by V^{i-1}_F, so its gd drops below gd(V^{i-1}_F)
            gvf_prev = _gd(filled[i - 1].split.free_part)
            add(("cokernel_gd_drop", gvi.value <= gvf_prev.value - 1, gvi.certified and gvf_prev.certified,
                 f"gd(V^{i})={gvi} gd(V^{i - 1}_F)={gvf_prev}"))
            # the sharper link gd(V^i) <= gd(F^{i-1}) - 1 is not implied (M(1) above degree 1 breaks it);
            # it is reported, not enforced
            gprev = _gd(filled[i - 1].F)
            rep.observations.append({"name": "gd_V_i_below_gd_F_prev", "step": i,
                                     "holds": gvi.value <= gprev.value - 1,
                                     "detail": f"gd(V^{i})={gvi} gd(F^{i - 1})={gprev}"})
        add(("gd_V_i", gvi.value <= gd.value - i, gvi.certified and gd.certified,
             f"gd(V^{i})={gvi} gd(V)={gd}"))
        add(("filtered_term", st.filtered_certified, st.filtered_certified, f"F^{i} shift {st.shift}"))
    # an empty complex (V torsion or zero) is vacuously short enough
    add(("length", not c.terms or c.length <= gd.value, gd.certified and c.complete,
         f"length {c.length} gd {gd}"))

    H = homology_dims(c)
    rep.homology_dims = H
    # expected homology: V_T at V, then the torsion part of the next cokernel
    expected = [list(c.steps[0].split.torsion.dims[:W + 1]) if c.steps else [0] * (W + 1)]
    certs = [c.steps[0].split.certified if c.steps else True]
    for i, st in enumerate(filled):
        nxt = c.steps[i + 1] if i + 1 < len(c.steps) else None
        if nxt is None:
            expected.append(None)
            certs.append(False)
        else:
            expected.append(list(nxt.split.torsion.dims[:W + 1]))
            certs.append(nxt.split.certified)
    for p, dims in enumerate(H):
        name = "V" if p == 0 else f"F^{p - 1}"
        if expected[p] is None:
            # the last cokernel was zero: homology must vanish
            add(("homology_matches_torsion", not any(dims), c.complete, f"at {name}: {dims}"))
        else:
            add(("homology_matches_torsion", dims == expected[p], certs[p],
                 f"at {name}: {dims} vs {expected[p]}"))
        top_zero = all(d == 0 for d in dims[max(0, W - margin + 1):])
        add(("homology_torsion", top_zero, certs[p] if expected[p] is not None else c.complete,
             f"at {name}: top degrees {dims[max(0, W - margin + 1):]}"))
    return rep


def shifted_complex_resolves(c: FilteredComplex, N: int):
    """Whether Sigma_N of 0 -> V -> F^0 -> ... -> F^n -> 0 is exact; (bool, homology dims)."""
    if N > c.window:
        raise md.ModuleError(f"shift {N} exceeds window {c.window}")
    fld = c.v.field
    positions = [c.source] + c.terms
    H = []
    for p, X in enumerate(positions):
        dims = []
        for n in range(N, c.window + 1):
            out_rank = la.rank(fld, c.maps[p].comps[n]) if p < len(c.maps) else 0
            in_rank = la.rank(fld, c.maps[p - 1].comps[n]) if p >= 1 else 0
            dims.append(X.dims[n] - out_rank - in_rank)
        H.append(dims)
    return all(not any(d) for d in H), H


def max_torsion_degree(c: FilteredComplex):
    return max((st.split.degree.value for st in c.steps), default=NEG_INF)


# the first-step short exact sequence -------------------------------------------------------

@dataclass
class FirstStepReport:
    gd_v: Degree
    gd_w: Degree
    pairs: list          # (s, hd_s(V), hd_{s+1}(W), certified)
    shift: int

    @property
    def ok(self):
        return self.gd_w.value <= self.gd_v.value - 1 and all(a == b for _, a, b, _ in self.pairs)

    def to_json(self):
        return {"gd_V": self.gd_v.to_json(), "gd_W": self.gd_w.to_json(), "shift": self.shift,
                "pairs": [{"s": s, "hd_V": md.degree_json(a), "hd_W_next": md.degree_json(b),
                           "certified": c} for s, a, b, c in self.pairs]}


def first_step_check(v: FIModule, smax: int = 2, budget=DEFAULT_BUDGET):
    """For torsionless V: 0 -> V -> Sigma_N V -> W -> 0 with gd(W) <= gd(V) - 1 and
    hd_s(V) = hd_{s+1}(W) for s >= 1.  Returns None when no filtered shift is found."""
    d, _ = shift_until_filtered(v, v.N - 1, budget)
    if d is None:
        return None
    nat = md.natural_map_iterated(v, d)
    F = nat.target
    F.bounds = v.bounds
    bounds = None
    if v.bounds is not None:
        bounds = (v.bounds[0], dmax(v.bounds[1], v.bounds[0]))
    W = nat.cokernel(bounds=bounds)
    Vr = md.restrict(v, F.N)
    hv = homology(Vr, smax, budget)
    hw = homology(W, smax + 1, budget)
    pairs = []
    for s in range(1, smax + 1):
        pairs.append((s, hv.hd[s].value, hw.hd[s + 1].value,
                      hv.hd[s].certified and hw.hd[s + 1].certified))
    return FirstStepReport(hv.hd[0], hw.hd[0], pairs, d)
