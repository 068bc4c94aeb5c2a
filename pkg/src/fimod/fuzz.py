"""Random presentations and the invariant suite run on each of them.

Sampling: 1-3 generators of degree <= 3, 0-4 relations of degree at most
max(generator degree) + 1 (and <= 4), 2-3 terms each, window N in [8, 10],
field drawn from Q, F_2, F_3.  Candidates whose dimensions exceed ``dim_cap``
in some degree are redrawn, which keeps every matrix desk-sized; so are
presentations of the zero module and those whose estimated resolution
(``resolution_size``) exceeds ``res_cap`` in its top degree.
"""

from __future__ import annotations

import time
from math import factorial
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from . import fi
from . import io
from . import module as md
from .scalars import QQ, GF

FIELDS = (QQ, GF(2), GF(3))
DIM_CAP = 30
RES_CAP = 600


def _coefficient(rng, F):
    if F.is_rational:
        num = int(rng.integers(1, 4)) * (1 if rng.random() < 0.5 else -1)
        den = int(rng.choice([1, 1, 1, 2]))
        return Fraction(num, den)
    return Fraction(int(rng.integers(1, F.p)))


def random_presentation(rng, field=None, window=None, max_gen_degree=3):
    F = field if field is not None else FIELDS[int(rng.integers(0, len(FIELDS)))]
    N = int(window if window is not None else rng.integers(8, 11))
    ngens = int(rng.integers(1, 4))
    gens = [(f"g{j}", int(rng.integers(0, max_gen_degree + 1))) for j in range(ngens)]
    pf = io.PresentationFile(field=F, window=N, gens=gens)
    lo = min(d for _, d in gens)
    hi = min(4, max(d for _, d in gens) + 1)
    for k in range(int(rng.integers(0, 5))):
        deg = int(rng.integers(lo, hi + 1))
        usable = [(g, d) for g, d in gens if d <= deg]
        terms = []
        for _ in range(int(rng.integers(2, 4))):
            g, d = usable[int(rng.integers(0, len(usable)))]
            tuples = fi.injection_tuples(d, deg)
            img = tuples[int(rng.integers(0, len(tuples)))]
            terms.append((_coefficient(rng, F), fi.Injection(img, deg), g))
        pf.rels.append(io.Relation(f"r{k + 1}", terms))
    return pf


def resolution_size(v, smax=3):
    """Rough top-degree dimension of the free resolution the oracle builds.

    The oracle covers with whole free modules M(d), at least one per degree
    where H_s(V) is nonzero (and one per d! dimensions of it), so each such
    degree costs about top!/(top - d)! in the highest degree it visits.
    """
    from . import homology as hm
    top = max(hm._targets(v, smax))
    if top < 0:
        return 0
    rep = hm.homology(v, max(smax - 1, 0))
    sizes = []
    for s in range(smax):
        total = 0
        for d, h in enumerate(rep.dims(s)[:top + 1]):
            if h:
                total += -(-h // factorial(d)) * fi.count_injections(d, top)
        sizes.append(total)
    return max(sizes)


def sample_module(rng, field=None, dim_cap=DIM_CAP, res_cap=RES_CAP, tries=400, **kw):
    """A random presentation and its module, redrawing while a degree of the
    module or of its resolution is too large."""
    for _ in range(tries):
        pf = random_presentation(rng, field=field, **kw)
        if not pf.rels and not _free_dims_ok(pf, dim_cap):
            continue
        # screen on a short window first; dimensions rarely shrink later
        if pf.window > 6 and max(io.materialize(pf, window=6).dims) > dim_cap:
            continue
        v = io.materialize(pf)
        if max(v.dims) <= dim_cap and not v.is_zero():
            if res_cap is None or resolution_size(v) <= res_cap:
                return pf, v
    raise RuntimeError("could not sample a module under the dimension cap")


def _free_dims_ok(pf, cap):
    return all(sum(fi.count_injections(d, n) for _, d in pf.gens) <= cap for n in range(pf.window + 1))


def sample_cases(seed, count, field=None, dim_cap=DIM_CAP, res_cap=RES_CAP, **kw):
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        pf, v = sample_module(rng, field=field, dim_cap=dim_cap, res_cap=res_cap, **kw)
        pf.name = v.name = f"fuzz-{seed}-{i}"
        out.append((pf, v))
    return out


# the invariant suite ---------------------------------------------------------------------

@dataclass
class CaseResult:
    name: str
    field: str
    window: int
    dims: list
    bounds: list
    facts: dict = dc_field(default_factory=dict)
    violations: list = dc_field(default_factory=list)
    uncertified: list = dc_field(default_factory=list)
    seconds: float = 0.0

    def to_json(self, timing=False):
        out = {"name": self.name, "field": self.field, "window": self.window, "dims": self.dims,
               "bounds": self.bounds, "facts": self.facts, "violations": self.violations,
               "uncertified": self.uncertified}
        if timing:
            out["seconds"] = round(self.seconds, 4)
        return out


def run_case(v, smax=3, margin=2, oracle=True, nagpal=True):
    """Every cross-check that applies to one module; violations are certified failures."""
    from . import filtration as fl
    from . import homology as hm
    from . import nagpal as ng

    t0 = time.perf_counter()
    res = CaseResult(v.name, str(v.field), v.N, list(v.dims),
                     [md.degree_json(b) for b in v.bounds] if v.bounds else None)
    bad, unc, facts = res.violations, res.uncertified, res.facts

    rep = hm.homology(v, smax)
    facts["hd"] = [h.to_json() for h in rep.hd]
    td = md.torsion_degree(v, margin)
    facts["td"] = td.to_json()

    if oracle:
        orc = hm.homology_oracle(v, smax)
        compared, mism = hm.compare_reports(rep, orc)
        facts["oracle_compared"] = compared
        if mism:
            bad.append(f"oracle mismatch {mism[:3]}")

    # filtered: H_1 = 0, H_2 = 0, H_3 = 0 and layer extraction must agree
    verdicts = {}
    for s in range(1, smax + 1):
        if rep.certified(s):
            verdicts[f"H{s}=0"] = rep.hd[s].is_neg_inf
        elif any(rep.dims(s)):
            verdicts[f"H{s}=0"] = False
        else:
            unc.append(f"H{s}")
    ext = fl.extract_filtration(v, certified=rep.certified(1))
    verdicts["extraction"] = ext.is_filtered == fl.YES
    facts["filtered_verdicts"] = verdicts
    if len(set(verdicts.values())) > 1:
        bad.append(f"filtered verdicts disagree {verdicts}")
    if ext.is_filtered == fl.YES:
        ok, coeffs, _ = fl.dimension_polynomial_check(v, ext.layers)
        if not ok:
            bad.append("dimension polynomial mismatch")

    torsion_free = td.certified and td.is_neg_inf
    is_torsion = td.certified and not any(v.dims[max(0, v.N - margin + 1):])
    checks = hm.regularity_checks(v, smax, rep, td, torsion_free, is_torsion)
    facts["inequalities"] = [c.to_json() for c in checks]
    for c in checks:
        if c.certified and not c.holds:
            bad.append(f"{c.name} fails at s={c.s}: {c.lhs} > {c.rhs}")
        elif not c.certified:
            unc.append(f"{c.name}@{c.s}")
    bound = md.torsion_bound(v)
    if bound is not None and td.value > bound:
        bad.append(f"torsion degree {td.value} above g + r - 1 = {bound}")

    if nagpal:
        c = ng.build_nagpal_complex(v, margin)
        cr = ng.verify_complex(c, margin)
        facts["nagpal"] = {"length": cr.length, "shifts": cr.shifts, "window": cr.window,
                           "complete": c.complete,
                           "observations_failing": [o for o in cr.observations if not o["holds"]]}
        for name, holds, cert, detail in cr.checks:
            if cert and not holds:
                bad.append(f"nagpal {name}: {detail}")
            elif not cert:
                unc.append(f"nagpal {name}")
        td_max = ng.max_torsion_degree(c)
        shiftN = 0 if td_max == md.NEG_INF else int(td_max) + 1
        if c.complete and shiftN <= c.window:
            exact, _ = ng.shifted_complex_resolves(c, shiftN)
            facts["nagpal"]["shifted_exact"] = exact
            if not exact:
                bad.append(f"shifted complex not exact for N={shiftN}")
    res.seconds = time.perf_counter() - t0
    return res


def summarize(results):
    n = len(results)
    viol = sum(1 for r in results if r.violations)
    by_field = {}
    for r in results:
        by_field[r.field] = by_field.get(r.field, 0) + 1
    filtered = sum(1 for r in results if r.facts.get("filtered_verdicts", {}).get("extraction"))
    return {"cases": n, "with_violations": viol, "by_field": dict(sorted(by_field.items())),
            "filtered": filtered,
            "oracle_degrees_compared": sum(r.facts.get("oracle_compared", 0) for r in results),
            "uncertified_items": sum(len(r.uncertified) for r in results)}
