"""Acceptance criteria 1-13, one pass/fail line each.

Under pytest the lines are printed in the terminal summary; run this file
directly (``python3 tests/test_acceptance.py``) to get just the lines.
"""

import json
import os
import pathlib
import subprocess
import sys
import time

import pytest

HERE = pathlib.Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))
sys.path.insert(0, str(HERE.parent / "src"))

from conftest import CORPUS, FUZZ_SEED, ROOT, SAMPLING_SECONDS, fuzz_cases, load  # noqa: E402
from fimod import filtration as fl  # noqa: E402
from fimod import homology as hm  # noqa: E402
from fimod import io  # noqa: E402
from fimod import module as md  # noqa: E402
from fimod import nagpal as ng  # noqa: E402
from fimod.module import NEG_INF  # noqa: E402
from fimod.scalars import GF, QQ  # noqa: E402

FIELDS = (QQ, GF(2), GF(3))


def _unbounded(v):
    """Same module with the presentation bounds forgotten, so every degree is computed."""
    return md.FIModule(v.field, v.N, v.dims, [v.incl(n) for n in range(v.N)],
                       [[v.sym(n, i) for i in range(1, n)] for n in range(v.N + 1)])


def _corpus():
    return [(p.name, io.load_module(p)[0]) for p in CORPUS]


# 1 -------------------------------------------------------------------------------------

def criterion_1(record):
    t0 = time.perf_counter()
    problems = []
    for F in FIELDS:
        for i in range(4):
            N = 7 if i < 3 else 6
            v = md.free_module(F, [i], N)
            want = [fi_count(i, n) for n in range(N + 1)]
            if list(v.dims) != want:
                problems.append(f"M({i}) dims {v.dims}")
            rep = hm.homology(v, 3)
            full = hm.homology(_unbounded(v), 3)
            for s in (1, 2, 3):
                if not (rep.certified(s) and rep.hd[s].is_neg_inf):
                    problems.append(f"M({i}) over {F}: hd_{s} = {rep.hd[s]}")
                if any(full.dims(s)):
                    problems.append(f"M({i}) over {F}: H_{s} dims {full.dims(s)}")
    secs = time.perf_counter() - t0
    ok = not problems and secs < 5
    record(1, ok, f"free modules M(0..3) over Q, F2, F3 in {secs:.2f}s (limit 5s); {problems[:3]}")
    return ok


def fi_count(i, n):
    from math import factorial
    return factorial(n) // factorial(n - i) if n >= i else 0


# 2 -------------------------------------------------------------------------------------

def criterion_2(record):
    problems = []
    for F in FIELDS:
        for i in range(4):
            N = 7 if i < 3 else 6
            sv = md.shift(md.free_module(F, [i], N))
            ref = md.free_module(F, [i] + [i - 1] * i, N - 1)
            if sv.dims != ref.dims:
                problems.append(f"i={i} dims {sv.dims} vs {ref.dims}")
            if hm.h0(sv).dims != hm.h0(ref).dims:
                problems.append(f"i={i} H0 {hm.h0(sv).dims} vs {hm.h0(ref).dims}")
            if hm.h0_oracle(sv).dims != hm.h0(ref).dims:
                problems.append(f"i={i} H0 (orbit route) differs")
    ok = not problems
    record(2, ok, f"Sigma M(i) vs M(i) + M(i-1)^i, i <= 3, three fields; {problems[:3]}")
    return ok


# 3 -------------------------------------------------------------------------------------

def criterion_3(record):
    problems = []
    for F in FIELDS:
        for i in range(1, 4):
            N = 7 if i < 3 else 6
            dv = md.derivative(md.free_module(F, [i], N))
            ref = md.free_module(F, [i - 1] * i, N - 1)
            if dv.dims != ref.dims:
                problems.append(f"D M({i}) dims {dv.dims}")
            h = hm.homology(_unbounded(dv), 1)
            if any(h.dims(1)):
                problems.append(f"D M({i}) over {F}: H_1 {h.dims(1)}")
    tested = 0
    for _, v in fuzz_cases():
        gd = hm.generating_degree(v)
        if not gd.certified or gd.value < 1:
            continue
        gdd = hm.generating_degree(md.derivative(v))
        if not gdd.certified or gdd.value != gd.value - 1:
            problems.append(f"{v.name}: gd {gd} -> {gdd}")
        tested += 1
        if tested == 50:
            break
    ok = not problems and tested == 50
    record(3, ok, f"D on frees over three fields, gd(DV) = gd(V) - 1 on {tested} random modules; {problems[:3]}")
    return ok


# 4 -------------------------------------------------------------------------------------

def criterion_4(record):
    problems = []
    tested = 0
    for _, v in fuzz_cases():
        if v.N < 2:
            continue
        iso = md.sigma_d_commute_iso(v)
        if iso.failures() or not iso.is_iso():
            problems.append(v.name)
        tested += 1
        if tested == 50:
            break
    ok = not problems and tested == 50
    record(4, ok, f"Sigma D -> D Sigma equivariant iso on {tested} random modules; failures {problems[:3]}")
    return ok


# 5 -------------------------------------------------------------------------------------

def _two_route(v, smax=3):
    main = hm.homology(v, smax)
    orc = hm.homology_oracle(v, smax)
    compared, bad = hm.compare_reports(main, orc)
    # every certified degree of the main route must have been reached by the oracle
    gaps = [s for s in range(smax + 1) if main.certified(s) and orc.computed_to[s] < main.computed_to[s]]
    return compared, bad, gaps


def criterion_5(record):
    t0 = time.perf_counter()
    cases = [(name, v) for name, v in _corpus()] + [(v.name, v) for _, v in fuzz_cases()]
    compared, problems = 0, []
    for name, v in cases:
        c, bad, gaps = _two_route(v)
        compared += c
        if bad or gaps:
            problems.append((name, bad[:2], gaps))
    # sampling the fuzz modules counts too, even when another criterion did it first
    secs = time.perf_counter() - t0 + SAMPLING_SECONDS[(FUZZ_SEED, 100, None)]
    ok = not problems and secs < 180
    record(5, ok, f"{len(cases)} modules, {compared} (s, degree) pairs compared, {secs:.1f}s "
                  f"including sampling (limit 180s); mismatches {problems[:3]}")
    return ok


# 6 -------------------------------------------------------------------------------------

def filtered_verdicts(v, smax=3):
    """Certified answers to H_s = 0 (s <= smax) and to 'layers are induced'."""
    rep = hm.homology(v, smax)
    out = {}
    for s in range(1, smax + 1):
        if any(rep.dims(s)):
            out[f"H{s}=0"] = False
        elif rep.certified(s):
            out[f"H{s}=0"] = True
    ext = fl.extract_filtration(v, certified=rep.certified(1))
    # a failing layer inside the window is final; success needs the window to be conclusive
    if ext.is_filtered == fl.NO:
        out["extraction"] = False
    elif rep.certified(1):
        out["extraction"] = True
    return out


def criterion_6(record):
    counts, problems = {}, []
    for F in FIELDS:
        yes = 0
        for _, v in fuzz_cases(field=F):
            verdicts = filtered_verdicts(v)
            if len(set(verdicts.values())) > 1:
                problems.append((v.name, verdicts))
            yes += verdicts.get("extraction", False)
        counts[str(F)] = yes
    ok = not problems
    record(6, ok, f"100 modules per field, filtered counts {counts}; disagreements {problems[:2]}")
    return ok


# 7 -------------------------------------------------------------------------------------

def criterion_7(record):
    checked, problems = 0, []
    for _, v in fuzz_cases():
        rep = hm.homology(v, 3)
        td = md.torsion_degree(v)
        for c in hm.regularity_checks(v, 3, rep, td, False, False):
            if c.certified:
                checked += 1
                if not c.holds:
                    problems.append((v.name, c.name, c.s, c.lhs, c.rhs))
    k0 = load("k_at_0.fi")
    rep = hm.homology(k0, 3)
    td = md.torsion_degree(k0)
    witness = [rep.hd[s].value for s in (1, 2, 3)]
    tight = (td.certified and td.value == 0 and all(rep.certified(s) for s in (1, 2, 3))
             and witness == [1, 2, 3])
    ok = not problems and tight
    record(7, ok, f"{checked} certified inequalities (regularity and CE bound), k@0 hd_1..3 = {witness} "
                  f"with td = {td.value}; violations {problems[:3]}")
    return ok


# 8 -------------------------------------------------------------------------------------

def criterion_8(record):
    cases, problems = 0, []
    for _, v in fuzz_cases():
        td = md.torsion_degree(v)
        if not (td.certified and td.is_neg_inf):
            continue
        rep = hm.homology(v, 3)
        gd = rep.hd[0]
        for s in (1, 2, 3):
            if gd.certified and rep.certified(s):
                if rep.hd[s].value > 2 * gd.value + s - 1:
                    problems.append((v.name, s))
        cases += 1
    ok = not problems and cases > 0
    record(8, ok, f"hd_s <= 2 gd + s - 1 on {cases} certified-torsionless modules; violations {problems[:3]}")
    return ok


# 9 -------------------------------------------------------------------------------------

REQUIRED_NAGPAL = ("composite_zero", "equivariant", "gd_bound", "length", "homology_matches_torsion",
                   "homology_torsion")


def nagpal_problems(v):
    c = ng.build_nagpal_complex(v)
    rep = ng.verify_complex(c)
    out = []
    if not c.complete:
        out.append(f"incomplete: {c.notes}")
    for name, holds, cert, detail in rep.checks:
        if name in REQUIRED_NAGPAL and not (holds and cert):
            out.append(f"{name} holds={holds} certified={cert}: {detail}")
    td = ng.max_torsion_degree(c)
    N = 0 if td == NEG_INF else int(td) + 1
    if N > c.window:
        out.append(f"shift {N} beyond window {c.window}")
    else:
        exact, H = ng.shifted_complex_resolves(c, N)
        if not exact:
            out.append(f"not exact after shifting by {N}: {H}")
    return out


def criterion_9(record):
    cases = [(name, v) for name, v in _corpus()] + [(v.name, v) for _, v in fuzz_cases()[:50]]
    problems = []
    for name, v in cases:
        bad = nagpal_problems(v)
        if bad:
            problems.append((name, bad[:2]))
    ok = not problems
    record(9, ok, f"complex built and verified on {len(cases)} modules; problems {problems[:3]}")
    return ok


# 10 ------------------------------------------------------------------------------------

def criterion_10(record):
    found, problems = {}, []
    for name, v in _corpus():
        d, tried = fl.shift_until_filtered(v, v.N - 1)
        found[name] = d
        if d is None:
            problems.append((name, tried))
        elif fl.is_sharp_filtered(v).is_filtered == fl.YES and d != 0:
            problems.append((name, f"filtered input needs d = {d}"))
    ok = not problems
    record(10, ok, f"shifts {found}; problems {problems[:3]}")
    return ok


# 11 ------------------------------------------------------------------------------------

def criterion_11(record):
    problems = []
    for F in FIELDS:
        for i in range(4):
            rep = fl.classify_pd(md.free_module(F, [i], 7 if i < 3 else 6))
            if rep.classification != fl.PROJECTIVE:
                problems.append(f"M({i}) over {F}: {rep.classification}")
    t2 = fl.trivial_module(GF(2), 2)
    routes = (fl.is_projective_over_group_algebra(t2), fl.is_projective_by_section(t2))
    ind2 = fl.classify_pd(fl.induce(t2, 7))
    if ind2.classification != fl.INFINITE_PD or any(routes) or [p for _, _, p in ind2.components] != [False]:
        problems.append(f"induced trivial F2S2: {ind2.classification}, component tests {routes}")
    indq = fl.classify_pd(fl.induce(fl.trivial_module(QQ, 2), 7))
    if indq.classification != fl.PROJECTIVE:
        problems.append(f"induced trivial QS2: {indq.classification}")
    k0 = fl.classify_pd(load("k_at_0.fi"))
    if k0.classification != fl.INFINITE_PD or k0.filtered.is_filtered != fl.NO:
        problems.append(f"k@0: {k0.classification} via {k0.filtered.is_filtered}")
    ok = not problems
    record(11, ok, f"M(i) projective, induced trivial F2S2 InfinitePd (component tests {routes}), "
                   f"over Q {indq.classification}, k@0 {k0.classification}; {problems[:3]}")
    return ok


# 12 ------------------------------------------------------------------------------------

def _running_max(xs):
    out, m = [], NEG_INF
    for x in xs:
        m = max(m, x)
        out.append(m)
    return out


def criterion_12(record):
    steps = 2
    checked, torsionless, problems = 0, 0, []
    for _, v in fuzz_cases()[:40]:
        rep = hm.homology(v, steps)
        if not all(rep.certified(s) for s in range(steps + 1)):
            continue
        top = max(hm._targets(v, steps))
        res = hm.resolve(v, steps, top=top)
        if not res.is_adaptable():
            problems.append((v.name, "not adaptable", res.d))
        if not res.exact():
            problems.append((v.name, "not exact"))
        hd = [rep.hd[s].value for s in range(steps + 1)]
        if _running_max(res.d) != _running_max(hd):
            problems.append((v.name, "running max", res.d, hd))
        checked += 1
        td = md.torsion_degree(v)
        if not (td.certified and td.is_neg_inf) or rep.hd[0].value < 1:
            continue
        # D applied to each free term lowers its generating degree by one
        for st in res.steps:
            g = hm.generating_degree(st.P).value
            if g >= 1:
                gd_d = hm.generating_degree(md.derivative(st.P)).value
                if gd_d != g - 1:
                    problems.append((v.name, "D on term", g, gd_d))
        # and the degrees seen by DV are those of V, one lower
        dv = md.derivative(v)
        drep = hm.homology(dv, steps)
        if all(drep.certified(s) for s in range(steps + 1)):
            dres = hm.resolve(dv, steps, top=max(hm._targets(dv, steps)))
            lhs = [x + 1 for x in _running_max(dres.d)]
            if lhs != _running_max(res.d):
                problems.append((v.name, "D resolution", res.d, dres.d))
            dh = [x + 1 for x in _running_max([drep.hd[s].value for s in range(steps + 1)])]
            if dh != _running_max(hd):
                problems.append((v.name, "running max of hd(DV) + 1", hd, dh))
            torsionless += 1
    ok = not problems and checked > 0 and torsionless > 0
    record(12, ok, f"{checked} resolutions adaptable with matching running maxima, "
                   f"{torsionless} torsionless modules checked under D; problems {problems[:3]}")
    return ok


# 13 ------------------------------------------------------------------------------------

def _cli_json(args, tmp):
    out = pathlib.Path(tmp)
    env = dict(os.environ, PYTHONPATH=str(ROOT / "src"))
    subprocess.run([sys.executable, "-m", "fimod.cli", *args, "--json", str(out)],
                   env=env, capture_output=True, check=False)
    return out.read_bytes()


def criterion_13(record, tmpdir):
    runs = [
        ["fuzz", "--count", "8", "--seed", str(FUZZ_SEED)],
        ["homology", str(ROOT / "corpus" / "perturbed.fi"), "--smax", "3", "--oracle"],
        ["nagpal-complex", str(ROOT / "corpus" / "mixed_torsion.fi")],
        ["pd", str(ROOT / "corpus" / "induced_trivial_f2s2.fi")],
    ]
    problems = []
    for k, args in enumerate(runs):
        a = _cli_json(args, os.path.join(tmpdir, f"a{k}.json"))
        b = _cli_json(args, os.path.join(tmpdir, f"b{k}.json"))
        if a != b or not a:
            problems.append(args[0])
        else:
            json.loads(a)
    ok = not problems
    record(13, ok, f"JSON reports byte-identical across reruns for {[r[0] for r in runs]}; differing {problems}")
    return ok


# pytest entry points ---------------------------------------------------------------------

@pytest.fixture
def record(request):
    log = request.config.acceptance_log

    def _record(n, ok, detail):
        log[n] = (ok, detail)
    return _record


def test_criterion_01_free_modules(record):
    assert criterion_1(record)


def test_criterion_02_shift_on_frees(record):
    assert criterion_2(record)


def test_criterion_03_derivative(record):
    assert criterion_3(record)


def test_criterion_04_shift_derivative_commute(record):
    assert criterion_4(record)


def test_criterion_05_two_route_tor(record):
    assert criterion_5(record)


def test_criterion_06_filtered_equivalences(record):
    assert criterion_6(record)


def test_criterion_07_regularity(record):
    assert criterion_7(record)


def test_criterion_08_torsionless_bound(record):
    assert criterion_8(record)


def test_criterion_09_nagpal_complex(record):
    assert criterion_9(record)


def test_criterion_10_shift_to_filtered(record):
    assert criterion_10(record)


def test_criterion_11_pd_classification(record):
    assert criterion_11(record)


def test_criterion_12_adaptable_resolutions(record):
    assert criterion_12(record)


def test_criterion_13_json_determinism(record, tmp_path):
    assert criterion_13(record, str(tmp_path))


if __name__ == "__main__":
    import tempfile

    def show(n, ok, detail):
        print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}", flush=True)

    t0 = time.perf_counter()
    results = []
    for n in range(1, 13):
        results.append(globals()[f"criterion_{n}"](show))
    with tempfile.TemporaryDirectory() as tmp:
        results.append(criterion_13(show, tmp))
    print(f"acceptance run took {time.perf_counter() - t0:.1f}s")
    sys.exit(0 if all(results) else 1)
