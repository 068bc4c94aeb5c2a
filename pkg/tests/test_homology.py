import pytest

from conftest import load
from fimod import homology as hm
from fimod import module as md
from fimod.scalars import GF, QQ

SMALL = ["k_at_0.fi", "perturbed.fi", "mixed_torsion.fi", "two_generators_glued.fi",
         "truncated_m0.fi", "induced_trivial_f2s2.fi"]


@pytest.mark.parametrize("name", SMALL)
def test_koszul_and_resolution_routes_agree(name):
    v = load(name)
    main = hm.homology(v, 2)
    compared, bad = hm.compare_reports(main, hm.homology_oracle(v, 2))
    assert compared > 0 and not bad
    compared, bad = hm.compare_reports(main, hm.homology_top_blocks(v, 2))
    assert compared > 0 and not bad


def test_point_module_at_zero():
    # H_s of k in degree 0 is one-dimensional, sitting in degree s
    v = load("k_at_0.fi")
    rep = hm.homology(v, 3)
    for s in range(4):
        assert rep.certified(s) and rep.hd[s].value == s
        assert rep.dims(s) == [1 if n == s else 0 for n in range(v.N + 1)]


@pytest.mark.parametrize("F", [QQ, GF(2)], ids=str)
def test_free_modules_are_acyclic(F):
    v = md.free_module(F, [0, 2], 6)
    rep = hm.homology(v, 2)
    assert rep.hd[0].value == 2
    assert all(rep.hd[s].is_neg_inf and rep.certified(s) for s in (1, 2))


def test_h0_routes_and_generating_degree():
    for name in SMALL:
        v = load(name)
        assert hm.h0(v).dims == hm.h0_oracle(v).dims
        gd = hm.generating_degree(v)
        top = max(n for n, d in enumerate(hm.h0(v).dims) if d) if any(hm.h0(v).dims) else md.NEG_INF
        assert gd.value == top


def test_horizons_follow_presentation_bounds():
    v = load("perturbed.fi")       # generated in degree <= 1, related in degree 2
    g, r = v.bounds
    assert hm.horizon(v, 0) == g and hm.horizon(v, 1) == r
    assert [hm.horizon(v, s) for s in (2, 3)] == [g + r + 1, g + r + 2]


def test_horizon_beyond_window_is_uncertified():
    v = load("k_at_0.fi")
    rep = hm.homology(v, v.N + 2)
    assert not rep.certified(v.N + 2)


def test_resolution_is_exact():
    v = load("mixed_torsion.fi")
    res = hm.resolve(v, 2)
    assert res.exact()


def test_budget_marks_degrees_uncertified():
    v = md.free_module(QQ, [2], 6)
    with pytest.raises(hm.BudgetExceeded):
        hm.koszul_rank(v, 2, 6, budget=10)
    # without presentation bounds every degree must be computed, so a tiny budget
    # leaves the answer uncertified instead of guessing
    bare = md.FIModule(v.field, v.N, v.dims, [v.incl(n) for n in range(v.N)],
                       [[v.sym(n, i) for i in range(1, n)] for n in range(v.N + 1)])
    rep = hm.homology(bare, 2, budget=200)
    assert not rep.certified(2) and rep.notes
