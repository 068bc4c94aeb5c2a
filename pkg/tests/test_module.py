from math import comb, factorial

import pytest

from conftest import load
from fimod import homology as hm
from fimod import io
from fimod import module as md
from fimod.scalars import GF, QQ


def injections(i, n):
    return factorial(n) // factorial(n - i) if n >= i else 0


@pytest.mark.parametrize("F", [QQ, GF(2), GF(3)], ids=str)
@pytest.mark.parametrize("degrees", [[0], [1], [2], [0, 1], [2, 1]])
def test_free_module_is_valid(F, degrees):
    v = md.free_module(F, degrees, 5)
    assert md.validate(v).valid
    assert list(v.dims) == [sum(injections(d, n) for d in degrees) for n in range(6)]


@pytest.mark.parametrize("text", [
    "field Fp:3\nwindow 6\ngen a 1\ngen b 1\nrel glue : 1->2:(1) a - 1->2:(1) b\n",
    "field Fp:2\nwindow 6\ngen a 2\nrel sym : 2->2:(1,2) a - 2->2:(2,1) a\n",
    "field Q\nwindow 6\ngen a 1\ngen b 0\nrel r : 1->2:(1) a - 1->2:(2) a + 0->2:() b\n",
    "field Q\nwindow 5\ngen a 2\nrel r : 2->3:(1,2) a - 2*2->3:(2,3) a\n",
])
def test_quotient_routes_agree(text):
    pf = io.parse_presentation_text(text)
    a = io.materialize(pf, method="functionals")
    b = io.materialize(pf, method="submodule")
    assert a.dims == b.dims
    assert md.validate(a).valid and md.validate(b).valid
    assert hm.h0(a).dims == hm.h0(b).dims
    assert hm.homology(a, 1).dims(1) == hm.homology(b, 1).dims(1)


def test_validate_catches_broken_relation():
    v = md.free_module(QQ, [1], 4)
    sym = [[v.sym(n, i) for i in range(1, n)] for n in range(5)]
    incl = [v.incl(n) for n in range(4)]
    incl[2] = incl[2].copy()
    incl[2][0, 0] = incl[2][0, 0] + 1
    broken = md.FIModule(QQ, 4, v.dims, incl, sym)
    rep = md.validate(broken)
    assert not rep.valid and rep.failures


@pytest.mark.parametrize("i", range(4))
def test_shift_and_derivative_of_free(i):
    v = md.free_module(GF(3), [i], 6)
    sv = md.shift(v)
    assert list(sv.dims) == [injections(i, n + 1) for n in range(6)]
    dv = md.derivative(v)
    assert list(dv.dims) == [injections(i, n + 1) - injections(i, n) for n in range(6)]
    assert md.validate(sv).valid and md.validate(dv).valid


@pytest.mark.parametrize("name", ["perturbed.fi", "mixed_torsion.fi", "two_generators_glued.fi"])
def test_shift_derivative_commute(name):
    iso = md.sigma_d_commute_iso(load(name))
    assert not iso.failures()
    assert iso.is_iso()


def test_torsion_degree_of_truncations():
    v = load("truncated_m0.fi")     # k placed in degrees 0..2
    td = md.torsion_degree(v)
    assert td.certified and td.value == 2
    assert md.torsion_degree(md.free_module(QQ, [2], 6)).is_neg_inf
    split = md.torsion_split(load("mixed_torsion.fi"))
    assert split.free_part.dims[-1] == load("mixed_torsion.fi").dims[-1]


def test_point_and_zero_modules():
    k = md.point_module(GF(5), 4, degree=2)
    assert list(k.dims) == [0, 0, 1, 0, 0]
    assert md.validate(k).valid
    assert sum(md.zero_module(QQ, 3).dims) == 0
    s = md.direct_sum(md.free_module(GF(5), [1], 4), k)
    assert list(s.dims) == [0, 1, 3, 3, 4]


def test_truncate_keeps_upper_degrees():
    v = md.truncate(md.free_module(GF(2), [1], 6), 2)
    assert list(v.dims) == [0, 0, 2, 3, 4, 5, 6]
    assert md.validate(v).valid
    assert hm.generating_degree(v).value == 2


def test_dims_are_binomial_sums_for_induced():
    v = load("induced_trivial_q_s2.fi")
    assert list(v.dims) == [comb(n, 2) for n in range(v.N + 1)]
