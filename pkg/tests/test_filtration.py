from math import comb

import pytest

from conftest import load
from fimod import filtration as fl
from fimod import homology as hm
from fimod import module as md
from fimod.scalars import GF, QQ


@pytest.mark.parametrize("F", [QQ, GF(2), GF(3)], ids=str)
@pytest.mark.parametrize("maker,n", [(fl.trivial_module, 2), (fl.sign_module, 2),
                                     (fl.trivial_module, 3), (fl.regular_module, 2)])
def test_induced_dims_and_acyclicity(F, maker, n):
    t = maker(F, n)
    assert not t.failures()
    v = fl.induce(t, 6)
    assert list(v.dims) == [comb(m, n) * t.dim for m in range(7)]
    assert md.validate(v).valid
    assert fl.is_sharp_filtered(v).is_filtered == fl.YES


@pytest.mark.parametrize("F,maker,n,want", [
    (GF(2), fl.trivial_module, 2, False),
    (GF(3), fl.trivial_module, 2, True),
    (GF(3), fl.sign_module, 2, True),
    (GF(3), fl.trivial_module, 3, False),
    (GF(2), fl.regular_module, 3, True),
    (QQ, fl.trivial_module, 3, True),
    (GF(5), fl.trivial_module, 4, True),
])
def test_projectivity_routes_agree(F, maker, n, want):
    t = maker(F, n)
    assert fl.is_projective_over_group_algebra(t) is want
    assert fl.is_projective_by_section(t) is want


@pytest.mark.parametrize("name", ["induced_trivial_f2s2.fi", "induced_trivial_q_s2.fi",
                                  "induced_sign_f3s2.fi", "free_m2.fi"])
def test_extraction_and_dimension_polynomial(name):
    v = load(name)
    ext = fl.extract_filtration(v, certified=True)
    assert ext.is_filtered == fl.YES
    ok, _, _ = fl.dimension_polynomial_check(v, ext.layers)
    assert ok


@pytest.mark.parametrize("name", ["k_at_0.fi", "perturbed.fi", "two_generators_glued.fi"])
def test_unfiltered_modules_agree_on_both_tests(name):
    v = load(name)
    pre = fl.is_sharp_filtered(v)
    assert pre.is_filtered == fl.NO and pre.witness
    assert fl.extract_filtration(v, certified=True).is_filtered == fl.NO


@pytest.mark.parametrize("name", ["induced_trivial_f2s2.fi", "induced_sign_f3s2.fi", "free_m1.fi"])
def test_shift_and_derivative_preserve_filtered(name):
    v = load(name)
    assert fl.is_sharp_filtered(md.shift(v)).is_filtered == fl.YES
    assert fl.is_sharp_filtered(md.derivative(v)).is_filtered == fl.YES


def test_torsionless_degree_zero_generated_is_single_layer():
    v = md.free_module(QQ, [0, 0], 6)
    ext = fl.extract_filtration(v, certified=True)
    assert [(s, t.dim) for s, t in ext.layers] == [(0, 2)]


def test_pd_classification():
    assert fl.classify_pd(load("free_m1.fi")).classification == fl.PROJECTIVE
    assert fl.classify_pd(load("induced_trivial_q_s2.fi")).classification == fl.PROJECTIVE
    assert fl.classify_pd(load("induced_trivial_f2s2.fi")).classification == fl.INFINITE_PD
    assert fl.classify_pd(load("induced_sign_f3s2.fi")).classification == fl.PROJECTIVE
    assert fl.classify_pd(load("k_at_0.fi")).classification == fl.INFINITE_PD


def test_shift_until_filtered():
    v = md.truncate(md.free_module(GF(3), [1], 7), 2)
    d, tried = fl.shift_until_filtered(v, v.N - 1)
    assert d is not None and d >= 1
    assert fl.is_sharp_filtered(md.shift_by(v, d)).is_filtered == fl.YES
    assert hm.homology(md.shift_by(v, d), 1).hd[1].is_neg_inf
