from fractions import Fraction

import flint
import pytest
from hypothesis import given, strategies as st

from fimod import fi
from fimod.scalars import GF, QQ, FieldError, parse_field


def test_parse_field_forms():
    assert parse_field("Q") == QQ
    assert parse_field("Fp:3") == GF(3)
    assert parse_field("GF(2)") == GF(2)
    assert parse_field("F5") == GF(5)
    for bad in ("Fp:4", "R", "Fp:x", "Fp:1"):
        with pytest.raises(FieldError):
            parse_field(bad)


def test_coerce_fractions():
    assert GF(3).coerce(Fraction(1, 2)) == 2
    assert GF(2).coerce(-1) == 1
    assert QQ.coerce("3/4") == flint.fmpq(3, 4)
    with pytest.raises(ZeroDivisionError):
        GF(3).coerce(Fraction(1, 3))


def test_scalar_arithmetic_mod_p():
    F = GF(5)
    a, b = F.scalar(3), F.scalar(4)
    assert (a + b).value == 2
    assert (a * b).value == 2
    assert (a / b * b) == a
    assert a.inverse().value == 2


def test_pi_is_first_coset_injection():
    for n in range(5):
        assert fi.pi(n) == fi.coset_injection(n, 1)


def test_coset_injection_factorisation():
    # f_k = s_{k-1} ... s_1 pi
    for n in range(1, 5):
        for k in range(1, n + 2):
            f = fi.pi(n)
            for i in range(1, k):
                f = fi.compose(fi.adjacent_transposition(n + 1, i), f)
            assert f == fi.coset_injection(n, k)


@given(st.integers(0, 4), st.integers(0, 3), st.data())
def test_rank_matches_enumeration(n, m, data):
    m = min(m, n)
    tuples = fi.injection_tuples(m, n)
    assert len(tuples) == fi.count_injections(m, n)
    j = data.draw(st.integers(0, len(tuples) - 1))
    assert fi.rank_injection(tuples[j], n) == j


@given(st.permutations(list(range(1, 6))))
def test_transposition_word_rebuilds_permutation(perm):
    perm = tuple(perm)
    word = fi.transposition_word(perm)
    acc = tuple(range(1, 6))
    for i in word:
        acc = fi.compose_tuples(acc, fi.adjacent_transposition(5, i).images)
    assert acc == perm


def test_factor_through_pi():
    f = fi.Injection((3, 1), 4)
    sigma = fi.factor_through_pi(f)
    g = fi.Injection(sigma, 4)
    composite = fi.pi(2)
    composite = fi.compose(fi.pi(3), composite)
    assert fi.compose(g, composite) == f


def test_injection_parse_roundtrip_and_errors():
    f = fi.parse_injection("2->4:(3,1)")
    assert fi.format_injection(f) == "2->4:(3,1)"
    for bad in ("2->4:(3,3)", "2->1:(1,2)", "2->4:(1)", "nonsense"):
        with pytest.raises(fi.InjectionError):
            fi.parse_injection(bad)


def test_self_embed_fixes_one():
    f = fi.Injection((2, 3), 3)
    g = fi.self_embed(f)
    assert g.images == (1, 3, 4) and g.target == 4
