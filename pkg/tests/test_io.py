import pytest

from conftest import CORPUS
from fimod import io
from fimod import module as md
from fimod.scalars import GF


@pytest.mark.parametrize("path", CORPUS, ids=lambda p: p.name)
def test_presentation_roundtrip(path):
    pf = io.parse_presentation(path)
    again = io.parse_presentation_text(io.serialize_presentation(pf))
    assert again.field == pf.field and again.window == pf.window
    assert again.gens == pf.gens
    assert [r.terms for r in again.rels] == [r.terms for r in pf.rels]


@pytest.mark.parametrize("path", CORPUS[:6], ids=lambda p: p.name)
def test_explicit_roundtrip(path, tmp_path):
    v, _ = io.load_module(path)
    text = io.serialize_explicit(v)
    out = tmp_path / "m.txt"
    out.write_text(text)
    w, pf = io.load_module(out)
    assert pf is None and w.dims == v.dims and w.bounds == v.bounds
    assert io.serialize_explicit(w) == text


@pytest.mark.parametrize("text,line", [
    ("field Q\nwindow x\n", 2),
    ("field Fp:4\n", 1),
    ("field Q\ngen a 1\ngen a 2\n", 3),
    ("field Q\ngen a 1\nrel r : 1->2:(1) b\n", 3),
    ("field Q\ngen a 1\n\nrel r : 2->3:(1,2) a\n", 4),
    ("field Q\ngen a 1\nrel r : 1->2:(1) a 1->2:(2) a\n", 3),
    ("field Q\ngen a 1\nrel r : 1->2:(1) a - 1->3:(2) a\n", 3),
    ("frobnicate\n", 1),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(io.ParseError) as err:
        io.parse_presentation_text(text)
    assert err.value.line == line
    assert str(err.value).startswith(f"line {line}:")


def test_overrides_and_comments():
    pf = io.parse_presentation_text("# a comment\nfield Q\nwindow 4\ngen a 0  # trailing\n")
    v = io.materialize(pf, field=GF(3), window=3)
    assert v.field == GF(3) and v.N == 3 and list(v.dims) == [1, 1, 1, 1]


def test_unknown_method_rejected():
    pf = io.parse_presentation_text("field Q\nwindow 3\ngen a 0\n")
    with pytest.raises(ValueError):
        io.materialize(pf, method="guess")


def test_explicit_window_restrict(tmp_path):
    v = md.free_module(GF(2), [1], 5)
    p = tmp_path / "m.txt"
    p.write_text(io.serialize_explicit(v))
    assert io.load_module(p, window=3)[0].dims == v.dims[:4]
    with pytest.raises(io.ParseError):
        io.load_module(p, window=7)


def test_broken_explicit_module_rejected_unless_unchecked(tmp_path):
    v = md.free_module(GF(3), [1], 3)
    incl = [v.incl(n).copy() for n in range(3)]
    incl[1][0, 0] = (int(incl[1][0, 0]) + 1) % 3
    broken = md.FIModule(v.field, 3, v.dims, incl, [[v.sym(n, i) for i in range(1, n)] for n in range(4)])
    p = tmp_path / "broken.txt"
    p.write_text(io.serialize_explicit(broken))
    with pytest.raises(io.ParseError):
        io.load_module(p)
    w, _ = io.load_module(p, check=False)
    assert not md.validate(w).valid
