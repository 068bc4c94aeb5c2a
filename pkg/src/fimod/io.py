"""Text formats for FI-modules.

Presentation files (``#`` starts a comment)::

    field Fp:3
    window 8
    gen a 1
    gen b 2
    rel r1 : 1*2->3:(1,2) b - 2*1->3:(3) a

Each relation is a linear combination of ``injection generator`` pairs; all
injections of one relation share their target, which is the relation degree.

Explicit files list every generator matrix, one row per line::

    field Q
    window 2
    dims 1 1 1
    incl 0
    1
    incl 1
    1
    sym 2 1
    1

``bounds g r`` may record known presentation degrees (``-inf`` allowed).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from . import fi
from . import linalg as la
from . import module as md
from .module import NEG_INF
from .scalars import FieldSpec, FieldError, parse_field


class ParseError(ValueError):
    def __init__(self, msg, line=None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


@dataclass
class Relation:
    name: str
    terms: list            # (Fraction, Injection, generator name)
    line: int = 0

    @property
    def degree(self):
        return self.terms[0][1].target if self.terms else None


@dataclass
class PresentationFile:
    field: FieldSpec = None
    window: int = None
    gens: list = dc_field(default_factory=list)      # (name, degree)
    rels: list = dc_field(default_factory=list)
    name: str = None

    def gen_degree(self, name):
        for g, d in self.gens:
            if g == name:
                return d
        raise KeyError(name)

    @property
    def max_gen_degree(self):
        return max((d for _, d in self.gens), default=NEG_INF)

    @property
    def max_rel_degree(self):
        return max((r.degree for r in self.rels if r.terms), default=NEG_INF)


_TERM = re.compile(
    r"\s*([+-])?\s*(?:([0-9]+(?:/[0-9]+)?)\s*\*\s*)?"
    r"(\d+\s*->\s*\d+\s*:\s*\([^)]*\))\s+([A-Za-z_][\w']*)\s*")


def parse_terms(text: str, line: int):
    terms, pos = [], 0
    text = text.rstrip()
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot read relation term at {text[pos:]!r}", line)
        if terms and not m.group(1):
            raise ParseError("terms must be separated by + or -", line)
        sign = -1 if m.group(1) == "-" else 1
        coeff = Fraction(m.group(2)) if m.group(2) else Fraction(1)
        try:
            inj = fi.parse_injection(m.group(3))
        except fi.InjectionError as exc:
            raise ParseError(str(exc), line) from None
        terms.append((sign * coeff, inj, m.group(4)))
        pos = m.end()
    return terms


def _strip(line):
    return line.split("#", 1)[0].strip()


def parse_presentation_text(text: str, name=None) -> PresentationFile:
    pf = PresentationFile(name=name)
    names = set()
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "field":
            try:
                pf.field = parse_field(rest)
            except FieldError as exc:
                raise ParseError(str(exc), ln) from None
        elif head == "window":
            pf.window = _int(rest, ln)
        elif head == "gen":
            parts = rest.split()
            if len(parts) != 2:
                raise ParseError("expected 'gen NAME DEGREE'", ln)
            if parts[0] in names:
                raise ParseError(f"duplicate generator {parts[0]!r}", ln)
            d = _int(parts[1], ln)
            if d < 0:
                raise ParseError("generator degree must be nonnegative", ln)
            names.add(parts[0])
            pf.gens.append((parts[0], d))
        elif head == "rel":
            label, colon, body = rest.partition(":")
            if not colon:
                raise ParseError("expected 'rel NAME : terms'", ln)
            terms = parse_terms(body, ln)
            if not terms:
                raise ParseError("empty relation", ln)
            targets = {t[1].target for t in terms}
            if len(targets) != 1:
                raise ParseError(f"relation terms have different target degrees {sorted(targets)}", ln)
            for _, inj, g in terms:
                if g not in names:
                    raise ParseError(f"unknown generator {g!r}", ln)
                if inj.source != pf.gen_degree(g):
                    raise ParseError(f"injection source {inj.source} differs from degree of {g}", ln)
            pf.rels.append(Relation(label.strip() or f"r{len(pf.rels) + 1}", terms, ln))
        else:
            raise ParseError(f"unknown keyword {head!r}", ln)
    return pf


def _int(text, ln):
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"expected an integer, got {text!r}", ln) from None


def parse_presentation(path) -> PresentationFile:
    with open(path, encoding="utf-8") as fh:
        return parse_presentation_text(fh.read(), name=str(path))


def _fmt_coeff(c: Fraction):
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def serialize_presentation(pf: PresentationFile) -> str:
    out = []
    if pf.field is not None:
        out.append(f"field {pf.field}")
    if pf.window is not None:
        out.append(f"window {pf.window}")
    for g, d in pf.gens:
        out.append(f"gen {g} {d}")
    for r in pf.rels:
        parts = []
        for i, (c, inj, g) in enumerate(r.terms):
            sign = "-" if c < 0 else "+"
            body = f"{_fmt_coeff(abs(c))}*{fi.format_injection(inj)} {g}"
            if i == 0:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append(f"{sign} {body}")
        out.append(f"rel {r.name} : " + " ".join(parts))
    return "\n".join(out) + "\n"


def materialize(pf: PresentationFile, field=None, window=None, method="functionals") -> md.FIModule:
    """Free module on the generators modulo the submodule generated by the relations.

    ``method="functionals"`` builds the quotient from the annihilator of the
    relations (cheap); ``"submodule"`` spans the relation submodule and takes
    complements, kept as an independent check.
    """
    if method not in ("functionals", "submodule"):
        raise ValueError(f"unknown method {method!r}")
    F = field or pf.field
    N = window if window is not None else pf.window
    if F is None:
        raise ParseError("no field given")
    if N is None:
        raise ParseError("no window given")
    for g, d in pf.gens:
        if d > N:
            raise ParseError(f"generator {g} has degree {d} beyond window {N}")
    for r in pf.rels:
        if r.degree > N:
            raise ParseError(f"relation {r.name} has degree {r.degree} beyond window {N}", r.line)
    P = md.FreeModule(F, [d for _, d in pf.gens], N)
    index = {g: j for j, (g, _) in enumerate(pf.gens)}
    vectors = []
    for r in pf.rels:
        n = r.degree
        x = la.zeros(F, 1, P.dims[n]).reshape(-1)
        for c, inj, g in r.terms:
            try:
                val = F.coerce(c)
            except ZeroDivisionError:
                raise ParseError(f"coefficient {c} is undefined in {F}", r.line) from None
            pos = P.index_of(index[g], inj.images, n)
            x[pos] = x[pos] + val if F.is_rational else (int(x[pos]) + val) % F.p
        vectors.append((n, x))
    bounds = (pf.max_gen_degree, pf.max_rel_degree)
    if not pf.rels:
        P.name = pf.name
        return P
    if method == "submodule":
        V = md.quotient(P, md.submodule_generated_by(P, vectors), bounds=bounds)
    else:
        V = md.free_quotient(P, vectors, bounds=bounds)
    V.name = pf.name
    return V


# explicit matrices ---------------------------------------------------------------------

def _fmt_entry(F, x):
    return str(x)


def serialize_explicit(v: md.FIModule) -> str:
    F = v.field
    out = [f"field {F}", f"window {v.N}", "dims " + " ".join(str(d) for d in v.dims)]
    if v.bounds is not None:
        out.append("bounds " + " ".join(str(md.degree_json(b)) for b in v.bounds))

    def emit(header, A):
        out.append(header)
        for row in A:
            out.append(" ".join(_fmt_entry(F, x) for x in row))

    for n in range(v.N):
        if v.dims[n] and v.dims[n + 1]:
            emit(f"incl {n}", v.incl(n))
    for n in range(v.N + 1):
        if v.dims[n]:
            for i in range(1, n):
                emit(f"sym {n} {i}", v.sym(n, i))
    return "\n".join(out) + "\n"


def parse_explicit_text(text: str, name=None, field=None, check=True) -> md.FIModule:
    lines = [(ln, _strip(raw)) for ln, raw in enumerate(text.splitlines(), start=1)]
    lines = [(ln, s) for ln, s in lines if s]
    F, N, dims, bounds = field, None, None, None
    mats = {}
    i = 0
    while i < len(lines):
        ln, line = lines[i]
        parts = line.split()
        head = parts[0]
        if head == "field":
            if field is None:
                try:
                    F = parse_field(" ".join(parts[1:]))
                except FieldError as exc:
                    raise ParseError(str(exc), ln) from None
            i += 1
        elif head == "window":
            N = _int(parts[1], ln)
            i += 1
        elif head == "dims":
            dims = [_int(p, ln) for p in parts[1:]]
            i += 1
        elif head == "bounds":
            if len(parts) != 3:
                raise ParseError("expected 'bounds G R'", ln)
            bounds = tuple(NEG_INF if p == "-inf" else _int(p, ln) for p in parts[1:])
            i += 1
        elif head in ("incl", "sym"):
            if F is None or dims is None:
                raise ParseError("field and dims must come before matrices", ln)
            key = tuple([head] + [_int(p, ln) for p in parts[1:]])
            if head == "incl":
                if len(key) != 2 or not 0 <= key[1] < len(dims) - 1:
                    raise ParseError("expected 'incl n' with n < window", ln)
                rows, cols = dims[key[1] + 1], dims[key[1]]
            else:
                if len(key) != 3 or not (0 <= key[1] < len(dims)) or not 1 <= key[2] < key[1]:
                    raise ParseError("expected 'sym n i' with 1 <= i < n", ln)
                rows = cols = dims[key[1]]
            if key in mats:
                raise ParseError(f"duplicate matrix {' '.join(map(str, key))}", ln)
            body = []
            for r in range(rows):
                if i + 1 + r >= len(lines):
                    raise ParseError("matrix ended early", ln)
                rln, rtext = lines[i + 1 + r]
                entries = rtext.split()
                if len(entries) != cols:
                    raise ParseError(f"expected {cols} entries, got {len(entries)}", rln)
                try:
                    body.append([F.coerce(Fraction(e)) for e in entries])
                except (ValueError, ZeroDivisionError) as exc:
                    raise ParseError(str(exc), rln) from None
            mats[key] = la.matrix(F, body, shape=(rows, cols)) if rows else la.zeros(F, 0, cols)
            i += 1 + rows
        else:
            raise ParseError(f"unknown keyword {head!r}", ln)
    if F is None or dims is None:
        raise ParseError("missing field or dims")
    if N is None:
        N = len(dims) - 1
    if len(dims) != N + 1:
        raise ParseError(f"window {N} needs {N + 1} dims, got {len(dims)}")

    def get(key, rows, cols):
        if key in mats:
            return mats[key]
        if rows == 0 or cols == 0:
            return la.zeros(F, rows, cols)
        raise ParseError(f"missing matrix {' '.join(map(str, key))}")

    incl = [get(("incl", n), dims[n + 1], dims[n]) for n in range(N)]
    sym = [[get(("sym", n, i), dims[n], dims[n]) for i in range(1, n)] for n in range(N + 1)]
    v = md.FIModule(F, N, dims, incl, sym, bounds=bounds, name=name)
    if not check:
        return v
    rep = md.validate(v)
    if not rep.valid:
        raise ParseError(f"module relations fail: {rep.failures[0]}")
    return v


def is_explicit_text(text: str) -> bool:
    return any(_strip(l).startswith("dims") for l in text.splitlines())


def load_module(path, field=None, window=None, check=True):
    """Read either format; returns (module, presentation or None).

    With ``check=False`` explicit matrices are accepted even if they break the
    FI relations (used by ``fimod validate`` to report them)."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    if is_explicit_text(text):
        v = parse_explicit_text(text, name=str(path), field=field, check=check)
        if window is not None and window < v.N:
            v = md.restrict(v, window)
        elif window is not None and window > v.N:
            raise ParseError(f"explicit module only has window {v.N}")
        return v, None
    pf = parse_presentation_text(text, name=str(path))
    return materialize(pf, field=field, window=window), pf
