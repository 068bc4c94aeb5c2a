"""Command line front end: ``fimod <command> FILE [options]``.

Exit codes: 0 success, 1 bad input, 2 a certified property failed, 3 the
answer is window-limited (uncertified).
"""

from __future__ import annotations

import argparse
import sys
import time

from . import filtration as fl
from . import fuzz
from . import homology as hm
from . import io
from . import module as md
from . import nagpal as ng
from . import report as rp
from .scalars import FieldError, parse_field


def _load(args, check=True):
    field = parse_field(args.field) if args.field else None
    v, _ = io.load_module(args.file, field=field, window=args.window, check=check)
    return v


def cmd_validate(args):
    v = _load(args, check=False)
    rep = md.validate(v)
    out = {"module": rp.module_summary(v), "valid": rep.valid, "failures": rep.failures[:20]}
    return out, rp.OK if rep.valid else rp.VIOLATION


def cmd_invariants(args):
    v = _load(args)
    out = rp.invariants(v, args.margin)
    status = rp.status_of([(True, out["gd"]["certified"]), (True, out["td"]["certified"])])
    return out, status


def cmd_homology(args):
    v = _load(args)
    rep = hm.homology(v, args.smax)
    out = {"module": rp.module_summary(v), **rep.to_json()}
    flags = [(True, rep.certified(s)) for s in range(args.smax + 1)]
    if args.oracle:
        orc = hm.homology_oracle(v, args.smax)
        compared, bad = hm.compare_reports(rep, orc)
        out["oracle"] = {"compared": compared, "mismatches": [list(b) for b in bad],
                         "notes": orc.notes}
        flags.append((not bad, True))
    return out, rp.status_of(flags)


def cmd_is_filtered(args):
    v = _load(args)
    rep = fl.is_sharp_filtered(v)
    status = rp.UNCERTIFIED if rep.is_filtered == fl.UNCERTIFIED else rp.OK
    return {"module": rp.module_summary(v), **rep.to_json()}, status


def cmd_filtration(args):
    v = _load(args)
    pre = fl.is_sharp_filtered(v)
    ext = fl.extract_filtration(v, certified=pre.is_filtered != fl.UNCERTIFIED)
    out = {"module": rp.module_summary(v), "h1_verdict": pre.is_filtered, **ext.to_json()}
    flags = []
    if ext.is_filtered == fl.YES:
        ok, coeffs, predicted = fl.dimension_polynomial_check(v, ext.layers)
        out["dimension_polynomial"] = {"matches": ok, "binomial_coefficients": coeffs}
        flags.append((ok, True))
    # the layer test and the H_1 test must agree whenever H_1 is settled
    if pre.is_filtered != fl.UNCERTIFIED:
        flags.append((pre.is_filtered == ext.is_filtered, True))
    else:
        flags.append((True, False))
    return out, rp.status_of(flags)


def cmd_pd(args):
    v = _load(args)
    rep = fl.classify_pd(v)
    status = rp.UNCERTIFIED if rep.classification == fl.UNCERTIFIED else rp.OK
    return {"module": rp.module_summary(v), **rep.to_json()}, status


def _write_module(args, w):
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(io.serialize_explicit(w))


def cmd_shift(args):
    v = _load(args)
    if args.d > v.N:
        raise md.ModuleError(f"cannot shift by {args.d} within window {v.N}")
    w = md.shift_by(v, args.d)
    _write_module(args, w)
    out = {"d": args.d, "input": rp.module_summary(v), "invariants": rp.invariants(w, args.margin)}
    filt = fl.is_sharp_filtered(w)
    out["is_filtered"] = filt.is_filtered
    return out, rp.OK


def cmd_derivative(args):
    v = _load(args)
    w = md.derivative(v)
    _write_module(args, w)
    out = {"input": rp.module_summary(v), "invariants": rp.invariants(w, args.margin)}
    gd_v = hm.generating_degree(v)
    gd_w = hm.generating_degree(w)
    if gd_v.value >= 1:
        holds = gd_w.value == gd_v.value - 1
        out["gd_drops_by_one"] = {"holds": holds, "certified": gd_v.certified and gd_w.certified}
        return out, rp.status_of([(holds, gd_v.certified and gd_w.certified)])
    return out, rp.OK


def cmd_nagpal(args):
    v = _load(args)
    c = ng.build_nagpal_complex(v, args.margin)
    rep = ng.verify_complex(c, args.margin)
    out = {"module": rp.module_summary(v), "complete": c.complete, "notes": c.notes, **rep.to_json()}
    flags = [(h, cert) for _, h, cert, _ in rep.checks]
    td = ng.max_torsion_degree(c)
    N = 0 if td == md.NEG_INF else int(td) + 1
    if c.complete and N <= c.window:
        exact, H = ng.shifted_complex_resolves(c, N)
        out["shifted_exact"] = {"N": N, "exact": exact}
        flags.append((exact, True))
    else:
        flags.append((True, False))
    return out, rp.status_of(flags)


def cmd_regularity(args):
    v = _load(args)
    rep = hm.homology(v, args.smax)
    td = md.torsion_degree(v, args.margin)
    torsion_free = td.certified and td.is_neg_inf
    is_torsion = td.certified and not any(v.dims[max(0, v.N - args.margin + 1):])
    checks = hm.regularity_checks(v, args.smax, rep, td, torsion_free, is_torsion)
    out = {"module": rp.module_summary(v), "hd": [h.to_json() for h in rep.hd], "td": td.to_json(),
           "checks": [c.to_json() for c in checks]}
    return out, rp.status_of([(c.holds, c.certified) for c in checks])


def cmd_fuzz(args):
    field = parse_field(args.field) if args.field else None
    kw = {"window": args.window} if args.window is not None else {}
    cases = fuzz.sample_cases(args.seed, args.count, field=field, **kw)
    results = [fuzz.run_case(v, smax=args.smax, margin=args.margin) for _, v in cases]
    out = {"seed": args.seed, "summary": fuzz.summarize(results),
           "cases": [r.to_json(timing=args.timing) for r in results]}
    bad = [r for r in results if r.violations]
    return out, rp.VIOLATION if bad else rp.OK


COMMANDS = {
    "validate": (cmd_validate, "check the FI-module relations"),
    "invariants": (cmd_invariants, "dimensions, gd, hd_1 and torsion degree"),
    "homology": (cmd_homology, "H_0 .. H_smax with certification flags"),
    "is-filtered": (cmd_is_filtered, "decide whether H_1 vanishes"),
    "filtration": (cmd_filtration, "extract the filtration by induced layers"),
    "pd": (cmd_pd, "classify projective dimension"),
    "shift": (cmd_shift, "apply the shift functor d times"),
    "derivative": (cmd_derivative, "apply the derivative functor"),
    "nagpal-complex": (cmd_nagpal, "build and verify the finite filtered complex"),
    "regularity-check": (cmd_regularity, "check the homological degree bounds"),
    "fuzz": (cmd_fuzz, "run the invariant suite on random presentations"),
}


def build_parser():
    p = argparse.ArgumentParser(prog="fimod", description="Homology and filtrations of FI-modules.")
    sub = p.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        if name != "fuzz":
            sp.add_argument("file")
        sp.add_argument("--field", help="Q or Fp:<p> (overrides the file)")
        sp.add_argument("--window", type=int, help="truncation window N")
        sp.add_argument("--smax", type=int, default=3 if name in ("regularity-check", "fuzz") else 2)
        sp.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--margin", type=int, default=2, help="torsion certification margin")
        sp.add_argument("--timing", action="store_true", help="include wall-clock time in reports")
        if name == "homology":
            sp.add_argument("--oracle", action="store_true", help="cross-check with the resolution route")
        if name == "shift":
            sp.add_argument("-d", type=int, default=1)
        if name in ("shift", "derivative"):
            sp.add_argument("--output", "-o", help="write the resulting module (explicit format)")
        if name == "fuzz":
            sp.add_argument("--count", type=int, default=10)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    fn = COMMANDS[args.command][0]
    t0 = time.perf_counter()
    try:
        out, status = fn(args)
    except (io.ParseError, FieldError, md.ModuleError, OSError) as exc:
        print(f"fimod: error: {exc}", file=sys.stderr)
        return 1
    report = {"command": args.command, "status": status, "result": out}
    if getattr(args, "file", None):
        report["input"] = args.file
    if args.timing:
        report["seconds"] = round(time.perf_counter() - t0, 4)
    if args.json == "-":
        sys.stdout.write(rp.to_json_text(report))
    else:
        if args.json:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(rp.to_json_text(report))
        print(rp.render_text(report))
    return rp.EXIT_CODES[status]


if __name__ == "__main__":
    sys.exit(main())
