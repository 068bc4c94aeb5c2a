"""Report assembly: JSON (sorted keys, no timing unless asked) and plain text."""

from __future__ import annotations

import json

from . import module as md
from .homology import homology
from .module import FIModule

OK, VIOLATION, UNCERTIFIED = "ok", "violation", "uncertified"
EXIT_CODES = {OK: 0, VIOLATION: 2, UNCERTIFIED: 3}


def _plain(x):
    """Make values JSON-safe: -inf becomes the string '-inf', tuples become lists."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, float):
        if x == md.NEG_INF:
            return "-inf"
        if x.is_integer():
            return int(x)
    if hasattr(x, "item") and not isinstance(x, (str, bytes)):
        return _plain(x.item())
    return x


def to_json_text(report: dict) -> str:
    return json.dumps(_plain(report), sort_keys=True, indent=2) + "\n"


def render_text(report: dict, indent=0) -> str:
    lines = []
    pad = "  " * indent
    for key in sorted(report):
        val = _plain(report[key])
        if isinstance(val, dict):
            lines.append(f"{pad}{key}:")
            lines.append(render_text(val, indent + 1))
        elif isinstance(val, list) and val and all(isinstance(x, dict) for x in val):
            lines.append(f"{pad}{key}:")
            for item in val:
                body = ", ".join(f"{k}={_short(item[k])}" for k in sorted(item))
                lines.append(f"{pad}  - {body}")
        else:
            lines.append(f"{pad}{key}: {_short(val)}")
    return "\n".join(l for l in lines if l)


def _short(v):
    if isinstance(v, list):
        return "[" + ", ".join(_short(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_short(v[k])}" for k in sorted(v)) + "}"
    return str(v)


def module_summary(v: FIModule) -> dict:
    return {"field": str(v.field), "window": v.N, "dims": list(v.dims),
            "bounds": [md.degree_json(b) for b in v.bounds] if v.bounds is not None else None}


def invariants(v: FIModule, margin=2, budget=None) -> dict:
    kw = {} if budget is None else {"budget": budget}
    rep = homology(v, 1, **kw)
    td = md.torsion_degree(v, margin)
    return {
        "module": module_summary(v),
        "gd": rep.hd[0].to_json(),
        "hd1": rep.hd[1].to_json(),
        "h0_dims": list(rep.dims(0)),
        "td": td.to_json(),
        "torsionless": {"value": td.is_neg_inf, "certified": td.certified},
    }


def status_of(flags) -> str:
    """Combine (holds, certified) pairs: any certified failure wins, then any uncertified item."""
    flags = list(flags)
    if any(c and not h for h, c in flags):
        return VIOLATION
    if any(not c for _, c in flags):
        return UNCERTIFIED
    return OK
