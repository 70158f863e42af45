"""``latred`` command line interface.

Every report is deterministic JSON (sorted keys, rationals as [num, den])
and embeds the bad set, rectangle corner and class representative used.
Exit status: 0 success, 1 invalid input or override, 2 internal
inconsistency (a cross-check failed).
"""

from __future__ import annotations

import argparse
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
import json
import sys

import numpy as np

from . import graph as G
from ._config import MAX_CORNER
from .cohomology import assemble_graded_module, euler_capped_eu, graded_root, sw_invariant
from .graph import GraphError, PlumbingGraph
from .lattice import lattice_data
from .laufer import BadSet, artin_fundamental_cycle, is_rational, suggest_bad_set, verify_bad_set
from .reduction import StabilizationError, build_weight_table, render_grid

EXIT_OK, EXIT_INVALID, EXIT_MISMATCH = 0, 1, 2


class InputError(Exception):
    pass


class Mismatch(Exception):
    pass


def _frac(x) -> list:
    f = Fraction(x)
    return [f.numerator, f.denominator]


def _ints(text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as exc:
        raise InputError(f"expected comma separated integers, got {text!r}") from exc


_BUILTIN = {"fix1": G.fix1, "fix2": G.fix2, "fix3": G.fix3}


def load_graph(path: str) -> PlumbingGraph:
    """Graph document, Seifert document ({"b", "legs"}) or a builtin name."""
    if path in _BUILTIN:
        return _BUILTIN[path]()
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if isinstance(doc, dict) and "legs" in doc:
        return G.star_shaped(G.parse_seifert(doc))
    return G.parse_graph(doc)


def _classes(g: PlumbingGraph, selector: str) -> list:
    lat = lattice_data(g)
    if selector == "all":
        return lat.classes()
    if selector == "canonical":
        return [lat.canonical()]
    idx = _ints(selector)
    if len(idx) != len(lat.orders) or any(not 0 <= v < n for v, n in zip(idx, lat.orders)):
        raise InputError(f"class index {selector!r} does not fit H = {lat.orders}")
    return [lat.class_of_index(idx)]


def _bad_set(g: PlumbingGraph, text: str | None) -> BadSet:
    if text is None:
        bad = suggest_bad_set(g)
    else:
        bad = verify_bad_set(g, _ints(text))
    if not bad.verified:
        raise InputError(f"bad set {list(bad.vertices)} is not verified")
    return bad


def _table(g, cls, bad, args):
    corner = _ints(args.corner) if getattr(args, "corner", None) else None
    try:
        return build_weight_table(g, cls, bad, corner=corner, cap=args.max_corner)
    except (StabilizationError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _per_class(args, fn, classes):
    threads = max(1, int(getattr(args, "threads", 1) or 1))
    if threads == 1 or len(classes) == 1:
        return [fn(c) for c in classes]
    with ThreadPoolExecutor(threads) as pool:
        return list(pool.map(fn, classes))


def _k_square(g, cls) -> Fraction:
    lat = lattice_data(g)
    kr = cls.kr_scaled
    quad = sum(kr[i] * lat.rows[i][j] * kr[j] for i in range(lat.s) for j in range(lat.s)
               if lat.rows[i][j])
    return Fraction(quad, lat.d * lat.d)


# --- subcommands ---------------------------------------------------------------

def cmd_validate(g, args):
    rep = G.validate_graph(g)
    out = {"graph": g.to_document(), "validation": rep.to_json()}
    if rep.ok:
        out["det"] = G.det_minus_form(g)
    return out, (EXIT_OK if rep.ok else EXIT_INVALID)


def cmd_spinc(g, args):
    lat = lattice_data(g)
    rows = []
    for c in _classes(g, args.cls):
        d = c.to_json()
        d["k_r_square"] = _frac(_k_square(g, c))
        rows.append(d)
    return {"graph": g.to_document(), "group_orders": list(lat.orders), "det": lat.d,
            "classes": rows}, EXIT_OK


def cmd_badset(g, args):
    bad = verify_bad_set(g, _ints(args.badset)) if args.badset is not None else suggest_bad_set(g)
    out = {"graph": g.to_document(), "rational": is_rational(g),
           "artin_cycle": list(artin_fundamental_cycle(g)), "bad_set": bad.to_json()}
    return out, (EXIT_OK if bad.verified else EXIT_INVALID)


def cmd_reduce(g, args):
    bad = _bad_set(g, args.badset)

    def one(c):
        t = _table(g, c, bad, args)
        rep = t.to_json()
        if t.nu <= 2:
            rep["grid"] = render_grid(t)
        return rep

    return {"graph": g.to_document(), "bad_set": bad.to_json(),
            "tables": _per_class(args, one, _classes(g, args.cls))}, EXIT_OK


def _cohomology_report(g, c, bad, args):
    t = _table(g, c, bad, args)
    mods = assemble_graded_module(t)
    eu = euler_capped_eu(mods)
    return t, mods, eu


def cmd_cohomology(g, args):
    bad = _bad_set(g, args.badset)

    def one(c):
        t, mods, eu = _cohomology_report(g, c, bad, args)
        return {"class": c.to_json(), "corner": list(t.corner),
                "modules": [m.to_json() for m in mods],
                "rendered": [m.render() for m in mods],
                "graded_root": graded_root(t).to_json(), "eu": eu}

    return {"graph": g.to_document(), "bad_set": bad.to_json(),
            "results": _per_class(args, one, _classes(g, args.cls))}, EXIT_OK


def cmd_sw(g, args):
    bad = _bad_set(g, args.badset)

    def one(c):
        t, mods, eu = _cohomology_report(g, c, bad, args)
        return {"class": c.to_json(), "corner": list(t.corner), "eu": eu,
                "k_r_square": _frac(_k_square(g, c)), "sw": _frac(sw_invariant(g, c, eu))}

    return {"graph": g.to_document(), "bad_set": bad.to_json(),
            "results": _per_class(args, one, _classes(g, args.cls))}, EXIT_OK


def cmd_series(g, args):
    from .series import counting_function, eu_from_series, reduced_series, \
        series_identity_mismatches
    bad = _bad_set(g, args.badset)
    status = EXIT_OK
    results = []
    for c in _classes(g, args.cls):
        t = _table(g, c, bad, args)
        box = _ints(args.box) if args.box else t.corner
        if len(box) != bad.nu:
            raise InputError("--box needs one entry per bad vertex")
        zb = reduced_series(g, c, bad, box)
        mism = series_identity_mismatches(t)
        eu = euler_capped_eu(assemble_graded_module(t))
        rep = {"class": c.to_json(), "corner": list(t.corner), "box": list(box),
               "coeffs": zb.to_json()["coeffs"], "identity_mismatches": [list(i) for i in mism],
               "eu": eu}
        try:
            rep["eu_from_series"] = eu_from_series(zb, t)
        except ValueError as exc:
            rep["eu_from_series"] = None
            rep["error"] = str(exc)
        if bad.nu:
            rep["counting_at_corner"] = counting_function(zb, t.corner)
        if mism or rep["eu_from_series"] != eu:
            status = EXIT_MISMATCH
        results.append(rep)
    return {"graph": g.to_document(), "bad_set": bad.to_json(), "results": results}, status


def cmd_oracle(g, args):
    from .oracle import OracleError, full_lattice_cohomology, modules_equal
    from .series import eu_from_series, reduced_series, series_identity_mismatches
    if g.s > args.max_vertices:
        raise InputError(f"graph has {g.s} vertices, above --max-vertices {args.max_vertices}")
    bad = _bad_set(g, args.badset)
    checks = []
    for c in _classes(g, args.cls):
        t, mods, eu = _cohomology_report(g, c, bad, args)
        try:
            full = full_lattice_cohomology(g, c)
        except OracleError as exc:
            raise InputError(str(exc)) from exc
        row = {"class": c.to_json(), "corner": list(t.corner),
               "reduction_theorem": modules_equal(mods, full),
               "vanishing_above_nu": all(m.reduced_rank == 0 and not m.torsion
                                         for m in full[max(bad.nu, 1):]),
               "series_identity": not series_identity_mismatches(t)}
        try:
            row["eu_consistency"] = eu_from_series(reduced_series(g, c, bad, t.corner), t) == eu
        except ValueError:
            row["eu_consistency"] = False
        checks.append(row)
    ok = all(all(v for k, v in r.items() if isinstance(v, bool)) for r in checks)
    out = {"graph": g.to_document(), "bad_set": bad.to_json(), "checks": checks,
           "summary": "all checks passed" if ok else "MISMATCH"}
    return out, (EXIT_OK if ok else EXIT_MISMATCH)


COMMANDS = {
    "validate": cmd_validate, "spinc": cmd_spinc, "badset": cmd_badset, "reduce": cmd_reduce,
    "cohomology": cmd_cohomology, "sw": cmd_sw, "series": cmd_series, "oracle": cmd_oracle,
}


def _text(report: dict, cmd: str) -> str:
    lines = []
    if cmd == "validate":
        v = report["validation"]
        lines.append("valid" if v["ok"] else "invalid: " + ", ".join(
            k for k, ok in v["checks"].items() if not ok))
    elif cmd == "spinc":
        lines.append(f"H = {' x '.join(f'Z/{n}' for n in report['group_orders']) or '0'}")
        for c in report["classes"]:
            k2 = Fraction(*c["k_r_square"])
            lines.append(f"class {c['class_index']}: k_r^2 = {k2}")
    elif cmd == "badset":
        b = report["bad_set"]
        lines.append(f"bad set {b['vertices']} verified={b['verified']}")
    elif cmd == "reduce":
        for t in report["tables"]:
            lines.append(f"class {t['class']['class_index']} corner {t['corner']} m_w {t['m_w']}")
            if "grid" in t:
                lines.append(t["grid"])
    elif cmd == "cohomology":
        for r in report["results"]:
            lines.append(f"class {r['class']['class_index']} corner {r['corner']} eu {r['eu']}")
            for q, m in enumerate(r["rendered"]):
                lines.append(f"  H^{q} = {m}")
    elif cmd == "sw":
        for r in report["results"]:
            lines.append(f"class {r['class']['class_index']}: eu = {r['eu']}, "
                         f"sw = {Fraction(*r['sw'])}")
    elif cmd == "series":
        for r in report["results"]:
            lines.append(f"class {r['class']['class_index']}: "
                         f"{len(r['coeffs'])} nonzero coefficients, "
                         f"eu {r['eu']} / from series {r['eu_from_series']}")
    elif cmd == "oracle":
        lines.append(report["summary"])
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="latred", description="Lattice cohomology of plumbed "
                                "3-manifolds via reduction to the bad vertices.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("graph", help="graph JSON, Seifert JSON, or fix1/fix2/fix3")
        sp.add_argument("--format", choices=("json", "text"), default="json")
        sp.add_argument("--class", dest="cls", default="all",
                        help="all | canonical | comma separated class index")
        sp.add_argument("--badset", default=None, help='bad vertices, e.g. "0,7"')
        sp.add_argument("--corner", default=None, help='rectangle corner, e.g. "14,14"')
        sp.add_argument("--max-corner", type=int, default=MAX_CORNER)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--box", default=None, help="series truncation corner")
        sp.add_argument("--max-vertices", type=int, default=8)
    return p


def run(argv=None) -> tuple:
    """Parse, dispatch and return (exit status, output text)."""
    args = build_parser().parse_args(argv)
    try:
        g = load_graph(args.graph)
        if args.command != "validate":
            G.require_valid(g)
        report, status = COMMANDS[args.command](g, args)
    except (InputError, GraphError) as exc:
        return EXIT_INVALID, json.dumps({"error": str(exc)}, sort_keys=True)
    except (ArithmeticError, RuntimeError) as exc:
        return EXIT_MISMATCH, json.dumps({"error": f"internal inconsistency: {exc}"},
                                         sort_keys=True)
    if args.format == "text":
        return status, _text(report, args.command)
    return status, json.dumps(report, sort_keys=True, default=_json_default)


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, Fraction):
        return _frac(o)
    raise TypeError(f"not serializable: {type(o)}")


def main(argv=None) -> int:
    status, text = run(argv)
    print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
