"""``equik`` command line.

Every subcommand builds a report ``{"command", "result", "verdict"}``.  With
``--format json`` the report is printed as sorted-key JSON, so identical input
gives byte-identical output; wall-clock time only ever goes to stderr.

Exit codes: 0 success, 1 a verification failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from .coeff import CoefficientError, free_system, validate_system
from .functors import conjugate_system, double_coset_iso, induce_system, restrict_system
from .gcw import (ComplexError, component_rank_vector, equivariant_chain_complex, equivariant_euler_class,
                  euler_marks, linearization_components)
from .groups import GroupError, class_names, group_name, isomorphism_type, subgroup_as_group
from .gsets import GSetError, mark_vector, orbit_decomposition, table_of_marks
from .modules import (NotProjectiveError, isotropy_split, k0_class_vector, level_twisted_ring,
                      twisted_s3_iso)
from .spans import SpanError, compose_spans, span_normal_form
from .specs import (COMPLEX_CATALOG, SpecError, load_document, parse_complex, parse_group, parse_gset,
                    parse_module, parse_ring, parse_span, parse_subgroup)
from .suites import SUITES, run_suite

INPUT_ERRORS = (SpecError, GroupError, GSetError, SpanError, CoefficientError, ComplexError)


# -- naming -----------------------------------------------------------------------

def relative_names(lat, u) -> list[str]:
    """Class names for subgroups of ``u`` up to ``u``-conjugacy."""
    if u == lat.whole:
        return class_names(lat)
    seen: dict[str, int] = {}
    out = []
    for h in lat.relative(u).reps:
        base = isomorphism_type(subgroup_as_group(lat, h))
        out.append(base + "'" * seen.get(base, 0))
        seen[base] = seen.get(base, 0) + 1
    return out


def subgroup_json(lat, h, u=None) -> dict:
    u = u or lat.whole
    rel = lat.relative(u)
    return {"class": relative_names(lat, u)[rel.class_index(h)], "elements": list(h.elements)}


def orbit_labels(lat, u) -> list[str]:
    uname = group_name(lat.group) if u == lat.whole else isomorphism_type(subgroup_as_group(lat, u))
    return [f"{uname}/{n}" for n in relative_names(lat, u)]


def _matrix(a) -> list[list[int]]:
    return [[int(v) for v in row] for row in np.asarray(a).tolist()]


# -- document helpers -------------------------------------------------------------

def _document(path: str) -> dict:
    doc = load_document(path)
    if not isinstance(doc, dict):
        raise SpecError(path, "expected an object at the top level")
    return doc


def _group_of(doc: dict, override: str | None):
    node = override if override is not None else doc.get("group")
    if node is None:
        raise SpecError("group", "missing key 'group' (or pass --group)")
    return parse_group(node), node


# -- commands ---------------------------------------------------------------------

def cmd_group(args) -> tuple[dict, bool | None]:
    g, _ = _group_of(_document(args.spec) if args.spec else {}, args.group)
    lat = g.lattice
    names = class_names(lat)
    classes = []
    for i, (h, members) in enumerate(zip(lat.reps, lat.classes)):
        wd = lat.weyl(h)
        classes.append({"index": i, "name": names[i], "order": h.order, "conjugates": len(members),
                        "representative": list(h.elements), "weyl_order": wd.quotient.order})
    sub = [[int(v) for v in row] for row in lat.subconjugate]
    return {"name": group_name(g), "order": g.order, "subgroups": len(lat), "classes": classes,
            "subconjugate": sub}, None


def cmd_gset(args):
    doc = _document(args.spec)
    g, gspec = _group_of(doc, args.group)
    lat = g.lattice
    x = parse_gset(lat, doc.get("gset"), "gset", gspec)
    dec = orbit_decomposition(x)
    labels = orbit_labels(lat, x.universe)
    return {"size": x.size, "universe": subgroup_json(lat, x.universe),
            "census": {labels[i]: m for i, m in dec.classes()},
            "marks": list(mark_vector(x)),
            "orbits": [{"least": o.least, "size": len(o.members),
                        "stabilizer": subgroup_json(lat, o.stabilizer, x.universe)} for o in dec.orbits]}, None


def cmd_marks(args):
    g = parse_group(args.group)
    lat = g.lattice
    u = lat.whole if args.universe is None else parse_subgroup(lat, _json_arg(args.universe),
                                                               "--universe")
    t = table_of_marks(lat, u)
    return {"rows": orbit_labels(lat, u), "columns": relative_names(lat, u), "matrix": _matrix(t.as_array())}, None


def _json_arg(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def cmd_span(args):
    doc = _document(args.spec)
    g, gspec = _group_of(doc, args.group)
    lat = g.lattice
    nodes = doc.get("spans")
    if not isinstance(nodes, list) or not nodes:
        raise SpecError("spans", "expected a non-empty list of spans, composed left to right")
    spans = [parse_span(lat, s, f"spans[{i}]", gspec) for i, s in enumerate(nodes)]
    w = spans[0]
    for i, s in enumerate(spans[1:], start=1):
        if s.h != w.k:
            raise SpecError(f"spans[{i}].H", "does not match the target of the previous span")
        w = compose_spans(w, s)
    nf = span_normal_form(w.materialize())
    return {"H": subgroup_json(lat, w.h), "K": subgroup_json(lat, w.k), "middle_size": nf.span.middle.size,
            "orbits": [{"base": o.base, "stabilizer": subgroup_json(lat, o.stabilizer), "y": o.y,
                        "size": len(o.members)} for o in nf.triples]}, None


def _system_ranks(lat, m) -> dict:
    rel = lat.relative(m.universe)
    names = relative_names(lat, m.universe)
    return {names[i]: m.rank(h) for i, h in enumerate(rel.reps)}


def cmd_coeff(args):
    doc = _document(args.spec)
    g, gspec = _group_of(doc, args.group)
    lat = g.lattice
    if "ring" in doc:
        s = parse_ring(lat, doc["ring"])
        m = s.system
        what = {"ring": s.label}
    else:
        x = parse_gset(lat, doc.get("gset"), "gset", gspec)
        m = free_system(x)
        what = {"free_on": x.size}
    rep = validate_system(m)
    return dict(what, ranks=_system_ranks(lat, m), violations=list(rep.violations)), rep.ok


def cmd_functor(args):
    doc = _document(args.spec)
    g, gspec = _group_of(doc, args.group)
    lat = g.lattice
    x = parse_gset(lat, doc.get("gset"), "gset", gspec)
    m = free_system(x)
    op = doc.get("op")
    if op in ("induce", "restrict"):
        to = parse_subgroup(lat, doc.get("to", "G" if op == "induce" else "e"), "to")
        if not (x.universe <= to if op == "induce" else to <= x.universe):
            raise SpecError("to", f"cannot {op} from {list(x.universe.elements)} to {list(to.elements)}")
        out = (induce_system if op == "induce" else restrict_system)(m, to)
    elif op == "conjugate":
        a = doc.get("element")
        if not isinstance(a, int) or not 0 <= a < g.order:
            raise SpecError("element", f"expected a group element in 0..{g.order - 1}")
        out = conjugate_system(m, a)
    else:
        raise SpecError("op", "expected 'induce', 'restrict' or 'conjugate'")
    rep = validate_system(out)
    return {"op": op, "universe": subgroup_json(lat, out.universe), "source_ranks": _system_ranks(lat, m),
            "ranks": _system_ranks(lat, out), "violations": list(rep.violations)}, rep.ok


def cmd_doublecoset(args):
    doc = _document(args.spec)
    g, gspec = _group_of(doc, args.group)
    lat = g.lattice
    k = parse_subgroup(lat, doc.get("K", "G"), "K")
    j = parse_subgroup(lat, doc.get("J", "e"), "J")
    h = parse_subgroup(lat, doc.get("H", "e"), "H")
    if not (j <= k and h <= k):
        raise SpecError("K", "J and H must be subgroups of K")
    node = doc.get("gset", {"orbits": ["e"]})
    x = parse_gset(lat, dict(node, universe=node.get("universe", {"elements": list(j.elements)})), "gset", gspec)
    if x.universe != j:
        raise SpecError("gset.universe", "the G-set must be a J-set")
    f = double_coset_iso(k, j, h, free_system(x))
    dc = f.target.double_cosets
    ok = f.is_iso() and f.is_natural()
    return {"representatives": list(dc.representatives),
            "intersections": [subgroup_json(lat, s) for s in dc.intersections],
            "ranks": _system_ranks(lat, f.source), "iso": bool(ok)}, ok


def _module_from(doc, args):
    g, gspec = _group_of(doc, args.group)
    lat = g.lattice
    s = parse_ring(lat, doc.get("ring", "constant"))
    return lat, parse_module(s, doc.get("module", {}), "module", gspec)


def cmd_split(args):
    doc = _document(args.spec)
    lat, p = _module_from(doc, args)
    names = relative_names(lat, p.universe)
    stages = []
    cur = p
    try:
        for i in reversed(range(len(names))):
            if cur.rank(lat.relative(p.universe).reps[i]) == 0:
                continue
            res = isotropy_split(cur, i)
            stages.append({"class": names[i], "sub_ranks": res.sub.ranks(), "quotient_ranks": res.quotient.ranks()})
            cur = res.quotient
    except NotProjectiveError as ex:
        return {"ranks": p.ranks(), "stages": stages, "error": str(ex)}, False
    return {"ranks": p.ranks(), "stages": stages}, cur.is_zero()


def cmd_k0(args):
    doc = _document(args.spec)
    lat, p = _module_from(doc, args)
    names = relative_names(lat, p.universe)
    try:
        v = k0_class_vector(p)
    except NotProjectiveError as ex:
        return {"error": str(ex)}, False
    return {"classes": names, "zranks": list(v.zranks()), "augranks": list(v.augranks()),
            "reduced": list(v.reduced())}, None


def cmd_twisted(args):
    if args.s3_iso:
        t, s3, iso = twisted_s3_iso()
        ok = iso is not None
        return {"source": t.label, "target": "Z[S3]", "found": ok,
                "basis_map": _matrix(iso) if ok else None}, ok
    g = parse_group(args.group)
    lat = g.lattice
    s = parse_ring(lat, args.ring)
    names = class_names(lat)
    out = []
    ok = True
    for i, h in enumerate(lat.reps):
        t = level_twisted_ring(s, h)
        bad = t.violations()
        ok = ok and not bad
        out.append({"class": names[i], "level_rank": t.n, "weyl_order": t.w, "dim": t.dim,
                    "augmented": t.augmentation is not None, "violations": bad})
    return {"ring": s.label, "levels": out}, ok


def _complex(args):
    p = Path(args.complex)
    if not p.exists() and p.stem in COMPLEX_CATALOG:
        return parse_complex({"group": args.group or "C2", "catalog": p.stem})
    return parse_complex(_document(args.complex))


def cmd_euler(args):
    g, x = _complex(args)
    lat = g.lattice
    e = equivariant_euler_class(x)
    labels = orbit_labels(lat, x.universe)
    marks = list(euler_marks(x))
    ok = marks == list(e.marks())
    return {"class": dict(zip(labels, e.coeffs)), "marks": marks}, (None if ok else False)


def cmd_linearize(args):
    g, x = _complex(args)
    lat = g.lattice
    c = equivariant_chain_complex(x)
    names = relative_names(lat, x.universe)
    direct = list(component_rank_vector(x))
    split = list(linearization_components(x))
    homology = {}
    for i, h in enumerate(lat.relative(x.universe).reps):
        homology[names[i]] = [{"rank": v.free_rank, "torsion": list(v.torsion)} for v in c.homology(h)]
    return {"components": dict(zip(names, split)), "orbit_count": dict(zip(names, direct)),
            "homology": homology}, direct == split


def cmd_verify(args):
    names = list(SUITES) if args.suite == "all" else [args.suite]
    out = {}
    ok = True
    for n in names:
        kw = {"seed": args.seed}
        if args.max_order is not None:
            kw["max_order"] = args.max_order
        if args.groups:
            kw["groups"] = args.groups.split(",")
        res = run_suite(n, **kw)
        print(res.summary(), file=sys.stderr)
        out[n] = {"criterion": res.criterion, "cases": res.cases, "failures": res.failures[:20],
                  "passed": res.passed}
        ok = ok and res.passed
    return out, ok


COMMANDS = {
    "group": cmd_group, "gset": cmd_gset, "marks": cmd_marks, "span": cmd_span, "coeff": cmd_coeff,
    "functor": cmd_functor, "doublecoset": cmd_doublecoset, "split": cmd_split, "k0": cmd_k0,
    "twisted": cmd_twisted, "euler": cmd_euler, "linearize": cmd_linearize, "verify": cmd_verify,
}


# -- argument parsing --------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise SpecError("arguments", message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--group", help="catalog group name (overrides the spec file)")
    p = _Parser(prog="equik", description="Equivariant coefficient systems, spans and K-theory invariants.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("group", parents=[common], help="subgroup classes and Weyl groups")
    sp.add_argument("--spec")
    sub.add_parser("marks", parents=[common], help="table of marks").add_argument(
        "--universe", help="acting subgroup, e.g. '{\"class\": 1}'")
    for name, text in (("gset", "orbit decomposition and marks of a G-set"),
                       ("span", "compose spans and print the normal form"),
                       ("coeff", "free coefficient system or ring: ranks and validation"),
                       ("functor", "induce, restrict or conjugate a free system"),
                       ("doublecoset", "double coset decomposition of R^K_H I^K_J"),
                       ("split", "isotropy filtration of a projective module"),
                       ("k0", "K_0 class vector of a projective module")):
        sub.add_parser(name, parents=[common], help=text).add_argument("spec", help="JSON or TOML spec file")
    sp = sub.add_parser("twisted", parents=[common], help="twisted group rings of a coefficient ring")
    sp.add_argument("--ring", default="constant")
    sp.add_argument("--s3-iso", action="store_true", help="exhibit Z[C3]_θ[C2] ≅ Z[S3]")
    for name, text in (("euler", "equivariant Euler class of a G-simplicial complex"),
                       ("linearize", "chain-level linearization of a G-simplicial complex")):
        sub.add_parser(name, parents=[common], help=text).add_argument("--complex", required=True)
    sp = sub.add_parser("verify", parents=[common], help="run a property suite")
    sp.add_argument("suite", choices=list(SUITES) + ["all"])
    sp.add_argument("--max-order", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--groups", help="comma separated catalog names")
    return p


# -- output -----------------------------------------------------------------------

def _text(node, indent: int = 0) -> list[str]:
    pad = "  " * indent
    if isinstance(node, dict):
        lines = []
        for k, v in node.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
        return lines
    if isinstance(node, list):
        lines = []
        for v in node:
            sub = _text(v, indent + 1)
            lines.append(f"{pad}- {sub[0].strip()}" if sub else f"{pad}-")
            lines.extend(sub[1:])
        return lines
    return [f"{pad}{_inline(node)}"]


def _flat(v) -> bool:
    items = v.values() if isinstance(v, dict) else v
    return all(not isinstance(x, (dict, list)) or (isinstance(x, list) and _flat(x)) for x in items)


def _inline(v) -> str:
    return json.dumps(v, ensure_ascii=False) if isinstance(v, (dict, list, str)) or v is None else str(v)


def _marks_text(res: dict) -> list[str]:
    w = max(len(r) for r in res["rows"])
    cols = res["columns"]
    widths = [max(len(c), *(len(str(row[j])) for row in res["matrix"])) for j, c in enumerate(cols)]
    head = " " * w + " | " + " ".join(c.rjust(widths[j]) for j, c in enumerate(cols))
    lines = [head, "-" * len(head)]
    for r, row in zip(res["rows"], res["matrix"]):
        lines.append(r.ljust(w) + " | " + " ".join(str(v).rjust(widths[j]) for j, v in enumerate(row)))
    return lines


def emit(report: dict, fmt: str, out=None) -> None:
    out = out or sys.stdout
    if fmt == "json":
        out.write(json.dumps(report, sort_keys=True, ensure_ascii=False) + "\n")
        return
    lines = [f"equik {' '.join(report['command'])}"]
    if report["command"][0] == "marks":
        lines += _marks_text(report["result"])
    else:
        lines += _text(report["result"])
    if report["verdict"] is not None:
        lines.append(f"verdict: {report['verdict']}")
    out.write("\n".join(lines) + "\n")


def run(argv=None) -> tuple[dict | None, int]:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        t0 = time.perf_counter()
        result, ok = COMMANDS[args.command](args)
        elapsed = time.perf_counter() - t0
    except INPUT_ERRORS as ex:
        print(f"equik: error: {ex}", file=sys.stderr)
        return None, 2
    verdict = None if ok is None else ("pass" if ok else "fail")
    report = {"command": argv_echo(argv), "result": result, "verdict": verdict}
    emit(report, args.format)
    print(f"equik: {args.command} took {elapsed:.2f}s", file=sys.stderr)
    return report, 1 if ok is False else 0


def argv_echo(argv) -> list[str]:
    """The argument vector minus the output format, so both formats echo the same command."""
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a == "--format":
            skip = True
        elif not a.startswith("--format="):
            out.append(a)
    return out


def main(argv=None) -> int:
    _, code = run(argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
