"""Reading groups, G-sets, spans, rings, modules and complexes from spec files.

Spec files are JSON, or TOML when the name ends in ``.toml``.  Every parser
takes the node and a location path; malformed input raises :class:`SpecError`
whose message starts with that path (``complex.simplices[3]: ...``).

Formats
-------
group
    ``"S3"`` or ``{"catalog": "S3"}`` or ``{"perm_generators": [[1,0,2], [1,2,0]]}``.
subgroup
    ``"G"`` / ``"whole"``, ``"e"`` / ``"trivial"``, ``{"class": i}`` (class
    representative), ``{"elements": [...]}`` or ``{"generators": [...]}``.
gset
    ``{"orbits": [subgroup, ...]}``, ``{"census": [n_0, n_1, ...]}``,
    ``{"points": n, "generators": {"g": perm, ...}}`` (images of group
    elements generating the acting group) or ``{"action": [[...], ...]}`` (one
    row per group element).  An optional ``"universe"`` subgroup restricts the
    acting group.
span
    ``{"H": subgroup, "K": subgroup, "middle": gset, "r": [...], "t": [...]}``.
ring
    ``"constant"`` or ``{"catalog": label}`` (a catalog G-ring such as
    ``"Z^3"`` or ``"Z[C3]"``, taken through its fixed-point system).
module
    ``{"gset": gset, "idempotent": [...]}`` with the idempotent in Yoneda
    coordinates (omitted: the free module).
complex
    ``{"group": group, "vertices": gset, "simplices": [[v, ...], ...]}`` with
    optional ``"subdivide": true``; or ``{"group": group, "catalog": name}``.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any

import numpy as np

from .coeff import CoefficientRing, catalog_grings, constant_ring, fp_system
from .gcw import (ComplexError, antipodal_square, barycentric_subdivide, load_complex, make_complex,
                  octahedron_c2, point_complex, swap_edge)
from .groups import FiniteGroup, GroupError, Subgroup, SubgroupLattice, build_group, catalog_generators
from .gsets import (GSet, GSetError, gset_from_census, gset_from_generators, gset_from_table, orbit_gset)
from .modules import NotProjectiveError, ProjectiveModule, free_module, hom_space
from .spans import Span, SpanError, make_span

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class SpecError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def load_document(path: str | Path) -> Any:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as ex:
        raise SpecError(str(p), f"cannot read file ({ex.strerror})") from None
    try:
        if p.suffix == ".toml":
            return tomllib.loads(text)
        return json.loads(text)
    except json.JSONDecodeError as ex:
        raise SpecError(f"{p}:{ex.lineno}:{ex.colno}", ex.msg) from None
    except tomllib.TOMLDecodeError as ex:
        raise SpecError(str(p), str(ex)) from None


def _need(node, key: str, path: str):
    if not isinstance(node, dict):
        raise SpecError(path, f"expected an object, got {type(node).__name__}")
    if key not in node:
        raise SpecError(path, f"missing key {key!r}")
    return node[key]


def _ints(node, path: str) -> list[int]:
    if not isinstance(node, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in node):
        raise SpecError(path, "expected a list of integers")
    return list(node)


def parse_group(node, path: str = "group") -> FiniteGroup:
    try:
        if isinstance(node, (str, dict)):
            return build_group(node)
    except (GroupError, ValueError, IndexError, TypeError) as ex:
        raise SpecError(path, str(ex)) from None
    raise SpecError(path, "expected a catalog name or an object with 'catalog' or 'perm_generators'")


def parse_subgroup(lat: SubgroupLattice, node, path: str = "subgroup") -> Subgroup:
    if node in ("G", "whole"):
        return lat.whole
    if node in ("e", "trivial"):
        return lat.trivial
    if isinstance(node, dict):
        try:
            if "class" in node:
                i = node["class"]
                if not isinstance(i, int) or not 0 <= i < len(lat.reps):
                    raise SpecError(f"{path}.class", f"expected a class index in 0..{len(lat.reps) - 1}")
                return lat.reps[i]
            if "elements" in node:
                return lat.subgroup(_ints(node["elements"], f"{path}.elements"))
            if "generators" in node:
                gens = _ints(node["generators"], f"{path}.generators")
                if any(not 0 <= a < lat.group.order for a in gens):
                    raise SpecError(f"{path}.generators", "element out of range")
                return lat.generated(gens)
        except GroupError as ex:
            raise SpecError(path, str(ex)) from None
    raise SpecError(path, "expected 'G', 'e' or an object with 'class', 'elements' or 'generators'")


def _generator_elements(g: FiniteGroup, spec) -> list[int]:
    """Element ids of the generators a group spec was built from."""
    if isinstance(spec, dict) and "perm_generators" in spec:
        perms = [tuple(p) for p in spec["perm_generators"]]
    elif g.perms is None:
        return [1] if g.order > 1 else []          # catalog cyclic groups
    else:
        name = spec["catalog"] if isinstance(spec, dict) else spec
        perms = [tuple(p) for p in catalog_generators(name)]
    index = {p: i for i, p in enumerate(g.perms)}
    return [index[p] for p in perms]


def parse_gset(lat: SubgroupLattice, node, path: str = "gset", group_spec=None) -> GSet:
    if not isinstance(node, dict):
        raise SpecError(path, "expected an object")
    u = parse_subgroup(lat, node["universe"], f"{path}.universe") if "universe" in node else lat.whole
    try:
        if "orbits" in node:
            subs = node["orbits"]
            if not isinstance(subs, list):
                raise SpecError(f"{path}.orbits", "expected a list of subgroups")
            parts = [parse_subgroup(lat, s, f"{path}.orbits[{i}]") for i, s in enumerate(subs)]
            bad = [i for i, h in enumerate(parts) if not h <= u]
            if bad:
                raise SpecError(f"{path}.orbits[{bad[0]}]", "not a subgroup of the acting group")
            return orbit_gset(lat, parts, u)
        if "census" in node:
            census = _ints(node["census"], f"{path}.census")
            n = len(lat.relative(u))
            if len(census) != n or min(census, default=0) < 0:
                raise SpecError(f"{path}.census", f"expected {n} non-negative multiplicities")
            return gset_from_census(lat, census, u)
        if "generators" in node:
            n = _need(node, "points", path)
            gens = node["generators"]
            if isinstance(gens, list):
                if group_spec is None:
                    raise SpecError(f"{path}.generators", "a list of images needs the group's generators")
                elts = _generator_elements(lat.group, group_spec)
                if len(gens) != len(elts):
                    raise SpecError(f"{path}.generators", f"expected {len(elts)} permutations")
                images = dict(zip(elts, gens))
            elif isinstance(gens, dict):
                images = {int(k): v for k, v in gens.items()}
            else:
                raise SpecError(f"{path}.generators", "expected a list or an object of permutations")
            return gset_from_generators(lat, images, int(n), u)
        if "action" in node:
            rows = node["action"]
            if not isinstance(rows, list) or len(rows) != lat.group.order:
                raise SpecError(f"{path}.action", f"expected {lat.group.order} rows, one per group element")
            return gset_from_table(lat, rows, u)
    except SpecError:
        raise
    except (GSetError, GroupError) as ex:
        raise SpecError(path, str(ex)) from None
    except (ValueError, TypeError, IndexError) as ex:
        raise SpecError(path, f"malformed G-set ({ex})") from None
    raise SpecError(path, "expected one of 'orbits', 'census', 'generators', 'action'")


def parse_span(lat: SubgroupLattice, node, path: str = "span", group_spec=None) -> Span:
    h = parse_subgroup(lat, _need(node, "H", path), f"{path}.H")
    k = parse_subgroup(lat, _need(node, "K", path), f"{path}.K")
    middle = parse_gset(lat, _need(node, "middle", path), f"{path}.middle", group_spec)
    r = _ints(_need(node, "r", path), f"{path}.r")
    t = _ints(_need(node, "t", path), f"{path}.t")
    try:
        return make_span(lat, h, k, middle, r, t)
    except (SpanError, GSetError, IndexError) as ex:
        raise SpecError(path, str(ex)) from None


def ring_labels(lat: SubgroupLattice) -> list[str]:
    return ["constant"] + [r.label for r in catalog_grings(lat)[1:]]


def parse_ring(lat: SubgroupLattice, node, path: str = "ring") -> CoefficientRing:
    if node in (None, "constant", "Z"):
        return constant_ring(lat)
    label = node.get("catalog") if isinstance(node, dict) else node
    for r in catalog_grings(lat)[1:]:
        if r.label == label:
            return fp_system(r)
    raise SpecError(path, f"unknown ring {label!r}; available: {', '.join(ring_labels(lat))}")


def parse_module(ring: CoefficientRing, node, path: str = "module", group_spec=None) -> ProjectiveModule:
    x = parse_gset(ring.lattice, _need(node, "gset", path), f"{path}.gset", group_spec)
    if "idempotent" not in node:
        return ProjectiveModule(ring, x)
    c = _ints(node["idempotent"], f"{path}.idempotent")
    free = free_module(ring, x)
    space = hom_space(free, free)
    if len(c) != space.dim:
        raise SpecError(f"{path}.idempotent", f"expected {space.dim} Yoneda coordinates")
    try:
        return ProjectiveModule(ring, x, space.morphism(np.array(c, dtype=np.int64)))
    except NotProjectiveError as ex:
        raise SpecError(f"{path}.idempotent", str(ex)) from None


COMPLEX_CATALOG = {
    "point": point_complex,
    "octahedron_c2": octahedron_c2,
    "antipodal_square": antipodal_square,
    "swap_edge": swap_edge,
}


def parse_complex(node, path: str = "complex"):
    """Returns ``(group, complex)``."""
    gspec = _need(node, "group", path)
    g = parse_group(gspec, f"{path}.group")
    lat = g.lattice
    try:
        if "catalog" in node:
            name = node["catalog"]
            if name not in COMPLEX_CATALOG:
                raise SpecError(f"{path}.catalog", f"unknown complex {name!r}; available: {', '.join(COMPLEX_CATALOG)}")
            x = COMPLEX_CATALOG[name](lat)
        else:
            verts = parse_gset(lat, _need(node, "vertices", path), f"{path}.vertices", gspec)
            sims = _need(node, "simplices", path)
            if not isinstance(sims, list):
                raise SpecError(f"{path}.simplices", "expected a list of vertex lists")
            for i, s in enumerate(sims):
                _ints(s, f"{path}.simplices[{i}]")
                if not s or any(not 0 <= v < verts.size for v in s):
                    raise SpecError(f"{path}.simplices[{i}]", f"vertices must lie in 0..{verts.size - 1}")
            if node.get("subdivide"):
                x = barycentric_subdivide(make_complex(verts, sims, close=True, check=False))
            else:
                x = load_complex(verts, sims)
    except ComplexError as ex:
        raise SpecError(path, str(ex)) from None
    return g, x


__all__ = [
    "SpecError", "COMPLEX_CATALOG", "load_document", "parse_group", "parse_subgroup", "parse_gset",
    "parse_span", "parse_ring", "ring_labels", "parse_module", "parse_complex",
]
