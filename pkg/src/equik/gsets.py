"""Totally ordered finite G-sets with strictly associative constructions.

A :class:`GSet` lives inside a fixed ambient group and is acted on by a
subgroup ``universe`` of it.  Elements are the ids ``0..size-1``; the id order
is the total order.  Each element carries a payload, a flat tuple of atoms.
Products and pullbacks order pairs lexicographically and concatenate
payloads, coproducts concatenate left then right.  With these choices the
usual associativity and unit isomorphisms are identities of values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations_with_replacement
from typing import Iterable, Mapping, Sequence

import numpy as np

from .groups import FiniteGroup, GroupError, Subgroup, SubgroupLattice


class GSetError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GSet:
    lattice: SubgroupLattice
    universe: Subgroup
    action: tuple[tuple[int, ...] | None, ...]   # action[g][x], None for g outside universe
    payload: tuple[tuple, ...]

    @property
    def group(self) -> FiniteGroup:
        return self.lattice.group

    @property
    def size(self) -> int:
        return len(self.payload)

    def __len__(self):
        return len(self.payload)

    def _key(self):
        return (self.universe.elements, self.action, self.payload)

    def __eq__(self, other):
        return isinstance(other, GSet) and self.group is other.group and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"GSet(size={self.size}, universe={list(self.universe.elements)})"

    def act(self, g: int, x: int) -> int:
        return self.action[g][x]

    def validate(self) -> list[str]:
        errs = []
        g = self.group
        n = self.size
        for a in range(g.order):
            row = self.action[a]
            if (a in self.universe) != (row is not None):
                errs.append(f"action row {a} present iff element of universe")
            elif row is not None and sorted(row) != list(range(n)):
                errs.append(f"element {a} does not act by a permutation")
        if errs:
            return errs
        if any(self.action[0][x] != x for x in range(n)):
            errs.append("identity acts nontrivially")
        for a in self.universe.elements:
            for b in self.universe.elements:
                ab = g.mul(a, b)
                if any(self.action[ab][x] != self.action[a][self.action[b][x]] for x in range(n)):
                    errs.append(f"composition law fails for ({a}, {b})")
        return errs

    def fixed_points(self, h: Subgroup) -> list[int]:
        gens = self.lattice.generators(h)
        return [x for x in range(self.size) if all(self.action[s][x] == x for s in gens)]

    def stabilizer(self, x: int) -> Subgroup:
        return self.lattice.subgroup(a for a in self.universe.elements if self.action[a][x] == x)

    def orbit(self, x: int) -> list[int]:
        return sorted({self.action[a][x] for a in self.universe.elements})

    @cached_property
    def orbit_minima(self) -> tuple[int, ...]:
        seen = set()
        mins = []
        for x in range(self.size):
            if x in seen:
                continue
            mins.append(x)
            seen.update(self.orbit(x))
        return tuple(mins)

    def restrict(self, h: Subgroup) -> "GSet":
        if not h <= self.universe:
            raise GSetError("restriction needs a subgroup of the acting group")
        action = tuple(row if a in h else None for a, row in enumerate(self.action))
        return GSet(self.lattice, h, action, self.payload)


@dataclass(frozen=True, eq=False)
class GMap:
    domain: GSet
    codomain: GSet
    image: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.image[x]

    def __eq__(self, other):
        return (isinstance(other, GMap) and self.domain == other.domain
                and self.codomain == other.codomain and self.image == other.image)

    def __hash__(self):
        return hash(self.image)

    def validate(self) -> list[str]:
        d, c = self.domain, self.codomain
        if d.universe != c.universe:
            return ["domain and codomain have different acting groups"]
        if len(self.image) != d.size or any(not 0 <= y < c.size for y in self.image):
            return ["image table has the wrong shape"]
        bad = [(a, x) for a in d.lattice.generators(d.universe) for x in range(d.size)
               if self.image[d.action[a][x]] != c.action[a][self.image[x]]]
        return [f"not equivariant at g={a}, x={x}" for a, x in bad[:3]]

    def compose(self, first: "GMap") -> "GMap":
        """``self ∘ first``."""
        if first.codomain != self.domain:
            raise GSetError("maps are not composable")
        return GMap(first.domain, self.codomain, tuple(self.image[y] for y in first.image))


def identity_map(x: GSet) -> GMap:
    return GMap(x, x, tuple(range(x.size)))


# -- constructions ------------------------------------------------------------

def empty_gset(lat: SubgroupLattice, universe: Subgroup | None = None) -> GSet:
    u = universe or lat.whole
    return GSet(lat, u, tuple(() if a in u else None for a in range(lat.group.order)), ())


def gset_from_table(lat: SubgroupLattice, action: Sequence[Sequence[int] | None],
                    universe: Subgroup | None = None, payload: Sequence[tuple] | None = None) -> GSet:
    u = universe or lat.whole
    rows = tuple(tuple(int(v) for v in row) if a in u else None for a, row in enumerate(action))
    n = len(rows[0])
    pay = tuple(tuple(p) for p in payload) if payload is not None else tuple((("pt", i),) for i in range(n))
    x = GSet(lat, u, rows, pay)
    errs = x.validate()
    if errs:
        raise GSetError("; ".join(errs))
    return x


def gset_from_generators(lat: SubgroupLattice, images: Mapping[int, Sequence[int]], n: int,
                         universe: Subgroup | None = None, tag: str = "pt") -> GSet:
    """``U``-set on ``n`` points from the permutations of a generating set of ``U``."""
    u = universe or lat.whole
    g = lat.group
    table: dict[int, tuple[int, ...]] = {0: tuple(range(n))}
    frontier = [0]
    gens = {int(a): tuple(int(v) for v in p) for a, p in images.items()}
    for a, p in gens.items():
        if a not in u:
            raise GSetError(f"element {a} is not in the acting group")
        if sorted(p) != list(range(n)):
            raise GSetError(f"image of {a} is not a permutation of {n} points")
    while frontier:
        a = frontier.pop()
        for s, p in gens.items():
            b = g.mul(a, s)
            img = tuple(table[a][p[v]] for v in range(n))
            if b in table:
                if table[b] != img:
                    raise GSetError("the given permutations do not define an action")
            else:
                table[b] = img
                frontier.append(b)
    if set(table) != set(u.elements):
        raise GSetError("the given elements do not generate the acting group")
    action = tuple(table.get(a) if a in u else None for a in range(g.order))
    return GSet(lat, u, action, tuple(((tag, i),) for i in range(n)))


def canonical_orbit(lat: SubgroupLattice, h: Subgroup, universe: Subgroup | None = None) -> GSet:
    """``U/H`` with cosets ordered by least element and left translation action."""
    u = universe or lat.whole
    cache = lat.__dict__.setdefault("_orbit_cache", {})
    key = (h.index, u.index)
    if key in cache:
        return cache[key]
    reps = lat.left_cosets(u, h)
    pos = {x: i for i, x in enumerate(reps)}
    g = lat.group
    action = tuple(tuple(pos[lat.coset_rep(g.mul(a, x), h)] for x in reps) if a in u else None
                   for a in range(g.order))
    payload = tuple(((h.index, x),) for x in reps)
    out = GSet(lat, u, action, payload)
    cache[key] = out
    return out


def orbit_map(lat: SubgroupLattice, h: Subgroup, k: Subgroup, a: int = 0,
              universe: Subgroup | None = None) -> GMap:
    """``U/H -> U/K, xH -> xaK`` (needs ``a^-1 H a <= K``)."""
    if not lat.conjugate(h, a) <= k:
        raise GSetError("orbit map needs H^a <= K")
    src = canonical_orbit(lat, h, universe)
    dst = canonical_orbit(lat, k, universe)
    g = lat.group
    pos = {p[0][1]: i for i, p in enumerate(dst.payload)}
    img = tuple(pos[lat.coset_rep(g.mul(p[0][1], a), k)] for p in src.payload)
    return GMap(src, dst, img)


def coset_of(x: GSet, i: int) -> int:
    """Least group element of the coset named by element ``i`` of a canonical orbit."""
    return x.payload[i][0][1]


def coproduct(*parts: GSet) -> GSet:
    if not parts:
        raise GSetError("coproduct of nothing needs an explicit empty set")
    lat, u = parts[0].lattice, parts[0].universe
    if any(p.universe != u for p in parts):
        raise GSetError("coproduct factors must share the acting group")
    offsets = np.cumsum([0] + [p.size for p in parts]).tolist()
    action = []
    for a in range(lat.group.order):
        if a not in u:
            action.append(None)
            continue
        row = []
        for p, off in zip(parts, offsets):
            row.extend(v + off for v in p.action[a])
        action.append(tuple(row))
    payload = tuple(q for p in parts for q in p.payload)
    return GSet(lat, u, tuple(action), payload)


def coproduct_inclusions(parts: Sequence[GSet]) -> list[GMap]:
    total = coproduct(*parts)
    out, off = [], 0
    for p in parts:
        out.append(GMap(p, total, tuple(range(off, off + p.size))))
        off += p.size
    return out


def _subproduct(a: GSet, b: GSet, pairs: list[tuple[int, int]]) -> GSet:
    pos = {pq: i for i, pq in enumerate(pairs)}
    action = tuple(tuple(pos[(a.action[g][x], b.action[g][y])] for x, y in pairs) if g in a.universe else None
                   for g in range(a.group.order))
    payload = tuple(a.payload[x] + b.payload[y] for x, y in pairs)
    return GSet(a.lattice, a.universe, action, payload)


def product(a: GSet, b: GSet) -> tuple[GSet, GMap, GMap]:
    if a.universe != b.universe:
        raise GSetError("product factors must share the acting group")
    pairs = [(x, y) for x in range(a.size) for y in range(b.size)]
    p = _subproduct(a, b, pairs)
    return p, GMap(p, a, tuple(x for x, _ in pairs)), GMap(p, b, tuple(y for _, y in pairs))


def pullback_over(f: GMap, g: GMap) -> tuple[GSet, GMap, GMap]:
    """``A ×_B C`` as the ordered subset ``{(a, c) : f(a) = g(c)}`` of ``A × C``."""
    if f.codomain != g.codomain:
        raise GSetError("pullback needs a common codomain")
    a, c = f.domain, g.domain
    by_target: dict[int, list[int]] = {}
    for y in range(c.size):
        by_target.setdefault(g.image[y], []).append(y)
    pairs = [(x, y) for x in range(a.size) for y in by_target.get(f.image[x], ())]
    p = _subproduct(a, c, pairs)
    return p, GMap(p, a, tuple(x for x, _ in pairs)), GMap(p, c, tuple(y for _, y in pairs))


# -- orbits -----------------------------------------------------------------

@dataclass(frozen=True)
class OrbitInfo:
    least: int
    stabilizer: Subgroup
    members: tuple[int, ...]


@dataclass(frozen=True)
class OrbitDecomposition:
    orbits: tuple[OrbitInfo, ...]
    census: tuple[int, ...]          # multiplicity per conjugacy class of the acting group
    iso: GMap                        # onto the coproduct of canonical orbits

    def classes(self) -> list[tuple[Subgroup, int]]:
        return [(i, m) for i, m in enumerate(self.census) if m]


def orbit_decomposition(x: GSet) -> OrbitDecomposition:
    lat, u = x.lattice, x.universe
    rel = lat.relative(u)
    orbits = []
    census = [0] * len(rel)
    for m in x.orbit_minima:
        stab = x.stabilizer(m)
        orbits.append(OrbitInfo(m, stab, tuple(x.orbit(m))))
        census[rel.class_index(stab)] += 1
    canon = [canonical_orbit(lat, o.stabilizer, u) for o in orbits]
    target = coproduct(*canon) if canon else empty_gset(lat, u)
    image = [0] * x.size
    off = 0
    for o, c in zip(orbits, canon):
        pos = {p[0][1]: i for i, p in enumerate(c.payload)}
        for g in u.elements:
            image[x.action[g][o.least]] = off + pos[lat.coset_rep(g, o.stabilizer)]
        off += c.size
    return OrbitDecomposition(tuple(orbits), tuple(census), GMap(x, target, tuple(image)))


def mark_vector(x: GSet) -> tuple[int, ...]:
    """``|X^{H_j}|`` over the ordered classes of subgroups of the acting group."""
    rel = x.lattice.relative(x.universe)
    return tuple(len(x.fixed_points(h)) for h in rel.reps)


def find_isomorphism(x: GSet, y: GSet) -> GMap | None:
    """Equivariant bijection by orbit matching (stabilizers up to conjugacy)."""
    if x.universe != y.universe or x.size != y.size:
        return None
    lat, u = x.lattice, x.universe
    g = lat.group
    free = list(y.orbit_minima)
    image = [None] * x.size
    for m in x.orbit_minima:
        sx = x.stabilizer(m)
        for j, n in enumerate(free):
            sy = y.stabilizer(n)
            # need y-point z = c·n with stabilizer equal to sx: sy^{c^-1} = sx
            c = next((c for c in u.elements if lat.conjugate(sy, g.inv(c)) == sx), None)
            if c is None:
                continue
            z = y.action[c][n]
            for a in u.elements:
                image[x.action[a][m]] = y.action[a][z]
            free.pop(j)
            break
        else:
            return None
    return GMap(x, y, tuple(image))


# -- marks and the Burnside ring -----------------------------------------------

@dataclass(frozen=True)
class TableOfMarks:
    """Rows are the orbits ``U/H_i``, columns the subgroups ``H_j``:
    ``matrix[i][j] = |(U/H_i)^{H_j}|``.  Lower triangular in the class order."""
    lattice: SubgroupLattice
    universe: Subgroup
    matrix: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.matrix)

    def as_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64)


@dataclass(frozen=True)
class BurnsideElement:
    table: TableOfMarks
    coeffs: tuple[int, ...]

    def __add__(self, other: "BurnsideElement") -> "BurnsideElement":
        return BurnsideElement(self.table, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "BurnsideElement") -> "BurnsideElement":
        return BurnsideElement(self.table, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other: "BurnsideElement") -> "BurnsideElement":
        return burnside_mul(self, other)

    def __eq__(self, other):
        return isinstance(other, BurnsideElement) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def marks(self) -> tuple[int, ...]:
        m = self.table.matrix
        n = len(m)
        return tuple(sum(self.coeffs[i] * m[i][j] for i in range(n)) for j in range(n))


def table_of_marks(lat: SubgroupLattice, universe: Subgroup | None = None) -> TableOfMarks:
    u = universe or lat.whole
    cache = lat.__dict__.setdefault("_tom_cache", {})
    if u.index not in cache:
        rel = lat.relative(u)
        rows = tuple(mark_vector(canonical_orbit(lat, h, u)) for h in rel.reps)
        cache[u.index] = TableOfMarks(lat, u, rows)
    return cache[u.index]


def burnside_from_marks(t: TableOfMarks, marks: Iterable[int]) -> BurnsideElement:
    """Solve ``Σ_i x_i M[i][j] = marks[j]`` by back substitution over the rationals."""
    marks = [int(v) for v in marks]
    n = t.size
    if len(marks) != n:
        raise GSetError(f"expected {n} marks, got {len(marks)}")
    m = t.matrix
    x: list[Fraction] = [Fraction(0)] * n
    for j in reversed(range(n)):
        acc = Fraction(marks[j]) - sum(x[i] * m[i][j] for i in range(j + 1, n))
        x[j] = acc / m[j][j]
    if any(v.denominator != 1 for v in x):
        raise GSetError(f"marks {marks} are not the marks of a virtual G-set")
    return BurnsideElement(t, tuple(int(v) for v in x))


def burnside_class(x: GSet) -> BurnsideElement:
    return BurnsideElement(table_of_marks(x.lattice, x.universe), orbit_decomposition(x).census)


def basis_element(t: TableOfMarks, i: int) -> BurnsideElement:
    return BurnsideElement(t, tuple(int(j == i) for j in range(t.size)))


def burnside_mul(a: BurnsideElement, b: BurnsideElement) -> BurnsideElement:
    return burnside_from_marks(a.table, [p * q for p, q in zip(a.marks(), b.marks())])


def gset_from_census(lat: SubgroupLattice, census: Sequence[int], universe: Subgroup | None = None) -> GSet:
    """Coproduct of canonical orbits ``U/H_i`` with the given multiplicities."""
    u = universe or lat.whole
    reps = lat.relative(u).reps
    parts = [canonical_orbit(lat, h, u) for h, k in zip(reps, census) for _ in range(k)]
    return coproduct(*parts) if parts else empty_gset(lat, u)


def random_gmap(x: GSet, y: GSet, rng) -> GMap | None:
    """A random equivariant map ``X -> Y`` (``None`` if an orbit has nowhere to go)."""
    image = [0] * x.size
    for m in x.orbit_minima:
        targets = y.fixed_points(x.stabilizer(m))
        if not targets:
            return None
        t = rng.choice(targets)
        for g in x.universe.elements:
            image[x.action[g][m]] = y.action[g][t]
    return GMap(x, y, tuple(image))


def gsets_with_orbits(lat: SubgroupLattice, max_orbits: int, universe: Subgroup | None = None,
                      min_orbits: int = 1) -> list[GSet]:
    """Every ``U``-set with ``min_orbits..max_orbits`` orbits, up to isomorphism."""
    u = universe or lat.whole
    reps = lat.relative(u).reps
    return [orbit_gset(lat, list(c), u) for r in range(min_orbits, max_orbits + 1)
            for c in combinations_with_replacement(reps, r)]


def orbit_gset(lat: SubgroupLattice, subgroups: Sequence[Subgroup], universe: Subgroup | None = None) -> GSet:
    u = universe or lat.whole
    parts = [canonical_orbit(lat, h, u) for h in subgroups]
    return coproduct(*parts) if parts else empty_gset(lat, u)


__all__ = [
    "GSet", "GMap", "GSetError", "GroupError", "OrbitDecomposition", "TableOfMarks", "BurnsideElement",
    "identity_map", "random_gmap", "gsets_with_orbits", "empty_gset", "gset_from_table", "gset_from_generators", "canonical_orbit",
    "orbit_map", "coset_of",
    "coproduct", "coproduct_inclusions", "product", "pullback_over", "orbit_decomposition",
    "mark_vector", "find_isomorphism", "table_of_marks", "burnside_from_marks", "burnside_class",
    "basis_element", "burnside_mul", "gset_from_census", "orbit_gset",
]
