"""Finite groups given by multiplication tables, and their subgroup data.

Elements are integer indices with the identity at 0.  The product ``a*b`` is
``mult[a][b]``; for permutation groups it is composition ``a∘b`` (apply ``b``
first).  Subgroups are sorted tuples of element indices, interned per group
so that identity comparisons are cheap.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

MAX_ORDER = 24
MAX_POINTS = 8


class GroupError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    mult: tuple[tuple[int, ...], ...]
    label: str = ""
    perms: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self):
        n = len(self.mult)
        if n == 0 or n > MAX_ORDER:
            raise GroupError(f"group order {n} outside supported range 1..{MAX_ORDER}")

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and self.mult == other.mult

    def __hash__(self):
        return hash(self.mult)

    def __repr__(self):
        return f"FiniteGroup({self.label or '?'}, order={self.order})"

    @property
    def order(self) -> int:
        return len(self.mult)

    @cached_property
    def inverse(self) -> tuple[int, ...]:
        inv = [0] * self.order
        for a in range(self.order):
            inv[a] = self.mult[a].index(0)
        return tuple(inv)

    def mul(self, a: int, b: int) -> int:
        return self.mult[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def prod(self, *elts: int) -> int:
        r = 0
        for x in elts:
            r = self.mult[r][x]
        return r

    def conj(self, a: int, g: int) -> int:
        """``g^-1 a g``."""
        return self.mult[self.mult[self.inverse[g]][a]][g]

    def is_valid(self) -> bool:
        n = self.order
        rng = range(n)
        if any(self.mult[0][a] != a or self.mult[a][0] != a for a in rng):
            return False
        if any(sorted(row) != list(rng) for row in self.mult):
            return False
        m = self.mult
        return all(m[m[a][b]][c] == m[a][m[b][c]] for a in rng for b in rng for c in rng)

    @cached_property
    def lattice(self) -> "SubgroupLattice":
        return SubgroupLattice(self)

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != 0:
            x = self.mult[x][a]
            k += 1
        return k


@dataclass(frozen=True, eq=False)
class Subgroup:
    elements: tuple[int, ...]
    group: FiniteGroup = field(repr=False)
    index: int = -1

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self.elements == other.elements

    def __hash__(self):
        return hash(self.elements)

    def __len__(self):
        return len(self.elements)

    def __contains__(self, g: int) -> bool:
        return g in self.elementset

    def __iter__(self):
        return iter(self.elements)

    @cached_property
    def elementset(self) -> frozenset[int]:
        return frozenset(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __le__(self, other: "Subgroup") -> bool:
        return self.elementset <= other.elementset

    def __lt__(self, other: "Subgroup") -> bool:
        return self.elementset < other.elementset

    def __repr__(self):
        return f"Subgroup#{self.index}{list(self.elements)}"


def _closure(group: FiniteGroup, gens: Iterable[int]) -> tuple[int, ...]:
    elts = {0}
    frontier = [0]
    gens = list(gens)
    while frontier:
        new = []
        for a in frontier:
            for s in gens:
                b = group.mult[a][s]
                if b not in elts:
                    elts.add(b)
                    new.append(b)
        frontier = new
    return tuple(sorted(elts))


@dataclass(frozen=True)
class WeylData:
    subgroup: Subgroup
    normalizer: Subgroup
    quotient: FiniteGroup
    labels: tuple[int, ...]          # quotient index -> least element of the coset
    project: dict[int, int]          # normalizer element -> quotient index


@dataclass(frozen=True)
class DoubleCosetData:
    k: Subgroup
    j: Subgroup
    h: Subgroup
    representatives: tuple[int, ...]
    intersections: tuple[Subgroup, ...]   # h ∩ j^γ per representative
    cosets: tuple[frozenset[int], ...]


class SubgroupLattice:
    """All subgroups of a group, with conjugacy classes in the filtration order.

    Classes are ordered by subgroup order, then by the sorted element list of
    the class's lexicographically least member, which is also the class
    representative.  ``reps[0]`` is the trivial group and ``reps[-1]`` the
    whole group.
    """

    def __init__(self, group: FiniteGroup):
        self.group = group
        subs = self._enumerate()
        subs.sort(key=lambda s: (len(s), s))
        self.subgroups: list[Subgroup] = [Subgroup(s, group, i) for i, s in enumerate(subs)]
        self._by_elements = {s.elements: s for s in self.subgroups}
        self._conj_cache: dict[tuple[int, int], Subgroup] = {}
        self._build_classes()

    def _enumerate(self) -> list[tuple[int, ...]]:
        g = self.group
        found = {_closure(g, [a]) for a in range(g.order)}
        frontier = set(found)
        cyclic = list(found)
        while frontier:
            new = set()
            for s in frontier:
                for c in cyclic:
                    if set(c) <= set(s):
                        continue
                    j = _closure(g, s + c)
                    if j not in found:
                        new.add(j)
            found |= new
            frontier = new
        return list(found)

    def _build_classes(self):
        g = self.group
        seen: dict[Subgroup, int] = {}
        classes: list[list[Subgroup]] = []
        for s in self.subgroups:
            if s in seen:
                continue
            members = sorted({self.conjugate(s, x) for x in range(g.order)}, key=lambda t: t.elements)
            for m in members:
                seen[m] = len(classes)
            classes.append(members)
        classes.sort(key=lambda c: (len(c[0]), c[0].elements))
        self.classes: list[tuple[Subgroup, ...]] = [tuple(c) for c in classes]
        self.reps: list[Subgroup] = [c[0] for c in classes]
        self._class_of = {m: i for i, c in enumerate(self.classes) for m in c}
        n = len(self.classes)
        self.subconjugate = [[any(r <= m for m in self.classes[i]) for i in range(n)] for r in self.reps]

    def relative(self, u: Subgroup) -> "RelativeClasses":
        """Conjugacy classes of subgroups of ``u`` under conjugation by ``u``."""
        cache = self.__dict__.setdefault("_rel_cache", {})
        if u.index not in cache:
            cache[u.index] = RelativeClasses(self, u)
        return cache[u.index]

    # -- lookups ------------------------------------------------------------
    def __len__(self):
        return len(self.subgroups)

    def subgroup(self, elements: Iterable[int]) -> Subgroup:
        key = tuple(sorted(set(elements)))
        try:
            return self._by_elements[key]
        except KeyError:
            raise GroupError(f"{list(key)} is not a subgroup") from None

    def generated(self, gens: Iterable[int]) -> Subgroup:
        return self._by_elements[_closure(self.group, gens)]

    @property
    def trivial(self) -> Subgroup:
        return self.subgroups[0]

    @property
    def whole(self) -> Subgroup:
        return self.subgroups[-1]

    def class_index(self, s: Subgroup) -> int:
        return self._class_of[s]

    def is_subconjugate(self, a: Subgroup, b: Subgroup) -> bool:
        return self.subconjugate[self.class_index(a)][self.class_index(b)]

    def conjugate(self, s: Subgroup, x: int) -> Subgroup:
        """``s^x = x^-1 s x``."""
        key = (s.index, x)
        hit = self._conj_cache.get(key)
        if hit is None:
            g = self.group
            hit = self._by_elements[tuple(sorted(g.conj(a, x) for a in s.elements))]
            self._conj_cache[key] = hit
        return hit

    def subgroups_of(self, u: Subgroup) -> list[Subgroup]:
        return self._subs_of(u.index)

    def _subs_of(self, idx: int) -> list[Subgroup]:
        cache = self.__dict__.setdefault("_subs_cache", {})
        if idx not in cache:
            u = self.subgroups[idx]
            cache[idx] = [s for s in self.subgroups if s <= u]
        return cache[idx]

    def generators(self, s: Subgroup) -> tuple[int, ...]:
        """A small generating set (greedy, by element index)."""
        cache = self.__dict__.setdefault("_gen_cache", {})
        if s.index not in cache:
            gens: list[int] = []
            cur = (0,)
            for a in s.elements:
                if a not in cur:
                    gens.append(a)
                    cur = _closure(self.group, gens)
                if len(cur) == len(s):
                    break
            cache[s.index] = tuple(gens)
        return cache[s.index]

    def normalizer(self, h: Subgroup, within: Subgroup | None = None) -> Subgroup:
        within = within or self.whole
        return self.subgroup(x for x in within.elements if self.conjugate(h, x) == h)

    # -- cosets -------------------------------------------------------------
    def coset_rep(self, a: int, h: Subgroup) -> int:
        """Least element of the left coset ``a h``."""
        m = self.group.mult[a]
        return min(m[x] for x in h.elements)

    def left_cosets(self, k: Subgroup, h: Subgroup) -> list[int]:
        """Representatives (least elements) of ``k/h``, in increasing order."""
        cache = self.__dict__.setdefault("_coset_cache", {})
        key = (k.index, h.index)
        if key not in cache:
            if not h <= k:
                raise GroupError("coset space needs h <= k")
            cache[key] = sorted({self.coset_rep(a, h) for a in k.elements})
        return cache[key]

    def double_cosets(self, k: Subgroup, j: Subgroup, h: Subgroup) -> DoubleCosetData:
        if not (j <= k and h <= k):
            raise GroupError("double cosets need j, h <= k")
        g = self.group
        remaining = set(k.elements)
        reps, inters, cosets = [], [], []
        for a in k.elements:
            if a not in remaining:
                continue
            dc = frozenset(g.prod(x, a, y) for x in j.elements for y in h.elements)
            remaining -= dc
            reps.append(min(dc))
            cosets.append(dc)
        order = sorted(range(len(reps)), key=lambda i: reps[i])
        reps = [reps[i] for i in order]
        cosets = [cosets[i] for i in order]
        for gamma in reps:
            jg = self.conjugate(j, gamma)
            inters.append(self.subgroup(h.elementset & jg.elementset))
        return DoubleCosetData(k, j, h, tuple(reps), tuple(inters), tuple(cosets))

    def weyl(self, h: Subgroup, within: Subgroup | None = None) -> WeylData:
        within = within or self.whole
        cache = self.__dict__.setdefault("_weyl_cache", {})
        key = (h.index, within.index)
        if key in cache:
            return cache[key]
        n = self.normalizer(h, within)
        labels = tuple(sorted({self.coset_rep(a, h) for a in n.elements}))
        pos = {x: i for i, x in enumerate(labels)}
        g = self.group
        project = {a: pos[self.coset_rep(a, h)] for a in n.elements}
        mult = tuple(tuple(project[g.mul(a, b)] for b in labels) for a in labels)
        w = FiniteGroup(mult, label=f"W({list(h.elements)})")
        data = WeylData(h, n, w, labels, project)
        cache[key] = data
        return data


class RelativeClasses:
    """Subgroups of ``u`` up to ``u``-conjugacy, ordered like the lattice classes."""

    def __init__(self, lat: SubgroupLattice, u: Subgroup):
        self.lattice = lat
        self.universe = u
        subs = lat.subgroups_of(u)
        seen: set[Subgroup] = set()
        classes = []
        for s in subs:
            if s in seen:
                continue
            members = sorted({lat.conjugate(s, x) for x in u.elements}, key=lambda t: t.elements)
            seen.update(members)
            classes.append(tuple(members))
        classes.sort(key=lambda c: (len(c[0]), c[0].elements))
        self.classes: list[tuple[Subgroup, ...]] = classes
        self.reps: list[Subgroup] = [c[0] for c in classes]
        self._class_of = {m: i for i, c in enumerate(classes) for m in c}

    def __len__(self):
        return len(self.reps)

    def class_index(self, s: Subgroup) -> int:
        return self._class_of[s]

    def conjugator(self, s: Subgroup) -> int:
        """Least ``x`` in the universe with ``rep^x == s``."""
        rep = self.reps[self.class_index(s)]
        return min(x for x in self.universe.elements if self.lattice.conjugate(rep, x) == s)


# -- construction -----------------------------------------------------------

def _compose(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    return tuple(p[q[i]] for i in range(len(q)))


def group_from_permutations(gens: Sequence[Sequence[int]], label: str = "") -> FiniteGroup:
    """Closure of permutation generators with shortlex element ordering."""
    gens = [tuple(int(x) for x in p) for p in gens]
    npts = max((len(p) for p in gens), default=1)
    if npts > MAX_POINTS:
        raise GroupError(f"permutations on more than {MAX_POINTS} points are not supported")
    for p in gens:
        if sorted(p) != list(range(len(p))):
            raise GroupError(f"{list(p)} is not a permutation")
    gens = [p + tuple(range(len(p), npts)) for p in gens]
    ident = tuple(range(npts))
    elts = [ident]
    index = {ident: 0}
    queue = deque([ident])
    while queue:
        cur = queue.popleft()
        for s in gens:
            nxt = _compose(cur, s)
            if nxt not in index:
                if len(elts) >= MAX_ORDER:
                    raise GroupError(f"generated group exceeds order {MAX_ORDER}")
                index[nxt] = len(elts)
                elts.append(nxt)
                queue.append(nxt)
    mult = tuple(tuple(index[_compose(a, b)] for b in elts) for a in elts)
    return FiniteGroup(mult, label=label, perms=tuple(elts))


def _cycle(n: int) -> list[int]:
    return [(i + 1) % n for i in range(n)]


def _quaternion_generators() -> list[list[int]]:
    # elements 1,i,j,k,-1,-i,-j,-k as (sign, unit) ; left multiplication by i and j
    units = {"1": {"1": (1, "1"), "i": (1, "i"), "j": (1, "j"), "k": (1, "k")},
             "i": {"1": (1, "i"), "i": (-1, "1"), "j": (1, "k"), "k": (-1, "j")},
             "j": {"1": (1, "j"), "i": (-1, "k"), "j": (-1, "1"), "k": (1, "i")}}
    names = [(1, "1"), (1, "i"), (1, "j"), (1, "k"), (-1, "1"), (-1, "i"), (-1, "j"), (-1, "k")]
    pos = {x: i for i, x in enumerate(names)}
    gens = []
    for u in ("i", "j"):
        perm = []
        for sign, b in names:
            s2, c = units[u][b]
            perm.append(pos[(sign * s2, c)])
        gens.append(perm)
    return gens


CATALOG = ("trivial", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11", "C12",
           "C2xC2", "S3", "D4", "Q8", "D6", "A4")


def catalog_generators(name: str) -> list[list[int]]:
    key = name.replace("×", "x").replace(" ", "")
    if key in ("trivial", "e", "C1"):
        return []
    if key.startswith("C") and key[1:].isdigit():
        n = int(key[1:])
        if not 1 <= n <= 12:
            raise GroupError(f"cyclic catalog groups go up to C12, not {name}")
        return [_cycle(n)] if n > 1 else []
    table = {
        "C2xC2": [[1, 0, 3, 2], [2, 3, 0, 1]],
        "S3": [[1, 0, 2], [1, 2, 0]],
        "D4": [_cycle(4), [0, 3, 2, 1]],
        "Q8": _quaternion_generators(),
        "D6": [_cycle(6), [0, 5, 4, 3, 2, 1]],
        "A4": [[1, 2, 0, 3], [1, 0, 3, 2]],
    }
    if key not in table:
        raise GroupError(f"unknown catalog group {name!r}")
    return table[key]


def _cyclic_order(name: str) -> int | None:
    key = name.strip()
    if key in ("trivial", "e", "C1"):
        return 1
    if key.startswith("C") and key[1:].isdigit():
        n = int(key[1:])
        if not 1 <= n <= 12:
            raise GroupError(f"cyclic catalog groups go up to C12, not {name}")
        return n
    return None


def cyclic_group(n: int) -> FiniteGroup:
    """``Z/n`` with element ``k`` standing for the k-th power of the generator."""
    label = "trivial" if n == 1 else f"C{n}"
    return FiniteGroup(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)), label=label)


def build_group(spec) -> FiniteGroup:
    """Build a group from a catalog name, a JSON-style dict, or generators."""
    if isinstance(spec, FiniteGroup):
        return spec
    if isinstance(spec, str):
        n = _cyclic_order(spec)
        if n is not None:
            return cyclic_group(n)
        return group_from_permutations(catalog_generators(spec), label=spec)
    if isinstance(spec, dict):
        if "catalog" in spec:
            return build_group(str(spec["catalog"]))
        if "perm_generators" in spec:
            return group_from_permutations(spec["perm_generators"], label=spec.get("label", ""))
        raise GroupError("group spec needs 'catalog' or 'perm_generators'")
    return group_from_permutations(spec)


def subgroup_lattice(g: FiniteGroup) -> SubgroupLattice:
    return g.lattice


def weyl_group(lat: SubgroupLattice, h: Subgroup) -> WeylData:
    return lat.weyl(h)


def double_cosets(k: Subgroup, j: Subgroup, h: Subgroup) -> DoubleCosetData:
    return k.group.lattice.double_cosets(k, j, h)


def find_isomorphism(a: FiniteGroup, b: FiniteGroup) -> list[int] | None:
    """Brute-force isomorphism search between two small groups (backtracking)."""
    if a.order != b.order:
        return None
    la = a.lattice
    gens = list(la.generators(la.whole))
    ord_b = [b.element_order(x) for x in range(b.order)]
    cands = [[y for y in range(b.order) if ord_b[y] == a.element_order(s)] for s in gens]

    def extend(images):
        if len(images) == len(gens):
            phi = {0: 0}
            frontier = [0]
            while frontier:
                nxt = []
                for x in frontier:
                    for s, t in zip(gens, images):
                        xs = a.mul(x, s)
                        v = b.mul(phi[x], t)
                        if xs in phi:
                            if phi[xs] != v:
                                return None
                        else:
                            phi[xs] = v
                            nxt.append(xs)
                frontier = nxt
            if len(set(phi.values())) != a.order:
                return None
            m = [phi[x] for x in range(a.order)]
            ok = all(m[a.mul(x, y)] == b.mul(m[x], m[y]) for x in range(a.order) for y in range(a.order))
            return m if ok else None
        for y in cands[len(images)]:
            r = extend(images + [y])
            if r is not None:
                return r
        return None

    return extend([])


def subgroup_as_group(lat: SubgroupLattice, h: Subgroup) -> FiniteGroup:
    """``h`` as a group in its own right (element ``i`` = ``h.elements[i]``)."""
    pos = {a: i for i, a in enumerate(h.elements)}
    g = lat.group
    return FiniteGroup(tuple(tuple(pos[g.mul(a, b)] for b in h.elements) for a in h.elements))


def isomorphism_type(g: FiniteGroup) -> str:
    """Catalog name of ``g`` (``e`` for the trivial group), or ``order-n`` if absent."""
    if g.order == 1:
        return "e"
    for name in CATALOG[1:]:
        if build_group(name).order == g.order and find_isomorphism(g, build_group(name)) is not None:
            return name
    return f"order-{g.order}"


def class_names(lat: SubgroupLattice) -> list[str]:
    """Short names for the conjugacy classes: isomorphism type, primed when repeated."""
    cache = lat.__dict__.get("_class_names")
    if cache is None:
        seen: dict[str, int] = {}
        cache = []
        for h in lat.reps:
            base = isomorphism_type(subgroup_as_group(lat, h))
            cache.append(base + "'" * seen.get(base, 0))
            seen[base] = seen.get(base, 0) + 1
        lat.__dict__["_class_names"] = cache
    return cache


def group_name(g: FiniteGroup) -> str:
    return g.label if g.label and not g.label.startswith("W(") else isomorphism_type(g)


def small_catalog(max_order: int = 24) -> list[str]:
    return [n for n in ("C2", "C3", "C4", "C2xC2", "C6", "S3", "D4", "Q8", "D6", "A4")
            if build_group(n).order <= max_order]

