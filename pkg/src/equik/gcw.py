"""Admissible G-simplicial complexes and their equivariant chains.

Simplices are sorted tuples of vertex ids.  The chain module in degree ``n``
is the free module ``Z̄_{X_n}`` on the G-set ``X_n`` of ``n``-simplices.  Basis
simplices carry the orientation transported from their orbit basepoint
(``g·s_o`` is oriented by ``(g v_0, ..., g v_n)`` where ``s_o = (v_0 < ... < v_n)``),
so G permutes oriented basis simplices without signs; admissibility makes
this well defined.  Against the sorted-vertex orientation the two bases
differ by the sign ``ε(s)`` of that reordering.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import lattice as zl
from .coeff import CoeffMorphism, CoefficientRing, constant_ring
from .functors import induce_morphism, induce_system
from .groups import Subgroup, SubgroupLattice
from .gsets import BurnsideElement, GSet, burnside_class, gset_from_generators, table_of_marks
from .modules import PerfectComplex, free_projective, hom_space, k0_class_vector, zero_class_vector


class ComplexError(ValueError):
    pass


def _perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` (distinct entries)."""
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


@dataclass(frozen=True, eq=False)
class GSimplicialComplex:
    vertices: GSet
    simplices: tuple[tuple[int, ...], ...]

    @property
    def lattice(self) -> SubgroupLattice:
        return self.vertices.lattice

    @property
    def universe(self) -> Subgroup:
        return self.vertices.universe

    @cached_property
    def by_dim(self) -> tuple[tuple[tuple[int, ...], ...], ...]:
        if not self.simplices:
            return ()
        top = max(len(s) for s in self.simplices) - 1
        return tuple(tuple(sorted(s for s in self.simplices if len(s) == n + 1)) for n in range(top + 1))

    @property
    def dim(self) -> int:
        return len(self.by_dim) - 1

    def act(self, g: int, s: Sequence[int]) -> tuple[int, ...]:
        row = self.vertices.action[g]
        return tuple(sorted(row[v] for v in s))

    def violations(self) -> list[str]:
        out = []
        present = set(self.simplices)
        nv = self.vertices.size
        for s in self.simplices:
            if list(s) != sorted(set(s)) or any(v < 0 or v >= nv for v in s):
                out.append(f"simplex {list(s)} is not a sorted list of distinct vertices")
                continue
            for k in range(1, len(s)):
                for f in itertools.combinations(s, k):
                    if f not in present:
                        out.append(f"face {list(f)} of {list(s)} is missing")
                        break
            for g in self.universe.elements:
                if self.act(g, s) not in present:
                    out.append(f"element {g} moves {list(s)} outside the complex")
                    break
        for v in range(nv):
            if (v,) not in present:
                out.append(f"vertex {v} is not a 0-simplex")
        return out

    def admissibility_violations(self) -> list[tuple[tuple[int, ...], int]]:
        """``(simplex, g)`` with ``g`` stabilizing but not fixing the simplex vertexwise."""
        bad = []
        row = self.vertices.action
        for s in self.simplices:
            for g in self.universe.elements:
                if self.act(g, s) == s and any(row[g][v] != v for v in s):
                    bad.append((s, g))
                    break
        return bad

    def is_admissible(self) -> bool:
        return not self.admissibility_violations()

    def simplex_gset(self, n: int) -> GSet:
        cache = self.__dict__.setdefault("_sgset", {})
        if n not in cache:
            sims = self.by_dim[n] if 0 <= n <= self.dim else ()
            pos = {s: i for i, s in enumerate(sims)}
            g = self.lattice.group
            action = tuple(tuple(pos[self.act(a, s)] for s in sims) if a in self.universe else None
                           for a in range(g.order))
            cache[n] = GSet(self.lattice, self.universe, action, tuple((("simplex",) + s,) for s in sims))
        return cache[n]

    def simplex_counts(self, h: Subgroup | None = None) -> tuple[int, ...]:
        if h is None:
            return tuple(len(d) for d in self.by_dim)
        return tuple(len(self.simplex_gset(n).fixed_points(h)) for n in range(self.dim + 1))


def make_complex(vertices: GSet, simplices: Iterable[Sequence[int]], close: bool = False,
                 check: bool = True) -> GSimplicialComplex:
    sims = {tuple(sorted(int(v) for v in s)) for s in simplices}
    if close:
        for s in list(sims):
            for k in range(1, len(s)):
                sims.update(itertools.combinations(s, k))
        sims.update((v,) for v in range(vertices.size))
    x = GSimplicialComplex(vertices, tuple(sorted(sims, key=lambda s: (len(s), s))))
    if check:
        errs = x.violations()
        if errs:
            raise ComplexError("; ".join(errs[:5]))
    return x


def load_complex(vertices: GSet, simplices: Iterable[Sequence[int]], close: bool = True) -> GSimplicialComplex:
    """Validated admissible complex; raises :class:`ComplexError` naming an
    offending simplex when the action is not admissible."""
    x = make_complex(vertices, simplices, close=close)
    bad = x.admissibility_violations()
    if bad:
        s, g = bad[0]
        raise ComplexError(f"not admissible: element {g} stabilizes {list(s)} without fixing it vertexwise "
                           f"(barycentric subdivision repairs this)")
    return x


def barycentric_subdivide(x: GSimplicialComplex) -> GSimplicialComplex:
    """Vertices are the simplices of ``x``; simplices are chains under inclusion."""
    old = list(x.simplices)
    pos = {s: i for i, s in enumerate(old)}
    g = x.lattice.group
    action = tuple(tuple(pos[x.act(a, s)] for s in old) if a in x.universe else None for a in range(g.order))
    verts = GSet(x.lattice, x.universe, action, tuple((("bary",) + s,) for s in old))
    chains = []

    def extend(chain):
        chains.append(tuple(sorted(chain)))
        top = old[chain[-1]]
        for s in old:
            if len(s) > len(top) and set(top) <= set(s):
                extend(chain + [pos[s]])

    for i in range(len(old)):
        extend([i])
    return make_complex(verts, chains)


@dataclass(frozen=True)
class FixedSubcomplex:
    simplices: tuple[tuple[int, ...], ...]
    counts: tuple[int, ...]
    euler: int


def fixed_subcomplex(x: GSimplicialComplex, h: Subgroup) -> FixedSubcomplex:
    row = x.vertices.action
    fixed = tuple(s for s in x.simplices if all(row[g][v] == v for g in h.elements for v in s))
    top = max((len(s) for s in fixed), default=0)
    counts = tuple(sum(1 for s in fixed if len(s) == n + 1) for n in range(top))
    return FixedSubcomplex(fixed, counts, sum((-1) ** n * c for n, c in enumerate(counts)))


def simplicial_homology(simplices: Iterable[Sequence[int]]) -> list[tuple[int, tuple[int, ...]]]:
    """(Betti number, torsion) per degree from the sorted-orientation boundary."""
    by = {}
    for s in simplices:
        by.setdefault(len(s) - 1, []).append(tuple(s))
    if not by:
        return []
    top = max(by)
    idx = {n: {s: i for i, s in enumerate(sorted(by.get(n, [])))} for n in range(top + 1)}
    mats = {}
    for n in range(1, top + 1):
        m = np.zeros((len(idx[n - 1]), len(idx[n])), dtype=np.int64)
        for s, j in idx[n].items():
            for i in range(len(s)):
                m[idx[n - 1][s[:i] + s[i + 1:]], j] += (-1) ** i
        mats[n] = m
    out = []
    for n in range(top + 1):
        k = len(idx[n])
        z = k - (zl.rank(mats[n]) if n in mats and mats[n].size else 0)
        inv = zl.smith_invariants(mats[n + 1]) if n + 1 in mats and mats[n + 1].size else []
        out.append((z - len(inv), tuple(d for d in inv if d > 1)))
    return out


# -- equivariant chains -----------------------------------------------------------

@dataclass
class EquivariantChainComplex:
    complex: GSimplicialComplex
    ring: CoefficientRing
    gsets: list[GSet]
    perfect: PerfectComplex
    signs: list[dict[int, int]]       # ε per simplex index: transported vs sorted orientation

    @property
    def boundaries(self) -> list[CoeffMorphism]:
        return self.perfect.diffs

    def level_ranks(self, h: Subgroup) -> tuple[int, ...]:
        return tuple(p.rank(h) for p in self.perfect.modules)

    def homology(self, h: Subgroup):
        return self.perfect.homology(h)


def _transport_signs(x: GSimplicialComplex, n: int) -> dict[int, int]:
    xs = x.simplex_gset(n)
    sims = x.by_dim[n]
    row = x.vertices.action
    out = {}
    for m in xs.orbit_minima:
        base = sims[m]
        for g in x.universe.elements:
            j = xs.action[g][m]
            if j not in out:
                out[j] = _perm_sign([row[g][v] for v in base])
    return out


def equivariant_chain_complex(x: GSimplicialComplex, exclude: Sequence[tuple[int, ...]] = ()) -> EquivariantChainComplex:
    """Chains of ``x`` (relative to the invariant subcomplex ``exclude`` when given)."""
    bad = x.admissibility_violations()
    if bad:
        raise ComplexError(f"not admissible at simplex {list(bad[0][0])}")
    lat = x.lattice
    ring = constant_ring(lat, x.universe)
    drop = set(exclude)
    gsets, keep = [], []
    for n in range(x.dim + 1):
        full = x.simplex_gset(n)
        idx = [i for i, s in enumerate(x.by_dim[n]) if s not in drop]
        if len(idx) == full.size:
            gsets.append(full)
        else:
            pos = {i: k for k, i in enumerate(idx)}
            action = tuple(tuple(pos[row[i]] for i in idx) if row is not None else None for row in full.action)
            gsets.append(GSet(lat, x.universe, action, tuple(full.payload[i] for i in idx)))
        keep.append(idx)
    mods = [free_projective(ring, xs) for xs in gsets]
    signs = []
    for n in range(len(gsets)):
        full = _transport_signs(x, n)
        signs.append({k: full[i] for k, i in enumerate(keep[n])})
    diffs = []
    for n in range(1, len(gsets)):
        space = hom_space(mods[n].free, mods[n - 1].free)
        prev = {x.by_dim[n - 1][i]: k for k, i in enumerate(keep[n - 1])}
        c = np.zeros(space.dim, dtype=np.int64)
        for o, (m, h) in enumerate(space.orbits):
            s = x.by_dim[n][keep[n][m]]
            v = np.zeros(space.target.rank(h), dtype=np.int64)
            fixed = mods[n - 1].free.fixed(h)
            for i in range(len(s)):
                f = s[:i] + s[i + 1:]
                if f in prev:
                    k = prev[f]
                    v[fixed.index(k)] += (-1) ** i * signs[n - 1][k]
            c[space.offsets[o]:space.offsets[o + 1]] = v
        diffs.append(space.morphism(c))
    return EquivariantChainComplex(x, ring, gsets, PerfectComplex(mods, diffs), signs)


def equivariant_euler_class(x: GSimplicialComplex) -> BurnsideElement:
    if not x.is_admissible():
        raise ComplexError("equivariant Euler class needs an admissible complex")
    t = table_of_marks(x.lattice, x.universe)
    out = BurnsideElement(t, (0,) * t.size)
    for n in range(x.dim + 1):
        c = burnside_class(x.simplex_gset(n))
        out = out + c if n % 2 == 0 else out - c
    return out


def euler_marks(x: GSimplicialComplex) -> tuple[int, ...]:
    """``(χ(X^{H_j}))_j`` over the class representatives."""
    return tuple(fixed_subcomplex(x, h).euler for h in x.lattice.relative(x.universe).reps)


def component_rank_vector(x: GSimplicialComplex) -> tuple[int, ...]:
    """Per class ``(H)``: ``Σ_n (-1)^n #(n-simplex orbits with isotropy in (H))``."""
    rel = x.lattice.relative(x.universe)
    out = [0] * len(rel)
    for n in range(x.dim + 1):
        xs = x.simplex_gset(n)
        for m in xs.orbit_minima:
            out[rel.class_index(xs.stabilizer(m))] += (-1) ** n
    return tuple(out)


def linearization_components(x: GSimplicialComplex) -> tuple[int, ...]:
    """The same vector read off the K_0 splitting of the chain modules (augmented ranks)."""
    c = equivariant_chain_complex(x)
    total = zero_class_vector(c.ring)
    for n, p in enumerate(c.perfect.modules):
        v = k0_class_vector(p)
        total = total + v if n % 2 == 0 else total - v
    return tuple(total.augranks())


# -- transfer along H <= K ---------------------------------------------------------

def based(y: GSimplicialComplex) -> tuple[GSimplicialComplex, int]:
    """``Y_+``: ``y`` with a disjoint fixed basepoint appended as the last vertex."""
    v = y.vertices
    n = v.size
    action = tuple(row + (n,) if row is not None else None for row in v.action)
    verts = GSet(v.lattice, v.universe, action, v.payload + (("base",),))
    return make_complex(verts, list(y.simplices) + [(n,)]), n


def pushout_transfer(y: GSimplicialComplex, basepoint: int, k: Subgroup) -> tuple[GSimplicialComplex, int, dict]:
    """``K ×_H Y`` with the ``|K/H|`` copies of the basepoint identified.

    Vertex order: the basepoint first, then ``(coset, y)`` pairs in
    lexicographic order (cosets by least element).  Returns the complex, its
    basepoint and ``where[(x, s)]`` = the simplex ``[x, s]``.
    """
    lat = y.lattice
    h = y.universe
    g = lat.group
    if not h <= k:
        raise ComplexError("transfer needs H <= K")
    reps = lat.left_cosets(k, h)
    others = [v for v in range(y.vertices.size) if v != basepoint]
    vid = {}
    for xi, xr in enumerate(reps):
        for v in others:
            vid[(xr, v)] = 1 + len(vid)
    nv = 1 + len(vid)
    action = []
    for a in range(g.order):
        if a not in k:
            action.append(None)
            continue
        row = [0] * nv
        for (xr, v), i in vid.items():
            ax = g.mul(a, xr)
            xr2 = lat.coset_rep(ax, h)
            hh = g.mul(g.inv(xr2), ax)
            row[i] = vid[(xr2, y.vertices.action[hh][v])]
        action.append(tuple(row))
    payload = (("base",),) + tuple((("tr", xr, v),) for (xr, v) in vid)
    verts = GSet(lat, k, tuple(action), payload)

    def lift(xr, s):
        return tuple(sorted(0 if v == basepoint else vid[(xr, v)] for v in s))

    sims = {lift(xr, s) for xr in reps for s in y.simplices}
    where = {(xr, s): lift(xr, s) for xr in reps for s in y.simplices}
    return make_complex(verts, sims), 0, where


@dataclass
class TransferCheck:
    degrees_ok: list[bool]
    isos_ok: list[bool]

    @property
    def ok(self) -> bool:
        return all(self.degrees_ok) and all(self.isos_ok)


def transfer_identity(y: GSimplicialComplex, k: Subgroup) -> TransferCheck:
    """``C(tr^K_H Y_+, *) = I^K_H C(Y_+, *)`` after the canonical identification
    ``I^K_H(A_{Y_n}) -> A_{(K ×_H Y)_n}``, summand ``x``, ``s -> [x, s]``."""
    yb, bp = based(y)
    cy = equivariant_chain_complex(yb, exclude=[(bp,)])
    tr, tbp, where = pushout_transfer(yb, bp, k)
    ct = equivariant_chain_complex(tr, exclude=[(tbp,)])
    isos = []
    for n, (py, pt) in enumerate(zip(cy.perfect.modules, ct.perfect.modules)):
        ind = induce_system(py.free.system, k)
        ysims = [s for s in yb.by_dim[n] if s != (bp,)] if n <= yb.dim else []
        tsims = [s for s in tr.by_dim[n] if s != (tbp,)] if n <= tr.dim else []
        tpos = {s: i for i, s in enumerate(tsims)}
        maps = {}
        for j in ind.levels():
            m = np.zeros((pt.free.rank(j), ind.rank(j)), dtype=np.int64)
            fixed_t = pt.free.fixed(j)
            for p, off, nn, jx in ind.summands(j):
                xr = ind.coords[p]
                fixed_y = py.free.fixed(jx)
                for col, yi in enumerate(fixed_y):
                    ti = tpos[where[(xr, ysims[yi])]]
                    # transported orientations of [x, s] and s agree up to these signs
                    m[fixed_t.index(ti), off + col] = cy.signs[n][yi] * ct.signs[n][ti]
            maps[j.index] = m
        isos.append(CoeffMorphism(ind, pt.free.system, maps))
    isos_ok = [f.is_iso() and f.is_natural() for f in isos]
    deg_ok = []
    for n in range(1, len(isos)):
        d_ind = induce_morphism(cy.boundaries[n - 1], k)
        lhs = isos[n - 1].compose(d_ind)
        rhs = ct.boundaries[n - 1].compose(isos[n])
        deg_ok.append(lhs.equals(rhs))
    if len(cy.perfect.modules) != len(ct.perfect.modules):
        deg_ok.append(False)
    return TransferCheck(deg_ok, isos_ok)


# -- catalog complexes ------------------------------------------------------------------

def point_complex(lat: SubgroupLattice, universe: Subgroup | None = None) -> GSimplicialComplex:
    u = universe or lat.whole
    v = GSet(lat, u, tuple((0,) if a in u else None for a in range(lat.group.order)), (("pt", 0),))
    return make_complex(v, [(0,)])


def _vertex_gset(lat: SubgroupLattice, images: Mapping[int, Sequence[int]], n: int,
                 universe: Subgroup | None = None) -> GSet:
    return gset_from_generators(lat, images, n, universe, tag="v")


def _c2_generator(lat: SubgroupLattice) -> int:
    return next(a for a in range(1, lat.group.order) if lat.group.element_order(a) == 2)


def octahedron_c2(lat: SubgroupLattice) -> GSimplicialComplex:
    """Boundary of the octahedron (vertices ±e1, ±e2, ±e3) with the reflection
    ``z -> -z``; the fixed set is the equatorial 4-gon."""
    s = _c2_generator(lat)
    verts = _vertex_gset(lat, {s: [0, 1, 2, 3, 5, 4]}, 6, lat.subgroup([0, s]))
    faces = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]
    return load_complex(verts, faces)


def antipodal_square(lat: SubgroupLattice) -> GSimplicialComplex:
    """The 4-cycle with the free rotation by two steps."""
    s = _c2_generator(lat)
    verts = _vertex_gset(lat, {s: [2, 3, 0, 1]}, 4, lat.subgroup([0, s]))
    return load_complex(verts, [(0, 1), (1, 2), (2, 3), (0, 3)])


def swap_edge(lat: SubgroupLattice) -> GSimplicialComplex:
    """An edge whose endpoints are swapped (not admissible)."""
    s = _c2_generator(lat)
    verts = _vertex_gset(lat, {s: [1, 0]}, 2, lat.subgroup([0, s]))
    return make_complex(verts, [(0, 1)], close=True)


def orbit_complex(lat: SubgroupLattice, subgroups: Sequence[Subgroup], universe: Subgroup | None = None
                  ) -> GSimplicialComplex:
    """Discrete complex on the G-set ``⊔ U/H``."""
    from .gsets import orbit_gset
    v = orbit_gset(lat, subgroups, universe)
    return make_complex(v, [(i,) for i in range(v.size)])


def random_invariant_subcomplex(x: GSimplicialComplex, rng: random.Random, keep: float = 0.6
                                ) -> GSimplicialComplex:
    """Union of the closures of random simplex orbits (an invariant subcomplex on all vertices)."""
    chosen = set()
    for s in x.simplices:
        if rng.random() < keep:
            for g in x.universe.elements:
                t = x.act(g, s)
                for k in range(1, len(t) + 1):
                    chosen.update(itertools.combinations(t, k))
    chosen.update((v,) for v in range(x.vertices.size))
    return make_complex(x.vertices, chosen)


def restrict_complex(x: GSimplicialComplex, h: Subgroup) -> GSimplicialComplex:
    return make_complex(x.vertices.restrict(h), x.simplices)


def random_complex(lat: SubgroupLattice, rng: random.Random, universe: Subgroup | None = None,
                   max_vertices: int = 8, max_simplices: int = 4) -> GSimplicialComplex:
    """Orbits of random simplices on a random vertex G-set, made admissible by subdivision if needed."""
    from .modules import random_gset
    u = universe or lat.whole
    v = random_gset(lat, rng, 3, universe=u, max_size=max_vertices)
    if v.size == 0:
        return point_complex(lat, u)
    sims = []
    for _ in range(rng.randint(0, max_simplices) if v.size > 1 else 0):
        k = rng.randint(2, min(3, v.size))
        s = tuple(sorted(rng.sample(range(v.size), k)))
        sims.extend(tuple(sorted(v.action[g][i] for i in s)) for g in u.elements)
    x = make_complex(v, sims + [(i,) for i in range(v.size)], close=True)
    return x if x.is_admissible() else barycentric_subdivide(x)


__all__ = [
    "ComplexError", "GSimplicialComplex", "FixedSubcomplex", "EquivariantChainComplex", "TransferCheck",
    "make_complex", "load_complex", "barycentric_subdivide", "fixed_subcomplex", "simplicial_homology",
    "equivariant_chain_complex", "equivariant_euler_class", "euler_marks", "component_rank_vector",
    "linearization_components", "based", "pushout_transfer", "transfer_identity", "point_complex",
    "octahedron_c2", "antipodal_square", "swap_edge", "orbit_complex", "random_invariant_subcomplex",
    "restrict_complex", "random_complex",
]
