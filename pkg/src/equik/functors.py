"""Induction, restriction and conjugation of coefficient systems, and the
realisation of spans and 2-cells as functors and natural transformations.

Everything here is an instance of one shape, :class:`BisetSystem`.  Given a
system ``M`` over ``H`` and a ``K``-set ``Y`` whose points carry group
elements ``b_p`` with ``b_{k·p}^-1 k b_p in H``, level ``J <= K`` is

    ⊕_{p in Y^J} M^{J^{b_p}}

and the morphism ``(J, J', a)`` sends summand ``p'`` to summand ``a·p'`` by
the block ``M.mat(J^{b_p}, J'^{b_p'}, b_p^-1 a b_p')``.

* induction ``I^K_H``: ``Y = K/H``, ``b`` = least coset element;
* conjugation ``c_g``: one point, ``b = g^-1``;
* a span ``G/H <- A -> G/K``: ``Y = t^-1(eK)``, ``b`` from ``r``.

Isomorphisms between such systems are assembled from matchings of summands
with blocks ``M.mat(J^{b_to}, J^{b_from}, b_to^-1 b_from)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .coeff import (BoxProduct, CoeffMorphism, CoefficientError, CoefficientSystem, DirectSum,
                    RestrictedSystem, _eye, _zeros, block_diag, identity_morphism)
from .groups import Subgroup, SubgroupLattice
from .gsets import GSet, canonical_orbit, coset_of
from .spans import Span, Span2Cell, SpanNormalForm, compose_spans, span_normal_form


class BisetSystem(CoefficientSystem):
    def __init__(self, base: CoefficientSystem, points: GSet, coords: Sequence[int], labels=None):
        super().__init__(base.lattice, points.universe)
        self.base = base
        self.points = points
        self.coords = tuple(coords)
        self.labels = tuple(labels) if labels is not None else None
        self._summands: dict[int, list[tuple[int, int, int, Subgroup]]] = {}

    def summands(self, j: Subgroup) -> list[tuple[int, int, int, Subgroup]]:
        """``(point, offset, rank, J^{b_p})`` for the summands of level ``J``."""
        s = self._summands.get(j.index)
        if s is None:
            lat = self.lattice
            s, off = [], 0
            for p in self.points.fixed_points(j):
                jb = lat.conjugate(j, self.coords[p])
                n = self.base.rank(jb)
                s.append((p, off, n, jb))
                off += n
            self._summands[j.index] = s
        return s

    def _rank(self, j):
        return sum(n for _, _, n, _ in self.summands(j))

    def _mat(self, j, j2, a):
        g = self.group
        rows = {p: (off, n, jb) for p, off, n, jb in self.summands(j)}
        out = _zeros(self.rank(j), self.rank(j2))
        act = self.points.action[a]
        for p2, off2, n2, jb2 in self.summands(j2):
            p = act[p2]
            off, n, jb = rows[p]
            if n and n2:
                elt = g.prod(g.inv(self.coords[p]), a, self.coords[p2])
                out[off:off + n, off2:off2 + n2] = self.base.mat(jb, jb2, elt)
        return out


def conj_block(m: CoefficientSystem, j: Subgroup, b_to: int, b_from: int) -> np.ndarray:
    """The canonical identification ``M^{J^{b_from}} -> M^{J^{b_to}}``."""
    lat = m.lattice
    g = lat.group
    return m.mat(lat.conjugate(j, b_to), lat.conjugate(j, b_from), g.mul(g.inv(b_to), b_from))


# -- the three basic functors --------------------------------------------------

def restrict_system(m: CoefficientSystem, h: Subgroup) -> CoefficientSystem:
    if h == m.universe:
        return m
    return RestrictedSystem(m, h)


class InducedSystem(BisetSystem):
    def __init__(self, m: CoefficientSystem, k: Subgroup):
        lat = m.lattice
        if not m.universe <= k:
            raise CoefficientError("induction needs H <= K")
        y = canonical_orbit(lat, m.universe, k)
        super().__init__(m, y, [coset_of(y, i) for i in range(y.size)])


def induce_system(m: CoefficientSystem, k: Subgroup) -> CoefficientSystem:
    return InducedSystem(m, k)


class ConjugateSystem(BisetSystem):
    """``c_g M`` over ``H^g``: level ``L`` is ``M^{g L g^-1}``."""

    def __init__(self, m: CoefficientSystem, g: int):
        lat = m.lattice
        hg = lat.conjugate(m.universe, g)
        action = tuple((0,) if a in hg else None for a in range(lat.group.order))
        pt = GSet(lat, hg, action, (("pt",),))
        super().__init__(m, pt, [lat.group.inv(g)])
        self.element = g


def conjugate_system(m: CoefficientSystem, g: int) -> CoefficientSystem:
    return ConjugateSystem(m, g)


# -- flattening to base summands ----------------------------------------------

@dataclass(frozen=True)
class Flat:
    base: CoefficientSystem
    b: int
    offset: int
    rank: int
    path: tuple
    points: tuple


def flatten(m: CoefficientSystem, j: Subgroup, stop: CoefficientSystem | None = None) -> list[Flat]:
    """Summands of level ``J`` expressed as ``base^{J^b}``, with the path of
    summand choices and the span points met.  The base is ``stop`` when
    given, the innermost system otherwise."""
    lat = m.lattice
    g = lat.group
    if m is stop:
        return [Flat(m, 0, 0, m.rank(j), (), ())]
    if isinstance(m, RestrictedSystem):
        return flatten(m.base, j, stop)
    if isinstance(m, NormalFormRealization):
        out = []
        offs = m.offsets(j)
        for i, (part, tr) in enumerate(zip(m.parts, m.form.triples)):
            for f in flatten(part, j, stop):
                # f.path = (conjugation point, coset index, ...) and the first two
                # layers contribute y^-1 x
                conj_layer = part
                ind_layer = conj_layer.base
                x = ind_layer.coords[f.path[1]]
                pt = m.form.span.middle.action[g.mul(g.inv(tr.y), x)][tr.base]
                out.append(Flat(f.base, f.b, offs[i] + f.offset, f.rank, (i,) + f.path, (pt,) + f.points))
        return out
    if isinstance(m, DirectSum):
        out = []
        offs = m.offsets(j)
        for i, part in enumerate(m.parts):
            for f in flatten(part, j, stop):
                out.append(Flat(f.base, f.b, offs[i] + f.offset, f.rank, (i,) + f.path, f.points))
        return out
    if isinstance(m, BisetSystem):
        out = []
        for p, off, n, jb in m.summands(j):
            bp = m.coords[p]
            lab = () if m.labels is None else (m.labels[p],)
            for f in flatten(m.base, jb, stop):
                out.append(Flat(f.base, g.mul(bp, f.b), off + f.offset, f.rank, (p,) + f.path, lab + f.points))
        return out
    return [Flat(m, 0, 0, m.rank(j), (), ())]


def matching_morphism(src: CoefficientSystem, dst: CoefficientSystem,
                      match: Callable[[Subgroup, list[Flat], list[Flat]], list[tuple[int, int]]],
                      base: CoefficientSystem | None = None) -> CoeffMorphism:
    """Morphism with blocks ``conj_block`` between matched flat summands.

    ``match(J, src_flats, dst_flats)`` returns pairs ``(i, k)`` meaning
    source summand ``i`` maps into destination summand ``k``.
    """
    maps = {}
    for j in src.levels():
        fs, fd = flatten(src, j, base), flatten(dst, j, base)
        out = _zeros(dst.rank(j), src.rank(j))
        for i, k in match(j, fs, fd):
            s, d = fs[i], fd[k]
            if s.base is not d.base:
                raise CoefficientError("matched summands come from different base systems")
            if s.rank:
                out[d.offset:d.offset + d.rank, s.offset:s.offset + s.rank] += conj_block(s.base, j, d.b, s.b)
        maps[j.index] = out
    return CoeffMorphism(src, dst, maps)


# -- functors on morphisms -------------------------------------------------------

def biset_morphism(f: CoeffMorphism, src: BisetSystem, dst: BisetSystem) -> CoeffMorphism:
    """Apply the biset construction of ``src``/``dst`` (same points) to ``f``."""
    maps = {}
    for j in src.levels():
        maps[j.index] = block_diag([f.at(jb) for _, _, _, jb in src.summands(j)])
    return CoeffMorphism(src, dst, maps)


def induce_morphism(f: CoeffMorphism, k: Subgroup, src=None, dst=None) -> CoeffMorphism:
    src = src or induce_system(f.source, k)
    dst = dst or induce_system(f.target, k)
    return biset_morphism(f, src, dst)


def restrict_morphism(f: CoeffMorphism, h: Subgroup, src=None, dst=None) -> CoeffMorphism:
    src = src or restrict_system(f.source, h)
    dst = dst or restrict_system(f.target, h)
    return CoeffMorphism(src, dst, {l.index: f.at(l) for l in src.levels()})


def conjugate_morphism(f: CoeffMorphism, g: int, src=None, dst=None) -> CoeffMorphism:
    src = src or conjugate_system(f.source, g)
    dst = dst or conjugate_system(f.target, g)
    return biset_morphism(f, src, dst)


# -- Frobenius reciprocity -------------------------------------------------------

def frobenius_iso(m: CoefficientSystem, n: CoefficientSystem) -> CoeffMorphism:
    """``M □ I^K_H(N) -> I^K_H(R^K_H(M) □ N)``, ``(x, [k, y]) -> [k, (k^-1 x, y)]``.

    ``M`` lives over ``K``, ``N`` over ``H``.
    """
    lat = m.lattice
    g = lat.group
    k, h = m.universe, n.universe
    ind = induce_system(n, k)
    src = BoxProduct(m, ind)
    dst = induce_system(BoxProduct(restrict_system(m, h), n), k)
    maps = {}
    for j in src.levels():
        out = _zeros(dst.rank(j), src.rank(j))
        nm = m.rank(j)
        ni = ind.rank(j)
        dsum = {p: off for p, off, _, _ in dst.summands(j)}
        for p, off, nn, jx in ind.summands(j):
            x = ind.coords[p]
            blk = np.kron(m.mat(jx, j, g.inv(x)), _eye(nn))       # (m(jx)*nn, nm*nn)
            doff = dsum[p]
            # source index i*ni + off + t  for i < nm, t < nn
            cols = [i * ni + off + t for i in range(nm) for t in range(nn)]
            if cols:
                out[doff:doff + blk.shape[0], cols] = blk
        maps[j.index] = out
    return CoeffMorphism(src, dst, maps)


# -- double cosets -------------------------------------------------------------

def double_coset_target(m: CoefficientSystem, k: Subgroup, h: Subgroup) -> DirectSum:
    """``⊕_γ I^H_{H∩J^γ} R^{J^γ}_{H∩J^γ} c_γ(M)`` for ``M`` over ``J``."""
    lat = m.lattice
    dc = lat.double_cosets(k, m.universe, h)
    parts = []
    for gamma, inter in zip(dc.representatives, dc.intersections):
        parts.append(induce_system(restrict_system(conjugate_system(m, gamma), inter), h))
    out = DirectSum(parts, lat, h)
    out.double_cosets = dc
    return out


def double_coset_iso(k: Subgroup, j: Subgroup, h: Subgroup, m: CoefficientSystem) -> CoeffMorphism:
    """``R^K_H I^K_J(M) -> ⊕_γ I^H_{H∩J^γ} R c_γ(M)`` summand by summand: the
    summand ``(γ, y)`` on the right matches the coset ``y γ^-1 J`` on the left."""
    if m.universe != j:
        raise CoefficientError("M must live over J")
    lat = m.lattice
    src = restrict_system(induce_system(m, k), h)
    dst = double_coset_target(m, k, h)

    def match(level, fs, fd):
        where = {lat.coset_rep(f.b, j): i for i, f in enumerate(fs)}
        return [(where[lat.coset_rep(f.b, j)], kk) for kk, f in enumerate(fd)]

    return matching_morphism(src, dst, match, m)


# -- adjunction -----------------------------------------------------------------

def counit(m: CoefficientSystem, a: Subgroup) -> CoeffMorphism:
    """``ε: I^B_A R^B_A(M) -> M`` for ``M`` over ``B``; summand ``x`` maps by ``M.mat(J, J^x, x)``."""
    src = induce_system(restrict_system(m, a), m.universe)
    maps = {}
    for j in src.levels():
        blocks = [m.mat(j, jx, src.coords[p]) for p, _, _, jx in src.summands(j)]
        maps[j.index] = np.concatenate(blocks, axis=1) if blocks else _zeros(m.rank(j), 0)
    return CoeffMorphism(src, m, maps)


def unit(n: CoefficientSystem, b: Subgroup) -> CoeffMorphism:
    """``η: N -> R^B_A I^B_A(N)`` for ``N`` over ``A``: inclusion at the coset ``eA``."""
    ind = induce_system(n, b)
    dst = restrict_system(ind, n.universe)
    maps = {}
    for j in n.levels():
        out = _zeros(ind.rank(j), n.rank(j))
        for p, off, nn, _ in ind.summands(j):
            if ind.coords[p] == 0:
                out[off:off + nn, :] = _eye(nn)
        maps[j.index] = out
    return CoeffMorphism(n, dst, maps)


def chain_counit(m: CoefficientSystem, a: Subgroup, b: Subgroup) -> CoeffMorphism:
    """``ε^B_A: I^C_A R^C_A(M) -> I^C_B R^C_B(M)`` for ``A <= B <= C``, ``M`` over ``C``:
    the summand ``x`` goes to ``z = xB`` by ``M.mat(J^z, J^x, z^-1 x)``."""
    lat = m.lattice
    c = m.universe
    src = induce_system(restrict_system(m, a), c)
    dst = induce_system(restrict_system(m, b), c)

    def match(level, fs, fd):
        where = {f.b: i for i, f in enumerate(fd)}
        return [(i, where[lat.coset_rep(f.b, b)]) for i, f in enumerate(fs)]

    return matching_morphism(src, dst, match, m)


@dataclass
class AdjunctionWitness:
    a: Subgroup
    b: Subgroup
    c: Subgroup
    counits: list[CoeffMorphism]
    units: list[CoeffMorphism]
    chain: list[CoeffMorphism]
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def triangle_defects(n: CoefficientSystem, b: Subgroup) -> list[str]:
    """Both triangle identities for ``I^B_A ⊣ R^B_A`` at ``N`` over ``A`` and at ``I N``."""
    a = n.universe
    out = []
    ind = induce_system(n, b)
    eta = unit(n, b)
    i_eta = induce_morphism(eta, b, src=ind)
    eps = counit(ind, a)
    # the middle object I R I N must be the same system on both sides
    i_eta = CoeffMorphism(ind, eps.source, i_eta.maps)
    if not eps.compose(i_eta).equals(identity_morphism(ind)):
        out.append("ε_I ∘ I(η) != id")
    m = ind
    rm = restrict_system(m, a)
    eta_r = unit(rm, b)
    eps_m = counit(m, a)
    r_eps = restrict_morphism(eps_m, a)
    r_eps = CoeffMorphism(eta_r.target, rm, r_eps.maps)
    if not r_eps.compose(eta_r).equals(identity_morphism(rm)):
        out.append("R(ε) ∘ η_R != id")
    return out


def adjunction_witness(lat: SubgroupLattice, a: Subgroup, b: Subgroup, c: Subgroup,
                       family: Sequence[CoefficientSystem] | None = None) -> AdjunctionWitness:
    """Counits, units and ``ε^B_A`` on a family of free systems over ``C``
    (default: ``A_{C/L}`` for all ``L <= C``), with triangle identities and
    naturality checked."""
    from .coeff import free_system
    if not (a <= b <= c):
        raise CoefficientError("need A <= B <= C")
    if family is None:
        family = [free_system(canonical_orbit(lat, l, c)) for l in lat.subgroups_of(c)]
    counits, units, chains, failures = [], [], [], []
    for m in family:
        mb = restrict_system(m, b)
        eps = counit(mb, a)
        eta = unit(restrict_system(m, a), b)
        ch = chain_counit(m, a, b)
        for name, f in (("counit", eps), ("unit", eta), ("ε^B_A", ch)):
            if not f.is_natural():
                failures.append(f"{name} not natural on {m!r}")
        failures += [f"{d} on {m!r}" for d in triangle_defects(restrict_system(m, a), b)]
        counits.append(eps)
        units.append(eta)
        chains.append(ch)
    return AdjunctionWitness(a, b, c, counits, units, chains, failures)


# -- spans as functors -------------------------------------------------------------

class SpanSystem(BisetSystem):
    """``P(ω)(M)`` built directly from the span: points ``t^-1(eK)`` with
    ``b`` the least element of ``r(a)``."""

    def __init__(self, span: Span, m: CoefficientSystem):
        lat = span.lattice
        a = span.middle
        k = span.k
        pts = [x for x in range(a.size) if span.t.image[x] == 0]
        pos = {x: i for i, x in enumerate(pts)}
        action = tuple(tuple(pos[a.action[g][x]] for x in pts) if g in k else None
                       for g in range(lat.group.order))
        y = GSet(lat, k, action, tuple(a.payload[x] for x in pts))
        coords = [coset_of(span.r.codomain, span.r.image[x]) for x in pts]
        super().__init__(m, y, coords, labels=pts)
        self.span = span


class NormalFormRealization(DirectSum):
    """``⊕_i c_{y_i} I^{K^{y_i^-1}}_{L_i} R^H_{L_i}(M)`` over the normal form."""

    def __init__(self, form: SpanNormalForm, m: CoefficientSystem):
        lat = m.lattice
        g = lat.group
        k = form.span.k
        parts = []
        for tr in form.triples:
            big = lat.conjugate(k, g.inv(tr.y))
            parts.append(conjugate_system(induce_system(restrict_system(m, tr.stabilizer), big), tr.y))
        super().__init__(parts, lat, k)
        self.form = form


def span_functor(w: Span, m: CoefficientSystem, normal_form: bool = True) -> CoefficientSystem:
    if m.universe != w.h:
        raise CoefficientError("system must live over the source subgroup of the span")
    if w.unit:
        return m
    if normal_form:
        return NormalFormRealization(span_normal_form(w), m)
    return SpanSystem(w, m)


def span_morphism(w: Span, f: CoeffMorphism, normal_form: bool = False) -> CoeffMorphism:
    """``P(ω)(f)``: block diagonal with ``f`` at each summand level."""
    if w.unit:
        return f
    src = span_functor(w, f.source, normal_form)
    dst = span_functor(w, f.target, normal_form)
    lat = f.source.lattice
    maps = {}
    for j in src.levels():
        maps[j.index] = block_diag([f.at(lat.conjugate(j, fl.b)) for fl in flatten(src, j, f.source)])
    return CoeffMorphism(src, dst, maps)


def _points_match(j, fs, fd):
    where = {f.points: i for i, f in enumerate(fd)}
    return [(i, where[f.points]) for i, f in enumerate(fs)]


def normal_form_iso(w: Span, m: CoefficientSystem) -> CoeffMorphism:
    """``P_nf(ω)(M) -> P(ω)(M)``: the summand of ``x`` in orbit ``i`` is the
    point ``y_i^-1 x · X_i^e``."""
    return matching_morphism(span_functor(w, m, True), span_functor(w, m, False), _points_match, m)


def composition_iso(w1: Span, w2: Span, m: CoefficientSystem) -> CoeffMorphism:
    """``P(ω2)(P(ω1)(M)) -> P(ω2 ∗ ω1)(M)``, both built directly from spans.

    The summand ``(a2, a1)`` corresponds to the pullback point ``(b_{a2}·a1, a2)``.
    """
    comp = compose_spans(w1, w2)
    inner = span_functor(w1, m, False)
    src = span_functor(w2, inner, False)
    dst = span_functor(comp, m, False)
    if w1.unit or w2.unit:
        return identity_morphism(dst) if src is dst else matching_morphism(src, dst, _points_match, m)
    a1 = w1.middle
    pair_of = {}
    # pullback ids are pairs (x in A1, y in A2) in lexicographic order
    idx = 0
    by_target: dict[int, list[int]] = {}
    for y in range(w2.middle.size):
        by_target.setdefault(w2.r.image[y], []).append(y)
    for x in range(a1.size):
        for y in by_target.get(w1.t.image[x], ()):
            pair_of[(x, y)] = idx
            idx += 1

    def match(j, fs, fd):
        where = {f.points[0]: i for i, f in enumerate(fd)}
        out = []
        for i, f in enumerate(fs):
            pa2, pa1 = f.points[0], f.points[1]
            b2 = coset_of(w2.r.codomain, w2.r.image[pa2])
            out.append((i, where[pair_of[(a1.action[b2][pa1], pa2)]]))
        return out

    return matching_morphism(src, dst, match, m)


def two_cell_transform(cell: Span2Cell, m: CoefficientSystem, normal_form: bool = True) -> CoeffMorphism:
    """The matrix ``(α_{i,j})`` of ``P(φ)``: a summand at the point ``a`` goes to
    the summand at ``φ(a)``.  On normal forms this is the counit composite
    ``ε`` for ``L_i <= J_j^{h^-1} <= K^{y_i^-1}`` followed by conjugation,
    and it vanishes between orbits not mapped to each other."""
    src = span_functor(cell.source, m, normal_form)
    dst = span_functor(cell.target, m, normal_form)
    phi = cell.phi.image

    def match(j, fs, fd):
        where = {f.points[0]: i for i, f in enumerate(fd)}
        return [(i, where[phi[f.points[0]]]) for i, f in enumerate(fs)]

    if cell.source.unit or cell.target.unit:
        raise CoefficientError("2-cells are taken between materialised spans")
    return matching_morphism(src, dst, match, m)


def two_cell_blocks(cell: Span2Cell, m: CoefficientSystem) -> dict[tuple[int, int], CoeffMorphism]:
    """Split :func:`two_cell_transform` into orbit blocks ``α_{i,j}``."""
    full = two_cell_transform(cell, m, True)
    src, dst = full.source, full.target
    out = {}
    for i, ps in enumerate(src.parts):
        for jj, pd in enumerate(dst.parts):
            maps = {}
            for l in src.levels():
                oi, od = src.offsets(l), dst.offsets(l)
                maps[l.index] = full.at(l)[od[jj]:od[jj + 1], oi[i]:oi[i + 1]]
            out[(i, jj)] = CoeffMorphism(ps, pd, maps)
    return out


def coproduct_iso(w1: Span, w2: Span, m: CoefficientSystem) -> CoeffMorphism:
    """``P(ω1 ⊔ ω2)(M) -> P(ω1)(M) ⊕ P(ω2)(M)`` (generic realisation)."""
    from .spans import span_coproduct
    both = span_coproduct(w1, w2)
    src = span_functor(both, m, False)
    p1, p2 = span_functor(w1.materialize(), m, False), span_functor(w2.materialize(), m, False)
    dst = DirectSum([p1, p2], m.lattice, both.k)
    n1 = w1.materialize().middle.size

    def match(j, fs, fd):
        where = {(f.path[0], f.points[0]): i for i, f in enumerate(fd)}
        out = []
        for i, f in enumerate(fs):
            a = f.points[0]
            key = (0, a) if a < n1 else (1, a - n1)
            out.append((i, where[key]))
        return out

    return matching_morphism(src, dst, match, m)


def systems_equal(a: CoefficientSystem, b: CoefficientSystem) -> bool:
    """Value equality: same universe, ranks and every structure map."""
    from .coeff import all_morphisms
    if a.universe != b.universe:
        return False
    if any(a.rank(l) != b.rank(l) for l in a.levels()):
        return False
    return all(np.array_equal(a.mat(l, l2, x), b.mat(l, l2, x)) for l, l2, x in all_morphisms(a.lattice, a.universe))


def conjugation_iso(m: CoefficientSystem, h: int) -> CoeffMorphism:
    """``M -> c_h M`` for ``h`` in the group ``M`` lives over (canonical, not identity)."""
    dst = conjugate_system(m, h)
    return matching_morphism(m, dst, lambda j, fs, fd: [(0, 0)], m)


__all__ = [
    "BisetSystem", "InducedSystem", "ConjugateSystem", "SpanSystem", "NormalFormRealization", "Flat",
    "AdjunctionWitness", "conj_block", "restrict_system", "induce_system", "conjugate_system", "flatten",
    "matching_morphism", "biset_morphism", "induce_morphism", "restrict_morphism", "conjugate_morphism",
    "frobenius_iso", "double_coset_target", "double_coset_iso", "counit", "unit", "chain_counit",
    "triangle_defects", "adjunction_witness", "span_functor", "span_morphism", "normal_form_iso",
    "composition_iso", "two_cell_transform", "two_cell_blocks", "coproduct_iso", "systems_equal",
    "conjugation_iso",
]
