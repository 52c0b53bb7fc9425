"""Spans of G-sets: the 1- and 2-cells of the Burnside 2-category.

A span ``H -> K`` is a G-set ``A`` with legs ``r: A -> G/H`` and
``t: A -> G/K``.  Composition is the canonical pullback over ``G/K``; since
pullbacks of ordered G-sets are strictly associative, so is composition.
The identity ``1_H`` is a flagged formal object and never materialised by
composition.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from .groups import Subgroup, SubgroupLattice
from .gsets import (GMap, GSet, canonical_orbit, coproduct, coset_of, empty_gset, identity_map,
                    orbit_map, pullback_over)


class SpanError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Span:
    lattice: SubgroupLattice
    h: Subgroup
    k: Subgroup
    middle: GSet | None = None
    r: GMap | None = None
    t: GMap | None = None
    unit: bool = False

    def _key(self):
        if self.unit:
            return (self.h.elements, self.k.elements, True)
        return (self.h.elements, self.k.elements, False, self.middle._key(), self.r.image, self.t.image)

    def __eq__(self, other):
        return isinstance(other, Span) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        if self.unit:
            return f"Span(1_{list(self.h.elements)})"
        return f"Span({list(self.h.elements)} -> {list(self.k.elements)}, |A|={self.middle.size})"

    def materialize(self) -> "Span":
        """Replace a formal unit by the span ``G/H = G/H = G/H``."""
        if not self.unit:
            return self
        x = canonical_orbit(self.lattice, self.h)
        return Span(self.lattice, self.h, self.h, x, identity_map(x), identity_map(x))

    def validate(self) -> list[str]:
        if self.unit:
            return [] if self.h == self.k else ["unit span needs H = K"]
        errs = []
        lat = self.lattice
        if self.r.domain != self.middle or self.t.domain != self.middle:
            errs.append("legs must start at the middle set")
        if self.r.codomain != canonical_orbit(lat, self.h) or self.t.codomain != canonical_orbit(lat, self.k):
            errs.append("legs must end at the canonical orbits G/H and G/K")
        errs += [f"r: {e}" for e in self.r.validate()] + [f"t: {e}" for e in self.t.validate()]
        return errs


def unit_span(lat: SubgroupLattice, h: Subgroup) -> Span:
    return Span(lat, h, h, unit=True)


def make_span(lat: SubgroupLattice, h: Subgroup, k: Subgroup, middle: GSet,
              r: Sequence[int], t: Sequence[int]) -> Span:
    gh, gk = canonical_orbit(lat, h), canonical_orbit(lat, k)
    w = Span(lat, h, k, middle, GMap(middle, gh, tuple(r)), GMap(middle, gk, tuple(t)))
    errs = w.validate()
    if errs:
        raise SpanError("; ".join(errs))
    return w


def empty_span(lat: SubgroupLattice, h: Subgroup, k: Subgroup) -> Span:
    e = empty_gset(lat)
    return Span(lat, h, k, e, GMap(e, canonical_orbit(lat, h), ()), GMap(e, canonical_orbit(lat, k), ()))


def transfer_span(lat: SubgroupLattice, h: Subgroup, k: Subgroup) -> Span:
    """``t^K_H = [G/H = G/H -> G/K]`` for ``H <= K`` (realises induction)."""
    x = canonical_orbit(lat, h)
    return Span(lat, h, k, x, identity_map(x), orbit_map(lat, h, k))


def restriction_span(lat: SubgroupLattice, k: Subgroup, h: Subgroup) -> Span:
    """``r^K_H = [G/K <- G/H = G/H]`` for ``H <= K`` (realises restriction)."""
    x = canonical_orbit(lat, h)
    return Span(lat, k, h, x, orbit_map(lat, h, k), identity_map(x))


def conjugation_span(lat: SubgroupLattice, h: Subgroup, g: int) -> Span:
    """``[G/H <- G/H^g = G/H^g]`` with ``x H^g -> x g^-1 H`` (realises ``c_g``)."""
    hg = lat.conjugate(h, g)
    x = canonical_orbit(lat, hg)
    return Span(lat, h, hg, x, orbit_map(lat, hg, h, lat.group.inv(g)), identity_map(x))


def compose_spans(w1: Span, w2: Span) -> Span:
    """``w2 ∗ w1``: first ``w1: H -> K`` then ``w2: K -> L``."""
    if w1.k != w2.h:
        raise SpanError("spans are not composable")
    if w1.unit:
        return w2
    if w2.unit:
        return w1
    p, p1, p2 = pullback_over(w1.t, w2.r)
    return Span(w1.lattice, w1.h, w2.k, p, w1.r.compose(p1), w2.t.compose(p2))


def span_coproduct(w1: Span, w2: Span) -> Span:
    if (w1.h, w1.k) != (w2.h, w2.k):
        raise SpanError("coproduct needs spans with the same endpoints")
    a, b = w1.materialize(), w2.materialize()
    m = coproduct(a.middle, b.middle)
    return Span(a.lattice, a.h, a.k, m, GMap(m, a.r.codomain, a.r.image + b.r.image),
                GMap(m, a.t.codomain, a.t.image + b.t.image))


# -- normal form -------------------------------------------------------------

@dataclass(frozen=True)
class OrbitTriple:
    base: int            # X^e: least element of the orbit with r = eH
    stabilizer: Subgroup  # L <= H
    y: int               # least group element with t(X^e) = yK
    members: tuple[int, ...]


@dataclass(frozen=True)
class SpanNormalForm:
    span: Span
    triples: tuple[OrbitTriple, ...]


def span_normal_form(w: Span) -> SpanNormalForm:
    if w.unit:
        raise SpanError("the formal unit has no normal form")
    a = w.middle
    out = []
    for m in a.orbit_minima:
        members = a.orbit(m)
        base = min(x for x in members if w.r.image[x] == 0)
        stab = a.stabilizer(base)
        y = coset_of(w.t.codomain, w.t.image[base])
        out.append(OrbitTriple(base, stab, y, tuple(members)))
    out.sort(key=lambda o: o.base)
    return SpanNormalForm(w, tuple(out))


# -- 2-cells -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Span2Cell:
    source: Span
    target: Span
    phi: GMap

    def validate(self) -> list[str]:
        s, t = self.source.materialize(), self.target.materialize()
        if (s.h, s.k) != (t.h, t.k):
            return ["2-cell needs spans with the same endpoints"]
        if self.phi.domain != s.middle or self.phi.codomain != t.middle:
            return ["2-cell map has the wrong domain or codomain"]
        errs = self.phi.validate()
        if t.r.compose(self.phi).image != s.r.image:
            errs.append("r' ∘ φ != r")
        if t.t.compose(self.phi).image != s.t.image:
            errs.append("t' ∘ φ != t")
        return errs


def make_2cell(source: Span, target: Span, image: Sequence[int]) -> Span2Cell:
    s, t = source.materialize(), target.materialize()
    c = Span2Cell(s, t, GMap(s.middle, t.middle, tuple(image)))
    errs = c.validate()
    if errs:
        raise SpanError("; ".join(errs))
    return c


def identity_2cell(w: Span) -> Span2Cell:
    w = w.materialize()
    return Span2Cell(w, w, identity_map(w.middle))


def two_cell_compose(phi: Span2Cell, psi: Span2Cell) -> Span2Cell:
    """``psi ∘ phi``."""
    if phi.target != psi.source:
        raise SpanError("2-cells are not composable")
    out = Span2Cell(phi.source, psi.target, psi.phi.compose(phi.phi))
    errs = out.validate()
    if errs:
        raise SpanError("; ".join(errs))
    return out


# -- random generation (tests and suites) ----------------------------------------

def random_orbit_map(lat: SubgroupLattice, l: Subgroup, h: Subgroup, rng: random.Random) -> GMap | None:
    """A random equivariant map ``G/L -> G/H`` or ``None`` if there is none."""
    choices = [a for a in lat.left_cosets(lat.whole, h) if lat.conjugate(l, a) <= h]
    if not choices:
        return None
    return orbit_map(lat, l, h, rng.choice(choices))


def random_span(lat: SubgroupLattice, h: Subgroup, k: Subgroup, rng: random.Random,
                max_size: int = 12, max_orbits: int = 3) -> Span:
    """Random span with middle a coproduct of canonical orbits ``G/L``."""
    g = lat.group
    cands = [l for l in lat.subgroups if g.order // len(l) <= max_size
             and any(lat.conjugate(l, a) <= h for a in range(g.order))
             and any(lat.conjugate(l, a) <= k for a in range(g.order))]
    parts, r_img, t_img, size = [], [], [], 0
    for _ in range(rng.randint(0, max_orbits)):
        fit = [l for l in cands if size + g.order // len(l) <= max_size]
        if not fit:
            break
        l = rng.choice(fit)
        x = canonical_orbit(lat, l)
        rmap = random_orbit_map(lat, l, h, rng)
        tmap = random_orbit_map(lat, l, k, rng)
        parts.append(x)
        r_img += list(rmap.image)
        t_img += list(tmap.image)
        size += x.size
    if not parts:
        return empty_span(lat, h, k)
    m = coproduct(*parts)
    return Span(lat, h, k, m, GMap(m, canonical_orbit(lat, h), tuple(r_img)),
                GMap(m, canonical_orbit(lat, k), tuple(t_img)))


def random_2cell(w: Span, rng: random.Random) -> Span2Cell:
    """A 2-cell out of ``w``: each orbit ``G·m`` is sent onto ``G/L`` by
    ``g·m -> gL`` for a random ``L`` between the stabilizer of ``m`` and the
    stabilizers of ``r(m)`` and ``t(m)``."""
    w = w.materialize()
    lat = w.lattice
    g = lat.group
    a = w.middle
    parts, phi, r_img, t_img = [], [0] * a.size, [], []
    offset = 0
    for m in a.orbit_minima:
        stab = a.stabilizer(m)
        rs = w.r.codomain.stabilizer(w.r.image[m])
        ts = w.t.codomain.stabilizer(w.t.image[m])
        l = rng.choice([l for l in lat.subgroups if stab <= l and l <= rs and l <= ts])
        x = canonical_orbit(lat, l)
        rr, tt = [0] * x.size, [0] * x.size
        for gg in range(g.order):
            p = x.action[gg][0]
            phi[a.action[gg][m]] = offset + p
            rr[p] = w.r.image[a.action[gg][m]]
            tt[p] = w.t.image[a.action[gg][m]]
        parts.append(x)
        r_img += rr
        t_img += tt
        offset += x.size
    if not parts:
        return identity_2cell(w)
    mid = coproduct(*parts)
    target = Span(lat, w.h, w.k, mid, GMap(mid, w.r.codomain, tuple(r_img)), GMap(mid, w.t.codomain, tuple(t_img)))
    return Span2Cell(w, target, GMap(a, mid, tuple(phi)))


__all__ = [
    "Span", "SpanError", "SpanNormalForm", "OrbitTriple", "Span2Cell", "unit_span", "make_span",
    "empty_span", "transfer_span", "restriction_span", "conjugation_span", "compose_spans", "span_coproduct",
    "span_normal_form", "make_2cell", "identity_2cell", "two_cell_compose", "random_span",
    "random_orbit_map", "random_2cell",
]
