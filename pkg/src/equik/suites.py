"""Property suites behind ``equik verify``.

Every suite walks a family of groups, runs exact-integer checks and returns a
:class:`SuiteResult`.  Randomness comes from one seeded ``random.Random`` per
suite, so a run is reproducible from ``(suite, seed)``.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import lattice as zl
from .coeff import (FreeSystem, box_morphism, catalog_grings, constant_ring, fp_system,
                    gmap_morphism, ring_violations)
from .functors import (composition_iso, coproduct_iso, double_coset_iso, frobenius_iso, induce_morphism,
                       restrict_morphism, two_cell_transform)
from .gcw import (antipodal_square, equivariant_chain_complex, equivariant_euler_class, euler_marks,
                  fixed_subcomplex, linearization_components, component_rank_vector, octahedron_c2,
                  point_complex, random_complex, simplicial_homology, transfer_identity)
from .groups import build_group
from .gsets import (BurnsideElement, burnside_class, burnside_from_marks, find_isomorphism,
                    gset_from_census, gsets_with_orbits, mark_vector, orbit_decomposition, random_gmap,
                    table_of_marks)
from .modules import (NotProjectiveError, ProjectiveModule, evaluate_level, extension_of_scalars_check,
                      free_module, free_projective, hom_space, InducedModule, isotropy_split, k0_class_vector,
                      level_twisted_ring, merling_F, merling_F_projective, merling_Phi, phi_hom_identification,
                      phi_lift, presentation_module, random_gset, random_idempotent, random_twisted_idempotent,
                      twisted_idempotents, twisted_s3_iso)
from .spans import compose_spans, random_2cell, random_span, two_cell_compose, unit_span

SUITE_GROUPS = ("C2", "C3", "C4", "C2xC2", "C6", "S3", "D4", "Q8", "D6", "A4")


@dataclass
class SuiteResult:
    name: str
    criterion: int
    cases: int = 0
    failures: list[str] = field(default_factory=list)
    seconds: float = 0.0
    budget: float | None = None      # wall-clock limit in seconds, if the suite has one

    @property
    def passed(self) -> bool:
        return self.cases > 0 and not self.failures and (self.budget is None or self.seconds < self.budget)

    def check(self, ok: bool, what: str) -> None:
        self.cases += 1
        if not ok:
            self.failures.append(what)

    def summary(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        line = f"[{verdict}] {self.criterion:>2} {self.name}: {self.cases - len(self.failures)}/{self.cases} cases"
        if self.budget is not None:
            line += f", {self.seconds:.1f}s (limit {self.budget:.0f}s)"
        if self.failures:
            line += f"; first failure: {self.failures[0]}"
        return line


def _groups(names: Sequence[str] | None, max_order: int | None) -> list:
    out = []
    for n in names or SUITE_GROUPS:
        g = build_group(n)
        if max_order is None or g.order <= max_order:
            out.append((n, g))
    return out


def _sub(s) -> list[int]:
    return list(s.elements)


# -- 1: double cosets ----------------------------------------------------------------

def suite_doublecoset(groups=None, max_order=None, seed=0, max_orbits: int = 3) -> SuiteResult:
    """Every ``J, H <= K`` and every ``J``-set with at most ``max_orbits`` orbits."""
    res = SuiteResult("doublecoset", 1, budget=120.0)
    for name, g in _groups(groups, max_order):
        lat = g.lattice
        systems = {}
        for k in lat.subgroups:
            for j in lat.subgroups_of(k):
                if j.index not in systems:
                    systems[j.index] = [FreeSystem(x) for x in gsets_with_orbits(lat, max_orbits, j)]
                for h in lat.subgroups_of(k):
                    for m in systems[j.index]:
                        f = double_coset_iso(k, j, h, m)
                        res.check(f.is_iso() and f.is_natural(),
                                  f"{name}: K={_sub(k)} J={_sub(j)} H={_sub(h)} X={m.gset.size} points")
    return res


# -- 2: Frobenius reciprocity ----------------------------------------------------------

def suite_frobenius(groups=None, max_order=None, seed=0, max_orbits: int = 3, per_pair: int = 2) -> SuiteResult:
    """For every ``H <= K``: random free ``M`` over ``K`` and ``N`` over ``H``;
    the iso is invertible, commutes with structure maps and is natural in
    both variables along maps ``A_f`` of free systems."""
    res = SuiteResult("frobenius", 2)
    rng = random.Random(seed)
    for name, g in _groups(groups, max_order):
        lat = g.lattice
        for k in lat.subgroups:
            ks = gsets_with_orbits(lat, max_orbits, k)
            for h in lat.subgroups_of(k):
                hs = gsets_with_orbits(lat, max_orbits, h)
                for _ in range(per_pair):
                    x, x2 = rng.choice(ks), rng.choice(ks)
                    y, y2 = rng.choice(hs), rng.choice(hs)
                    m, n = FreeSystem(x), FreeSystem(y)
                    f = frobenius_iso(m, n)
                    where = f"{name}: K={_sub(k)} H={_sub(h)}"
                    res.check(f.is_iso() and f.is_natural(), f"{where}: not a natural iso")
                    a, b = random_gmap(x, x2, rng), random_gmap(y, y2, rng)
                    if a is None or b is None:
                        continue
                    fa, fb = gmap_morphism(a), gmap_morphism(b)
                    f2 = frobenius_iso(fa.target, fb.target)
                    lhs = f2.compose(box_morphism(fa, induce_morphism(fb, k, f.source.right, f2.source.right)))
                    inner = box_morphism(restrict_morphism(fa, h), fb)
                    rhs = induce_morphism(inner, k, f.target, f2.target).compose(f)
                    res.check(lhs.equals(rhs), f"{where}: not natural in (M, N)")
    return res


# -- 3: span coherence -------------------------------------------------------------------

def suite_spans(groups=None, max_order=None, seed=0, triples: int = 200, cells: int = 50,
                max_size: int = 12) -> SuiteResult:
    res = SuiteResult("spans", 3)
    rng = random.Random(seed)
    for name, g in _groups(groups, max_order):
        lat = g.lattice
        subs = lat.subgroups
        for t in range(triples):
            h, k, l, m = (rng.choice(subs) for _ in range(4))
            w1 = random_span(lat, h, k, rng, max_size)
            w2 = random_span(lat, k, l, rng, max_size)
            w3 = random_span(lat, l, m, rng, max_size)
            where = f"{name} triple {t}"
            res.check(compose_spans(compose_spans(w1, w2), w3) == compose_spans(w1, compose_spans(w2, w3)),
                      f"{where}: associativity")
            res.check(compose_spans(unit_span(lat, h), w1) == w1 and compose_spans(w1, unit_span(lat, k)) == w1,
                      f"{where}: unit laws")
            x = random_gset(lat, rng, 2, universe=h, max_size=6)
            sysm = FreeSystem(x)
            w1b = random_span(lat, h, k, rng, max_size)
            f = coproduct_iso(w1, w1b, sysm)
            res.check(f.is_iso() and f.is_natural(), f"{where}: additivity")
            f = composition_iso(w1, w2, sysm)
            res.check(f.is_iso() and f.is_natural(), f"{where}: composition")
        for c in range(cells):
            h, k = rng.choice(subs), rng.choice(subs)
            w = random_span(lat, h, k, rng, max_size).materialize()
            alpha = random_2cell(w, rng)
            beta = random_2cell(alpha.target, rng)
            sysm = FreeSystem(random_gset(lat, rng, 2, universe=h, max_size=6))
            gamma = two_cell_compose(alpha, beta)
            lhs = two_cell_transform(gamma, sysm, False)
            rhs = two_cell_transform(beta, sysm, False).compose(two_cell_transform(alpha, sysm, False))
            res.check(lhs.equals(rhs) and lhs.is_natural(), f"{name} 2-cell pair {c}: γ != β·α")
    return res


# -- 4: isotropy splitting ----------------------------------------------------------------

def _rings(lat):
    return [constant_ring(lat)] + [fp_system(r) for r in catalog_grings(lat)[1:]]


def suite_splitting(groups=None, max_order=None, seed=0, trials: int = 100, max_orbits: int = 4,
                    max_size: int = 12) -> SuiteResult:
    res = SuiteResult("splitting", 4)
    rng = random.Random(seed)
    for name, g in _groups(groups, max_order):
        lat = g.lattice
        rings = _rings(lat)
        rel = lat.relative(lat.whole)
        for t in range(trials):
            s = rings[t % len(rings)]
            where = f"{name} trial {t} ({s.label or 'Z'})"
            x = random_gset(lat, rng, max_orbits, max_size=max_size)
            p = ProjectiveModule(s, x, random_idempotent(s, x, rng))
            try:
                cur = p
                for i in reversed(range(len(rel))):
                    if cur.rank(rel.reps[i]) == 0:
                        continue
                    split = isotropy_split(cur, i)
                    quotient_free = all(not [d for d in zl.smith_invariants(split.generated[l.index]) if d > 1]
                                        for l in cur.free.system.levels() if split.generated[l.index].size)
                    res.check(quotient_free and split.retraction.is_idempotent(), f"{where}: stage {i}")
                    cur = split.quotient
                res.check(cur.is_zero(), f"{where}: filtration not exhausted")
                y = random_gset(lat, rng, 2, max_size=8)
                q = ProjectiveModule(s, y, random_idempotent(s, y, rng))
                vp, vq, vs = k0_class_vector(p), k0_class_vector(q), k0_class_vector(p.direct_sum(q))
                res.check(vs == vp + vq, f"{where}: class vector not additive")
            except NotProjectiveError as ex:
                res.check(False, f"{where}: {ex}")
            vf = k0_class_vector(free_projective(s, x))
            census = orbit_decomposition(x).census
            zr = tuple(n * c.ring_rank for n, c in zip(census, vf.components))
            aug = all(a is None for a in vf.augranks()) or (vf.augranks() == census
                                                           and all(r == 0 for r in vf.reduced()))
            res.check(vf.zranks() == zr and aug, f"{where}: free module census")
    return res


# -- 5: Φ / ev -------------------------------------------------------------------------------

def suite_phi(groups=None, max_order=8, seed=0, trials: int = 50) -> SuiteResult:
    res = SuiteResult("phi", 5)
    rng = random.Random(seed)
    for name, g in _groups(groups, max_order):
        lat = g.lattice
        rings = _rings(lat)
        rel = lat.relative(lat.whole)
        for t in range(trials):
            s = rings[t % len(rings)]
            i = rng.randrange(len(rel))
            tw = level_twisted_ring(s, rel.reps[i])
            n = rng.randint(1, 2)
            q = random_twisted_idempotent(tw, n, rng, twisted_idempotents(tw))
            where = f"{name} trial {t} class {i}"
            ev = evaluate_level(phi_lift(s, i, q), i)
            res.check(ev.presentation is not None and np.array_equal(ev.presentation, q), f"{where}: ev∘Φ != id")
            x = random_gset(lat, rng, 2, max_size=8)
            m = ProjectiveModule(s, x, random_idempotent(s, x, rng))
            hid = phi_hom_identification(s, i, q, m)
            same = hid.lhs.shape[1] == hid.rhs.shape[1]
            res.check(hid.ok and same and zl.is_unimodular(hid.bijection), f"{where}: hom identification")
    return res


# -- 6: Burnside ring ---------------------------------------------------------------------------

CATALOG_FOR_MARKS = ("trivial", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11", "C12",
                     "C2xC2", "S3", "D4", "Q8", "D6", "A4")


def _gsets_up_to(lat, max_size: int) -> list:
    reps = lat.relative(lat.whole).reps
    sizes = [lat.group.order // len(h) for h in reps]
    out = []

    def walk(i, census, total):
        if i == len(reps):
            out.append(gset_from_census(lat, census))
            return
        c = 0
        while total + c * sizes[i] <= max_size:
            walk(i + 1, census + [c], total + c * sizes[i])
            c += 1

    walk(0, [], 0)
    return out


def _free_iso(x, y, f) -> bool:
    """``S_f: S_X -> S_Y`` is an iso of modules over the constant ring."""
    s = constant_ring(x.lattice)
    fx, fy = free_module(s, x), free_module(s, y)
    space = hom_space(fx, fy)
    c = np.concatenate([fy.unit_vector(h, f.image[m]) for m, h in space.orbits]) if space.orbits \
        else np.zeros(0, dtype=np.int64)
    phi = space.morphism(c)
    return phi.is_iso() and phi.is_natural()


def suite_burnside(groups=None, max_order=None, seed=0, samples: int = 100, max_size: int = 8) -> SuiteResult:
    res = SuiteResult("burnside", 6)
    rng = random.Random(seed)
    for name in groups or CATALOG_FOR_MARKS:
        lat = build_group(name).lattice
        tab = table_of_marks(lat)
        a = tab.as_array()
        n = tab.size
        res.check(not np.triu(a, 1).any() and all(a[i, i] != 0 for i in range(n)), f"{name}: marks not triangular")
        for _ in range(samples):
            x = BurnsideElement(tab, tuple(rng.randint(-5, 5) for _ in range(n)))
            res.check(burnside_from_marks(tab, x.marks()) == x, f"{name}: marks round trip")
        if lat.group.order > 8:
            continue
        xs = _gsets_up_to(lat, max_size)
        s = constant_ring(lat)
        for x in xs:
            vf = k0_class_vector(free_projective(s, x))
            res.check(all(r == 0 for r in vf.reduced()) and vf.free_part(tab) == burnside_class(x),
                      f"{name}: free module class")
        for i, x in enumerate(xs):
            for y in xs[i:]:
                if x.size != y.size:
                    continue
                f = find_isomorphism(x, y)
                same = mark_vector(x) == mark_vector(y)
                ranks = all(free_module(s, x).rank(h) == free_module(s, y).rank(h) for h in lat.subgroups)
                ok = (f is not None) == same == ranks and (f is None or _free_iso(x, y, f))
                res.check(ok, f"{name}: G-set {x.size} points, marks {mark_vector(x)} vs {mark_vector(y)}")
    return res


# -- 7: twisted rings -------------------------------------------------------------------------------

def suite_twisted(groups=None, max_order=None, seed=0) -> SuiteResult:
    res = SuiteResult("twisted", 7)
    for name, g in _groups(groups, max_order):
        lat = g.lattice
        for r in catalog_grings(lat):
            s = fp_system(r)
            res.check(not ring_violations(s), f"{name} {r.label}: ring axioms")
            for h in lat.relative(lat.whole).reps:
                t = level_twisted_ring(s, h)
                res.check(not t.violations(), f"{name} {r.label} level {_sub(h)}: not associative")
    t, s3, iso = twisted_s3_iso()
    res.check(iso is not None and _is_ring_iso(t, s3, iso), "Z[C3]_θ[C2] ≅ Z[S3]")
    return res


def _is_ring_iso(t, s3, iso: np.ndarray) -> bool:
    """Check ``iso`` (group-ring coordinates <- twisted coordinates) on basis pairs,
    multiplying in ``Z[S3]`` through the group law."""
    if not zl.is_unimodular(iso) or not np.array_equal(iso @ t.unit, np.eye(s3.order, dtype=np.int64)[0]):
        return False
    basis = np.eye(t.dim, dtype=np.int64)

    def times(u, v):
        out = np.zeros(s3.order, dtype=np.int64)
        for a in np.flatnonzero(u):
            for b in np.flatnonzero(v):
                out[s3.mul(int(a), int(b))] += u[a] * v[b]
        return out

    return all(np.array_equal(iso @ t.mul(basis[i], basis[j]), times(iso[:, i], iso[:, j]))
               for i in range(t.dim) for j in range(t.dim))


# -- 8: extension of scalars ----------------------------------------------------------------------------

def suite_extension(groups=None, max_order=8, seed=0, projectives: int = 1) -> SuiteResult:
    res = SuiteResult("extension", 8)
    rng = random.Random(seed)
    for name, g in _groups(groups, max_order):
        lat = g.lattice
        for r in catalog_grings(lat):
            s = fp_system(r)
            for k in lat.subgroups:
                sk = s.restrict(k)
                for h in lat.subgroups_of(k):
                    sh = s.restrict(h)
                    x = random_gset(lat, rng, 2, universe=h, max_size=4)
                    mods = [free_module(sh, x)]
                    for _ in range(projectives):
                        mods.append(ProjectiveModule(sh, x, random_idempotent(sh, x, rng)).as_module())
                    for m in mods:
                        chk = extension_of_scalars_check(sk, m)
                        res.check(chk.ok and not InducedModule(sk, m).violations(),
                                  f"{name} {r.label}: H={_sub(h)} K={_sub(k)}: {chk}")
    return res


# -- 9: geometry ----------------------------------------------------------------------------------

def suite_geometry(groups=None, max_order=None, seed=0, transfers: int = 20) -> SuiteResult:
    res = SuiteResult("geometry", 9, budget=10.0)
    rng = random.Random(seed)
    lat = build_group("C2").lattice
    octa = octahedron_c2(lat)
    e = equivariant_euler_class(octa)
    res.check(e.coeffs == (1, 0) and e.marks() == (2, 0) == euler_marks(octa), "octahedron: Euler class")
    res.check(component_rank_vector(octa) == linearization_components(octa) == (1, 0),
              "octahedron: component ranks")
    c = equivariant_chain_complex(octa)
    res.check(c.level_ranks(lat.trivial) == (6, 12, 8) and c.level_ranks(lat.whole) == (4, 4, 0),
              "octahedron: level ranks")
    for h in lat.subgroups:
        hom = [(q.free_rank, tuple(q.torsion)) for q in c.homology(h)]
        ref = simplicial_homology(fixed_subcomplex(octa, h).simplices)
        ref += [(0, ())] * (len(hom) - len(ref))
        res.check(hom == ref, f"octahedron: homology at {_sub(h)}")
    sq = antipodal_square(lat)
    res.check(equivariant_euler_class(sq).coeffs == (0, 0) and euler_marks(sq) == (0, 0), "antipodal circle")
    for name, g in _groups(groups or ("C2", "S3", "D4"), max_order):
        pt = point_complex(g.lattice)
        n = len(g.lattice.relative(g.lattice.whole))
        res.check(equivariant_euler_class(pt).coeffs == (0,) * (n - 1) + (1,), f"{name}: point")
    names = [n for n, _ in _groups(groups or ("C2", "C3", "S3", "C2xC2", "C4"), max_order)]
    for t in range(transfers):
        lat = build_group(names[t % len(names)]).lattice
        k = rng.choice(lat.subgroups)
        h = rng.choice(lat.subgroups_of(k))
        y = random_complex(lat, rng, universe=h, max_vertices=6, max_simplices=3)
        res.check(transfer_identity(y, k).ok, f"transfer {t}: H={_sub(h)} K={_sub(k)}")
    return res


# -- 10: Merling comparison -------------------------------------------------------------------------------

def suite_merling(groups=None, max_order=8, seed=0, trials: int = 50) -> SuiteResult:
    res = SuiteResult("merling", 10)
    rng = random.Random(seed)
    for name, g in _groups(groups, max_order):
        lat = g.lattice
        rings = _rings(lat)
        for t in range(trials):
            s = rings[t % len(rings)]
            tw = level_twisted_ring(s, lat.trivial)
            q = random_twisted_idempotent(tw, rng.randint(1, 2), rng, twisted_idempotents(tw))
            v, _ = presentation_module(tw, q)
            m = merling_Phi(s, v)
            fv, torsion = merling_F(m)
            same = not torsion and all(np.array_equal(a, b) for a, b in zip(fv.action, v.action))
            res.check(same and not m.violations(), f"{name} trial {t}: F∘Φ != id")
            _, q2, agree = merling_F_projective(phi_lift(s, 0, q))
            res.check(agree and np.array_equal(q2, q), f"{name} trial {t}: F(P) not idempotent-presented")
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "doublecoset": suite_doublecoset,
    "frobenius": suite_frobenius,
    "spans": suite_spans,
    "splitting": suite_splitting,
    "phi": suite_phi,
    "burnside": suite_burnside,
    "twisted": suite_twisted,
    "extension": suite_extension,
    "geometry": suite_geometry,
    "merling": suite_merling,
}


def run_suite(name: str, **kwargs) -> SuiteResult:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    t0 = time.perf_counter()
    res = SUITES[name](**kwargs)
    res.seconds = time.perf_counter() - t0
    return res


__all__ = ["SuiteResult", "SUITES", "SUITE_GROUPS", "run_suite"] + [f.__name__ for f in SUITES.values()]
