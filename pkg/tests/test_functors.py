import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from equik.coeff import CoefficientError, FreeSystem, constant_system, free_system, identity_morphism
from equik.functors import (adjunction_witness, composition_iso, conjugate_system, conjugation_iso, counit,
                            coproduct_iso, double_coset_iso, double_coset_target, frobenius_iso,
                            induce_system, normal_form_iso, restrict_system, span_functor, systems_equal,
                            two_cell_transform)
from equik.groups import build_group
from equik.gsets import canonical_orbit, empty_gset, gsets_with_orbits, orbit_gset, orbit_map
from equik.spans import (identity_2cell, make_2cell, make_span, random_2cell, random_span, transfer_span,
                         two_cell_compose, unit_span)

SMALL = ("C2", "C3", "C4", "C2xC2", "S3", "D4", "Q8")


def lat_of(name):
    return build_group(name).lattice


def fixed_left_cosets(mult, k, l, j):
    """Cosets ``xL`` with ``x`` in ``K`` fixed by left multiplication by all of ``J``."""
    cosets = {frozenset(mult[x][y] for y in l) for x in k}
    return sum(1 for c in cosets if all(frozenset(mult[a][y] for y in c) == c for a in j))


def test_restriction_examples():
    s3 = lat_of("S3")
    m = free_system(canonical_orbit(s3, s3.reps[1]))            # A_{S3/C2}
    r = restrict_system(m, s3.reps[2])                           # to C3
    assert (r.rank(s3.trivial), r.rank(s3.reps[2])) == (3, 0)
    assert restrict_system(m, s3.whole) is m


def test_induction_examples():
    c2 = lat_of("C2")
    e, g = c2.trivial, c2.whole
    m = FreeSystem(orbit_gset(c2, [e, e], universe=e))           # Z^2 over the trivial group
    i = induce_system(m, g)
    assert (i.rank(e), i.rank(g)) == (4, 0)
    s3 = lat_of("S3")
    c = s3.reps[1]
    lhs = induce_system(free_system(canonical_orbit(s3, c, c)), s3.whole)
    rhs = free_system(canonical_orbit(s3, c))
    assert all(lhs.rank(l) == rhs.rank(l) for l in s3.subgroups)


@pytest.mark.parametrize("name", SMALL)
def test_induced_free_ranks_brute(name):
    g = build_group(name)
    lat = g.lattice
    for k in lat.subgroups:
        for h in lat.subgroups_of(k):
            for l in lat.subgroups_of(h):
                ind = induce_system(free_system(canonical_orbit(lat, l, h)), k)
                for j in lat.subgroups_of(k):
                    assert ind.rank(j) == fixed_left_cosets(g.mult, k.elements, l.elements, j.elements)


def test_conjugation_examples():
    s3 = lat_of("S3")
    c = s3.subgroup([0, 1])
    m = free_system(canonical_orbit(s3, s3.trivial, c))
    r = next(x for x in range(6) if s3.group.element_order(x) == 3)
    cm = conjugate_system(m, r)
    assert cm.universe == s3.conjugate(c, r) != c
    assert sorted(cm.rank(l) for l in cm.levels()) == sorted(m.rank(l) for l in m.levels())
    # c_h for h in H is canonically isomorphic to the identity
    f = conjugation_iso(m, 1)
    assert f.is_iso() and f.is_natural()


@given(st.sampled_from(SMALL), st.data())
@settings(max_examples=25)
def test_conjugation_composes(name, data):
    lat = lat_of(name)
    g = lat.group
    h = data.draw(st.sampled_from(lat.subgroups))
    x, y = data.draw(st.integers(0, g.order - 1)), data.draw(st.integers(0, g.order - 1))
    m = free_system(canonical_orbit(lat, lat.trivial, h))
    assert systems_equal(conjugate_system(conjugate_system(m, x), y), conjugate_system(m, g.mul(x, y)))


def test_frobenius_examples():
    c2 = lat_of("C2")
    e = c2.trivial
    m = free_system(canonical_orbit(c2, e))
    n = constant_system(c2, e)
    f = frobenius_iso(m, n)
    assert f.source.rank(e) == f.target.rank(e) == 4
    assert f.is_iso() and f.is_natural()
    z = frobenius_iso(m, FreeSystem(empty_gset(c2, e)))
    assert z.source.is_zero() and z.target.is_zero()


def test_double_coset_examples():
    s3 = lat_of("S3")
    c = s3.subgroup([0, 1])
    m = constant_system(s3, c)
    t = double_coset_target(m, s3.whole, c)
    assert t.rank(s3.trivial) == 3
    assert sorted(p.rank(s3.trivial) for p in t.parts) == [1, 2]
    assert double_coset_iso(s3.whole, c, c, m).is_iso()
    c4 = lat_of("C4")
    h = c4.reps[1]
    t = double_coset_target(constant_system(c4, h), c4.whole, h)
    assert len(t.parts) == 2 and all(p.universe == h for p in t.parts)
    with pytest.raises(CoefficientError):
        double_coset_iso(s3.whole, c, c, constant_system(s3))


@given(st.sampled_from(SMALL), st.data())
@settings(max_examples=30)
def test_double_coset_iso_random(name, data):
    lat = lat_of(name)
    k = data.draw(st.sampled_from(lat.subgroups))
    j = data.draw(st.sampled_from(lat.subgroups_of(k)))
    h = data.draw(st.sampled_from(lat.subgroups_of(k)))
    x = data.draw(st.sampled_from(gsets_with_orbits(lat, 2, j)))
    f = double_coset_iso(k, j, h, FreeSystem(x))
    assert f.is_iso() and f.is_natural()


def test_counit_is_fold():
    c2 = lat_of("C2")
    e, g = c2.trivial, c2.whole
    m = free_system(canonical_orbit(c2, e))
    eps = counit(m, e)
    assert eps.at(e).shape == (2, 4)
    assert np.array_equal(np.abs(eps.at(e)).sum(axis=1), [2, 2])
    assert eps.is_natural()
    ident = counit(m, g)
    assert ident.is_iso()


@pytest.mark.parametrize("name,chain", [("C2", (0, 1, 1)), ("S3", (0, 2, 3)), ("D4", (0, 1, 7))])
def test_adjunction_witness(name, chain):
    lat = lat_of(name)
    a, b, c = (lat.reps[i] for i in chain)
    if not a <= b:
        b = next(s for s in lat.subgroups if a <= s and s.order == b.order)
    w = adjunction_witness(lat, a, b, c)
    assert w.ok, w.failures


def test_span_functor_examples():
    c2 = lat_of("C2")
    e, g = c2.trivial, c2.whole
    z = constant_system(c2)
    assert span_functor(unit_span(c2, g), z) is z
    p = span_functor(transfer_span(c2, e, g), constant_system(c2, e))
    assert (p.rank(e), p.rank(g)) == (2, 0)
    w = make_span(c2, g, g, canonical_orbit(c2, e), [0, 0], [0, 0])
    pw = span_functor(w, z)
    assert (pw.rank(e), pw.rank(g)) == (2, 0)
    assert normal_form_iso(w, z).is_iso()
    # the quotient 2-cell G/e -> G/G gives the fold I R (Z) -> Z
    cell = make_2cell(w, unit_span(c2, g), orbit_map(c2, e, g).image)
    fold = two_cell_transform(cell, z, False)
    assert np.array_equal(fold.at(e), [[1, 1]])
    assert two_cell_transform(identity_2cell(w), z, False).equals(identity_morphism(span_functor(w, z, False)))


@given(st.sampled_from(SMALL), st.integers(0, 10**6))
@settings(max_examples=25)
def test_span_functor_coherence(name, seed):
    lat = lat_of(name)
    rng = random.Random(seed)
    h, k, l = (rng.choice(lat.subgroups) for _ in range(3))
    w1, w1b = random_span(lat, h, k, rng, 8), random_span(lat, h, k, rng, 8)
    w2 = random_span(lat, k, l, rng, 8)
    m = FreeSystem(orbit_gset(lat, [rng.choice(lat.subgroups_of(h))], universe=h))
    for f in (composition_iso(w1, w2, m), coproduct_iso(w1, w1b, m), normal_form_iso(w1, m)):
        assert f.is_iso() and f.is_natural()


@given(st.sampled_from(SMALL), st.integers(0, 10**6))
@settings(max_examples=25)
def test_two_cells_compose_as_matrices(name, seed):
    lat = lat_of(name)
    rng = random.Random(seed)
    h, k = rng.choice(lat.subgroups), rng.choice(lat.subgroups)
    w = random_span(lat, h, k, rng, 8).materialize()
    a = random_2cell(w, rng)
    b = random_2cell(a.target, rng)
    m = constant_system(lat, h)
    lhs = two_cell_transform(two_cell_compose(a, b), m, False)
    rhs = two_cell_transform(b, m, False).compose(two_cell_transform(a, m, False))
    assert lhs.equals(rhs)
