import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from equik.coeff import (BoxProduct, CoeffMorphism, TableSystem, ZeroSystem, box_morphism, catalog_grings,
                         constant_ring, constant_system, direct_sum, fp_system, free_system, gmap_morphism,
                         group_ring_gring, group_ring_system, hom_system, identity_morphism,
                         permutation_gring, validate_system)
from equik.groups import build_group, cyclic_group
from equik.gsets import canonical_orbit, empty_gset, orbit_gset, product, random_gmap

SMALL = ("C2", "C3", "C4", "C2xC2", "C6", "S3", "D4", "Q8")


def lat_of(name):
    return build_group(name).lattice


@st.composite
def gsets(draw, max_orbits=2, names=SMALL):
    lat = lat_of(draw(st.sampled_from(names)))
    k = draw(st.integers(0, max_orbits))
    return orbit_gset(lat, [draw(st.sampled_from(lat.subgroups)) for _ in range(k)])


def ranks_by_class(m):
    return tuple(m.rank(h) for h in m.lattice.relative(m.universe).reps)


def test_free_system_examples():
    c2 = lat_of("C2")
    assert ranks_by_class(free_system(canonical_orbit(c2, c2.trivial))) == (2, 0)
    assert free_system(empty_gset(c2)).is_zero()
    assert validate_system(constant_system(c2)).ok
    assert validate_system(constant_ring(c2)).ok


@given(gsets(max_orbits=3))
def test_free_systems_are_functors(x):
    m = free_system(x)
    assert validate_system(m).ok
    for l in m.levels():
        assert m.rank(l) == len(x.fixed_points(l))


@given(gsets(), st.data())
def test_box_product_of_free_is_free_on_product(x, data):
    lat = x.lattice
    y = orbit_gset(lat, [data.draw(st.sampled_from(lat.subgroups))])
    b = BoxProduct(free_system(x), free_system(y))
    p = free_system(product(x, y)[0])
    # pairs are enumerated lexicographically on both sides, so the iso is the identity matrix
    for l in b.levels():
        assert b.rank(l) == p.rank(l)
    for l in b.levels():
        for l2 in b.levels():
            if l <= l2:
                assert np.array_equal(b.mat(l, l2), p.mat(l, l2))
    assert BoxProduct(ZeroSystem(lat, lat.whole), free_system(x)).is_zero()


def test_fixed_point_rings():
    c2 = lat_of("C2")
    c3 = cyclic_group(3)
    inv = [[0, 1, 2], [0, 2, 1]]
    r = fp_system(group_ring_gring(c2, c3, inv))
    assert (r.rank(c2.trivial), r.rank(c2.whole)) == (3, 2)
    assert validate_system(r).ok
    # the C2-fixed level is spanned by 1 and t + t^2
    span = r.system.basis(c2.whole)
    assert {tuple(v) for v in span.T} in ({(1, 0, 0), (0, 1, 1)}, {(1, 0, 0), (0, -1, -1)})
    swap = fp_system(permutation_gring(canonical_orbit(c2, c2.trivial)))
    assert swap.rank(c2.whole) == 1
    assert validate_system(swap).ok


@pytest.mark.parametrize("name", SMALL)
def test_catalog_rings_are_valid(name):
    lat = lat_of(name)
    for g in catalog_grings(lat):
        assert not g.violations()
        assert validate_system(fp_system(g)).ok


def test_group_ring_system_c2():
    c2 = lat_of("C2")
    e, g = c2.trivial, c2.whole
    groups = {e: cyclic_group(3), g: cyclic_group(1)}
    s = group_ring_system(c2, g, groups, {(e, g): [0]}, {(e, 1): [0, 2, 1]})
    assert (s.rank(e), s.rank(g)) == (3, 1)
    assert validate_system(s).ok
    groups = {e: cyclic_group(2), g: cyclic_group(2)}
    s = group_ring_system(c2, g, groups, {(e, g): [0, 1]}, {(e, 1): [0, 1]})
    assert validate_system(s).ok and s.rank(g) == 2


def test_validation_catches_broken_maps():
    c2 = lat_of("C2")

    def mat(l, l2, a):
        return [[2]] if (l != l2 or a) else [[1]]
    bad = TableSystem(c2, c2.whole, lambda l: 1, mat)
    assert not validate_system(bad).ok


def test_hom_examples():
    c2 = lat_of("C2")
    a = free_system(canonical_orbit(c2, c2.trivial))
    assert len(hom_system(a, a)) == 2
    assert hom_system(free_system(empty_gset(c2)), a) == []


@given(gsets(max_orbits=2), gsets(max_orbits=2))
def test_hom_rank_is_yoneda(x, y):
    if x.lattice is not y.lattice:
        y = orbit_gset(x.lattice, [x.lattice.whole])
    basis = hom_system(free_system(x), free_system(y))
    expected = sum(len(y.fixed_points(x.stabilizer(m))) for m in x.orbit_minima)
    assert len(basis) == expected
    assert all(f.is_natural() for f in basis)


@given(gsets(max_orbits=2), st.integers(0, 10**6))
def test_gmap_morphisms_are_functorial(x, seed):
    rng = random.Random(seed)
    lat = x.lattice
    y = orbit_gset(lat, [rng.choice(lat.subgroups)])
    z = orbit_gset(lat, [lat.whole, rng.choice(lat.subgroups)])
    f, g = random_gmap(x, y, rng), random_gmap(y, z, rng)
    if f is None or g is None:
        return
    ff, gg = gmap_morphism(f), gmap_morphism(g)
    assert ff.is_natural() and gg.is_natural()
    assert gmap_morphism(g.compose(f)).equals(gg.compose(ff))
    ib = box_morphism(ff, identity_morphism(free_system(z)))
    assert ib.is_natural()


def test_morphism_algebra():
    c2 = lat_of("C2")
    m = free_system(orbit_gset(c2, [c2.trivial, c2.whole]))
    i = identity_morphism(m)
    assert i.is_iso() and i.is_idempotent() and i.inverse().equals(i)
    assert (i - i).is_zero()
    d = direct_sum([m, m])
    assert ranks_by_class(d) == (6, 2)
    two = CoeffMorphism(m, m, {l.index: 2 * i.at(l) for l in m.levels()})
    assert not two.is_iso()
