import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from equik.groups import build_group
from equik.gsets import (BurnsideElement, GSetError, basis_element, burnside_class, burnside_from_marks,
                         burnside_mul, canonical_orbit, coproduct, empty_gset, find_isomorphism,
                         gset_from_census, gset_from_generators, gset_from_table, identity_map, mark_vector,
                         orbit_decomposition, orbit_gset, orbit_map, product, pullback_over, random_gmap,
                         table_of_marks)

from oracles import action_orbits, fixed_cosets, left_cosets

SMALL = ("C2", "C3", "C4", "C2xC2", "C6", "S3", "D4", "Q8", "D6", "A4")


def lat_of(name):
    return build_group(name).lattice


@st.composite
def gsets(draw, names=SMALL, max_orbits=3):
    lat = lat_of(draw(st.sampled_from(names)))
    k = draw(st.integers(0, max_orbits))
    hs = [draw(st.sampled_from(lat.subgroups)) for _ in range(k)]
    return orbit_gset(lat, hs)


def test_orbit_examples():
    lat = lat_of("C2")
    x = canonical_orbit(lat, lat.whole)
    assert x.size == 1 and x.fixed_points(lat.whole) == [0]
    s3 = lat_of("S3")
    c2 = s3.subgroup([0, 1])
    y = canonical_orbit(s3, c2)
    assert y.size == 3 and len(y.orbit_minima) == 1
    assert len(y.fixed_points(c2)) == 1
    c4 = lat_of("C4")
    z = canonical_orbit(c4, c4.reps[1])
    assert z.size == 2 and len(z.fixed_points(c4.reps[1])) == 2


@pytest.mark.parametrize("name", SMALL)
def test_canonical_orbits_against_cosets(name):
    g = build_group(name)
    lat = g.lattice
    for h in lat.subgroups:
        x = canonical_orbit(lat, h)
        assert x.size == len(left_cosets(g.mult, h.elementset))
        assert not x.validate()
        for k in lat.subgroups:
            assert len(x.fixed_points(k)) == fixed_cosets(g.mult, h.elementset, k.elementset)


def test_pullback_examples():
    c2 = lat_of("C2")
    ge, pt = canonical_orbit(c2, c2.trivial), canonical_orbit(c2, c2.whole)
    q = orbit_map(c2, c2.trivial, c2.whole)
    p, _, _ = pullback_over(q, q)
    assert p.size == 4 and orbit_decomposition(p).census == (2, 0)
    s3 = lat_of("S3")
    c = s3.subgroup([0, 1])
    q = orbit_map(s3, c, s3.whole)
    p, _, _ = pullback_over(q, q)
    assert p.size == 9 and orbit_decomposition(p).census == (1, 1, 0, 0)
    # pullback of identities is the diagonal
    d, _, _ = pullback_over(identity_map(ge), identity_map(ge))
    assert find_isomorphism(d, ge) is not None
    assert pt.size == 1


@given(gsets(), st.data())
def test_pullback_brute(x, data):
    lat = x.lattice
    y = orbit_gset(lat, [data.draw(st.sampled_from(lat.subgroups))])
    b = orbit_gset(lat, [lat.whole])
    rng = random.Random(data.draw(st.integers(0, 10**6)))
    f, g = random_gmap(x, b, rng), random_gmap(y, b, rng)
    p, pa, pc = pullback_over(f, g)
    pairs = {(a, c) for a in range(x.size) for c in range(y.size) if f(a) == g(c)}
    assert p.size == len(pairs)
    assert {(pa(i), pc(i)) for i in range(p.size)} == pairs
    assert not p.validate() and not pa.validate() and not pc.validate()


@given(gsets())
def test_orbit_decomposition_brute(x):
    orbits = action_orbits(x.action, x.universe.elements, x.size)
    dec = orbit_decomposition(x)
    assert sorted(sorted(o.members) for o in dec.orbits) == sorted(orbits)
    assert sum(dec.census) == len(orbits)
    assert not dec.iso.validate()
    assert sorted(dec.iso.image) == list(range(x.size))


def test_census_examples():
    c2 = lat_of("C2")
    x = gset_from_table(c2, [[0, 1, 2], [0, 1, 2]])
    assert orbit_decomposition(x).census == (0, 3)
    for name in SMALL:
        lat = lat_of(name)
        for i, h in enumerate(lat.reps):
            assert orbit_decomposition(canonical_orbit(lat, h)).census == tuple(int(j == i) for j in range(len(lat.reps)))


def test_marks_tables():
    c2 = table_of_marks(lat_of("C2"))
    assert c2.matrix == ((2, 0), (1, 1))          # rows [C2/e], [C2/C2]
    assert table_of_marks(lat_of("trivial")).matrix == ((1,),)
    s3 = table_of_marks(lat_of("S3")).as_array()
    assert [row[0] for row in s3] == [6, 3, 2, 1]
    assert np.array_equal(s3, np.tril(s3))


@pytest.mark.parametrize("name", SMALL)
def test_marks_triangular_and_brute(name):
    g = build_group(name)
    lat = g.lattice
    t = table_of_marks(lat).as_array()
    assert np.array_equal(t, np.tril(t))
    assert all(t[i, i] > 0 for i in range(len(t)))
    for i, h in enumerate(lat.reps):
        for j, k in enumerate(lat.reps):
            assert t[i, j] == fixed_cosets(g.mult, h.elementset, k.elementset)


def test_burnside_examples():
    t = table_of_marks(lat_of("C2"))
    assert burnside_from_marks(t, [2, 0]).coeffs == (1, 0)
    assert burnside_from_marks(t, [4, 0]).coeffs == (2, 0)
    for name in SMALL:
        tt = table_of_marks(lat_of(name))
        assert burnside_from_marks(tt, [1] * tt.size) == basis_element(tt, tt.size - 1)
    with pytest.raises(GSetError):
        burnside_from_marks(t, [1, 0])
    ge = basis_element(t, 0)
    assert (ge * ge).coeffs == (2, 0)
    s3 = table_of_marks(lat_of("S3"))
    assert burnside_mul(basis_element(s3, 2), basis_element(s3, 1)).coeffs == (1, 0, 0, 0)


@given(st.sampled_from(SMALL), st.data())
def test_burnside_roundtrip(name, data):
    t = table_of_marks(lat_of(name))
    coeffs = tuple(data.draw(st.lists(st.integers(-5, 5), min_size=t.size, max_size=t.size)))
    x = BurnsideElement(t, coeffs)
    assert burnside_from_marks(t, x.marks()) == x


@given(gsets(max_orbits=2), st.data())
def test_product_is_multiplication(x, data):
    lat = x.lattice
    y = orbit_gset(lat, [data.draw(st.sampled_from(lat.subgroups))])
    p, _, _ = product(x, y)
    assert mark_vector(p) == tuple(a * b for a, b in zip(mark_vector(x), mark_vector(y)))
    assert burnside_class(p) == burnside_class(x) * burnside_class(y)


@given(gsets(max_orbits=3), st.integers(0, 10**6))
def test_isomorphism_iff_equal_marks(x, seed):
    lat = x.lattice
    rng = random.Random(seed)
    perm = list(range(x.size))
    rng.shuffle(perm)
    inv = {p: i for i, p in enumerate(perm)}
    rows = [None if row is None else [perm[row[inv[v]]] for v in range(x.size)] for row in x.action]
    y = gset_from_table(lat, rows, x.universe)
    f = find_isomorphism(x, y)
    assert f is not None and not f.validate()
    assert mark_vector(x) == mark_vector(y)
    z = gset_from_census(lat, orbit_decomposition(x).census)
    assert find_isomorphism(x, z) is not None


def test_generators_and_errors():
    c4 = lat_of("C4")
    x = gset_from_generators(c4, {1: [1, 2, 3, 0]}, 4)
    assert orbit_decomposition(x).census == (1, 0, 0)
    with pytest.raises(GSetError):
        gset_from_generators(c4, {1: [1, 2, 0, 3]}, 4)     # order 3 image cannot come from C4
    with pytest.raises(GSetError):
        gset_from_table(c4, [[0, 1], [1, 0], [0, 0], [1, 0]])
    with pytest.raises(GSetError):
        coproduct()
    assert empty_gset(c4).size == 0
