import random

import pytest
from hypothesis import given, settings, strategies as st

from equik.gcw import (ComplexError, antipodal_square, barycentric_subdivide, component_rank_vector,
                       equivariant_chain_complex, equivariant_euler_class, euler_marks, fixed_subcomplex,
                       linearization_components, load_complex, make_complex, octahedron_c2, orbit_complex,
                       point_complex, random_complex, simplicial_homology, swap_edge, transfer_identity)
from equik.groups import build_group
from equik.gsets import empty_gset, gset_from_generators

GROUPS = ("C2", "C3", "C4", "C2xC2", "S3")


def lat_of(name):
    return build_group(name).lattice


def brute_fixed_euler(x, h):
    """χ of the subcomplex of simplices fixed vertexwise by ``h``."""
    return sum((-1) ** (len(s) - 1) for s in x.simplices
               if all(x.vertices.action[g][v] == v for g in h.elements for v in s))


def test_point():
    for name in ("C2", "S3", "D4"):
        lat = lat_of(name)
        pt = point_complex(lat)
        n = len(lat.reps)
        assert equivariant_euler_class(pt).coeffs == (0,) * (n - 1) + (1,)
        assert component_rank_vector(pt) == (0,) * (n - 1) + (1,)
        c = equivariant_chain_complex(pt)
        assert all(c.level_ranks(h) == (1,) for h in lat.subgroups)


def test_octahedron():
    lat = lat_of("C2")
    e, g = lat.trivial, lat.whole
    x = octahedron_c2(lat)
    assert x.is_admissible()
    c = equivariant_chain_complex(x)
    assert c.level_ranks(g) == (4, 4, 0)
    assert c.level_ranks(e) == (6, 12, 8)
    assert fixed_subcomplex(x, g).euler == 0 and fixed_subcomplex(x, e).euler == 2
    assert simplicial_homology(fixed_subcomplex(x, g).simplices) == [(1, ()), (1, ())]
    assert euler_marks(x) == (2, 0)
    assert equivariant_euler_class(x).coeffs == (1, 0)
    assert component_rank_vector(x) == linearization_components(x) == (1, 0)


def test_antipodal_circle_and_swap_edge():
    lat = lat_of("C2")
    sq = antipodal_square(lat)
    assert fixed_subcomplex(sq, lat.whole).simplices == ()
    assert euler_marks(sq) == (0, 0) and equivariant_euler_class(sq).coeffs == (0, 0)
    edge = swap_edge(lat)
    assert not edge.is_admissible()
    sub = barycentric_subdivide(edge)
    assert sub.is_admissible()
    assert sub.simplex_counts() == (3, 2)
    assert [len(s) for s in fixed_subcomplex(sub, lat.whole).simplices] == [1]
    verts = gset_from_generators(lat, {1: [1, 0]}, 2)
    with pytest.raises(ComplexError):
        load_complex(verts, [(0, 1)])
    with pytest.raises(ComplexError):
        make_complex(verts, [(0, 1)])                   # faces missing
    assert barycentric_subdivide(make_complex(empty_gset(lat), [])).simplices == ()


def test_discrete_free_orbits():
    lat = lat_of("C2")
    x = orbit_complex(lat, [lat.trivial, lat.trivial])
    assert component_rank_vector(x) == (2, 0)
    assert equivariant_euler_class(x).coeffs == (2, 0)


@given(st.sampled_from(GROUPS), st.integers(0, 10**6))
@settings(max_examples=30)
def test_marks_of_euler_class_are_fixed_euler_numbers(name, seed):
    lat = lat_of(name)
    x = random_complex(lat, random.Random(seed), max_vertices=6, max_simplices=3)
    assert x.is_admissible()
    cls = equivariant_euler_class(x)
    assert cls.marks() == euler_marks(x) == tuple(brute_fixed_euler(x, h) for h in lat.reps)
    assert component_rank_vector(x) == cls.coeffs == linearization_components(x)


@given(st.sampled_from(GROUPS), st.integers(0, 10**6))
@settings(max_examples=20)
def test_subdivision_keeps_fixed_euler_numbers(name, seed):
    lat = lat_of(name)
    x = random_complex(lat, random.Random(seed))
    y = barycentric_subdivide(x)
    assert y.is_admissible()
    assert euler_marks(y) == euler_marks(x)


@given(st.sampled_from(GROUPS), st.integers(0, 10**6))
@settings(max_examples=20)
def test_chain_homology_matches_fixed_points(name, seed):
    lat = lat_of(name)
    x = random_complex(lat, random.Random(seed), max_vertices=6, max_simplices=3)
    c = equivariant_chain_complex(x)
    for h in lat.subgroups:
        hom = [(q.free_rank, tuple(q.torsion)) for q in c.homology(h)]
        ref = simplicial_homology(fixed_subcomplex(x, h).simplices)
        assert hom == ref + [(0, ())] * (len(hom) - len(ref))


@given(st.sampled_from(GROUPS), st.integers(0, 10**6))
@settings(max_examples=15)
def test_transfer_identity(name, seed):
    lat = lat_of(name)
    rng = random.Random(seed)
    k = rng.choice(lat.subgroups)
    h = rng.choice(lat.subgroups_of(k))
    y = random_complex(lat, rng, universe=h, max_vertices=5, max_simplices=2)
    assert transfer_identity(y, k).ok
