import pytest
from hypothesis import given, strategies as st

from equik.groups import (CATALOG, GroupError, build_group, class_names, cyclic_group, find_isomorphism,
                          group_from_permutations, isomorphism_type)

from oracles import (all_subgroups, closure, conjugacy_classes_of_subgroups, double_cosets, normalizer)

SMALL = ("C2", "C3", "C4", "C2xC2", "C6", "S3", "D4", "Q8", "D6", "A4")

# (subgroups, classes), frozen from subset-closure enumeration in oracles.py
COUNTS = {"C2": (2, 2), "C3": (2, 2), "C4": (3, 3), "C2xC2": (5, 5), "C6": (4, 4), "S3": (6, 4),
          "D4": (10, 8), "Q8": (6, 6), "D6": (16, 10), "A4": (10, 5), "C12": (6, 6)}


def test_s3_from_generators():
    g = group_from_permutations([[1, 0, 2], [1, 2, 0]])
    assert g.order == 6 and g.is_valid()


def test_klein_from_double_transpositions():
    g = group_from_permutations([[1, 0, 3, 2], [2, 3, 0, 1]])
    assert g.order == 4
    assert find_isomorphism(g, build_group("C2xC2")) is not None
    assert find_isomorphism(g, build_group("C4")) is None


@pytest.mark.parametrize("name", CATALOG)
def test_catalog_groups_are_groups(name):
    g = build_group(name)
    assert g.is_valid()
    assert g.mult[0] == tuple(range(g.order))


@pytest.mark.parametrize("name", sorted(COUNTS))
def test_subgroup_counts(name):
    g = build_group(name)
    lat = g.lattice
    assert (len(lat), len(lat.reps)) == COUNTS[name]
    assert {s.elementset for s in lat.subgroups} == all_subgroups(g.mult)
    ref = conjugacy_classes_of_subgroups(g.mult)
    assert sorted(sorted(tuple(sorted(s)) for s in c) for c in ref) == \
        sorted(sorted(s.elements for s in c) for c in lat.classes)


@pytest.mark.parametrize("name", SMALL)
def test_class_order_is_a_filtration(name):
    lat = build_group(name).lattice
    assert lat.reps[0] == lat.trivial and lat.reps[-1] == lat.whole
    orders = [h.order for h in lat.reps]
    assert orders == sorted(orders)
    for i, a in enumerate(lat.reps):
        for j, b in enumerate(lat.reps):
            if lat.subconjugate[i][j]:
                assert i <= j
    # representatives are the least member of their class
    for c, r in zip(lat.classes, lat.reps):
        assert r.elements == min(s.elements for s in c)


def test_s3_classes_and_weyl_groups():
    lat = build_group("S3").lattice
    assert class_names(lat) == ["e", "C2", "C3", "S3"]
    c2 = lat.subgroup([0, 1])                        # <(12)>
    assert lat.weyl(c2).quotient.order == 1
    c3 = lat.reps[2]
    w = lat.weyl(c3)
    assert w.quotient.order == 2 and isomorphism_type(w.quotient) == "C2"


def test_q8_all_subgroups_normal():
    lat = build_group("Q8").lattice
    assert all(len(c) == 1 for c in lat.classes)


def test_d4_class_names():
    lat = build_group("D4").lattice
    assert class_names(lat) == ["e", "C2", "C2'", "C2''", "C4", "C2xC2", "C2xC2'", "D4"]


@pytest.mark.parametrize("name", SMALL)
def test_weyl_matches_brute_normalizer(name):
    g = build_group(name)
    lat = g.lattice
    for h in lat.subgroups:
        n = normalizer(g.mult, h.elementset)
        w = lat.weyl(h)
        assert w.normalizer.elementset == n
        assert w.quotient.order == len(n) // h.order
        assert w.quotient.is_valid()


def test_double_cosets_examples():
    lat = build_group("S3").lattice
    g = lat.whole
    d = lat.double_cosets(g, g, g)
    assert d.representatives == (0,)
    c2 = lat.subgroup([0, 1])
    d = lat.double_cosets(g, c2, c2)
    assert sorted(len(c) for c in d.cosets) == [2, 4]
    assert sorted(s.order for s in d.intersections) == [1, 2]
    lat4 = build_group("C4").lattice
    c4, h = lat4.whole, lat4.reps[1]
    d = lat4.double_cosets(c4, h, h)
    assert len(d.representatives) == 2 and all(s == h for s in d.intersections)


@pytest.mark.parametrize("name", SMALL)
def test_double_cosets_partition(name):
    g = build_group(name)
    lat = g.lattice
    for k in lat.reps:
        subs = lat.subgroups_of(k)
        for j in subs[:: max(1, len(subs) // 4)]:
            for h in subs[:: max(1, len(subs) // 3)]:
                d = lat.double_cosets(k, j, h)
                ref = double_cosets(g.mult, k.elementset, j.elementset, h.elementset)
                assert sorted(map(sorted, d.cosets)) == sorted(map(sorted, ref))
                for gamma, inter in zip(d.representatives, d.intersections):
                    jg = lat.conjugate(j, gamma)
                    assert inter.elementset == h.elementset & jg.elementset


@given(st.sampled_from(SMALL), st.data())
def test_generated_subgroup_is_closure(name, data):
    g = build_group(name)
    gens = data.draw(st.lists(st.integers(0, g.order - 1), max_size=3))
    assert g.lattice.generated(gens).elementset == closure(g.mult, gens)


@given(st.sampled_from(SMALL), st.data())
def test_conjugation_is_an_action(name, data):
    g = build_group(name)
    lat = g.lattice
    s = data.draw(st.sampled_from(lat.subgroups))
    x, y = data.draw(st.integers(0, g.order - 1)), data.draw(st.integers(0, g.order - 1))
    assert lat.conjugate(lat.conjugate(s, x), y) == lat.conjugate(s, g.mul(x, y))


@pytest.mark.parametrize("name", SMALL)
def test_isomorphism_type_roundtrip(name):
    assert isomorphism_type(build_group(name)) == name


def test_bad_input():
    with pytest.raises(GroupError):
        build_group("C13")
    with pytest.raises(GroupError):
        build_group("nope")
    with pytest.raises(GroupError):
        group_from_permutations([[0, 0, 1]])
    with pytest.raises(GroupError):
        group_from_permutations([list(range(1, 10)) + [0]])


def test_cyclic_beyond_eight_points():
    g = cyclic_group(12)
    assert g.order == 12 and g.is_valid()
    assert g.element_order(1) == 12
