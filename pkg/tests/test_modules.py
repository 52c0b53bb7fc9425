import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from equik import lattice as zl
from equik.coeff import catalog_grings, constant_ring, fp_system, identity_morphism
from equik.groups import build_group
from equik.gsets import canonical_orbit, empty_gset, orbit_gset
from equik.modules import (NotProjectiveError, PerfectComplex, ProjectiveModule, evaluate_level,
                           extension_of_scalars_check, free_module, free_projective, group_ring_tensor,
                           hom_rank, hom_space, isotropy_split, k0_class_vector, level_twisted_ring, merling_F,
                           merling_F_projective, merling_Phi, perfect_invariants, phi_hom_identification, phi_lift,
                           presentation_module, projective_from_quotient, random_gset, random_idempotent,
                           random_twisted_idempotent, twisted_idempotents, twisted_s3_iso, zero_class_vector)

SMALL = ("C2", "C3", "C4", "C2xC2", "S3")


def lat_of(name):
    return build_group(name).lattice


def rings(lat):
    return [constant_ring(lat)] + [fp_system(r) for r in catalog_grings(lat)[1:]]


def c2_setup():
    c2 = lat_of("C2")
    return c2, constant_ring(c2), c2.trivial, c2.whole


def test_free_module_examples():
    c2, s, e, g = c2_setup()
    f = free_module(s, canonical_orbit(c2, e))
    assert (f.rank(e), f.rank(g)) == (2, 0)
    pt = free_module(s, canonical_orbit(c2, g))
    assert (pt.rank(e), pt.rank(g)) == (1, 1)
    assert free_projective(s, empty_gset(c2)).is_zero()


def test_hom_examples():
    c2, s, e, g = c2_setup()
    free = free_projective(s, canonical_orbit(c2, e))
    pt = free_projective(s, canonical_orbit(c2, g))
    assert hom_rank(free, free) == 2
    assert hom_rank(pt, pt) == 1
    assert hom_rank(free_projective(s, empty_gset(c2)), free) == 0
    r = fp_system(catalog_grings(c2)[-1])                    # Z[C3] with inversion
    assert hom_rank(free_projective(r, canonical_orbit(c2, g)), free_projective(r, canonical_orbit(c2, g))) \
        == r.rank(g) == 2


@pytest.mark.parametrize("name", SMALL)
def test_hom_from_orbit_is_fixed_level(name):
    lat = lat_of(name)
    for s in rings(lat):
        top = free_projective(s, canonical_orbit(lat, lat.whole))
        for h in lat.relative(lat.whole).reps:
            assert hom_rank(free_projective(s, canonical_orbit(lat, h)), top) == s.rank(h)


def test_split_example():
    c2, s, e, g = c2_setup()
    p = free_projective(s, orbit_gset(c2, [e, g]))
    res = isotropy_split(p, 1)
    assert (res.sub.rank(e), res.sub.rank(g)) == (1, 1)
    assert (res.quotient.rank(e), res.quotient.rank(g)) == (2, 0)
    assert res.retraction.is_idempotent()
    with pytest.raises(NotProjectiveError):
        isotropy_split(p, 0)
    whole = free_projective(s, canonical_orbit(c2, e))
    assert isotropy_split(whole, 0).quotient.is_zero()


def test_non_projective_quotient_is_rejected():
    # Z at the top, 0 at the bottom: S_{C2/C2} modulo its whole e-level
    c2, s, e, g = c2_setup()
    with pytest.raises(NotProjectiveError):
        projective_from_quotient(s, canonical_orbit(c2, g), {e.index: np.array([[1]])})


def test_k0_examples():
    c2, s, e, g = c2_setup()
    p = free_projective(s, orbit_gset(c2, [e, g]))
    v = k0_class_vector(p)
    assert v.zranks() == (2, 1) and v.augranks() == (1, 1)
    assert v.reduced() == (0, 0)
    assert k0_class_vector(p.direct_sum(p)) == v + v
    assert k0_class_vector(free_projective(s, empty_gset(c2))) == zero_class_vector(s)


@given(st.sampled_from(SMALL), st.integers(0, 10**6))
@settings(max_examples=20)
def test_k0_additive_on_random_projectives(name, seed):
    lat = lat_of(name)
    rng = random.Random(seed)
    s = rng.choice(rings(lat))
    x, y = random_gset(lat, rng, 2, max_size=8), random_gset(lat, rng, 2, max_size=8)
    p = ProjectiveModule(s, x, random_idempotent(s, x, rng))
    q = ProjectiveModule(s, y, random_idempotent(s, y, rng))
    assert k0_class_vector(p.direct_sum(q)) == k0_class_vector(p) + k0_class_vector(q)


def test_twisted_ring_examples():
    s3 = build_group("S3")
    t = level_twisted_ring(constant_ring(s3.lattice), s3.lattice.trivial)
    assert t.dim == 6 and not t.violations()
    assert np.array_equal(t.tensor, group_ring_tensor(s3))
    tw, grp, iso = twisted_s3_iso()
    assert tw.dim == 6 and not tw.violations()
    assert iso is not None and zl.is_unimodular(iso)
    c3 = lat_of("C3")
    assert level_twisted_ring(constant_ring(c3), c3.whole).dim == 1


def test_evaluate_and_phi_examples():
    c2, s, e, g = c2_setup()
    ev = evaluate_level(free_projective(s, canonical_orbit(c2, e)), 0)
    t = ev.ring
    assert t.dim == 2 and ev.module.rank == 2
    assert np.array_equal(ev.presentation, t.unit.reshape(1, 1, -1))
    assert evaluate_level(free_projective(s, canonical_orbit(c2, e)), 1).module.rank == 0
    one = phi_lift(s, 0, t.unit.reshape(1, 1, -1))
    assert (one.rank(e), one.rank(g)) == (2, 0)
    zero = phi_lift(s, 0, np.zeros((1, 1, 2), dtype=np.int64))
    assert zero.is_zero()
    q = np.zeros((2, 2, 2), dtype=np.int64)
    q[0, 0] = q[0, 1] = t.unit
    p = phi_lift(s, 0, q)
    assert (p.rank(e), p.rank(g)) == (2, 0)
    assert np.array_equal(evaluate_level(p, 0).presentation, q)
    with pytest.raises(NotProjectiveError):
        phi_lift(s, 0, 2 * t.unit.reshape(1, 1, -1))


@given(st.sampled_from(SMALL), st.integers(0, 10**6))
@settings(max_examples=20)
def test_phi_round_trip_and_hom(name, seed):
    lat = lat_of(name)
    rng = random.Random(seed)
    s = rng.choice(rings(lat))
    rel = lat.relative(lat.whole)
    i = rng.randrange(len(rel))
    t = level_twisted_ring(s, rel.reps[i])
    q = random_twisted_idempotent(t, rng.randint(1, 2), rng, twisted_idempotents(t))
    assert np.array_equal(evaluate_level(phi_lift(s, i, q), i).presentation, q)
    x = random_gset(lat, rng, 2, max_size=8)
    hid = phi_hom_identification(s, i, q, ProjectiveModule(s, x, random_idempotent(s, x, rng)))
    assert hid.ok


def test_merling_examples():
    c2, s, e, g = c2_setup()
    fv, torsion = merling_F(free_module(s, canonical_orbit(c2, g)))
    assert fv.rank == 0 and not torsion
    t = level_twisted_ring(s, e)
    v, _ = presentation_module(t, t.unit.reshape(1, 1, -1))
    back, torsion = merling_F(merling_Phi(s, v))
    assert back.rank == v.rank == 2 and not torsion
    assert all(np.array_equal(a, b) for a, b in zip(back.action, v.action))
    _, q, agree = merling_F_projective(free_projective(s, canonical_orbit(c2, e)))
    assert agree and np.array_equal(q, t.unit.reshape(1, 1, -1))


@pytest.mark.parametrize("name", ("C2", "C3", "S3"))
def test_extension_of_scalars(name):
    lat = lat_of(name)
    rng = random.Random(7)
    for s in rings(lat):
        for h in lat.subgroups:
            sh = s.restrict(h)
            x = random_gset(lat, rng, 2, universe=h, max_size=4)
            chk = extension_of_scalars_check(s, free_module(sh, x))
            assert chk.ok, chk


def _fold_complex():
    c2, s, e, g = c2_setup()
    src, dst = free_module(s, canonical_orbit(c2, e)), free_module(s, canonical_orbit(c2, g))
    space = hom_space(src, dst)
    fold = space.morphism(np.array([1]))
    return c2, s, PerfectComplex([free_projective(s, dst.gset), free_projective(s, src.gset)], [fold])


def test_perfect_complex_examples():
    c2, s, e, g = c2_setup()
    p = free_projective(s, orbit_gset(c2, [e, g]))
    ident = PerfectComplex([p, p], [identity_morphism(p.free.system)])
    inv = perfect_invariants(ident)
    assert all(h.is_zero for hs in inv.homology.values() for h in hs)
    assert inv.euler == zero_class_vector(s)
    single = perfect_invariants(PerfectComplex([p], []))
    assert single.euler == k0_class_vector(p)
    c2, s, fold = _fold_complex()
    inv = perfect_invariants(fold)
    # level e: Z <- Z^2 by (1, 1); level C2: Z <- 0
    assert [(h.free_rank, h.torsion) for h in inv.homology[e.index]] == [(0, ()), (1, ())]
    assert [(h.free_rank, h.torsion) for h in inv.homology[g.index]] == [(1, ()), (0, ())]
    assert inv.bounded == [False, True]
