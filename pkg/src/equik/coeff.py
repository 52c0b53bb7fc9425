"""Coefficient systems on orbit categories, with values in free abelian groups.

A system over a subgroup ``U`` (the *universe*) assigns a rank ``n_L`` to each
``L <= U`` and an integer matrix to each orbit-category morphism
``U/L -> U/L2, xL -> xaL2`` (which needs ``a^-1 L a <= L2``).  The matrix
``mat(L, L2, a)`` has shape ``(n_L, n_L2)``: it maps level ``L2`` to level
``L``.  Contravariance reads ``mat(L, L3, a*b) == mat(L, L2, a) @ mat(L2, L3, b)``.

``a`` only matters through the coset ``a L2``; it is canonicalised to the
least element of that coset before evaluation, and results are cached.
The Weyl action of ``n in N_U(L)`` on level ``L`` is ``mat(L, L, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from . import lattice as zl
from .groups import FiniteGroup, Subgroup, SubgroupLattice
from .gsets import GSet, canonical_orbit


class CoefficientError(ValueError):
    pass


def _zeros(r: int, c: int) -> np.ndarray:
    return np.zeros((r, c), dtype=np.int64)


def _eye(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def block_diag(blocks: Sequence[np.ndarray]) -> np.ndarray:
    r = sum(b.shape[0] for b in blocks)
    c = sum(b.shape[1] for b in blocks)
    dtype = object if any(b.dtype == object for b in blocks) else np.int64
    out = np.zeros((r, c), dtype=dtype)
    i = j = 0
    for b in blocks:
        out[i:i + b.shape[0], j:j + b.shape[1]] = b
        i += b.shape[0]
        j += b.shape[1]
    return out


# -- generating morphisms ----------------------------------------------------

def hasse_edges(lat: SubgroupLattice, u: Subgroup) -> list[tuple[Subgroup, Subgroup]]:
    cache = lat.__dict__.setdefault("_hasse_cache", {})
    if u.index not in cache:
        subs = lat.subgroups_of(u)
        edges = []
        for small in subs:
            above = [b for b in subs if small < b]
            for b in above:
                if not any(small < c < b for c in above):
                    edges.append((small, b))
        cache[u.index] = edges
    return cache[u.index]


def generating_morphisms(lat: SubgroupLattice, u: Subgroup) -> list[tuple[Subgroup, Subgroup, int]]:
    """Hasse inclusions and conjugations by generators of ``u``: together they
    generate every morphism of the orbit category of ``u``."""
    cache = lat.__dict__.setdefault("_genmor_cache", {})
    if u.index not in cache:
        out = [(a, b, 0) for a, b in hasse_edges(lat, u)]
        for s in lat.generators(u):
            for l in lat.subgroups_of(u):
                out.append((l, lat.conjugate(l, s), s))
        cache[u.index] = out
    return cache[u.index]


def all_morphisms(lat: SubgroupLattice, u: Subgroup) -> list[tuple[Subgroup, Subgroup, int]]:
    """Every morphism ``(L, L2, a)`` with ``a`` the least element of ``a L2``."""
    cache = lat.__dict__.setdefault("_allmor_cache", {})
    if u.index not in cache:
        out = []
        subs = lat.subgroups_of(u)
        for l in subs:
            for l2 in subs:
                if len(l2) % len(l):
                    continue
                for a in lat.left_cosets(u, l2):
                    if lat.conjugate(l, a) <= l2:
                        out.append((l, l2, a))
        cache[u.index] = out
    return cache[u.index]


# -- systems -----------------------------------------------------------------

class CoefficientSystem:
    """Base class; subclasses implement ``_rank`` and ``_mat``."""

    def __init__(self, lattice: SubgroupLattice, universe: Subgroup):
        self.lattice = lattice
        self.universe = universe
        self._rank_cache: dict[int, int] = {}
        self._mat_cache: dict[tuple[int, int, int], np.ndarray] = {}

    @property
    def group(self) -> FiniteGroup:
        return self.lattice.group

    def levels(self) -> list[Subgroup]:
        return self.lattice.subgroups_of(self.universe)

    def rank(self, l: Subgroup) -> int:
        r = self._rank_cache.get(l.index)
        if r is None:
            r = self._rank(l)
            self._rank_cache[l.index] = r
        return r

    def ranks(self) -> dict[Subgroup, int]:
        return {l: self.rank(l) for l in self.levels()}

    def mat(self, l: Subgroup, l2: Subgroup, a: int = 0) -> np.ndarray:
        lat = self.lattice
        a = lat.coset_rep(a, l2)
        key = (l.index, l2.index, a)
        m = self._mat_cache.get(key)
        if m is None:
            if a not in self.universe or not lat.conjugate(l, a) <= l2:
                raise CoefficientError(f"({list(l.elements)}, {list(l2.elements)}, {a}) is not an orbit morphism")
            m = self._mat(l, l2, a)
            if m.shape != (self.rank(l), self.rank(l2)):
                raise CoefficientError(f"structure map has shape {m.shape}")
            self._mat_cache[key] = m
        return m

    def res(self, l: Subgroup, l2: Subgroup) -> np.ndarray:
        return self.mat(l, l2, 0)

    def weyl(self, l: Subgroup, n: int) -> np.ndarray:
        return self.mat(l, l, n)

    def _rank(self, l: Subgroup) -> int:
        raise NotImplementedError

    def _mat(self, l: Subgroup, l2: Subgroup, a: int) -> np.ndarray:
        raise NotImplementedError

    def is_zero(self) -> bool:
        return all(self.rank(l) == 0 for l in self.levels())

    def __repr__(self):
        rk = [self.rank(l) for l in self.levels()]
        return f"{type(self).__name__}(universe={list(self.universe.elements)}, ranks={rk})"


class TableSystem(CoefficientSystem):
    """Ranks and structure maps given by callables (or precomputed dicts)."""

    def __init__(self, lattice, universe, rank: Callable[[Subgroup], int],
                 mat: Callable[[Subgroup, Subgroup, int], np.ndarray]):
        super().__init__(lattice, universe)
        self._rank_fn = rank
        self._mat_fn = mat

    def _rank(self, l):
        return self._rank_fn(l)

    def _mat(self, l, l2, a):
        return np.asarray(self._mat_fn(l, l2, a), dtype=np.int64).reshape(self.rank(l), self.rank(l2))


class GeneratedSystem(CoefficientSystem):
    """A system given on generating morphisms only.

    ``inclusions[(L, L2)]`` for Hasse edges ``L < L2`` and
    ``conjugations[(L, s)]`` for generators ``s`` of the universe (the map
    ``U/L -> U/L^s``).  Other morphisms are evaluated along canonical paths;
    :func:`validate_system` checks that the result is a functor.
    """

    def __init__(self, lattice, universe, ranks: Mapping[Subgroup, int],
                 inclusions: Mapping[tuple[Subgroup, Subgroup], np.ndarray],
                 conjugations: Mapping[tuple[Subgroup, int], np.ndarray]):
        super().__init__(lattice, universe)
        self._ranks = {l.index: int(r) for l, r in ranks.items()}
        self._inc = {(a.index, b.index): np.asarray(m, dtype=np.int64) for (a, b), m in inclusions.items()}
        self._conj = {(a.index, s): np.asarray(m, dtype=np.int64) for (a, s), m in conjugations.items()}
        self._gens = lattice.generators(universe)
        self._words = self._word_table()

    def _word_table(self) -> dict[int, tuple[int, ...]]:
        g = self.group
        words = {0: ()}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for s in self._gens:
                    y = g.mul(x, s)
                    if y not in words:
                        words[y] = words[x] + (s,)
                        nxt.append(y)
            frontier = nxt
        return words

    def _rank(self, l):
        return self._ranks.get(l.index, 0)

    def _inclusion(self, l: Subgroup, l2: Subgroup) -> np.ndarray:
        if l == l2:
            return _eye(self.rank(l))
        lat = self.lattice
        step = next(b for a, b in hasse_edges(lat, self.universe) if a == l and b <= l2)
        m = self._inc.get((l.index, step.index))
        if m is None:
            m = _zeros(self.rank(l), self.rank(step))
        return m.reshape(self.rank(l), self.rank(step)) @ self._inclusion(step, l2)

    def _conjugation(self, l: Subgroup, a: int) -> np.ndarray:
        lat = self.lattice
        out = _eye(self.rank(l))
        cur = l
        for s in self._words[a]:
            nxt = lat.conjugate(cur, s)
            m = self._conj.get((cur.index, s))
            if m is None:
                m = _zeros(self.rank(cur), self.rank(nxt))
            out = out @ m.reshape(self.rank(cur), self.rank(nxt))
            cur = nxt
        return out

    def _mat(self, l, l2, a):
        la = self.lattice.conjugate(l, a)
        return self._conjugation(l, a) @ self._inclusion(la, l2)


class FreeSystem(CoefficientSystem):
    """``A_X``: level ``L`` is free on ``X^L``; ``mat(L, L2, a)`` sends ``x`` to ``a·x``."""

    def __init__(self, x: GSet):
        super().__init__(x.lattice, x.universe)
        self.gset = x
        self._fixed: dict[int, list[int]] = {}

    def fixed(self, l: Subgroup) -> list[int]:
        f = self._fixed.get(l.index)
        if f is None:
            f = self.gset.fixed_points(l)
            self._fixed[l.index] = f
        return f

    def _rank(self, l):
        return len(self.fixed(l))

    def _mat(self, l, l2, a):
        row = {x: i for i, x in enumerate(self.fixed(l))}
        src = self.fixed(l2)
        m = _zeros(len(row), len(src))
        act = self.gset.action[a]
        for j, x in enumerate(src):
            m[row[act[x]], j] = 1
        return m


def free_system(x: GSet) -> FreeSystem:
    return FreeSystem(x)


def constant_system(lat: SubgroupLattice, universe: Subgroup | None = None) -> FreeSystem:
    """The constant system ``Z`` (``A`` of the one-point set)."""
    u = universe or lat.whole
    return FreeSystem(canonical_orbit(lat, u, u))


class ZeroSystem(CoefficientSystem):
    def _rank(self, l):
        return 0

    def _mat(self, l, l2, a):
        return _zeros(0, 0)


class BoxProduct(CoefficientSystem):
    """Levelwise tensor product; basis of level ``L`` is ``i * n_L(N) + j``."""

    def __init__(self, m: CoefficientSystem, n: CoefficientSystem):
        if m.universe != n.universe:
            raise CoefficientError("box product needs systems over the same group")
        super().__init__(m.lattice, m.universe)
        self.left, self.right = m, n

    def _rank(self, l):
        return self.left.rank(l) * self.right.rank(l)

    def _mat(self, l, l2, a):
        return np.kron(self.left.mat(l, l2, a), self.right.mat(l, l2, a))


def box_product(m: CoefficientSystem, n: CoefficientSystem) -> BoxProduct:
    return BoxProduct(m, n)


class DirectSum(CoefficientSystem):
    def __init__(self, parts: Sequence[CoefficientSystem], lattice=None, universe=None):
        if not parts and (lattice is None or universe is None):
            raise CoefficientError("empty direct sum needs an explicit group")
        lattice = lattice or parts[0].lattice
        universe = universe or parts[0].universe
        if any(p.universe != universe for p in parts):
            raise CoefficientError("direct sum needs systems over the same group")
        super().__init__(lattice, universe)
        self.parts = list(parts)

    def offsets(self, l: Subgroup) -> list[int]:
        out = [0]
        for p in self.parts:
            out.append(out[-1] + p.rank(l))
        return out

    def _rank(self, l):
        return sum(p.rank(l) for p in self.parts)

    def _mat(self, l, l2, a):
        return block_diag([p.mat(l, l2, a) for p in self.parts])


def direct_sum(parts: Sequence[CoefficientSystem], lattice=None, universe=None) -> DirectSum:
    return DirectSum(parts, lattice, universe)


class RestrictedSystem(CoefficientSystem):
    """``R^U_H``: same levels and maps, fewer of them."""

    def __init__(self, m: CoefficientSystem, h: Subgroup):
        if not h <= m.universe:
            raise CoefficientError("restriction needs a subgroup")
        super().__init__(m.lattice, h)
        self.base = m

    def _rank(self, l):
        return self.base.rank(l)

    def _mat(self, l, l2, a):
        return self.base.mat(l, l2, a)


# -- morphisms ---------------------------------------------------------------

@dataclass(eq=False)
class CoeffMorphism:
    """Per-level matrices ``maps[L]`` of shape ``(n_L(target), n_L(source))``."""
    source: CoefficientSystem
    target: CoefficientSystem
    maps: dict[int, np.ndarray] = field(default_factory=dict)

    def at(self, l: Subgroup) -> np.ndarray:
        m = self.maps.get(l.index)
        if m is None:
            return _zeros(self.target.rank(l), self.source.rank(l))
        return m

    def levels(self) -> list[Subgroup]:
        return self.source.levels()

    def compose(self, first: "CoeffMorphism") -> "CoeffMorphism":
        """``self ∘ first``."""
        return CoeffMorphism(first.source, self.target,
                             {l.index: self.at(l) @ first.at(l) for l in self.levels()})

    def __matmul__(self, other: "CoeffMorphism") -> "CoeffMorphism":
        return self.compose(other)

    def __add__(self, other: "CoeffMorphism") -> "CoeffMorphism":
        return CoeffMorphism(self.source, self.target, {l.index: self.at(l) + other.at(l) for l in self.levels()})

    def __sub__(self, other: "CoeffMorphism") -> "CoeffMorphism":
        return CoeffMorphism(self.source, self.target, {l.index: self.at(l) - other.at(l) for l in self.levels()})

    def scale(self, c: int) -> "CoeffMorphism":
        return CoeffMorphism(self.source, self.target, {l.index: c * self.at(l) for l in self.levels()})

    def equals(self, other: "CoeffMorphism") -> bool:
        return all(np.array_equal(self.at(l), other.at(l)) for l in self.levels())

    def is_zero(self) -> bool:
        return all(not self.at(l).any() for l in self.levels())

    def naturality_defects(self, morphisms=None) -> list[tuple[Subgroup, Subgroup, int]]:
        lat = self.source.lattice
        morphisms = morphisms or generating_morphisms(lat, self.source.universe)
        bad = []
        for l, l2, a in morphisms:
            lhs = self.at(l) @ self.source.mat(l, l2, a)
            rhs = self.target.mat(l, l2, a) @ self.at(l2)
            if not np.array_equal(lhs, rhs):
                bad.append((l, l2, a))
        return bad

    def is_natural(self) -> bool:
        return not self.naturality_defects()

    def is_iso(self) -> bool:
        for l in self.levels():
            m = self.at(l)
            if m.shape[0] != m.shape[1] or not zl.is_unimodular(m):
                return False
        return True

    def is_idempotent(self) -> bool:
        return all(np.array_equal(self.at(l) @ self.at(l), self.at(l)) for l in self.levels())

    def inverse(self) -> "CoeffMorphism":
        maps = {}
        for l in self.levels():
            m = self.at(l)
            if m.shape == (0, 0):
                maps[l.index] = m
                continue
            inv = zl.solve(m, _eye(m.shape[0]))
            if inv is None:
                raise CoefficientError("morphism is not invertible over Z")
            maps[l.index] = inv
        return CoeffMorphism(self.target, self.source, maps)


def identity_morphism(m: CoefficientSystem) -> CoeffMorphism:
    return CoeffMorphism(m, m, {l.index: _eye(m.rank(l)) for l in m.levels()})


def zero_morphism(m: CoefficientSystem, n: CoefficientSystem) -> CoeffMorphism:
    return CoeffMorphism(m, n, {l.index: _zeros(n.rank(l), m.rank(l)) for l in m.levels()})


def morphism_block_diag(fs: Sequence[CoeffMorphism], source: CoefficientSystem,
                        target: CoefficientSystem) -> CoeffMorphism:
    return CoeffMorphism(source, target, {l.index: block_diag([f.at(l) for f in fs]) for l in source.levels()})


def gmap_morphism(f) -> CoeffMorphism:
    """``A_f: A_X -> A_Y`` for an equivariant map ``f: X -> Y``."""
    src, dst = FreeSystem(f.domain), FreeSystem(f.codomain)
    maps = {}
    for l in src.levels():
        row = {y: i for i, y in enumerate(dst.fixed(l))}
        m = _zeros(dst.rank(l), src.rank(l))
        for j, x in enumerate(src.fixed(l)):
            m[row[f.image[x]], j] = 1
        maps[l.index] = m
    return CoeffMorphism(src, dst, maps)


def box_morphism(f: CoeffMorphism, g: CoeffMorphism) -> CoeffMorphism:
    src, dst = BoxProduct(f.source, g.source), BoxProduct(f.target, g.target)
    return CoeffMorphism(src, dst, {l.index: np.kron(f.at(l), g.at(l)) for l in src.levels()})


def hom_system(m: CoefficientSystem, n: CoefficientSystem) -> list[CoeffMorphism]:
    """A Z-basis of natural transformations ``m -> n`` (integer kernel of the
    commutation equations on generating morphisms)."""
    levels = m.levels()
    offs, total = {}, 0
    for l in levels:
        offs[l.index] = total
        total += n.rank(l) * m.rank(l)
    if total == 0:
        return []
    rows = []
    for l, l2, a in generating_morphisms(m.lattice, m.universe):
        nl, ml = n.rank(l), m.rank(l)
        nl2, ml2 = n.rank(l2), m.rank(l2)
        if nl * ml2 == 0:
            continue
        sm = m.mat(l, l2, a)      # ml x ml2
        tn = n.mat(l, l2, a)      # nl x nl2
        # f_L @ sm - tn @ f_L2 == 0, with f_L flattened row-major
        block = np.zeros((nl * ml2, total), dtype=np.int64)
        if ml:
            block[:, offs[l.index]:offs[l.index] + nl * ml] += np.kron(_eye(nl), sm.T)
        if nl2:
            block[:, offs[l2.index]:offs[l2.index] + nl2 * ml2] -= np.kron(tn, _eye(ml2))
        rows.append(block)
    eqs = np.concatenate(rows, axis=0) if rows else np.zeros((0, total), dtype=np.int64)
    ker = zl.kernel(eqs, ncols=total)
    out = []
    for k in range(ker.shape[1]):
        v = ker[:, k]
        maps = {}
        for l in levels:
            o = offs[l.index]
            maps[l.index] = np.asarray(v[o:o + n.rank(l) * m.rank(l)], dtype=np.int64).reshape(n.rank(l), m.rank(l))
        out.append(CoeffMorphism(m, n, maps))
    return out


def morphism_vector(f: CoeffMorphism) -> np.ndarray:
    return np.concatenate([f.at(l).reshape(-1) for l in f.levels()]) if f.levels() else np.zeros(0, dtype=np.int64)


# -- validation --------------------------------------------------------------

@dataclass
class ValidationReport:
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def functoriality_violations(m: CoefficientSystem, full: bool = False) -> list[str]:
    lat = m.lattice
    u = m.universe
    out = []
    for l in m.levels():
        if not np.array_equal(m.mat(l, l, 0), _eye(m.rank(l))):
            out.append(f"identity at {list(l.elements)} is not the identity matrix")
    gens = generating_morphisms(lat, u)
    targets = all_morphisms(lat, u)
    by_source: dict[int, list] = {}
    for l2, l3, b in targets:
        by_source.setdefault(l2.index, []).append((l3, b))
    g = lat.group
    for l, l2, a in gens:
        for l3, b in by_source.get(l2.index, ()):
            lhs = m.mat(l, l3, g.mul(a, b))
            rhs = m.mat(l, l2, a) @ m.mat(l2, l3, b)
            if not np.array_equal(lhs, rhs):
                out.append(f"composite ({list(l.elements)} -{a}-> {list(l2.elements)} -{b}-> {list(l3.elements)}) fails")
                if not full:
                    return out
    return out


def validate_system(m) -> ValidationReport:
    if isinstance(m, CoefficientRing):
        return ValidationReport(functoriality_violations(m.system) + ring_violations(m))
    return ValidationReport(functoriality_violations(m))


# -- rings ---------------------------------------------------------------------

def _ring_mul(tensor: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.einsum("i,j,ijk->k", x, y, tensor)


@dataclass(eq=False)
class CoefficientRing:
    """A system with levelwise ring structure.

    ``mult[L]`` has shape ``(n, n, n)``: ``e_i e_j = Σ_k mult[L][i, j, k] e_k``.
    ``augmentation[L]`` (optional) is a ring map to ``Z`` given by a row
    vector, invariant under the Weyl action.
    """
    system: CoefficientSystem
    mult: dict[int, np.ndarray]
    unit: dict[int, np.ndarray]
    augmentation: dict[int, np.ndarray] | None = None
    label: str = ""

    @property
    def lattice(self) -> SubgroupLattice:
        return self.system.lattice

    @property
    def universe(self) -> Subgroup:
        return self.system.universe

    def levels(self) -> list[Subgroup]:
        return self.system.levels()

    def rank(self, l: Subgroup) -> int:
        return self.system.rank(l)

    def mul(self, l: Subgroup, x, y) -> np.ndarray:
        return _ring_mul(self.mult[l.index], np.asarray(x), np.asarray(y))

    def left_mult_matrix(self, l: Subgroup, x) -> np.ndarray:
        """Matrix of ``y -> x*y`` on level ``L``."""
        return np.einsum("i,ijk->kj", np.asarray(x), self.mult[l.index])

    def basis_left_mult(self, l: Subgroup) -> list[np.ndarray]:
        cache = self.__dict__.setdefault("_blm", {})
        if l.index not in cache:
            t = self.mult[l.index]
            cache[l.index] = [t[i].T.copy() for i in range(self.rank(l))]
        return cache[l.index]

    def aug(self, l: Subgroup) -> np.ndarray | None:
        if self.augmentation is None:
            return None
        return self.augmentation.get(l.index)

    def restrict(self, h: Subgroup) -> "CoefficientRing":
        return CoefficientRing(RestrictedSystem(self.system, h), self.mult, self.unit, self.augmentation,
                               label=self.label)


def ring_violations(s: CoefficientRing) -> list[str]:
    out = []
    m = s.system
    for l in m.levels():
        n = m.rank(l)
        t = s.mult[l.index]
        u = s.unit[l.index]
        name = list(l.elements)
        e = _eye(n)
        if n == 0:
            continue
        if not all(np.array_equal(s.mul(l, u, e[i]), e[i]) and np.array_equal(s.mul(l, e[i], u), e[i])
                   for i in range(n)):
            out.append(f"unit fails at {name}")
        lhs = np.einsum("ijm,mkn->ijkn", t, t)
        rhs = np.einsum("jkm,imn->ijkn", t, t)
        if not np.array_equal(lhs, rhs):
            out.append(f"associativity fails at {name}")
        aug = s.aug(l)
        if aug is not None:
            if int(aug @ u) != 1 or not np.array_equal(np.einsum("ijk,k->ij", t, aug), np.outer(aug, aug)):
                out.append(f"augmentation is not a ring map at {name}")
    for l, l2, a in generating_morphisms(m.lattice, m.universe):
        f = m.mat(l, l2, a)
        if f.size == 0 and m.rank(l) == 0:
            continue
        if not np.array_equal(f @ s.unit[l2.index], s.unit[l.index]):
            out.append(f"structure map ({list(l.elements)}, {list(l2.elements)}, {a}) misses the unit")
        t2, t1 = s.mult[l2.index], s.mult[l.index]
        lhs = np.einsum("ijk,lk->ijl", t2, f)                     # f(e_i e_j)
        rhs = np.einsum("li,mj,lmn->ijn", f, f, t1)               # f(e_i) f(e_j)
        if not np.array_equal(lhs, rhs):
            out.append(f"structure map ({list(l.elements)}, {list(l2.elements)}, {a}) is not multiplicative")
        if s.augmentation is not None:
            a1, a2 = s.aug(l), s.aug(l2)
            if a1 is not None and a2 is not None and not np.array_equal(a1 @ f, a2):
                out.append(f"augmentation not compatible with ({list(l.elements)}, {list(l2.elements)}, {a})")
    return out


def constant_ring(lat: SubgroupLattice, universe: Subgroup | None = None) -> CoefficientRing:
    m = constant_system(lat, universe)
    one = np.ones((1, 1, 1), dtype=np.int64)
    levels = m.levels()
    return CoefficientRing(m, {l.index: one for l in levels}, {l.index: np.ones(1, dtype=np.int64) for l in levels},
                           {l.index: np.ones(1, dtype=np.int64) for l in levels}, label="Z")


@dataclass(eq=False)
class GRingWithAction:
    """A ring free of finite rank over Z with the group acting by automorphisms.

    ``action[g]`` is an ``n x n`` matrix on coordinate columns.
    """
    lattice: SubgroupLattice
    mult: np.ndarray
    unit: np.ndarray
    action: tuple[np.ndarray, ...]
    augmentation: np.ndarray | None = None
    label: str = ""

    @property
    def rank(self) -> int:
        return len(self.unit)

    def violations(self) -> list[str]:
        g = self.lattice.group
        out = []
        n = self.rank
        t = self.mult
        e = _eye(n)
        if not all(np.array_equal(_ring_mul(t, self.unit, e[i]), e[i]) for i in range(n)):
            out.append("unit fails")
        if not np.array_equal(np.einsum("ijm,mkn->ijkn", t, t), np.einsum("jkm,imn->ijkn", t, t)):
            out.append("not associative")
        for a in range(g.order):
            for b in range(g.order):
                if not np.array_equal(self.action[a] @ self.action[b], self.action[g.mul(a, b)]):
                    out.append(f"action not multiplicative at ({a}, {b})")
                    return out
            f = self.action[a]
            if not np.array_equal(np.einsum("ijk,lk->ijl", t, f), np.einsum("li,mj,lmn->ijn", f, f, t)):
                out.append(f"element {a} does not act by ring maps")
        return out


class FixedPointSystem(CoefficientSystem):
    """``FP(R)``: level ``L`` is the fixed sublattice ``R^L`` with a Hermite basis."""

    def __init__(self, r: GRingWithAction, universe: Subgroup | None = None):
        super().__init__(r.lattice, universe or r.lattice.whole)
        self.ring = r
        self._basis: dict[int, np.ndarray] = {}

    def basis(self, l: Subgroup) -> np.ndarray:
        b = self._basis.get(l.index)
        if b is None:
            n = self.ring.rank
            gens = self.lattice.generators(l)
            if not gens:
                b = _eye(n)
            else:
                eqs = np.concatenate([self.ring.action[s] - _eye(n) for s in gens], axis=0)
                k = zl.kernel(eqs, ncols=n)
                b = zl.column_basis(k, n) if k.shape[1] else k
            self._basis[l.index] = b
        return b

    def _rank(self, l):
        return self.basis(l).shape[1]

    def _mat(self, l, l2, a):
        img = self.ring.action[a] @ self.basis(l2)
        if img.shape[1] == 0:
            return _zeros(self.rank(l), 0)
        return zl.coordinates(self.basis(l), img).reshape(self.rank(l), self.rank(l2))


def fp_system(r: GRingWithAction, universe: Subgroup | None = None) -> CoefficientRing:
    sysm = FixedPointSystem(r, universe)
    mult, unit, aug = {}, {}, {}
    for l in sysm.levels():
        b = sysm.basis(l)
        k = b.shape[1]
        t = np.zeros((k, k, k), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                prod = _ring_mul(r.mult, b[:, i], b[:, j])
                t[i, j] = zl.coordinates(b, prod)
        mult[l.index] = t
        unit[l.index] = zl.coordinates(b, r.unit)
        if r.augmentation is not None:
            aug[l.index] = r.augmentation @ b
    return CoefficientRing(sysm, mult, unit, aug if r.augmentation is not None else None, label=f"FP({r.label})")


# -- catalog G-rings -------------------------------------------------------------

def trivial_gring(lat: SubgroupLattice) -> GRingWithAction:
    g = lat.group
    return GRingWithAction(lat, np.ones((1, 1, 1), dtype=np.int64), np.ones(1, dtype=np.int64),
                           tuple(_eye(1) for _ in range(g.order)), np.ones(1, dtype=np.int64), label="Z")


def permutation_gring(x: GSet) -> GRingWithAction:
    """``Z^X`` with coordinatewise product and the permutation action."""
    n = x.size
    t = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        t[i, i, i] = 1
    acts = []
    for a in range(x.group.order):
        m = _zeros(n, n)
        for i in range(n):
            m[x.action[a][i], i] = 1
        acts.append(m)
    return GRingWithAction(x.lattice, t, np.ones(n, dtype=np.int64), tuple(acts), None, label=f"Z^{n}")


def group_ring_gring(lat: SubgroupLattice, n: FiniteGroup, hom: Sequence[Sequence[int]], label: str = "") -> GRingWithAction:
    """``Z[N]`` with ``g`` acting through the automorphism ``hom[g]`` of ``N``."""
    k = n.order
    t = np.zeros((k, k, k), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            t[i, j, n.mul(i, j)] = 1
    acts = []
    for a in range(lat.group.order):
        m = _zeros(k, k)
        for i in range(k):
            m[hom[a][i], i] = 1
        acts.append(m)
    unit = np.zeros(k, dtype=np.int64)
    unit[0] = 1
    return GRingWithAction(lat, t, unit, tuple(acts), np.ones(k, dtype=np.int64), label=label or f"Z[{n.label}]")


def sign_twisted_cyclic_ring(lat: SubgroupLattice, m: int = 3) -> GRingWithAction | None:
    """``Z[C_m]`` with elements outside an index-2 subgroup acting by inversion.

    Uses the least index-2 subgroup; returns ``None`` if the group has none.
    """
    from .groups import cyclic_group
    g = lat.group
    half = next((s for s in lat.subgroups if 2 * len(s) == g.order), None)
    if half is None:
        return None
    c = cyclic_group(m)
    inv = [(-i) % m for i in range(m)]
    hom = [list(range(m)) if a in half else inv for a in range(g.order)]
    return group_ring_gring(lat, c, hom, label=f"Z[C{m}]")


def catalog_grings(lat: SubgroupLattice) -> list[GRingWithAction]:
    out = [trivial_gring(lat)]
    for h in lat.reps[:-1]:
        if lat.group.order // len(h) <= 4:
            out.append(permutation_gring(canonical_orbit(lat, h)))
            break
    tw = sign_twisted_cyclic_ring(lat)
    if tw is not None:
        out.append(tw)
    return out


# -- group-ring systems --------------------------------------------------------

def group_ring_system(lattice: SubgroupLattice, universe: Subgroup, groups: Mapping[Subgroup, FiniteGroup],
                      inclusions: Mapping[tuple[Subgroup, Subgroup], Sequence[int]],
                      conjugations: Mapping[tuple[Subgroup, int], Sequence[int]]) -> CoefficientRing:
    """``Z[π_L]`` at level ``L``; the homomorphisms ``π_L2 -> π_L`` are given on
    generating morphisms as image lists and linearised."""

    def perm(src: FiniteGroup, dst: FiniteGroup, images: Sequence[int]) -> np.ndarray:
        m = _zeros(dst.order, src.order)
        for i, j in enumerate(images):
            m[j, i] = 1
        return m

    ranks = {l: groups[l].order for l in lattice.subgroups_of(universe)}
    inc = {(a, b): perm(groups[b], groups[a], imgs) for (a, b), imgs in inclusions.items()}
    conj = {(a, s): perm(groups[lattice.conjugate(a, s)], groups[a], imgs) for (a, s), imgs in conjugations.items()}
    sysm = GeneratedSystem(lattice, universe, ranks, inc, conj)
    mult, unit, aug = {}, {}, {}
    for l in sysm.levels():
        p = groups[l]
        k = p.order
        t = np.zeros((k, k, k), dtype=np.int64)
        for i in range(k):
            for j in range(k):
                t[i, j, p.mul(i, j)] = 1
        mult[l.index] = t
        u = np.zeros(k, dtype=np.int64)
        u[0] = 1
        unit[l.index] = u
        aug[l.index] = np.ones(k, dtype=np.int64)
    return CoefficientRing(sysm, mult, unit, aug, label="Z[pi]")


__all__ = [
    "CoefficientSystem", "CoefficientError", "TableSystem", "GeneratedSystem", "FreeSystem", "ZeroSystem",
    "BoxProduct", "DirectSum", "RestrictedSystem", "CoeffMorphism", "CoefficientRing", "GRingWithAction",
    "FixedPointSystem", "ValidationReport", "block_diag", "hasse_edges", "generating_morphisms",
    "all_morphisms", "free_system", "constant_system", "box_product", "direct_sum", "identity_morphism",
    "zero_morphism", "morphism_block_diag", "gmap_morphism", "box_morphism", "hom_system", "morphism_vector",
    "functoriality_violations",
    "validate_system", "ring_violations", "constant_ring", "fp_system", "trivial_gring", "permutation_gring",
    "group_ring_gring", "sign_twisted_cyclic_ring", "catalog_grings", "group_ring_system",
]
