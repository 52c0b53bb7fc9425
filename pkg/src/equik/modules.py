"""Modules over coefficient rings and the isotropy splitting of projectives.

Conventions
-----------
* A module over a coefficient ring ``S`` is a system ``M`` with action
  tensors ``act(L)[b]`` (the matrix of the ``b``-th basis element of ``S^L``).
* The free module ``S_X = S □ A_X`` has level basis ``b * |X^L| + x``.
* Maps out of ``S_X`` are stored by their Yoneda coordinates: for each orbit
  ``o`` of ``X`` (basepoint = least element, stabilizer ``H_o``) the image
  ``m_o in N^{H_o}`` of ``1 ⊗ x_o``.
* A projective module is ``(X, e)`` with ``e`` an idempotent endomorphism of
  ``S_X``; the module is ``im(e)``.
* The twisted group ring ``T = S^H_θ[W]`` has basis ``b * |W| + w``.  Left
  ``T``-modules ``T^n`` are row vectors and ``T``-linear endomorphisms are
  right multiplications by ``n x n`` matrices over ``T``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import lattice as zl
from .coeff import (BoxProduct, CoeffMorphism, CoefficientError, CoefficientRing, CoefficientSystem,
                    FreeSystem, TableSystem, _eye, _zeros, generating_morphisms, identity_morphism)
from .functors import induce_system
from .groups import FiniteGroup, Subgroup, SubgroupLattice
from .gsets import BurnsideElement, GSet, canonical_orbit, coproduct, empty_gset


class NotProjectiveError(ValueError):
    pass


# -- twisted group rings --------------------------------------------------------

class TwistedGroupRing:
    """``R_θ[W]`` with ``(r1 w1)(r2 w2) = (r1 · w1(r2)) w1 w2``."""

    def __init__(self, mult: np.ndarray, unit: np.ndarray, weyl: FiniteGroup, action: Sequence[np.ndarray],
                 augmentation: np.ndarray | None = None, labels: Sequence[int] | None = None, label: str = ""):
        self.base_mult = np.asarray(mult, dtype=np.int64)
        self.base_unit = np.asarray(unit, dtype=np.int64)
        self.weyl = weyl
        self.action = [np.asarray(a, dtype=np.int64) for a in action]
        self.base_aug = augmentation
        self.labels = tuple(labels) if labels is not None else tuple(range(weyl.order))
        self.label = label
        self.n = len(self.base_unit)
        self.w = weyl.order
        self.dim = self.n * self.w

    def index(self, b: int, w: int) -> int:
        return b * self.w + w

    @cached_property
    def tensor(self) -> np.ndarray:
        n, w = self.n, self.w
        t = np.zeros((n, w, n, w, n, w), dtype=np.int64)
        for w1 in range(w):
            block = np.einsum("ilk,lj->ijk", self.base_mult, self.action[w1])
            for w2 in range(w):
                t[:, w1, :, w2, :, self.weyl.mul(w1, w2)] = block
        return t.reshape(self.dim, self.dim, self.dim)

    @cached_property
    def unit(self) -> np.ndarray:
        u = np.zeros(self.dim, dtype=np.int64)
        u[np.arange(self.n) * self.w] = self.base_unit
        return u

    @cached_property
    def augmentation(self) -> np.ndarray | None:
        if self.base_aug is None:
            return None
        return np.repeat(np.asarray(self.base_aug, dtype=np.int64), self.w)

    def mul(self, x, y) -> np.ndarray:
        return np.einsum("i,j,ijk->k", np.asarray(x), np.asarray(y), self.tensor)

    @cached_property
    def left_mults(self) -> np.ndarray:
        """``left_mults[i]`` is the matrix of ``y -> e_i y``."""
        return np.transpose(self.tensor, (0, 2, 1)).copy()

    @cached_property
    def right_mults(self) -> np.ndarray:
        """``right_mults[j]`` is the matrix of ``x -> x e_j``."""
        return np.transpose(self.tensor, (1, 2, 0)).copy()

    def group_element(self, w: int) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.int64)
        v[self.base_unit.nonzero()[0] * self.w + w] = self.base_unit[self.base_unit.nonzero()[0]]
        return v

    def violations(self) -> list[str]:
        out = []
        t = self.tensor
        e = _eye(self.dim)
        if not all(np.array_equal(self.mul(self.unit, e[i]), e[i]) and np.array_equal(self.mul(e[i], self.unit), e[i])
                   for i in range(self.dim)):
            out.append("unit fails")
        lm = self.left_mults
        # L(e_i e_j) = L(e_i) L(e_j)
        prod = np.einsum("ijk,kab->ijab", t, lm)
        comp = np.einsum("iab,jbc->ijac", lm, lm)
        if not np.array_equal(prod, comp):
            out.append("not associative")
        g = self.weyl
        for a in range(g.order):
            for b in range(g.order):
                if not np.array_equal(self.action[a] @ self.action[b], self.action[g.mul(a, b)]):
                    out.append("Weyl action is not multiplicative")
                    return out
            f = self.action[a]
            if not np.array_equal(np.einsum("ijk,lk->ijl", self.base_mult, f),
                                  np.einsum("li,mj,lmn->ijn", f, f, self.base_mult)):
                out.append("Weyl group does not act by ring maps")
                return out
        return out

    # matrices over T: arrays of shape (n, n, dim)
    def mat_mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.einsum("ijs,jkt,stu->iku", a, b, self.tensor)

    def mat_identity(self, n: int) -> np.ndarray:
        out = np.zeros((n, n, self.dim), dtype=np.int64)
        for i in range(n):
            out[i, i] = self.unit
        return out

    def row_action(self, q: np.ndarray) -> np.ndarray:
        """Z-matrix of ``v -> v Q`` on ``T^n`` (coordinates ``k * dim + t``)."""
        n = q.shape[0]
        d = self.dim
        out = np.zeros((n * d, n * d), dtype=np.int64)
        rm = self.right_mults
        for i in range(n):
            for j in range(n):
                out[j * d:(j + 1) * d, i * d:(i + 1) * d] = np.einsum("s,sab->ab", q[i, j], rm)
        return out

    def free_action(self, n: int) -> np.ndarray:
        """Action tensor of ``T`` on ``T^n`` by left multiplication."""
        return np.stack([np.kron(_eye(n), self.left_mults[i]) for i in range(self.dim)])


def twisted_group_ring(mult, unit, weyl: FiniteGroup, action, augmentation=None, label: str = "") -> TwistedGroupRing:
    return TwistedGroupRing(mult, unit, weyl, action, augmentation, label=label)


def level_twisted_ring(s: CoefficientRing, h: Subgroup) -> TwistedGroupRing:
    """``S^H_θ[W]`` with ``W = N_U(H)/H`` acting through the Weyl structure maps."""
    lat = s.lattice
    cache = s.__dict__.setdefault("_twisted_cache", {})
    if h.index not in cache:
        wd = lat.weyl(h, s.universe)
        acts = [s.system.mat(h, h, x) for x in wd.labels]
        cache[h.index] = TwistedGroupRing(s.mult[h.index], s.unit[h.index], wd.quotient, acts, s.aug(h),
                                          labels=wd.labels, label=f"{s.label}^{list(h.elements)}_θ[W]")
    return cache[h.index]


def find_ring_isomorphism(a: TwistedGroupRing, b_mult: np.ndarray, candidates: Sequence[np.ndarray]) -> np.ndarray | None:
    """First basis map among ``candidates`` (matrices ``b-coords <- a-coords``)
    carrying the structure constants of ``a`` onto ``b_mult``."""
    for p in candidates:
        lhs = np.einsum("ijk,lk->ijl", a.tensor, p)
        rhs = np.einsum("li,mj,lmn->ijn", p, p, b_mult)
        if np.array_equal(lhs, rhs) and zl.is_unimodular(p):
            return p
    return None


def group_ring_tensor(g: FiniteGroup) -> np.ndarray:
    n = g.order
    t = np.zeros((n, n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            t[i, j, g.mul(i, j)] = 1
    return t


def twisted_s3_iso() -> tuple[TwistedGroupRing, FiniteGroup, np.ndarray]:
    """``Z[C3]_θ[C2]`` (inversion action) and an explicit ring isomorphism onto
    ``Z[S3]`` found by searching the images of the generators."""
    from .groups import build_group, cyclic_group
    c2, c3, s3 = cyclic_group(2), cyclic_group(3), build_group("S3")
    swap = np.zeros((3, 3), dtype=np.int64)
    for i in range(3):
        swap[(-i) % 3, i] = 1
    t = TwistedGroupRing(group_ring_tensor(c3), np.array([1, 0, 0]), c2, [_eye(3), swap],
                         np.ones(3, dtype=np.int64), label="Z[C3]_θ[C2]")
    order3 = [x for x in range(6) if s3.element_order(x) == 3]
    order2 = [x for x in range(6) if s3.element_order(x) == 2]
    cands = []
    for r in order3:
        for s in order2:
            p = np.zeros((6, 6), dtype=np.int64)
            for i in range(3):
                for j in range(2):
                    elt = s3.prod(*([r] * i + [s] * j)) if i + j else 0
                    p[elt, t.index(i, j)] = 1
            cands.append(p)
    iso = find_ring_isomorphism(t, group_ring_tensor(s3), cands)
    return t, s3, iso


# -- modules over twisted rings --------------------------------------------------

@dataclass(eq=False)
class TwistedModule:
    """A Z-lattice ``Z^r`` with ``action[t]`` the matrix of the ``t``-th basis element of ``T``."""
    ring: TwistedGroupRing
    action: np.ndarray

    @property
    def rank(self) -> int:
        return self.action.shape[1] if self.action.ndim == 3 else 0

    def violations(self) -> list[str]:
        out = []
        r = self.rank
        t = self.ring
        u = np.einsum("i,iab->ab", t.unit, self.action)
        if not np.array_equal(u, _eye(r)):
            out.append("unit does not act as the identity")
        lhs = np.einsum("ijk,kab->ijab", t.tensor, self.action)
        rhs = np.einsum("iab,jbc->ijac", self.action, self.action)
        if not np.array_equal(lhs, rhs):
            out.append("action is not multiplicative")
        return out

    def element_action(self, x) -> np.ndarray:
        return np.einsum("i,iab->ab", np.asarray(x), self.action)

    def span(self, vectors: np.ndarray) -> np.ndarray:
        """Basis of the ``T``-submodule generated by the columns."""
        if vectors.shape[1] == 0:
            return _zeros(self.rank, 0)
        cols = np.concatenate([self.action[i] @ vectors for i in range(self.ring.dim)], axis=1)
        return zl.column_basis(cols, self.rank)

    def augmented_rank(self) -> int | None:
        """Rank of ``Z ⊗_T V`` (``None`` without an augmentation)."""
        aug = self.ring.augmentation
        if aug is None:
            return None
        r = self.rank
        if r == 0:
            return 0
        cols = [self.action[i] - aug[i] * _eye(r) for i in range(self.ring.dim)]
        return r - zl.rank(np.concatenate(cols, axis=1))


def hom_twisted(v: TwistedModule, w: TwistedModule) -> np.ndarray:
    """Z-basis of ``Hom_T(V, W)``; each column is a row-major flattened ``(rank W, rank V)`` matrix."""
    rv, rw = v.rank, w.rank
    if rv * rw == 0:
        return _zeros(rv * rw, 0)
    rows = [np.kron(w.action[i], _eye(rv)) - np.kron(_eye(rw), v.action[i].T) for i in range(v.ring.dim)]
    return zl.kernel(np.concatenate(rows, axis=0), ncols=rv * rw)


def quotient_twisted(v: TwistedModule, sub: np.ndarray) -> tuple[TwistedModule, np.ndarray, list[int]]:
    """``V / sub`` (by the saturation of ``sub``): module, projection and torsion of ``V/sub``."""
    y, torsion = zl.quotient_map(sub, v.rank)
    q = y.shape[0]
    if q == 0:
        return TwistedModule(v.ring, np.zeros((v.ring.dim, 0, 0), dtype=np.int64)), y, torsion
    s = zl.right_inverse(y)
    acts = np.stack([y @ v.action[i] @ s for i in range(v.ring.dim)])
    return TwistedModule(v.ring, acts), y, torsion


# -- modules over coefficient rings -------------------------------------------------

class CoeffModule:
    """A module over a coefficient ring; subclasses provide ``_act``."""

    def __init__(self, ring: CoefficientRing, system: CoefficientSystem):
        if ring.universe != system.universe:
            raise CoefficientError("ring and module live over different groups")
        self.ring = ring
        self.system = system
        self._act_cache: dict[int, np.ndarray] = {}

    @property
    def lattice(self) -> SubgroupLattice:
        return self.system.lattice

    @property
    def universe(self) -> Subgroup:
        return self.system.universe

    def rank(self, l: Subgroup) -> int:
        return self.system.rank(l)

    def mat(self, l, l2, a=0) -> np.ndarray:
        return self.system.mat(l, l2, a)

    def act(self, l: Subgroup) -> np.ndarray:
        a = self._act_cache.get(l.index)
        if a is None:
            a = self._act(l)
            self._act_cache[l.index] = a
        return a

    def _act(self, l: Subgroup) -> np.ndarray:
        raise NotImplementedError

    def level_module(self, h: Subgroup) -> TwistedModule:
        """``M^H`` as a module over ``S^H_θ[W]``."""
        t = level_twisted_ring(self.ring, h)
        n = self.rank(h)
        acts = np.zeros((t.dim, n, n), dtype=np.int64)
        sa = self.act(h)
        for w, lab in enumerate(t.labels):
            wm = self.mat(h, h, lab)
            for b in range(t.n):
                acts[t.index(b, w)] = sa[b] @ wm
        return TwistedModule(t, acts)

    def violations(self) -> list[str]:
        out = []
        s = self.ring
        for l in self.system.levels():
            a = self.act(l)
            n = self.rank(l)
            if n == 0:
                continue
            t = s.mult[l.index]
            if not np.array_equal(np.einsum("i,iab->ab", s.unit[l.index], a), _eye(n)):
                out.append(f"unit does not act trivially at {list(l.elements)}")
            if not np.array_equal(np.einsum("ijk,kab->ijab", t, a), np.einsum("iab,jbc->ijac", a, a)):
                out.append(f"action not associative at {list(l.elements)}")
        for l, l2, x in generating_morphisms(self.lattice, self.universe):
            f = self.mat(l, l2, x)
            sf = s.system.mat(l, l2, x)
            a1, a2 = self.act(l), self.act(l2)
            if f.size == 0 or a2.shape[0] == 0:
                continue
            lhs = np.einsum("ab,ibc->iac", f, a2)
            rhs = np.einsum("ki,kab,bc->iac", sf, a1, f)
            if not np.array_equal(lhs, rhs):
                out.append(f"structure map ({list(l.elements)}, {list(l2.elements)}, {x}) is not semilinear")
        return out


class TableModule(CoeffModule):
    def __init__(self, ring, system, act):
        super().__init__(ring, system)
        self._fn = act

    def _act(self, l):
        return np.asarray(self._fn(l), dtype=np.int64).reshape(self.ring.rank(l), self.rank(l), self.rank(l))


class FreeModule(CoeffModule):
    """``S_X = S □ A_X``."""

    def __init__(self, ring: CoefficientRing, x: GSet):
        super().__init__(ring, BoxProduct(ring.system, FreeSystem(x)))
        self.gset = x

    def fixed(self, l: Subgroup) -> list[int]:
        return self.system.right.fixed(l)

    def index(self, l: Subgroup, b: int, x: int) -> int:
        fx = self.fixed(l)
        return b * len(fx) + fx.index(x)

    def _act(self, l):
        k = len(self.fixed(l))
        lm = self.ring.basis_left_mult(l)
        if not lm:
            return np.zeros((0, 0, 0), dtype=np.int64)
        return np.stack([np.kron(m, _eye(k)) for m in lm])

    def unit_vector(self, l: Subgroup, x: int) -> np.ndarray:
        """``1 ⊗ x`` at level ``L`` (``x in X^L``)."""
        fx = self.fixed(l)
        v = np.zeros(self.rank(l), dtype=np.int64)
        u = self.ring.unit[l.index]
        j = fx.index(x)
        v[np.arange(len(u)) * len(fx) + j] = u
        return v


def free_module(ring: CoefficientRing, x: GSet) -> FreeModule:
    cache = ring.__dict__.setdefault("_free_cache", {})
    key = x._key()
    if key not in cache:
        cache[key] = FreeModule(ring, x)
    return cache[key]


class FreeHomSpace:
    """``Hom(S_X, N)`` in Yoneda coordinates ``⊕_o N^{H_o}``."""

    def __init__(self, source: FreeModule, target: CoeffModule):
        self.source, self.target = source, target
        x = source.gset
        self.orbits = []
        for m in x.orbit_minima:
            self.orbits.append((m, x.stabilizer(m)))
        self.offsets = [0]
        for _, h in self.orbits:
            self.offsets.append(self.offsets[-1] + target.rank(h))
        self.dim = self.offsets[-1]
        self.lift: dict[int, tuple[int, int]] = {}
        for o, (m, _) in enumerate(self.orbits):
            for g in x.universe.elements:
                y = x.action[g][m]
                if y not in self.lift:
                    self.lift[y] = (o, g)
        self._ops: dict[int, np.ndarray] = {}

    def block(self, c: np.ndarray, o: int) -> np.ndarray:
        return c[self.offsets[o]:self.offsets[o + 1]]

    def level_matrix(self, c: np.ndarray, l: Subgroup) -> np.ndarray:
        src, tgt = self.source, self.target
        fx = src.fixed(l)
        k = len(fx)
        nt = tgt.rank(l)
        ns = self.source.ring.rank(l)
        out = np.zeros((nt, ns * k), dtype=c.dtype if c.dtype == object else np.int64)
        if nt == 0 or k == 0:
            return out
        acts = tgt.act(l)
        for j, x in enumerate(fx):
            o, g = self.lift[x]
            v = tgt.mat(l, self.orbits[o][1], g) @ self.block(c, o)
            cols = np.einsum("bij,j->ib", acts, v)
            out[:, np.arange(ns) * k + j] = cols
        return out

    def level_operator(self, l: Subgroup) -> np.ndarray:
        """``(n_N(L), n_SX(L), dim)`` tensor with ``f_L = op @ c``."""
        op = self._ops.get(l.index)
        if op is None:
            src, tgt = self.source, self.target
            fx = src.fixed(l)
            k = len(fx)
            nt = tgt.rank(l)
            ns = self.source.ring.rank(l)
            op = np.zeros((nt, ns * k, self.dim), dtype=np.int64)
            if nt and k:
                acts = tgt.act(l)
                for j, x in enumerate(fx):
                    o, g = self.lift[x]
                    m = tgt.mat(l, self.orbits[o][1], g)
                    blk = np.einsum("bij,jk->ibk", acts, m)       # (nt, ns, n_o)
                    for b in range(ns):
                        op[:, b * k + j, self.offsets[o]:self.offsets[o + 1]] = blk[:, b, :]
            self._ops[l.index] = op
        return op

    def morphism(self, c) -> CoeffMorphism:
        c = np.asarray(c)
        maps = {l.index: self.level_matrix(c, l) for l in self.source.system.levels()}
        return CoeffMorphism(self.source.system, self.target.system, maps)

    def coords(self, f: CoeffMorphism) -> np.ndarray:
        parts = []
        for m, h in self.orbits:
            parts.append(f.at(h) @ self.source.unit_vector(h, m))
        return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)

    def basis(self) -> list[CoeffMorphism]:
        e = _eye(self.dim)
        return [self.morphism(e[:, i]) for i in range(self.dim)]


def hom_space(source: FreeModule, target: CoeffModule) -> FreeHomSpace:
    cache = source.__dict__.setdefault("_hom_cache", {})
    if id(target) not in cache:
        cache[id(target)] = (target, FreeHomSpace(source, target))
    return cache[id(target)][1]


# -- projective modules -------------------------------------------------------------

class ProjectiveModule:
    """``im(e)`` for an idempotent endomorphism ``e`` of ``S_X``."""

    def __init__(self, ring: CoefficientRing, x: GSet, e: CoeffMorphism | None = None, check: bool = True):
        self.ring = ring
        self.gset = x
        self.free = free_module(ring, x)
        self.e = e if e is not None else identity_morphism(self.free.system)
        if check and not self.e.is_idempotent():
            raise NotProjectiveError("presentation is not an idempotent")
        self._basis: dict[int, np.ndarray] = {}

    @property
    def lattice(self) -> SubgroupLattice:
        return self.ring.lattice

    @property
    def universe(self) -> Subgroup:
        return self.ring.universe

    @property
    def ends(self) -> FreeHomSpace:
        return hom_space(self.free, self.free)

    def basis(self, l: Subgroup) -> np.ndarray:
        b = self._basis.get(l.index)
        if b is None:
            el = self.e.at(l)
            b = zl.column_basis(el, el.shape[0]) if el.size else _zeros(self.free.rank(l), 0)
            self._basis[l.index] = b
        return b

    def rank(self, l: Subgroup) -> int:
        return self.basis(l).shape[1]

    def ranks(self) -> list[int]:
        return [self.rank(l) for l in self.lattice.relative(self.universe).reps]

    def coords(self, l: Subgroup, v: np.ndarray) -> np.ndarray:
        return zl.coordinates(self.basis(l), v)

    def level_module(self, h: Subgroup) -> TwistedModule:
        """``P^H`` over ``S^H_θ[W]`` in the coordinates of :meth:`basis`."""
        full = self.free.level_module(h)
        b = self.basis(h)
        if b.shape[1] == 0:
            return TwistedModule(full.ring, np.zeros((full.ring.dim, 0, 0), dtype=np.int64))
        left = zl.solve(b.T, _eye(b.shape[1])).T       # left inverse of b
        acts = np.stack([left @ full.action[i] @ b for i in range(full.ring.dim)])
        return TwistedModule(full.ring, acts)

    def as_module(self) -> CoeffModule:
        f = self.free
        lefts: dict[int, np.ndarray] = {}

        def left(l):
            if l.index not in lefts:
                b = self.basis(l)
                lefts[l.index] = zl.solve(b.T, _eye(b.shape[1])).T if b.shape[1] else _zeros(0, b.shape[0])
            return lefts[l.index]

        system = TableSystem(self.lattice, self.universe, self.rank,
                             lambda l, l2, a: left(l) @ f.mat(l, l2, a) @ self.basis(l2))
        return TableModule(self.ring, system,
                           lambda l: np.einsum("ij,bjk,kl->bil", left(l), f.act(l), self.basis(l))
                           if self.rank(l) else np.zeros((self.ring.rank(l), 0, 0), dtype=np.int64))

    def direct_sum(self, other: "ProjectiveModule") -> "ProjectiveModule":
        x = coproduct(self.gset, other.gset)
        free = free_module(self.ring, x)
        maps = {}
        for l in free.system.levels():
            # S_{X ⊔ Y}^L basis is b*(|X^L|+|Y^L|) + x; permute block-diagonal e's accordingly
            n1, n2 = len(self.free.fixed(l)), len(other.free.fixed(l))
            ns = self.ring.rank(l)
            perm1 = [b * (n1 + n2) + j for b in range(ns) for j in range(n1)]
            perm2 = [b * (n1 + n2) + n1 + j for b in range(ns) for j in range(n2)]
            m = _zeros(ns * (n1 + n2), ns * (n1 + n2))
            m[np.ix_(perm1, perm1)] = self.e.at(l)
            m[np.ix_(perm2, perm2)] = other.e.at(l)
            maps[l.index] = m
        return ProjectiveModule(self.ring, x, CoeffMorphism(free.system, free.system, maps), check=False)

    def is_zero(self) -> bool:
        return all(self.rank(l) == 0 for l in self.lattice.relative(self.universe).reps)


def free_projective(ring: CoefficientRing, x: GSet) -> ProjectiveModule:
    return ProjectiveModule(ring, x)


def module_hom(p: ProjectiveModule, q: ProjectiveModule) -> tuple[FreeHomSpace, np.ndarray]:
    """Z-basis (columns of Yoneda coordinates in ``Hom(S_X, S_Y)``) of
    ``Hom(im e, im f)`` realised as ``{f ∘ φ ∘ e}``."""
    space = hom_space(p.free, q.free)
    d = space.dim
    if d == 0:
        return space, _zeros(0, 0)
    proj = np.zeros((d, d), dtype=np.int64)
    e = _eye(d)
    for i in range(d):
        phi = space.morphism(e[:, i])
        proj[:, i] = space.coords(q.e.compose(phi).compose(p.e))
    return space, zl.column_basis(proj, d)


def hom_rank(p: ProjectiveModule, q: ProjectiveModule) -> int:
    return module_hom(p, q)[1].shape[1]


# -- quotient presentations -------------------------------------------------------

def projective_from_quotient(ring: CoefficientRing, x: GSet, sub: dict[int, np.ndarray]) -> ProjectiveModule:
    """Present ``S_X / K`` as ``im(e)``: solve for an idempotent ``e`` with
    ``e(K) = 0`` and ``(1 - e)(S_X) ⊆ K``.  ``sub[L]`` holds generators of ``K^L``
    as columns.  Raises :class:`NotProjectiveError` when no such ``e`` exists."""
    free = free_module(ring, x)
    space = hom_space(free, free)
    rows, rhs = [], []
    for o, (m, h) in enumerate(space.orbits):
        op = space.level_operator(h)
        n = free.rank(h)
        k = sub.get(h.index, _zeros(n, 0))
        kl = zl.left_kernel(k) if k.shape[1] else _eye(n)
        # (1 - e)(1 ⊗ x_o) in K: kl @ (u - e(u)) = 0 ; e(u) = op-free: e(1⊗x_o) = c_o
        blk = np.zeros((kl.shape[0], space.dim), dtype=np.int64)
        blk[:, space.offsets[o]:space.offsets[o + 1]] = kl
        rows.append(blk)
        rhs.append(kl @ free.unit_vector(h, m))
    for l in free.system.levels():
        k = sub.get(l.index)
        if k is None or k.shape[1] == 0:
            continue
        op = space.level_operator(l)           # (n, n, dim)
        rows.append(np.einsum("ijd,jk->ikd", op, k).transpose(0, 1, 2).reshape(-1, space.dim))
        rhs.append(np.zeros(op.shape[0] * k.shape[1], dtype=np.int64))
    a = np.concatenate(rows, axis=0) if rows else np.zeros((0, space.dim), dtype=np.int64)
    b = np.concatenate(rhs) if rhs else np.zeros(0, dtype=np.int64)
    c = zl.solve(a, b)
    if c is None:
        raise NotProjectiveError("no idempotent splits off the given submodule: the quotient is not projective")
    e = space.morphism(c)
    if not e.is_idempotent():
        raise NotProjectiveError("the splitting system produced a non-idempotent")
    return ProjectiveModule(ring, x, e)


# -- isotropy splitting ---------------------------------------------------------------

@dataclass
class SplitResult:
    index: int
    subgroup: Subgroup
    sub: ProjectiveModule        # P_i = im(e_i)
    quotient: ProjectiveModule   # im(e - e_i) ≅ P / P_i
    retraction: CoeffMorphism    # e_i, a retraction of P onto P_i
    generated: dict[int, np.ndarray]


def generated_submodule(p: ProjectiveModule, h: Subgroup) -> dict[int, np.ndarray]:
    """Levelwise bases of the submodule of ``P`` generated by ``P^H``."""
    lat = p.lattice
    u = p.universe
    free = p.free
    base = p.basis(h)
    out = {}
    for l in free.system.levels():
        n = free.rank(l)
        cols = []
        if base.shape[1]:
            acts = free.act(l)
            for a in lat.left_cosets(u, h):
                if lat.conjugate(l, a) <= h:
                    img = free.mat(l, h, a) @ base
                    cols.extend(acts[b] @ img for b in range(acts.shape[0]))
        out[l.index] = zl.column_basis(np.concatenate(cols, axis=1), n) if cols else _zeros(n, 0)
    return out


def isotropy_split(p: ProjectiveModule, i: int) -> SplitResult:
    lat = p.lattice
    rel = lat.relative(p.universe)
    h = rel.reps[i]
    for j in range(i + 1, len(rel)):
        if p.rank(rel.reps[j]) != 0:
            raise NotProjectiveError(f"module does not vanish at class {j} > {i}")
    gen = generated_submodule(p, h)
    for l in p.free.system.levels():
        inv = [d for d in zl.smith_invariants(gen[l.index]) if d > 1] if gen[l.index].shape[1] else []
        if inv:
            raise NotProjectiveError(f"P/P_i has torsion {inv} at {list(l.elements)}")
    space = p.ends
    free = p.free
    d = space.dim
    rows, rhs = [], []
    one_minus_e = identity_morphism(free.system) - p.e
    for o, (m, ho) in enumerate(space.orbits):
        op = space.level_operator(ho)                       # (n, n, d)
        v = one_minus_e.at(ho) @ free.unit_vector(ho, m)
        rows.append(np.einsum("ijd,j->id", op, v))          # ρ((1-e)(1⊗x_o)) = 0
        rhs.append(np.zeros(op.shape[0], dtype=np.int64))
        g = gen[ho.index]
        kl = zl.left_kernel(g) if g.shape[1] else _eye(free.rank(ho))
        if kl.shape[0]:
            blk = np.zeros((kl.shape[0], d), dtype=np.int64)
            blk[:, space.offsets[o]:space.offsets[o + 1]] = kl
            rows.append(blk)                                # image in P_i
            rhs.append(np.zeros(kl.shape[0], dtype=np.int64))
    base = p.basis(h)
    if base.shape[1]:
        op = space.level_operator(h)
        for k in range(base.shape[1]):
            rows.append(np.einsum("ijd,j->id", op, base[:, k]))
            rhs.append(base[:, k])                          # ρ(p) = p on P^H
    a = np.concatenate(rows, axis=0) if rows else np.zeros((0, d), dtype=np.int64)
    b = np.concatenate(rhs) if rhs else np.zeros(0, dtype=np.int64)
    c = zl.solve(a, b) if d else np.zeros(0, dtype=np.int64)
    if c is None:
        raise NotProjectiveError("the splitting system has no integral solution")
    ei = space.morphism(c)
    if not ei.is_idempotent():
        raise NotProjectiveError("retraction is not idempotent")
    sub = ProjectiveModule(p.ring, p.gset, ei, check=False)
    quo = ProjectiveModule(p.ring, p.gset, p.e - ei, check=True)
    return SplitResult(i, h, sub, quo, ei, gen)


# -- K_0 class vectors ------------------------------------------------------------

@dataclass(frozen=True)
class ClassComponent:
    zrank: int
    augrank: int | None
    ring_rank: int

    @property
    def reduced(self) -> int | None:
        return None if self.augrank is None else self.zrank - self.augrank * self.ring_rank


@dataclass(frozen=True)
class K0ClassVector:
    components: tuple[ClassComponent, ...]

    def __add__(self, other: "K0ClassVector") -> "K0ClassVector":
        return K0ClassVector(tuple(
            ClassComponent(a.zrank + b.zrank, None if a.augrank is None or b.augrank is None else a.augrank + b.augrank,
                           a.ring_rank) for a, b in zip(self.components, other.components)))

    def __neg__(self) -> "K0ClassVector":
        return K0ClassVector(tuple(ClassComponent(-c.zrank, None if c.augrank is None else -c.augrank, c.ring_rank)
                                   for c in self.components))

    def __sub__(self, other):
        return self + (-other)

    def zranks(self) -> tuple[int, ...]:
        return tuple(c.zrank for c in self.components)

    def augranks(self) -> tuple[int | None, ...]:
        return tuple(c.augrank for c in self.components)

    def reduced(self) -> tuple[int | None, ...]:
        return tuple(c.reduced for c in self.components)

    def free_part(self, table) -> BurnsideElement:
        if any(a is None for a in self.augranks()):
            raise ValueError("free part needs augmentations at every level")
        return BurnsideElement(table, self.augranks())


def zero_class_vector(ring: CoefficientRing) -> K0ClassVector:
    rel = ring.lattice.relative(ring.universe)
    return K0ClassVector(tuple(ClassComponent(0, 0 if ring.aug(h) is not None else None,
                                              level_twisted_ring(ring, h).dim) for h in rel.reps))


def k0_class_vector(p: ProjectiveModule, return_pieces: bool = False):
    """Split off the filtration pieces from the top class down; per class
    record the Z-rank and augmented rank of the evaluated piece."""
    lat = p.lattice
    rel = lat.relative(p.universe)
    comps = [None] * len(rel)
    pieces = [None] * len(rel)
    cur = p
    for i in reversed(range(len(rel))):
        h = rel.reps[i]
        t = level_twisted_ring(p.ring, h)
        if cur.rank(h) == 0:
            comps[i] = ClassComponent(0, 0 if t.augmentation is not None else None, t.dim)
            continue
        res = isotropy_split(cur, i)
        v = res.sub.level_module(h)
        comps[i] = ClassComponent(v.rank, v.augmented_rank(), t.dim)
        pieces[i] = res
        cur = res.quotient
    if not cur.is_zero():
        raise NotProjectiveError("filtration did not exhaust the module")
    out = K0ClassVector(tuple(comps))
    return (out, pieces) if return_pieces else out


# -- evaluation and Φ ---------------------------------------------------------------

def copies_of_orbit(lat: SubgroupLattice, h: Subgroup, n: int, universe: Subgroup | None = None) -> GSet:
    u = universe or lat.whole
    return coproduct(*([canonical_orbit(lat, h, u)] * n)) if n else empty_gset(lat, u)


def _tn_index(t: TwistedGroupRing, n: int) -> np.ndarray:
    """``perm[k*dim + b*|W| + w] = b*n*|W| + k*|W| + w`` (T^n -> S_{nG/H}^H)."""
    out = np.zeros(n * t.dim, dtype=np.int64)
    for k in range(n):
        for b in range(t.n):
            for w in range(t.w):
                out[k * t.dim + b * t.w + w] = b * n * t.w + k * t.w + w
    return out


def phi_lift(ring: CoefficientRing, i: int, q: np.ndarray) -> ProjectiveModule:
    """``Φ_i(Q)``: the idempotent on ``S_{n G/H_i}`` whose evaluation is ``v -> vQ``."""
    lat = ring.lattice
    h = lat.relative(ring.universe).reps[i]
    t = level_twisted_ring(ring, h)
    n = q.shape[0]
    if not np.array_equal(t.mat_mul(q, q), q):
        raise NotProjectiveError("Q is not idempotent")
    x = copies_of_orbit(lat, h, n, ring.universe)
    free = free_module(ring, x)
    space = hom_space(free, free)
    perm = _tn_index(t, n)
    c = np.zeros(space.dim, dtype=np.int64)
    for k in range(n):
        v = np.zeros(n * t.dim, dtype=np.int64)
        v[perm] = q[k].reshape(-1)
        c[space.offsets[k]:space.offsets[k + 1]] = v
    e = space.morphism(c)
    return ProjectiveModule(ring, x, e, check=True)


@dataclass
class LevelEvaluation:
    ring: TwistedGroupRing
    module: TwistedModule
    presentation: np.ndarray | None       # Q over T, with module ≅ T^n Q
    generators: np.ndarray | None = None  # images in P^H of the unit vectors of T^n


def _is_copies(x: GSet, h: Subgroup) -> int | None:
    lat = x.lattice
    o = canonical_orbit(lat, h, x.universe)
    if o.size == 0 or x.size % o.size:
        return None
    n = x.size // o.size
    return n if copies_of_orbit(lat, h, n, x.universe) == x else None


def _row_from_level_vector(t: TwistedGroupRing, n: int, v: np.ndarray) -> np.ndarray:
    perm = _tn_index(t, n)
    return np.asarray(v)[perm].reshape(n, t.dim)


def evaluate_level(p: ProjectiveModule, i: int) -> LevelEvaluation:
    """``P^{H_i}`` over ``S^{H_i}_θ[W]`` with an idempotent presentation when ``P``
    vanishes above class ``i``."""
    lat = p.lattice
    rel = lat.relative(p.universe)
    h = rel.reps[i]
    t = level_twisted_ring(p.ring, h)
    mod = p.level_module(h)
    n = _is_copies(p.gset, h)
    if n is not None:
        space = p.ends
        c = space.coords(p.e)
        q = np.stack([_row_from_level_vector(t, n, space.block(c, k)) for k in range(n)]) if n else \
            np.zeros((0, 0, t.dim), dtype=np.int64)
        return LevelEvaluation(t, mod, q)
    if any(p.rank(rel.reps[j]) for j in range(i + 1, len(rel))):
        return LevelEvaluation(t, mod, None)
    if mod.rank == 0:
        return LevelEvaluation(t, mod, np.zeros((0, 0, t.dim), dtype=np.int64))
    split = isotropy_split(p, i)
    q, gens = _presentation_via_split(p, split, h, t)
    return LevelEvaluation(t, mod, q, gens)


def _presentation_via_split(p: ProjectiveModule, split: SplitResult, h: Subgroup, t: TwistedGroupRing):
    lat = p.lattice
    base = p.basis(h)
    mod = p.level_module(h)
    # greedy T-generators among the lattice basis
    chosen = []
    span = _zeros(mod.rank, 0)
    for j in range(mod.rank):
        if span.shape[1] == mod.rank and zl.is_unimodular(span):
            break
        v = np.zeros((mod.rank, 1), dtype=np.int64)
        v[j, 0] = 1
        if span.shape[1] and zl.solve(span, v[:, 0]) is not None:
            continue
        chosen.append(j)
        span = mod.span(_eye(mod.rank)[:, chosen])
    n = len(chosen)
    gens = base[:, chosen]                              # in S_X^H coordinates
    x = copies_of_orbit(lat, h, n, p.universe)
    fn = free_module(p.ring, x)
    beta_space = hom_space(fn, p.free)
    beta = beta_space.morphism(np.concatenate([gens[:, k] for k in range(n)]))
    sigma_space = hom_space(p.free, fn)
    rows, rhs = [], []
    for o, (m, ho) in enumerate(sigma_space.orbits):
        bmat = beta.at(ho)
        blk = np.zeros((bmat.shape[0], sigma_space.dim), dtype=np.int64)
        blk[:, sigma_space.offsets[o]:sigma_space.offsets[o + 1]] = bmat
        rows.append(blk)
        rhs.append(split.retraction.at(ho) @ p.free.unit_vector(ho, m))
    c = zl.solve(np.concatenate(rows, axis=0), np.concatenate(rhs))
    if c is None:
        raise NotProjectiveError("no section of the generator map: evaluation is not projective")
    sigma = sigma_space.morphism(c)
    qmor = sigma.compose(beta)
    ends = hom_space(fn, fn)
    qc = ends.coords(qmor)
    q = np.stack([_row_from_level_vector(t, n, ends.block(qc, k)) for k in range(n)])
    return q, gens


def presentation_module(t: TwistedGroupRing, q: np.ndarray) -> tuple[TwistedModule, np.ndarray]:
    """``T^n Q`` as a lattice inside ``T^n``: (module on a basis, basis columns)."""
    n = q.shape[0]
    if n == 0:
        return TwistedModule(t, np.zeros((t.dim, 0, 0), dtype=np.int64)), _zeros(0, 0)
    img = zl.column_basis(t.row_action(q), n * t.dim)
    full = t.free_action(n)
    if img.shape[1] == 0:
        return TwistedModule(t, np.zeros((t.dim, 0, 0), dtype=np.int64)), img
    left = zl.solve(img.T, _eye(img.shape[1])).T
    return TwistedModule(t, np.stack([left @ full[i] @ img for i in range(t.dim)])), img


@dataclass
class HomIdentification:
    lhs: np.ndarray          # Yoneda coordinates (columns) of Hom(Φ(Q), M)
    rhs: np.ndarray          # tuples (v_1..v_n) in (M^H)^n coordinates (columns)
    bijection: np.ndarray    # rhs-coordinates of the images of the lhs basis
    ok: bool


def phi_hom_identification(ring: CoefficientRing, i: int, q: np.ndarray, m: ProjectiveModule) -> HomIdentification:
    """``Hom(Φ_i(Q), M) -> Hom_T(T^n Q, M^{H_i})``, ``f -> (f(1 ⊗ x_k))_k``."""
    lat = ring.lattice
    h = lat.relative(ring.universe).reps[i]
    t = level_twisted_ring(ring, h)
    n = q.shape[0]
    phi = phi_lift(ring, i, q)
    space, lhs = module_hom(phi, m)
    v = m.level_module(h)
    r = v.rank
    # rhs: (v_k) in V^n with Σ_j (1-Q)_{kj} v_j = 0
    one_minus = t.mat_identity(n) - q
    eqs = np.zeros((n * r, n * r), dtype=np.int64)
    for k in range(n):
        for j in range(n):
            eqs[k * r:(k + 1) * r, j * r:(j + 1) * r] = v.element_action(one_minus[k, j])
    rhs = zl.kernel(eqs, ncols=n * r) if n * r else _zeros(0, 0)
    images = []
    for col in range(lhs.shape[1]):
        c = lhs[:, col]
        parts = [m.coords(h, space.block(c, k)) for k in range(n)]
        images.append(np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64))
    img = np.stack(images, axis=1) if images else _zeros(n * r, 0)
    if img.shape[1] != rhs.shape[1]:
        return HomIdentification(lhs, rhs, img, False)
    if img.shape[1] == 0:
        return HomIdentification(lhs, rhs, _zeros(0, 0), True)
    coords = zl.solve(rhs, img)
    ok = coords is not None and zl.is_unimodular(coords)
    return HomIdentification(lhs, rhs, coords if coords is not None else img, bool(ok))


# -- Merling comparison functors ------------------------------------------------------

def merling_F(m: CoeffModule) -> tuple[TwistedModule, list[int]]:
    """``M^e / R-span(Σ_{K≠e} images of M^K)`` over ``S^e_θ[H]``, with the
    torsion of the quotient (empty when torsion-free)."""
    lat = m.lattice
    e = lat.trivial
    v = m.level_module(e)
    n = m.rank(e)
    cols = [m.mat(e, k, 0) for k in m.system.levels() if k != e and m.rank(k)]
    sub = np.concatenate(cols, axis=1) if cols else _zeros(n, 0)
    if sub.shape[1]:
        acts = m.act(e)
        sub = zl.column_basis(np.concatenate([acts[b] @ sub for b in range(acts.shape[0])], axis=1), n)
    q, _, torsion = quotient_twisted(v, sub)
    return q, torsion


def merling_Phi(ring: CoefficientRing, v: TwistedModule) -> CoeffModule:
    """The module with ``v`` at the trivial subgroup and 0 elsewhere."""
    lat = ring.lattice
    e = lat.trivial
    t = v.ring
    r = v.rank
    pos = {lab: k for k, lab in enumerate(t.labels)}

    def rank(l):
        return r if l == e else 0

    def mat(l, l2, a):
        if l == e and l2 == e:
            return v.action[t.index(0, pos[a])] if t.n == 1 and t.base_unit[0] == 1 else v.element_action(t.group_element(pos[a]))
        return _zeros(rank(l), rank(l2))

    system = TableSystem(lat, ring.universe, rank, mat)

    def act(l):
        if l != e:
            return np.zeros((ring.rank(l), 0, 0), dtype=np.int64)
        return np.stack([v.action[t.index(b, 0)] for b in range(t.n)])

    return TableModule(ring, system, act)


def merling_F_projective(p: ProjectiveModule) -> tuple[TwistedModule, np.ndarray, bool]:
    """``F(P)`` for ``P = im(e)`` presented by ``F(e)`` on ``F(S_X) ≅ T^{n}``
    (``n`` = number of free orbits).  Returns (F(P) by quotient, ``F(e)``,
    whether the two descriptions agree)."""
    lat = p.lattice
    e = lat.trivial
    t = level_twisted_ring(p.ring, e)
    fp, torsion = merling_F(p.as_module())
    space = p.ends
    free_orbits = [o for o, (_, h) in enumerate(space.orbits) if h == e]
    n = len(free_orbits)
    # F(S_X): coordinates of s ⊗ g·x_o  <->  (o, s·g)
    fs_index = {}
    free = p.free
    fx = free.fixed(e)
    k = len(fx)
    labels = {lab: w for w, lab in enumerate(t.labels)}
    for slot, o in enumerate(free_orbits):
        m0 = space.orbits[o][0]
        for a in p.universe.elements:
            x = p.gset.action[a][m0]
            for b in range(t.n):
                fs_index[b * k + fx.index(x)] = (slot, b, a)
    cvec = space.coords(p.e)
    q = np.zeros((n, n, t.dim), dtype=np.int64)
    # the quotient F(S_X) -> T^n sends s ⊗ (a·x_o) to s·a in slot o and kills non-free orbits
    proj = np.zeros((n * t.dim, free.rank(e)), dtype=np.int64)
    for idx, (slot, b, a) in fs_index.items():
        proj[slot * t.dim + t.index(b, labels[a]), idx] = 1
    for row, o in enumerate(free_orbits):
        img = proj @ space.block(cvec, o)
        q[row] = img.reshape(n, t.dim)
    pres, basis = presentation_module(t, q) if n else (TwistedModule(t, np.zeros((t.dim, 0, 0), dtype=np.int64)), None)
    agree = not torsion and np.array_equal(t.mat_mul(q, q), q) and pres.rank == fp.rank
    if agree and n:
        # the projection identifies P^e / (images) with T^n Q: compare as lattices
        b = p.basis(e)
        img = zl.column_basis(proj @ b, n * t.dim)
        agree = img.shape == basis.shape and np.array_equal(img, basis)
    return fp, q, bool(agree)


# -- induced modules and extension of scalars ----------------------------------------

class InducedModule(CoeffModule):
    """``I^K_H(M)`` for a module ``M`` over ``S|_H``; ``S`` acts on the summand of
    ``x`` through ``S.mat(J^x, J, x^-1)`` (Frobenius reciprocity)."""

    def __init__(self, ring_k: CoefficientRing, m: CoeffModule):
        sysm = induce_system(m.system, ring_k.universe)
        super().__init__(ring_k, sysm)
        self.base = m

    def _act(self, j):
        g = self.lattice.group
        ind = self.system
        ns = self.ring.rank(j)
        n = ind.rank(j)
        out = np.zeros((ns, n, n), dtype=np.int64)
        for p, off, nn, jx in ind.summands(j):
            x = ind.coords[p]
            conv = self.ring.system.mat(jx, j, g.inv(x))      # S^J -> S^{J^x}
            inner = self.base.act(jx)                          # (n_S(J^x), nn, nn)
            out[:, off:off + nn, off:off + nn] = np.einsum("cb,cij->bij", conv, inner)
        return out


def tensor_induction(t_k: TwistedGroupRing, t_h: TwistedGroupRing, h_in_k: Sequence[int],
                     v: TwistedModule) -> tuple[TwistedModule, np.ndarray, list[int]]:
    """``T_K ⊗_{T_H} V`` as the quotient of ``T_K ⊗_Z V`` by the balancing relations.

    ``h_in_k[w]`` is the ``T_K`` Weyl index of the ``w``-th element of ``T_H``'s
    group.  Returns the module, the projection ``T_K ⊗_Z V -> quotient`` and torsion.
    """
    dk, r = t_k.dim, v.rank
    emb = np.zeros((dk, t_h.dim), dtype=np.int64)
    for b in range(t_h.n):
        for w in range(t_h.w):
            emb[t_k.index(b, h_in_k[w]), t_h.index(b, w)] = 1
    # balancing against ring generators of T_H suffices: base basis and Weyl generators
    gens = [np.eye(t_h.dim, dtype=np.int64)[t_h.index(b, 0)] for b in range(t_h.n)]
    gens += [t_h.group_element(w) for w in range(1, t_h.w)]
    rels = []
    for u in gens:
        # column t*r + j: (t u) ⊗ m_j - t ⊗ u m_j
        right_u = np.einsum("s,sab->ab", emb @ u, t_k.right_mults)
        rels.append(np.kron(right_u, _eye(r)) - np.kron(_eye(dk), v.element_action(u)))
    sub = np.concatenate(rels, axis=1) if rels else _zeros(dk * r, 0)
    whole = TwistedModule(t_k, np.stack([np.kron(t_k.left_mults[i], _eye(r)) for i in range(dk)]))
    q, y, torsion = quotient_twisted(whole, sub)
    return q, y, torsion


@dataclass
class ExtensionCheck:
    rank_ok: bool
    unimodular: bool
    intertwines: bool
    torsion: list[int]

    @property
    def ok(self) -> bool:
        return self.rank_ok and self.unimodular and self.intertwines and not self.torsion


def extension_of_scalars_check(ring_k: CoefficientRing, m: CoeffModule) -> ExtensionCheck:
    """``I^K_H(M)^e ≅ T_K ⊗_{T_H} M^e`` via ``[x, m] -> x ⊗ m``."""
    lat = ring_k.lattice
    e = lat.trivial
    ind = InducedModule(ring_k, m)
    t_k = level_twisted_ring(ring_k, e)
    t_h = level_twisted_ring(m.ring, e)
    pos_k = {lab: w for w, lab in enumerate(t_k.labels)}
    h_in_k = [pos_k[lab] for lab in t_h.labels]
    v = m.level_module(e)
    q, y, torsion = tensor_induction(t_k, t_h, h_in_k, v)
    left = ind.level_module(e)
    r = v.rank
    # map: summand x (coset rep), basis j  ->  [ (1·x) ⊗ m_j ]
    cols = []
    for p, off, nn, _ in ind.system.summands(e):
        x = ind.system.coords[p]
        tx = t_k.group_element(pos_k[x])
        for j in range(nn):
            cols.append(y @ np.kron(tx, _eye(r)[j]))
    f = np.stack(cols, axis=1) if cols else _zeros(q.rank, 0)
    rank_ok = f.shape[0] == f.shape[1] == left.rank
    uni = rank_ok and zl.is_unimodular(f)
    inter = rank_ok and all(np.array_equal(f @ left.action[i], q.action[i] @ f) for i in range(t_k.dim))
    return ExtensionCheck(rank_ok, bool(uni), bool(inter), torsion)


# -- perfect complexes -------------------------------------------------------------

@dataclass
class LevelHomology:
    free_rank: int
    torsion: tuple[int, ...]

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion


@dataclass
class PerfectComplex:
    """``P_0 <- P_1 <- ... <- P_n`` with ``diffs[d-1]: S_{X_d} -> S_{X_{d-1}}``."""
    modules: list[ProjectiveModule]
    diffs: list[CoeffMorphism]

    def violations(self) -> list[str]:
        out = []
        for d in range(1, len(self.diffs)):
            comp = self.diffs[d - 1].compose(self.diffs[d])
            if not comp.is_zero():
                out.append(f"∂∂ != 0 at degree {d + 1}")
        for d, f in enumerate(self.diffs, start=1):
            lhs = self.modules[d - 1].e.compose(f).compose(self.modules[d].e)
            if not lhs.equals(f.compose(self.modules[d].e)):
                out.append(f"∂_{d} does not land in P_{d - 1}")
            if not f.is_natural():
                out.append(f"∂_{d} is not a morphism of systems")
        return out

    def homology(self, l: Subgroup) -> list[LevelHomology]:
        mods = self.modules
        out = []
        for d, p in enumerate(mods):
            b = p.basis(l)
            r = b.shape[1]
            if d > 0:
                dmat = mods[d - 1].coords(l, self.diffs[d - 1].at(l) @ b) if r and mods[d - 1].rank(l) else \
                    _zeros(mods[d - 1].rank(l), r)
                z = zl.kernel(dmat, ncols=r) if r else _zeros(0, 0)
            else:
                z = _eye(r)
            if d + 1 < len(mods) and mods[d + 1].rank(l) and z.shape[1]:
                nxt = mods[d + 1].basis(l)
                img = p.coords(l, self.diffs[d].at(l) @ nxt)
                inz = zl.coordinates(z, img)
                inv = zl.smith_invariants(inz)
            else:
                inv = []
            out.append(LevelHomology(z.shape[1] - len(inv), tuple(x for x in inv if x > 1)))
        return out


@dataclass
class PerfectInvariants:
    homology: dict[int, list[LevelHomology]]
    euler: K0ClassVector
    bounded: list[bool]


def perfect_invariants(c: PerfectComplex) -> PerfectInvariants:
    bad = c.violations()
    if bad:
        raise ValueError("; ".join(bad))
    p0 = c.modules[0]
    lat = p0.lattice
    rel = lat.relative(p0.universe)
    hom = {l.index: c.homology(l) for l in p0.free.system.levels()}
    euler = zero_class_vector(p0.ring)
    for d, p in enumerate(c.modules):
        v = k0_class_vector(p)
        euler = euler + v if d % 2 == 0 else euler - v
    bounded = []
    for i in range(len(rel)):
        ok = all(all(h.is_zero for h in hom[s.index]) for j in range(i + 1, len(rel)) for s in rel.classes[j])
        bounded.append(ok)
    return PerfectInvariants(hom, euler, bounded)


# -- random data (suites and tests) -------------------------------------------------

def ring_idempotents(ring: CoefficientRing, h: Subgroup, limit: int = 16) -> list[np.ndarray]:
    """Idempotents of ``S^H`` with 0/1 coordinates (a small sample)."""
    n = ring.rank(h)
    out = []
    for mask in range(min(1 << n, limit)):
        v = np.array([(mask >> i) & 1 for i in range(n)], dtype=np.int64)
        if np.array_equal(ring.mul(h, v, v), v):
            out.append(v)
    return out


def random_idempotent(ring: CoefficientRing, x: GSet, rng: random.Random, spread: int = 2,
                      tries: int = 5) -> CoeffMorphism:
    """``u (d + d a (1 - d)) u^-1`` with ``u = 1 + (1 - d) b d``: ``d`` a sum of
    level-ring idempotents on orbit generators, ``a, b`` random with Yoneda
    coordinates in ``[-spread, spread]``.  Retries until idempotent."""
    free = free_module(ring, x)
    space = hom_space(free, free)
    one = identity_morphism(free.system)
    for _ in range(tries):
        dc = np.zeros(space.dim, dtype=np.int64)
        for o, (m, h) in enumerate(space.orbits):
            idem = ring_idempotents(ring, h)
            choice = rng.choice(idem + [ring.unit[h.index]] * 2)
            v = np.zeros(free.rank(h), dtype=np.int64)
            fx = free.fixed(h)
            j = fx.index(m)
            v[np.arange(len(choice)) * len(fx) + j] = choice
            dc[space.offsets[o]:space.offsets[o + 1]] = v
        d = space.morphism(dc)
        a = space.morphism(np.array([rng.randint(-spread, spread) for _ in range(space.dim)], dtype=np.int64))
        b = space.morphism(np.array([rng.randint(-spread, spread) for _ in range(space.dim)], dtype=np.int64))
        e0 = d + d.compose(a).compose(one - d)
        z = (one - d).compose(b).compose(d)
        e = (one + z).compose(e0).compose(one - z)
        if e.is_idempotent():
            return e
    return identity_morphism(free.system)


def random_gset(lat: SubgroupLattice, rng: random.Random, max_orbits: int = 4, universe: Subgroup | None = None,
                max_size: int | None = None) -> GSet:
    u = universe or lat.whole
    subs = lat.subgroups_of(u)
    parts = []
    size = 0
    for _ in range(rng.randint(1, max_orbits)):
        h = rng.choice(subs)
        o = canonical_orbit(lat, h, u)
        if max_size is not None and size + o.size > max_size:
            continue
        parts.append(o)
        size += o.size
    return coproduct(*parts) if parts else empty_gset(lat, u)


def random_twisted_idempotent(t: TwistedGroupRing, n: int, rng: random.Random, idempotents=(),
                              spread: int = 2) -> np.ndarray:
    """Peirce-style idempotent ``u (d + d a (1-d)) u^-1`` over ``T``."""
    d = np.zeros((n, n, t.dim), dtype=np.int64)
    choices = [np.zeros(t.dim, dtype=np.int64), t.unit] + list(idempotents)
    for k in range(n):
        d[k, k] = rng.choice(choices)
    a = np.array([[[rng.randint(-spread, spread) if rng.random() < 0.3 else 0 for _ in range(t.dim)]
                   for _ in range(n)] for _ in range(n)], dtype=np.int64)
    b = np.array([[[rng.randint(-spread, spread) if rng.random() < 0.3 else 0 for _ in range(t.dim)]
                   for _ in range(n)] for _ in range(n)], dtype=np.int64)
    one = t.mat_identity(n)
    e0 = d + t.mat_mul(t.mat_mul(d, a), one - d)
    z = t.mat_mul(t.mat_mul(one - d, b), d)
    e = t.mat_mul(t.mat_mul(one + z, e0), one - z)
    if not np.array_equal(t.mat_mul(e, e), e):
        return d
    return e


def twisted_idempotents(t: TwistedGroupRing) -> list[np.ndarray]:
    """Idempotents of the base ring (0/1 coordinates) viewed inside ``T``."""
    out = []
    n = t.n
    for mask in range(1, min(1 << n, 16)):
        v = np.array([(mask >> i) & 1 for i in range(n)], dtype=np.int64)
        if np.array_equal(np.einsum("i,j,ijk->k", v, v, t.base_mult), v):
            x = np.zeros(t.dim, dtype=np.int64)
            x[np.arange(n) * t.w] = v
            out.append(x)
    return out


__all__ = [
    "NotProjectiveError", "TwistedGroupRing", "TwistedModule", "CoeffModule", "TableModule", "FreeModule",
    "FreeHomSpace", "ProjectiveModule", "SplitResult", "ClassComponent", "K0ClassVector", "LevelEvaluation",
    "HomIdentification", "InducedModule", "ExtensionCheck", "PerfectComplex", "LevelHomology",
    "PerfectInvariants", "twisted_group_ring", "level_twisted_ring", "find_ring_isomorphism",
    "group_ring_tensor", "twisted_s3_iso", "hom_twisted", "quotient_twisted", "free_module", "hom_space",
    "free_projective", "module_hom", "hom_rank", "projective_from_quotient", "generated_submodule",
    "isotropy_split", "zero_class_vector", "k0_class_vector", "copies_of_orbit", "phi_lift", "evaluate_level",
    "presentation_module", "phi_hom_identification", "merling_F", "merling_Phi", "merling_F_projective",
    "tensor_induction", "extension_of_scalars_check", "perfect_invariants", "ring_idempotents",
    "random_idempotent", "random_gset", "random_twisted_idempotent", "twisted_idempotents",
]
