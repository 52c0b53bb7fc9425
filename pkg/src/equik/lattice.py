"""Exact integer linear algebra on small dense matrices.

Hermite normal forms (with unimodular transforms) come from python-flint;
everything else here is built on top of them: kernels, images, integral
solving, saturation, quotient maps and Smith invariants.

Matrices are ``numpy`` int64 arrays.  Vectors are columns unless a function
says otherwise.
"""

from __future__ import annotations

import flint
import numpy as np

__all__ = [
    "as_int_matrix",
    "hnf_transform",
    "left_kernel",
    "kernel",
    "row_basis",
    "column_basis",
    "solve",
    "right_inverse",
    "coordinates",
    "saturate",
    "quotient_map",
    "smith_invariants",
    "unit_pivot_reduce",
    "rank",
    "is_unimodular",
]


def as_int_matrix(a, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    m = np.asarray(a)
    if m.dtype != object:
        m = m.astype(np.int64)
    if m.ndim == 1:
        m = m.reshape(-1, 1) if cols is None else m.reshape(-1, cols)
    if m.size == 0 and rows is not None and cols is not None:
        return np.zeros((rows, cols), dtype=np.int64)
    return m


_LLL_THRESHOLD = 1 << 24


def _to_flint(a: np.ndarray) -> flint.fmpz_mat:
    if a.dtype != object:
        return flint.fmpz_mat(a.tolist())
    return flint.fmpz_mat([[int(x) for x in row] for row in a.tolist()])


def _from_flint(m: flint.fmpz_mat) -> np.ndarray:
    return _from_rows(m.tolist(), m.nrows(), m.ncols())


def _from_rows(rows, nrows: int, ncols: int) -> np.ndarray:
    out = [[int(x) for x in row] for row in rows]
    try:
        return np.array(out, dtype=np.int64).reshape(nrows, ncols)
    except OverflowError:
        # exact big integers; numpy keeps them as Python ints
        return np.array(out, dtype=object).reshape(nrows, ncols)


def hnf_transform(a) -> tuple[np.ndarray, np.ndarray]:
    """Row Hermite form ``h`` of ``a`` and unimodular ``u`` with ``u @ a == h``."""
    a = as_int_matrix(a)
    m, n = a.shape
    if m == 0:
        return a.copy(), np.zeros((0, 0), dtype=np.int64)
    aug = np.concatenate([a, np.eye(m, dtype=np.int64)], axis=1)
    h = _from_flint(_to_flint(aug).hnf())
    return h[:, :n], h[:, n:]


def _hnf_left_kernel(a: np.ndarray) -> list[list]:
    m, n = a.shape
    aug = np.concatenate([a, np.eye(m, dtype=np.int64)], axis=1)
    rows = _to_flint(aug).hnf().tolist()
    return [r[n:] for r in rows if not any(r[:n])]


def left_kernel(a) -> np.ndarray:
    """Basis (as rows, in Hermite form) of ``{y : y @ a == 0}``."""
    a = as_int_matrix(a)
    m, n = a.shape
    if m == 0:
        return np.zeros((0, 0), dtype=np.int64)
    if n == 0:
        return np.eye(m, dtype=np.int64)
    keep = _hnf_left_kernel(a)
    if keep and max(abs(int(x)) for r in keep for x in r) > _LLL_THRESHOLD:
        keep = flint.fmpz_mat(keep).lll().tolist()
    return _from_rows(keep, len(keep), m)


def kernel(a, ncols: int | None = None) -> np.ndarray:
    """Saturated basis (as columns) of ``{x : a @ x == 0}``."""
    a = as_int_matrix(a)
    if a.shape[0] == 0:
        n = a.shape[1] if ncols is None else ncols
        return np.eye(n, dtype=np.int64)
    return left_kernel(a.T).T


def row_basis(a) -> np.ndarray:
    """Basis of the row lattice, in row Hermite form."""
    a = as_int_matrix(a)
    m, n = a.shape
    if m == 0 or n == 0:
        return np.zeros((0, n), dtype=np.int64)
    if m > 2 * n:
        # flint's HNF is slow on tall inputs: fold the rows in n at a time
        h = a[:0]
        for start in range(0, m, n):
            h = _hnf_rows(np.concatenate([h, a[start:start + n]]))
        return h
    return _hnf_rows(a)


def _hnf_rows(a: np.ndarray) -> np.ndarray:
    h = _from_flint(_to_flint(a).hnf())
    return h[h.any(axis=1)]


def column_basis(a, nrows: int | None = None) -> np.ndarray:
    """Canonical basis (as columns) of the lattice spanned by the columns."""
    a = as_int_matrix(a)
    if a.ndim == 2 and a.shape[1] == 0:
        n = a.shape[0] if nrows is None else nrows
        return np.zeros((n, 0), dtype=np.int64)
    return row_basis(a.T).T


def rank(a) -> int:
    a = as_int_matrix(a)
    if a.size == 0:
        return 0
    return int(_to_flint(a).rank())


def _congruence_lattice(h_rows: list[list[int]], d: int, dim: int) -> np.ndarray:
    """Row HNF basis of ``{v in Z^dim : h·v ≡ 0 (mod d) for every h}``."""
    basis = np.eye(dim, dtype=object)
    for h in h_rows:
        hv = np.array(h, dtype=object)
        vals = [int(x) % d for x in basis.dot(hv)]
        if not any(vals):
            continue
        # t·vals ≡ 0 (mod d): left kernel of the column (vals, d)
        col = np.array(vals + [d], dtype=object).reshape(-1, 1)
        t = left_kernel(col)[:, :dim].astype(object)
        gens = np.concatenate([t.dot(basis), d * np.eye(dim, dtype=object)])
        basis = row_basis(_from_rows(gens.tolist(), gens.shape[0], dim)).astype(object)
    return basis


def solve(a, b) -> np.ndarray | None:
    """An integer solution of ``a @ x == b`` or ``None``.

    ``b`` may be a vector or a matrix of right-hand sides (all-or-nothing).
    Over Q the reduced echelon form ``den·x_P = R_b - R_F x_F`` expresses the
    pivot unknowns through the free ones.  Integrality is a system of
    congruences mod ``den`` in the free unknowns and a selector ``s`` for
    the right-hand sides; its solution lattice is small (dimension = free
    unknowns + columns of ``b``) and a point with ``s = e_j`` gives column j.
    """
    a = as_int_matrix(a)
    single = np.ndim(b) == 1
    b = np.asarray(b)
    b = b.reshape(-1, 1) if single else b
    m, n = a.shape
    q = b.shape[1]
    if b.size == 0 or not b.any():
        out = np.zeros((n, q), dtype=np.int64)
        return out[:, 0] if single else out
    if n == 0:
        return None
    r, den, rk = _to_flint(np.concatenate([a.astype(object), b.astype(object)], axis=1)).rref()
    ech = r.tolist()[:rk]
    piv = [next(j for j, v in enumerate(row) if v) for row in ech]
    if any(p >= n for p in piv):
        return None
    d = int(den)
    if d < 0:
        d, ech = -d, [[-v for v in row] for row in ech]
    pset = set(piv)
    free = [j for j in range(n) if j not in pset]
    dim = q + len(free)
    rows = [[int(row[n + j]) for j in range(q)] + [-int(row[f]) for f in free] for row in ech]
    lat = _congruence_lattice(rows, d, dim) if d > 1 else np.eye(dim, dtype=object)
    top = lat[:q]
    if any(int(top[j, j]) != 1 for j in range(q)) or any(top[j, :j].any() for j in range(q)):
        return None
    # unitriangular selector block: back-substitute to points with s = e_j
    sel = [None] * q
    for j in reversed(range(q)):
        v = top[j].copy()
        for l in range(j + 1, q):
            c = int(v[l])
            if c:
                v = v - c * sel[l]
        sel[j] = v
    x = np.zeros((n, q), dtype=object)
    for j in range(q):
        y = sel[j][q:]
        for t, f in enumerate(free):
            x[f, j] = int(y[t])
        for row, p in zip(ech, piv):
            num = int(row[n + j]) - sum(int(row[f]) * int(y[t]) for t, f in enumerate(free))
            if num % d:
                return None
            x[p, j] = num // d
    if not np.array_equal(a.astype(object).dot(x), b.astype(object)):
        return None
    x = _from_rows(x.tolist(), n, q)
    return x[:, 0] if single else x


def right_inverse(y) -> np.ndarray | None:
    """Integer ``s`` with ``y @ s == 1`` (``y`` of full row rank), or ``None``."""
    y = as_int_matrix(y)
    q = y.shape[0]
    return solve(y, np.eye(q, dtype=np.int64))


def coordinates(basis, v) -> np.ndarray:
    """Coordinates of ``v`` (vector or columns) in the column ``basis``; raises if absent."""
    x = solve(basis, v)
    if x is None:
        raise ValueError("vector is not in the lattice spanned by the basis")
    return x


def saturate(b, nrows: int | None = None) -> np.ndarray:
    """Columns spanning ``(span_Q b) ∩ Z^n``."""
    b = as_int_matrix(b)
    if b.shape[1] == 0:
        n = b.shape[0] if nrows is None else nrows
        return np.zeros((n, 0), dtype=np.int64)
    y = left_kernel(b)
    if y.shape[0] == 0:
        return np.eye(b.shape[0], dtype=np.int64)
    return column_basis(kernel(y))


_PIVOT_LIMIT = 1 << 40


def unit_pivot_reduce(a, track: bool = False):
    """Eliminate ``±1`` pivots of ``a`` (rows = coordinates, columns = generators).

    Each step picks an entry ``a[i, j] = ±1`` (fewest fill-in first), sends
    ``e_i`` to ``-a[i, j]·(column j without row i)`` and drops row ``i``; the
    cokernel ``Z^n / colspan(a)`` is unchanged up to isomorphism.  Returns
    ``(rest, proj, steps)``: the reduced generators, the projection
    ``Z^n -> Z^m`` carrying ``colspan(a)`` onto ``colspan(rest)`` (``None``
    unless ``track``) and the number of pivots removed.
    """
    a = as_int_matrix(a)
    if a.dtype == object or a.size == 0:
        return a, (np.eye(a.shape[0], dtype=np.int64) if track else None), 0
    a = a[:, a.any(axis=0)].copy()
    proj = np.eye(a.shape[0], dtype=np.int64) if track else None
    steps = 0
    while a.size:
        unit = np.abs(a) == 1
        if not unit.any():
            break
        nz = a != 0
        row_nnz = nz.sum(axis=1)
        col_nnz = nz.sum(axis=0)
        cost = np.where(unit, np.outer(row_nnz - 1, col_nnz - 1), np.iinfo(np.int64).max)
        i, j = np.unravel_index(int(np.argmin(cost)), cost.shape)
        c = a[:, j] * a[i, j]                      # c[i] == 1
        upd = np.outer(c, a[i])
        if np.abs(a).max() + np.abs(upd).max() > _PIVOT_LIMIT:
            break
        a = a - upd
        a = np.delete(a, i, axis=0)
        a = a[:, a.any(axis=0)]
        if track:
            proj = np.delete(proj - np.outer(c, proj[i]), i, axis=0)
        steps += 1
    return a, proj, steps


def smith_invariants(a) -> list[int]:
    """Nonzero Smith invariants of ``a`` (diagonal of its Smith form)."""
    a = as_int_matrix(a)
    if a.size == 0:
        return []
    a, _, ones = unit_pivot_reduce(a)
    return [1] * ones + _smith_dense(a)


def _smith_dense(a: np.ndarray) -> list[int]:
    if a.size == 0:
        return []
    # same invariants as a basis of the row (or column) lattice, which is smaller
    if a.shape[0] > a.shape[1]:
        a = row_basis(a)
    elif a.shape[1] > a.shape[0]:
        a = row_basis(a.T)
    if a.size == 0:
        return []
    d = _from_flint(_to_flint(a).snf())
    k = min(d.shape)
    return [abs(int(d[i, i])) for i in range(k) if d[i, i] != 0]


def quotient_map(sub, n: int) -> tuple[np.ndarray, list[int]]:
    """Quotient of ``Z^n`` by the column span of ``sub``.

    Returns ``(y, torsion)`` where ``y`` (rows) is a surjection onto the free
    part, ``Z^n -> Z^q``, whose kernel is the saturation of ``sub``, and
    ``torsion`` lists the invariant factors > 1 of ``sub`` inside ``Z^n``.
    """
    sub = as_int_matrix(sub)
    if sub.size == 0:
        return np.eye(n, dtype=np.int64), []
    rest, proj, _ = unit_pivot_reduce(sub, track=True)
    if rest.shape[1] == 0:
        return proj, []
    torsion = [d for d in _smith_dense(rest) if d > 1]
    y = left_kernel(rest)
    return (y.dot(proj) if y.dtype == object else y @ proj), torsion


def is_unimodular(a) -> bool:
    a = as_int_matrix(a)
    if a.shape[0] != a.shape[1]:
        return False
    if a.shape[0] == 0:
        return True
    return abs(int(_to_flint(a).det())) == 1
