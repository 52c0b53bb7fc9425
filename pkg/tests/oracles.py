"""Brute-force reference implementations used to freeze expected values.

Nothing here shares code with the package beyond the group multiplication
table: subgroups come from subset closure, marks from direct fixed-point
counts, integer solutions from box search, Smith invariants from gcds of
minors.
"""

from fractions import Fraction
from itertools import combinations, product
from math import gcd


def det(m):
    """Exact determinant by Gaussian elimination over Q."""
    a = [[Fraction(x) for x in row] for row in m]
    n = len(a)
    out = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            a[c], a[p] = a[p], a[c]
            out = -out
        out *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return int(out)


def determinantal_divisors(m):
    """d_k = gcd of all k×k minors, for k = 1.. while nonzero."""
    rows, cols = len(m), len(m[0]) if m else 0
    out = []
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                g = gcd(g, det([[m[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        out.append(g)
    return out


def smith_by_minors(m):
    d = determinantal_divisors(m)
    return [d[0]] + [d[k] // d[k - 1] for k in range(1, len(d))] if d else []


def box_solve(a, b, box):
    """Every integer x in [-box, box]^n with a x = b (first hit only)."""
    n = len(a[0])
    for x in product(range(-box, box + 1), repeat=n):
        if all(sum(r[j] * x[j] for j in range(n)) == bi for r, bi in zip(a, b)):
            return list(x)
    return None


def closure(table, gens):
    elts = {0} | set(gens)
    while True:
        new = {table[a][b] for a in elts for b in elts} - elts
        if not new:
            return frozenset(elts)
        elts |= new


def all_subgroups(table):
    """Every subset containing the identity and closed under multiplication."""
    n = len(table)
    out = set()
    rest = list(range(1, n))
    for k in range(len(rest) + 1):
        for s in combinations(rest, k):
            elts = frozenset((0,) + s)
            if all(table[a][b] in elts for a in elts for b in elts):
                out.add(elts)
    return out


def inverse(table, a):
    return next(b for b in range(len(table)) if table[a][b] == 0)


def conjugate_set(table, s, x):
    xi = inverse(table, x)
    return frozenset(table[table[xi][a]][x] for a in s)


def conjugacy_classes_of_subgroups(table):
    subs = all_subgroups(table)
    classes, seen = [], set()
    for s in sorted(subs, key=lambda t: (len(t), sorted(t))):
        if s in seen:
            continue
        cls = {conjugate_set(table, s, x) for x in range(len(table))}
        seen |= cls
        classes.append(cls)
    return classes


def normalizer(table, s):
    return frozenset(x for x in range(len(table)) if conjugate_set(table, s, x) == s)


def left_cosets(table, h):
    seen, out = set(), []
    for g in range(len(table)):
        c = frozenset(table[g][x] for x in h)
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def fixed_cosets(table, h, k):
    """|(G/H)^K| by checking k·(gH) = gH for every coset."""
    return sum(1 for c in left_cosets(table, h)
               if all(frozenset(table[y][x] for x in c) == c for y in k))


def double_cosets(table, k, j, h):
    """The double cosets J x H inside K, as sets."""
    seen, out = set(), []
    for x in sorted(k):
        d = frozenset(table[table[a][x]][b] for a in j for b in h)
        if d not in seen:
            seen.add(d)
            out.append(d)
    return out


def action_orbits(act, universe, n):
    """Orbits of a permutation action given as act[g][x]."""
    seen, out = set(), []
    for x in range(n):
        if x in seen:
            continue
        o = {act[g][x] for g in universe}
        seen |= o
        out.append(sorted(o))
    return out
