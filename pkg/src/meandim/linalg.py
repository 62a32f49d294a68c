"""Exact linear algebra over the rationals.

Everything here works on tuples/lists of Fraction and never touches floats:
rank and determinant by fraction-free or plain Gaussian elimination, affine
independence and hull membership, exact squared distance to an affine hull,
and a small two-phase simplex solver for exact LP feasibility questions.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

Vec = tuple[Fraction, ...]


def vsub(a, b) -> Vec:
    return tuple(x - y for x, y in zip(a, b))


def vadd(a, b) -> Vec:
    return tuple(x + y for x, y in zip(a, b))


def vscale(c, a) -> Vec:
    return tuple(c * x for x in a)


def dot(a, b) -> Fraction:
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def sup_norm(a) -> Fraction:
    return max((abs(x) for x in a), default=Fraction(0))


def sq_norm(a) -> Fraction:
    return dot(a, a)


def rank(rows) -> int:
    """Row rank via Gaussian elimination on a working copy."""
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        r += 1
        if r == len(m):
            break
    return r


def det(rows) -> Fraction:
    """Determinant of a square matrix of rationals."""
    m = [list(map(Fraction, r)) for r in rows]
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("determinant needs a square matrix")
    sign = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    result = Fraction(sign)
    for i in range(n):
        result *= m[i][i]
    return result


def int_det(rows) -> int:
    """Bareiss fraction-free determinant for integer matrices."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if piv is None:
                return 0
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def affine_rank(points) -> int:
    """Dimension of the affine hull of the points (-1 for the empty family)."""
    pts = list(points)
    if not pts:
        return -1
    base = pts[0]
    return rank([vsub(p, base) for p in pts[1:]])


def is_affinely_independent(points) -> bool:
    pts = list(points)
    return affine_rank(pts) == len(pts) - 1


def in_affine_hull(p, points) -> bool:
    """Exact membership of p in the affine hull of the given points."""
    pts = list(points)
    if not pts:
        return False
    return affine_rank(pts + [p]) == affine_rank(pts)


def solve(a_rows, b) -> list[Fraction] | None:
    """One solution of A x = b over the rationals, or None if inconsistent."""
    m = [list(map(Fraction, row)) + [Fraction(v)] for row, v in zip(a_rows, b)]
    nrows = len(m)
    ncols = len(a_rows[0]) if a_rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    for i in range(r, nrows):
        if m[i][ncols] != 0:
            return None
    x = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        x[c] = m[i][ncols]
    return x


def affine_hull_distance_sq(p, points) -> Fraction:
    """Exact squared Euclidean distance from p to the affine hull of `points`."""
    pts = list(points)
    if not pts:
        raise ValueError("empty point family has no affine hull")
    base = pts[0]
    dirs = [vsub(q, base) for q in pts[1:]]
    # keep an independent spanning subset
    span: list[Vec] = []
    for d in dirs:
        if rank(span + [d]) > len(span):
            span.append(d)
    w = vsub(p, base)
    if not span:
        return sq_norm(w)
    gram = [[dot(u, v) for v in span] for u in span]
    rhs = [dot(u, w) for u in span]
    coeffs = solve(gram, rhs)
    assert coeffs is not None  # Gram matrix of independent vectors is invertible
    return sq_norm(w) - dot(rhs, coeffs)


def general_position(points, ambient_dim: int | None = None) -> bool:
    """True iff every subfamily of at most m+1 points is affinely independent.

    It suffices to test subfamilies of size exactly min(m+1, len(points)):
    subsets of an affinely independent family are affinely independent.
    """
    pts = list(points)
    if not pts:
        return True
    m = ambient_dim if ambient_dim is not None else len(pts[0])
    size = min(m + 1, len(pts))
    return all(is_affinely_independent(sub) for sub in combinations(pts, size))


# -- exact LP ----------------------------------------------------------------

def lp_max(objective, a_eq, b_eq):
    """Maximize objective . x subject to A x = b, x >= 0, exactly.

    Two-phase simplex with Bland's rule; every pivot is a Fraction operation,
    so the answer is exact. Returns (status, value, x) where status is one of
    'optimal', 'infeasible', 'unbounded'.
    """
    nvars = len(objective)
    rows = [list(map(Fraction, r)) for r in a_eq]
    rhs = [Fraction(v) for v in b_eq]
    for i in range(len(rows)):
        if rhs[i] < 0:
            rows[i] = [-x for x in rows[i]]
            rhs[i] = -rhs[i]
    m = len(rows)
    total = nvars + m  # artificial variables appended for phase 1
    tab = [rows[i] + [Fraction(int(j == i)) for j in range(m)] + [rhs[i]] for i in range(m)]
    basis = [nvars + i for i in range(m)]

    # phase 1: minimize the sum of artificial variables
    cost1 = [Fraction(0)] * nvars + [Fraction(1)] * m
    red = _reduced_costs(cost1, tab, basis, total)
    if _simplex_loop(tab, basis, red, total) == "unbounded" or -red[total] != 0:
        return "infeasible", None, None
    for i in range(m):  # drive leftover artificials out of the basis
        if basis[i] >= nvars:
            col = next((j for j in range(nvars) if tab[i][j] != 0), None)
            if col is not None:
                _pivot(tab, basis, i, col)
    keep = [i for i in range(len(tab)) if basis[i] < nvars]
    tab = [[tab[i][j] for j in range(nvars)] + [tab[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]

    # phase 2: minimize -objective
    cost2 = [-Fraction(c) for c in objective]
    red = _reduced_costs(cost2, tab, basis, nvars)
    if _simplex_loop(tab, basis, red, nvars) == "unbounded":
        return "unbounded", None, None
    x = [Fraction(0)] * nvars
    for i, b in enumerate(basis):
        x[b] = tab[i][-1]
    # phase 2 minimized -objective, whose optimum is -red[-1]; negate back
    return "optimal", red[-1], x


def _reduced_costs(cost, tab, basis, ncols):
    red = [Fraction(0)] * (ncols + 1)
    for j in range(ncols):
        red[j] = cost[j] - sum(cost[basis[i]] * tab[i][j] for i in range(len(tab)))
    red[ncols] = -sum(cost[basis[i]] * tab[i][-1] for i in range(len(tab)))
    return red


def _pivot(tab, basis, row, col):
    inv = 1 / tab[row][col]
    tab[row] = [x * inv for x in tab[row]]
    for i in range(len(tab)):
        if i != row and tab[i][col] != 0:
            f = tab[i][col]
            tab[i] = [x - f * y for x, y in zip(tab[i], tab[row])]
    basis[row] = col


def _simplex_loop(tab, basis, red, ncols):
    while True:
        col = next((j for j in range(ncols) if red[j] < 0), None)
        if col is None:
            return "optimal"
        best = None
        for i in range(len(tab)):
            if tab[i][col] > 0:
                ratio = tab[i][-1] / tab[i][col]
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:
            return "unbounded"
        row = best[1]
        _pivot(tab, basis, row, col)
        f = red[col]
        for j in range(ncols):
            red[j] -= f * tab[row][j]
        red[ncols] -= f * tab[row][-1]
        red[col] = Fraction(0)
