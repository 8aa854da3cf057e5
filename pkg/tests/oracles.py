"""Independent brute-force oracles used only by the tests.

Deliberately naive: they share no code with the package.
"""

import itertools
from fractions import Fraction


def all_maps(n):
    return [tuple(t) for t in itertools.product(range(n), repeat=n)]


def square_roots(image):
    n = len(image)
    return [g for g in itertools.product(range(n), repeat=n)
            if all(g[g[x]] == image[x] for x in range(n))]


def perm_pow(p, k):
    out = tuple(range(len(p)))
    for _ in range(k):
        out = tuple(p[x] for x in out)
    return out


def perm_has_root(sigma, k):
    sigma = tuple(sigma)
    return any(perm_pow(t, k) == sigma
               for t in itertools.permutations(range(len(sigma))))


def cycle_lengths(p):
    seen = set()
    out = []
    for v in range(len(p)):
        if v in seen:
            continue
        d = 0
        w = v
        while w not in seen:
            seen.add(w)
            w = p[w]
            d += 1
        out.append(d)
    return sorted(out)


def det(rows):
    """Exact determinant by cofactor expansion."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(rows[0][0])
    total = Fraction(0)
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        total += (-1) ** j * Fraction(rows[0][j]) * det(minor)
    return total


def rank(rows):
    """Rank as the largest non-vanishing square minor."""
    if not rows:
        return 0
    m, n = len(rows), len(rows[0])
    for k in range(min(m, n), 0, -1):
        for ri in itertools.combinations(range(m), k):
            for ci in itertools.combinations(range(n), k):
                if det([[rows[i][j] for j in ci] for i in ri]) != 0:
                    return k
    return 0


def in_simplex(vertices, x):
    """Membership by solving for barycentric weights with Cramer's rule.

    Only for full-dimensional simplices (m + 1 vertices in dimension m).
    """
    m = len(x)
    v0 = vertices[0]
    cols = [[vertices[i][r] - v0[r] for r in range(m)] for i in range(1, m + 1)]
    a = [[cols[j][r] for j in range(m)] for r in range(m)]
    d = det(a)
    b = [x[r] - v0[r] for r in range(m)]
    lam = []
    for j in range(m):
        aj = [row[:] for row in a]
        for r in range(m):
            aj[r][j] = b[r]
        lam.append(det(aj) / d)
    return all(t >= 0 for t in lam) and sum(lam) <= 1


def weights(vertices, x):
    """Barycentric weights of x in a full-dimensional simplex (Cramer)."""
    m = len(x)
    v0 = vertices[0]
    a = [[vertices[j + 1][r] - v0[r] for j in range(m)] for r in range(m)]
    d = det(a)
    lam = []
    for j in range(m):
        aj = [row[:] for row in a]
        for r in range(m):
            aj[r][j] = x[r] - v0[r]
        lam.append(det(aj) / d)
    return [1 - sum(lam)] + lam


def pl_locate(vertices, top, x):
    for s in top:
        lam = weights([vertices[i] for i in s], x)
        if all(t >= 0 for t in lam):
            return s, lam
    raise ValueError("outside")


def pl_eval(vertices, top, images, x, hit=None):
    """Evaluate a vertex-interpolated map by scanning every simplex."""
    s, lam = hit or pl_locate(vertices, top, x)
    return tuple(sum(l * images[i][k] for l, i in zip(lam, s))
                 for k in range(len(images[0])))
