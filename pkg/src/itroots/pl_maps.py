"""Piecewise affine maps given by vertex images on a simplicial complex.

The map is the barycentric interpolation of the vertex table, so it is
affine on every simplex and continuous across shared faces.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from itroots.simplicial_geometry import (
    as_point, combination, det, dist_inf, fmt_q, inverse, is_geometrically_independent,
    mesh, parse_q, sub)


class Evaluable:
    """A map of R^m given as a Python callable on exact points.

    ``lipschitz`` is a declared max-norm Lipschitz bound; ``omega`` a declared
    modulus of continuity. Any bound computed from them is only as good as
    the declaration.
    """

    def __init__(self, m, fn, lipschitz=None, omega=None, name=None):
        self.m = m
        self.fn = fn
        self.lipschitz = None if lipschitz is None else Fraction(lipschitz)
        if omega is None and self.lipschitz is not None:
            L = self.lipschitz
            omega = lambda t: L * t
        self.omega = omega
        self.name = name or getattr(fn, "__name__", "map")

    def __call__(self, x):
        return as_point(self.fn(as_point(x)))

    def __repr__(self):
        return f"Evaluable({self.name!r}, m={self.m})"


def identity_map(m):
    return Evaluable(m, lambda x: x, lipschitz=1, name="id")


def constant_map(c):
    c = as_point(c)
    return Evaluable(len(c), lambda x: c, lipschitz=0, name="const")


@dataclass(frozen=True)
class AffinePiece:
    simplex: tuple
    matrix: tuple
    offset: tuple

    def __call__(self, x):
        return tuple(sum(a * b for a, b in zip(row, x)) + o
                     for row, o in zip(self.matrix, self.offset))

    def operator_norm(self):
        return max((sum(abs(a) for a in row) for row in self.matrix), default=Fraction(0))

    def determinant(self):
        return det(self.matrix)


def _bounding_box(K):
    box = getattr(K, "_bbox", None)
    if box is None:
        box = (tuple(min(p[i] for p in K.vertices) for i in range(K.dim)),
               tuple(max(p[i] for p in K.vertices) for i in range(K.dim)))
        K._bbox = box
    return box


def _carrier_is_box(K):
    flag = getattr(K, "carrier_is_box", None)
    if flag is None:
        lo = [min(p[i] for p in K.vertices) for i in range(K.dim)]
        hi = [max(p[i] for p in K.vertices) for i in range(K.dim)]
        box = Fraction(1)
        for a, b in zip(lo, hi):
            box *= b - a
        flag = K.volume() == box
        K.carrier_is_box = flag
    return flag


class PLMap:
    def __init__(self, K, images, codomain="carrier"):
        images = [as_point(y) for y in images]
        if len(images) != len(K.vertices):
            raise ValueError("need exactly one image per vertex")
        self.K = K
        self.images = tuple(images)
        self._pieces = {}
        if codomain == "carrier":
            self._check_carrier()
        elif codomain is not None:
            lo, hi = as_point(codomain[0]), as_point(codomain[1])
            for y in images:
                if not all(a <= c <= b for a, c, b in zip(lo, y, hi)):
                    raise ValueError(f"image {y} outside the codomain")

    @property
    def m(self):
        return self.K.dim

    def _check_carrier(self):
        K = self.K
        if _carrier_is_box(K):
            lo, hi = _bounding_box(K)
            for y in self.images:
                if not all(a <= c <= b for a, c, b in zip(lo, y, hi)):
                    raise ValueError(f"image {y} leaves the carrier")
        else:
            for y in self.images:
                if K.find_top(y) is None:
                    raise ValueError(f"image {y} leaves the carrier")

    def __call__(self, x):
        return evaluate(self, x)

    def piece(self, s):
        p = self._pieces.get(s)
        if p is None:
            p = affine_piece(self, s)
            self._pieces[s] = p
        return p

    def to_dict(self):
        return {"images": [[fmt_q(c) for c in y] for y in self.images]}

    @classmethod
    def from_dict(cls, K, data, codomain="carrier"):
        return cls(K, [[parse_q(c) for c in y] for y in data["images"]], codomain)


def interpolate(K, images, codomain="carrier"):
    return PLMap(K, images, codomain)


def evaluate(f, x):
    x = as_point(x)
    hit = f.K.find_top(x)
    if hit is None:
        raise ValueError(f"point {x} is outside the carrier")
    s, al = hit
    return combination(al, [f.images[i] for i in s])


def sup_distance_vertices(f, g):
    if f.K is not g.K and (f.K.vertices != g.K.vertices or f.K.top != g.K.top):
        raise ValueError("maps live on different complexes")
    return max((dist_inf(a, b) for a, b in zip(f.images, g.images)), default=Fraction(0))


def complex_mesh(K):
    r = getattr(K, "kuhn_r", None)
    if r is not None:
        return Fraction(1, r)
    ms = getattr(K, "_mesh", None)
    if ms is None:
        ms = mesh(K)
        K._mesh = ms
    return ms


def sup_distance_to_function(f, h, omega=None):
    """Certified upper bound on sup |f - h| from vertex errors and omega."""
    omega = omega or h.omega
    if omega is None:
        raise ValueError("a modulus of continuity is required")
    err = max(dist_inf(y, h(x)) for x, y in zip(f.K.vertices, f.images))
    return err + 2 * Fraction(omega(complex_mesh(f.K)))


_SHAPE_INV = {}


def _edge_inverse(pts):
    diffs = tuple(sub(p, pts[0]) for p in pts[1:])
    inv = _SHAPE_INV.get(diffs)
    if inv is None:
        m = len(diffs)
        a = [[diffs[j][i] for j in range(m)] for i in range(m)]
        inv = inverse(a)
        if inv is None:
            raise ValueError("degenerate simplex")
        if len(_SHAPE_INV) < 4096:
            _SHAPE_INV[diffs] = inv
    return inv


def affine_piece(f, s):
    """The affine map x -> A x + b agreeing with f on the m-simplex s."""
    s = tuple(s)
    if len(s) != f.m + 1:
        raise ValueError("need a full-dimensional simplex")
    pts = f.K.points(s)
    ys = [f.images[i] for i in s]
    inv = _edge_inverse(pts)
    m = f.m
    dy = [sub(y, ys[0]) for y in ys[1:]]
    # A = Y X^{-1} with X, Y holding edge vectors as columns
    A = tuple(tuple(sum(dy[k][i] * inv[k][j] for k in range(m)) for j in range(m))
              for i in range(m))
    b = tuple(ys[0][i] - sum(A[i][j] * pts[0][j] for j in range(m)) for i in range(m))
    return AffinePiece(s, A, b)


def top_simplices(f):
    return [s for s in f.K.top if len(s) == f.m + 1]


def scaled_images(f, max_bits=4096):
    """(D, integer images) with images = ints / D, or None if D is huge."""
    cached = getattr(f, "_scaled", False)
    if cached is not False:
        return cached
    D = 1
    for y in f.images:
        for c in y:
            q = c.denominator
            if D % q:
                D = D // math.gcd(D, q) * q
                if D.bit_length() > max_bits:
                    f._scaled = None
                    return None
    out = (D, [tuple(c.numerator * (D // c.denominator) for c in y) for y in f.images])
    f._scaled = out
    return out


def lipschitz_constant(f):
    r = getattr(f.K, "kuhn_r", None)
    scaled = scaled_images(f) if r is not None else None
    if scaled is None:
        return max((affine_piece(f, s).operator_norm() for s in top_simplices(f)),
                   default=Fraction(0))
    # Kuhn simplices, sorted by index, walk one axis step of 1/r at a time,
    # so each column of the slope matrix is r times an image difference
    D, ys = scaled
    m = f.m
    worst = 0
    for s in f.K.top:
        for i in range(m):
            tot = 0
            prev = ys[s[0]][i]
            for v in s[1:]:
                cur = ys[v][i]
                tot += abs(cur - prev)
                prev = cur
            if tot > worst:
                worst = tot
    return Fraction(worst * r, D)


def _int_det(rows):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    if n == 3:
        (a, b, c), (d, e, g), (h, i, j) = rows
        return a * (e * j - g * i) - b * (d * j - g * h) + c * (d * i - e * h)
    return det([[Fraction(x) for x in row] for row in rows])


def non_injective_pieces(f, simplices=None):
    """Full-dimensional simplices on which f is not injective."""
    m = f.m
    tops = [s for s in (f.K.top if simplices is None else simplices) if len(s) == m + 1]
    scaled = scaled_images(f)
    if scaled is None:
        return [s for s in tops if not restriction_injective(f, s)]
    ys = scaled[1]
    bad = []
    for s in tops:
        y0 = ys[s[0]]
        rows = [tuple(a - b for a, b in zip(ys[v], y0)) for v in s[1:]]
        if _int_det(rows) == 0:
            bad.append(s)
    return bad


def restriction_injective(f, s):
    return is_geometrically_independent([f.images[i] for i in s])


def image_simplex(f, s):
    if not restriction_injective(f, s):
        raise ValueError("piece is not injective")
    return tuple(f.images[i] for i in s)


def unit_grid(m, step):
    """All points of [0,1]^m whose coordinates are multiples of step."""
    step = Fraction(step)
    n = 1 / step
    if n.denominator != 1:
        raise ValueError("grid step must divide 1")
    n = int(n)
    coords = [Fraction(i, n) for i in range(n + 1)]
    return list(itertools.product(coords, repeat=m))


def lipschitz_of(g):
    if isinstance(g, PLMap):
        return lipschitz_constant(g)
    if getattr(g, "lipschitz", None) is None:
        raise ValueError(f"no Lipschitz bound declared for {g!r}")
    return g.lipschitz


def certified_composition_distance(g, h, grid_step, lip_g=None, lip_h=None, m=None,
                                   lip_gg=None):
    """Upper bound on sup |g(g(x)) - h(x)| over [0,1]^m.

    Grid residual plus (L_g^2 + L_h) * grid_step; sound whenever the
    Lipschitz bounds are. ``lip_gg`` (or a ``square_lipschitz`` attribute on
    g) replaces L_g^2 by a sharper bound for g o g itself: either a number,
    or a function of a grid point bounding it on the grid_step ball there.
    """
    m = m or getattr(g, "m", None)
    step = Fraction(grid_step)
    Lh = Fraction(lip_h) if lip_h is not None else lipschitz_of(h)
    if lip_gg is None:
        lip_gg = getattr(g, "square_lipschitz", None)
    if lip_gg is None:
        Lg = Fraction(lip_g) if lip_g is not None else lipschitz_of(g)
        lip_gg = Lg * Lg
    local = lip_gg if callable(lip_gg) else None
    worst = None
    for x in unit_grid(m, step):
        d = dist_inf(g(g(x)), h(x))
        if local is not None:
            d += (Fraction(local(x)) + Lh) * step
        if worst is None or d > worst:
            worst = d
    if local is None:
        worst += (Fraction(lip_gg) + Lh) * step
    return worst


def grid_residual(g, h, grid_step, m):
    return max(dist_inf(g(g(x)), h(x)) for x in unit_grid(m, grid_step))


def pl_from_function(K, h, codomain="carrier"):
    return PLMap(K, [h(x) for x in K.vertices], codomain)
