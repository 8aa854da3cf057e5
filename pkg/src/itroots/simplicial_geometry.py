"""Exact-rational simplicial geometry.

Points are tuples of ``Fraction``. A simplex is a tuple of points. A
``SimplicialComplex`` stores a deduplicated vertex table and its maximal
simplices as sorted vertex-index tuples; the full face set is derived on
demand. Nothing in this module rounds.
"""

import csv
import itertools
import math
import random
from fractions import Fraction

# ---------------------------------------------------------------- vectors


def as_point(coords):
    return tuple(c if type(c) is Fraction else Fraction(c) for c in coords)


def sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def scale(t, a):
    return tuple(t * x for x in a)


def norm_inf(a):
    return max((abs(x) for x in a), default=Fraction(0))


def dist_inf(a, b):
    return max((abs(x - y) for x, y in zip(a, b)), default=Fraction(0))


def barycentre(points):
    k = len(points)
    return tuple(sum(c) / k for c in zip(*points))


def combination(weights, points):
    m = len(points[0])
    return tuple(sum(w * p[i] for w, p in zip(weights, points)) for i in range(m))


# ---------------------------------------------------------- linear algebra


def rank(rows):
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(r + 1, len(rows)):
            if rows[i][c] != 0:
                t = rows[i][c] / rows[r][c]
                rows[i] = [x - t * y for x, y in zip(rows[i], rows[r])]
        r += 1
        if r == len(rows):
            break
    return r


def det(a):
    n = len(a)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(a[0][0])
    if n == 2:
        return Fraction(a[0][0] * a[1][1] - a[0][1] * a[1][0])
    a = [list(map(Fraction, r)) for r in a]
    out = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            out = -out
        out *= a[c][c]
        for i in range(c + 1, n):
            if a[i][c] != 0:
                t = a[i][c] / a[c][c]
                a[i] = [x - t * y for x, y in zip(a[i], a[c])]
    return out


def solve(a, b):
    """Solve a x = b exactly; None if the system is inconsistent.

    ``a`` is a list of rows. Free variables, if any, are set to zero.
    """
    n = len(a[0]) if a else 0
    rows = [list(map(Fraction, r)) + [Fraction(v)] for r, v in zip(a, b)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                t = rows[i][c]
                rows[i] = [x - t * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = rows[i][n]
    return x


def inverse(a):
    n = len(a)
    rows = [list(map(Fraction, r)) + [Fraction(int(i == j)) for j in range(n)]
            for i, r in enumerate(a)]
    for c in range(n):
        piv = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if piv is None:
            return None
        rows[c], rows[piv] = rows[piv], rows[c]
        p = rows[c][c]
        rows[c] = [x / p for x in rows[c]]
        for i in range(n):
            if i != c and rows[i][c] != 0:
                t = rows[i][c]
                rows[i] = [x - t * y for x, y in zip(rows[i], rows[c])]
    return [r[n:] for r in rows]


def mat_vec(a, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


# ----------------------------------------------------------------- simplices


def _check_dims(points):
    dims = {len(p) for p in points}
    if len(dims) > 1:
        raise ValueError("points of different dimensions")
    return dims.pop() if dims else 0


def is_geometrically_independent(points):
    m = _check_dims(points)
    if len(points) <= 1:
        return True
    if len(points) > m + 1:
        return False
    if m == 2 and len(points) == 3:
        (a0, a1), (b0, b1), (c0, c1) = points
        return (b0 - a0) * (c1 - a1) != (b1 - a1) * (c0 - a0)
    diffs = [sub(p, points[0]) for p in points[1:]]
    if len(diffs) == m:
        return det(diffs) != 0
    return rank(diffs) == len(diffs)


def barycentric_coordinates(simplex, x):
    """Affine weights of x over the simplex vertices, or None off the hull."""
    simplex = [as_point(p) for p in simplex]
    x = as_point(x)
    _check_dims(simplex + [x])
    x0 = simplex[0]
    k = len(simplex) - 1
    if k == 0:
        return (Fraction(1),) if x == x0 else None
    m = len(x0)
    a = [[simplex[j + 1][i] - x0[i] for j in range(k)] for i in range(m)]
    sol = solve(a, sub(x, x0))
    if sol is None:
        return None
    return (1 - sum(sol),) + tuple(sol)


def in_simplex(simplex, x):
    al = barycentric_coordinates(simplex, x)
    return al is not None and all(t >= 0 for t in al)


def diameter(points):
    """Diameter in the max norm; attained at a pair of vertices."""
    return max((dist_inf(p, q) for p, q in itertools.combinations(points, 2)),
               default=Fraction(0))


def volume(simplex):
    """m-dimensional volume of an m-simplex in R^m."""
    m = len(simplex[0])
    if len(simplex) != m + 1:
        return Fraction(0)
    return abs(det([sub(p, simplex[0]) for p in simplex[1:]])) / math.factorial(m)


# ---------------------------------------------------------------- complexes


def faces(simplex_idx):
    s = tuple(simplex_idx)
    for k in range(1, len(s) + 1):
        yield from itertools.combinations(s, k)


class SimplicialComplex:
    """A finite simplicial complex in R^dim with exact vertices.

    ``top`` holds the maximal simplices as sorted index tuples. The face set
    ``simplices`` is the downward closure and is computed lazily.
    """

    def __init__(self, dim, vertices, top):
        self.dim = dim
        self.vertices = tuple(as_point(v) for v in vertices)
        for v in self.vertices:
            if len(v) != dim:
                raise ValueError("vertex of wrong dimension")
        self.top = tuple(sorted({tuple(sorted(s)) for s in top}))
        self._faces = None
        self._index = None
        self._inv = {}
        self._buckets = None
        self._vstar = None

    @classmethod
    def from_simplices(cls, dim, points_lists):
        """Build from simplices given as point lists, merging equal vertices."""
        index = {}
        verts = []
        top = []
        for s in points_lists:
            ids = []
            for p in s:
                p = as_point(p)
                if p not in index:
                    index[p] = len(verts)
                    verts.append(p)
                ids.append(index[p])
            top.append(ids)
        return cls(dim, verts, _maximal(top))

    def __len__(self):
        return len(self.top)

    def __eq__(self, other):
        if not isinstance(other, SimplicialComplex):
            return NotImplemented
        return self.dim == other.dim and self.geometric_simplices() == other.geometric_simplices()

    def geometric_simplices(self):
        return {frozenset(self.points(s)) for s in self.top}

    @property
    def simplices(self):
        if self._faces is None:
            out = set()
            for s in self.top:
                out.update(faces(s))
            self._faces = frozenset(out)
        return self._faces

    def index_of(self, p):
        if self._index is None:
            self._index = {v: i for i, v in enumerate(self.vertices)}
        return self._index.get(as_point(p))

    def points(self, s):
        return tuple(self.vertices[i] for i in s)

    def top_of_dim(self, k):
        return [s for s in self.top if len(s) == k + 1]

    def volume(self):
        return sum((volume(self.points(s)) for s in self.top), Fraction(0))

    def vertex_star(self):
        """Vertex index -> indices (into ``top``) of maximal simplices using it."""
        if self._vstar is None:
            vs = [[] for _ in self.vertices]
            for j, s in enumerate(self.top):
                for v in s:
                    vs[v].append(j)
            self._vstar = vs
        return self._vstar

    def bary_top(self, s, x):
        """Barycentric coordinates of x in the full-dimensional simplex s."""
        inv = self._inv.get(s)
        if inv is None:
            p = self.points(s)
            m = self.dim
            a = [[p[j + 1][i] - p[0][i] for j in range(m)] for i in range(m)]
            inv = inverse(a)
            if inv is None:
                raise ValueError("degenerate simplex")
            self._inv[s] = inv
        lam = mat_vec(inv, sub(x, self.vertices[s[0]]))
        return (1 - sum(lam),) + lam

    def _bucket_setup(self):
        pts = self.vertices
        lo = tuple(min(p[i] for p in pts) for i in range(self.dim))
        hi = tuple(max(p[i] for p in pts) for i in range(self.dim))
        res = max(1, int(round(len(self.top) ** (1 / max(self.dim, 1)))))
        span = tuple((h - l) or Fraction(1) for l, h in zip(lo, hi))
        buckets = {}
        for j, s in enumerate(self.top):
            p = self.points(s)
            ranges = []
            for i in range(self.dim):
                a = min(q[i] for q in p)
                b = max(q[i] for q in p)
                ranges.append(range(math.floor((a - lo[i]) * res / span[i]),
                                    math.floor((b - lo[i]) * res / span[i]) + 1))
            for cell in itertools.product(*ranges):
                buckets.setdefault(cell, []).append(j)
        self._buckets = (lo, span, res, buckets)

    def candidates(self, x):
        """Indices of maximal simplices whose bounding box may contain x."""
        if self._buckets is None:
            self._bucket_setup()
        lo, span, res, buckets = self._buckets
        cell = tuple(math.floor((x[i] - lo[i]) * res / span[i]) for i in range(self.dim))
        return buckets.get(cell, [])

    def find_top(self, x):
        """A maximal simplex containing x with its barycentric coordinates."""
        x = as_point(x)
        if getattr(self, "kuhn_r", None) is not None:
            return _kuhn_locate(self, x)
        base = getattr(self, "base", None)
        if base is not None:
            # refined copy of another complex: ask it first
            B, gone, fresh = base
            hit = B.find_top(x)
            if hit is not None and hit[0] != gone:
                return hit
            for s in fresh:
                al = self.bary_top(s, x)
                if all(t >= 0 for t in al):
                    return s, al
            return None
        for j in self.candidates(x):
            s = self.top[j]
            if len(s) == self.dim + 1:
                al = self.bary_top(s, x)
            else:
                al = barycentric_coordinates(self.points(s), x)
            if al is not None and all(t >= 0 for t in al):
                return s, al
        return None

    def to_dict(self):
        return {"dim": self.dim,
                "vertices": [[fmt_q(c) for c in v] for v in self.vertices],
                "simplices": [list(s) for s in self.top]}

    @classmethod
    def from_dict(cls, data):
        verts = [tuple(parse_q(c) for c in v) for v in data["vertices"]]
        return cls(int(data["dim"]), verts, _maximal(data["simplices"]))


def complex_to_json(K):
    """Compact JSON form: the build recipe when known, else the full listing."""
    recipe = getattr(K, "recipe", None)
    return dict(recipe) if recipe is not None else K.to_dict()


def complex_from_json(data):
    kind = data.get("kind")
    if kind == "kuhn":
        return kuhn_triangulation(int(data["m"]), int(data["r"]))
    if kind == "collar":
        K = complex_from_json(data["base"])
        R, _ = collar_refine(K, tuple(data["simplex"]), [parse_q(c) for c in data["center"]],
                             [parse_q(t) for t in data["scales"]])
        return R
    return SimplicialComplex.from_dict(data)


def _maximal(simplices):
    sets = sorted({tuple(sorted(s)) for s in simplices}, key=len, reverse=True)
    keep = []
    covered = set()
    for s in sets:
        if s in covered:
            continue
        keep.append(s)
        covered.update(faces(s))
    return keep


def fmt_q(q):
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_q(text):
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    return Fraction(str(text).strip())


def simplex_complex(simplex):
    """The complex made of one simplex and its faces."""
    p = [as_point(v) for v in simplex]
    return SimplicialComplex(len(p[0]), p, [range(len(p))])


# ------------------------------------------------------------- constructions


def barycentric_subdivision(K):
    """First barycentric subdivision: one new simplex per maximal face chain."""
    out = []
    for s in K.top:
        pts = K.points(s)
        for order in itertools.permutations(range(len(s))):
            out.append([barycentre([pts[i] for i in order[:k + 1]])
                        for k in range(len(s))])
    return SimplicialComplex.from_simplices(K.dim, out)


def mesh(K):
    if not K.top:
        raise ValueError("mesh of an empty complex")
    return max(diameter(K.points(s)) for s in K.top)


def kuhn_triangulation(m, r):
    """Freudenthal-Kuhn triangulation of [0,1]^m on an r^m grid."""
    if m < 1 or r < 1:
        raise ValueError("need m >= 1 and r >= 1")
    coords = [Fraction(i, r) for i in range(r + 1)]
    verts = [tuple(coords[i] for i in reversed(c))
             for c in itertools.product(range(r + 1), repeat=m)]
    # vertex index of integer point (a_0..a_{m-1}) is sum a_i (r+1)^i
    strides = [(r + 1) ** i for i in range(m)]
    perms = list(itertools.permutations(range(m)))
    top = []
    for cell in itertools.product(range(r), repeat=m):
        base = sum(c * st for c, st in zip(reversed(cell), strides))
        for perm in perms:
            idx = [base]
            cur = base
            for axis in perm:
                cur += strides[axis]
                idx.append(cur)
            top.append(tuple(sorted(idx)))
    K = SimplicialComplex.__new__(SimplicialComplex)
    K.dim = m
    K.vertices = tuple(verts)
    K.top = tuple(top)
    K._faces = None
    K._index = None
    K._inv = {}
    K._buckets = None
    K._vstar = None
    K.kuhn_r = r
    K.carrier_is_box = True
    K.recipe = {"kind": "kuhn", "m": m, "r": r}
    return K


def _kuhn_locate(K, x):
    # cell by floor, simplex by sorting the fractional offsets
    r = K.kuhn_r
    m = K.dim
    if any(c < 0 or c > 1 for c in x):
        return None
    cell, frac = [], []
    for c in x:
        a = min(math.floor(c * r), r - 1)
        cell.append(a)
        frac.append(c * r - a)
    order = sorted(range(m), key=lambda i: -frac[i])
    idx = sum(a * (r + 1) ** i for i, a in enumerate(cell))
    s = [idx]
    al = [1 - frac[order[0]]]
    for k, axis in enumerate(order):
        idx += (r + 1) ** axis
        s.append(idx)
        nxt = frac[order[k + 1]] if k + 1 < m else Fraction(0)
        al.append(frac[axis] - nxt)
    return tuple(s), tuple(al)


def open_face(simplex, x):
    """Indices of the vertices carrying positive weight, plus the weights."""
    al = barycentric_coordinates(simplex, x)
    if al is None or any(t < 0 for t in al):
        return None, al
    return tuple(i for i, t in enumerate(al) if t > 0), al


def insert_vertex(simplex, z):
    """Split a simplex at z into the pieces obtained by swapping z for each
    vertex of the face whose interior holds z."""
    simplex = [as_point(p) for p in simplex]
    z = as_point(z)
    support, al = open_face(simplex, z)
    if support is None:
        raise ValueError("point is outside the simplex")
    if len(support) == 1:
        raise ValueError("point is already a vertex")
    pieces = []
    for i in support:
        pieces.append(simplex[:i] + [z] + simplex[i + 1:])
    return SimplicialComplex.from_simplices(len(z), pieces)


def stellar_subdivide(K, z):
    """Insert z into a complex, splitting every maximal simplex that holds it."""
    z = as_point(z)
    if K.index_of(z) is not None:
        raise ValueError("point is already a vertex")
    hits = []
    for s in K.top:
        support, _ = open_face(K.points(s), z)
        if support is not None:
            hits.append((s, support))
    if not hits:
        raise ValueError("point is outside the carrier")
    hit_set = {s for s, _ in hits}
    out = [K.points(s) for s in K.top if s not in hit_set]
    for s, support in hits:
        pts = list(K.points(s))
        for i in support:
            out.append(pts[:i] + [z] + pts[i + 1:])
    return SimplicialComplex.from_simplices(K.dim, out)


def locate(K, x):
    """The unique simplex of K whose relative interior contains x."""
    hit = K.find_top(x)
    if hit is None:
        # slow path for complexes whose index misses x
        for s in K.top:
            al = barycentric_coordinates(K.points(s), x)
            if al is not None and all(t >= 0 for t in al):
                hit = (s, al)
                break
    if hit is None:
        raise ValueError("point is outside the carrier")
    s, al = hit
    return tuple(v for v, t in zip(s, al) if t > 0)


def star(K, sigma0):
    """Maximal simplices of K meeting sigma0 (a vertex-index tuple)."""
    s0 = tuple(sorted(sigma0))
    if s0 not in set(K.top) and s0 not in K.simplices:
        raise ValueError("simplex is not in the complex")
    vs = K.vertex_star()
    hit = set()
    for v in s0:
        hit.update(vs[v])
    return [K.top[j] for j in sorted(hit)]


def collar_refine(K, s, center, scales):
    """Replace the maximal simplex s by nested shrunken copies about center.

    ``scales`` is strictly decreasing in (0, 1). Each gap between consecutive
    copies is triangulated facet by facet with the staircase triangulation of
    a prism, using the vertex order of s so that shared faces agree. The
    boundary of s is untouched, so the result is still a proper complex.
    Returns the new complex and the innermost simplex as an index tuple.
    """
    s = tuple(sorted(s))
    if s not in K.top or len(s) != K.dim + 1:
        raise ValueError("need a maximal full-dimensional simplex")
    center = as_point(center)
    al = K.bary_top(s, center)
    if any(t <= 0 for t in al):
        raise ValueError("center must be interior")
    prev = 1
    for t in scales:
        if not 0 < t < prev:
            raise ValueError("scales must decrease inside (0, 1)")
        prev = t
    base = K.points(s)
    layers = [list(base)]
    for t in scales:
        layers.append([add(center, scale(Fraction(t), sub(p, center))) for p in base])
    m = K.dim
    new = []
    for outer, inner in zip(layers, layers[1:]):
        for skip in range(m + 1):
            lab = [i for i in range(m + 1) if i != skip]
            for k in range(m):
                new.append([outer[i] for i in lab[:k + 1]] + [inner[i] for i in lab[k:]])
    new.append(layers[-1])
    verts = list(K.vertices)
    index = {v: i for i, v in enumerate(verts)}
    top = [t for t in K.top if t != s]
    for simp in new:
        ids = []
        for p in simp:
            if p not in index:
                index[p] = len(verts)
                verts.append(p)
            ids.append(index[p])
        top.append(tuple(sorted(ids)))
    R = SimplicialComplex(K.dim, verts, top)
    R.carrier_is_box = getattr(K, "carrier_is_box", None)
    fresh = [tuple(sorted(index[p] for p in simp)) for simp in new]
    R.base = (K, s, fresh)
    if getattr(K, "recipe", None) is not None:
        R.recipe = {"kind": "collar", "base": K.recipe, "simplex": list(s),
                    "center": [fmt_q(c) for c in center],
                    "scales": [fmt_q(t) for t in scales]}
    inner = tuple(sorted(index[p] for p in layers[-1]))
    return R, inner


# ---------------------------------------------------------- generic points


def _box_contains(box, y):
    lo, hi = box
    return all(a <= c <= b for a, c, b in zip(lo, y, hi))


def perturb_generic(targets, radii, forbidden=None, box=None, seed=0,
                    budget=1000, denominator=2 ** 20, constraints=None):
    """Pick y_j near targets[j] so that prescribed subsets are independent.

    y_j lies in the open max-norm ball of radius radii[j] about targets[j],
    differs from forbidden[j], and stays in box = (lo, hi) when given. With
    ``constraints=None`` every subset of size <= m+1 must be independent;
    otherwise only the listed index tuples are checked. Points are placed in
    order and each is resampled until the constraints it completes hold.
    """
    targets = [as_point(t) for t in targets]
    radii = [Fraction(r) for r in radii]
    if len(radii) != len(targets):
        raise ValueError("targets and radii differ in length")
    if forbidden is not None and len(forbidden) != len(targets):
        raise ValueError("targets and forbidden differ in length")
    if any(r <= 0 for r in radii):
        raise ValueError("radii must be positive")
    if box is not None:
        box = (as_point(box[0]), as_point(box[1]))
    m = _check_dims(targets)
    rng = random.Random(seed)
    due = {}
    if constraints is not None:
        for c in constraints:
            c = tuple(c)
            if c:
                due.setdefault(max(c), []).append(c)
    out = []
    D = denominator
    for j, (z, r) in enumerate(zip(targets, radii)):
        bad = None if forbidden is None else as_point(forbidden[j])
        for _ in range(budget):
            y = tuple(c + r * Fraction(rng.randint(-(D - 1), D - 1), D) for c in z)
            if y == bad:
                continue
            if box is not None and not _box_contains(box, y):
                continue
            if constraints is None:
                ok = all(is_geometrically_independent([out[i] for i in sub_] + [y])
                         for k in range(1, min(m, j) + 1)
                         for sub_ in itertools.combinations(range(j), k))
            else:
                ok = True
                for c in due.get(j, ()):
                    pts = [out[i] if i != j else y for i in c]
                    if not is_geometrically_independent(pts):
                        ok = False
                        break
            if ok:
                out.append(y)
                break
        else:
            raise RuntimeError(f"retry budget exhausted at point {j}")
    return out


# ------------------------------------------------------ linear feasibility


def fourier_motzkin(ineqs, nvars):
    """Feasibility of {x : a.x <= b for (a, b) in ineqs}, with a witness.

    Returns a rational point or None. Variables are eliminated from the last
    to the first; the witness is rebuilt by choosing each coordinate at the
    midpoint of its admissible interval.
    """
    systems = [list(ineqs)]
    cur = list(ineqs)
    for v in range(nvars - 1, -1, -1):
        pos, neg, zero = [], [], []
        for a, b in cur:
            (pos if a[v] > 0 else neg if a[v] < 0 else zero).append((a, b))
        nxt = list(zero)
        for ap, bp in pos:
            for an, bn in neg:
                lp, ln = ap[v], -an[v]
                a = tuple(ln * x + lp * y for x, y in zip(ap, an))
                nxt.append((a, ln * bp + lp * bn))
        nxt = _dedupe(nxt)
        systems.append(nxt)
        cur = nxt
    for a, b in cur:
        if b < 0:
            return None
    x = [Fraction(0)] * nvars
    for v in range(nvars):
        sysv = systems[nvars - 1 - v]
        lo, hi = None, None
        for a, b in sysv:
            if a[v] == 0:
                continue
            rest = b - sum(a[i] * x[i] for i in range(v))
            bound = rest / a[v]
            if a[v] > 0:
                hi = bound if hi is None else min(hi, bound)
            else:
                lo = bound if lo is None else max(lo, bound)
        if lo is None and hi is None:
            x[v] = Fraction(0)
        elif lo is None:
            x[v] = hi
        elif hi is None:
            x[v] = lo
        else:
            if lo > hi:
                return None
            x[v] = (lo + hi) / 2
    return x


def _dedupe(ineqs):
    seen = set()
    out = []
    for a, b in ineqs:
        # normalise by the first nonzero coefficient's magnitude
        piv = next((abs(c) for c in a if c != 0), None)
        if piv is None:
            key = (a, 1 if b >= 0 else -1)
        else:
            key = (tuple(c / piv for c in a), b / piv)
        if key not in seen:
            seen.add(key)
            out.append((a, b))
    return out


def simplex_lp(c, a_eq, b_eq):
    """Maximise c.x subject to a_eq x = b_eq, x >= 0, exactly (Bland's rule).

    Returns (value, x), (None, None) if infeasible, or (inf, None) if
    unbounded.
    """
    m = len(a_eq)
    n = len(c)
    rows = []
    for r, b in zip(a_eq, b_eq):
        r = [Fraction(v) for v in r]
        b = Fraction(b)
        if b < 0:
            r = [-v for v in r]
            b = -b
        rows.append(r + [b])
    # phase one with artificials n..n+m-1
    tab = [r[:n] + [Fraction(int(i == j)) for j in range(m)] + [r[n]]
           for i, r in enumerate(rows)]
    basis = [n + i for i in range(m)]
    obj1 = [Fraction(0)] * n + [Fraction(-1)] * m
    _pivot_loop(tab, basis, obj1)
    if sum(tab[i][-1] for i, bv in enumerate(basis) if bv >= n) != 0:
        return None, None
    # drive artificial variables out of the basis where possible
    for i, bv in enumerate(basis):
        if bv >= n:
            col = next((j for j in range(n) if tab[i][j] != 0), None)
            if col is not None:
                _pivot(tab, basis, i, col)
    keep = [i for i, bv in enumerate(basis) if bv < n]
    tab = [tab[i][:n] + [tab[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]
    status = _pivot_loop(tab, basis, [Fraction(v) for v in c])
    if status == "unbounded":
        return math.inf, None
    x = [Fraction(0)] * n
    for i, bv in enumerate(basis):
        x[bv] = tab[i][-1]
    return sum(Fraction(ci) * xi for ci, xi in zip(c, x)), x


def _pivot(tab, basis, r, col):
    p = tab[r][col]
    tab[r] = [v / p for v in tab[r]]
    for i in range(len(tab)):
        if i != r and tab[i][col] != 0:
            t = tab[i][col]
            tab[i] = [x - t * y for x, y in zip(tab[i], tab[r])]
    basis[r] = col


def _pivot_loop(tab, basis, obj):
    ncols = len(tab[0]) - 1 if tab else len(obj)
    while True:
        # reduced costs
        red = []
        for j in range(ncols):
            if j in basis:
                red.append(Fraction(0))
                continue
            red.append(obj[j] - sum(obj[bv] * tab[i][j] for i, bv in enumerate(basis)))
        col = next((j for j in range(ncols) if red[j] > 0), None)
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
        _pivot(tab, basis, best[1], col)


def _intersection_system(P, Q):
    """Inequalities in the free parameters of the barycentric system.

    Variables are the weights lambda (for P) and mu (for Q). The equality
    constraints are solved for a pivot set; the remaining free weights
    parametrise the affine solution set, and nonnegativity of every weight
    becomes a list of inequalities in them.
    """
    P = [as_point(p) for p in P]
    Q = [as_point(q) for q in Q]
    m = _check_dims(P + Q)
    kp, kq = len(P), len(Q)
    n = kp + kq
    rows = []
    for i in range(m):
        rows.append([p[i] for p in P] + [-q[i] for q in Q] + [Fraction(0)])
    rows.append([Fraction(1)] * kp + [Fraction(0)] * kq + [Fraction(1)])
    rows.append([Fraction(0)] * kp + [Fraction(1)] * kq + [Fraction(1)])
    # reduced row echelon form
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                t = rows[i][c]
                rows[i] = [x - t * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(rows[i][n] != 0 for i in range(r, len(rows))):
        return None
    free = [c for c in range(n) if c not in pivots]
    # each weight as affine expression in the free weights: const + coeffs.t
    expr = {}
    for i, c in enumerate(pivots):
        expr[c] = (rows[i][n], tuple(-rows[i][f] for f in free))
    for k, f in enumerate(free):
        expr[f] = (Fraction(0), tuple(Fraction(int(k == j)) for j in range(len(free))))
    return free, expr, kp, kq


def _weights(expr, n, t):
    return [expr[c][0] + sum(a * b for a, b in zip(expr[c][1], t)) for c in range(n)]


def simplices_intersect(P, Q, method="fm"):
    """A point of P n Q as an exact rational, or None if they are disjoint."""
    setup = _intersection_system(P, Q)
    if setup is None:
        return None
    free, expr, kp, kq = setup
    n = kp + kq
    if method == "fm" and len(free) <= 6:
        # weight >= 0  <=>  -coeffs.t <= const
        ineqs = [(tuple(-a for a in expr[c][1]), expr[c][0]) for c in range(n)]
        t = fourier_motzkin(ineqs, len(free))
        if t is None:
            return None
    else:
        t = _lp_point(expr, n, len(free))
        if t is None:
            return None
    lam = _weights(expr, n, t)
    return combination(lam[:kp], [as_point(p) for p in P])


def _lp_point(expr, n, nfree):
    # t = t_plus - t_minus, slack s_c for each weight: coeffs.t + const - s = 0
    a, b = [], []
    for c in range(n):
        co = list(expr[c][1])
        a.append(co + [-x for x in co] + [Fraction(-int(i == c)) for i in range(n)])
        b.append(-expr[c][0])
    val, x = simplex_lp([0] * (2 * nfree + n), a, b)
    if x is None:
        return None
    return [x[i] - x[nfree + i] for i in range(nfree)]


def interior_intersection(P, Q):
    """A point with all barycentric weights in both P and Q positive.

    Maximises the smallest weight s by Fourier-Motzkin and returns the point
    realising s/2, or None if the relative interiors are disjoint.
    """
    setup = _intersection_system(P, Q)
    if setup is None:
        return None
    free, expr, kp, kq = setup
    n = kp + kq
    k = len(free)
    # variables (t_1..t_k, s); s - weight_c <= 0
    ineqs = [(tuple(-a for a in expr[c][1]) + (Fraction(1),), expr[c][0]) for c in range(n)]
    # eliminate t only, leaving bounds on s
    cur = ineqs
    for v in range(k - 1, -1, -1):
        pos, neg, zero = [], [], []
        for a, b in cur:
            (pos if a[v] > 0 else neg if a[v] < 0 else zero).append((a, b))
        nxt = list(zero)
        for ap, bp in pos:
            for an, bn in neg:
                lp, ln = ap[v], -an[v]
                nxt.append((tuple(ln * x + lp * y for x, y in zip(ap, an)), ln * bp + lp * bn))
        cur = _dedupe(nxt)
    s_hi = None
    for a, b in cur:
        if a[k] > 0:
            bound = b / a[k]
            s_hi = bound if s_hi is None else min(s_hi, bound)
        elif a[k] == 0 and b < 0:
            return None
    if s_hi is None or s_hi <= 0:
        return None
    s = s_hi / 2
    fixed = [(a[:k], b - a[k] * s) for a, b in ineqs]
    t = fourier_motzkin(fixed, k)
    if t is None:
        return None
    lam = _weights(expr, n, t)
    assert all(w > 0 for w in lam)
    return combination(lam[:kp], [as_point(p) for p in P])


# ---------------------------------------------------------------- output


def mesh_decay(K, levels):
    """(level, mesh) rows for successive barycentric subdivisions."""
    rows = [(0, mesh(K))]
    cur = K
    for l in range(1, levels + 1):
        cur = barycentric_subdivision(cur)
        rows.append((l, mesh(cur)))
    return rows


def write_mesh_csv(rows, stream):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["l", "mesh"])
    for l, ms in rows:
        w.writerow([l, fmt_q(ms)])
