"""Pipelines on the unit cube: root-free perturbations, approximate squares,
interval obstructions and extensions to squares.

Every pipeline returns plain data plus the exact witnesses it relied on, so
a caller can re-check the claims without trusting this module.
"""

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from itroots import permutation_roots
from itroots.pl_maps import (
    Evaluable, PLMap, certified_composition_distance, evaluate, image_simplex,
    lipschitz_constant, non_injective_pieces, restriction_injective, sup_distance_to_function,
    sup_distance_vertices)
from itroots.simplicial_geometry import (
    SimplicialComplex, add, as_point, barycentre, barycentric_coordinates, collar_refine,
    dist_inf, fmt_q, interior_intersection, inverse, kuhn_triangulation,
    parse_q, perturb_generic, scale, simplices_intersect, star, sub)


class ConstructionError(RuntimeError):
    """A pipeline step could not be carried out; ``step`` names it."""

    def __init__(self, step, message):
        super().__init__(f"{step}: {message}")
        self.step = step


def _q(p):
    return [fmt_q(c) for c in p]


def _unq(p):
    return tuple(parse_q(c) for c in p)


def _unit_box(m):
    return ((Fraction(0),) * m, (Fraction(1),) * m)


def _in_unit_cube(y):
    return all(0 <= c <= 1 for c in y)


# ------------------------------------------------------------ approximation


@dataclass
class ApproxResult:
    map: PLMap
    bound: Fraction
    resolution: int
    eps: Fraction


def grid_resolution(omega, eps):
    """Smallest r with omega(4/r) < eps/10."""
    eps = Fraction(eps)

    def ok(r):
        return Fraction(omega(Fraction(4, r))) < eps / 10

    hi = 1
    while not ok(hi):
        hi *= 2
        if hi > 2 ** 24:
            raise ConstructionError("resolution", "modulus never drops below eps/10")
    lo = hi // 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid
    return hi


def approximate_pl(h, eps, m=None, seed=0, omega=None, budget=1000):
    """A generic piecewise affine f0 with certified sup distance to h below eps/6.

    Vertex images are drawn within eps/20 of h, avoid the vertex itself, stay
    in the cube, and make every top simplex's image tuple independent.
    """
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    m = m or h.m
    omega = omega or h.omega
    if omega is None:
        raise ValueError("a modulus of continuity is required")
    r = grid_resolution(omega, eps)
    K = kuhn_triangulation(m, r)
    targets = []
    for x in K.vertices:
        y = h(x)
        if not _in_unit_cube(y):
            raise ConstructionError("approximate", f"h leaves the cube at {x}")
        targets.append(y)
    try:
        images = perturb_generic(targets, [eps / 20] * len(targets), forbidden=K.vertices,
                                 box=_unit_box(m), seed=seed, budget=budget,
                                 constraints=K.top)
    except RuntimeError as exc:
        raise ConstructionError("approximate", str(exc)) from exc
    f0 = PLMap(K, images)
    bound = sup_distance_to_function(f0, h, omega)
    if not bound < eps / 6:
        raise ConstructionError("approximate", f"certified bound {bound} is not below eps/6")
    return ApproxResult(f0, bound, r, eps)


# ----------------------------------------------------------- no-root maps


@dataclass
class NoRootCertificate:
    """Exact witnesses that a PL map has no square root, even a discontinuous one.

    The map is constant ``v0`` on ``sigma0`` and moves ``v0``. The open set of
    points of ``sigma_star`` sent into ``sigma0`` gives v0 an uncountable
    second preimage. Every other fibre is countable provided each top
    simplex other than sigma0 is mapped injectively, which is what the
    ledger records.
    """

    sigma0: tuple
    sigma0_points: tuple
    v0: tuple
    f_v0: tuple
    sigma_star: tuple
    witness: tuple
    ledger_checked: int
    ledger_failed: list
    log: dict = field(default_factory=dict)
    pattern: str = "uncountable second preimage, countable other fibres"

    def to_dict(self):
        return {
            "sigma0": list(self.sigma0),
            "sigma0_points": [_q(p) for p in self.sigma0_points],
            "v0": _q(self.v0),
            "f_v0": _q(self.f_v0),
            "sigma_star": list(self.sigma_star),
            "witness": _q(self.witness),
            "ledger": {"checked": self.ledger_checked,
                       "failed": [list(s) for s in self.ledger_failed]},
            "pattern": self.pattern,
            "log": self.log,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["sigma0"]), tuple(_unq(p) for p in d["sigma0_points"]),
                   _unq(d["v0"]), _unq(d["f_v0"]), tuple(d["sigma_star"]),
                   _unq(d["witness"]), int(d["ledger"]["checked"]),
                   [tuple(s) for s in d["ledger"]["failed"]], dict(d.get("log", {})),
                   d.get("pattern", cls.pattern))

    def summary(self):
        lines = [f"constant simplex  {list(self.sigma0)}",
                 f"value v0          ({', '.join(_q(self.v0))})",
                 f"f(v0)             ({', '.join(_q(self.f_v0))})",
                 f"preimage simplex  {list(self.sigma_star)}",
                 f"overlap witness   ({', '.join(_q(self.witness))})",
                 f"injective pieces  {self.ledger_checked - len(self.ledger_failed)}"
                 f"/{self.ledger_checked}"]
        if self.ledger_failed:
            lines.append(f"non-injective     {[list(s) for s in self.ledger_failed[:6]]}"
                         + (" ..." if len(self.ledger_failed) > 6 else ""))
        return "\n".join(lines)


def _generic_start(f0, radius, seed):
    K = f0.K
    fixed = any(x == y for x, y in zip(K.vertices, f0.images))
    flat = bool(non_injective_pieces(f0))
    if not fixed and not flat:
        return f0, False
    imgs = perturb_generic(f0.images, [radius] * len(K.vertices), forbidden=K.vertices,
                           box=_unit_box(K.dim), seed=seed, constraints=K.top)
    return PLMap(K, imgs), True


def _interior_weights(k):
    """Barycentre first, then points drifting towards each vertex."""
    yield [Fraction(1, k)] * k
    for t in (Fraction(1, 4), Fraction(1, 8), Fraction(1, 16), Fraction(1, 32)):
        for j in range(k):
            yield [1 - (k - 1) * t if i == j else t for i in range(k)]


def _shrink_into(f0, sigma, K):
    """Step-2 search: a small simplex Y inside f0(sigma) and inside one top
    simplex Delta other than sigma, whose image lies inside one top simplex
    Delta1."""
    S = image_simplex(f0, sigma)
    for w in _interior_weights(len(S)):
        b = tuple(sum(wi * p[i] for wi, p in zip(w, S)) for i in range(len(S[0])))
        hit = K.find_top(b)
        if hit is None:
            continue
        delta, al = hit
        if delta == sigma or min(al) <= 0:
            continue
        piece = f0.piece(delta)
        hit1 = K.find_top(piece(b))
        if hit1 is None or min(hit1[1]) <= 0:
            continue
        delta1 = hit1[0]
        t = Fraction(1, 2)
        for _ in range(48):
            Y = [add(b, scale(t, sub(p, b))) for p in S]
            if all(min(K.bary_top(delta, y)) > 0 for y in Y) and \
                    all(min(K.bary_top(delta1, piece(y))) > 0 for y in Y):
                return b, delta, delta1, Y, piece
            t /= 2
    return None


def _collar_scales(K, delta, z0, Y, radius, max_depth):
    """Geometric scales about z0: the second innermost copy inside the
    separation ball and the innermost inside Y."""
    pts = K.points(delta)
    reach = max(dist_inf(p, z0) for p in pts)
    for q in (Fraction(1, 2), Fraction(1, 4), Fraction(1, 16), Fraction(1, 256)):
        for d in range(1, max_depth + 1):
            if reach * q ** (d - 1) >= radius:
                continue
            inner = [add(z0, scale(q ** d, sub(p, z0))) for p in pts]
            if all(min(barycentric_coordinates(Y, p)) > 0 for p in inner):
                return [q ** j for j in range(1, d + 1)]
    return None


def kill_square_root(f0, budget, seed=0, max_depth=8, tries=400):
    """Modify f0 near one point so the result provably has no square root.

    Returns ``(f, certificate)``. The change is local to a small star inside
    one simplex and moves vertex images by at most ``budget``.
    """
    budget = Fraction(budget)
    K = f0.K
    m = K.dim
    log = {}
    f0, moved = _generic_start(f0, budget / 4, seed)
    spend = budget * 3 / 4 if moved else budget
    log["generic_perturbation"] = moved
    L = lipschitz_constant(f0)
    log["lipschitz"] = fmt_q(L)
    tops = [s for s in K.top if len(s) == m + 1]
    n = len(tops)
    start = n // 2
    failure = ConstructionError("choose", "no candidate simplex")
    for k in range(min(tries, n)):
        sigma = tops[(start + k * 7919) % n]
        found = _shrink_into(f0, sigma, K)
        if found is None:
            failure = ConstructionError("choose", "no simplex with an interior image centre")
            continue
        z0, delta, delta1, Y, piece = found
        eps0 = dist_inf(z0, piece(z0))
        if eps0 == 0:
            failure = ConstructionError("separate", "centre point is fixed")
            continue
        dlt = eps0 / (4 * max(Fraction(1), L))
        radius = dlt / 2
        scales = _collar_scales(K, delta, z0, Y, radius, max_depth)
        if scales is None:
            failure = ConstructionError("refine", f"depth cap {max_depth} reached")
            continue
        depth = len(scales)
        R, inner = collar_refine(K, delta, z0, scales)
        around = star(R, inner)
        if any(dist_inf(R.vertices[v], z0) >= radius for s in around for v in s):
            failure = ConstructionError("refine", "star leaves the separation ball")
            continue
        nk = len(K.vertices)
        images0 = list(f0.images) + [piece(v) for v in R.vertices[nk:]]
        g0 = PLMap(R, images0)
        separated = all(
            simplices_intersect([piece(p) for p in R.points(a)], R.points(b)) is None
            for a in around for b in around)
        if not separated:
            failure = ConstructionError("separate", "image of the star meets the star")
            continue
        v0 = None
        for u in inner:
            cand = images0[u]
            if evaluate(g0, cand) != cand:
                v0 = cand
                break
        if v0 is None:
            failure = ConstructionError("collapse", "every candidate value is fixed")
            continue
        images = list(images0)
        for u in inner:
            images[u] = v0
        f = PLMap(R, images)
        gap = sup_distance_vertices(f, g0)
        if gap > spend:
            failure = ConstructionError("collapse", f"change {gap} exceeds budget {spend}")
            continue
        f_v0 = evaluate(f, v0)
        if f_v0 == v0:
            failure = ConstructionError("collapse", "v0 became fixed")
            continue
        witness = interior_intersection(image_simplex(f, sigma), R.points(inner))
        if witness is None:
            failure = ConstructionError("preimage", "no interior overlap with the constant simplex")
            continue
        failed = [s for s in non_injective_pieces(f) if s != inner]
        log.update({
            "delta": list(delta), "delta1": list(delta1), "z0": _q(z0),
            "displacement": fmt_q(eps0), "separation_radius": fmt_q(radius),
            "depth": depth, "collar_ratio": fmt_q(scales[0]), "change": fmt_q(gap),
            "total_change": fmt_q(sup_distance_vertices(f, PLMap(R, list(f0.images) + [
                piece(v) for v in R.vertices[nk:]]))),
        })
        cert = NoRootCertificate(inner, tuple(R.points(inner)), v0, f_v0, sigma, witness,
                                 sum(1 for s in R.top if len(s) == m + 1) - 1, failed, log)
        return f, cert
    raise failure


def verify_report(f, cert):
    """Re-run every exact check of a certificate against f; list of (name, ok, detail)."""
    out = []
    K = f.K
    m = K.dim
    tops = set(K.top)
    s0 = tuple(cert.sigma0)
    ok = s0 in tops and len(s0) == m + 1 and tuple(K.points(s0)) == tuple(cert.sigma0_points)
    out.append(("constant simplex present", ok, list(s0)))
    if not ok:
        return out
    const = all(f.images[i] == tuple(cert.v0) for i in s0)
    out.append(("constant on simplex", const, _q(cert.v0)))
    try:
        fv = evaluate(f, cert.v0)
        moved = fv != tuple(cert.v0)
    except ValueError:
        fv, moved = None, False
    out.append(("value is moved", moved, None if fv is None else _q(fv)))
    ss = tuple(cert.sigma_star)
    around = set(star(K, s0))
    distinct = ss in tops and ss != s0 and ss not in around
    out.append(("preimage simplex outside the star", distinct, list(ss)))
    if not distinct:
        return out
    inj = restriction_injective(f, ss)
    out.append(("preimage simplex injective", inj, list(ss)))
    if inj:
        img = image_simplex(f, ss)
        w = tuple(cert.witness)
        a = barycentric_coordinates(img, w)
        b = barycentric_coordinates(K.points(s0), w)
        interior = a is not None and b is not None and min(a) > 0 and min(b) > 0
        meets = simplices_intersect(img, K.points(s0)) is not None
        out.append(("interior overlap witness", interior and meets, _q(w)))
    failed = [s for s in non_injective_pieces(f) if s != s0]
    out.append(("injective off the constant simplex", not failed,
                [list(s) for s in failed[:12]]))
    return out


def verify_no_root_certificate(f, cert):
    return all(ok for _, ok, _ in verify_report(f, cert))


# ------------------------------------------------------- approximate squares


def _fan_piece(src, dst):
    """Affine map sending the triangle src onto dst vertex by vertex."""
    d0 = [sub(p, src[0]) for p in src[1:]]
    e0 = [sub(p, dst[0]) for p in dst[1:]]
    m = len(src[0])
    X = [[d0[j][i] for j in range(m)] for i in range(m)]
    inv = inverse(X)
    A = tuple(tuple(sum(e0[k][i] * inv[k][j] for k in range(m)) for j in range(m))
              for i in range(m))
    off = tuple(dst[0][i] - sum(A[i][j] * src[0][j] for j in range(m)) for i in range(m))
    return A, off


def _apply(piece, x):
    A, off = piece
    return tuple(sum(a * c for a, c in zip(row, x)) + o for row, o in zip(A, off))


def _row_norm(A):
    return max(sum(abs(a) for a in row) for row in A)


class CornerInvolution:
    """A piecewise affine involution of the square swapping the corner
    triangle {x - y >= k} at (1, 0) with the rest, fixing the edge x - y = k.

    Built as R o Psi on the triangle and Psi^-1 o R outside, where R is the
    reflection in that edge and Psi a fan map, centred at the edge midpoint,
    from the triangle onto the reflected complement.
    """

    def __init__(self, k):
        self.k = Fraction(k)
        k = self.k
        one, zero = Fraction(1), Fraction(0)
        self.corner = (one, zero)
        self.a, self.b = (k, zero), (one, 1 - k)
        mid = barycentre([self.a, self.b])
        chain_tri = [self.a, barycentre([self.a, self.corner]), self.corner,
                     barycentre([self.corner, self.b]), self.b]
        outer = [self.a, (zero, zero), (zero, one), (one, one), self.b]
        chain_ref = [self.reflect(p) for p in outer]
        self.tri_fan = [(mid, chain_tri[i], chain_tri[i + 1]) for i in range(4)]
        self.ref_fan = [(mid, chain_ref[i], chain_ref[i + 1]) for i in range(4)]
        self.out_fan = [(mid, outer[i], outer[i + 1]) for i in range(4)]
        self.fwd = [_fan_piece(s, t) for s, t in zip(self.tri_fan, self.ref_fan)]
        self.back = [_fan_piece(t, s) for s, t in zip(self.tri_fan, self.ref_fan)]
        self._tri_planes = [_halfplanes(t) for t in self.tri_fan]
        self._ref_planes = [_halfplanes(t) for t in self.ref_fan]

    def reflect(self, x):
        return (x[1] + self.k, x[0] - self.k)

    def in_triangle(self, x):
        return x[0] - x[1] >= self.k

    def _fan(self, planes, pieces, x):
        x1, x2 = x
        for hp, piece in zip(planes, pieces):
            if all(a * x1 + b * x2 <= c for a, b, c in hp):
                return _apply(piece, x)
        raise ValueError(f"point {x} outside the fan")

    def __call__(self, x):
        x = as_point(x)
        if self.in_triangle(x):
            return self.reflect(self._fan(self._tri_planes, self.fwd, x))
        return self._fan(self._ref_planes, self.back, self.reflect(x))

    def lipschitz_triangle(self):
        return max(_row_norm(A) for A, _ in self.fwd)

    def lipschitz_outside(self):
        return max(_row_norm(A) for A, _ in self.back)

    def describe(self):
        return {"kind": "corner fan involution", "corner": _q(self.corner),
                "edge": [_q(self.a), _q(self.b)],
                "triangle_fan": [[_q(p) for p in t] for t in self.tri_fan],
                "reflected_fan": [[_q(p) for p in t] for t in self.ref_fan]}


class EndInvolution:
    """The two-piece involution of [0,1] swapping [x0, s] with the rest."""

    def __init__(self, x0, s):
        self.x0, self.s = Fraction(x0), Fraction(s)
        self.far = 1 - self.x0
        self.len_in = abs(self.s - self.x0)
        self.len_out = abs(self.far - self.s)

    def in_triangle(self, x):
        return abs(x[0] - self.x0) <= self.len_in and (x[0] - self.x0) * (self.s - self.x0) >= 0

    def __call__(self, x):
        t = Fraction(as_point(x)[0])
        sgn = 1 if self.far > self.s else -1
        d = (t - self.s) * sgn
        if d <= 0:
            return (self.s + sgn * (-d) * self.len_out / self.len_in,)
        return (self.s - sgn * d * self.len_in / self.len_out,)

    def lipschitz_triangle(self):
        return self.len_out / self.len_in

    def lipschitz_outside(self):
        return self.len_in / self.len_out

    def describe(self):
        return {"kind": "interval exchange", "fixed": fmt_q(self.s), "end": fmt_q(self.x0)}


def _matmul(A, B):
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0])))
                 for i in range(len(A)))


def _square_slope(phi, f1):
    if isinstance(phi, EndInvolution):
        return phi.lipschitz_outside() * lipschitz_constant(f1) * phi.lipschitz_triangle()
    swap = ((Fraction(0), Fraction(1)), (Fraction(1), Fraction(0)))
    into = [_matmul(swap, A) for A, _ in phi.fwd]
    back = [_matmul(A, swap) for A, _ in phi.back]
    K = f1.K
    worst = Fraction(0)
    # fan i of sigma0 lands on sector i of C; f1 then moves part of each
    # (sector, piece) overlap into sector j. Only overlaps of positive area
    # count, since g o g is continuous.
    fans = phi.out_fan

    def overlaps(poly):
        for k, sector in enumerate(fans):
            if all(_inside(sector, p) for p in poly):
                return [(k, poly)]
        out = []
        for k, sector in enumerate(fans):
            part = _clip(poly, sector)
            if _area(part) > 0:
                out.append((k, part))
        return out

    for t in K.top:
        piece = f1.piece(t)
        for i, part in overlaps(K.points(t)):
            for j, _ in overlaps([piece(p) for p in part]):
                worst = max(worst, _row_norm(_matmul(back[j], _matmul(piece.matrix, into[i]))))
    return worst


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _area(poly):
    if len(poly) < 3:
        return Fraction(0)
    return abs(sum(_cross(poly[0], poly[k], poly[k + 1]) for k in range(1, len(poly) - 1))) / 2


def _halfplanes(tri):
    """Triples (a, b, c) with the triangle equal to {a x + b y <= c}."""
    sign = 1 if _cross(*tri) > 0 else -1
    out = []
    for p, q in zip(tri, tri[1:] + tri[:1]):
        # sign * cross(p, q, x) >= 0, written as a x + b y <= c
        a = sign * (q[1] - p[1])
        b = -sign * (q[0] - p[0])
        out.append((a, b, a * p[0] + b * p[1]))
    return out


def _inside(tri, x):
    sign = 1 if _cross(*tri) > 0 else -1
    return all(sign * _cross(a, b, x) >= 0 for a, b in zip(tri, tri[1:] + tri[:1]))


def _clip(poly, tri):
    """Convex polygon cut down to a triangle (Sutherland-Hodgman, exact)."""
    sign = 1 if _cross(*tri) > 0 else -1
    out = list(poly)
    for a, b in zip(tri, tri[1:] + tri[:1]):
        if not out:
            break
        src, out = out, []
        for p, q in zip(src, src[1:] + src[:1]):
            sp, sq = sign * _cross(a, b, p), sign * _cross(a, b, q)
            if sp >= 0:
                out.append(p)
            if (sp > 0 > sq) or (sp < 0 < sq):
                t = sp / (sp - sq)
                out.append(tuple(u + t * (v - u) for u, v in zip(p, q)))
    return out


@dataclass
class SquareApproxResult:
    g: Evaluable
    bound: Fraction
    eps: Fraction
    grid_step: Fraction
    log: dict

    def to_dict(self):
        return {"eps": fmt_q(self.eps), "grid_step": fmt_q(self.grid_step),
                "bound": fmt_q(self.bound), "log": self.log}


def _corner_symmetry(x0):
    """An isometry of the square, an involution, moving x0 to (1, 0).

    Kuhn triangles cut the cell at (1, 0) along its anti-diagonal, which is
    what makes the corner triangle a simplex of the grid.
    """
    flip = (x0[0] == 0, x0[1] == 1)

    def t(x):
        return tuple(1 - c if f else c for c, f in zip(x, flip))
    return t


def boundary_square_approx(h, x0, eps, grid_step=None, omega=None):
    """A map g whose square is certified within eps of h, for h fixing a
    boundary point x0 (an endpoint for m = 1, a corner for m = 2)."""
    x0 = as_point(x0)
    eps = Fraction(eps)
    m = len(x0)
    if m not in (1, 2):
        raise ValueError("only dimensions 1 and 2 are supported")
    if eps <= 0:
        raise ValueError("eps must be positive")
    if any(c not in (0, 1) for c in x0):
        raise ValueError("x0 must be an end point (m = 1) or a corner (m = 2)")
    if h(x0) != x0:
        raise ValueError("x0 is not an exact fixed point of h")
    omega = omega or h.omega
    Lh = h.lipschitz
    if omega is None or Lh is None:
        raise ValueError("h needs a declared Lipschitz bound")
    # delta < eps/4 with omega(delta) < eps/4
    dlt = eps / 4 * Fraction(63, 64)
    while not Fraction(omega(dlt)) < eps / 4:
        dlt /= 2
    r = math.floor(4 / dlt) + 1
    K = kuhn_triangulation(m, r)
    s = Fraction(1, r)
    if m == 1:
        tau = lambda x: as_point(x)
        corner = x0
        other = (x0[0] + s,) if x0[0] == 0 else (x0[0] - s,)
        phi = EndInvolution(x0[0], other[0])
        sigma0 = [corner, other]
    else:
        tau = _corner_symmetry(x0)
        corner = (Fraction(1), Fraction(0))
        a, b = (1 - s, Fraction(0)), (Fraction(1), s)
        phi = CornerInvolution(1 - s)
        sigma0 = [corner, a, b]
        other = a
    hu = lambda x: tau(h(tau(x)))
    s0_idx = tuple(sorted(K.index_of(p) for p in sigma0))
    assert s0_idx in set(K.top)

    def in_open_corner(y):
        # interior of sigma0 relative to the cube: sigma0 minus its far facet
        if m == 1:
            return dist_inf(y, corner) < s
        return y[0] - y[1] > 1 - s

    images, rule = [], {"kept": 0, "inside": 0, "redirected": 0}
    s0_set = set(s0_idx)
    for j, xj in enumerate(K.vertices):
        if j in s0_set:
            images.append(xj)
            rule["kept"] += 1
            continue
        yj = hu(xj)
        if in_open_corner(yj):
            images.append(as_point(other))
            rule["redirected"] += 1
        else:
            images.append(yj)
            rule["inside"] += 1
    f1 = PLMap(K, images)
    Lf1 = lipschitz_constant(f1)

    def gu(x):
        x = as_point(x)
        if phi.in_triangle(x):
            return evaluate(f1, phi(x))
        return phi(x)

    # f1 keeps C inside the halfplane x - y <= k, so on sigma0 the square is
    # phi_C o f1 o phi_sigma0 and its slope is bounded piece by piece
    near_lip = max(Lf1, _square_slope(phi, f1))

    def g(x):
        return tau(gu(tau(x)))

    step = Fraction(grid_step) if grid_step is not None else Fraction(1, 2 ** (10 if m == 1 else 8))

    def local(x):
        # sigma0 pieces of g o g only matter within one step of sigma0
        u = tau(x)
        if m == 1:
            gap = dist_inf(u, corner) - s
        else:
            gap = (1 - s - (u[0] - u[1])) / 2
        return near_lip if gap <= step else Lf1

    G = Evaluable(m, g, name="approximate square root")
    G.square_lipschitz = local
    G.f1 = f1
    G.phi = phi
    G.sigma0 = tuple(tau(p) for p in sigma0)
    bound = certified_composition_distance(G, h, step, lip_h=Lh, m=m)
    log = {"x0": _q(x0), "delta": fmt_q(dlt), "resolution": r,
           "sigma0": [_q(tau(p)) for p in sigma0], "involution": phi.describe(),
           "f1_rule_counts": rule, "f1_images": [_q(tau(y)) for y in images],
           "lipschitz_f1": fmt_q(Lf1), "lipschitz_square_near_sigma0": fmt_q(near_lip),
           "omega_declared": True}
    if not bound < eps:
        raise ConstructionError("certify", f"achieved bound {bound} is not below {eps}")
    return SquareApproxResult(G, bound, eps, step, log)


# --------------------------------------------------------- strip rotation


@dataclass
class StripExample:
    eps: Fraction
    f: Evaluable
    g: Evaluable
    g1: object
    g2: object
    square: object
    sup: Fraction


def strip_rotation_example(eps):
    """The map (x, y) -> (1 - x, 1/2) and an exact-rational g with g o g
    within eps/2 of it; g squeezes the square into a horizontal strip and
    turns the strip a quarter turn."""
    eps = Fraction(eps)
    if not 0 < eps < Fraction(1, 2):
        raise ValueError("eps must lie in (0, 1/2)")
    half = Fraction(1, 2)
    lo, hi = half - eps / 2, half + eps / 2

    def f(p):
        return (1 - p[0], half)

    def g1(p):
        x, y = p
        return (half + (2 * y - 1) / (2 * eps), half - eps * (2 * x - 1) / 2)

    def g2(p):
        x, y = p
        return (x, min(max(y, lo), hi))

    def g(p):
        return g1(g2(p))

    def square(p):
        # the three-strip closed form of g o g
        x, y = p
        if y <= lo:
            return (1 - x, hi)
        if y >= hi:
            return (1 - x, lo)
        return (1 - x, 1 - y)

    # g o g - f is affine on each strip, so its sup sits at strip corners
    sup = max(dist_inf(square((x, y)), f((x, y)))
              for x in (Fraction(0), Fraction(1)) for y in (Fraction(0), lo, hi, Fraction(1)))
    F = Evaluable(2, f, lipschitz=1, name="strip target")
    G = Evaluable(2, g, lipschitz=1 / eps, name="strip root")
    return StripExample(eps, F, G, g1, g2, square, sup)


# ------------------------------------------------------ interval obstruction


@dataclass
class IntervalVerdict:
    kind: str
    range: tuple
    fixed: list
    components: list
    permutation: tuple = None
    even_roots: dict = None
    reason: str = ""

    def to_dict(self):
        def comp(c):
            a, b, lo_open, hi_open = c
            return {"lo": fmt_q(a), "hi": fmt_q(b), "lo_open": lo_open, "hi_open": hi_open}
        return {"kind": self.kind, "range": [fmt_q(c) for c in self.range],
                "fixed": [[fmt_q(a), fmt_q(b)] for a, b in self.fixed],
                "components": [comp(c) for c in self.components],
                "permutation": None if self.permutation is None else list(self.permutation),
                "even_roots": self.even_roots, "reason": self.reason}


def _segments(f):
    K = f.K
    out = []
    for s in K.top:
        i, j = s
        a, b = K.vertices[i][0], K.vertices[j][0]
        fa, fb = f.images[i][0], f.images[j][0]
        if a > b:
            a, b, fa, fb = b, a, fb, fa
        out.append((a, b, fa, fb))
    return sorted(out)


def _merge(intervals):
    out = []
    for a, b in sorted(intervals):
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def _preimage(seg, lo, hi):
    """Closed sub-interval of the segment mapped into [lo, hi], or None."""
    a, b, fa, fb = seg
    if fa == fb:
        return (a, b) if lo <= fa <= hi else None
    ts = sorted([(lo - fa) / (fb - fa), (hi - fa) / (fb - fa)])
    t0, t1 = max(ts[0], Fraction(0)), min(ts[1], Fraction(1))
    if t0 > t1:
        return None
    return (a + t0 * (b - a), a + t1 * (b - a))


def interval_even_root_obstruction(f):
    """Decide, when the component argument applies, that a PL interval map
    has no continuous roots of even order."""
    if f.K.dim != 1:
        raise ValueError("need a map of an interval")
    segs = _segments(f)
    c = min(f.images)[0]
    d = max(f.images)[0]
    fixed = []
    for a, b, fa, fb in segs:
        da, db = fa - a, fb - b
        if da == 0 and db == 0:
            fixed.append((a, b))
        elif da == 0:
            fixed.append((a, a))
        elif db == 0:
            fixed.append((b, b))
        elif (da > 0) != (db > 0):
            t = da / (da - db)
            p = a + t * (b - a)
            fixed.append((p, p))
    fixed = [(max(a, c), min(b, d)) for a, b in _merge(fixed) if b >= c and a <= d]
    # components of range minus fixed set, as (lo, hi, lo_open, hi_open)
    comps = []
    cur, cur_open = c, False
    for a, b in fixed:
        if a > cur:
            comps.append((cur, a, cur_open, True))
        cur, cur_open = b, True
    if cur < d:
        comps.append((cur, d, cur_open, False))
    if c == d and not fixed:
        comps = [(c, c, False, False)]
    verdict = IntervalVerdict("Inconclusive", (c, d), fixed, comps)
    if not comps:
        verdict.reason = "the range consists of fixed points"
        return verdict
    # invariance: nothing off the fixed set may land on it
    for lo, hi in fixed:
        for seg in segs:
            pre = _preimage(seg, lo, hi)
            if pre is None:
                continue
            pa, pb = max(pre[0], c), min(pre[1], d)
            if pa > pb:
                continue
            if not any(fa <= pa and pb <= fb for fa, fb in fixed):
                verdict.reason = "a non-fixed point of the range is sent to a fixed point"
                return verdict

    def rep(comp):
        lo, hi, lo_open, hi_open = comp
        return (lo + hi) / 2 if lo < hi else lo

    def which(x):
        for k, (lo, hi, lo_open, hi_open) in enumerate(comps):
            if (lo < x or (x == lo and not lo_open)) and (x < hi or (x == hi and not hi_open)):
                return k
        return None

    perm = tuple(which(evaluate(f, (rep(cp),))[0]) for cp in comps)
    verdict.permutation = perm
    if None in perm or sorted(perm) != list(range(len(comps))):
        verdict.reason = "the induced map on components is not a permutation"
        return verdict
    ctype = permutation_roots.cycle_type(perm)
    verdict.even_roots = {str(n): permutation_roots.has_nth_root(ctype, n) for n in (2, 4, 6)}
    if not permutation_roots.has_nth_root(ctype, 2):
        verdict.kind = "NoEvenOrderRoots"
        verdict.reason = "the induced permutation of components has no square root"
    else:
        verdict.reason = "the induced permutation has a square root"
    return verdict


def interval_example_maps():
    """A map constant on [0, 1/2] with a continuous square root, and that root."""
    K = SimplicialComplex(1, [(0,), (Fraction(1, 2),), (1,)], [(0, 1), (1, 2)])
    f = PLMap(K, [(Fraction(3, 4),), (Fraction(3, 4),), (Fraction(7, 8),)])
    g = PLMap(K, [(Fraction(1),), (Fraction(1),), (Fraction(3, 4),)])
    return f, g


# ------------------------------------------------------ extension to squares


def grid_subcomplex(m, n, cells):
    """Kuhn simplices of the listed cells of the n^m grid of [0,1]^m."""
    cells = sorted({tuple(int(c) for c in cell) for cell in cells})
    if not cells:
        raise ValueError("need at least one cell")
    simplices = []
    for cell in cells:
        if len(cell) != m or any(not 0 <= c < n for c in cell):
            raise ValueError(f"cell {cell} outside the grid")
        for perm in itertools.permutations(range(m)):
            cur = list(cell)
            pts = [tuple(Fraction(c, n) for c in cur)]
            for axis in perm:
                cur[axis] += 1
                pts.append(tuple(Fraction(c, n) for c in cur))
            simplices.append(pts)
    K = SimplicialComplex.from_simplices(m, simplices)
    K.grid_n = n
    K.grid_cells = frozenset(cells)
    return K


def _in_cells(K, x):
    n = K.grid_n
    options = []
    for c in x:
        t = c * n
        fl = math.floor(t)
        opts = {fl}
        if t == fl:
            opts.add(fl - 1)
        options.append([o for o in opts if 0 <= o < n])
    return any(cell in K.grid_cells for cell in itertools.product(*options))


def _in_carrier(K, x):
    if not all(0 <= c <= 1 for c in x):
        return False
    if getattr(K, "grid_cells", None) is not None:
        return _in_cells(K, x)
    return K.find_top(x) is not None


@dataclass
class Extension:
    g: PLMap
    contraction: tuple
    resolution: int

    def embed(self, x):
        lo, k = self.contraction
        return tuple(a + c / k for a, c in zip(lo, as_point(x)))


def extend_to_square(f, box, max_vertices=200000):
    """A PL self-map g of the cube with g(g(x)) = f(x) exactly on |K|.

    ``f`` lives on a grid subcomplex K; ``box = (lo, hi)`` is a grid-aligned
    box disjoint from |K|. The cube is contracted affinely into the box, g
    copies that contraction on K and f on its image, and every other grid
    vertex takes the value of its nearest assigned vertex.
    """
    K = f.K
    m = K.dim
    n = getattr(K, "grid_n", None)
    if n is None:
        raise ValueError("f must live on a grid subcomplex")
    lo, hi = as_point(box[0]), as_point(box[1])
    if any(not 0 <= a < b <= 1 for a, b in zip(lo, hi)):
        raise ValueError("box must be a non-degenerate sub-box of the cube")
    for cell in K.grid_cells:
        if all(Fraction(c, n) <= b and a <= Fraction(c + 1, n) for c, a, b in zip(cell, lo, hi)):
            raise ValueError("box overlaps the subcomplex")
    width = min(b - a for a, b in zip(lo, hi))
    k = math.ceil(1 / width)
    res = n * k
    for a in lo:
        res = res * a.denominator // math.gcd(res, a.denominator)
    if (res + 1) ** m > max_vertices:
        raise ConstructionError("refine", f"grid {res}^{m} exceeds the vertex budget")
    M = kuhn_triangulation(m, res)

    def embed(x):
        return tuple(a + c / k for a, c in zip(lo, x))

    def unembed(y):
        return tuple((c - a) * k for a, c in zip(lo, y))

    values = [None] * len(M.vertices)
    for i, v in enumerate(M.vertices):
        if _in_carrier(K, v):
            values[i] = embed(v)
        else:
            u = unembed(v)
            if _in_carrier(K, u):
                values[i] = evaluate(f, u)
    # free vertices: nearest assigned vertex in the max norm, ties lexicographic
    ints = [tuple(int(c * res) for c in v) for v in M.vertices]
    index = {p: i for i, p in enumerate(ints)}
    assigned = [values[i] is not None for i in range(len(values))]
    if not any(assigned):
        raise ValueError("nothing to extend")
    filled = list(values)
    for i, p in enumerate(ints):
        if assigned[i]:
            continue
        rad = 1
        while True:
            best = None
            for off in itertools.product(range(-rad, rad + 1), repeat=m):
                if max(abs(o) for o in off) != rad:
                    continue
                q = tuple(a + o for a, o in zip(p, off))
                j = index.get(q)
                if j is not None and assigned[j]:
                    if best is None or M.vertices[j] < M.vertices[best]:
                        best = j
            if best is not None:
                filled[i] = values[best]
                break
            rad += 1
    g = PLMap(M, filled)
    for v in K.vertices:
        if evaluate(g, evaluate(g, v)) != evaluate(f, v):
            raise ConstructionError("extend", f"square differs from f at {v}")
    return Extension(g, (lo, k), res)


@dataclass
class LpCheck:
    g: PLMap
    value: Fraction
    bound: Fraction
    points: int


def lp_denseness_check(f, eps, p, nodes=None):
    """Midpoint-rule value of the p-th power L^p distance between g o g and f.

    g agrees in square with f on [eps, 1]^m, so the integrand vanishes there
    and the value stays below 1 - (1 - eps)^m.
    """
    eps = Fraction(eps)
    K0 = f.K
    m = K0.dim
    if m not in (1, 2) or p not in (1, 2):
        raise ValueError("need m in {1, 2} and p in {1, 2}")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    r = getattr(K0, "kuhn_r", None)
    if r is None:
        raise ValueError("f must live on a Kuhn grid of the cube")
    n = r * eps.denominator // math.gcd(r, eps.denominator)
    first = int(eps * n)
    cells = list(itertools.product(range(first, n), repeat=m))
    K = grid_subcomplex(m, n, cells)
    fK = PLMap(K, [evaluate(f, v) for v in K.vertices], codomain=_unit_box(m))
    half = eps / 2
    ext = extend_to_square(fK, ((Fraction(0),) * m, (half,) * m))
    g = ext.g
    nodes = nodes or (int(8 / eps) if m == 1 else int(4 / eps))
    nodes = nodes * eps.denominator // math.gcd(nodes, eps.denominator)
    total = Fraction(0)
    pts = [Fraction(2 * i + 1, 2 * nodes) for i in range(nodes)]
    count = 0
    for x in itertools.product(pts, repeat=m):
        d = dist_inf(evaluate(g, evaluate(g, x)), evaluate(f, x))
        total += d ** p
        count += 1
    value = total / count
    return LpCheck(g, value, 1 - (1 - eps) ** m, count)
