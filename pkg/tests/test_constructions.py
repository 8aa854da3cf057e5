import itertools
import json
import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from itroots.constructions import (
    ConstructionError, CornerInvolution, EndInvolution, NoRootCertificate, approximate_pl,
    boundary_square_approx, extend_to_square, grid_resolution, grid_subcomplex,
    interval_even_root_obstruction, interval_example_maps, kill_square_root,
    lp_denseness_check, strip_rotation_example, verify_no_root_certificate, verify_report)
from itroots.pl_maps import (
    Evaluable, PLMap, constant_map, evaluate, identity_map, interpolate,
    restriction_injective)
from itroots.simplicial_geometry import (
    SimplicialComplex, kuhn_triangulation, simplices_intersect, star)

HALF = Q(1, 2)


def linf(a, b):
    return max(abs(x - y) for x, y in zip(a, b))


# ---------------------------------------------------------------- approximation


def test_grid_resolution_is_minimal():
    r = grid_resolution(lambda t: t, Q(1, 10))
    assert Q(4, r) < Q(1, 100) and not Q(4, r - 1) < Q(1, 100)
    assert grid_resolution(lambda t: 0, Q(1, 10)) == 1


def test_approximate_identity_interval():
    res = approximate_pl(identity_map(1), Q(1, 10), seed=7)
    f = res.map
    assert res.resolution == 401
    assert res.bound < Q(1, 60)
    for x, y in zip(f.K.vertices, f.images):
        assert y != x
        assert linf(x, y) < Q(1, 200)
        assert 0 <= y[0] <= 1
    assert all(restriction_injective(f, s) for s in f.K.top)


def test_approximate_constant_is_spread_out():
    c = (HALF, HALF)
    res = approximate_pl(constant_map(c), Q(1, 10), m=2, omega=lambda t: 0)
    f = res.map
    assert res.resolution == 1
    assert res.bound < Q(1, 60)
    assert len(set(f.images)) == len(f.images)
    assert all(restriction_injective(f, s) for s in f.K.top)


def test_approximate_rejects_non_self_maps():
    h = Evaluable(1, lambda x: (x[0] + 1,), lipschitz=1)
    with pytest.raises(ConstructionError):
        approximate_pl(h, Q(1, 10))
    with pytest.raises(ValueError):
        approximate_pl(identity_map(1), 0)


def test_approximate_is_deterministic():
    a = approximate_pl(identity_map(1), Q(1, 4), seed=3)
    b = approximate_pl(identity_map(1), Q(1, 4), seed=3)
    c = approximate_pl(identity_map(1), Q(1, 4), seed=4)
    assert a.map.images == b.map.images
    assert a.map.images != c.map.images


# ------------------------------------------------------------- killing roots


@pytest.fixture(scope="module")
def interval_kill():
    f0 = approximate_pl(identity_map(1), Q(1, 10), seed=7).map
    f, cert = kill_square_root(f0, Q(1, 50), seed=7)
    return f0, f, cert


def test_kill_certificate_verifies(interval_kill):
    f0, f, cert = interval_kill
    report = verify_report(f, cert)
    assert all(ok for _, ok, _ in report), report
    assert verify_no_root_certificate(f, cert)


def test_kill_postconditions(interval_kill):
    f0, f, cert = interval_kill
    R = f.K
    nk = len(f0.K.vertices)
    around = star(R, cert.sigma0)
    near = {v for s in around for v in s}
    # locality: old vertices keep their images; new ones follow f0's piece
    for v in range(nk):
        assert f.images[v] == f0.images[v]
    for v in range(nk, len(R.vertices)):
        if v not in near:
            assert f.images[v] == evaluate(f0, R.vertices[v])
    # constancy
    assert {f.images[v] for v in cert.sigma0} == {cert.v0}
    # displacement
    assert evaluate(f, cert.v0) != cert.v0
    # budget
    gap = max(linf(f.images[v], evaluate(f0, R.vertices[v])) for v in range(len(R.vertices)))
    assert gap <= Q(1, 50)
    # separation of the star from its f0-image
    for a in around:
        img = [evaluate(f0, p) for p in R.points(a)]
        for b in around:
            assert simplices_intersect(img, R.points(b)) is None


def test_kill_witness_is_interior(interval_kill):
    f0, f, cert = interval_kill
    K = f.K
    img = [f.images[v] for v in cert.sigma_star]
    assert min(oracles.weights(img, cert.witness)) > 0
    assert min(oracles.weights(K.points(cert.sigma0), cert.witness)) > 0
    assert cert.sigma_star not in star(K, cert.sigma0)


def test_tampered_map_fails(interval_kill):
    f0, f, cert = interval_kill
    K = f.K
    hit = K.find_top(cert.v0)
    images = list(f.images)
    for v in hit[0]:
        images[v] = cert.v0
    bad = PLMap(K, images)
    assert not verify_no_root_certificate(bad, cert)


def test_certificate_against_other_maps(interval_kill):
    f0, f, cert = interval_kill
    wrong = PLMap(f.K, [tuple(c / 2 for c in y) for y in f.images])
    assert not verify_no_root_certificate(wrong, cert)
    same = NoRootCertificate.from_dict(cert.to_dict())
    same.sigma_star = cert.sigma0
    assert not verify_no_root_certificate(f, same)
    other = NoRootCertificate.from_dict(cert.to_dict())
    other.witness = tuple(c + 1 for c in cert.witness)
    assert not verify_no_root_certificate(f, other)


def test_certificate_json_round_trip(interval_kill):
    f0, f, cert = interval_kill
    text = json.dumps(cert.to_dict(), sort_keys=True)
    back = NoRootCertificate.from_dict(json.loads(text))
    assert back == cert
    assert verify_no_root_certificate(f, back)
    assert "constant simplex" in cert.summary()


def test_kill_identity_interpolation_interval():
    K = kuhn_triangulation(1, 20)
    f0 = interpolate(K, K.vertices)
    f, cert = kill_square_root(f0, Q(1, 50), seed=3)
    assert cert.log["generic_perturbation"]
    assert verify_no_root_certificate(f, cert)
    assert f.images[:len(K.vertices)] != f0.images


def test_kill_square_has_collapsed_neighbours():
    # a constant triangle forces every triangle sharing one of its edges to
    # have a segment as image, so the full injectivity ledger cannot hold
    K = kuhn_triangulation(2, 10)
    f, cert = kill_square_root(interpolate(K, K.vertices), Q(1, 50), seed=3)
    report = dict((name, ok) for name, ok, _ in verify_report(f, cert))
    assert report["constant on simplex"] and report["value is moved"]
    assert report["interior overlap witness"]
    assert not report["injective off the constant simplex"]
    flat = {s for s in f.K.top if not restriction_injective(f, s)} - {cert.sigma0}
    assert flat
    for s in flat:
        assert len(set(s) & set(cert.sigma0)) == 2


# ----------------------------------------------------------- involutions


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.fractions(0, 1, max_denominator=50),
       st.fractions(0, 1, max_denominator=50))
def test_corner_involution_squares_to_identity(r, x, y):
    phi = CornerInvolution(1 - Q(1, r))
    p = (x, y)
    assert phi(phi(p)) == p
    q = phi(p)
    assert 0 <= q[0] <= 1 and 0 <= q[1] <= 1
    assert phi.in_triangle(p) != phi.in_triangle(q) or x - y == 1 - Q(1, r)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.sampled_from([0, 1]), st.fractions(0, 1, max_denominator=60))
def test_end_involution_squares_to_identity(r, end, x):
    s = Q(1, r) if end == 0 else 1 - Q(1, r)
    phi = EndInvolution(end, s)
    assert phi(phi((x,))) == (x,)
    assert phi((s,)) == (s,) and phi((end,)) == (1 - end,)


def test_corner_involution_fixes_its_edge():
    phi = CornerInvolution(Q(9, 10))
    for t in range(11):
        p = (Q(9, 10) + Q(t, 100), Q(t, 100))
        assert phi(p) == p
    assert phi((1, 0)) == (0, 1)


# ---------------------------------------------------------- boundary squares


def test_boundary_interval_identity():
    for eps in (Q(1, 4), Q(1, 8)):
        res = boundary_square_approx(identity_map(1), (0,), eps, grid_step=Q(1, 1024))
        assert res.bound < eps
        g = res.g
        rng = random.Random(1)
        for _ in range(100):
            x = (Q(rng.randint(0, 997), 997),)
            assert linf(g(g(x)), x) <= res.bound


def test_boundary_interval_square_map():
    h = Evaluable(1, lambda x: (x[0] * x[0],), lipschitz=2)
    res = boundary_square_approx(h, (0,), Q(1, 4), grid_step=Q(1, 1024))
    assert res.bound < Q(1, 4)
    rng = random.Random(2)
    for _ in range(100):
        x = (Q(rng.randint(0, 1000), 1000),)
        assert linf(res.g(res.g(x)), h(x)) <= res.bound


def test_boundary_right_end():
    res = boundary_square_approx(identity_map(1), (1,), Q(1, 4), grid_step=Q(1, 256))
    assert res.bound < Q(1, 4)
    assert res.g((1,)) != (1,)


def test_boundary_rejects_bad_points():
    with pytest.raises(ValueError):
        boundary_square_approx(identity_map(1), (HALF,), Q(1, 4))
    h = Evaluable(1, lambda x: (1 - x[0],), lipschitz=1)
    with pytest.raises(ValueError):
        boundary_square_approx(h, (0,), Q(1, 4))


@pytest.mark.parametrize("corner", [(0, 0), (1, 1)])
def test_boundary_square_corner(corner):
    # coarse grid keeps this quick; the acceptance suite runs step 1/256
    res = boundary_square_approx(identity_map(2), corner, Q(1, 2), grid_step=Q(1, 32))
    assert res.bound < Q(1, 2)
    g = res.g
    s0 = res.g.sigma0
    rng = random.Random(5)
    for _ in range(100):
        w = [Q(rng.randint(1, 30)) for _ in range(3)]
        tot = sum(w)
        x = tuple(sum(wi / tot * p[i] for wi, p in zip(w, s0)) for i in range(2))
        y = g(g(x))
        assert min(oracles.weights(s0, y)) >= 0
        assert linf(y, x) <= res.bound
    assert res.log["f1_rule_counts"]["kept"] == 3


# -------------------------------------------------------------- strip example


def strip_square(eps, x, y):
    lo, hi = HALF - eps / 2, HALF + eps / 2
    if y < lo:
        return (1 - x, hi)
    if y > hi:
        return (1 - x, lo)
    return (1 - x, 1 - y)


def test_strip_example_values():
    ex = strip_rotation_example(Q(1, 4))
    assert ex.sup == Q(1, 8)
    assert ex.g1((HALF, HALF)) == (HALF, HALF)
    for i in range(101):
        x = Q(i, 100)
        assert ex.g(ex.g((x, HALF))) == (1 - x, HALF)


@settings(max_examples=80, deadline=None)
@given(st.fractions(Q(1, 100), Q(49, 100), max_denominator=100),
       st.fractions(0, 1, max_denominator=300), st.fractions(0, 1, max_denominator=300))
def test_strip_square_matches_three_pieces(eps, x, y):
    ex = strip_rotation_example(eps)
    assert ex.g(ex.g((x, y))) == strip_square(eps, x, y)
    assert linf(ex.g(ex.g((x, y))), ex.f((x, y))) <= ex.sup == eps / 2


def test_strip_range():
    for bad in (0, HALF, Q(3, 4)):
        with pytest.raises(ValueError):
            strip_rotation_example(bad)


# ------------------------------------------------------ interval obstruction


def test_reflection_has_no_even_roots():
    K = kuhn_triangulation(1, 2)
    f = interpolate(K, [(1,), (HALF,), (0,)])
    v = interval_even_root_obstruction(f)
    assert v.kind == "NoEvenOrderRoots"
    assert v.fixed == [(HALF, HALF)]
    assert v.permutation == (1, 0)
    assert v.even_roots == {"2": False, "4": False, "6": False}


def test_identity_is_inconclusive():
    K = kuhn_triangulation(1, 3)
    v = interval_even_root_obstruction(interpolate(K, K.vertices))
    assert v.kind == "Inconclusive"
    assert v.components == []


def test_example_map_and_its_root():
    f, g = interval_example_maps()
    v = interval_even_root_obstruction(f)
    assert v.kind == "Inconclusive"
    assert v.fixed == [(Q(5, 6), Q(5, 6))]
    rng = random.Random(0)
    pts = [(Q(i, 999),) for i in range(1000)]
    pts += [(Q(rng.randint(0, 10 ** 6), 10 ** 6),) for _ in range(200)]
    for x in pts:
        assert g(g(x)) == f(x)


def test_obstruction_needs_invariance():
    # fixed point 1/2 with 1/4 mapped onto it: the argument does not apply
    T = SimplicialComplex(1, [(0,), (Q(1, 4),), (HALF,), (1,)], [(0, 1), (1, 2), (2, 3)])
    f = interpolate(T, [(1,), (HALF,), (HALF,), (0,)])
    v = interval_even_root_obstruction(f)
    assert v.kind == "Inconclusive"
    assert "fixed" in v.reason


def test_decreasing_contraction_swaps_sides():
    T = SimplicialComplex(1, [(0,), (1,)], [(0, 1)])
    v = interval_even_root_obstruction(interpolate(T, [(Q(3, 4),), (Q(1, 4),)]))
    assert v.kind == "NoEvenOrderRoots"
    assert v.range == (Q(1, 4), Q(3, 4))


# -------------------------------------------------------------- extensions


def test_grid_subcomplex_shape():
    K = grid_subcomplex(2, 4, [(0, 0), (3, 3)])
    assert len(K.top) == 4
    assert K.volume() == Q(2, 16)
    with pytest.raises(ValueError):
        grid_subcomplex(2, 4, [(4, 0)])


def test_extend_interval_example():
    K = grid_subcomplex(1, 2, [(0,)])
    f = interpolate(K, [(1 - v[0],) for v in K.vertices], codomain=((0,), (1,)))
    ext = extend_to_square(f, ((Q(3, 5),), (Q(9, 10),)))
    g = ext.g
    for x in (0, Q(1, 8), Q(1, 3), HALF):
        assert evaluate(g, evaluate(g, (x,))) == (1 - x,)


def test_extend_identity_piece():
    K = grid_subcomplex(1, 4, [(1,)])
    f = interpolate(K, K.vertices, codomain=((0,), (1,)))
    g = extend_to_square(f, ((Q(3, 4),), (1,))).g
    for i in range(101):
        x = (Q(1, 4) + Q(i, 400),)
        assert evaluate(g, evaluate(g, x)) == x


def test_extend_square_two_cells():
    K = grid_subcomplex(2, 4, [(0, 0), (3, 3)])
    f = interpolate(K, [(1 - v[1], v[0]) for v in K.vertices], codomain=((0, 0), (1, 1)))
    ext = extend_to_square(f, ((HALF, 0), (Q(3, 4), Q(1, 4))))
    g = ext.g
    rng = random.Random(8)
    for v in K.vertices:
        assert evaluate(g, evaluate(g, v)) == f(v)
    for _ in range(100):
        cell = rng.choice(sorted(K.grid_cells))
        x = tuple(Q(c, 4) + Q(rng.randint(0, 1000), 4000) for c in cell)
        assert evaluate(g, evaluate(g, x)) == f(x)


def test_extend_rejects_overlap():
    K = grid_subcomplex(1, 2, [(0,)])
    f = interpolate(K, K.vertices, codomain=((0,), (1,)))
    with pytest.raises(ValueError):
        extend_to_square(f, ((Q(1, 4),), (Q(3, 4),)))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_extension_square_is_exact_property(seed):
    rng = random.Random(seed)
    n = 4
    cells = rng.sample([(i,) for i in range(2)], rng.randint(1, 2))
    K = grid_subcomplex(1, n, cells)
    f = interpolate(K, [(Q(rng.randint(0, 8), 8),) for _ in K.vertices], codomain=((0,), (1,)))
    g = extend_to_square(f, ((Q(5, 8),), (1,))).g
    for _ in range(20):
        c = rng.choice(cells)[0]
        x = (Q(c, n) + Q(rng.randint(0, 97), 97 * n),)
        assert evaluate(g, evaluate(g, x)) == f(x)


def test_lp_check_bounds():
    K = kuhn_triangulation(1, 4)
    f = interpolate(K, [(1 - v[0],) for v in K.vertices])
    res = lp_denseness_check(f, Q(1, 8), 1)
    assert res.value <= res.bound == Q(1, 8)
    bounds = [lp_denseness_check(f, eps, 1).bound for eps in (Q(1, 4), Q(1, 8), Q(1, 16))]
    assert bounds == sorted(bounds, reverse=True) and bounds[-1] == Q(1, 16)


def test_lp_check_square():
    K = kuhn_triangulation(2, 2)
    f = interpolate(K, [(1 - v[1], v[0]) for v in K.vertices])
    res = lp_denseness_check(f, Q(1, 4), 2)
    assert res.bound == Q(7, 16)
    assert res.value <= res.bound
    # g squared agrees with f on [eps, 1]^2
    for x in itertools.product([Q(1, 4) + Q(i, 40) for i in range(31)], repeat=2):
        if x[0] >= Q(1, 4) and x[1] >= Q(1, 4):
            assert evaluate(res.g, evaluate(res.g, x)) == f(x)
