"""Command-line front end.

Exit codes: 0 success, 1 bad input or tool failure, 2 an honest negative
(no root, certificate rejected, bound not certified).
"""

import ast
import io
import json
import os
import sys
import tempfile
from fractions import Fraction

import click

from itroots import constructions as cons
from itroots import functional_graphs as fg
from itroots import permutation_roots as pr
from itroots.pl_maps import Evaluable, PLMap, evaluate, interpolate
from itroots.simplicial_geometry import (
    complex_from_json, complex_to_json, fmt_q, kuhn_triangulation, mesh_decay,
    parse_q, write_mesh_csv)

OK, INPUT_ERROR, NEGATIVE = 0, 1, 2


class InputError(click.ClickException):
    exit_code = INPUT_ERROR


# ------------------------------------------------------------- expressions


class Expr:
    """One coordinate of h: value, Lipschitz bound in the max norm, and an
    enclosing interval of its values on the unit cube."""

    def __init__(self, fn, lip, lo, hi):
        self.fn, self.lip, self.lo, self.hi = fn, Fraction(lip), Fraction(lo), Fraction(hi)

    @property
    def const(self):
        return self.lip == 0 and self.lo == self.hi


def _constant(c):
    return Expr(lambda x: c, 0, c, c)


def _mul(a, b):
    def fn(x):
        return a.fn(x) * b.fn(x)
    ends = [a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi]
    big_a = max(abs(a.lo), abs(a.hi))
    big_b = max(abs(b.lo), abs(b.hi))
    return Expr(fn, a.lip * big_b + b.lip * big_a, min(ends), max(ends))


def _compile(node, m, text):
    rec = lambda n: _compile(n, m, text)
    if isinstance(node, ast.Constant) and type(node.value) in (int, float):
        return _constant(Fraction(ast.get_source_segment(text, node)))
    if isinstance(node, ast.Name):
        name = node.id
        if name == "x" and m == 1:
            name = "x1"
        if name.startswith("x") and name[1:].isdigit() and 1 <= int(name[1:]) <= m:
            k = int(name[1:]) - 1
            return Expr(lambda x: x[k], 1, 0, 1)
        raise InputError(f"unknown symbol {node.id!r}; use x1..x{m}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        a = rec(node.operand)
        if isinstance(node.op, ast.UAdd):
            return a
        return Expr(lambda x: -a.fn(x), a.lip, -a.hi, -a.lo)
    if isinstance(node, ast.BinOp):
        a, b = rec(node.left), rec(node.right)
        if isinstance(node.op, ast.Add):
            return Expr(lambda x: a.fn(x) + b.fn(x), a.lip + b.lip, a.lo + b.lo, a.hi + b.hi)
        if isinstance(node.op, ast.Sub):
            return Expr(lambda x: a.fn(x) - b.fn(x), a.lip + b.lip, a.lo - b.hi, a.hi - b.lo)
        if isinstance(node.op, ast.Mult):
            return _mul(a, b)
        if isinstance(node.op, ast.Div):
            if not b.const or b.lo == 0:
                raise InputError("division only by a non-zero constant")
            return _mul(a, _constant(1 / b.lo))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) \
            and node.func.id in ("min", "max") and len(node.args) >= 2 and not node.keywords:
        parts = [rec(n) for n in node.args]
        pick = min if node.func.id == "min" else max
        return Expr(lambda x: pick(p.fn(x) for p in parts), max(p.lip for p in parts),
                    pick(p.lo for p in parts), pick(p.hi for p in parts))
    raise InputError(f"unsupported expression: {ast.get_source_segment(text, node)!r}")


def parse_map(spec, m):
    """An Evaluable from 'id', 'const:c1,...' or a tuple of coordinate
    expressions such as '(1 - x1, 1/2)'. A path to a file is read first."""
    if spec is None:
        raise InputError("--h is required")
    if os.path.isfile(spec):
        with open(spec) as fh:
            spec = fh.read().strip()
    if spec == "id":
        spec = ", ".join(f"x{i + 1}" for i in range(m))
    try:
        tree = ast.parse(spec, mode="eval").body
    except SyntaxError as exc:
        raise InputError(f"cannot parse map {spec!r}: {exc.msg}")
    nodes = list(tree.elts) if isinstance(tree, ast.Tuple) else [tree]
    if len(nodes) != m:
        raise InputError(f"map has {len(nodes)} coordinates, expected {m}")
    coords = [_compile(n, m, spec) for n in nodes]
    lip = max(c.lip for c in coords)
    return Evaluable(m, lambda x: tuple(c.fn(x) for c in coords), lipschitz=lip, name=spec)


def parse_rational(text, what="value"):
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad {what}: {text!r}")


def parse_point(text, what="point"):
    return tuple(parse_rational(c, what) for c in str(text).split(","))


# ------------------------------------------------------------------ output


def _dump(data):
    return json.dumps(data, indent=1, sort_keys=True) + "\n"


def write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def map_to_json(f):
    return {"complex": complex_to_json(f.K), "images": [[fmt_q(c) for c in y] for y in f.images]}


def map_from_json(data):
    K = complex_from_json(data["complex"])
    return PLMap(K, [[parse_q(c) for c in y] for y in data["images"]], codomain=None)


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read {path}: {exc}")


def _emit(out, name, data):
    text = _dump(data)
    if out:
        write_atomic(os.path.join(out, name), text)
    return text


# -------------------------------------------------------------------- root


@click.group()
def cli():
    """Iterative roots: finite maps, permutations and PL maps of the cube."""


# ------------------------------------------------------------------ finite


def _load_graph(path):
    data = _read_json(path)
    try:
        if isinstance(data, list):
            return fg.FunctionalGraph(tuple(data))
        return fg.FunctionalGraph.from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad graph in {path}: {exc}")


@cli.group()
def finite():
    """Self-maps of {0, ..., n-1} given as JSON image tables."""


@finite.command("components")
@click.argument("graph")
def finite_components(graph):
    f = _load_graph(graph)
    part = fg.components(f)
    comps = [part.members(c) for c in range(part.count)]
    click.echo(_dump({"count": part.count, "components": comps,
                      "isolated_fixed_points": fg.isolated_fixed_points(f)}), nl=False)
    return OK


@finite.command("root")
@click.argument("graph")
def finite_root(graph):
    """Construct a square root by pairing isomorphic components."""
    f = _load_graph(graph)
    g = fg.square_root_paired(f)
    if g is None:
        click.echo("no square root found by component pairing")
        return NEGATIVE
    assert fg.is_square_root(g, f)
    click.echo(_dump({"root": list(g.image)}), nl=False)
    return OK


@finite.command("check")
@click.argument("graph")
def finite_check(graph):
    """Look for a certificate that no square root exists."""
    f = _load_graph(graph)
    cert = fg.t3_check_finite(f)
    if cert is not None:
        click.echo(_dump({"no_square_root": True, "certificate": cert.to_dict()}), nl=False)
        return NEGATIVE
    out = {"no_square_root": None}
    if len(set(f.image)) == f.n:
        inv = fg.multiplicity_sequence(f)
        ok = fg.t2a_has_square_root(inv)
        out = {"no_square_root": not ok, "offending": fg.t2a_offending(inv)}
        click.echo(_dump(out), nl=False)
        return OK if ok else NEGATIVE
    click.echo(_dump(out), nl=False)
    return OK


@finite.command("brute")
@click.argument("graph")
@click.option("--limit", type=int, default=None)
def finite_brute(graph, limit):
    """Enumerate every square root (small n only)."""
    f = _load_graph(graph)
    try:
        roots = fg.brute_force_square_roots(f, limit=limit)
    except fg.GuardExceeded as exc:
        raise InputError(str(exc))
    click.echo(f"{len(roots)} square roots")
    for g in roots:
        click.echo(" ".join(map(str, g.image)))
    return OK if roots else NEGATIVE


# -------------------------------------------------------------------- perm


def _perm(text, degree):
    try:
        return pr.parse_cycles(text, degree)
    except ValueError as exc:
        raise InputError(str(exc))


def _order(n):
    if n < 1:
        raise InputError("the root order n must be positive")
    return n


@cli.group()
def perm():
    """Permutations in cycle notation, e.g. "(0 1 2)(3 4)"."""


@perm.command("type")
@click.argument("sigma")
@click.option("--degree", type=int, default=None)
def perm_type(sigma, degree):
    t = pr.cycle_type(_perm(sigma, degree))
    click.echo(" ".join(f"{k}^{v}" for k, v in sorted(t.items()) if v))
    return OK


@perm.command("has-root")
@click.argument("sigma")
@click.argument("n", type=int)
@click.option("--degree", type=int, default=None)
def perm_has_root(sigma, n, degree):
    ok = pr.has_nth_root(pr.cycle_type(_perm(sigma, degree)), _order(n))
    click.echo("true" if ok else "false")
    return OK if ok else NEGATIVE


@perm.command("root")
@click.argument("sigma")
@click.argument("n", type=int)
@click.option("--degree", type=int, default=None)
def perm_root(sigma, n, degree):
    s = _perm(sigma, degree)
    tau = pr.construct_nth_root(s, _order(n))
    if tau is None:
        click.echo("no root")
        return NEGATIVE
    if pr.power(tau, n) != s:
        raise click.ClickException("constructed root failed re-verification")
    click.echo(pr.format_cycles(tau))
    return OK


# ---------------------------------------------------------------------- pl


@cli.group()
def pl():
    """Exact piecewise affine maps of the unit cube."""


def h_option(f):
    return click.option("--h", "h_spec", default=None,
                        help="map: 'id', or coordinates like '(1 - x1, 1/2)', or a file")(f)


def m_option(f):
    return click.option("--m", type=click.IntRange(1, 3), default=2, show_default=True)(f)


def eps_option(default):
    return click.option("--eps", default=default, show_default=True, help="rational or decimal")


def out_option(f):
    return click.option("--out", type=click.Path(file_okay=False), default=None,
                        help="directory for JSON artifacts")(f)


def _positive(text, what):
    q = parse_rational(text, what)
    if q <= 0:
        raise InputError(f"{what} must be positive")
    return q


def _fail(exc):
    click.echo(f"failed at step '{exc.step}': {exc}", err=True)
    return NEGATIVE


@pl.command("approximate")
@h_option
@m_option
@eps_option("1/10")
@click.option("--seed", type=int, default=0, show_default=True)
@out_option
def pl_approximate(h_spec, m, eps, seed, out):
    """Generic PL approximation with a certified sup bound."""
    eps = _positive(eps, "eps")
    h = parse_map(h_spec, m)
    try:
        res = cons.approximate_pl(h, eps, m=m, seed=seed)
    except cons.ConstructionError as exc:
        return _fail(exc)
    _emit(out, "map.json", map_to_json(res.map))
    report = {"eps": fmt_q(eps), "bound": fmt_q(res.bound), "resolution": res.resolution,
              "vertices": len(res.map.K.vertices), "seed": seed}
    click.echo(_emit(out, "approximation.json", report), nl=False)
    return OK


@pl.command("kill-root")
@h_option
@m_option
@eps_option("1/10")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--depth", type=click.IntRange(1, 64), default=8, show_default=True,
              help="cap on nested refinement layers")
@out_option
def pl_kill_root(h_spec, m, eps, seed, depth, out):
    """Approximate h and modify it so it provably has no square root."""
    eps = _positive(eps, "eps")
    h = parse_map(h_spec, m)
    try:
        res = cons.approximate_pl(h, eps, m=m, seed=seed)
        f, cert = cons.kill_square_root(res.map, eps / 5, seed=seed, max_depth=depth)
    except cons.ConstructionError as exc:
        return _fail(exc)
    _emit(out, "map.json", map_to_json(f))
    _emit(out, "certificate.json", cert.to_dict())
    change = parse_q(cert.log["total_change"])
    summary = {"eps": fmt_q(eps), "approximation_bound": fmt_q(res.bound),
               "modification": fmt_q(change), "total": fmt_q(res.bound + change),
               "seed": seed}
    _emit(out, "run.json", summary)
    click.echo(cert.summary())
    report = cons.verify_report(f, cert)
    for name, ok, _ in report:
        click.echo(f"{'ok  ' if ok else 'FAIL'} {name}")
    return OK if all(ok for _, ok, _ in report) else NEGATIVE


@pl.command("verify")
@click.option("--map", "map_path", required=True, type=click.Path(dir_okay=False))
@click.option("--cert", "cert_path", required=True, type=click.Path(dir_okay=False))
def pl_verify(map_path, cert_path):
    """Re-check a no-root certificate from the map file alone."""
    try:
        f = map_from_json(_read_json(map_path))
        cert = cons.NoRootCertificate.from_dict(_read_json(cert_path))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed artifact: {exc}")
    report = cons.verify_report(f, cert)
    for name, ok, _ in report:
        click.echo(f"{'ok  ' if ok else 'FAIL'} {name}")
    good = all(ok for _, ok, _ in report)
    click.echo("certificate verified" if good else "certificate rejected")
    return OK if good else NEGATIVE


@pl.command("boundary-square")
@h_option
@m_option
@click.option("--x0", required=True, help="fixed end point or corner, e.g. 0 or 0,0")
@eps_option("1/4")
@click.option("--grid", type=click.IntRange(1), default=None,
              help="certify on the grid of step 1/GRID")
@out_option
def pl_boundary_square(h_spec, m, x0, eps, grid, out):
    """A map whose square is certified close to h."""
    eps = _positive(eps, "eps")
    h = parse_map(h_spec, m)
    x0 = parse_point(x0, "x0")
    if len(x0) != m:
        raise InputError(f"x0 needs {m} coordinates")
    step = None if grid is None else Fraction(1, grid)
    try:
        res = cons.boundary_square_approx(h, x0, eps, grid_step=step)
    except ValueError as exc:
        raise InputError(str(exc))
    except cons.ConstructionError as exc:
        return _fail(exc)
    data = res.to_dict()
    data["log"] = {k: v for k, v in data["log"].items() if k != "f1_images"}
    _emit(out, "square.json", res.to_dict())
    click.echo(_dump({"bound": data["bound"], "eps": data["eps"],
                      "grid_step": data["grid_step"], "resolution": data["log"]["resolution"]}),
               nl=False)
    return OK


@pl.command("strip-example")
@eps_option("1/4")
@out_option
def pl_strip_example(eps, out):
    """The strip rotation with its exact sup distance."""
    eps = parse_rational(eps, "eps")
    try:
        ex = cons.strip_rotation_example(eps)
    except ValueError as exc:
        raise InputError(str(exc))
    data = {"eps": fmt_q(eps), "sup": fmt_q(ex.sup),
            "pieces": ["y < 1/2 - eps/2: (1-x, 1/2 + eps/2)",
                       "middle: (1-x, 1-y)",
                       "y > 1/2 + eps/2: (1-x, 1/2 - eps/2)"]}
    click.echo(_emit(out, "strip.json", data), nl=False)
    return OK


def _cells(text, m):
    try:
        cells = [tuple(int(c) for c in part.split(",")) for part in text.split(";") if part]
    except ValueError:
        raise InputError(f"bad cell list {text!r}")
    if any(len(c) != m for c in cells):
        raise InputError(f"cells need {m} indices")
    return cells


@pl.command("extend-square")
@h_option
@m_option
@click.option("--grid", type=click.IntRange(1), default=2, show_default=True,
              help="cells per side of the grid carrying K")
@click.option("--cells", required=True, help="cells of K, e.g. '0,0;3,3'")
@click.option("--box", required=True, help="box 'lo:hi', e.g. '1/2,0:3/4,1/4'")
@out_option
def pl_extend_square(h_spec, m, grid, cells, box, out):
    """Extend f on a grid subcomplex to g with g o g = f there."""
    h = parse_map(h_spec, m)
    try:
        lo, hi = box.split(":")
    except ValueError:
        raise InputError("box must look like lo:hi")
    lo, hi = parse_point(lo, "box"), parse_point(hi, "box")
    if len(lo) != m or len(hi) != m:
        raise InputError(f"box corners need {m} coordinates")
    try:
        K = cons.grid_subcomplex(m, grid, _cells(cells, m))
        f = interpolate(K, [h(v) for v in K.vertices], codomain=((0,) * m, (1,) * m))
        ext = cons.extend_to_square(f, (lo, hi))
    except ValueError as exc:
        raise InputError(str(exc))
    except cons.ConstructionError as exc:
        return _fail(exc)
    checked = sum(1 for v in K.vertices if evaluate(ext.g, evaluate(ext.g, v)) == f(v))
    _emit(out, "map.json", map_to_json(ext.g))
    data = {"resolution": ext.resolution, "vertices_checked": checked,
            "vertices": len(K.vertices), "contraction": {
                "offset": [fmt_q(c) for c in ext.contraction[0]],
                "factor": fmt_q(Fraction(1, ext.contraction[1]))}}
    click.echo(_emit(out, "extension.json", data), nl=False)
    return OK if checked == len(K.vertices) else NEGATIVE


@pl.command("lp-check")
@h_option
@m_option
@eps_option("1/8")
@click.option("--p", "p", type=click.Choice(["1", "2"]), default="1", show_default=True)
@click.option("--grid", type=click.IntRange(1), default=4, show_default=True,
              help="Kuhn resolution used to interpolate h")
@out_option
def pl_lp_check(h_spec, m, eps, p, grid, out):
    """Midpoint L^p distance of an extended square against the bound."""
    eps = _positive(eps, "eps")
    if m > 2:
        raise InputError("lp-check supports m = 1, 2")
    h = parse_map(h_spec, m)
    K = kuhn_triangulation(m, grid)
    try:
        f = interpolate(K, [h(v) for v in K.vertices])
        res = cons.lp_denseness_check(f, eps, int(p))
    except ValueError as exc:
        raise InputError(str(exc))
    data = {"value": fmt_q(res.value), "value_decimal": f"{float(res.value):.9f}",
            "bound": fmt_q(res.bound), "nodes": res.points,
            "within_bound": res.value <= res.bound}
    click.echo(_emit(out, "lp.json", data), nl=False)
    return OK if data["within_bound"] else NEGATIVE


@pl.command("interval-roots")
@h_option
@click.option("--grid", type=click.IntRange(1), default=2, show_default=True)
def pl_interval_roots(h_spec, grid):
    """Even-order root obstruction for an interval map."""
    h = parse_map(h_spec, 1)
    K = kuhn_triangulation(1, grid)
    try:
        f = interpolate(K, [h(v) for v in K.vertices])
    except ValueError as exc:
        raise InputError(str(exc))
    v = cons.interval_even_root_obstruction(f)
    click.echo(_dump(v.to_dict()), nl=False)
    return NEGATIVE if v.kind == "NoEvenOrderRoots" else OK


@pl.command("subdivide")
@m_option
@click.option("--levels", type=click.IntRange(0, 6), default=3, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv",
              show_default=True)
@out_option
def pl_subdivide(m, levels, fmt, out):
    """Mesh of repeated barycentric subdivision of the standard cube."""
    rows = mesh_decay(kuhn_triangulation(m, 1), levels)
    if fmt == "csv":
        buf = io.StringIO()
        write_mesh_csv(rows, buf)
        text = buf.getvalue()
    else:
        text = _dump([{"l": l, "mesh": fmt_q(ms)} for l, ms in rows])
    if out:
        write_atomic(os.path.join(out, f"mesh.{fmt}"), text)
    click.echo(text, nl=False)
    return OK


def main(argv=None):
    try:
        code = cli.main(args=argv, prog_name="itroots", standalone_mode=False)
    except click.exceptions.Abort:
        return INPUT_ERROR
    except click.ClickException as exc:
        exc.show()
        return INPUT_ERROR
    return code or OK


if __name__ == "__main__":
    sys.exit(main())
