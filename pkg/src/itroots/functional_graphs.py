"""Finite self-maps viewed as functional graphs.

A map on {0, ..., n-1} is stored as its image table. Each weak component of
the graph with edges x -> f(x) is rho-shaped: one cycle with rooted in-trees
hanging off it. Square roots are built by pairing isomorphic components.
"""

import math
from dataclasses import dataclass, field

from itroots import kernels

INFINITE = math.inf

BRUTE_FORCE_GUARD = 6


class PreconditionError(ValueError):
    pass


class GuardExceeded(ValueError):
    pass


@dataclass(frozen=True)
class FunctionalGraph:
    image: tuple

    def __post_init__(self):
        image = tuple(int(v) for v in self.image)
        n = len(image)
        for v in image:
            if not 0 <= v < n:
                raise ValueError(f"image entry {v} outside 0..{n - 1}")
        object.__setattr__(self, "image", image)

    @property
    def n(self):
        return len(self.image)

    def __call__(self, x):
        return self.image[x]

    def __len__(self):
        return len(self.image)

    def to_dict(self):
        return {"n": self.n, "image": list(self.image)}

    @classmethod
    def from_dict(cls, data):
        image = data["image"]
        if "n" in data and data["n"] != len(image):
            raise ValueError("n does not match length of image")
        return cls(tuple(image))


def identity(n):
    return FunctionalGraph(tuple(range(n)))


def iterate(f, k):
    if k < 0:
        raise ValueError("k must be non-negative")
    out = list(range(f.n))
    for _ in range(k):
        out = [f.image[x] for x in out]
    return FunctionalGraph(tuple(out))


def is_square_root(g, f):
    return all(g.image[g.image[x]] == f.image[x] for x in range(f.n))


def preimages(f):
    pre = [[] for _ in range(f.n)]
    for x, y in enumerate(f.image):
        pre[y].append(x)
    return pre


@dataclass(frozen=True)
class ComponentPartition:
    labels: tuple
    count: int

    def members(self, c):
        return [v for v, lab in enumerate(self.labels) if lab == c]


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1


def components(f):
    uf = _UnionFind(f.n)
    for x, y in enumerate(f.image):
        uf.union(x, y)
    ids = {}
    labels = []
    for v in range(f.n):
        r = uf.find(v)
        if r not in ids:
            ids[r] = len(ids)
        labels.append(ids[r])
    return ComponentPartition(tuple(labels), len(ids))


def _cycle_from(f, v):
    """The cycle reached from v, starting at its smallest vertex."""
    seen = set()
    while v not in seen:
        seen.add(v)
        v = f.image[v]
    cyc = [v]
    w = f.image[v]
    while w != v:
        cyc.append(w)
        w = f.image[w]
    i = cyc.index(min(cyc))
    return cyc[i:] + cyc[:i]


class _Shape:
    """Canonical codes of rooted in-trees, shared across components of f."""

    def __init__(self, f):
        self.f = f
        self.pre = preimages(f)
        self.on_cycle = [False] * f.n
        self.intern = {}
        self.code = [None] * f.n
        for v in range(f.n):
            if not self.on_cycle[v]:
                for c in _cycle_from(f, v):
                    self.on_cycle[c] = True
        for v in range(f.n):
            self._code(v)

    def tree_children(self, v):
        return [u for u in self.pre[v] if not self.on_cycle[u]]

    def _code(self, v):
        # iterative post-order so deep trees do not hit the recursion limit
        stack = [(v, False)]
        while stack:
            u, done = stack.pop()
            if self.code[u] is not None:
                continue
            kids = self.tree_children(u)
            if done:
                key = tuple(sorted(self.code[k] for k in kids))
                self.code[u] = self.intern.setdefault(key, len(self.intern))
            else:
                stack.append((u, True))
                stack.extend((k, False) for k in kids if self.code[k] is None)
        return self.code[v]

    def cycle_codes(self, cyc):
        return [self.code[c] for c in cyc]

    def match_trees(self, a, b, phi):
        """Extend phi by an isomorphism of the in-trees rooted at a and b."""
        stack = [(a, b)]
        while stack:
            u, w = stack.pop()
            phi[u] = w
            ku = sorted(self.tree_children(u), key=lambda k: (self.code[k], k))
            kw = sorted(self.tree_children(w), key=lambda k: (self.code[k], k))
            stack.extend(zip(ku, kw))


def _component_key(shape, cyc):
    codes = shape.cycle_codes(cyc)
    rots = [tuple(codes[i:] + codes[:i]) for i in range(len(codes))]
    return min(rots)


def _isomorphism(shape, cyc1, cyc2):
    if len(cyc1) != len(cyc2):
        return None
    c1 = shape.cycle_codes(cyc1)
    c2 = shape.cycle_codes(cyc2)
    L = len(cyc1)
    for r in range(L):
        if all(c1[i] == c2[(i + r) % L] for i in range(L)):
            phi = {}
            for i in range(L):
                shape.match_trees(cyc1[i], cyc2[(i + r) % L], phi)
            return phi
    return None


def component_isomorphism(f, c1, c2, partition=None):
    """A bijection phi between components c1 and c2 with phi f = f phi, or None."""
    part = partition or components(f)
    for c in (c1, c2):
        if not 0 <= c < part.count:
            raise ValueError(f"invalid component id {c}")
    if c1 == c2:
        raise ValueError("component ids must differ")
    m1, m2 = part.members(c1), part.members(c2)
    if len(m1) != len(m2):
        return None
    shape = _Shape(f)
    return _isomorphism(shape, _cycle_from(f, m1[0]), _cycle_from(f, m2[0]))


def _pair_root(f, phi, g):
    inv = {w: v for v, w in phi.items()}
    for v, w in phi.items():
        g[v] = w
    for w, v in inv.items():
        g[w] = f.image[v]


def square_root_two_components(f):
    part = components(f)
    if part.count != 2:
        raise PreconditionError(
            f"need exactly two components, found {part.count}")
    phi = component_isomorphism(f, 0, 1, part)
    if phi is None:
        raise PreconditionError("the two components are not isomorphic")
    g = [0] * f.n
    _pair_root(f, phi, g)
    return FunctionalGraph(tuple(g))


def isolated_fixed_points(f):
    pre = preimages(f)
    return [x for x in range(f.n) if f.image[x] == x and pre[x] == [x]]


def square_root_paired(f):
    """Root from pairing isomorphic components; None if some class is odd.

    None only means this sufficient test failed, not that no root exists.
    """
    part = components(f)
    shape = _Shape(f)
    isolated = set(isolated_fixed_points(f))
    g = list(range(f.n))
    classes = {}
    cycles = {}
    for c in range(part.count):
        v = part.members(c)[0]
        cyc = _cycle_from(f, v)
        if len(part.members(c)) == 1 and v in isolated:
            continue
        cycles[c] = cyc
        key = (len(part.members(c)), _component_key(shape, cyc))
        classes.setdefault(key, []).append(c)
    for key in sorted(classes):
        comps = classes[key]
        if len(comps) % 2:
            return None
        for a, b in zip(comps[0::2], comps[1::2]):
            phi = _isomorphism(shape, cycles[a], cycles[b])
            _pair_root(f, phi, g)
    return FunctionalGraph(tuple(g))


@dataclass(frozen=True)
class OrbitInventory:
    cycles: dict = field(default_factory=dict)
    m_plus: object = 0
    m_bi: object = 0

    def __post_init__(self):
        for d, c in self.cycles.items():
            if d < 1:
                raise ValueError("cycle length must be >= 1")
            if c < 0:
                raise ValueError("counts must be non-negative")
        if self.m_plus < 0 or self.m_bi < 0:
            raise ValueError("counts must be non-negative")
        object.__setattr__(
            self, "cycles", {d: c for d, c in sorted(self.cycles.items()) if c})


def is_even_count(c):
    return c == INFINITE or c % 2 == 0


def multiplicity_sequence(f):
    if len(set(f.image)) != f.n:
        raise ValueError("map is not injective")
    seen = [False] * f.n
    counts = {}
    for v in range(f.n):
        if seen[v]:
            continue
        d = 0
        w = v
        while not seen[w]:
            seen[w] = True
            w = f.image[w]
            d += 1
        counts[d] = counts.get(d, 0) + 1
    return OrbitInventory(counts, 0, 0)


def t2a_offending(inv):
    """Names of the counts that break the square-root criterion."""
    bad = [f"m_{d}={c}" for d, c in inv.cycles.items()
           if d % 2 == 0 and not is_even_count(c)]
    if not is_even_count(inv.m_plus):
        bad.append(f"m_plus={inv.m_plus}")
    if not is_even_count(inv.m_bi):
        bad.append(f"m_bi={inv.m_bi}")
    return bad


def t2a_has_square_root(inv):
    return not t2a_offending(inv)


CYCLE, UNILATERAL, BILATERAL = "cycle", "unilateral", "bilateral"


@dataclass(frozen=True)
class Orbit:
    orbit_id: int
    kind: str
    d: int = 0

    def normalize(self, k):
        if self.kind == CYCLE:
            return k % self.d
        if self.kind == UNILATERAL and k < 0:
            raise ValueError("unilateral orbits are indexed by k >= 0")
        return k


@dataclass(frozen=True)
class SymbolicOrbitSpace:
    """Disjoint union of cycles Z_d, shifts Z_+ and translations Z.

    Elements are addressed as (orbit_id, k); the canonical map adds one to k.
    """
    orbits: tuple

    def __post_init__(self):
        object.__setattr__(self, "orbits", tuple(self.orbits))
        ids = [o.orbit_id for o in self.orbits]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate orbit ids")
        for o in self.orbits:
            if o.kind not in (CYCLE, UNILATERAL, BILATERAL):
                raise ValueError(f"unknown orbit kind {o.kind}")
            if o.kind == CYCLE and o.d < 1:
                raise ValueError("cycle length must be >= 1")

    def orbit(self, oid):
        for o in self.orbits:
            if o.orbit_id == oid:
                return o
        raise KeyError(oid)

    def successor(self, addr):
        o = self.orbit(addr[0])
        return (o.orbit_id, o.normalize(addr[1] + 1))

    def inventory(self):
        cycles = {}
        m_plus = m_bi = 0
        for o in self.orbits:
            if o.kind == CYCLE:
                cycles[o.d] = cycles.get(o.d, 0) + 1
            elif o.kind == UNILATERAL:
                m_plus += 1
            else:
                m_bi += 1
        return OrbitInventory(cycles, m_plus, m_bi)


class RuleMap:
    """A map on orbit addresses given per orbit by (target orbit, shift).

    The address (o, k) goes to (target, k + shift), reduced for cycles.
    """

    def __init__(self, space, rules):
        self.space = space
        self.rules = dict(rules)

    def __call__(self, addr):
        target, shift = self.rules[addr[0]]
        o = self.space.orbit(target)
        return (target, o.normalize(addr[1] + shift))


def t2a_construct_root(space):
    bad = t2a_offending(space.inventory())
    if bad:
        raise PreconditionError("criterion fails: " + ", ".join(bad))
    rules = {}
    groups = {}
    for o in space.orbits:
        if o.kind == CYCLE and o.d % 2:
            rules[o.orbit_id] = (o.orbit_id, (o.d + 1) // 2)
        else:
            groups.setdefault((o.kind, o.d), []).append(o.orbit_id)
    for ids in groups.values():
        for a, b in zip(ids[0::2], ids[1::2]):
            rules[a] = (b, 0)
            rules[b] = (a, 1)
    return RuleMap(space, rules)


@dataclass(frozen=True)
class T3FiniteCertificate:
    x0: int
    y0: int
    preimage2: tuple
    case_tag: str = "CaseI"

    def to_dict(self):
        return {"x0": self.x0, "y0": self.y0,
                "preimage2": list(self.preimage2), "case": self.case_tag}


def t3_check_finite(f):
    """Witness that f has no square root, via a point with a fat second preimage."""
    pre = preimages(f)
    big = [x for x in range(f.n) if len(pre[x]) > 1]
    for x0 in range(f.n):
        if f.image[x0] == x0:
            continue
        if any(x != x0 for x in big):
            continue
        pre2 = sorted(u for v in pre[x0] for u in pre[v])
        if len(pre2) > 1:
            return T3FiniteCertificate(x0, f.image[x0], tuple(pre2))
    return None


def brute_force_square_roots(f, limit=None, prune=False, guard=BRUTE_FORCE_GUARD):
    """Every g with g(g(x)) = f(x), in lexicographic order of the table."""
    if not prune and f.n > guard:
        raise GuardExceeded(f"n={f.n} exceeds brute-force guard {guard}")
    if limit is not None and limit <= 0:
        return []
    lim = -1 if limit is None else int(limit)
    run = kernels.square_roots_pruned if prune else kernels.square_roots_full
    return [FunctionalGraph(tuple(g)) for g in run(list(f.image), lim)]
