"""n-th roots of finite permutations from cycle-type arithmetic.

Permutations are image tuples on 0..k-1. A cycle type is a dict mapping a
cycle length m to the number c_m of m-cycles.

An n-th root exists iff every c_m is a multiple of ((m, n)), the product
over primes p dividing m of p**e where p**e exactly divides n.

>>> has_nth_root({4: 1}, 2)
False
>>> format_cycles(construct_nth_root((1, 0, 3, 2), 2))
'(0 2 1 3)'
"""

import math
import re
from functools import lru_cache

from itroots import kernels


def validate(sigma):
    sigma = tuple(int(v) for v in sigma)
    if sorted(sigma) != list(range(len(sigma))):
        raise ValueError("not a permutation")
    return sigma


def cycles(sigma):
    """Cycles of sigma, each starting at its least element, sorted by it."""
    seen = set()
    out = []
    for v in range(len(sigma)):
        if v in seen:
            continue
        cyc = []
        w = v
        while w not in seen:
            seen.add(w)
            cyc.append(w)
            w = sigma[w]
        out.append(tuple(cyc))
    return out


def cycle_type(sigma):
    counts = {}
    for c in cycles(validate(sigma)):
        counts[len(c)] = counts.get(len(c), 0) + 1
    return dict(sorted(counts.items()))


def compose(a, b):
    """a after b."""
    return tuple(a[x] for x in b)


def power(sigma, n):
    return tuple(kernels.perm_power(list(sigma), n))


def prime_factors(m):
    ps = []
    p = 2
    while p * p <= m:
        if m % p == 0:
            ps.append(p)
            while m % p == 0:
                m //= p
        p += 1
    if m > 1:
        ps.append(m)
    return ps


def double_bracket(m, n):
    if m < 1 or n < 1:
        raise ValueError("m and n must be positive")
    out = 1
    for p in prime_factors(m):
        while n % p == 0:
            out *= p
            n //= p
    return out


def has_nth_root(t, n):
    if n < 1:
        raise ValueError("n must be positive")
    return all(c % double_bracket(m, n) == 0 for m, c in t.items() if c)


def even_cycle_criterion(t):
    """The n = 2 specialisation: for each even length, the cycle count is even.

    Counting all even cycles together is not enough: (0 1 2 3)(4 5) has two
    even cycles and no square root.
    """
    return all(c % 2 == 0 for m, c in t.items() if m % 2 == 0)


def power_cycle_type(t, n):
    out = {}
    for L, c in t.items():
        if not c:
            continue
        d = math.gcd(n, L)
        out[L // d] = out.get(L // d, 0) + c * d
    return dict(sorted(out.items()))


def bundle_sizes(m, n):
    """Bundle sizes r with r | n and gcd(n, r*m) == r, increasing."""
    return [r for r in range(1, n + 1) if n % r == 0 and math.gcd(n, r * m) == r]


def split_bundles(c, sizes):
    """Write c as a sum of the given sizes, preferring small ones first."""
    sizes = tuple(sizes)

    @lru_cache(maxsize=None)
    def go(rest):
        if rest == 0:
            return ()
        for r in sizes:
            if r <= rest:
                tail = go(rest - r)
                if tail is not None:
                    return (r,) + tail
        return None

    out = go(c)
    return None if out is None else list(out)


def _splice(bundle, n, tau):
    """Interleave r m-cycles into one r*m-cycle whose n-th power restores them."""
    r, m = len(bundle), len(bundle[0])
    step = pow((n // r) % m, -1, m) if m > 1 else 0
    z = [bundle[i][(s * step) % m] for s in range(m) for i in range(r)]
    for t in range(r * m):
        tau[z[t]] = z[(t + 1) % (r * m)]


def construct_nth_root(sigma, n):
    """A permutation tau with tau**n == sigma, or None when none exists."""
    sigma = validate(sigma)
    if n < 1:
        raise ValueError("n must be positive")
    by_len = {}
    for c in cycles(sigma):
        by_len.setdefault(len(c), []).append(c)
    tau = [0] * len(sigma)
    for m, cs in sorted(by_len.items()):
        plan = split_bundles(len(cs), bundle_sizes(m, n))
        if plan is None:
            return None
        i = 0
        for r in plan:
            _splice(cs[i:i + r], n, tau)
            i += r
    tau = tuple(tau)
    assert power(tau, n) == sigma
    return tau


def brute_force_root_exists(sigma, n):
    return kernels.perm_roots_exist(list(validate(sigma)), n)


def parse_cycles(text, degree=None):
    """Parse cycle notation such as "(0 1 2)(3 4)" into an image tuple."""
    text = text.strip()
    if not re.fullmatch(r"(\(\s*\d+(\s*[ ,]\s*\d+)*\s*\)\s*)*|\(\s*\)", text):
        raise ValueError(f"bad cycle notation: {text!r}")
    groups = [[int(v) for v in re.split(r"[\s,]+", g.strip()) if v]
              for g in re.findall(r"\(([^)]*)\)", text)]
    points = [v for g in groups for v in g]
    if len(set(points)) != len(points):
        raise ValueError("a point appears in two cycles")
    k = degree if degree is not None else (max(points) + 1 if points else 0)
    if points and max(points) >= k:
        raise ValueError("cycle entry exceeds degree")
    sigma = list(range(k))
    for g in groups:
        for a, b in zip(g, g[1:] + g[:1]):
            sigma[a] = b
    return tuple(sigma)


def format_cycles(sigma, fixed=False):
    parts = [c for c in cycles(sigma) if fixed or len(c) > 1]
    if not parts:
        return "()"
    return "".join("(" + " ".join(map(str, c)) + ")" for c in parts)
