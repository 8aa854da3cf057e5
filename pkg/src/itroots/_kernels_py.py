"""Pure-Python versions of the integer hot loops.

Used when the compiled ``_kernels`` extension is unavailable. Both modules
expose the same functions with the same semantics.
"""


def compose(g, f):
    """Return the table of g after f."""
    return [g[x] for x in f]


def square_roots_full(image, limit=-1):
    """All g with g(g(x)) == image[x], by enumerating every table.

    Candidates are visited in lexicographic order of the table.
    """
    n = len(image)
    out = []
    if n == 0:
        return [[]]
    g = [0] * n
    while True:
        ok = True
        for x in range(n):
            if g[g[x]] != image[x]:
                ok = False
                break
        if ok:
            out.append(list(g))
            if 0 <= limit <= len(out):
                return out
        # odometer increment, last position fastest
        i = n - 1
        while i >= 0:
            g[i] += 1
            if g[i] < n:
                break
            g[i] = 0
            i -= 1
        if i < 0:
            return out


def square_roots_pruned(image, limit=-1):
    """Same result set and order as ``square_roots_full`` via backtracking.

    A partial table is abandoned as soon as some x has both g(x) and g(g(x))
    assigned with g(g(x)) != image[x].
    """
    n = len(image)
    out = []
    if n == 0:
        return [[]]
    g = [-1] * n

    def consistent(pos):
        # only pairs touching pos can have become decidable
        for x in range(pos + 1):
            y = g[x]
            if y <= pos and g[y] != image[x]:
                return False
        return True

    def rec(pos):
        if pos == n:
            out.append(list(g))
            return 0 <= limit <= len(out)
        for v in range(n):
            g[pos] = v
            if consistent(pos) and rec(pos + 1):
                return True
        g[pos] = -1
        return False

    rec(0)
    return out


def perm_power(p, k):
    n = len(p)
    out = list(range(n))
    for _ in range(k):
        out = [p[x] for x in out]
    return out


def perm_roots_exist(sigma, k):
    """True iff some permutation tau of the same degree has tau**k == sigma."""
    n = len(sigma)
    used = [False] * n
    tau = [0] * n

    def rec(pos):
        if pos == n:
            return perm_power(tau, k) == list(sigma)
        for v in range(n):
            if not used[v]:
                used[v] = True
                tau[pos] = v
                if rec(pos + 1):
                    return True
                used[v] = False
        return False

    return rec(0)
