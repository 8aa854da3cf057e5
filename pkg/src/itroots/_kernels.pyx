# cython: boundscheck=False, wraparound=False
"""Compiled versions of the integer hot loops in ``_kernels_py``."""

from libc.stdlib cimport malloc, free


def compose(g, f):
    return [g[x] for x in f]


def square_roots_full(image, long limit=-1):
    cdef int n = len(image)
    cdef int i, x
    cdef bint ok
    cdef int *g
    cdef int *f
    out = []
    if n == 0:
        return [[]]
    g = <int *> malloc(n * sizeof(int))
    f = <int *> malloc(n * sizeof(int))
    try:
        for i in range(n):
            g[i] = 0
            f[i] = image[i]
        while True:
            ok = True
            for x in range(n):
                if g[g[x]] != f[x]:
                    ok = False
                    break
            if ok:
                out.append([g[i] for i in range(n)])
                if 0 <= limit <= len(out):
                    return out
            i = n - 1
            while i >= 0:
                g[i] += 1
                if g[i] < n:
                    break
                g[i] = 0
                i -= 1
            if i < 0:
                return out
    finally:
        free(g)
        free(f)


cdef bint _consistent(int *g, int *f, int pos):
    cdef int x, y
    for x in range(pos + 1):
        y = g[x]
        if y <= pos and g[y] != f[x]:
            return False
    return True


def square_roots_pruned(image, long limit=-1):
    cdef int n = len(image)
    cdef int i, pos
    cdef int *g
    cdef int *f
    out = []
    if n == 0:
        return [[]]
    g = <int *> malloc(n * sizeof(int))
    f = <int *> malloc(n * sizeof(int))
    try:
        for i in range(n):
            g[i] = -1
            f[i] = image[i]
        # iterative backtracking; g[pos] == -1 means "not yet tried"
        pos = 0
        while pos >= 0:
            if pos == n:
                out.append([g[i] for i in range(n)])
                if 0 <= limit <= len(out):
                    return out
                pos -= 1
                continue
            g[pos] += 1
            while g[pos] < n and not _consistent(g, f, pos):
                g[pos] += 1
            if g[pos] >= n:
                g[pos] = -1
                pos -= 1
            else:
                pos += 1
        return out
    finally:
        free(g)
        free(f)


cdef bint _power_equals(int *tau, int *sigma, int n, int k):
    cdef int x, y, j
    for x in range(n):
        y = x
        for j in range(k):
            y = tau[y]
        if y != sigma[x]:
            return False
    return True


def perm_power(p, int k):
    cdef int n = len(p)
    out = list(range(n))
    for _ in range(k):
        out = [p[x] for x in out]
    return out


def perm_roots_exist(sigma, int k):
    cdef int n = len(sigma)
    cdef int i, pos
    cdef int *tau
    cdef int *s
    cdef char *used
    if n == 0:
        return True
    tau = <int *> malloc(n * sizeof(int))
    s = <int *> malloc(n * sizeof(int))
    used = <char *> malloc(n * sizeof(char))
    try:
        for i in range(n):
            tau[i] = -1
            s[i] = sigma[i]
            used[i] = 0
        pos = 0
        while pos >= 0:
            if pos == n:
                if _power_equals(tau, s, n, k):
                    return True
                pos -= 1
                used[tau[pos]] = 0
                continue
            if tau[pos] >= 0:
                used[tau[pos]] = 0
            tau[pos] += 1
            while tau[pos] < n and used[tau[pos]]:
                tau[pos] += 1
            if tau[pos] >= n:
                tau[pos] = -1
                pos -= 1
                if pos >= 0:
                    used[tau[pos]] = 0
            else:
                used[tau[pos]] = 1
                pos += 1
        return False
    finally:
        free(tau)
        free(s)
        free(used)
