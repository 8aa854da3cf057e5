"""Compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Both implementations are imported directly, so one run compares them
side by side and checks that they agree.
"""

import argparse
import itertools
import random
import time

from itroots import _kernels_py

try:
    from itroots import _kernels
except ImportError:
    _kernels = None


def square_root_workload(impl, maps):
    return [len(impl.square_roots_full(list(m), -1)) for m in maps]


def pruned_workload(impl, maps):
    return [len(impl.square_roots_pruned(list(m), -1)) for m in maps]


def perm_workload(impl, perms):
    return [impl.perm_roots_exist(list(p), n) for p in perms for n in (2, 3, 4)]


def best_of(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--maps", type=int, default=40, help="random maps of size 6")
    args = ap.parse_args()

    rng = random.Random(0)
    maps = [tuple(rng.randrange(6) for _ in range(6)) for _ in range(args.maps)]
    perms = list(itertools.permutations(range(6)))
    cases = [
        ("square roots, full search (n=6)", square_root_workload, maps),
        ("square roots, pruned search (n=6)", pruned_workload, maps),
        ("permutation roots (S_6, n=2,3,4)", perm_workload, perms),
    ]
    impls = [("python", _kernels_py)]
    if _kernels is not None:
        impls.append(("compiled", _kernels))
    else:
        print("compiled extension not available; timing the fallback only")

    print(f"{'workload':40s} " + " ".join(f"{name:>10s}" for name, _ in impls) + "   speedup")
    for label, fn, data in cases:
        row = []
        outs = []
        for _, impl in impls:
            t, out = best_of(lambda: fn(impl, data), args.repeat)
            row.append(t)
            outs.append(out)
        if len(outs) == 2 and outs[0] != outs[1]:
            raise SystemExit(f"{label}: implementations disagree")
        speed = f"{row[0] / row[1]:8.1f}x" if len(row) == 2 else ""
        print(f"{label:40s} " + " ".join(f"{t:9.3f}s" for t in row) + f"  {speed}")


if __name__ == "__main__":
    main()
