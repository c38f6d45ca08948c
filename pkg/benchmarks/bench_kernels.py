"""Benchmark the compiled kernels against the numpy fallback.

Workloads mirror the package's hot loops: small dense mod-p products,
reduced echelon forms, characteristic polynomials, and the composite
Jordan-Chevalley pipeline that dominates the randomized Cartan search.

Run:  python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import time

import numpy as np

from thetagrade import _kernels_py

try:
    from thetagrade import _kernels_cy
except ImportError:
    _kernels_cy = None


P = 13
SIZES = {"matmul": (8, 20000), "rref": (24, 2000), "charpoly": (8, 5000)}


def make_matrices(rng, n, count, p):
    return [
        np.array([[rng.randrange(p) for _ in range(n)] for _ in range(n)], dtype=np.int64)
        for _ in range(count)
    ]


def bench_matmul(impl, mats, p):
    out = 0
    for i in range(len(mats) - 1):
        out ^= int(impl.matmul(mats[i], mats[i + 1], p)[0, 0])
    return out


def bench_rref(impl, mats, p):
    out = 0
    for m in mats:
        out ^= len(impl.rref(m, p)[1])
    return out


def bench_charpoly(impl, mats, p):
    out = 0
    for m in mats:
        out ^= int(impl.charpoly(m, p)[-1])
    return out


def bench_semisimple(impl, mats, p):
    """Composite workload: the Jordan-Chevalley split through the kernel
    interface (temporarily patched in)."""
    from thetagrade import kernels, linalg

    saved = (kernels.matmul, kernels.matpow, kernels.rref, kernels.charpoly)
    kernels.matmul, kernels.matpow, kernels.rref, kernels.charpoly = (
        impl.matmul,
        impl.matpow,
        impl.rref,
        impl.charpoly,
    )
    try:
        out = 0
        for m in mats:
            out ^= int(linalg.semisimple_part(m, p)[0, 0])
        return out
    finally:
        kernels.matmul, kernels.matpow, kernels.rref, kernels.charpoly = saved


def run(repeat):
    rng = random.Random(1)
    impls = [("python", _kernels_py)]
    if _kernels_cy is not None:
        impls.append(("cython", _kernels_cy))
    workloads = []
    n, count = SIZES["matmul"]
    workloads.append(("matmul 8x8 x20000", bench_matmul, make_matrices(rng, n, count, P)))
    n, count = SIZES["rref"]
    workloads.append(("rref 24x24 x2000", bench_rref, make_matrices(rng, n, count, P)))
    n, count = SIZES["charpoly"]
    workloads.append(("charpoly 8x8 x5000", bench_charpoly, make_matrices(rng, n, count, P)))
    workloads.append(("jordan-chevalley 6x6 x300", bench_semisimple, make_matrices(rng, 6, 300, P)))

    print(f"{'workload':28s}" + "".join(f"{name:>12s}" for name, _ in impls) + f"{'speedup':>10s}")
    for label, fn, data in workloads:
        times = []
        checks = []
        for name, impl in impls:
            best = float("inf")
            for _ in range(repeat):
                t0 = time.perf_counter()
                checks.append(fn(impl, data, P))
                best = min(best, time.perf_counter() - t0)
            times.append(best)
        assert len(set(checks)) == 1, f"backends disagree on {label}"
        speed = f"{times[0] / times[-1]:.1f}x" if len(times) > 1 else "-"
        print(f"{label:28s}" + "".join(f"{t * 1000:>10.1f}ms" for t in times) + f"{speed:>10s}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    run(ap.parse_args().repeat)
