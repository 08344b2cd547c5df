"""Compare the compiled and numpy kernel backends on identical inputs.

    python benchmarks/bench_kernels.py [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from chebyshev_a3 import _pykernels
from chebyshev_a3.poly import build_map

try:
    from chebyshev_a3 import _ckernels
except ImportError:
    _ckernels = None


def cases(rng):
    z = np.ascontiguousarray(rng.normal(size=(100_000, 3)) + 1j * rng.normal(size=(100_000, 3)))
    Z = np.ascontiguousarray(rng.normal(size=(100_000, 4)) + 1j * rng.normal(size=(100_000, 4)))
    s = np.ascontiguousarray(rng.uniform(-50, 50, (100_000, 3)))
    for d in (2, 4, 6):
        cube = build_map(d)._cube
        yield f"poly_eval d={d} (1e5 points)", "poly_eval", (cube, z)
    yield "homogeneous_eval d=4 (1e5 points)", "homogeneous_eval", (build_map(4)._cube, Z)
    yield "fold_batch (1e5 points, |s| <= 50)", "fold_batch", (s,)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':40s} {'numpy [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for label, name, inputs in cases(rng):
        py = min(timeit.repeat(lambda: getattr(_pykernels, name)(*inputs), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{label:40s} {py * 1e3:12.2f} {'n/a':>12s} {'':>8s}")
            continue
        cy = min(timeit.repeat(lambda: getattr(_ckernels, name)(*inputs), number=1, repeat=args.repeat))
        a = getattr(_pykernels, name)(*inputs)
        b = getattr(_ckernels, name)(*inputs)
        a0, b0 = (np.asarray(a[0]), np.asarray(b[0])) if name == "fold_batch" else (a, np.asarray(b))
        assert np.allclose(a0, b0, rtol=1e-12, atol=1e-12), label
        print(f"{label:40s} {py * 1e3:12.2f} {cy * 1e3:12.2f} {py / cy:7.1f}x")


if __name__ == "__main__":
    main()
