"""Time the numba kernels against their numpy twins.

    python benchmarks/bench_kernels.py [--n 20000] [--k 6] [--repeat 5]
"""
import argparse
import time

import numpy as np

from quatquot import _kernels as K


def best_of(func, args, repeat):
    func(*args)  # warm-up (and JIT compile)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        func(*args)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=20000, help="batch size")
    ap.add_argument("--k", type=int, default=6, help="quaternion slots")
    ap.add_argument("--grid", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    n, k = args.n, args.k
    x = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    y = rng.normal(size=(n, k)) + 1j * rng.normal(size=(n, k))
    s = np.abs(x) ** 2 + np.abs(y) ** 2
    w = rng.normal(size=(k, 2))
    v = rng.integers(-3, 4, size=(k, 2)).astype(float)
    t = rng.normal(size=(n, k, 3))
    xs = np.linspace(-4, 4, args.grid)
    ys = np.geomspace(1e-2, 4, args.grid)
    p = np.concatenate([[np.inf], rng.uniform(-2, 2, k - 1)])

    cases = {
        "nu_batch": (x, y),
        "nu_grad_batch": (x, y),
        "cleared_det_batch": (s, w, v),
        "joyce_det_grid": (xs, ys, p, v),
        "targets_to_split": (t,),
    }
    if not K.HAVE_NUMBA:
        print("numba unavailable: only the numpy path can be timed")
    print(f"{'kernel':<20} {'numpy [ms]':>12} {'numba [ms]':>12} {'speedup':>8}")
    for name, a in cases.items():
        t_np = best_of(getattr(K, f"{name}_numpy"), a, args.repeat)
        if K.HAVE_NUMBA:
            t_nb = best_of(getattr(K, f"{name}_numba"), a, args.repeat)
            print(f"{name:<20} {1e3 * t_np:12.2f} {1e3 * t_nb:12.2f} {t_np / t_nb:8.1f}x")
        else:
            print(f"{name:<20} {1e3 * t_np:12.2f} {'-':>12} {'-':>8}")


if __name__ == "__main__":
    main()
