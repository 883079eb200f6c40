"""Time the compiled kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py --sizes 256 512 1024 --repeat 3
"""
import argparse
import time

import numpy as np

from mattekit import kernels


def best(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[256, 512, 1024])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = sorted(kernels.BACKENDS)
    rng = np.random.default_rng(0)
    print(f"{'kernel':<12}{'size':>6}" + "".join(f"{b + ' ms':>12}" for b in backends))
    for n in args.sizes:
        C = rng.random((n, n, 3))
        alpha = rng.random((n, n))
        x = rng.random((n, n))
        rows = {"rb_sweep": [], "box_sum r=8": []}
        for b in backends:
            F, B = C.copy(), C.copy()
            rows["rb_sweep"].append(best(lambda: kernels.rb_sweep(F, B, C, alpha, 1.0, 0, 1.6, b), args.repeat))
            rows["box_sum r=8"].append(best(lambda: kernels.box_sum(x, 8, b), args.repeat))
        for name, ts in rows.items():
            print(f"{name:<12}{n:>6}" + "".join(f"{t * 1e3:>12.2f}" for t in ts))


if __name__ == "__main__":
    main()
