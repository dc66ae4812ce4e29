"""Time the compiled and numpy Volterra marching loops on the broadband kernel.

    python3 benchmarks/bench_volterra.py [--n 2500 5000 10000] [--repeat 3]
"""
import argparse
import math
import time

import numpy as np

from atomlaser import volterra
from atomlaser.model import Broadband, KernelSpec, SystemParams, kernel_eval


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, nargs="+", default=[2500, 5000, 10000])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--t-max", type=float, default=5e-3)
    args = ap.parse_args()

    kernel = KernelSpec(SystemParams(2 * math.pi * 123, 5e-26),
                        Broadband(1 / math.sqrt(2 * math.pi)))
    backends = ["numpy"] + (["cython"] if volterra.BACKEND == "cython" else [])
    print(f"{'n':>7} " + " ".join(f"{b:>10}" for b in backends) + "   max|du|")
    for n in args.n:
        h = args.t_max / n
        left, right = volterra.hat_moments(lambda t: kernel_eval(kernel, t), h, n)
        c = volterra.convolution_weights(left, right)
        times, results = [], []
        for b in backends:
            best = math.inf
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                u, _ = volterra.march(c, right, 0.0, h, 1.0, n, backend=b)
                best = min(best, time.perf_counter() - t0)
            times.append(best)
            results.append(u)
        diff = max(float(np.max(np.abs(r - results[0]))) for r in results)
        print(f"{n:>7} " + " ".join(f"{t:>9.4f}s" for t in times) + f"   {diff:.2e}")


if __name__ == "__main__":
    main()
