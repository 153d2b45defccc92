"""Timing comparison of the compiled evaluation core against the numpy
fallback.  Run from a checkout:

    python3 benchmarks/bench_kernels.py --points 200000 --repeats 5
"""

import argparse
import time

import numpy as np

from meancover import parse_spec
from meancover._kernels import BACKEND, _numpy_backend, execute
from meancover.funcmodel import _program

SPECS = [
    "mono(6)",
    "poly[0,1,0,0.35]",
    "blaschke[(0,0),(0.3,-0.2)]",
    "omit(zeta=0.125,k=3)",
    "mobius(eps=0.1)",
    "dilate(prod(poly[0,1],comp(mono(2),mobiusg[(0,0),(1,0),(-1,0),(1,0)])),0.9)",
]


def _sample(n, seed=12):
    rng = np.random.default_rng(seed)
    return 0.98 * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))


def _best(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--points", type=int, default=200000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    z = _sample(args.points)
    print(f"active backend: {BACKEND}; {args.points} points, best of {args.repeats}")
    print(f"{'spec':44s} {'compiled':>10s} {'python':>10s} {'speedup':>8s}")
    for text in SPECS:
        prog = _program(parse_spec(text).root)
        tc = _best(lambda: execute(prog, z), args.repeats)
        tp = _best(
            lambda: _numpy_backend.eval_program(prog, z, 1e-12), args.repeats
        )
        label = text if len(text) <= 44 else text[:41] + "..."
        print(f"{label:44s} {tc * 1e3:9.2f}ms {tp * 1e3:9.2f}ms {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
