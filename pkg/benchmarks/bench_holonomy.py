"""Compare the compiled and pure-numpy RK4 holonomy kernels on batches of samples.

    python3 benchmarks/bench_holonomy.py [--samples 20000] [--repeat 3]
"""
import argparse
import time

import numpy as np

from qhdlab import gauge, kernels
from qhdlab.geometry import PathCurve
from qhdlab.spectrum import build_basis

CASES = [
    ("U1 circle, K=8", 1, "U1", 8),
    ("U1 T^2, K=32", 2, "U1", 32),
    ("SU2 T^2, K=24", 2, "SU2", 24),
]


def bench(backend, path, basis, X, level, repeat):
    profile = gauge.path_profile(path, basis, X.shape[1], level)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = gauge.batch_holonomy(path, basis, X, level, profile=profile, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--level", type=int, default=3)
    args = ap.parse_args()
    backends = kernels.available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"{'case':<18}{'steps':>7}" + "".join(f"{b + ' [s]':>14}" for b in backends) + f"{'speedup':>10}{'max diff':>11}")
    rng = np.random.default_rng(0)
    for label, d, group, K in CASES:
        basis = build_basis(d, group, None, K)
        path = PathCurve.loop(d)
        X = np.sqrt(0.5) * rng.standard_normal((args.samples, K))
        times, outs = {}, {}
        for b in backends:
            times[b], outs[b] = bench(b, path, basis, X, args.level, args.repeat)
        steps = gauge.path_profile(path, basis, K, args.level)[1].size
        row = f"{label:<18}{steps:>7}" + "".join(f"{times[b]:>14.4f}" for b in backends)
        if len(backends) > 1:
            diff = float(np.max(np.abs(outs["compiled"] - outs["python"])))
            row += f"{times['python'] / times['compiled']:>10.1f}{diff:>11.1e}"
        print(row)


if __name__ == "__main__":
    main()
