"""Compare the compiled and pure-Python elimination backends.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Workloads: dim I^k for the McCool family (Hilbert function) and a batch of
membership tests, each run under both backends with identical inputs.
"""
from __future__ import annotations

import argparse
import random
import time
from fractions import Fraction

from resonance_lab import kernels
from resonance_lab.linalg import primitive_integer_point
from resonance_lab.presentations import mccool_presentation
from resonance_lab.resonance import ideal_rank, psi_matrix


def best_of(fn, repeat):
    times, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def hilbert_workload(n, k):
    P = mccool_presentation(n)
    return lambda backend: ideal_rank(P, k, backend=backend)


def membership_workload(n, count):
    P = mccool_presentation(n)
    M = psi_matrix(P)
    rng = random.Random(1)
    csrs = []
    for _ in range(count):
        pt = primitive_integer_point([Fraction(rng.randint(-9, 9)) for _ in range(P.N)])
        csrs.append(M.specialize_integer_csr(pt))

    def run(backend):
        return [int(kernels.echelon(*c, M.cols, backend=backend)[0]) for c in csrs]
    return run


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = kernels.available_backends()
    workloads = [
        ("dim I^4, n=5", hilbert_workload(5, 4)),
        ("dim I^5, n=5", hilbert_workload(5, 5)),
        ("dim I^4, n=6", hilbert_workload(6, 4)),
        ("psi rank x200, n=4", membership_workload(4, 200)),
        ("psi rank x50, n=5", membership_workload(5, 50)),
    ]
    print(f"{'workload':<22}" + "".join(f"{b:>12}" for b in backends) + "     speedup")
    for name, fn in workloads:
        row, results = [], []
        for b in backends:
            t, out = best_of(lambda: fn(b), args.repeat)
            row.append(t)
            results.append(out)
        if any(r != results[0] for r in results):
            raise SystemExit(f"{name}: backends disagree")
        by = dict(zip(backends, row))
        speed = f"{by['python'] / by['cython']:10.1f}x" if len(by) == 2 else ""
        print(f"{name:<22}" + "".join(f"{t:11.3f}s" for t in row) + speed)


if __name__ == "__main__":
    main()
