"""Compiled vs pure-Python singular value kernels.

    python3 benchmarks/bench_spectral.py [--sizes 50,100,200] [--repeats 3]

Times the full pipeline (bidiagonalization + implicit QR) for real and complex
square matrices with both backends and checks that they agree.
"""
import argparse
import time

import numpy as np

from wishart_edge.ensembles import EnsembleSpec, EntryDistribution, sample_matrix
from wishart_edge.spectral import singular_values

try:
    from wishart_edge import _kernels
except ImportError:
    _kernels = None


def best_time(func, arg, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = func(arg)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="50,100,200")
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        print("compiled extension not built; nothing to compare")
        return
    print(f"{'field':8s} {'size':>5s} {'compiled s':>11s} {'python s':>10s} {'speedup':>8s} {'max rel diff':>13s}")
    for dist in (EntryDistribution.gaussian_real(), EntryDistribution.gaussian_complex()):
        for n in (int(v) for v in args.sizes.split(",")):
            x = sample_matrix(EnsembleSpec(dist, n, n), seed=n).entries
            tc, sc = best_time(lambda a: singular_values(a, "compiled"), x, args.repeats)
            tp, sp = best_time(lambda a: singular_values(a, "python"), x, args.repeats)
            diff = float(np.max(np.abs(sc - sp)) / sc[0])
            field = "complex" if np.iscomplexobj(x) else "real"
            print(f"{field:8s} {n:5d} {tc:11.4f} {tp:10.4f} {tp / tc:8.1f} {diff:13.2e}")


if __name__ == "__main__":
    main()
