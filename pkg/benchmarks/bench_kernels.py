"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--sizes 2000x100x20,...]

Each size is NxKxn (samples, pairs, input dimension).  Reports the best of
``--repeat`` wall times for the feature map and for a (k+1)x(k+1) Cholesky
factor-and-solve, plus the max abs difference between backends.
"""
import argparse
import time

import numpy as np

from vsc import kernels


def _best(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _geometry(rng, N, k, n):
    X = rng.normal(size=(N, n))
    xp, xm = rng.normal(size=(2, k, n))
    v = xp - xm
    return X, (xp + xm) / 2, v / np.linalg.norm(v, axis=1, keepdims=True), v / 2


def _factor_solve(mod, A, b):
    L, bad = mod.cholesky(A)
    assert bad == -1
    return mod.cho_solve(L, b)


def bench(sizes, repeat):
    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled kernels not built; timing the numpy fallback only")
    rng = np.random.default_rng(0)
    print(f"{'size':>16} {'kernel':>10} " + " ".join(f"{b:>10}" for b in backends)
          + f" {'speedup':>8} {'max|diff|':>10}")
    for N, k, n in sizes:
        X, centers, normals, halves = _geometry(rng, N, k, n)
        F = kernels.feature_matrix(X, centers, normals, halves, 0.01, True)
        A = F.T @ F + np.eye(k + 1)
        b = F.T @ rng.choice([-1.0, 1.0], N)
        cases = {
            "features": lambda m: m.feature_matrix(X, centers, normals, halves, 0.01, True),
            "cholesky": lambda m: _factor_solve(m, A, b),
        }
        for name, call in cases.items():
            times = {bk: _best(lambda: call(m), repeat) for bk, m in backends.items()}
            outs = [call(m) for m in backends.values()]
            diff = max(float(np.max(np.abs(o - outs[0]))) for o in outs)
            speed = times["python"] / times["compiled"] if "compiled" in times else 1.0
            print(f"{f'{N}x{k}x{n}':>16} {name:>10} "
                  + " ".join(f"{t * 1e3:>8.2f}ms" for t in times.values())
                  + f" {speed:>7.2f}x {diff:>10.2e}")


def _sizes(text):
    return [tuple(int(v) for v in s.split("x")) for s in text.split(",")]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--sizes", type=_sizes, default=_sizes("1800x100x20,1800x500x20,900x100x2"))
    args = ap.parse_args()
    bench(args.sizes, args.repeat)


if __name__ == "__main__":
    main()
