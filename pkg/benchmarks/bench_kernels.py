"""Compare the numba kernels against their pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is called once before timing so compilation is excluded.
"""

import argparse
import time

import numpy as np

from mhn_phase import _kernels as K


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    rng = np.random.default_rng(0)
    X = np.ascontiguousarray(rng.random((784, 50)))
    XT = np.ascontiguousarray(X.T)
    xi0 = X[:, 0] + 0.05 * rng.normal(size=784)
    p0 = rng.dirichlet(np.ones(16))
    betas = np.linspace(1.0, 11.0, 2001)
    return {
        "p_fixed_point N=16": (
            lambda: K.py_p_fixed_point(p0, 4.0, 1e-12, 200_000),
            lambda: K.p_fixed_point(p0, 4.0, 1e-12, 200_000),
        ),
        "p_trajectory N=16 x1000": (
            lambda: K.py_p_trajectory(p0, 4.0, 1000),
            lambda: K.p_trajectory(p0, 4.0, 1000),
        ),
        "xi_fixed_point d=784 N=50": (
            lambda: K.py_xi_fixed_point(X, XT, xi0, 0.09, 1e-8, 10_000),
            lambda: K.xi_fixed_point(X, XT, xi0, 0.09, 1e-8, 10_000),
        ),
        "branch_scan N=10 x2001": (
            lambda: K.py_branch_scan(10, betas, 1e-3, 1e-12, 1_000_000),
            lambda: K.branch_scan(10, betas, 1e-3, 1e-12, 1_000_000),
        ),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not K.USE_NUMBA:
        print("numba disabled or missing; only the numpy path is available")
    print(f"{'kernel':30s} {'numpy [s]':>12s} {'numba [s]':>12s} {'speedup':>9s}")
    for name, (slow, fast) in cases().items():
        t_np = best_of(slow, args.repeat)
        t_nb = best_of(fast, args.repeat)
        print(f"{name:30s} {t_np:12.5f} {t_nb:12.5f} {t_np / t_nb:9.1f}")


if __name__ == "__main__":
    main()
