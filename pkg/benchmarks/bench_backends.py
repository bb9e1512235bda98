"""Timing comparison of the compiled and pure-Python kernel backends.

Each benchmark first checks that both backends return identical doubles on
its workload, then reports per-call timings and the speedup.  Run as

    python3 benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import time

import numpy as np

from majorant_gap import _kernels

CUTOFF = 0.2
ABS_TOL = 1e-12
MAX_TERMS = 10_000


def _time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_bessel(backend):
    grid = np.geomspace(1e-4, 600.0, 2000)

    def run():
        return [backend.bessel_k0k1(z) for z in grid]

    return run


def bench_f3_cdf(backend):
    grid = np.linspace(0.21, 3.0, 2000)

    def run():
        return [backend.f3_cdf(y, CUTOFF, ABS_TOL, MAX_TERMS) for y in grid]

    return run


def bench_sampler(backend):
    u = np.random.default_rng(7).random((2000, 2 * 128))

    def run():
        return backend.sample_m_block(u, 6.0, 1e-9, CUTOFF, ABS_TOL, MAX_TERMS)

    return run


def bench_hull(backend):
    rng = np.random.default_rng(11)
    walks = [np.cumsum(rng.standard_normal(2**14)) for _ in range(20)]

    def run():
        return [backend.upper_hull(w) for w in walks]

    return run


BENCHES = (
    ("bessel_k0k1 x2000", bench_bessel),
    ("f3_cdf x2000", bench_f3_cdf),
    ("sample_m_block 2000 rows", bench_sampler),
    ("upper_hull 20 x 16384", bench_hull),
)


def _equal(a, b):
    if isinstance(a, np.ndarray):
        return np.array_equal(a, b)
    if len(a) != len(b):
        return False
    return all(
        np.array_equal(np.asarray(x), np.asarray(y)) for x, y in zip(a, b)
    )


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3,
                        help="timing repetitions, best-of (default 3)")
    args = parser.parse_args()

    pure = _kernels.get_backend("pure")
    try:
        compiled = _kernels.get_backend("compiled")
    except ImportError:
        print("compiled backend not built; nothing to compare")
        return 1

    print("active backend: %s" % _kernels.backend_name)
    print("%-28s %12s %12s %9s" % ("kernel", "pure [ms]", "compiled [ms]", "speedup"))
    for name, factory in BENCHES:
        run_pure = factory(pure)
        run_comp = factory(compiled)
        if not _equal(run_pure(), run_comp()):
            raise SystemExit("backend outputs differ on %s" % name)
        t_pure = _time(run_pure, args.repeat)
        t_comp = _time(run_comp, args.repeat)
        print("%-28s %12.2f %12.2f %8.1fx"
              % (name, t_pure * 1e3, t_comp * 1e3, t_pure / t_comp))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
