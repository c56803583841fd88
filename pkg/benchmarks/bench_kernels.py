"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--size 5000]

Prints one row per kernel with the best time of each backend and the ratio.
"""

import argparse
import timeit

import numpy as np

from outlier_relations.kernels import backends


def cases(size, rng):
    values = rng.normal(size=size).cumsum()
    u = rng.normal(size=size)
    lams = np.full(size, 0.5)
    x, y, w = rng.normal(size=size), rng.normal(size=size), rng.uniform(0.1, 1, size)
    errors = np.sort(np.abs(rng.normal(size=400)))
    idx = rng.integers(0, errors.size, size=(1000, errors.size))
    return {
        "rolling_zscore(phi=90)": lambda k: k.rolling_zscore(values, 90, 0, 1e-12),
        "decay_recurrence": lambda k: k.decay_recurrence(u, lams),
        "dominant": lambda k: k.dominant(u, x),
        "wls_moments": lambda k: k.wls_moments(x, y, w),
        "resample_quantiles(B=1000, n=400)": lambda k: k.resample_quantiles(errors, idx, 0.95),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--size", type=int, default=5000)
    args = ap.parse_args(argv)

    mods = backends()
    if "cython" not in mods:
        print("compiled extension not built; only the python backend is available")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<36}{'python ms':>12}{'cython ms':>12}{'speedup':>10}")
    for name, fn in cases(args.size, rng).items():
        times = {}
        for backend, mod in mods.items():
            timer = timeit.Timer(lambda: fn(mod))
            loops, _ = timer.autorange()
            times[backend] = min(timer.repeat(args.repeat, loops)) / loops * 1e3
        py, cy = times["python"], times.get("cython")
        cy_s = f"{cy:12.3f}" if cy is not None else f"{'-':>12}"
        ratio = f"{py / cy:10.1f}" if cy else f"{'-':>10}"
        print(f"{name:<36}{py:12.3f}{cy_s}{ratio}")


if __name__ == "__main__":
    main()
