"""Time the numba kernels against their numpy twins.

Usage::

    python benchmarks/bench_kernels.py [--size 1000000] [--repeat 5]

Each kernel is called once before timing so that numba compilation is not
counted. Results are the best of ``--repeat`` runs.
"""
import argparse
import time

import numpy as np

from creditbackbone import _kernels


def _inputs(size: int, rng: np.random.Generator) -> dict[str, tuple]:
    n_nodes = max(size // 20, 2)
    index = rng.integers(0, n_nodes, size).astype(np.int64)
    weights = rng.exponential(size=size)
    x = rng.uniform(size=size)
    k = rng.integers(1, 3000, size).astype(np.int64)
    sorted_p = np.sort(rng.uniform(size=size) ** 4)
    u = rng.integers(0, n_nodes, size // 4).astype(np.int64)
    v = rng.integers(0, n_nodes, size // 4).astype(np.int64)
    wa, wb = rng.exponential(size=size), rng.exponential(size=size)
    return {
        "accumulate": (index, weights, n_nodes),
        "disparity_pvalues": (x, k),
        "bh_cutoff": (sorted_p, 0.01 / size),
        "component_labels": (n_nodes, u, v),
        "minmax_sums": (wa, wb),
    }


def _best(fn, args, repeat):
    fn(*args)
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--size", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if _kernels.NUMBA_KERNELS is None:
        raise SystemExit("numba is not installed; nothing to compare")
    cases = _inputs(args.size, np.random.default_rng(args.seed))
    print(f"{'kernel':<20}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}")
    for name, call_args in cases.items():
        t_np = _best(getattr(_kernels.NUMPY_KERNELS, name), call_args, args.repeat)
        t_nb = _best(getattr(_kernels.NUMBA_KERNELS, name), call_args, args.repeat)
        print(f"{name:<20}{t_np * 1e3:>12.2f}{t_nb * 1e3:>12.2f}{t_np / t_nb:>10.1f}x")


if __name__ == "__main__":
    main()
