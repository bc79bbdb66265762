"""Compare the compiled simulation kernel with its pure-Python twin.

Run with ``python3 benchmarks/bench_kernels.py [--m N] [--repeat R]``.
Both backends consume the same uniforms, so the script also checks that
their paths agree.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cmcest.presets import CLASSES, class_instance
from cmcest.simulate import simulate

try:
    from cmcest import _kernels
except ImportError:  # extension not built
    _kernels = None


def _time(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled kernel unavailable; only the Python backend can run")
    print(f"{'class':<14}{'python s':>10}{'cython s':>10}{'speedup':>9}{'Msteps/s':>10}  same")
    for kind in CLASSES:
        model, policy = class_instance(kind)
        py = simulate(model, policy, m=args.m, seed=1, backend="python")
        t_py = _time(lambda: simulate(model, policy, m=args.m, seed=1, backend="python"), 1)
        if _kernels is None:
            print(f"{kind:<14}{t_py:>10.3f}")
            continue
        cy = simulate(model, policy, m=args.m, seed=1)
        t_cy = _time(lambda: simulate(model, policy, m=args.m, seed=1), args.repeat)
        same = np.array_equal(py.states, cy.states) and np.array_equal(py.controls, cy.controls)
        print(f"{kind:<14}{t_py:>10.3f}{t_cy:>10.4f}{t_py / t_cy:>9.1f}{args.m / t_cy / 1e6:>10.1f}  {same}")


if __name__ == "__main__":
    main()
