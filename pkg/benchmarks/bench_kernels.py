"""Compare the jit and pure-numpy kernel backends on a real automaton.

The backend is chosen at import time from ``THUEGAMES_NO_NUMBA``, so
each measurement runs in a child interpreter with the flag set the
right way; the parent only aggregates.  Run as::

    python3 benchmarks/bench_kernels.py --k 6 --pmax 8 --iters 200
"""

import argparse
import json
import os
import subprocess
import sys
import time


def measure(k: int, pmin: int, pmax: int, iters: int) -> dict:
    import numpy as np

    from thuegames.kernels import BACKEND
    from thuegames.modes import Mode
    from thuegames.solver import min_step, sum_step
    from thuegames.automaton import build_lambda
    from thuegames.words import PeriodRange

    lam = build_lambda(k, PeriodRange(pmin, pmax))
    rng = np.random.default_rng(0)
    C = rng.integers(1, 11001, size=len(lam.words), dtype=np.int64)

    for _ in range(3):
        # warm the jit cache / allocator before timing
        min_step(lam, sum_step(lam, C), Mode.HARD)

    t0 = time.perf_counter()
    for _ in range(iters):
        C2 = sum_step(lam, C)
    t1 = time.perf_counter()
    for _ in range(iters):
        min_step(lam, C2, Mode.HARD)
    t2 = time.perf_counter()

    return {
        "backend": BACKEND,
        "states": len(lam.words),
        "sum_us": (t1 - t0) / iters * 1e6,
        "min_us": (t2 - t1) / iters * 1e6,
    }


def run_child(no_numba: bool, args: argparse.Namespace) -> dict:
    env = dict(os.environ)
    env.pop("THUEGAMES_NO_NUMBA", None)
    if no_numba:
        env["THUEGAMES_NO_NUMBA"] = "1"
    cmd = [sys.executable, os.path.abspath(__file__), "--child",
           "--k", str(args.k), "--pmin", str(args.pmin),
           "--pmax", str(args.pmax), "--iters", str(args.iters)]
    proc = subprocess.run(cmd, env=env, capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(proc.stderr)
    return json.loads(proc.stdout)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--k", type=int, default=6)
    parser.add_argument("--pmin", type=int, default=1)
    parser.add_argument("--pmax", type=int, default=8)
    parser.add_argument("--iters", type=int, default=200)
    parser.add_argument("--child", action="store_true",
                        help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.child:
        print(json.dumps(measure(args.k, args.pmin, args.pmax, args.iters)))
        return 0

    rows = [run_child(no_numba, args) for no_numba in (False, True)]
    if rows[0]["backend"] == rows[1]["backend"]:
        print("numba unavailable; both children ran the numpy path")

    print(f"k={args.k} p={args.pmin}..{args.pmax} "
          f"({rows[0]['states']} states, {args.iters} iterations)")
    print(f"{'backend':<10} {'sum_step':>12} {'min_step':>12}")
    for row in rows:
        print(f"{row['backend']:<10} {row['sum_us']:>10.1f}us "
              f"{row['min_us']:>10.1f}us")
    if rows[0]["backend"] != rows[1]["backend"]:
        print(f"{'speedup':<10} "
              f"{rows[1]['sum_us'] / rows[0]['sum_us']:>11.1f}x "
              f"{rows[1]['min_us'] / rows[0]['min_us']:>11.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
