"""Timing comparison of the compiled and pure-Python eigensolver backends.

Runs both Jacobi implementations (and numpy.linalg.eigh as a reference)
over batches of random Hermitian matrices and prints per-call timings.

    python3 benchmarks/bench_kernels.py [--dims 2,4,8,16] [--repeats 300]
"""

import argparse
import time

import numpy as np

from dephaselab._kernels import backends


def _batch(rng, dim, count):
    m = rng.normal(size=(count, dim, dim)) + 1j * rng.normal(size=(count, dim, dim))
    return (m + np.conjugate(np.transpose(m, (0, 2, 1)))) / 2


def _time_solver(solve, batch, repeats):
    # One warm-up pass keeps one-time setup out of the measurement.
    solve(batch[0])
    start = time.perf_counter()
    for k in range(repeats):
        solve(batch[k % len(batch)])
    return (time.perf_counter() - start) / repeats


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--dims", default="2,4,8,16",
                        help="comma-separated matrix dimensions")
    parser.add_argument("--repeats", type=int, default=300,
                        help="timed calls per backend and dimension")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    dims = [int(d) for d in args.dims.split(",")]
    rng = np.random.default_rng(args.seed)
    impls = backends()

    print(f"backends: {', '.join(impls)}  (repeats={args.repeats})")
    header = f"{'dim':>4}  " + "".join(f"{name:>14}" for name in impls)
    header += f"{'numpy.eigh':>14}{'speedup':>10}"
    print(header)
    for dim in dims:
        batch = _batch(rng, dim, min(64, args.repeats))
        per = {}
        for name, solver in impls.items():
            per[name] = _time_solver(solver, batch, args.repeats)
        ref = _time_solver(np.linalg.eigh, batch, args.repeats)
        row = f"{dim:>4}  " + "".join(f"{per[name] * 1e6:>12.1f}us" for name in impls)
        row += f"{ref * 1e6:>12.1f}us"
        if "cython" in per and "python" in per:
            row += f"{per['python'] / per['cython']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
