"""Time the compiled and pure-Python tridiagonal kernels on latitude solves.

    python benchmarks/bench_kernels.py --n-cells 512 2048 --repeat 3
"""

import argparse
import time

import numpy as np

from monopole_vortex import LaserModePair, LatitudeGrid, assemble, sector_make
from monopole_vortex.latitude_spectrum import eigen_lowest
from monopole_vortex.tridiag import BACKENDS, use_backend


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n-cells", type=int, nargs="+", default=[512, 2048, 8192])
    parser.add_argument("--modes", type=int, default=4, help="eigenpairs per solve")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)

    modes = LaserModePair(0, 1)
    sector = sector_make(1, 1)
    print(f"{'n_cells':>8} {'backend':>9} {'seconds':>10} {'speedup':>8}")
    for n in args.n_cells:
        op = assemble(modes, sector, LatitudeGrid(n))
        timings, results = {}, {}
        for name in sorted(BACKENDS):
            use_backend(name)
            timings[name] = best_time(lambda: eigen_lowest(op, args.modes), args.repeat)
            results[name] = np.array([m.lam for m in eigen_lowest(op, args.modes)])
        use_backend("compiled" if "compiled" in BACKENDS else "python")
        for name, t in timings.items():
            print(f"{n:>8} {name:>9} {t:>10.4f} {timings['python'] / t:>8.1f}")
        if len(results) == 2:
            assert np.array_equal(results["compiled"], results["python"]), "backends disagree"


if __name__ == "__main__":
    main()
