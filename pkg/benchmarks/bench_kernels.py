"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--n 256 512] [--threads 1 4] [--repeat 5]

Prints the best-of-``repeat`` time per call for each kernel and backend, the
speedup, and the max relative difference between the two backends' outputs.
"""

import argparse
import os
import timeit

import numpy as np

from vpmcf import kernels
from vpmcf.config import parse_config
from vpmcf.dynamics import Simulation


def fields(n):
    cfg = parse_config(f"preset=pinned_inner\nn={n}\n")
    sim = Simulation(cfg)
    under, over, _ = sim.barrier
    return sim, sim.phi0, sim.template.a, sim.template.b, under, over


def cases(n, threads):
    sim, phi, a, b, under, over = fields(n)
    eps, h, dt = sim.cfg.eps, sim.grid.h, sim.dt
    return {
        "laplacian": lambda impl: kernels.laplacian(phi, h, impl=impl, threads=threads),
        "explicit_update": lambda impl: kernels.explicit_update(
            phi, a, b, 0.3, eps, 0.1 * h * h, h, impl=impl, threads=threads),
        "imex_rhs": lambda impl: kernels.imex_rhs(phi, a, b, 0.3, eps, dt, impl=impl, threads=threads),
        "moments": lambda impl: np.array(kernels.moments(phi, a, b, eps, h, under, over, impl=impl)),
    }


def best(fn, repeat):
    number = max(1, int(0.05 / max(timeit.timeit(fn, number=1), 1e-7)))
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, nargs="+", default=[256, 512],
                   help="grid sizes (the pinned_inner preset needs n >= 200)")
    p.add_argument("--threads", type=int, nargs="+", default=[1])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    try:
        compiled = kernels.backend("compiled")
    except ImportError:
        print("compiled extension not built; run `pip install -e . --no-build-isolation`")
        return 1
    python = kernels.backend("python")
    print(f"cpu_count={os.cpu_count()}")
    print(f"{'kernel':<16}{'n':>6}{'thr':>5}{'numpy ms':>12}{'compiled ms':>13}{'speedup':>9}{'rel diff':>11}")
    for n in args.n:
        for threads in args.threads:
            for name, fn in cases(n, threads).items():
                ref = fn(python)
                diff = float(np.max(np.abs(fn(compiled) - ref)) / max(1.0, np.max(np.abs(ref))))
                t_py = best(lambda: fn(python), args.repeat)
                t_c = best(lambda: fn(compiled), args.repeat)
                print(f"{name:<16}{n:>6}{threads:>5}{1e3 * t_py:>12.3f}{1e3 * t_c:>13.3f}"
                      f"{t_py / t_c:>9.1f}{diff:>11.2g}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
