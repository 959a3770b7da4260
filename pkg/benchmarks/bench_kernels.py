"""Compare the compiled and pure-numpy kernels on the two hot loops.

    python3 benchmarks/bench_kernels.py [--steps 400] [--size 400] [--events 200000]

Prints wall time per backend and checks that both give identical results.
"""

import argparse
import time

import numpy as np

from qdln import _core
from qdln.fdtd import GaussianPulse, LineMonitor, SimulationSpec, Source, Stop, run
from qdln.geometry import PermittivityMap
from qdln.modesolver import C0


def fdtd_case(n, steps, pol):
    dx = 20e-9
    eps = np.ones((n, n))
    eps[n // 2:, :] = 2.25
    em = PermittivityMap(eps, dx, dx)
    c = 0.5 * n * dx
    src = Source("point_dipole", (0.3 * n * dx, c), GaussianPulse(1.3e-6, 0.2))
    mon = LineMonitor("m", "x", 0.7 * n * dx, (0.3 * n * dx, 0.7 * n * dx))
    return SimulationSpec(em, pol, (C0 / 1.3e-6,), (src,), (mon,), stop=Stop(fixed_steps=steps))


def timed(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=400)
    ap.add_argument("--size", type=int, default=400)
    ap.add_argument("--events", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    backends = ["python"]
    try:
        _core.get_backend("cython")
        backends.insert(0, "cython")
    except ImportError:
        print("compiled extension not built; timing the fallback only")

    print(f"FDTD {args.size}x{args.size}, {args.steps} steps")
    for pol in ("TE", "TM"):
        spec = fdtd_case(args.size, args.steps, pol)
        res = {}
        for b in backends:
            t, r = timed(lambda: run(spec, backend=b), args.repeat)
            res[b] = r
            cells = args.size**2 * args.steps
            print(f"  {pol} {b:<7} {t:8.3f} s  {cells / t / 1e6:8.1f} Mcell-steps/s")
        if len(res) == 2:
            same = np.array_equal(res["cython"].monitors["m"].e, res["python"].monitors["m"].e)
            print(f"  {pol} identical monitor spectra: {same}")

    rng = np.random.default_rng(1)
    a = np.sort(rng.uniform(0, 1e-2, args.events))
    b = np.sort(rng.uniform(0, 1e-2, args.events))
    print(f"coincidences, 2 x {args.events} events, 321 bins")
    counts = {}
    for name in backends:
        k = _core.get_backend(name)
        t, counts[name] = timed(lambda: k.coincidence_counts(a, b, 128e-12, 160), args.repeat)
        print(f"  {name:<7} {t:8.4f} s")
    if len(counts) == 2:
        print(f"  identical counts: {np.array_equal(counts['cython'], counts['python'])}")


if __name__ == "__main__":
    main()
