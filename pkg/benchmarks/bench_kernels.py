"""Compare the compiled and pure-Python Metropolis kernels.

    python benchmarks/bench_kernels.py [--steps 200000] [--repeat 3]

Both backends get the same pre-drawn random numbers, so the script also
checks that they end in the same state.
"""

import argparse
import time

import numpy as np

from brainising import _pykernels
from brainising.hamiltonians import CurieWeiss, DenseCoupling, NearestNeighbor2D
from brainising.mcmc import _Chain

try:
    from brainising import _ckernels
except ImportError:
    _ckernels = None


def _inputs(n, steps, seed):
    rng = np.random.default_rng(seed)
    sites = rng.integers(0, n, steps)
    u = rng.random(steps)
    fac = 1.0 + 0.03 * rng.standard_normal(2 * steps)
    return sites, u, fac


def _time_backend(mod, h, steps, beta, repeat):
    best, state = np.inf, None
    for _ in range(repeat):
        chain = _Chain(h, np.ones(h.n_spins, dtype=np.int8))
        sites, u, fac = _inputs(h.n_spins, steps, 0)
        samples = np.zeros((0, h.n_spins), dtype=np.int8)
        t0 = time.perf_counter()
        mod.run_chain(chain.model, chain.x, chain.istate, chain.fstate, float(chain.J), beta,
                      chain.nbr, chain.Jmat, chain.hvec, chain.local, sites, u, fac, False, samples, 0, 1)
        best = min(best, time.perf_counter() - t0)
        state = chain.x.copy()
    return best, state


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=200_000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rng = np.random.default_rng(1)
    Jd = rng.normal(size=(64, 64))
    Jd = (Jd + Jd.T) / 2
    np.fill_diagonal(Jd, 0.0)
    models = {
        "curie_weiss(1024)": CurieWeiss(1024),
        "nn2d(32x32)": NearestNeighbor2D(32),
        "dense(64)": DenseCoupling(Jd),
    }
    print(f"{'model':20s} {'python s':>10s} {'cython s':>10s} {'speedup':>8s}  same")
    for name, h in models.items():
        tp, xp = _time_backend(_pykernels, h, args.steps, 3.0, args.repeat)
        if _ckernels is None:
            print(f"{name:20s} {tp:10.4f} {'-':>10s} {'-':>8s}  -")
            continue
        tc, xc = _time_backend(_ckernels, h, args.steps, 3.0, args.repeat)
        print(f"{name:20s} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f}  {bool(np.array_equal(xp, xc))}")


if __name__ == "__main__":
    main()
