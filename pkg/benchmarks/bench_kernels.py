"""Time the numba kernels against the pure-numpy fallback on identical inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--quick]

Both backends are imported side by side (the RMTMINORS_BACKEND switch only
picks the default one), so a single process compares them.  Each row also
reports whether the two backends returned the same answer.
"""

import argparse
import time

import numpy as np

from rmtminors._backend import get_kernels
from rmtminors.ensembles import sample_wigner, sample_wishart
from rmtminors.linalg import JACOBI_MAX_SWEEPS as SWEEPS, JACOBI_TOL as TOL
from rmtminors.minors import INTERLACE_MAX, TIE_RTOL, greedy_max
from rmtminors.rng import RngStream


def best_of(fn, repeat):
    fn()                      # warm-up (JIT compile / cache load)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(quick):
    s = RngStream(2024)
    mats = np.stack([sample_wishart(12, 8, s.derive(i)).entries for i in range(2000)])
    raw = s.derive(9).raw(2_000_000)
    p_big = 256 if quick else 1024
    wig = sample_wigner(p_big, 2.0, s.derive(10)).entries
    wis = sample_wishart(400, 64, s.derive(11)).entries
    g = greedy_max(wig, 2)
    init_sub = np.array(g.subset, dtype=np.int64)

    yield ("jacobi_eigh 8x8", lambda k: k.jacobi_eigh(mats[0, :8, :8].copy(), True, TOL, SWEEPS)[0])
    yield ("lambda1_batch 2000 x 8x8", lambda k: k.lambda1_batch(mats, TOL, SWEEPS))
    yield ("polar_fill 2e6 words",
           lambda k: k.polar_fill(raw, np.empty(1_600_000), 0)[1])
    yield ("enumerate p=64 m=3 (Wishart)",
           lambda k: k.enumerate_max(wis, 3, TIE_RTOL, TOL, SWEEPS)[:2])
    yield (f"branch_and_bound p={p_big} m=2 (Wigner)",
           lambda k: k.bnb_max(wig, 2, g.value, init_sub, INTERLACE_MAX, TIE_RTOL, TOL, SWEEPS)[:2])


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.allclose(np.asarray(a, dtype=float), np.asarray(b, dtype=float), rtol=1e-12, atol=0)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--quick", action="store_true", help="smaller branch-and-bound case")
    args = ap.parse_args()
    nb, npk = get_kernels("numba"), get_kernels("numpy")
    print(f"{'case':40s} {'numba [s]':>11s} {'numpy [s]':>11s} {'speedup':>8s}  agree")
    for name, fn in cases(args.quick):
        t_nb, r_nb = best_of(lambda: fn(nb), args.repeat)
        t_np, r_np = best_of(lambda: fn(npk), args.repeat)
        print(f"{name:40s} {t_nb:11.5f} {t_np:11.5f} {t_np / t_nb:8.1f}  {same(r_nb, r_np)}")


if __name__ == "__main__":
    main()
