"""Time the numba and pure-numpy kernels side by side.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Set GRAVBOUNDS_NO_NUMBA=1 to make the numpy path the library default; this
script always times both explicitly.
"""

import argparse
import time

import numpy as np

from gravbounds import kernels
from gravbounds._accel import NUMBA_AVAILABLE


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases():
    y = np.linspace(-60.0, 40.0, 200_000)
    x_in = np.linspace(-6.0, 6.0, 2049)
    x_out = np.linspace(-8.0, 6.0, 2049)
    psi = np.exp(-x_in ** 2 / 2.0).astype(complex)
    return {
        "airy 200k points": lambda b: kernels.airy(y, backend=b),
        "propagate 2049x2049": lambda b: kernels.propagate(x_out, x_in, psi, 0.5, 1.0, 1.0, backend=b),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if NUMBA_AVAILABLE else [])
    print(f"{'kernel':24s} " + " ".join(f"{b:>10s}" for b in backends) + "   speedup  max|diff|")
    for name, run in cases().items():
        results = {b: run(b) for b in backends}  # warm-up, includes JIT compile
        secs = {b: best_of(lambda b=b: run(b), args.repeat) for b in backends}
        line = f"{name:24s} " + " ".join(f"{secs[b]:9.4f}s" for b in backends)
        if "numba" in secs:
            a, c = results["numpy"], results["numba"]
            diff = max(float(np.max(np.abs(np.asarray(u) - np.asarray(v))))
                       for u, v in zip(a if isinstance(a, tuple) else (a,),
                                       c if isinstance(c, tuple) else (c,)))
            line += f"   {secs['numpy'] / secs['numba']:6.1f}x  {diff:.1e}"
        print(line)


if __name__ == "__main__":
    main()
