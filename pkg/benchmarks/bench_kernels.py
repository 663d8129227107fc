"""Time the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat R]
"""
import argparse
import timeit

import numpy as np

from cgq import _kernels_py

try:
    from cgq import _kernels as _kernels_c
except ImportError:
    _kernels_c = None


def cases(rng):
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = (g + g.conj().T) / 2
    v8 = rng.standard_normal(8)
    angles = rng.uniform(0, 2 * np.pi, (4096, 2))
    psi = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    gauss = rng.standard_normal((4096, 2, 2, 2))
    return {
        "jacobi_eigh 4x4": lambda k: k.jacobi_eigh(h, 1e-14, 100),
        "orbit_block_sum 4096": lambda k: k.orbit_block_sum(v8, angles),
        "haar_block_sum 4096": lambda k: k.haar_block_sum(psi, gauss),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    backends = {"python": _kernels_py}
    if _kernels_c is not None:
        backends["cython"] = _kernels_c
    print(f"{'kernel':24s}" + "".join(f"{name:>14s}" for name in backends) + ("     speedup" if len(backends) > 1 else ""))
    for label, fn in cases(np.random.default_rng(0)).items():
        times = {}
        for name, mod in backends.items():
            timer = timeit.Timer(lambda: fn(mod))
            number, _ = timer.autorange()
            times[name] = min(timer.repeat(args.repeat, number)) / number
        row = f"{label:24s}" + "".join(f"{times[n] * 1e6:12.1f}us" for n in backends)
        if len(times) > 1:
            row += f"{times['python'] / times['cython']:11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
