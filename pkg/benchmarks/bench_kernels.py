"""Compare the compiled and pure Python kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints the best wall time of each backend and the speed-up for the radial
quadrature and the strain-operator assembly, after checking that both
backends return the same numbers.
"""

import argparse
import timeit

import numpy as np

from gapstress import _kernels_py

try:
    from gapstress import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def quadrature_case(mod):
    total = 0.0
    for eps in (1e-2, 1e-4, 1e-6, 1e-8):
        for power in (0, 1, 2, 3):
            total += mod.gk_radial(eps, 1.0, power, 0.0, 0.5, 1e-12, 60)[0]
    return total


def assembly_case(mod, cells=200):
    X = np.linspace(-1.0, 1.0, cells + 1)
    Y = np.geomspace(1e-3, 1.0, cells + 1)
    return mod.strain_triplets(X, Y)


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.allclose(a, b, rtol=1e-12, atol=0)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _ckernels is None:
        print("compiled kernels are not built; only the Python backend is available")
    cases = [("gk_radial", quadrature_case), ("strain_triplets", assembly_case)]
    for name, case in cases:
        t_py = min(timeit.repeat(lambda: case(_kernels_py), number=1, repeat=args.repeat))
        line = f"{name:16s} python {t_py * 1e3:9.2f} ms"
        if _ckernels is not None:
            if not same(case(_ckernels), case(_kernels_py)):
                raise SystemExit(f"{name}: backends disagree")
            t_c = min(timeit.repeat(lambda: case(_ckernels), number=1, repeat=args.repeat))
            line += f"   cython {t_c * 1e3:9.2f} ms   speed-up {t_py / t_c:6.1f}x"
        print(line)


if __name__ == "__main__":
    main()
