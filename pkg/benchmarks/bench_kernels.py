"""Compare the compiled and pure-Python kernel backends.

Run: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from stecverify import kernels
from stecverify.casimir import CavitySpec, default_cutoffs, enumerate_modes


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--blocks", type=int, default=20_000)
    ap.add_argument("--n-max", type=int, default=150)
    args = ap.parse_args()

    try:
        kernels.get_backend("cython")
        names = ["cython", "python"]
    except ImportError:
        print("compiled extension not built; timing the python backend only")
        names = ["python"]

    rng = np.random.default_rng(0)
    a = rng.normal(size=(args.blocks, 3, 3))
    blocks = a + a.transpose(0, 2, 1)
    spec = enumerate_modes(CavitySpec.cube(), args.n_max)
    cutoffs = default_cutoffs(spec)
    weight = spec.degeneracies.astype(float)

    print(f"{'kernel':<28}{'backend':<10}{'best s':>10}")
    ref = {}
    for name in names:
        t, (w, _) = best_of(lambda: kernels.eigh3(blocks, backend=name), args.repeat)
        print(f"{'jacobi_eigh3 x' + str(args.blocks):<28}{name:<10}{t:>10.4f}")
        ref.setdefault("eig", np.sort(w, axis=1))
        assert np.allclose(np.sort(w, axis=1), ref["eig"], rtol=1e-12, atol=1e-12)
    for name in names:
        t, s = best_of(
            lambda: kernels.regulated_sums(spec.epsilons, weight, cutoffs, backend=name), args.repeat
        )
        label = f"regulated_sums {len(spec)}x{len(cutoffs)}"
        print(f"{label:<28}{name:<10}{t:>10.4f}")
        ref.setdefault("sum", s)
        assert np.allclose(s, ref["sum"], rtol=1e-13)


if __name__ == "__main__":
    main()
