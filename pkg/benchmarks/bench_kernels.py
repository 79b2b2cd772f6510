"""Time the probing kernels on both backends: ``python3 benchmarks/bench_kernels.py``."""

import timeit

import numpy as np

from freederiv import _kernels


def main(sizes=(60, 120, 240, 480), repeat=5):
    rng = np.random.default_rng(0)
    p = _kernels.MODULUS
    backends = ["numpy"] + (["numba"] if _kernels.use_numba() else [])
    print("kernel,size," + ",".join(f"{b}_ms" for b in backends))
    for N in sizes:
        n, m = N // 6, 6
        coeffs = rng.integers(-3, 4, size=(3, n, n)).astype(float)
        mats = rng.integers(-10, 11, size=(3, m, m)).astype(float)
        a = rng.integers(0, p, size=(N, N))
        b = rng.integers(0, p, size=(N, 1))
        for name, call in [("assemble_pencil", lambda be: _kernels.assemble_pencil(coeffs, mats, backend=be)),
                           ("modp_solve", lambda be: _kernels.modp_solve(a, b, p, backend=be))]:
            times = []
            for be in backends:
                call(be)  # warm-up / jit
                times.append(min(timeit.repeat(lambda: call(be), number=1, repeat=repeat)) * 1e3)
            print(f"{name},{N}," + ",".join(f"{t:.3f}" for t in times))


if __name__ == "__main__":
    main()
