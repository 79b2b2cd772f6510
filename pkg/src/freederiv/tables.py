"""Reproduction of the cube-root iteration tables (scalar, commutative, nc)."""

from __future__ import annotations

import numpy as np

from .expr import als_from_text
from .newton import NewtonProblem, commutative_baseline, newton_solve, scalar_newton

Z = np.array([[47, 84, 54], [42, 116, 99], [9, 33, 32]], dtype=float)
CBRT_Z = np.array([[3, 2, 0], [1, 4, 3], [0, 1, 2]], dtype=float)
X0_NC = np.array([[1, 0, 2], [0, 1, 0], [0, 0, 1]], dtype=float)


def cbrt2(iters: int = 6) -> list[tuple[int, float, float]]:
    """Rows ``(k, |x_k - x_{k-1}|, x_k)`` of Newton for ``x^3 - 2`` from ``x_0 = 1``."""
    xs = scalar_newton(lambda x: x ** 3 - 2.0, lambda x: 3.0 * x ** 2, 1.0, iters)
    return [(k, abs(xs[k] - xs[k - 1]), xs[k]) for k in range(1, iters + 1)]


def table1(iters: int = 18, aligned: bool = False) -> list[tuple[int, float, float, float]]:
    """Commutative iteration from ``X_0 = I``.

    Rows ``(k, ||X_k - X_{k-1}||, err, ||X_k Z - Z X_k||)``.  The published
    table prints the error of ``X_{k-1}`` in row ``k``; that layout is the
    default, ``aligned=True`` gives ``||X_k - Z^(1/3)||`` instead.
    """
    tr = commutative_baseline(Z, np.eye(3), iters, reference=CBRT_Z)
    rows = []
    for k in range(1, iters + 1):
        err = tr[k].norm_err if aligned else tr[k - 1].norm_err
        rows.append((k, tr[k - 1].norm_B, err, tr[k].norm_comm))
    return rows


def table2(method: str = "probe", max_iter: int = 50):
    """nc Newton for ``x^3 - z`` from the non-commuting start; returns ``(X_final, trace)``."""
    f = als_from_text("x^3 - z", ["x", "z"])
    problem = NewtonProblem(f, "x", X0_NC, {"z": Z}, reference=CBRT_Z, commutator="z", max_iter=max_iter)
    return newton_solve(problem, method=method)


def format_rows(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(c) if isinstance(c, int) else repr(float(c)) for c in row))
    return "\n".join(lines) + "\n"
