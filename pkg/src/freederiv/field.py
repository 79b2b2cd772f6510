"""Scalar and dense matrix kernel.

Two backends share one interface: exact rationals (``fractions.Fraction`` held
in numpy ``object`` arrays) and 64-bit floats (``float64`` arrays).  Every
function dispatches on the dtype of its inputs.
"""

from __future__ import annotations

import warnings
from fractions import Fraction
from numbers import Rational

import numpy as np
import scipy.linalg

from .errors import SingularMatrix

#: relative pivot threshold for the float backend
FLOAT_PIVOT_RTOL = 1e-12

ZERO = Fraction(0)
ONE = Fraction(1)


def to_fraction(value) -> Fraction:
    """Exact conversion of ints, floats, Fractions and strings like ``"3/4"`` or ``"0.25"``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, (float, np.floating)):
        return Fraction(float(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot convert {value!r} to an exact rational")


def format_scalar(value) -> str:
    """Rational string ``p/q`` in exact mode, shortest round-trip decimal in float mode."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(to_fraction(value))


def is_exact(a: np.ndarray) -> bool:
    return a.dtype == object


def exact_array(values) -> np.ndarray:
    """Object array of Fractions with the shape of ``values``."""
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    flat_in, flat_out = arr.reshape(-1), out.reshape(-1)
    for i, x in enumerate(flat_in):
        flat_out[i] = to_fraction(x)
    return out


def float_array(values) -> np.ndarray:
    arr = np.asarray(values)
    if arr.dtype == object:
        return np.vectorize(float, otypes=[float])(arr) if arr.size else arr.astype(float)
    return arr.astype(float)


def zeros(shape, exact: bool = True) -> np.ndarray:
    if exact:
        return np.full(shape, ZERO, dtype=object)
    return np.zeros(shape)


def identity(n: int, exact: bool = True) -> np.ndarray:
    out = zeros((n, n), exact)
    for i in range(n):
        out[i, i] = ONE if exact else 1.0
    return out


def like(a: np.ndarray, exact: bool) -> np.ndarray:
    return exact_array(a) if exact else float_array(a)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product; works for both backends (numpy's kron is numeric-only)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.dtype != object and b.dtype != object:
        return np.kron(a, b)
    p, q = a.shape
    r, s = b.shape
    out = a[:, None, :, None] * b[None, :, None, :]
    return out.reshape(p * r, q * s)


def dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product; exact operands skip zero entries (the pencils are sparse)."""
    if not (is_exact(a) or is_exact(b)):
        return a @ b
    vec = b.ndim == 1
    b2 = b.reshape(-1, 1) if vec else b
    p, r = a.shape[0], b2.shape[1]
    out = zeros((p, r))
    a_nz = np.array([x != 0 for x in a.flat], dtype=bool).reshape(a.shape)
    cols = [np.flatnonzero(a_nz[:, k]) for k in range(a.shape[1])]
    for k, j in zip(*np.nonzero(np.array([x != 0 for x in b2.flat], dtype=bool).reshape(b2.shape))):
        bkj = b2[k, j]
        for i in cols[k]:
            out[i, j] = out[i, j] + a[i, k] * bkj
    return out.reshape(-1) if vec else out


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(float_array(a)))


# ---------------------------------------------------------------- exact path


def _nonzero_mask(col: np.ndarray) -> np.ndarray:
    return np.fromiter((x != 0 for x in col), dtype=bool, count=len(col))


def rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over the rationals; returns (R, pivot columns)."""
    r = exact_array(a).copy()
    rows, cols = r.shape
    pivots: list[int] = []
    i = 0
    for j in range(cols):
        if i == rows:
            break
        nz = np.flatnonzero(_nonzero_mask(r[i:, j]))
        if nz.size == 0:
            continue
        k = i + int(nz[0])
        if k != i:
            r[[i, k]] = r[[k, i]]
        r[i] = r[i] / r[i, j]
        others = np.flatnonzero(_nonzero_mask(r[:, j]))
        for t in others:
            if t != i:
                r[t] = r[t] - r[t, j] * r[i]
        pivots.append(j)
        i += 1
    return r, pivots


def rank(a: np.ndarray) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    if is_exact(a):
        return len(rref(a)[1])
    return int(np.linalg.matrix_rank(a))


def _solve_exact(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n = a.shape[0]
    aug = np.concatenate([a, b], axis=1).copy()
    for i in range(n):
        nz = np.flatnonzero(_nonzero_mask(aug[i:, i]))
        if nz.size == 0:
            raise SingularMatrix(f"zero pivot in column {i}")
        k = i + int(nz[0])
        if k != i:
            aug[[i, k]] = aug[[k, i]]
        piv = aug[i, i]
        below = i + 1 + np.flatnonzero(_nonzero_mask(aug[i + 1:, i]))
        if below.size:
            row = aug[i, i:]
            for t in below:
                aug[t, i:] = aug[t, i:] - (aug[t, i] / piv) * row
    x = aug[:, n:].copy()
    for i in range(n - 1, -1, -1):
        acc = x[i]
        nz = i + 1 + np.flatnonzero(_nonzero_mask(aug[i, i + 1:n]))
        for t in nz:
            acc = acc - aug[i, t] * x[t]
        x[i] = acc / aug[i, i]
    return x


def _solve_float(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    with warnings.catch_warnings():
        # singularity is reported by the pivot check below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    colmax = np.abs(a).max(axis=0)
    diag = np.abs(np.diag(lu))
    if np.any(diag <= FLOAT_PIVOT_RTOL * np.maximum(colmax, np.finfo(float).tiny)):
        raise SingularMatrix("pivot below relative tolerance")
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def mat_solve(a, b) -> np.ndarray:
    """Solve ``A X = B`` for square ``A``; ``B`` may be a vector or a matrix.

    Exact inputs (object arrays) give an exact answer, float inputs use LU with
    partial pivoting.  Raises ``SingularMatrix``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("mat_solve needs a square matrix")
    vec = b.ndim == 1
    b2 = b.reshape(-1, 1) if vec else b
    if a.shape[0] == 0:
        x = b2.copy()
    elif is_exact(a) or is_exact(b2):
        x = _solve_exact(exact_array(a), exact_array(b2))
    else:
        x = _solve_float(a.astype(float), b2.astype(float))
    return x.reshape(-1) if vec else x


def inverse(a) -> np.ndarray:
    a = np.asarray(a)
    return mat_solve(a, identity(a.shape[0], exact=is_exact(a)))


def is_invertible(a) -> bool:
    try:
        mat_solve(a, zeros((np.asarray(a).shape[0], 0), exact=is_exact(np.asarray(a))))
    except SingularMatrix:
        return False
    return True


def lstsq_min_norm(a, b) -> np.ndarray:
    """Minimum-norm least squares solution of ``A x = b``.

    The float path uses LAPACK (SVD).  The exact path goes through a rank
    factorization ``A = C F`` and the pseudo-inverse ``F^T (F F^T)^-1 (C^T C)^-1 C^T``.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    vec = b.ndim == 1
    b2 = b.reshape(-1, 1) if vec else b
    if is_exact(a) or is_exact(b2):
        x = _lstsq_exact(exact_array(a), exact_array(b2))
    else:
        x = np.linalg.lstsq(a.astype(float), b2.astype(float), rcond=None)[0]
    return x.reshape(-1) if vec else x


def _lstsq_exact(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    q = a.shape[1]
    r_mat, piv = rref(a)
    r = len(piv)
    if r == 0:
        return zeros((q, b.shape[1]))
    f = r_mat[:r]
    c = a[:, piv]
    ctc_inv_ct = mat_solve(dot(c.T, c), c.T)
    y = dot(ctc_inv_ct, b)
    return dot(f.T, mat_solve(dot(f, f.T), y))
