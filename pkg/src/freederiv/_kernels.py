"""Hot numeric kernels.

Each kernel has a numba ``@njit`` version and a pure-numpy fallback.  The
numba path is used when numba imports and ``FREEDERIV_NUMBA`` is not ``0``;
it is compiled lazily on first use so importing the package stays cheap.

* ``assemble_pencil`` - ``sum_l kron(C_l, S_l)`` for float coefficient stacks
* ``modp_solve`` - Gauss-Jordan solve over GF(p), p < 2**31
"""

from __future__ import annotations

import os

import numpy as np

MODULUS = 2_147_483_647  # 2**31 - 1; products of residues fit in int64


def numba_requested() -> bool:
    return os.environ.get("FREEDERIV_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


_jit_cache: dict[str, object] = {}
_numba_ok: bool | None = None


def _numba_available() -> bool:
    global _numba_ok
    if _numba_ok is None:
        try:
            import numba  # noqa: F401
        except ImportError:
            _numba_ok = False
        else:
            _numba_ok = True
    return _numba_ok


def use_numba() -> bool:
    return numba_requested() and _numba_available()


# ------------------------------------------------------------ numpy fallback


def assemble_pencil_numpy(coeffs: np.ndarray, mats: np.ndarray) -> np.ndarray:
    k, n, _ = coeffs.shape
    m = mats.shape[1]
    t = np.tensordot(coeffs, mats, axes=([0], [0]))  # (n, n, m, m)
    return t.transpose(0, 2, 1, 3).reshape(n * m, n * m)


def modp_solve_numpy(a: np.ndarray, b: np.ndarray, p: int):
    """Returns ``(ok, x)``; ``ok`` is False when ``a`` is singular mod p."""
    n = a.shape[0]
    aug = np.concatenate([a, b], axis=1).astype(np.int64) % p
    for i in range(n):
        nz = np.flatnonzero(aug[i:, i])
        if nz.size == 0:
            return False, np.zeros_like(b)
        k = i + int(nz[0])
        if k != i:
            aug[[i, k]] = aug[[k, i]]
        inv = pow(int(aug[i, i]), p - 2, p)
        aug[i] = (aug[i] * inv) % p
        col = aug[:, i].copy()
        col[i] = 0
        rows = np.flatnonzero(col)
        if rows.size:
            aug[rows] = (aug[rows] - (col[rows, None] * aug[i][None, :]) % p) % p
    return True, aug[:, n:]


# ------------------------------------------------------------- numba kernels


def _build_numba():
    from numba import njit

    @njit(cache=True)
    def assemble(coeffs, mats):
        k, n, _ = coeffs.shape
        m = mats.shape[1]
        out = np.zeros((n * m, n * m))
        for l in range(k):
            for i in range(n):
                for j in range(n):
                    c = coeffs[l, i, j]
                    if c == 0.0:
                        continue
                    for r in range(m):
                        for s in range(m):
                            out[i * m + r, j * m + s] += c * mats[l, r, s]
        return out

    @njit(cache=True)
    def powmod(base, exp, mod):
        result = 1
        base = base % mod
        while exp > 0:
            if exp & 1:
                result = (result * base) % mod
            base = (base * base) % mod
            exp >>= 1
        return result

    @njit(cache=True)
    def modp_solve(a, b, p):
        n = a.shape[0]
        kb = b.shape[1]
        w = n + kb
        aug = np.empty((n, w), dtype=np.int64)
        for i in range(n):
            for j in range(n):
                aug[i, j] = a[i, j] % p
            for j in range(kb):
                aug[i, n + j] = b[i, j] % p
        for i in range(n):
            k = -1
            for r in range(i, n):
                if aug[r, i] != 0:
                    k = r
                    break
            if k < 0:
                return False, np.zeros((n, kb), dtype=np.int64)
            if k != i:
                for j in range(w):
                    tmp = aug[i, j]
                    aug[i, j] = aug[k, j]
                    aug[k, j] = tmp
            inv = powmod(aug[i, i], p - 2, p)
            for j in range(w):
                aug[i, j] = (aug[i, j] * inv) % p
            for r in range(n):
                if r == i:
                    continue
                f = aug[r, i]
                if f == 0:
                    continue
                for j in range(w):
                    aug[r, j] = (aug[r, j] - (f * aug[i, j]) % p) % p
        return True, aug[:, n:].copy()

    return assemble, modp_solve


def _numba_kernels():
    if "assemble" not in _jit_cache:
        assemble, solve = _build_numba()
        _jit_cache["assemble"] = assemble
        _jit_cache["modp_solve"] = solve
    return _jit_cache["assemble"], _jit_cache["modp_solve"]


# ------------------------------------------------------------------ dispatch


def assemble_pencil(coeffs: np.ndarray, mats: np.ndarray, backend: str | None = None) -> np.ndarray:
    coeffs = np.ascontiguousarray(coeffs, dtype=np.float64)
    mats = np.ascontiguousarray(mats, dtype=np.float64)
    if _pick(backend) == "numba":
        return _numba_kernels()[0](coeffs, mats)
    return assemble_pencil_numpy(coeffs, mats)


def modp_solve(a: np.ndarray, b: np.ndarray, p: int = MODULUS, backend: str | None = None):
    a = np.ascontiguousarray(a, dtype=np.int64)
    b = np.ascontiguousarray(b, dtype=np.int64)
    if _pick(backend) == "numba":
        ok, x = _numba_kernels()[1](a, b, p)
        return bool(ok), x
    return modp_solve_numpy(a, b, p)


def _pick(backend: str | None) -> str:
    if backend is None:
        return "numba" if use_numba() else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend
