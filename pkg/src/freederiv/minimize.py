"""Dimension reduction of admissible linear systems.

For a system with invertible ``A_0`` the element is a rational power series
and the two-sided (reachability, then observability) reduction of the
state-space form ``(e_1, N_l, c)`` yields its minimal dimension.  When
``A_0`` is singular the pencil is first shifted, ``x_l -> x_l + lambda_l``,
to a scalar point where it is invertible, reduced there and shifted back.
That result is never claimed minimal.
"""

from __future__ import annotations

import random
from collections import deque

import numpy as np

from . import field
from .als import Als, empty, solution_series
from .errors import RankNotCertified

SHIFT_SEED = 20191119
SHIFT_TRIALS = 12


class _Basis:
    """Incrementally grown set of independent exact vectors (kept in echelon form)."""

    def __init__(self, n: int):
        self.n = n
        self.vectors: list[np.ndarray] = []
        self._echelon: list[tuple[int, np.ndarray]] = []

    def add(self, vec: np.ndarray) -> bool:
        w = vec.copy()
        for piv, row in self._echelon:
            if w[piv] != 0:
                w = w - w[piv] * row
        nz = next((i for i in range(self.n) if w[i] != 0), None)
        if nz is None:
            return False
        self._echelon.append((nz, w / w[nz]))
        self.vectors.append(vec)
        return True

    def matrix(self) -> np.ndarray:
        """Basis vectors as columns (n x r)."""
        if not self.vectors:
            return field.zeros((self.n, 0))
        return np.stack(self.vectors, axis=1)


def _closure(start: np.ndarray, ops: list[np.ndarray]) -> np.ndarray:
    """Columns spanning the smallest ops-invariant subspace containing ``start``."""
    basis = _Basis(start.shape[0])
    if not basis.add(start):
        return basis.matrix()
    queue = deque([start])
    while queue:
        vec = queue.popleft()
        for op in ops:
            w = field.dot(op, vec)
            if basis.add(w):
                queue.append(w)
    return basis.matrix()


def _coordinates(basis: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Solve ``basis @ y = vectors`` exactly for vectors inside the column span."""
    _, piv_rows = field.rref(basis.T)
    return field.mat_solve(basis[piv_rows, :], vectors[piv_rows, :])


def _reduce_state_space(ns: list[np.ndarray], c: np.ndarray):
    """Two-sided reduction; returns ``(M_l, c')`` of a minimal state space with ``u = e_1``."""
    # reachable part: span of N_w c
    r = _closure(c, ns)
    if r.shape[1] == 0:
        return None
    ms = [_coordinates(r, field.dot(nl, r)) for nl in ns]
    cr = _coordinates(r, c.reshape(-1, 1)).reshape(-1)
    ur = r[0, :].copy()
    # observable part: span of u M_w (rows), first basis row is u itself
    o = _closure(ur, [m.T for m in ms]).T
    if o.shape[0] == 0:
        return None
    ms2 = [_coordinates(o.T, field.dot(o, m).T).T for m in ms]
    c2 = field.dot(o, cr)
    return ms2, c2


def _shift_point(f: Als):
    if field.is_invertible(f.A0):
        return [field.ZERO] * len(f.letters)
    rng = random.Random(SHIFT_SEED)
    for trial in range(SHIFT_TRIALS):
        bound = 2 + trial
        lam = [field.to_fraction(rng.randint(-bound, bound)) for _ in f.letters]
        a = f.A0 + sum((l * b for l, b in zip(lam, f.coeffs[1:])), field.zeros((f.dim, f.dim)))
        if field.is_invertible(a):
            return lam
    return None


def minimize(f: Als) -> Als:
    """Reduce ``f`` without changing the represented element.

    Minimal whenever ``A_0`` is invertible.  Otherwise best effort: reduction at
    a shifted expansion point, or ``f`` unchanged if the pencil is singular at
    every scalar point tried.
    """
    if f.is_empty():
        return f
    lam = _shift_point(f)
    if lam is None:
        return f
    n = f.dim
    a_shift = f.A0 + sum((l * b for l, b in zip(lam, f.coeffs[1:])), field.zeros((n, n)))
    a_inv = field.inverse(a_shift)
    ns = [-field.dot(a_inv, b) for b in f.coeffs[1:]]
    c = field.dot(a_inv, f.v)
    reduced = _reduce_state_space(ns, c)
    if reduced is None:
        return empty(f.letters)
    ms, c2 = reduced
    k = c2.shape[0]
    if k >= n:
        return f
    coeffs = field.zeros((len(f.letters) + 1, k, k))
    coeffs[0] = field.identity(k)
    for i, (l, m) in enumerate(zip(lam, ms)):
        coeffs[i + 1] = -m
        if l != 0:
            coeffs[0] = coeffs[0] + l * m
    return Als(f.letters, coeffs, c2)


def rank(f: Als) -> int:
    """Dimension of a minimal system; requires reaching an invertible ``A_0``."""
    if f.is_empty():
        return 0
    g = minimize(f)
    if g.is_empty():
        return 0
    if not field.is_invertible(g.A0):
        raise RankNotCertified("no representation with invertible A_0 found; minimality is not certified")
    return minimize(g).dim


def family_coefficients(f: Als, side: str, degree: int) -> np.ndarray:
    """Coefficient matrix of the left (``s = A^-1 v``) or right (``t = u A^-1``) family.

    Row ``i`` holds the series coefficients of the ``i``-th family member over
    all words up to ``degree``.  Both have full row rank for minimal systems.
    """
    if side == "left":
        polys = solution_series(f, degree)
    elif side == "right":
        t = Als(f.letters, np.stack([a.T for a in f.coeffs]), _unit(f.dim))
        polys = solution_series(t, degree)
    else:
        raise ValueError("side must be 'left' or 'right'")
    words = sorted({w for p in polys for w in p.terms})
    out = field.zeros((f.dim, len(words)))
    for i, p in enumerate(polys):
        for j, w in enumerate(words):
            out[i, j] = p.coeff(w)
    return out


def _unit(n):
    e = field.zeros(n)
    e[0] = field.ONE
    return e

