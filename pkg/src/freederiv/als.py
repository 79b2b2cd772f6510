"""Admissible linear systems.

An :class:`Als` ``(u, A, v)`` with ``u = e_1`` represents the first component
of the solution ``s`` of ``A s = v`` where ``A = A_0 + sum_l A_l x_l`` is a
linear pencil with exact rational coefficient matrices.  The zero element is
the empty system of dimension 0.
"""

from __future__ import annotations

import json
from collections import deque
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import field
from .errors import AlphabetMismatch, NotAdmissible, NotInvertible, SeriesUndefined, SingularMatrix
from .ncpoly import NcPoly


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class Als:
    """Immutable admissible linear system over an ordered alphabet.

    ``coeffs[0]`` is the constant block ``A_0``; ``coeffs[l]`` belongs to
    ``letters[l - 1]``.
    """

    __slots__ = ("letters", "coeffs", "v")

    def __init__(self, letters: Sequence[str], coeffs, v):
        letters = tuple(letters)
        if len(set(letters)) != len(letters):
            raise AlphabetMismatch(f"repeated letters in {letters}")
        coeffs = field.exact_array(coeffs)
        v = field.exact_array(v).reshape(-1)
        n = v.shape[0]
        if coeffs.shape != (len(letters) + 1, n, n):
            raise ValueError(f"pencil shape {coeffs.shape} does not fit {len(letters)} letters and dim {n}")
        self.letters = letters
        self.coeffs = _freeze(coeffs)
        self.v = _freeze(v)

    # -- basic properties
    @property
    def dim(self) -> int:
        return self.v.shape[0]

    @property
    def A0(self) -> np.ndarray:
        return self.coeffs[0]

    def block(self, letter: str | None) -> np.ndarray:
        """Coefficient matrix of ``letter`` (of the constant part for None)."""
        if letter is None:
            return self.coeffs[0]
        if letter not in self.letters:
            return field.zeros((self.dim, self.dim))
        return self.coeffs[1 + self.letters.index(letter)]

    def is_empty(self) -> bool:
        return self.dim == 0

    def support(self) -> list[str]:
        """Letters with a nonzero coefficient block."""
        return [x for i, x in enumerate(self.letters) if any(c != 0 for c in self.coeffs[i + 1].flat)]

    def with_letters(self, letters: Sequence[str]) -> "Als":
        """Same system over a reordered or larger alphabet."""
        letters = tuple(letters)
        missing = [x for x in self.support() if x not in letters]
        if missing:
            raise AlphabetMismatch(f"letters {missing} are used but not in {letters}")
        if letters == self.letters:
            return self
        n = self.dim
        c = field.zeros((len(letters) + 1, n, n))
        c[0] = self.coeffs[0]
        for i, x in enumerate(letters):
            if x in self.letters:
                c[i + 1] = self.coeffs[1 + self.letters.index(x)]
        return Als(letters, c, self.v)

    # -- arithmetic sugar
    def __add__(self, other):
        return als_add(self, _coerce(other, self.letters))

    def __radd__(self, other):
        return als_add(_coerce(other, self.letters), self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return als_scale(other, self)
        return als_mul(self, _coerce(other, self.letters))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return als_scale(other, self)
        return als_mul(_coerce(other, self.letters), self)

    def __neg__(self):
        return als_scale(-1, self)

    def __sub__(self, other):
        return als_add(self, als_scale(-1, _coerce(other, self.letters)))

    def __rsub__(self, other):
        return als_add(_coerce(other, self.letters), als_scale(-1, self))

    def inverse(self) -> "Als":
        return als_inverse(self)

    def __repr__(self) -> str:
        return f"Als(dim={self.dim}, letters={list(self.letters)})"

    def pretty(self) -> str:
        """Pencil as a matrix of affine forms, followed by ``v``."""
        rows = []
        for i in range(self.dim):
            cells = []
            for j in range(self.dim):
                cells.append(_affine_text(self.coeffs[:, i, j], self.letters))
            rows.append(cells)
        width = max((len(c) for r in rows for c in r), default=1)
        lines = ["[" + " ".join(c.rjust(width) for c in r) + "]  " + str(self.v[i]) for i, r in enumerate(rows)]
        return "\n".join(lines)

    # -- serialization
    def to_json(self) -> dict:
        def mat(a):
            return [[str(x) for x in row] for row in a]

        return {
            "dim": self.dim,
            "letters": list(self.letters),
            "A0": mat(self.coeffs[0]),
            "A": {x: mat(self.coeffs[i + 1]) for i, x in enumerate(self.letters)},
            "v": [str(x) for x in self.v],
        }

    def dumps(self, **kw) -> str:
        return json.dumps(self.to_json(), **kw)

    @classmethod
    def from_json(cls, data) -> "Als":
        if isinstance(data, str):
            data = json.loads(data)
        letters = list(data["letters"])
        n = int(data["dim"])
        c = field.zeros((len(letters) + 1, n, n))
        if n:
            c[0] = field.exact_array(data["A0"])
            for i, x in enumerate(letters):
                if x in data["A"]:
                    c[i + 1] = field.exact_array(data["A"][x])
        return cls(letters, c, field.exact_array(data["v"]).reshape(n))


def _affine_text(entries, letters) -> str:
    parts = []
    for k, c in enumerate(entries):
        if c == 0:
            continue
        name = "" if k == 0 else letters[k - 1]
        if name and abs(c) == 1:
            term = name
        elif name:
            term = f"{abs(c)}{name}"
        else:
            term = str(abs(c))
        parts.append(("-" if c < 0 else "+", term))
    if not parts:
        return "."
    text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for s, t in parts[1:]:
        text += s + t
    return text


def _coerce(x, letters) -> Als:
    if isinstance(x, Als):
        return x
    return als_const(x, letters)


def empty(letters: Sequence[str] = ()) -> Als:
    return Als(letters, field.zeros((len(letters) + 1, 0, 0)), field.zeros(0))


def unify(*systems: Als) -> list[Als]:
    """Bring systems onto the union alphabet (order of first appearance)."""
    letters: dict[str, None] = {}
    for s in systems:
        for x in s.letters:
            letters.setdefault(x, None)
    return [s.with_letters(tuple(letters)) for s in systems]


# ---------------------------------------------------------------- atoms


def als_const(alpha, letters: Sequence[str] = ()) -> Als:
    alpha = field.to_fraction(alpha)
    if alpha == 0:
        return empty(letters)
    c = field.zeros((len(letters) + 1, 1, 1))
    c[0, 0, 0] = field.ONE
    return Als(letters, c, [alpha])


def als_letter(x: str, letters: Sequence[str] | None = None) -> Als:
    letters = tuple(letters) if letters is not None else (x,)
    if x not in letters:
        raise AlphabetMismatch(f"{x!r} not in {letters}")
    c = field.zeros((len(letters) + 1, 2, 2))
    c[0] = field.identity(2)
    c[1 + letters.index(x)][0, 1] = Fraction(-1)
    return Als(letters, c, [0, 1])


# ---------------------------------------------------------------- rational operations


def als_add(f: Als, g: Als) -> Als:
    """``([u_f 0], [[A_f, -A_f u_f^T u_g], [0, A_g]], [v_f; v_g])``"""
    if f.is_empty() or g.is_empty():
        f, g = unify(f, g)
        return g if f.is_empty() else f
    f, g = unify(f, g)
    nf, ng = f.dim, g.dim
    c = field.zeros((len(f.letters) + 1, nf + ng, nf + ng))
    c[:, :nf, :nf] = f.coeffs
    c[:, nf:, nf:] = g.coeffs
    # -A_f e_1 e_1^T : first column of every block of A_f, into column nf
    c[:, :nf, nf] = -f.coeffs[:, :, 0]
    return Als(f.letters, c, np.concatenate([f.v, g.v]))


def als_mul(f: Als, g: Als) -> Als:
    """``([u_f 0], [[A_f, -v_f u_g], [0, A_g]], [0; v_g])``"""
    f, g = unify(f, g)
    if f.is_empty() or g.is_empty():
        return empty(f.letters)
    nf, ng = f.dim, g.dim
    c = field.zeros((len(f.letters) + 1, nf + ng, nf + ng))
    c[:, :nf, :nf] = f.coeffs
    c[:, nf:, nf:] = g.coeffs
    c[0, :nf, nf] = -f.v
    return Als(f.letters, c, np.concatenate([field.zeros(nf), g.v]))


def als_scale(alpha, f: Als) -> Als:
    alpha = field.to_fraction(alpha)
    if alpha == 0 or f.is_empty():
        return empty(f.letters)
    if alpha == 1:
        return f
    return Als(f.letters, f.coeffs, f.v * alpha)


def als_inverse(f: Als) -> Als:
    """Dimension ``n+1`` system ``[[-v, A], [0, e_1]] (t0, t) = e_{n+1}``; ``t0 = f^-1``."""
    if f.is_empty():
        raise NotInvertible("the zero element has no inverse")
    n = f.dim
    c = field.zeros((len(f.letters) + 1, n + 1, n + 1))
    c[:, :n, 1:] = f.coeffs
    c[0, :n, 0] = -f.v
    c[0, n, 1] = field.ONE
    v = field.zeros(n + 1)
    v[n] = field.ONE
    return Als(f.letters, c, v)


# ---------------------------------------------------------------- transformations


def apply_transform(f: Als, p, q) -> Als:
    """``(u Q, P A Q, P v)`` for an admissible pair (first row of ``Q`` is ``e_1``)."""
    p = field.exact_array(p)
    q = field.exact_array(q)
    n = f.dim
    if p.shape != (n, n) or q.shape != (n, n):
        raise NotAdmissible(f"transform shapes {p.shape}, {q.shape} do not match dim {n}")
    if n and (q[0, 0] != 1 or any(x != 0 for x in q[0, 1:])):
        raise NotAdmissible("first row of Q must be e_1")
    if not (field.is_invertible(p) and field.is_invertible(q)):
        raise NotAdmissible("P and Q must be invertible")
    c = np.stack([field.dot(field.dot(p, a), q) for a in f.coeffs]) if n else f.coeffs
    return Als(f.letters, c, field.dot(p, f.v))


def from_representation(u, letters: Sequence[str], coeffs, v) -> Als:
    """Normalize a general linear representation ``(u, A, v)`` to an ALS.

    Uses ``Q`` with ``u Q = e_1``: the inverse of ``Q`` has ``u`` as first row,
    completed by unit rows.
    """
    u = field.exact_array(u).reshape(-1)
    coeffs = field.exact_array(coeffs)
    n = u.shape[0]
    if n == 0 or all(x == 0 for x in u):
        return empty(letters)
    j = next(i for i, x in enumerate(u) if x != 0)
    qinv = field.identity(n)
    qinv[[0, j]] = qinv[[j, 0]]
    qinv[0] = u
    q = field.inverse(qinv)
    c = np.stack([field.dot(a, q) for a in coeffs])
    return Als(letters, c, v)


# ---------------------------------------------------------------- series


def state_space(f: Als):
    """``(N_l, c)`` with ``N_l = -A_0^-1 A_l`` and ``c = A_0^-1 v``."""
    try:
        a0inv = field.inverse(f.A0)
    except SingularMatrix as exc:
        raise SeriesUndefined("A_0 is singular: the element is not a power series at 0") from exc
    ns = [-field.dot(a0inv, a) for a in f.coeffs[1:]]
    return ns, field.dot(a0inv, f.v)


def solution_series(f: Als, degree: int, rows: Iterable[int] | None = None) -> list[NcPoly]:
    """Truncated series of selected components of ``s = A^-1 v`` (all by default).

    The coefficient of ``x_{i1} ... x_{ik}`` in ``s`` is ``N_{i1} ... N_{ik} c``.
    """
    rows = list(range(f.dim)) if rows is None else list(rows)
    if f.is_empty():
        return [NcPoly() for _ in rows]
    ns, c = state_space(f)
    n = f.dim
    # column-sparse N_l: cols[l][k] = [(i, N_l[i, k]), ...]
    cols = [[[(i, a[i, k]) for i in range(n) if a[i, k] != 0] for k in range(n)] for a in ns]
    terms = [dict() for _ in rows]
    frontier = deque([((), {k: x for k, x in enumerate(c) if x != 0})])
    while frontier:
        w, vec = frontier.popleft()
        for k, r in enumerate(rows):
            if r in vec:
                terms[k][w] = vec[r]
        if len(w) == degree:
            continue
        for li, x in enumerate(f.letters):
            nxt: dict = {}
            for k, ck in vec.items():
                for i, a in cols[li][k]:
                    nxt[i] = nxt.get(i, 0) + a * ck
            nxt = {i: t for i, t in nxt.items() if t != 0}
            if nxt:
                frontier.append(((x,) + w, nxt))
    return [NcPoly(t) for t in terms]


def series_expand(f: Als, degree: int) -> NcPoly:
    return solution_series(f, degree, rows=[0])[0]


def als_from_poly(p: NcPoly, letters: Sequence[str] | None = None) -> Als:
    """Sum of scaled word products; not minimized."""
    letters = tuple(letters) if letters is not None else tuple(p.letters())
    out = empty(letters)
    for w, c in p.terms.items():
        term = als_const(c, letters)
        for y in w:
            term = als_mul(term, als_letter(y, letters))
        out = als_add(out, term)
    return out
