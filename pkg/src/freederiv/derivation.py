"""Free (Hausdorff) derivatives of admissible linear systems.

The formal derivative of ``(u, A, v)`` with respect to ``x`` in direction
``a`` is the doubled system

    ([u 0], [[A, A_x (x) a], [0, A]], [0; v])

where ``A_x (x) a`` places the coefficient block of ``x`` into the slot of
the letter ``a`` (into the constant slot when ``a`` is 1).
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from . import field
from .als import Als
from .errors import InvalidDirection
from .minimize import minimize


def formal_derivative(f: Als, x: str, a: str | None = None) -> Als:
    """Raw ``2n``-dimensional derivative system (not minimized)."""
    if a == x:
        raise InvalidDirection(f"direction {a!r} must differ from {x!r}")
    letters = list(f.letters)
    for y in (x, a):
        if y is not None and y not in letters:
            letters.append(y)
    f = f.with_letters(letters)
    n = f.dim
    if n == 0:
        return f
    c = field.zeros((len(letters) + 1, 2 * n, 2 * n))
    c[:, :n, :n] = f.coeffs
    c[:, n:, n:] = f.coeffs
    slot = 0 if a is None else 1 + letters.index(a)
    c[slot, :n, n:] = c[slot, :n, n:] + f.block(x)
    return Als(letters, c, np.concatenate([field.zeros(n), f.v]))


def directional(f: Als, x: str, a: str) -> Als:
    return minimize(formal_derivative(f, x, a))


def partial(f: Als, x: str) -> Als:
    return minimize(formal_derivative(f, x, None))


def higher(f: Als, word: Iterable[str]) -> Als:
    for x in word:
        f = partial(f, x)
    return f


def gradient(f: Als, letters: Sequence[str] | None = None) -> list[Als]:
    letters = f.letters if letters is None else letters
    return [partial(f, x) for x in letters]


def jacobian(fs: Sequence[Als], letters: Sequence[str] | None = None) -> list[list[Als]]:
    if letters is None:
        seen: dict[str, None] = {}
        for f in fs:
            for y in f.letters:
                seen.setdefault(y, None)
        letters = list(seen)
    return [[partial(f, x) for x in letters] for f in fs]
