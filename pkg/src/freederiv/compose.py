"""Free composition: substituting letters by elements, and the free chain rule.

Substitution linearizes by enlargement, one nonzero pencil entry at a time.
An entry ``alpha * y_i`` at position ``(r, c)`` gets its own copy of the
system ``(u_i, A_i, v_i)`` of the substituted element: the copy occupies new
rows/columns ``R``, row ``r`` receives ``u_i`` in columns ``R`` and column
``c`` receives ``-alpha v_i`` in rows ``R``.  The Schur complement of the
copy restores ``alpha f_i`` at ``(r, c)``.
"""

from __future__ import annotations

import warnings
from typing import Mapping

import numpy as np

from . import field
from .als import Als, empty
from .derivation import partial
from .errors import AlphabetMismatch, FullnessUncertain, SingularAtAllProbes
from .evaluation import _residues, pencil_invertible_modp, random_assignment
from ._kernels import MODULUS

FULLNESS_TRIALS = 3
FULLNESS_MAX_SIZE = 6
FULLNESS_SEED = 7


def prime(y: str) -> str:
    return y + "'"


def _inner_letters(sigma: Mapping[str, Als]) -> list[str]:
    seen: dict[str, None] = {}
    for f in sigma.values():
        for x in f.letters:
            seen.setdefault(x, None)
    return list(seen)


def substitute(g: Als, sigma: Mapping[str, Als], check_fullness: bool = True) -> Als:
    """System for ``g`` with every letter ``y`` replaced by ``sigma[y]``."""
    missing = [y for y in g.support() if y not in sigma]
    if missing:
        raise AlphabetMismatch(f"no substitution for letters {missing}")
    inner = _inner_letters(sigma)
    if g.is_empty():
        return empty(inner)
    subs = {y: f.with_letters(inner) for y, f in sigma.items()}
    n = g.dim
    copies = []  # (row, col, alpha, system)
    for li, y in enumerate(g.letters):
        blk = g.coeffs[li + 1]
        if y not in subs or subs[y].is_empty():
            continue
        for r, c in zip(*np.nonzero(np.fromiter((e != 0 for e in blk.flat), bool).reshape(blk.shape))):
            copies.append((int(r), int(c), blk[r, c], subs[y]))
    total = n + sum(s.dim for *_, s in copies)
    coeffs = field.zeros((len(inner) + 1, total, total))
    coeffs[0, :n, :n] = g.coeffs[0]
    off = n
    for r, c, alpha, s in copies:
        k = s.dim
        coeffs[:, off:off + k, off:off + k] = s.coeffs
        coeffs[0, r, off] = coeffs[0, r, off] + field.ONE  # u_i = e_1
        coeffs[0, off:off + k, c] = coeffs[0, off:off + k, c] - alpha * s.v
        off += k
    v = field.zeros(total)
    v[:n] = g.v
    h = Als(inner, coeffs, v)
    if check_fullness:
        check_full(h)
    return h


def check_full(h: Als, trials: int = FULLNESS_TRIALS, max_size: int = FULLNESS_MAX_SIZE,
               seed: int = FULLNESS_SEED) -> bool:
    """Probe invertibility of the pencil of ``h`` at random integer matrices (mod p).

    Invertible mod p at one probe proves the pencil full.  Singular at every
    probe of sizes ``1..dim`` raises; if the size range had to be capped only
    a ``FullnessUncertain`` warning is issued.
    """
    if h.is_empty():
        return True
    rng = np.random.default_rng(seed)
    res = _residues(h.coeffs, MODULUS)
    top = min(h.dim, max_size)
    for m in range(1, top + 1):
        for _ in range(trials):
            if pencil_invertible_modp(h, random_assignment(h.letters, m, rng), MODULUS, _res=res):
                return True
    if top == h.dim:
        raise SingularAtAllProbes(f"pencil singular at all probes of sizes 1..{top}")
    warnings.warn(f"pencil singular at all probes up to size {top} < dim {h.dim}", FullnessUncertain,
                  stacklevel=2)
    return False


def total_derivative(g: Als) -> tuple[Als, dict[str, str]]:
    """``sum_i d_{y_i | y_i'} g`` over the doubled alphabet, and the map ``y -> y'``."""
    primes = {y: prime(y) for y in g.letters}
    clash = set(primes.values()) & set(g.letters)
    if clash:
        raise AlphabetMismatch(f"primed letters {sorted(clash)} already in use")
    letters = list(g.letters) + [primes[y] for y in g.letters]
    g2 = g.with_letters(letters)
    n = g.dim
    if n == 0:
        return g2, primes
    c = field.zeros((len(letters) + 1, 2 * n, 2 * n))
    c[:, :n, :n] = g2.coeffs
    c[:, n:, n:] = g2.coeffs
    for y in g.letters:
        slot = 1 + letters.index(primes[y])
        c[slot, :n, n:] = g.block(y)
    return Als(letters, c, np.concatenate([field.zeros(n), g.v])), primes


def chain_derivative(g: Als, sigma: Mapping[str, Als], x: str, check_fullness: bool = True) -> Als:
    """``d_x (g o f)`` assembled as ``(sum_i d_{y_i|y_i'} g) o (f, d_x f)``."""
    missing = [y for y in g.support() if y not in sigma]
    if missing:
        raise AlphabetMismatch(f"no substitution for letters {missing}")
    gprime, primes = total_derivative(g)
    full_sigma = dict(sigma)
    for y in g.letters:
        if y in sigma:
            full_sigma[primes[y]] = partial(sigma[y], x)
    return substitute(gprime, full_sigma, check_fullness=check_fullness)
