"""Brute-force non-commutative polynomials.

An :class:`NcPoly` is a finitely supported map from words (tuples of letter
names) to exact rationals.  It is deliberately naive: it serves as the
independent reference against which the linear-system machinery is checked.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import field
from .errors import DimensionMismatch, InvalidDirection, UnassignedLetter

Word = tuple  # tuple[str, ...]; the empty tuple is the unit 1


class NcPoly:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, object] | None = None):
        clean = {}
        for w, c in (terms or {}).items():
            c = field.to_fraction(c)
            if c != 0:
                clean[tuple(w)] = c
        self.terms: dict[Word, Fraction] = clean

    # -- constructors
    @classmethod
    def const(cls, c) -> "NcPoly":
        return cls({(): c})

    @classmethod
    def letter(cls, x: str) -> "NcPoly":
        return cls({(x,): 1})

    @classmethod
    def word(cls, w: Iterable[str], c=1) -> "NcPoly":
        return cls({tuple(w): c})

    # -- ring structure
    def __add__(self, other) -> "NcPoly":
        other = _coerce(other)
        acc = defaultdict(Fraction, self.terms)
        for w, c in other.terms.items():
            acc[w] += c
        return NcPoly(acc)

    __radd__ = __add__

    def __neg__(self) -> "NcPoly":
        return NcPoly({w: -c for w, c in self.terms.items()})

    def __sub__(self, other) -> "NcPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "NcPoly":
        return _coerce(other) - self

    def __mul__(self, other) -> "NcPoly":
        other = _coerce(other)
        acc: dict[Word, Fraction] = defaultdict(Fraction)
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                acc[w1 + w2] += c1 * c2
        return NcPoly(acc)

    def __rmul__(self, other) -> "NcPoly":
        return _coerce(other) * self

    def __pow__(self, k: int) -> "NcPoly":
        out = NcPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        return f"NcPoly({self.to_text()!r})"

    # -- inspection
    def coeff(self, w: Iterable[str]) -> Fraction:
        return self.terms.get(tuple(w), Fraction(0))

    @property
    def degree(self) -> int:
        return max((len(w) for w in self.terms), default=-1)

    def letters(self) -> list[str]:
        seen: dict[str, None] = {}
        for w in self.words():
            for x in w:
                seen.setdefault(x, None)
        return list(seen)

    def words(self, order: Sequence[str] | None = None) -> list[Word]:
        """Support in canonical order: lexicographic by letter index."""
        order = list(order) if order is not None else sorted({x for w in self.terms for x in w})
        index = {x: i for i, x in enumerate(order)}
        extra = len(index)
        return sorted(self.terms, key=lambda w: [index.get(x, extra) for x in w])

    def truncate(self, degree: int) -> "NcPoly":
        return NcPoly({w: c for w, c in self.terms.items() if len(w) <= degree})

    def to_text(self, order: Sequence[str] | None = None) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w in self.words(order):
            c = self.terms[w]
            mag = abs(c)
            body = "*".join(w)
            if not w:
                term = str(mag)
            elif mag == 1:
                term = body
            else:
                term = f"{mag}*{body}"
            parts.append(("-" if c < 0 else "+", term))
        sign, first = parts[0]
        text = ("-" if sign == "-" else "") + first
        for sign, term in parts[1:]:
            text += f" {sign} {term}"
        return text


def _coerce(p) -> NcPoly:
    if isinstance(p, NcPoly):
        return p
    if isinstance(p, (int, Fraction, str, float)):
        return NcPoly.const(p)
    raise TypeError(f"cannot use {type(p).__name__} as NcPoly")


def poly_add(p: NcPoly, q: NcPoly) -> NcPoly:
    return p + q


def poly_mul(p: NcPoly, q: NcPoly) -> NcPoly:
    return p * q


def hausdorff_derive(p: NcPoly, x: str, a: str | None = None) -> NcPoly:
    """Derivation sending ``x`` to ``a`` (to 1 when ``a`` is None) and other letters to 0.

    Each monomial contributes one term per occurrence of ``x``, with that
    occurrence replaced by ``a`` (or deleted).
    """
    if a == x:
        raise InvalidDirection(f"direction {a!r} equals the derivation letter")
    repl = () if a is None else (a,)
    acc: dict[Word, Fraction] = defaultdict(Fraction)
    for w, c in p.terms.items():
        for i, y in enumerate(w):
            if y == x:
                acc[w[:i] + repl + w[i + 1:]] += c
    return NcPoly(acc)


def higher_derive(p: NcPoly, w: Iterable[str]) -> NcPoly:
    for x in w:
        p = hausdorff_derive(p, x)
    return p


def poly_substitute(p: NcPoly, sigma: Mapping[str, NcPoly]) -> NcPoly:
    """Replace every letter ``y`` by ``sigma[y]`` (letters missing from sigma stay)."""
    out = NcPoly()
    for w, c in p.terms.items():
        term = NcPoly.const(c)
        for y in w:
            term = term * sigma.get(y, NcPoly.letter(y))
        out = out + term
    return out


def poly_eval(p: NcPoly, sigma: Mapping[str, np.ndarray], m: int | None = None) -> np.ndarray:
    """Sum of coefficient times matrix products; the empty word maps to the identity."""
    mats = {k: np.asarray(v) for k, v in sigma.items()}
    sizes = {a.shape for a in mats.values()}
    if any(len(s) != 2 or s[0] != s[1] for s in sizes) or len(sizes) > 1:
        raise DimensionMismatch(f"assignment matrices have shapes {sorted(sizes)}")
    if sizes:
        m = next(iter(sizes))[0]
    elif m is None:
        raise DimensionMismatch("matrix size unknown: empty assignment")
    exact = all(field.is_exact(a) for a in mats.values()) if mats else True
    mats = {k: field.like(a, exact) for k, a in mats.items()}
    one = field.identity(m, exact)
    out = field.zeros((m, m), exact)
    for w, c in p.terms.items():
        term = one
        for y in w:
            if y not in mats:
                raise UnassignedLetter(f"no matrix assigned to {y!r}")
            term = term.dot(mats[y])
        out = out + (c if exact else float(c)) * term
    return out
