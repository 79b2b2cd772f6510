"""Text syntax for nc rational expressions.

Grammar (left-associative, non-commutative products keep their order)::

    expr   := ['+'|'-'] term (('+'|'-') term)*
    term   := factor (['*'] factor)*
    factor := '-' factor | atom ['^' ('-1' | nat)]
    atom   := number | ident | '(' expr ')' | 'inv(' expr ')'
    number := digits ['.' digits] ['/' digits]

An identifier is a declared letter (longest match) or a single character
followed by digits or primes, so ``xyzx`` reads as ``x*y*z*x``.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from . import field
from .als import Als, als_add, als_const, als_inverse, als_letter, als_mul, als_scale, empty
from .errors import ExprSyntaxError, NotInvertible, UnknownLetter
from .ncpoly import NcPoly


@dataclass(frozen=True)
class Const:
    value: Fraction


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Add:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Mul:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Inv:
    arg: "Expr"


@dataclass(frozen=True)
class Scale:
    factor: Fraction
    arg: "Expr"


Expr = Union[Const, Var, Add, Mul, Neg, Inv, Scale]

_NUMBER = re.compile(r"\d+(?:\.\d+)?(?:/\d+)?")
_IDENT = re.compile(r"[A-Za-z][0-9']*")


class _Parser:
    def __init__(self, text: str, letters: Sequence[str] | None):
        self.text = text
        self.pos = 0
        self.declared = list(letters) if letters is not None else None
        self.seen: list[str] = []

    # -- lexing helpers
    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\r\n·":
            self.pos += 1

    def peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def accept(self, s: str) -> bool:
        self._skip()
        if self.text.startswith(s, self.pos):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str):
        if not self.accept(s):
            got = self.text[self.pos:self.pos + 1] or "end of input"
            raise ExprSyntaxError(f"expected {s!r}, got {got!r}", self.pos)

    def error(self, msg: str):
        raise ExprSyntaxError(msg, self.pos)

    # -- grammar
    def parse(self) -> Expr:
        if not self.peek():
            self.error("empty expression")
        e = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return e

    def expr(self) -> Expr:
        if self.accept("-"):
            e: Expr = Neg(self.term())
        else:
            self.accept("+")
            e = self.term()
        while True:
            if self.accept("+"):
                e = Add(e, self.term())
            elif self.accept("-"):
                e = Add(e, Neg(self.term()))
            else:
                return e

    def _starts_atom(self) -> bool:
        ch = self.peek()
        return bool(ch) and (ch.isalnum() or ch == "(")

    def term(self) -> Expr:
        factors = [self.factor()]
        while True:
            if self.accept("*"):
                factors.append(self.factor())
            elif self._starts_atom():
                factors.append(self.factor())
            else:
                break
        head, rest = factors[0], factors[1:]
        if isinstance(head, Const) and rest:
            body = rest[0]
            for f in rest[1:]:
                body = Mul(body, f)
            return Scale(head.value, body)
        for f in rest:
            head = Mul(head, f)
        return head

    def factor(self) -> Expr:
        if self.accept("-"):
            return Neg(self.factor())
        base = self.atom()
        if self.accept("^"):
            if self.accept("-1"):
                if isinstance(base, Const) and base.value == 0:
                    self.error("inverse of zero")
                return Inv(base)
            self._skip()
            m = re.compile(r"\d+").match(self.text, self.pos)
            if not m:
                self.error("expected exponent")
            self.pos = m.end()
            k = int(m.group())
            if k == 0:
                return Const(Fraction(1))
            out = base
            for _ in range(k - 1):
                out = Mul(out, base)
            return out
        return base

    def atom(self) -> Expr:
        self._skip()
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.text.startswith("inv", self.pos) and self.text[self.pos + 3:].lstrip().startswith("("):
            self.pos += 3
            self.expect("(")
            e = self.expr()
            self.expect(")")
            if isinstance(e, Const) and e.value == 0:
                self.error("inverse of zero")
            return Inv(e)
        m = _NUMBER.match(self.text, self.pos)
        if m:
            try:
                value = Fraction(m.group())
            except ZeroDivisionError:
                self.error("division by zero in literal")
            self.pos = m.end()
            return Const(value)
        name = self._ident()
        if name is None:
            ch = self.peek()
            self.error(f"unexpected {ch!r}" if ch else "unexpected end of input")
        return Var(name)

    def _ident(self) -> str | None:
        if self.declared:
            for name in sorted(self.declared, key=len, reverse=True):
                if self.text.startswith(name, self.pos):
                    self.pos += len(name)
                    return name
        m = _IDENT.match(self.text, self.pos)
        if not m:
            return None
        name = m.group()
        if self.declared is not None:
            raise UnknownLetter(f"letter {name!r} at position {self.pos} not declared")
        self.pos = m.end()
        if name not in self.seen:
            self.seen.append(name)
        return name


def parse(text: str, letters: Sequence[str] | None = None) -> Expr:
    """Parse ``text``; with ``letters`` given, other identifiers raise ``UnknownLetter``."""
    return _Parser(text, letters).parse()


def expr_letters(e: Expr) -> list[str]:
    out: dict[str, None] = {}

    def walk(node):
        if isinstance(node, Var):
            out.setdefault(node.name, None)
        elif isinstance(node, (Add, Mul)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, (Neg, Inv)):
            walk(node.arg)
        elif isinstance(node, Scale):
            walk(node.arg)

    walk(e)
    return list(out)


def resolve_letters(text: str, letters: Sequence[str] | None) -> tuple[Expr, list[str]]:
    """Parse and fix the alphabet; undeclared letters are inferred with a warning."""
    if letters:
        return parse(text, letters), list(letters)
    e = parse(text)
    inferred = expr_letters(e)
    if inferred:
        warnings.warn(f"letters inferred from expression: {','.join(inferred)}", stacklevel=2)
    return e, inferred


# ---------------------------------------------------------------- printing

_PREC = {Add: 1, Neg: 1, Scale: 2, Mul: 2, Inv: 3, Var: 3, Const: 3}


def to_text(e: Expr) -> str:
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Add):
        if isinstance(e.right, Neg):
            return f"{to_text(e.left)} - {_wrap(e.right.arg, 2)}"
        return f"{to_text(e.left)} + {_wrap(e.right, 2)}"
    if isinstance(e, Neg):
        return f"-{_wrap(e.arg, 2)}"
    if isinstance(e, Mul):
        return f"{_wrap(e.left, 2, (Scale, Const))}*{_wrap(e.right, 3)}"
    if isinstance(e, Scale):
        return f"{e.factor}*{_wrap(e.arg, 2, (Scale,))}"
    if isinstance(e, Inv):
        return f"inv({to_text(e.arg)})"
    raise TypeError(e)


def _wrap(e: Expr, need: int, also=()) -> str:
    text = to_text(e)
    if _PREC[type(e)] < need or isinstance(e, (Neg, *also)):
        return f"({text})"
    return text


# ---------------------------------------------------------------- folding


def expr_to_als(e: Expr, letters: Sequence[str], minimize: bool = False) -> Als:
    from .minimize import minimize as _min

    letters = tuple(letters)

    def fold(node) -> Als:
        if isinstance(node, Const):
            return als_const(node.value, letters)
        if isinstance(node, Var):
            if node.name not in letters:
                raise UnknownLetter(f"letter {node.name!r} not in {letters}")
            return als_letter(node.name, letters)
        if isinstance(node, Add):
            return als_add(fold(node.left), fold(node.right))
        if isinstance(node, Mul):
            return als_mul(fold(node.left), fold(node.right))
        if isinstance(node, Neg):
            return als_scale(-1, fold(node.arg))
        if isinstance(node, Scale):
            return als_scale(node.factor, fold(node.arg))
        if isinstance(node, Inv):
            inner = fold(node.arg)
            # exact zero test is available when the argument is a power series
            if inner.is_empty() or (field.is_invertible(inner.A0) and _min(inner).is_empty()):
                raise NotInvertible(f"inverse of zero: {to_text(node.arg)}")
            return als_inverse(inner)
        raise TypeError(node)

    out = fold(e)
    return _min(out) if minimize else out


def expr_to_poly(e: Expr) -> NcPoly:
    """Fold an inverse-free expression into the reference polynomial type."""
    if isinstance(e, Const):
        return NcPoly.const(e.value)
    if isinstance(e, Var):
        return NcPoly.letter(e.name)
    if isinstance(e, Add):
        return expr_to_poly(e.left) + expr_to_poly(e.right)
    if isinstance(e, Mul):
        return expr_to_poly(e.left) * expr_to_poly(e.right)
    if isinstance(e, Neg):
        return -expr_to_poly(e.arg)
    if isinstance(e, Scale):
        return e.factor * expr_to_poly(e.arg)
    if isinstance(e, Inv):
        raise ValueError("inverse is not a polynomial operation")
    raise TypeError(e)


def als_from_text(text: str, letters: Sequence[str] | None = None, minimize: bool = False) -> Als:
    e, letters = resolve_letters(text, letters)
    return expr_to_als(e, letters, minimize=minimize)


def poly_from_text(text: str, letters: Sequence[str] | None = None) -> NcPoly:
    return expr_to_poly(parse(text, letters))


def als_from_matrix(rows: Sequence[Sequence[str]], v: Sequence, letters: Sequence[str]) -> Als:
    """Build an ALS from a displayed system matrix of affine entries ("." is zero)."""
    letters = tuple(letters)
    n = len(rows)
    c = field.zeros((len(letters) + 1, n, n))
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ValueError(f"row {i} has {len(row)} entries, expected {n}")
        for j, cell in enumerate(row):
            cell = str(cell).strip()
            if cell in (".", "", "0"):
                continue
            poly = poly_from_text(cell, letters)
            for w, coef in poly.terms.items():
                if len(w) > 1:
                    raise ValueError(f"entry ({i},{j}) {cell!r} is not affine")
                slot = 0 if not w else 1 + letters.index(w[0])
                c[slot, i, j] = coef
    vv = [field.ZERO if str(x).strip() in (".", "") else field.to_fraction(x) for x in v]
    if n == 0:
        return empty(letters)
    return Als(letters, c, vv)
