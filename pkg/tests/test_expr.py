import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from freederiv.als import als_from_poly, series_expand
from freederiv.errors import ExprSyntaxError, NotInvertible, UnknownLetter
from freederiv.expr import (Add, Const, Inv, Mul, Neg, Scale, Var, als_from_matrix, als_from_text, expr_to_als,
                            expr_to_poly, parse, resolve_letters, to_text)
from freederiv.ncpoly import NcPoly

from conftest import random_poly

x, y, z = Var("x"), Var("y"), Var("z")


def test_intro_polynomial_tree():
    e = parse("x^3 + 4*x^2 + 3*x + 5")
    assert e == Add(Add(Add(Mul(Mul(x, x), x), Scale(Fraction(4), Mul(x, x))), Scale(Fraction(3), x)),
                    Const(Fraction(5)))


def test_inverse_tree():
    assert parse("inv(inv(x) + y)") == Inv(Add(Inv(x), y))
    assert parse("(x^-1 + y)^-1") == Inv(Add(Inv(x), y))


def test_commutator_tree():
    assert parse("x*y - y*x") == Add(Mul(x, y), Neg(Mul(y, x)))


def test_implicit_product_and_names():
    assert parse("xyzx") == Mul(Mul(Mul(x, y), z), x)
    assert parse("x1 y'", None) == Mul(Var("x1"), Var("y'"))
    assert parse("ab", ["ab", "a", "b"]) == Var("ab")
    assert parse("x·y") == Mul(x, y)


def test_literals_exact():
    assert parse("0.1*x") == Scale(Fraction(1, 10), x)
    assert parse("3/4") == Const(Fraction(3, 4))


@pytest.mark.parametrize("text,pos", [("x +", 3), ("(x", 2), ("x * * y", 4), ("", 0), ("x)", 1), ("1/0", 0)])
def test_syntax_errors(text, pos):
    with pytest.raises(ExprSyntaxError) as info:
        parse(text)
    assert info.value.position == pos


def test_inverse_of_literal_zero():
    with pytest.raises(ExprSyntaxError):
        parse("inv(0)")
    with pytest.raises(NotInvertible):
        als_from_text("inv(x - x)", ["x"])


def test_unknown_letter():
    with pytest.raises(UnknownLetter):
        parse("x*w", ["x", "y"])


def test_inferred_letters_warn():
    with pytest.warns(UserWarning):
        _, letters = resolve_letters("y*x + y", None)
    assert letters == ["y", "x"]


def test_fold_examples():
    assert als_from_text("x^3 - z", ["x", "z"], minimize=True).dim == 4
    assert als_from_text("0", ["x"]).is_empty()
    assert als_from_text("x*y*z*x", ["x", "y", "z"], minimize=True).dim == 5


def test_fold_matches_oracle():
    rng = random.Random(71)
    for _ in range(20):
        p = random_poly(rng)
        text = p.to_text(order="xyz") or "0"
        assert series_expand(als_from_text(text, ["x", "y", "z"]), 8) == p
        assert expr_to_poly(parse(text, ["x", "y", "z"])) == p


def test_matrix_reader():
    g = als_from_matrix([["1", "-x", "z"], [".", "1", "-x"], [".", ".", "1"]], [0, 0, 1], ["x", "z"])
    assert series_expand(g, 3) == NcPoly.word("xx") - NcPoly.letter("z")
    with pytest.raises(ValueError):
        als_from_matrix([["1", "x*x"], [".", "1"]], [0, 1], ["x"])


def _trees():
    leaf = st.one_of(st.sampled_from([x, y, z]),
                     st.fractions(min_value=0, max_value=9, max_denominator=5).map(Const))
    nonconst = st.sampled_from([x, y, z])

    def extend(children):
        scale = st.fractions(min_value=1, max_value=9, max_denominator=5)
        return st.one_of(
            st.builds(Add, children, children),
            st.builds(Mul, children.filter(lambda c: not isinstance(c, Const)), children),
            st.builds(Neg, children),
            st.builds(Inv, children.filter(lambda c: not (isinstance(c, Const) and c.value == 0))),
            st.builds(Scale, scale, children.filter(lambda c: not isinstance(c, Const))),
        )

    return st.recursive(st.one_of(leaf, nonconst), extend, max_leaves=8)


@given(_trees())
def test_print_parse_round_trip(tree):
    assert parse(to_text(tree)) == tree
