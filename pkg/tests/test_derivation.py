import random

import pytest

from freederiv import field
from freederiv.als import als_add, als_from_poly, als_letter, als_mul, als_scale, series_expand, solution_series
from freederiv.derivation import directional, formal_derivative, gradient, higher, jacobian, partial
from freederiv.errors import InvalidDirection
from freederiv.evaluation import Verdict, als_equal
from freederiv.expr import als_from_text
from freederiv.minimize import minimize, rank
from freederiv.ncpoly import NcPoly, hausdorff_derive

from conftest import random_poly

L = ("x", "y", "z")
px, py, pz, pb = (NcPoly.letter(c) for c in "xyzb")


def poly_als(p, letters=L):
    return als_from_poly(p, letters)


def test_cube_solution_vector():
    x3 = minimize(poly_als(px ** 3, ["x"]))
    assert x3.dim == 4
    d = formal_derivative(x3, "x")
    assert d.dim == 8
    s = solution_series(d, 4)
    expected = [3 * px ** 2, 2 * px, NcPoly.const(1), NcPoly(), px ** 3, px ** 2, px, NcPoly.const(1)]
    assert s == expected


def test_no_dependence():
    assert not series_expand(formal_derivative(poly_als(py ** 3), "x"), 4)


def test_square_direction():
    d = formal_derivative(poly_als(px * px, ["x"]), "x", "b")
    assert series_expand(d, 3) == px * pb + pb * px


def test_direction_must_differ():
    with pytest.raises(InvalidDirection):
        formal_derivative(als_letter("x", L), "x", "x")


def test_partial_intro_polynomial():
    f = als_from_text("x^3 + 4*x^2 + 3*x + 5", ["x"])
    assert series_expand(partial(f, "x"), 3) == 3 * px ** 2 + 8 * px + 3


def test_partial_xyzx_minimal_six():
    f = poly_als(NcPoly.word("xyzx"))
    d = partial(f, "x")
    assert d.dim == 6
    assert series_expand(d, 4) == NcPoly.word("xyz") + NcPoly.word("yzx")
    assert als_equal(d, poly_als(NcPoly.word("xyz") + NcPoly.word("yzx"))).verdict is Verdict.EQUAL


def test_partial_of_letter_is_one():
    d = partial(als_letter("x", ["x"]), "x")
    assert d.dim == 1 and series_expand(d, 2) == NcPoly.const(1)


def test_higher():
    f = poly_als(px * px * py)
    assert higher(f, "") is f
    assert series_expand(higher(f, "xy"), 3) == series_expand(higher(f, "yx"), 3)
    assert series_expand(higher(poly_als(px ** 3, ["x"]), "xxx"), 2) == NcPoly.const(6)


def test_gradient():
    g = gradient(poly_als(px + py, ["x", "y"]))
    assert [series_expand(h, 2) for h in g] == [NcPoly.const(1)] * 2
    g = gradient(poly_als(px * py, ["x", "y"]))
    assert [series_expand(h, 2) for h in g] == [py, px]
    g = gradient(poly_als(NcPoly.const(3), ["x", "y"]))
    assert all(h.is_empty() for h in g)


def test_jacobian():
    J = jacobian([als_letter("x", ["x", "y"]), als_letter("y", ["x", "y"])])
    assert [[series_expand(h, 1) for h in row] for row in J] == [[1, 0], [0, 1]]
    J = jacobian([poly_als(px * py, ["x", "y"])])
    assert [series_expand(h, 2) for h in J[0]] == [py, px]
    J = jacobian([poly_als(px * px, ["x", "y"]), poly_als(NcPoly.const(2), ["x", "y"])])
    assert all(h.is_empty() for h in J[1])


def test_linearity():
    rng = random.Random(31)
    for _ in range(15):
        p, q = random_poly(rng), random_poly(rng)
        f, g = poly_als(p), poly_als(q)
        lhs = partial(als_add(als_scale(2, f), als_scale(-3, g)), "x")
        rhs = als_add(als_scale(2, partial(f, "x")), als_scale(-3, partial(g, "x")))
        assert series_expand(lhs, 6) == series_expand(rhs, 6)


def test_representation_independence():
    p = NcPoly.word("xyx") + 2 * px
    f1 = poly_als(p)
    f2 = minimize(f1)
    assert f1.dim != f2.dim
    assert als_equal(partial(f1, "x"), partial(f2, "x")).verdict is Verdict.EQUAL


def test_rational_element_derivative():
    # d_x x^-1 = -x^-1 * x^-1
    f = als_from_text("inv(x)", ["x"])
    ref = als_from_text("-inv(x)*inv(x)", ["x"])
    assert als_equal(partial(f, "x"), ref, seed=5).verdict is Verdict.EQUAL


def test_dimension_doubles():
    rng = random.Random(9)
    for _ in range(20):
        f = poly_als(random_poly(rng))
        assert formal_derivative(f, "x").dim == 2 * f.dim
        assert formal_derivative(f, "y", "b").dim == 2 * f.dim


def test_against_oracle():
    rng = random.Random(10)
    for _ in range(20):
        p = random_poly(rng)
        assert series_expand(partial(poly_als(p), "y"), 6) == hausdorff_derive(p, "y")
        assert series_expand(directional(poly_als(p), "z", "b"), 6) == hausdorff_derive(p, "z", "b")
