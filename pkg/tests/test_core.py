from fractions import Fraction

import pytest
from hypothesis import given, settings

from qalgebroid.core import AlgebraError, Context, ContextMismatch, degree_components
from strategies import MIXED, elements, homogeneous


def test_odd_generators_anticommute_and_square_to_zero():
    a, b = MIXED.gens("a", "b")
    assert a * b == -(b * a)
    assert a * a == MIXED.zero()
    assert (a * b) * (a * b) == MIXED.zero()


def test_even_odd_commute_and_odd_negative_degree_is_odd():
    x, a, c = MIXED.gens("x", "a", "c")
    assert x * a == a * x
    assert a * c == -(c * a)
    assert (c * c).is_zero()
    assert (a * c).degree() == 0


def test_parse_and_print_round_trip():
    e = MIXED.parse("3/2*x^2*a - b*a + 1")
    assert str(e) == "1 + a*b + 3/2*x^2*a"
    assert MIXED.parse(str(e)) == e
    assert str(-MIXED.parse("2*x")) == "-2*x"


@pytest.mark.parametrize("text", ["x +", "2*q", "x^(1/2)", "(x", ""])
def test_parse_errors(text):
    with pytest.raises(AlgebraError):
        MIXED.parse(text)


def test_contexts_do_not_mix():
    other = Context([("x", 0)])
    with pytest.raises(ContextMismatch):
        MIXED.gen("x") * other.gen("x")


def test_truncation_drops_terms_and_flags():
    ctx = Context([("x", 0), ("y", 0)], {("x", "y"): 2})
    x, y = ctx.gens("x", "y")
    p = (x + y) * (x + y)
    assert p == ctx.parse("x^2 + 2*x*y + y^2")
    assert (p * x).is_zero()
    assert ctx.exceeds(((0, 2), (1, 1)))


def test_unique_names_required():
    with pytest.raises(AlgebraError):
        Context([("x", 0), ("x", 1)])


@given(homogeneous(), homogeneous())
def test_supercommutativity(p, q):
    sign = -1 if (p.degree() * q.degree()) % 2 else 1
    assert p * q == (q * p).scale(sign)


@settings(max_examples=60)
@given(elements(), elements(), elements())
def test_ring_axioms(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert (p + q) - q == p


@given(elements())
def test_degree_components_sum_back(p):
    parts = degree_components(p)
    total = MIXED.zero()
    for k, part in parts.items():
        assert part.is_zero() or part.degree() == k
        total = total + part
    assert total == p


def test_scalars_are_exact():
    x = MIXED.gen("x")
    e = x.scale(Fraction(1, 3)) + x.scale(Fraction(2, 3))
    assert e == x
