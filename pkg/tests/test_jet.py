from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import jets, near_identity_maps, vector_fields
from jetnormal.jet import (DimensionError, InvalidMapError, Jet, NonInvertibleError, PolyMap,
                           VectorFieldJet, bracket_vf, jet_arith, jet_compose, monomials,
                           parse_jet, polymap_compose, polymap_inverse)


def test_monomial_counts():
    """Homogeneous monomials in n variables of degree d number C(n+d-1, d)."""
    assert len(monomials(3, 0)) == 1
    assert len(monomials(3, 2)) == 6
    assert len(monomials(4, 3)) == 20


def test_parse_and_format_roundtrip():
    f = parse_jet("x^2 - 1/2*y + 3*(x + y)^2", 2, 3, ["x", "y"])
    assert f.coefficient((2, 0)) == 4
    assert f.coefficient((1, 1)) == 6
    assert f.coefficient((0, 1)) == Fraction(-1, 2)
    assert parse_jet(f.to_str(["x", "y"]), 2, 3, ["x", "y"]) == f


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        parse_jet("x1 + $", 1, 3)


def test_truncation_drops_high_degree():
    f = parse_jet("x1 + x1^4", 1, 3)
    assert f.coefficient((4,)) == 0
    assert f.order == 3


def test_product_precision_uses_valuation():
    """A product is known to min(order_a + val_b, order_b + val_a)."""
    x = Jet.variable(2, 5, 0)
    y = Jet.variable(2, 3, 1)
    assert (x * y).order == 4
    assert (x * x).order == 6
    a = parse_jet("x1^2 + x2", 2, 4)
    b = parse_jet("x1*x2", 2, 4)
    assert (a * b).order == 5


def test_sum_precision_is_minimum():
    assert (Jet.variable(2, 5, 0) + Jet.variable(2, 3, 1)).order == 3


def test_derivative_lowers_order():
    assert parse_jet("x1^3", 1, 5).diff(0).order == 4


def test_jet_arith_strict_orders():
    a = Jet.variable(2, 5, 0)
    with pytest.raises(DimensionError):
        jet_arith(a, Jet.variable(2, 3, 1), "add")
    assert jet_arith(a, a, "mul") == a.mul_trunc(a, 5)
    assert jet_arith(a, 3, "scale") == a.scale(3)


def test_reciprocal_geometric_series():
    r = parse_jet("1 + x1", 1, 4).reciprocal()
    assert [r.coefficient((k,)) for k in range(5)] == [1, -1, 1, -1, 1]


def test_inverse_catalan_oracle():
    """Inverting y = x + x^2 gives alternating Catalan numbers."""
    m = PolyMap([parse_jet("x1 + x1^2", 1, 6)])
    inv = m.inverse()
    assert [inv[0].coefficient((k,)) for k in range(1, 7)] == [1, -1, 2, -5, 14, -42]


def test_inverse_singular_linear_part():
    with pytest.raises(NonInvertibleError):
        polymap_inverse(PolyMap([parse_jet("x1^2", 1, 3)]))


def test_compose_rejects_constant_term():
    x = Jet.variable(2, 3, 0)
    with pytest.raises(InvalidMapError):
        jet_compose(x, [Jet.constant(2, 3, 1) + x, Jet.variable(2, 3, 1)])


def test_compose_known_value():
    f = parse_jet("x1*x2", 2, 4)
    m = PolyMap([parse_jet("x1 + x2^2", 2, 4), parse_jet("x2", 2, 4)])
    assert jet_compose(f, m) == parse_jet("x1*x2 + x2^3", 2, 4)


def test_bracket_known_value():
    """[x d/dy, y d/dx] = x d/dx - y d/dy."""
    v = VectorFieldJet([Jet.zero(2, 3), Jet.variable(2, 3, 0)])
    w = VectorFieldJet([Jet.variable(2, 3, 1), Jet.zero(2, 3)])
    br = bracket_vf(v, w)
    assert br[0] == Jet.variable(2, 3, 0)
    assert br[1] == -Jet.variable(2, 3, 1)


def test_pushforward_of_linear_field_by_linear_map():
    A = [[0, 1], [0, 0]]
    S = [[1, 0], [1, 1]]
    v = VectorFieldJet.from_matrix(A, 3)
    got = v.pushforward(PolyMap.linear(S, 3))
    # S A S^{-1} = [[-1, 1], [-1, 1]]
    assert got.linear_matrix() == [[-1, 1], [-1, 1]]
    assert got.is_linear()


@settings(max_examples=60, deadline=None)
@given(near_identity_maps(2, 4), near_identity_maps(2, 4), near_identity_maps(2, 4))
def test_compose_associative(a, b, c):
    left = polymap_compose(polymap_compose(a, b), c)
    right = polymap_compose(a, polymap_compose(b, c))
    assert left.agrees(right, min(left.order, right.order))


@settings(max_examples=60, deadline=None)
@given(near_identity_maps(3, 4))
def test_inverse_is_two_sided(m):
    inv = m.inverse()
    ident = PolyMap.identity(3, m.order)
    assert m.compose(inv).agrees(ident, m.order)
    assert inv.compose(m).agrees(ident, m.order)


@settings(max_examples=60, deadline=None)
@given(jets(2, 4), jets(2, 4), near_identity_maps(2, 4))
def test_compose_is_ring_homomorphism(f, g, m):
    lhs = jet_compose(f * g, m)
    rhs = jet_compose(f, m) * jet_compose(g, m)
    assert lhs.agrees(rhs, min(lhs.order, rhs.order))


@settings(max_examples=60, deadline=None)
@given(vector_fields(3, 4, lo=1), vector_fields(3, 4, lo=1), vector_fields(3, 4, lo=1))
def test_bracket_jacobi(u, v, w):
    """Jacobi identity for the bracket of vector field jets."""
    total = (bracket_vf(u, bracket_vf(v, w)) + bracket_vf(v, bracket_vf(w, u))
             + bracket_vf(w, bracket_vf(u, v)))
    assert total.is_zero()


@settings(max_examples=60, deadline=None)
@given(vector_fields(2, 4), vector_fields(2, 4))
def test_bracket_antisymmetric(v, w):
    assert (bracket_vf(v, w) + bracket_vf(w, v)).is_zero()


@settings(max_examples=50, deadline=None)
@given(vector_fields(2, 4, lo=1), vector_fields(2, 4, lo=1), near_identity_maps(2, 5))
def test_pushforward_preserves_brackets(v, w, m):
    lhs = bracket_vf(v, w).pushforward(m)
    rhs = bracket_vf(v.pushforward(m), w.pushforward(m))
    assert lhs.truncate(min(lhs.order, rhs.order)) == rhs.truncate(min(lhs.order, rhs.order))


@given(st.integers(1, 4), st.integers(0, 5))
def test_evaluate_matches_sum(n, order):
    f = Jet(n, order, {e: Fraction(1) for d in range(order + 1) for e in monomials(n, d)})
    assert f.evaluate([1] * n) == len([e for d in range(order + 1) for e in monomials(n, d)])
