from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import forms, jets, near_identity_maps, vector_fields
from jetnormal.forms import (FormJet, NotClosedError, exterior_d, interior, lie_derivative,
                             poincare_primitive, pullback, standard_symplectic, wedge)
from jetnormal.jet import Jet, PolyMap, parse_jet


def one_form(texts, order, names=None):
    n = len(texts)
    return FormJet(n, 1, {(i,): parse_jet(t, n, order, names) for i, t in enumerate(texts)}, order)


def test_d_of_x_dy():
    eta = one_form(["0", "x1"], 3)
    assert exterior_d(eta) == FormJet.constant(2, {(0, 1): 1}, 2)


def test_d_of_function_is_gradient():
    f = parse_jet("x1^2*x2", 2, 4)
    df = exterior_d(FormJet.function(f))
    assert df.coefficient((0,)) == parse_jet("2*x1*x2", 2, 3)
    assert df.coefficient((1,)) == parse_jet("x1^2", 2, 3)


def test_index_sorting_sign():
    one = Jet.constant(3, 2, Fraction(1))
    assert FormJet(3, 2, {(1, 0): one}, 2).coefficient((0, 1)) == -one


def test_primitive_of_area_form():
    """H(dx ^ dy) = (x dy - y dx) / 2."""
    h = poincare_primitive(standard_symplectic(1, 3))
    assert h.coefficient((1,)) == parse_jet("1/2*x1", 2, 4)
    assert h.coefficient((0,)) == parse_jet("-1/2*x2", 2, 4)


def test_primitive_rejects_non_closed():
    with pytest.raises(NotClosedError):
        poincare_primitive(FormJet(3, 2, {(0, 1): parse_jet("x3", 3, 3)}, 3))


def test_pullback_of_area_by_rotation_scaling():
    """Pullback of dx ^ dy by a linear map multiplies by its determinant."""
    m = PolyMap.linear([[2, 1], [1, 3]], 3)
    assert pullback(standard_symplectic(1, 3), m) == FormJet.constant(2, {(0, 1): 5}, 2)


def test_interior_of_coordinate_field():
    from jetnormal.jet import VectorFieldJet
    v = VectorFieldJet.coordinate(2, 3, 0)
    assert interior(v, standard_symplectic(1, 3)) == FormJet(2, 1, {(1,): Jet.constant(2, 3, 1)}, 3)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2).flatmap(lambda k: forms(4, k, 4)))
def test_d_squared_zero(eta):
    assert exterior_d(exterior_d(eta)).is_zero()


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2).flatmap(lambda k: forms(3, k, 4)))
def test_homotopy_inverts_d_on_closed_forms(eta):
    """For closed beta = d eta, d H(beta) = beta."""
    beta = exterior_d(eta)
    if beta.degree == 0:
        return
    assert exterior_d(poincare_primitive(beta)).agrees(beta, beta.order)


@settings(max_examples=60, deadline=None)
@given(forms(3, 2, 4), near_identity_maps(3, 5), near_identity_maps(3, 5))
def test_pullback_functorial(eta, a, b):
    """(a o b)^* = b^* a^*."""
    lhs = pullback(eta, a.compose(b))
    rhs = pullback(pullback(eta, a), b)
    assert lhs.agrees(rhs, min(lhs.order, rhs.order))


@settings(max_examples=50, deadline=None)
@given(forms(3, 1, 4), near_identity_maps(3, 5))
def test_pullback_commutes_with_d(eta, m):
    lhs = exterior_d(pullback(eta, m))
    rhs = pullback(exterior_d(eta), m)
    assert lhs.agrees(rhs, min(lhs.order, rhs.order))


@settings(max_examples=50, deadline=None)
@given(forms(4, 1, 4), forms(4, 2, 4))
def test_d_is_graded_derivation(a, b):
    lhs = exterior_d(wedge(a, b))
    rhs = wedge(exterior_d(a), b) - wedge(a, exterior_d(b))
    assert lhs.agrees(rhs, min(lhs.order, rhs.order))


@settings(max_examples=50, deadline=None)
@given(vector_fields(3, 4), forms(3, 2, 4))
def test_cartan_formula(v, eta):
    """L_v = d i_v + i_v d."""
    lhs = lie_derivative(v, eta)
    rhs = exterior_d(interior(v, eta)) + interior(v, exterior_d(eta))
    assert lhs.agrees(rhs, min(lhs.order, rhs.order))


@settings(max_examples=50, deadline=None)
@given(jets(2, 4), jets(2, 4))
def test_wedge_of_one_forms_antisymmetric(f, g):
    a = FormJet(2, 1, {(0,): f}, 4)
    b = FormJet(2, 1, {(1,): g}, 4)
    assert (wedge(a, b) + wedge(b, a)).is_zero()
