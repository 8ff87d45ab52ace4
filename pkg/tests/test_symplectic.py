import random
from fractions import Fraction

import pytest

from gen import near_identity, rand_invertible_map, rand_jet, rq
from jetnormal.forms import FormJet, exterior_d, pullback
from jetnormal.jet import Jet, PolyMap, VectorFieldJet, parse_jet
from jetnormal.linearize import commutes_with_linear
from jetnormal.symplectic import (DegenerateFormError, IllPosedFlowError, NormalizeFirstError,
                                  NotEquivariantError, check_symplectic, darboux,
                                  equivariant_darboux, formal_flow, moser_field, moser_residual,
                                  standard_form, symplectic_basis)

SL2_2D = [[[1, 0], [0, -1]], [[0, 1], [0, 0]], [[0, 0], [1, 0]]]


def diagonal_sl2(copies=2):
    """sl(2) acting on (u1, u2, v1, v2) as the same 2x2 matrices on (u1, u2) and (v1, v2)."""
    n = 2 * copies
    mats = []
    for M in SL2_2D:
        A = [[Fraction(0)] * n for _ in range(n)]
        for c in range(copies):
            for i in range(2):
                for j in range(2):
                    A[2 * c + i][2 * c + j] = Fraction(M[i][j])
        mats.append(A)
    return mats


def test_flow_of_quadratic_field():
    """dx/dt = x^2 has time-one flow x / (1 - x)."""
    phi = formal_flow(VectorFieldJet([parse_jet("x1^2", 1, 6)]))
    assert [phi[0].coefficient((k,)) for k in range(1, 7)] == [1] * 6


def test_flow_rejects_linear_part():
    with pytest.raises(IllPosedFlowError):
        formal_flow(VectorFieldJet([parse_jet("x1 + x1^2", 1, 4)]))


def test_flow_nilpotent_linear_part():
    X = VectorFieldJet([parse_jet("x2", 2, 4), Jet.zero(2, 4)])
    phi = formal_flow(X, nilpotent_ok=True)
    assert phi[0] == parse_jet("x1 + x2", 2, 4)
    assert phi[1] == parse_jet("x2", 2, 4)


def test_symplectic_basis_standardizes():
    C = [[0, 2, 1, 0], [-2, 0, 0, 1], [-1, 0, 0, 3], [0, -1, -3, 0]]
    S = symplectic_basis(C)
    entries = {(i, j): C[i][j] for i in range(4) for j in range(i + 1, 4) if C[i][j]}
    form = pullback(FormJet.constant(4, entries, 2), PolyMap.linear(S, 3))
    assert form.constant_matrix() == standard_form(4, 1).constant_matrix()


def test_check_symplectic_flags_problems():
    assert check_symplectic(standard_form(4, 3)).ok
    degenerate = FormJet.constant(4, {(0, 1): 1}, 3)
    assert not check_symplectic(degenerate).ok
    not_closed = standard_form(4, 3) + FormJet(4, 2, {(0, 1): parse_jet("x3", 4, 3)}, 3)
    assert not check_symplectic(not_closed).ok
    with pytest.raises(DegenerateFormError):
        darboux(degenerate)


def test_moser_field_solves_its_equation():
    w0 = standard_form(2, 5)
    w1 = FormJet(2, 2, {(0, 1): parse_jet("1 + x1^2 - x1*x2", 2, 5)}, 5)
    data = moser_field(w0, w1)
    assert moser_residual(data) == 0
    with pytest.raises(NormalizeFirstError):
        moser_field(w0, w1.scale(2))


def test_darboux_area_form():
    """(1 + x^2) dx ^ dy is normalized exactly."""
    w = FormJet(2, 2, {(0, 1): parse_jet("1 + x1^2", 2, 5)}, 5)
    m, rep = darboux(w)
    assert rep.pullback_residual == 0
    assert pullback(w, m).agrees(standard_form(2, 5), 5)


def test_darboux_random_with_linear_part():
    rng = random.Random(21)
    for _ in range(2):
        psi = rand_invertible_map(rng, 4, 5)
        w = pullback(standard_form(4, 5), psi).truncate(4)
        m, rep = darboux(w)
        assert rep.pullback_residual == 0


def test_darboux_general_closed_form():
    """A closed form built as d of a random 1-form plus a constant block."""
    rng = random.Random(2)
    alpha = FormJet(4, 1, {(i,): rand_jet(rng, 4, 2, 5, 5) for i in range(4)}, 5)
    w = FormJet.constant(4, {(0, 2): 2, (1, 3): 1, (0, 1): 1}, 4) + exterior_d(alpha)
    m, rep = darboux(w)
    assert rep.pullback_residual == 0


def invariant_form_4(rng, order):
    """Pullback of the standard form by a random sl(2)-equivariant map on R^2 + R^2."""
    u1, u2, v1, v2 = [Jet.variable(4, order + 1, i) for i in range(4)]
    delta = u1 * v2 - u2 * v1

    def rfun(const):
        acc = Jet.constant(4, order + 1, Fraction(const))
        p = Jet.constant(4, order + 1, Fraction(1))
        for _ in range(1, order // 2 + 1):
            p = p.mul_trunc(delta, order + 1)
            acc = acc + p.scale(rq(rng))
        return acc

    f = [rfun(c) for c in (1, 0, 0, 1)]
    phi = PolyMap([f[0] * u1 + f[1] * v1, f[0] * u2 + f[1] * v2,
                   f[2] * u1 + f[3] * v1, f[2] * u2 + f[3] * v2], order + 1)
    return phi, pullback(standard_form(4, order), phi)


def test_equivariant_darboux_4d():
    rng = random.Random(3)
    mats = diagonal_sl2()
    for _ in range(2):
        phi, w = invariant_form_4(rng, 5)
        assert commutes_with_linear(phi, mats) == 0
        m, rep = equivariant_darboux(w, mats)
        assert rep.pullback_residual == 0 and rep.commutation_residual == 0
        assert commutes_with_linear(m, mats) == 0


def test_equivariant_darboux_rejects_non_invariant():
    w = standard_form(4, 4) + exterior_d(FormJet(4, 1, {(0,): parse_jet("x2^3", 4, 5)}, 5))
    with pytest.raises(NotEquivariantError):
        equivariant_darboux(w, diagonal_sl2())


def test_equivariant_darboux_needs_normalized_constant_part():
    with pytest.raises(NormalizeFirstError):
        equivariant_darboux(standard_form(4, 3).scale(2), diagonal_sl2())


def test_near_identity_pullback_is_undone():
    rng = random.Random(8)
    psi = near_identity(rng, 2, 6)
    w = pullback(standard_form(2, 6), psi).truncate(5)
    m, rep = darboux(w)
    assert rep.ok
