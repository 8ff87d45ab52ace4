from fractions import Fraction

from hypothesis import given, settings

from gen import vector_fields
from jetnormal.cotangent import (CotangentContext, check_hamiltonian, cotangent_lift, dmu_rank,
                                 moment_map, numeric_rank, orbit_dimension, sample_points,
                                 strata_scan, theta_preservation)
from jetnormal.jet import VectorFieldJet, bracket_vf, parse_jet
from jetnormal.lie import Representation, check_representation, sl2_linear_rep

NAMES = ["x", "y", "z", "a", "b", "c"]


def sl2_moment_map():
    return moment_map(sl2_linear_rep(3))


def test_moment_map_golden():
    """mu = (zb + cy, az + xc, -ay + bx) coefficient for coefficient."""
    expected = ["z*b + c*y", "a*z + x*c", "-a*y + b*x"]
    for got, text in zip(sl2_moment_map(), expected):
        assert got.coeffs == parse_jet(text, 6, got.order, NAMES).coeffs


def test_lifts_are_hamiltonian_and_preserve_theta():
    r = sl2_linear_rep(3)
    ctx = CotangentContext(3, 4)
    for xi, mu in zip(r.fields, moment_map(r)):
        lift = cotangent_lift(xi)
        assert check_hamiltonian(lift, mu, ctx) == 0
        assert theta_preservation(lift, ctx) == 0


def test_lifted_representation_keeps_relations():
    r = sl2_linear_rep(4)
    lifted = Representation(r.algebra, [cotangent_lift(f) for f in r.fields])
    assert check_representation(lifted).residual == 0


def test_nonlinear_lift_is_hamiltonian():
    xi = sl2_linear_rep(4).fields[0]
    v = VectorFieldJet([xi[0] + parse_jet("x2^2", 3, 4), xi[1], xi[2] + parse_jet("x1*x3", 3, 4)])
    ctx = CotangentContext(3, 4)
    assert check_hamiltonian(cotangent_lift(v), moment_map([v])[0], ctx) == 0


@settings(max_examples=60, deadline=None)
@given(vector_fields(2, 4, lo=1), vector_fields(2, 4, lo=1))
def test_lift_is_homomorphism(v, w):
    """The lift of a bracket is the bracket of the lifts."""
    lhs = cotangent_lift(bracket_vf(v, w))
    rhs = bracket_vf(cotangent_lift(v), cotangent_lift(w))
    order = min(lhs.order, rhs.order)
    assert lhs.truncate(order) == rhs.truncate(order)


def test_dmu_rank_at_special_points():
    mu = sl2_moment_map()
    zero = (0,) * 6
    assert dmu_rank(mu, zero) == 0
    assert dmu_rank(mu, (0, 0, 0, 1, 0, 0)) == 2
    assert dmu_rank(mu, (1, 0, 0, 0, 0, 0)) == 2
    assert dmu_rank(mu, (1, 2, 3, 1, 1, 1)) == 3


def test_orbit_dimension_on_base():
    fields = sl2_linear_rep(2).fields
    assert orbit_dimension(fields, (0, 0, 0)) == 0
    assert orbit_dimension(fields, (1, 0, 0)) == 2
    # on the light cone x^2 + y^2 = z^2 the orbit is still 2-dimensional
    assert orbit_dimension(fields, (3, 4, 5)) == 2


def test_numeric_rank_tolerance():
    assert numeric_rank([[1, 0], [0, 1e-12]])[0] == 1
    assert numeric_rank([[1, 0], [0, 1e-6]])[0] == 2
    assert numeric_rank([[0, 0]])[0] == 0


def test_sample_points_deterministic_and_rational():
    a = sample_points(3, 20, seed=4)
    assert a == sample_points(3, 20, seed=4)
    assert a != sample_points(3, 20, seed=5)
    assert all(isinstance(v, Fraction) and abs(v) <= 3 for p in a for v in p)


def test_grid_contains_origin_and_omega_layout():
    grid = sample_points(2, 10, kind="grid")
    assert (0, 0) in grid and len(grid) >= 10
    om = sample_points(6, 40, kind="random", region="omega", seed=1)
    assert all(all(v == 0 for v in p[3:]) or all(v == 0 for v in p[:3]) for p in om)


def test_strata_scan_reports_witnesses_and_minors():
    mu = sl2_moment_map()
    pts = sample_points(6, 200, kind="random", region="omega", seed=2)
    scan = strata_scan(mu, pts, names=NAMES)
    assert set(scan.counts) <= {0, 2}
    for r, pt in scan.witnesses.items():
        assert dmu_rank(mu, pt) == r
    # every 3x3 minor of d mu vanishes identically on the zero section
    assert scan.vanishing_minors[2]


def test_strata_scan_fields_mode():
    scan = strata_scan(fields=sl2_linear_rep(2).fields, points=sample_points(3, 50, seed=0))
    assert set(scan.counts) <= {0, 2}
