"""Acceptance criteria, one test each.  Every test prints a PASS/FAIL line (use ``-s``)."""
import random
import time
from fractions import Fraction

import numpy as np

from gen import (near_identity, rand_b_map, rand_invertible_map, rand_jet, rq, split_bivector)
from jetnormal.bpoisson import (BForm, BivectorJet, b_d, b_darboux, b_primitive, b_pullback,
                                bivector_pushforward, check_poisson, standard_b_form,
                                weinstein_split)
from jetnormal.cotangent import (CotangentContext, check_hamiltonian, cotangent_lift, dmu_rank,
                                 moment_map, sample_points, strata_scan)
from jetnormal.forms import FormJet, exterior_d, pullback, poincare_primitive
from jetnormal.jet import Jet, PolyMap, VectorFieldJet, bracket_vf, parse_jet
from jetnormal.lie import check_representation, linear_part, pushforward_rep, sl2_linear_rep
from jetnormal.linearize import commutes_with_linear, linearize_rep
from jetnormal.numeric import (bracket_residual_numeric, cairns_ghys_fields, cone_samples,
                               linear_sl2_fields, orbit_dims_many)
from jetnormal.symplectic import equivariant_darboux, standard_form


def verdict(number, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
    assert ok, detail


def test_criterion_1_sl2_fixture():
    t0 = time.perf_counter()
    r = sl2_linear_rep(4)
    rep = check_representation(r)
    c = r.algebra.c
    table_ok = (c[0][1] == [0, 0, -1] and c[2][0] == [0, 1, 0] and c[2][1] == [-1, 0, 0])
    elapsed = time.perf_counter() - t0
    verdict(1, rep.residual == 0 and table_ok and elapsed < 1,
            f"residual {rep.residual}, table {'ok' if table_ok else 'wrong'}, {elapsed:.3f} s")


def test_criterion_2_linearization_round_trip():
    rng = random.Random(2024)
    lin0 = linear_part(sl2_linear_rep(3))
    worst, trials = 0, 20
    t0 = time.perf_counter()
    for i in range(trials):
        order = 3 + i % 4
        psi = near_identity(rng, 3, order, deg=order)
        m, lin, _ = linearize_rep(pushforward_rep(sl2_linear_rep(order), psi), order)
        # independent re-check: push the conjugated action through m from scratch
        again = pushforward_rep(pushforward_rep(sl2_linear_rep(order), psi), m)
        for f, A in zip(again.fields, lin0):
            worst = max(worst, (f - VectorFieldJet.from_matrix(A, f.order)).max_abs())
        assert m.identity_linear_part and lin.is_linear()
    elapsed = time.perf_counter() - t0
    verdict(2, worst == 0 and elapsed < 10,
            f"{trials} conjugations (orders 3-6), residual {worst}, {elapsed:.2f} s")


def sl2_diagonal(copies):
    mats = []
    for M in ([[1, 0], [0, -1]], [[0, 1], [0, 0]], [[0, 0], [1, 0]]):
        n = 2 * copies
        A = [[Fraction(0)] * n for _ in range(n)]
        for k in range(copies):
            for i in range(2):
                for j in range(2):
                    A[2 * k + i][2 * k + j] = Fraction(M[i][j])
        mats.append(A)
    return mats


def invariant_case_4(rng, order):
    """Equivariant map of R^2 + R^2 built from the invariant u1 v2 - u2 v1."""
    u1, u2, v1, v2 = [Jet.variable(4, order + 1, i) for i in range(4)]
    delta = u1 * v2 - u2 * v1

    def rfun(const):
        acc = Jet.constant(4, order + 1, Fraction(const))
        p = Jet.constant(4, order + 1, Fraction(1))
        for _ in range(order // 2):
            p = p.mul_trunc(delta, order + 1)
            acc = acc + p.scale(rq(rng))
        return acc

    f = [rfun(c) for c in (1, 0, 0, 1)]
    phi = PolyMap([f[0] * u1 + f[1] * v1, f[0] * u2 + f[1] * v2,
                   f[2] * u1 + f[3] * v1, f[2] * u2 + f[3] * v2], order + 1)
    target = standard_form(4, order)
    return pullback(target, phi), sl2_diagonal(2), target


def invariant_case_6(rng, order):
    """Cotangent-lifted sl(2) on T*R^3 and a map built from the three quadratic invariants."""
    lifts = [cotangent_lift(f) for f in sl2_linear_rep(order + 1).fields]
    mats = [f.linear_matrix() for f in lifts]
    target = CotangentContext(3, order).omega
    q = [Jet.variable(6, order + 1, i) for i in range(3)]
    p = [Jet.variable(6, order + 1, 3 + i) for i in range(3)]
    sig = [1, 1, -1]
    i1 = sum((q[i] * q[i]).scale(sig[i]) for i in range(3))
    i2 = sum((p[i] * p[i]).scale(sig[i]) for i in range(3))
    i3 = sum(q[i] * p[i] for i in range(3))

    def rfun(const):
        acc = Jet.constant(6, order, Fraction(const))
        for inv in (i1, i2, i3):
            acc = acc + inv.truncate(order).scale(rq(rng))
        return acc + (i1 * i3).truncate(order).scale(rq(rng))

    f, g, h, k = rfun(1), rfun(0), rfun(1), rfun(0)
    # q_i -> f q_i + g G p_i and p_i -> h p_i + k G q_i with G = diag(1, 1, -1)
    phi = PolyMap([f * q[i] + g * p[i].scale(sig[i]) for i in range(3)]
                  + [h * p[i] + k * q[i].scale(sig[i]) for i in range(3)], order + 1)
    assert commutes_with_linear(phi, mats) == 0
    return pullback(target, phi), mats, target


def test_criterion_3_equivariant_darboux():
    rng = random.Random(33)
    order = 5
    t0 = time.perf_counter()
    pull = comm = 0
    trials = 0
    for build in [invariant_case_4] * 5 + [invariant_case_6] * 5:
        omega, mats, target = build(rng, order)
        m, rep = equivariant_darboux(omega, mats, order, target=target)
        # independent re-check of both postconditions
        pull = max(pull, (pullback(omega, m) - target).truncate(order).max_abs())
        comm = max(comm, commutes_with_linear(m, mats))
        trials += 1
    elapsed = time.perf_counter() - t0
    verdict(3, pull == 0 and comm == 0 and elapsed < 30,
            f"{trials} trials (5 on 4 vars, 5 on 6 vars, order {order}), pullback residual {pull}, "
            f"commutation residual {comm}, {elapsed:.2f} s")


def test_criterion_4_moment_map_golden():
    names = ["x", "y", "z", "a", "b", "c"]
    r = sl2_linear_rep(3)
    mu = moment_map(r)
    expected = ["z*b + c*y", "a*z + x*c", "-a*y + b*x"]
    same = all(m.coeffs == parse_jet(e, 6, m.order, names).coeffs for m, e in zip(mu, expected))
    ctx = CotangentContext(3, 4)
    ham = max(check_hamiltonian(cotangent_lift(f), m, ctx) for f, m in zip(r.fields, mu))
    verdict(4, same and ham == 0,
            f"mu = {[m.to_str(names) for m in mu]}, hamiltonian residual {ham}")


def test_criterion_5_orbit_strata():
    mu = moment_map(sl2_linear_rep(2))
    t0 = time.perf_counter()
    omega_pts = sample_points(6, 10_000, kind="grid", region="omega")
    scan = strata_scan(mu, omega_pts)
    box = strata_scan(mu, sample_points(6, 2000, kind="random", seed=5))
    witnesses = list(scan.witnesses.items()) + list(box.witnesses.items())
    exact = all(dmu_rank(mu, pt) == r for r, pt in witnesses)
    generic = box.fraction(3)
    elapsed = time.perf_counter() - t0
    ok = set(scan.counts) <= {0, 2} and generic > 0.95 and exact and len(omega_pts) >= 10_000
    verdict(5, ok, f"omega grid {len(omega_pts)} points ranks {scan.counts}; box rank 3 at "
                   f"{100 * generic:.2f}%; witnesses exact: {exact}; {elapsed:.2f} s")


def test_criterion_6_cairns_ghys():
    t0 = time.perf_counter()
    fields = cairns_ghys_fields()
    outside = cone_samples(1000, 2024, "outside")
    inside = cone_samples(1000, 2025, "inside")
    r_out, _ = orbit_dims_many(fields, outside)
    r_in, _ = orbit_dims_many(fields, inside)
    r_lin, _ = orbit_dims_many(linear_sl2_fields(), inside)
    frac3 = float(np.mean(r_out == 3))
    inside_ok = bool(np.all(r_in == r_lin) and np.all(r_in <= 2))
    check_pts = cone_samples(100, 7, "any")
    check_pts = check_pts[check_pts[:, 0] ** 2 + check_pts[:, 1] ** 2 > 0]
    residual = bracket_residual_numeric(fields, sl2_linear_rep(1).algebra.c, check_pts)
    elapsed = time.perf_counter() - t0
    ok = frac3 >= 0.99 and inside_ok and residual < 1e-9 and elapsed < 5
    verdict(6, ok, f"outside rank 3 at {100 * frac3:.1f}%, inside equals linear rank: "
                   f"{inside_ok}, bracket residual {residual:.2e}, {elapsed:.2f} s")


def fixture_b_form(order):
    smooth = FormJet.constant(4, {(0, 1): 1}, order)
    log = FormJet(4, 1, {(3,): parse_jet("1 + x3", 4, order)}, order)
    return BForm.from_parts(smooth, log, 2)


def test_criterion_7_b_darboux():
    order = 5
    rng = random.Random(77)
    cases = [fixture_b_form(order + 1)]
    for _ in range(10):
        psi = rand_b_map(rng, 4, 2, order + 3)
        cases.append(b_pullback(standard_b_form(4, order + 3), psi).truncate(order + 1))
    t0 = time.perf_counter()
    worst, divisible = 0, True
    for omega in cases:
        m, _ = b_darboux(omega, order)
        res = (b_pullback(omega, m) - standard_b_form(4, order)).truncate(order).max_abs()
        worst = max(worst, res)
        divisible &= all(e[2] > 0 for e in m[2].coeffs)
    elapsed = time.perf_counter() - t0
    verdict(7, worst == 0 and divisible,
            f"fixture + {len(cases) - 1} random cases at order {order}, residual {worst}, "
            f"z-component divisible by z: {divisible}, {elapsed:.2f} s")


def split_form_holds(Q, rank):
    """{x_i, y_j} = delta_ij on the block, block-transverse brackets zero, f_ij(0) = 0, z-only."""
    n = Q.nvars
    for i in range(n):
        for j in range(i + 1, n):
            c = Q[i, j]
            if j < rank:
                want = Jet.constant(n, Q.order, Fraction(int(i % 2 == 0 and j == i + 1)))
                if not c.agrees(want):
                    return False
            elif i < rank:
                if not c.is_zero():
                    return False
            elif c.constant_term() != 0 or any(any(e[:rank]) for e in c.coeffs):
                return False
    return True


def test_criterion_8_poisson_layer():
    xyzt = ["x", "y", "z", "t"]
    fixtures = [
        BivectorJet(4, {(2, 3): parse_jet("z", 4, 4, xyzt), (0, 1): parse_jet("1", 4, 4, xyzt)}, 4),
        BivectorJet(3, {(0, 1): parse_jet("x3", 3, 4), (1, 2): parse_jet("x1", 3, 4),
                        (0, 2): parse_jet("-x2", 3, 4)}, 4),
        BivectorJet(5, {(0, 1): Jet.constant(5, 4, 1), (2, 3): parse_jet("x5^2 + x3*x4", 5, 4)}, 4),
    ]
    fixtures_ok = all(check_poisson(P) == 0 for P in fixtures)
    rng = random.Random(88)
    shapes = [(3, 1), (4, 1), (5, 1), (4, 2), (5, 2), (3, 0), (4, 1), (5, 1), (5, 2), (2, 1),
              (5, 1), (4, 0)]
    t0 = time.perf_counter()
    good = 0
    for n, k in shapes:
        P = bivector_pushforward(split_bivector(rng, n, k, 4), rand_invertible_map(rng, n, 5))
        P = P.truncate(4)
        m, rep = weinstein_split(P, 4)
        Q = bivector_pushforward(P, m).truncate(4)
        good += rep.residual == 0 and rep.rank == 2 * k and split_form_holds(Q, rep.rank)
    elapsed = time.perf_counter() - t0
    verdict(8, fixtures_ok and good == len(shapes) and elapsed < 60,
            f"split fixtures Poisson: {fixtures_ok}; {good}/{len(shapes)} randomized splits "
            f"(dim <= 5, order 4) exact; {elapsed:.2f} s")


def random_form(rng, n, degree, order):
    from itertools import combinations
    return FormJet(n, degree, {idx: rand_jet(rng, n, 0, order, order, 0.2)
                               for idx in combinations(range(n), degree)}, order)


def random_field(rng, n, order, lo=0):
    return VectorFieldJet([rand_jet(rng, n, lo, order, order, 0.2) for _ in range(n)], order)


def test_criterion_9_calculus_invariants():
    rng = random.Random(99)
    count = 50
    counts = dict.fromkeys(["d^2 = 0", "dH = id", "pullback functorial", "lift homomorphism",
                            "Jacobi", "b_d^2 = 0", "b_d b_primitive = id"], 0)
    for i in range(count):
        eta = random_form(rng, 4, i % 3, 4)
        counts["d^2 = 0"] += exterior_d(exterior_d(eta)).is_zero()
        beta = exterior_d(random_form(rng, 3, i % 2, 4))
        counts["dH = id"] += exterior_d(poincare_primitive(beta)).agrees(beta, beta.order)
        a, b = near_identity(rng, 3, 5), near_identity(rng, 3, 5)
        w = random_form(rng, 3, 2, 3)
        lhs, rhs = pullback(w, a.compose(b)), pullback(pullback(w, a), b)
        counts["pullback functorial"] += lhs.agrees(rhs, min(lhs.order, rhs.order))
        v, u = random_field(rng, 2, 3, 1), random_field(rng, 2, 3, 1)
        lhs, rhs = cotangent_lift(bracket_vf(v, u)), bracket_vf(cotangent_lift(v), cotangent_lift(u))
        o = min(lhs.order, rhs.order)
        counts["lift homomorphism"] += lhs.truncate(o) == rhs.truncate(o)
        x, y, z = (random_field(rng, 3, 3, 1) for _ in range(3))
        jac = (bracket_vf(x, bracket_vf(y, z)) + bracket_vf(y, bracket_vf(z, x))
               + bracket_vf(z, bracket_vf(x, y)))
        counts["Jacobi"] += jac.is_zero()
        bf = BForm(random_form(rng, 4, i % 3, 4), 2)
        counts["b_d^2 = 0"] += b_d(b_d(bf)).is_zero()
        exact = b_d(bf)
        again = b_d(b_primitive(exact))
        counts["b_d b_primitive = id"] += again.agrees(exact, min(again.order, exact.order))
    ok = all(v == count for v in counts.values())
    verdict(9, ok, ", ".join(f"{k}: {v}/{count}" for k, v in counts.items()))
