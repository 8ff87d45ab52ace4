"""Cotangent lifts, Liouville form, moment maps and orbit-dimension strata.

Coordinates on the cotangent bundle of R^n are ``(q_1..q_n, p_1..p_n)``,
stored as variables ``0..n-1`` and ``n..2n-1``.  The Liouville form is
``theta = sum_i p_i dq_i`` and ``omega = d theta = sum_i dp_i ^ dq_i``.
With that sign, a lift ``xi_hat`` preserving ``theta`` satisfies
``i_{xi_hat} omega = -d mu`` for ``mu = theta(xi_hat)``.
"""
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np

from .forms import FormJet, exterior_d, interior, lie_derivative
from .jet import DimensionError, Jet, VectorFieldJet
from .linalg import matrix_rank

FLOAT_RANK_RTOL = 1e-9


class CotangentContext:
    """Coordinates, Liouville form and symplectic form on T*R^n."""

    def __init__(self, n, order):
        self.n = n
        self.order = order
        self.nvars = 2 * n
        self.theta = FormJet(2 * n, 1, {(i,): Jet.variable(2 * n, order, n + i)
                                        for i in range(n)}, order)
        self.omega = exterior_d(self.theta)

    @property
    def names(self):
        if self.n == 3:
            return ["x", "y", "z", "a", "b", "c"]
        return [f"q{i + 1}" for i in range(self.n)] + [f"p{i + 1}" for i in range(self.n)]

    def p(self, j, order=None):
        return Jet.variable(self.nvars, self.order if order is None else order, self.n + j)


def _lift_base(f, n):
    return f.embed(2 * n, list(range(n)))


def cotangent_lift(xi):
    """``xi_hat = sum_j xi^j d/dq_j - sum_{i,j} p_j (d xi^j / d q_i) d/dp_i``."""
    n = xi.nvars
    N = xi.order
    base = [_lift_base(c, n) for c in xi]
    p = [Jet.variable(2 * n, N + 1, n + j) for j in range(n)]
    fiber = []
    for i in range(n):
        acc = Jet.zero(2 * n, N)
        for j in range(n):
            dij = base[j].diff(i)
            if not dij.is_zero():
                acc = acc + (p[j] * dij).truncate(N)
        fiber.append(-acc)
    return VectorFieldJet(base + fiber, N)


def moment_map(r):
    """``mu_i = sum_j p_j xi_i^j(q)`` for the generators of ``r``."""
    fields = r.fields if hasattr(r, "fields") else list(r)
    out = []
    for xi in fields:
        n = xi.nvars
        N = xi.order
        acc = Jet.zero(2 * n, N + 1)
        for j, c in enumerate(xi):
            if c.is_zero():
                continue
            acc = acc + Jet.variable(2 * n, N + 1, n + j) * _lift_base(c, n)
        out.append(acc)
    return out


def check_hamiltonian(xihat, mu, ctx):
    """Max coefficient of ``i_{xi_hat} omega + d mu``."""
    lhs = interior(xihat, ctx.omega)
    dmu = exterior_d(FormJet.function(mu))
    order = min(lhs.order, dmu.order)
    return (lhs.truncate(order) + dmu.truncate(order)).max_abs()


def theta_preservation(xihat, ctx):
    """Max coefficient of the Lie derivative of ``theta`` along ``xi_hat``."""
    return lie_derivative(xihat, ctx.theta).max_abs()


# -- ranks --------------------------------------------------------------------
def numeric_rank(M, rtol=FLOAT_RANK_RTOL):
    """Rank from singular values ``> rtol * s_max``; also returns the values."""
    a = np.asarray(M, dtype=float)
    if a.size == 0:
        return 0, np.zeros(0)
    s = np.linalg.svd(a, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0, s
    return int(np.sum(s > rtol * s[0])), s


def _is_exact(values):
    return all(isinstance(v, (int, Fraction)) for v in values)


def matrix_rank_auto(M):
    """Exact rank for rational entries, tolerance-based rank for floats."""
    flat = [v for row in M for v in row]
    if _is_exact(flat):
        return matrix_rank([[Fraction(v) for v in row] for row in M])
    return numeric_rank(M)[0]


def dmu_jacobian(mu):
    """Matrix of jets ``d mu_i / d x_j``."""
    return [[m.diff(j) for j in range(m.nvars)] for m in mu]


def dmu_rank(mu, pt, jac=None):
    """Rank of ``d mu`` at ``pt`` (exact for rational points)."""
    jac = dmu_jacobian(mu) if jac is None else jac
    M = [[c.evaluate(pt) for c in row] for row in jac]
    return matrix_rank_auto(M)


def _to_mpq(pt):
    return [gmpy2.mpq(v.numerator, v.denominator) if isinstance(v, Fraction) else gmpy2.mpq(v)
            for v in pt]


class _FastMatrix:
    """Matrix of jets compiled for repeated exact evaluation with gmpy2 rationals."""

    def __init__(self, rows):
        self.rows = [[[(tuple((i, e) for i, e in enumerate(k) if e), gmpy2.mpq(v))
                       for k, v in c.coeffs.items()] for c in row] for row in rows]

    def rank(self, pt):
        if not _is_exact(pt):
            return numeric_rank(self.evaluate(pt))[0]
        return matrix_rank(self.evaluate(_to_mpq(pt)))

    def evaluate(self, pt):
        out = []
        for row in self.rows:
            vals = []
            for terms in row:
                acc = 0
                for idx, c in terms:
                    for i, e in idx:
                        c = c * pt[i] if e == 1 else c * pt[i] ** e
                    acc += c
                vals.append(acc)
            out.append(vals)
        return out


def orbit_dimension(fields, pt):
    """Dimension of the span of the generator values at ``pt``."""
    M = [f.evaluate(pt) for f in fields]
    return matrix_rank_auto(M)


# -- sampling -------------------------------------------------------------------
def sample_points(nvars, count, kind="random", seed=0, box=3, region="box", denominator=8):
    """Deterministic sample points with rational coordinates.

    Parameters
    ----------
    kind : {"random", "grid"}
    box : int
        Coordinates lie in ``[-box, box]``.
    region : {"box", "omega"}
        ``"omega"`` samples the union ``{p = 0} | {q = 0}`` of a cotangent
        space (first and second half of the coordinates), half of the points
        on each piece.
    """
    if region == "omega":
        if nvars % 2:
            raise DimensionError("omega region needs an even number of variables")
        n = nvars // 2
        first = count - count // 2
        base_a = sample_points(n, first, kind, seed, box, "box", denominator)
        base_b = sample_points(n, count // 2, kind, seed + 1, box, "box", denominator)
        zero = (Fraction(0),) * n
        return [tuple(b) + zero for b in base_a] + [zero + tuple(b) for b in base_b]
    if kind == "grid":
        # odd side so the grid contains the origin; at least ``count`` points
        side = max(3, math.ceil(count ** (1.0 / nvars) - 1e-9))
        side += 1 - side % 2
        ticks = [Fraction(-box) + Fraction(2 * box * i, side - 1) for i in range(side)]
        return list(itertools.product(ticks, repeat=nvars))
    if kind != "random":
        raise ValueError(f"unknown sampler {kind!r}")
    rng = random.Random(seed)
    lim = box * denominator
    return [tuple(Fraction(rng.randint(-lim, lim), denominator) for _ in range(nvars))
            for _ in range(count)]


@dataclass
class StrataScan:
    """Outcome of :func:`strata_scan`."""

    counts: dict
    witnesses: dict
    ranks: list
    points: list
    vanishing_minors: dict = field(default_factory=dict)

    def fraction(self, rank):
        total = sum(self.counts.values())
        return self.counts.get(rank, 0) / total if total else 0.0


def _minors(jac, size):
    """All ``size x size`` minors of a matrix of jets, keyed by (rows, cols)."""
    out = {}
    nr, nc = len(jac), len(jac[0])
    for rows in itertools.combinations(range(nr), size):
        for cols in itertools.combinations(range(nc), size):
            out[(rows, cols)] = [[jac[r][c] for c in cols] for r in rows]
    return out


def _jet_det(M):
    n = len(M)
    if n == 1:
        return M[0][0]
    acc = None
    for j in range(n):
        if M[0][j].is_zero():
            continue
        sub = [row[:j] + row[j + 1:] for row in M[1:]]
        term = M[0][j] * _jet_det(sub)
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc if acc is not None else Jet.zero(M[0][0].nvars, min(c.order for row in M for c in row))


def strata_scan(mu=None, points=(), fields=None, names=None):
    """Rank histogram of ``d mu`` (or of the span of ``fields``) over ``points``.

    Returns per-rank counts, the first witness point of each rank and, for
    every rank below the maximal one, the maximal-size minors of ``d mu``
    that vanish at every sample of that rank.
    """
    if (mu is None) == (fields is None):
        raise ValueError("pass exactly one of mu or fields")
    jac = dmu_jacobian(mu) if mu is not None else None
    fast = _FastMatrix(jac if jac is not None else [list(f) for f in fields])
    counts, witnesses, ranks = {}, {}, []
    for pt in points:
        r = fast.rank(pt)
        ranks.append(r)
        counts[r] = counts.get(r, 0) + 1
        witnesses.setdefault(r, pt)
    vanishing = {}
    if jac is not None:
        size = min(len(jac), len(jac[0]))
        dets = {key: _jet_det(M) for key, M in _minors(jac, size).items()}
        dets = {k: d for k, d in dets.items() if not d.is_zero()}
        keys = list(dets)
        fast_dets = _FastMatrix([[dets[k] for k in keys]])
        for r in sorted(counts):
            if r >= size:
                continue
            alive = set(range(len(keys)))
            for p, rr in zip(points, ranks):
                if rr != r or not alive:
                    continue
                vals = fast_dets.evaluate(_to_mpq(p) if _is_exact(p) else p)[0]
                alive = {i for i in alive if vals[i] == 0}
            vanishing[r] = [(keys[i], dets[keys[i]].to_str(names)) for i in sorted(alive)]
    return StrataScan(dict(sorted(counts.items())), dict(sorted(witnesses.items())),
                      ranks, list(points), vanishing)
