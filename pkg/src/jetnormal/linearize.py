"""Formal linearization of representations with semisimple linear part.

Degree by degree, the defect ``R_i`` (the degree-k part of each generator)
is removed by a coordinate change ``y = x + h(x)`` where ``h`` is homogeneous
of degree k and solves ``[A_i x, h] = -R_i`` for all generators at once.

The module also provides :func:`invariant_projection`, the projection of a
homogeneous object onto the invariants of a linear action along the sum of
the images of the generators.  For a semisimple action this splitting exists
by complete reducibility.
"""
import warnings
from itertools import combinations
from dataclasses import dataclass
from fractions import Fraction

from .forms import FormJet, lie_derivative
from .jet import Jet, PolyMap, VectorFieldJet, bracket_vf, monomials
from .lie import LinearPart, check_representation, is_semisimple, linear_part, pushforward_rep
from .linalg import SparseSolver


class NotPreparedError(ValueError):
    """Lower-degree nonlinear terms are still present."""


class NoSolutionError(ValueError):
    """The homological equation has no solution."""

    def __init__(self, msg, degree=None):
        super().__init__(msg if degree is None else f"{msg} (degree {degree})")
        self.degree = degree


class NotReductiveError(ValueError):
    """Invariants and generator images intersect, so no canonical projection exists."""


@dataclass
class HomogeneousCochain:
    """Degree-k defects of the generators and their cocycle residual."""

    degree: int
    fields: list
    residual: object = 0

    def is_zero(self):
        return all(f.is_zero() for f in self.fields)

    def max_abs(self):
        return max((f.max_abs() for f in self.fields), default=0)


def _matrix_key(A):
    return tuple(tuple(tuple(row) for row in M) for M in A)


def _linear_fields(A, order):
    return [VectorFieldJet.from_matrix(M, order) for M in A]


def cocycle_defect(r, k):
    """Degree-k defect of ``r`` and its cocycle residual.

    Requires every generator to be linear through degree ``k - 1``.
    """
    for i, f in enumerate(r.fields):
        for d in range(2, k):
            if not f.homogeneous(d).is_zero():
                raise NotPreparedError(f"generator {i} has terms of degree {d} < {k}")
    if k > r.order:
        raise ValueError(f"degree {k} exceeds the representation order {r.order}")
    A = linear_part(r).matrices
    lin = _linear_fields(A, k + 1)
    R = [f.homogeneous(k).with_order(k + 1) for f in r.fields]
    g = r.algebra
    worst = 0
    for i in range(g.dim):
        for j in range(i + 1, g.dim):
            res = bracket_vf(lin[i], R[j]) - bracket_vf(lin[j], R[i])
            for m in range(g.dim):
                if g.c[i][j][m] != 0:
                    res = res - R[m].scale(g.c[i][j][m]).truncate(res.order)
            worst = max(worst, res.homogeneous(k).max_abs())
    return HomogeneousCochain(k, [f.with_order(k) for f in R], worst)


# -- the homological operator -------------------------------------------------
_SOLVERS = {}


def _field_basis(n, k):
    """Unknowns of a homogeneous degree-k field, ordered by (monomial, component)."""
    return [(e, c) for e in monomials(n, k) for c in range(n)]


def _homological_solver(A, n, k):
    """Sparse system for ``h -> ([A_i x, h])_i`` on degree-k fields, cached."""
    key = (_matrix_key(A), n, k)
    hit = _SOLVERS.get(key)
    if hit is not None:
        return hit
    cols = _field_basis(n, k)
    rows_index = {}
    rows = []

    def row(i, comp, e):
        rk = (i, comp, e)
        r = rows_index.get(rk)
        if r is None:
            r = rows_index[rk] = len(rows)
            rows.append({})
        return rows[r]

    for col, (e, c) in enumerate(cols):
        for i, M in enumerate(A):
            # (Ax) . grad(x^e) in component c
            for j in range(n):
                if e[j] == 0:
                    continue
                for l in range(n):
                    a = M[j][l]
                    if a == 0:
                        continue
                    f = list(e)
                    f[j] -= 1
                    f[l] += 1
                    rw = row(i, c, tuple(f))
                    rw[col] = rw.get(col, 0) + a * e[j]
            # - A (x^e e_c)
            for comp in range(n):
                a = M[comp][c]
                if a != 0:
                    rw = row(i, comp, e)
                    rw[col] = rw.get(col, 0) - a
    solver = SparseSolver(rows, len(cols))
    out = (solver, rows_index, cols)
    _SOLVERS[key] = out
    return out


def solve_homological(A, R):
    """Homogeneous ``h`` of degree ``R.degree`` with ``[A_i x, h] = R_i`` for all i.

    Parameters
    ----------
    A : LinearPart or list of matrices
    R : HomogeneousCochain

    Returns
    -------
    VectorFieldJet
        Of order ``k + 1``, so that it behaves as an exact polynomial.  Among
        all solutions the one of minimal norm in the monomial basis is chosen.

    Raises
    ------
    NoSolutionError
        If the joint system is inconsistent.
    """
    mats = A.matrices if isinstance(A, LinearPart) else A
    k = R.degree
    n = R.fields[0].nvars
    if all(f.is_zero() for f in R.fields):
        return VectorFieldJet.zero(n, k + 1)
    solver, rows_index, cols = _homological_solver(mats, n, k)
    b = {}
    for i, f in enumerate(R.fields):
        for comp, c in enumerate(f):
            for e, v in c.homogeneous(k).coeffs.items():
                r = rows_index.get((i, comp, e))
                if r is None:
                    raise NoSolutionError("defect outside the image of the homological operator", k)
                b[r] = v
    if not solver.is_consistent(b):
        raise NoSolutionError("homological equation is inconsistent", k)
    x = solver.solve_min_norm(b)
    comps = [dict() for _ in range(n)]
    for col, v in x.items():
        e, c = cols[col]
        comps[c][e] = v
    h = VectorFieldJet([Jet(n, k + 1, cs) for cs in comps], k + 1)
    lin = _linear_fields(mats, k + 1)
    for i, f in enumerate(R.fields):
        if not (bracket_vf(lin[i], h).homogeneous(k) - f.homogeneous(k).with_order(k)).is_zero():
            raise NoSolutionError("post-check of the homological solution failed", k)
    return h


@dataclass
class LinearizationReport:
    residual: object
    defects: list
    semisimple: bool


def linearize_rep(r, order):
    """Coordinate change ``m`` (identity linear part) making ``r`` linear to ``order``.

    Returns
    -------
    m : PolyMap
        Exact polynomial map; new coordinates are ``y = m(x)``.
    lin : Representation
        ``pushforward_rep(r, m)``, linear through degree ``order``.
    report : LinearizationReport
        Per-degree defect sizes (before correction).
    """
    if r.order < order:
        raise ValueError(f"representation known only to order {r.order} < {order}")
    semi = is_semisimple(r.algebra)
    if not semi:
        warnings.warn("algebra is not semisimple; linearization may fail", stacklevel=2)
    chk = check_representation(r.truncate(order))
    current = r.truncate(order)
    A = linear_part(current).matrices
    n = r.nvars
    m = PolyMap.identity(n, order + 1)
    defects = []
    for k in range(2, order + 1):
        R = cocycle_defect(current, k)
        defects.append((k, R.max_abs(), R.residual))
        if R.is_zero():
            continue
        if R.residual != 0:
            raise NoSolutionError("defect is not a cocycle; input is not a representation", k)
        neg = HomogeneousCochain(k, [-f for f in R.fields])
        h = solve_homological(A, neg)
        phi = PolyMap([Jet.variable(n, order + 1, i) + h[i].with_order(order + 1)
                       for i in range(n)], order + 1)
        current = pushforward_rep(current, phi)
        m = phi.compose(m)
    if not current.is_linear():
        raise NoSolutionError("result is not linear", order)
    return m, current, LinearizationReport(chk.residual, defects, semi)


# -- invariant projection ------------------------------------------------------
def _coords(w):
    """Coefficient vector of a homogeneous object as ``{key: value}``."""
    if isinstance(w, Jet):
        return dict(w.coeffs)
    if isinstance(w, VectorFieldJet):
        return {(c, e): v for c, comp in enumerate(w) for e, v in comp.coeffs.items()}
    if isinstance(w, FormJet):
        return {(idx, e): v for idx, comp in w.terms.items() for e, v in comp.coeffs.items()}
    raise TypeError(f"unsupported element type {type(w).__name__}")


def _space(w, k):
    """Basis keys, element builder and kind for the homogeneous space of ``w``."""
    n = w.nvars
    mons = monomials(n, k)
    if isinstance(w, Jet):
        keys = list(mons)

        def build(vec, order):
            return Jet(n, order, vec)
        return "function", keys, build
    if isinstance(w, VectorFieldJet):
        keys = [(c, e) for e in mons for c in range(n)]

        def build(vec, order):
            comps = [dict() for _ in range(n)]
            for (c, e), v in vec.items():
                comps[c][e] = v
            return VectorFieldJet([Jet(n, order, cs) for cs in comps], order)
        return "field", keys, build
    deg = w.degree
    keys = [(idx, e) for idx in combinations(range(n), deg) for e in mons]

    def build(vec, order):
        terms = {}
        for (idx, e), v in vec.items():
            terms.setdefault(idx, {})[e] = v
        return FormJet(n, deg, {idx: Jet(n, order, cs) for idx, cs in terms.items()}, order)
    return ("form", deg), keys, build


def _act(kind, xi, obj):
    if kind == "function":
        return xi.apply(obj)
    if kind == "field":
        return bracket_vf(xi, obj)
    return lie_derivative(xi, obj)


def _homogeneous_degree(w):
    if isinstance(w, Jet):
        ds = {sum(e) for e in w.coeffs}
    elif isinstance(w, VectorFieldJet):
        ds = {sum(e) for c in w for e in c.coeffs}
    else:
        ds = {sum(e) for c in w.terms.values() for e in c.coeffs}
    if len(ds) > 1:
        raise ValueError("invariant_projection needs a homogeneous element")
    return ds.pop() if ds else None


_PROJECTORS = {}


def _projector(mats, kind, n, k, keys, build):
    key = (_matrix_key(mats), kind, n, k)
    hit = _PROJECTORS.get(key)
    if hit is not None:
        return hit
    index = {kk: i for i, kk in enumerate(keys)}
    dim = len(keys)
    fields = _linear_fields(mats, k + 2)
    # images a_i(b) of every basis element b, as sparse columns
    images = []
    for M, xi in zip(mats, fields):
        cols = []
        for kk in keys:
            b = build({kk: Fraction(1)}, k + 2)
            img = _act(kind, xi, b)
            img = img.homogeneous(k)
            cols.append({index[c]: v for c, v in _coords(img).items() if v != 0})
        images.append(cols)
    # common kernel of the stacked action
    stacked = []
    for cols in images:
        rows = [dict() for _ in range(dim)]
        for j, col in enumerate(cols):
            for i, v in col.items():
                rows[i][j] = v
        stacked.extend(rows)
    kernel = SparseSolver(stacked, dim).kernel()
    # [K | a_1 ... a_d] as a system in the unknowns (u, v)
    big_cols = list(kernel) + [col for cols in images for col in cols]
    rows = [dict() for _ in range(dim)]
    for j, col in enumerate(big_cols):
        for i, v in col.items():
            rows[i][j] = v
    solver = SparseSolver(rows, len(big_cols))
    img_rows = [dict() for _ in range(dim)]
    for j, col in enumerate(big_cols[len(kernel):]):
        for i, v in col.items():
            img_rows[i][j] = v
    img_rank = SparseSolver(img_rows, len(big_cols) - len(kernel)).rank
    if solver.rank != len(kernel) + img_rank:
        raise NotReductiveError("invariants meet the span of generator images")
    if solver.rank != dim:
        raise NotReductiveError("invariants and generator images do not span the space")
    out = (kernel, solver, index)
    _PROJECTORS[key] = out
    return out


def invariant_projection(A, w):
    """Project a homogeneous function, field or form onto the invariants of ``A``.

    The generators act by Lie derivative along the linear fields ``x -> A_i x``.
    The space splits as ``W^g + sum_i im(a_i)``; the result is the ``W^g``
    component of ``w``.

    Raises
    ------
    NotReductiveError
        When the splitting does not exist (non-semisimple action).
    """
    mats = A.matrices if isinstance(A, LinearPart) else A
    k = _homogeneous_degree(w)
    if k is None:
        return w
    kind, keys, build = _space(w, k)
    kernel, solver, index = _projector(mats, kind, w.nvars, k, keys, build)
    b = {index[kk]: v for kk, v in _coords(w).items()}
    x = solver.solve(b)
    vec = {}
    for j, u in x.items():
        if j >= len(kernel):
            continue
        for i, v in kernel[j].items():
            vec[i] = vec.get(i, 0) + u * v
    out = {keys[i]: v for i, v in vec.items() if v != 0}
    return build(out, w.order)


def is_invariant(A, w):
    """True when every generator annihilates ``w`` (to the order of ``w``)."""
    mats = A.matrices if isinstance(A, LinearPart) else A
    order = w.order + 1
    kind = "function" if isinstance(w, Jet) else "field" if isinstance(w, VectorFieldJet) else "form"
    for xi in _linear_fields(mats, order):
        img = _act(kind, xi, w)
        if not img.truncate(w.order).is_zero():
            return False
    return True


def commutes_with_linear(m, A):
    """Max coefficient of ``Dm . (A_i x) - A_i m(x)`` over the generators."""
    mats = A.matrices if isinstance(A, LinearPart) else A
    n = m.nvars
    J = m.jacobian()
    worst = 0
    for M in mats:
        lin = VectorFieldJet.from_matrix(M, m.order)
        for i in range(n):
            lhs = J[i][0] * lin[0]
            for j in range(1, n):
                lhs = lhs + J[i][j] * lin[j]
            rhs = Jet.zero(n, m.order)
            for j in range(n):
                if M[i][j] != 0:
                    rhs = rhs + m[j].scale(M[i][j])
            worst = max(worst, (lhs - rhs.truncate(lhs.order)).max_abs())
    return worst

