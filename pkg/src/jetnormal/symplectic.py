"""Formal Darboux and equivariant Darboux normalization by the Moser path method.

Time-dependent objects carry :class:`~jetnormal.tpoly.TPoly` coefficients,
so ``omega_t = omega_0 + t (omega_1 - omega_0)`` and the Moser field are
ordinary jets whose coefficients are polynomials in ``t``.

Direction conventions: for ``omega_1`` with the same constant part as
``omega_0``, :func:`formal_flow` of :func:`moser_field` returns ``phi`` with
``pullback(omega_1, phi) == omega_0``.  So ``phi`` maps the normalized
coordinates to the original ones.
"""
from dataclasses import dataclass, field
from fractions import Fraction

import gmpy2
import numpy as np

from .forms import FormJet, exterior_d, interior, lie_derivative, poincare_primitive, pullback
from .jet import Jet, PolyMap, Substitution, VectorFieldJet
from .lie import LinearPart, Report
from .linalg import as_fraction_matrix, inverse, matrix_rank
from .linearize import commutes_with_linear, invariant_projection
from .tpoly import TPoly


class NormalizeFirstError(ValueError):
    """The constant parts of the two forms differ."""


class NotEquivariantError(ValueError):
    """The form is not invariant under the linear action."""


class IllPosedFlowError(ValueError):
    """The field has a constant or linear part, so its formal flow is not defined."""


class DegenerateFormError(ValueError):
    """The constant part of the form is singular."""


@dataclass
class DarbouxReport:
    pullback_residual: object
    commutation_residual: object = 0
    details: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.pullback_residual == 0 and self.commutation_residual == 0


def _is_small(v, tol):
    return v == 0 if tol is None else abs(v) <= tol


def check_symplectic(omega, tol=None):
    """``ok`` iff ``omega`` is closed to its order and nondegenerate at 0."""
    bad = []
    if omega.degree != 2:
        return Report(False, violations=["not a 2-form"])
    closed = exterior_d(omega).max_abs()
    if not _is_small(closed, tol):
        bad.append(f"not closed (|d omega| = {closed})")
    C = omega.constant_matrix()
    n = omega.nvars
    if n % 2 or matrix_rank(C, tol) < n:
        bad.append("constant part is degenerate")
    return Report(not bad, residual=closed, violations=bad, order=omega.order)


def standard_form(n, order):
    """``sum_i dx_{2i} ^ dx_{2i+1}`` on ``n`` variables."""
    return FormJet.constant(n, {(2 * i, 2 * i + 1): Fraction(1) for i in range(n // 2)}, order)


def symplectic_basis(C):
    """Linear map ``S`` with ``S^T C S`` the standard block form.

    Symplectic Gram-Schmidt over the rationals; columns of ``S`` are
    ``e_1, f_1, e_2, f_2, ...`` with ``C(e_i, f_i) = 1``.
    """
    n = len(C)
    C = as_fraction_matrix(C)

    def B(u, v):
        return sum(u[i] * C[i][j] * v[j] for i in range(n) for j in range(n) if C[i][j] != 0)

    pool = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    cols = []
    while pool:
        e = pool.pop(0)
        pair = next((k for k, f in enumerate(pool) if B(e, f) != 0), None)
        if pair is None:
            if any(v != 0 for v in e):
                raise DegenerateFormError("constant part of the form is degenerate")
            continue
        f = pool.pop(pair)
        s = B(e, f)
        f = [v / s for v in f]
        cols += [e, f]
        new = []
        for v in pool:
            a, b = -B(v, f), B(v, e)
            new.append([v[i] + a * e[i] + b * f[i] for i in range(n)])
        pool = new
    if len(cols) != n:
        raise DegenerateFormError("constant part of the form is degenerate")
    return [[cols[j][i] for j in range(n)] for i in range(n)]


# -- Moser ----------------------------------------------------------------------
def _tconst(c):
    return TPoly((c,))


def _tlinear(c):
    return TPoly((0, c))


def _mat_apply(M, vec):
    """Constant matrix times a vector of jets."""
    out = []
    for row in M:
        acc = None
        for j, a in enumerate(row):
            if a == 0 or vec[j].is_zero():
                continue
            term = vec[j].scale(a)
            acc = term if acc is None else acc + term
        out.append(acc if acc is not None else Jet.zero(vec[0].nvars, min(v.order for v in vec)))
    return out


def _jetmat_apply(E, vec):
    """Matrix of jets times a vector of jets (honest orders)."""
    n = len(vec)
    out = []
    for i in range(n):
        acc = None
        for j in range(n):
            if E[i][j].is_zero() or vec[j].is_zero():
                continue
            term = E[i][j] * vec[j]
            acc = term if acc is None else acc + term
        if acc is None:
            order = min(min(E[i][j].order + vec[j].valuation(), vec[j].order + E[i][j].valuation())
                        for j in range(n))
            acc = Jet.zero(vec[0].nvars, order)
        out.append(acc)
    return out


@dataclass
class MoserData:
    """The Moser field ``X_t`` with the primitive ``alpha`` it was built from."""

    field: VectorFieldJet
    alpha: FormJet
    omega_t: FormJet


def moser_field(omega0, omega1, tol=None, primitive=None):
    """Solve ``i_{X_t} omega_t = -alpha`` with ``alpha = H(omega1 - omega0)``.

    ``primitive(form, tol)`` replaces the radial homotopy operator ``H``
    (the b-calculus passes its own primitive and works in the b-frame).

    Returns
    -------
    MoserData
        ``field`` has :class:`TPoly` coefficients; its constant and linear
        parts vanish.
    """
    if omega0.nvars != omega1.nvars or omega0.degree != 2 or omega1.degree != 2:
        raise ValueError("moser_field needs two 2-forms on the same space")
    n = omega0.nvars
    C0 = omega0.constant_matrix()
    C1 = omega1.constant_matrix()
    if any(not _is_small(C0[i][j] - C1[i][j], tol) for i in range(n) for j in range(n)):
        raise NormalizeFirstError("constant parts differ; normalize the linear part first")
    order = min(omega0.order, omega1.order)
    diff = (omega1 - omega0).truncate(order)
    alpha = (primitive or poincare_primitive)(diff, tol)
    if tol is None:
        Cinv = inverse(as_fraction_matrix(C0))
    else:
        Cinv = np.linalg.inv(np.array(C0, dtype=float)).tolist()
    M0 = omega0.to_matrix()
    D = diff.to_matrix()
    limit = alpha.order
    if all(M0[i][j].high(1).is_zero() for i in range(n) for j in range(n)):
        # constant omega0: Omega_t = C0 + t D, the k-th Neumann term is t^k (-C0^-1 D)^k C0^-1 alpha
        v = _mat_apply(Cinv, [alpha.coefficient((j,)) for j in range(n)])
        X = [c.map_coeffs(_tconst) for c in v]
        k = 0
        while not all(c.is_zero() for c in v):
            k += 1
            v = [-c.truncate(limit) for c in _mat_apply(Cinv, _jetmat_apply(D, v))]
            if min(c.valuation() for c in v) > limit:
                break
            X = [a + b.map_coeffs(lambda c, k=k: TPoly((0,) * k + (c,))) for a, b in zip(X, v)]
    else:
        # Omega_t = C0 + E_t with E_t = (Omega0 - C0) + t * D, valuation >= 1
        E = [[(M0[i][j].high(1).map_coeffs(_tconst) + D[i][j].map_coeffs(_tlinear))
              for j in range(n)] for i in range(n)]
        rhs = [alpha.coefficient((j,)).map_coeffs(_tconst) for j in range(n)]
        v = _mat_apply(Cinv, rhs)
        X = list(v)
        while not all(c.is_zero() for c in v):
            v = [-c for c in _mat_apply(Cinv, _jetmat_apply(E, v))]
            if min(c.valuation() for c in v) > limit:
                break
            X = [a + b for a, b in zip(X, v)]
    Xf = VectorFieldJet(X)
    omega_t = FormJet(n, 2, {k: c.map_coeffs(_tconst) for k, c in omega0.terms.items()},
                      omega0.order) + diff.map_coeffs(_tlinear)
    return MoserData(Xf, alpha, omega_t)


def moser_residual(data):
    """Max coefficient of ``i_{X_t} omega_t + alpha`` (a polynomial in t per coefficient)."""
    alpha_t = data.alpha.map_coeffs(_tconst)
    res = interior(data.field, data.omega_t) + alpha_t
    return res.max_abs()


def _as_time_poly(c):
    return c if isinstance(c, TPoly) else TPoly((c,))


def _to_mpq(v):
    return gmpy2.mpq(v.numerator, v.denominator) if isinstance(v, Fraction) else v


def _from_mpq(v):
    if isinstance(v, type(gmpy2.mpq())):
        return Fraction(int(v.numerator), int(v.denominator))
    return v


def formal_flow(X, order=None, nilpotent_ok=False):
    """Time-1 flow of ``dx/dt = X(x, t)`` by Picard iteration in the jet ring.

    ``X`` may have plain scalar coefficients (time independent) or
    :class:`TPoly` coefficients.  Its constant part must vanish.  Without a
    linear part each iteration fixes one more degree.  With
    ``nilpotent_ok`` a nilpotent linear part is accepted; the iteration then
    needs more passes and fails if it does not settle.
    """
    n = X.nvars
    order = X.order if order is None else min(order, X.order)
    for c in X:
        low = [e for e in c.truncate(order).coeffs if sum(e) <= 1]
        if any(sum(e) == 0 for e in low) or (low and not nilpotent_ok):
            raise IllPosedFlowError("field has a nonzero constant or linear part")
    # gmpy2 rationals inside the Picard loop; converted back at the end
    Xt = [c.truncate(order).map_coeffs(
        lambda p: TPoly(_to_mpq(v) for v in _as_time_poly(p).c)) for c in X]
    ident = [Jet.variable(n, order, i, TPoly((1,))) for i in range(n)]
    phi = ident
    passes = order + 1 if not nilpotent_ok else (n + 1) * (order + 1)
    for _ in range(passes):
        sub = Substitution(phi)
        new = [ident[i] + sub.apply(Xt[i], order).map_coeffs(TPoly.integrate) for i in range(n)]
        if all(a == b for a, b in zip(new, phi)):
            break
        phi = new
    else:
        raise IllPosedFlowError("Picard iteration did not settle; linear part is not nilpotent")
    return PolyMap([c.map_coeffs(lambda p: _from_mpq(p.at(1))) for c in phi], order)


# -- Darboux ----------------------------------------------------------------------
def _pullback_residual(omega, m, target):
    return (pullback(omega, m) - target).truncate(omega.order).max_abs()


def darboux(omega, order=None, tol=None):
    """Map ``m`` with ``pullback(omega, m)`` the standard form to ``order``.

    The constant part is first brought to standard form by a linear
    symplectic basis change ``S``; the Moser flow ``phi`` then removes the
    higher terms and ``m = S o phi``.

    Returns
    -------
    m : PolyMap
        Of order ``order + 1``.
    report : DarbouxReport
    """
    chk = check_symplectic(omega, tol)
    if not chk.ok:
        raise DegenerateFormError("; ".join(chk.violations))
    order = omega.order if order is None else min(order, omega.order)
    omega = omega.truncate(order)
    n = omega.nvars
    S = symplectic_basis(omega.constant_matrix())
    Smap = PolyMap.linear(S, order + 1)
    omega_s = pullback(omega, Smap)
    target = standard_form(n, order)
    phi = formal_flow(moser_field(target, omega_s, tol).field, order + 1)
    m = Smap.compose(phi)
    return m, DarbouxReport(_pullback_residual(omega, m, target), details={"linear": S})


def check_invariant_form(omega, A):
    """Max coefficient of the Lie derivatives of ``omega`` along the linear generators."""
    mats = A.matrices if isinstance(A, LinearPart) else A
    worst = 0
    for M in mats:
        xi = VectorFieldJet.from_matrix(M, omega.order + 1)
        worst = max(worst, lie_derivative(xi, omega).truncate(omega.order).max_abs())
    return worst


def _projected(A, form):
    """Sum of the invariant projections of the homogeneous pieces of ``form``."""
    out = FormJet(form.nvars, form.degree, {}, form.order)
    degs = {sum(e) for c in form.terms.values() for e in c.coeffs}
    for d in sorted(degs):
        out = out + invariant_projection(A, form.homogeneous(d))
    return out


def equivariant_darboux(omega, A, order=None, target=None):
    """Equivariant Darboux map for a form invariant under a linear action.

    Parameters
    ----------
    omega : FormJet
        Closed 2-form whose constant part equals ``target``'s.
    A : LinearPart or list of matrices
        Linear generators preserving ``omega``.
    target : FormJet, optional
        Constant form to normalize to; defaults to the standard block form.

    Returns
    -------
    m : PolyMap
        ``pullback(omega, m) == target`` to ``order`` and ``m`` commutes
        with every ``x -> A_i x``.
    report : DarbouxReport
    """
    mats = A.matrices if isinstance(A, LinearPart) else A
    order = omega.order if order is None else min(order, omega.order)
    omega = omega.truncate(order)
    n = omega.nvars
    target = standard_form(n, order) if target is None else target.truncate(order)
    if omega.constant_matrix() != target.constant_matrix():
        raise NormalizeFirstError("constant part of the form is not the target form")
    chk = check_symplectic(omega)
    if not chk.ok:
        raise DegenerateFormError("; ".join(chk.violations))
    inv = check_invariant_form(omega, mats)
    if inv != 0:
        raise NotEquivariantError(f"form is not invariant (residual {inv})")
    data = moser_field(target, omega)
    # the radial primitive of an invariant form is invariant; the projection must not move it
    if _projected(mats, data.alpha) != data.alpha:
        raise RuntimeError("invariant projection changed the Moser primitive")
    phi = formal_flow(data.field, order + 1)
    report = DarbouxReport(_pullback_residual(omega, phi, target),
                           commutes_with_linear(phi, mats),
                           {"moser_residual": moser_residual(data)})
    return phi, report
