"""b-forms, formal b-Darboux, Poisson bivectors and formal Weinstein splitting.

b-forms are stored in the b-frame: a :class:`FormJet` whose index ``zi``
stands for ``dz/z`` instead of ``dz``.  In that frame ``d(dz/z) = 0`` and the
differential of a coefficient uses ``z d/dz`` in the ``dz/z`` slot.  The
canonical decomposition ``smooth_part + (dz/z) ^ log_part`` is read off the
frame representation.

b-vector fields are written in the dual frame ``(d/dx_j, z d/dz)``; the
ordinary field has ``z``-component ``z`` times the frame component.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .forms import FormJet, NotClosedError, _sort_sign, interior, poincare_primitive, wedge
from .jet import (DimensionError, InvalidMapError, Jet, PolyMap, Substitution, VectorFieldJet,
                  monomials)
from .lie import LinearPart
from .linalg import SparseSolver, as_fraction_matrix, inverse, matrix_rank
from .linearize import commutes_with_linear, invariant_projection
from .symplectic import (DarbouxReport, DegenerateFormError, NormalizeFirstError,
                         NotEquivariantError, _jetmat_apply, _mat_apply, formal_flow,
                         moser_field, symplectic_basis)


class NotBExactError(ValueError):
    """The residue part of a closed b-form is not closed on the hypersurface."""


class NotPoissonError(ValueError):
    """The bivector fails the Jacobi identity."""


class SplitFailure(ValueError):
    def __init__(self, msg, degree=None):
        super().__init__(msg if degree is None else f"{msg} (degree {degree})")
        self.degree = degree


# -- b-forms ----------------------------------------------------------------------
class BForm:
    """A b-form ``smooth_part + (dz/z) ^ log_part`` stored in the b-frame.

    Parameters
    ----------
    frame : FormJet
        Coefficients in the frame where index ``zi`` means ``dz/z``.
    zi : int
        Index of the variable cutting out the hypersurface ``{z = 0}``.
    """

    def __init__(self, frame, zi):
        self.frame = frame
        self.zi = zi
        self.nvars = frame.nvars
        self.degree = frame.degree
        self.order = frame.order

    @classmethod
    def from_parts(cls, smooth, log, zi):
        """Build from the smooth part and the ``dz/z`` part (neither may contain dz)."""
        for part in (smooth, log):
            if part is not None and any(zi in idx for idx in part.terms):
                raise ValueError("smooth_part and log_part must not contain dz")
        terms = dict(smooth.terms) if smooth is not None else {}
        order = smooth.order if smooth is not None else log.order
        frame = FormJet(smooth.nvars if smooth is not None else log.nvars,
                        smooth.degree if smooth is not None else log.degree + 1, terms, order)
        if log is not None:
            ez = FormJet(log.nvars, 1, {(zi,): Jet.constant(log.nvars, log.order, Fraction(1))},
                         log.order)
            frame = frame + wedge(ez, log)
        return cls(frame, zi)

    @classmethod
    def from_form(cls, form, zi):
        """Rewrite an ordinary form: every ``dz`` becomes ``z * (dz/z)``."""
        z = Jet.variable(form.nvars, form.order + 1, zi)
        terms = {}
        for idx, c in form.terms.items():
            terms[idx] = (c * z).truncate(form.order) if zi in idx else c
        return cls(FormJet(form.nvars, form.degree, terms, form.order), zi)

    def to_form(self):
        """Ordinary form; requires ``dz/z`` coefficients divisible by ``z``.

        Dividing by ``z`` costs one order, and the ``dz`` coefficients are only
        known to that lower order even when they vanish, so the result is
        always one order lower (for degree >= 1).
        """
        terms = {}
        order = self.order - 1 if self.degree > 0 else self.order
        for idx, c in self.frame.terms.items():
            if self.zi in idx:
                c = c.divide_by_variable(self.zi)
            terms[idx] = c.truncate(order)
        return FormJet(self.nvars, self.degree, terms, order)

    @property
    def smooth_part(self):
        return FormJet(self.nvars, self.degree,
                       {k: v for k, v in self.frame.terms.items() if self.zi not in k}, self.order)

    @property
    def log_part(self):
        out = {}
        for idx, c in self.frame.terms.items():
            if self.zi in idx:
                r = idx.index(self.zi)
                rest = idx[:r] + idx[r + 1:]
                out[rest] = -c if r % 2 else c
        return FormJet(self.nvars, self.degree - 1, out, self.order)

    def __add__(self, other):
        return BForm(self.frame + other.frame, self.zi)

    def __sub__(self, other):
        return BForm(self.frame - other.frame, self.zi)

    def __neg__(self):
        return BForm(-self.frame, self.zi)

    def __eq__(self, other):
        return isinstance(other, BForm) and self.zi == other.zi and self.frame == other.frame

    def __repr__(self):
        return f"BForm(zi={self.zi}, {self.frame!r})"

    def truncate(self, order):
        return BForm(self.frame.truncate(order), self.zi)

    def with_order(self, order):
        return BForm(self.frame.with_order(order), self.zi)

    def is_zero(self):
        return self.frame.is_zero()

    def max_abs(self):
        return self.frame.max_abs()

    def agrees(self, other, order=None):
        return self.frame.agrees(other.frame, order)

    def frame_matrix(self):
        return self.frame.to_matrix()


def b_d(eta):
    """b-differential: ``d`` with ``z d/dz`` in the ``dz/z`` slot."""
    frame = eta.frame
    n = frame.nvars
    zi = eta.zi
    out = {}
    z = Jet.variable(n, frame.order + 1, zi)
    for idx, c in frame.terms.items():
        for j in range(n):
            if j in idx:
                continue
            dc = (z * c.diff(j)).truncate(frame.order) if j == zi else c.diff(j)
            if dc.is_zero():
                continue
            key, sign = _sort_sign((j,) + idx)
            term = dc if sign > 0 else -dc
            out[key] = out[key] + term if key in out else term
    return BForm(FormJet(n, frame.degree + 1, out, frame.order - 1), zi)


def b_wedge(a, b):
    if a.zi != b.zi:
        raise DimensionError("b-forms use different hypersurfaces")
    return BForm(wedge(a.frame, b.frame), a.zi)


def b_nondegenerate(omega):
    """Maximal rank of the frame matrix at the origin."""
    if omega.degree != 2:
        return False
    C = omega.frame.constant_matrix()
    n = omega.nvars
    return n % 2 == 0 and matrix_rank(as_fraction_matrix(C)) == n


def _ez(n, zi, order):
    return FormJet(n, 1, {(zi,): Jet.constant(n, order, Fraction(1))}, order)


def b_primitive(eta):
    """A b-form ``beta`` with ``b_d(beta) == eta`` for a closed b-form of degree >= 1.

    Write ``eta = S + (dz/z) ^ gamma``.  The restriction ``gamma_0`` of
    ``gamma`` to ``z = 0`` is closed; with ``g_0 = H(gamma_0)`` the b-form
    ``-(dz/z) ^ g_0`` is a primitive of ``(dz/z) ^ gamma_0``.  What remains is
    a smooth closed form, handled by the ordinary radial homotopy operator.
    """
    res = b_d(eta).max_abs()
    if res != 0:
        raise NotClosedError(f"b-form is not closed (|b_d eta| = {res})")
    zi, n = eta.zi, eta.nvars
    gamma = eta.log_part
    gamma0 = FormJet(n, gamma.degree, {k: c.substitute_zero(zi) for k, c in gamma.terms.items()},
                     gamma.order)
    ez = _ez(n, zi, eta.order)
    smooth = BForm(eta.frame - wedge(ez, gamma0), zi).to_form()
    beta = BForm.from_form(poincare_primitive(smooth), zi)
    if gamma0.is_zero():
        return beta
    if gamma.degree == 0:
        raise NotBExactError("nonzero constant residue: dz/z is closed but not b-exact")
    try:
        g0 = poincare_primitive(gamma0)
    except NotClosedError:
        raise NotBExactError("residue of the b-form is not closed on z = 0") from None
    return beta - BForm(wedge(_ez(n, zi, g0.order), g0), zi)


def standard_b_form(nvars, order, zi=None):
    """``sum dx_{2i} ^ dx_{2i+1} + (dz/z) ^ dt`` with ``(z, t)`` the last two variables."""
    if nvars % 2 or nvars < 2:
        raise DimensionError("b-symplectic forms need an even number of variables")
    zi = nvars - 2 if zi is None else zi
    if zi != nvars - 2:
        raise ValueError("the standard layout puts z in the second-to-last slot")
    entries = {(2 * i, 2 * i + 1): Fraction(1) for i in range(nvars // 2)}
    return BForm(FormJet.constant(nvars, entries, order), zi)


def _frame_differential(f, zi):
    """``d f`` written in the b-frame."""
    n = f.nvars
    z = Jet.variable(n, f.order + 1, zi)
    terms = {}
    for k in range(n):
        dk = f.diff(k)
        if k == zi:
            dk = (z * dk).truncate(f.order)
        if not dk.is_zero():
            terms[(k,)] = dk
    order = f.order - 1
    return FormJet(n, 1, terms, order)


def _check_b_map(m, zi):
    mz = m[zi]
    if any(e[zi] == 0 for e in mz.coeffs):
        raise InvalidMapError("map does not preserve z = 0 (z-component not divisible by z)")
    u = mz.divide_by_variable(zi)
    if u.constant_term() == 0:
        raise InvalidMapError("z-component of the map has no linear term in z")
    return u


def b_pullback(omega, m):
    """Pullback of a b-form along a map preserving ``{z = 0}``.

    ``m^*(dz/z) = dz/z + du/u`` with ``m_z = z u``, so the result loses two
    orders relative to ``m`` in the ``dz/z`` direction.
    """
    zi = omega.zi
    n = m.nvars
    u = _check_b_map(m, zi)
    sub = Substitution(m.components)
    ones = []
    for i in range(omega.nvars):
        if i == zi:
            dlog = _frame_differential(u, zi).times(u.reciprocal())
            one = _ez(n, zi, dlog.order) + dlog
        else:
            one = _frame_differential(m[i], zi)
        ones.append(one)
    total = None
    for idx, c in omega.frame.terms.items():
        piece = FormJet.function(sub.apply(c))
        for i in idx:
            piece = wedge(piece, ones[i])
        total = piece if total is None else total + piece
    if total is None:
        return BForm(FormJet(n, omega.degree, {}, omega.order), zi)
    return BForm(total, zi)


def b_interior(xb, omega):
    """Contraction with a b-vector field given by its frame components."""
    return BForm(interior(xb, omega.frame), omega.zi)


def b_lie_derivative(xb, omega):
    first = b_interior(xb, b_d(omega))
    if omega.degree == 0:
        return first
    return first + b_d(b_interior(xb, omega))


def frame_components(v, zi):
    """Frame components of a vector field tangent to ``{z = 0}``."""
    comps = list(v)
    if any(e[zi] == 0 for e in comps[zi].coeffs):
        raise InvalidMapError("vector field is not tangent to z = 0")
    comps[zi] = comps[zi].divide_by_variable(zi)
    return VectorFieldJet(comps)


def _from_frame_field(xb, zi):
    comps = list(xb)
    comps[zi] = comps[zi] * Jet.variable(xb.nvars, comps[zi].order + 1, zi)
    return VectorFieldJet(comps)


def _b_primitive_frame(zi):
    def prim(frame, tol=None):
        return b_primitive(BForm(frame, zi)).frame
    return prim


def b_frame_basis(C, zi):
    """Linear map ``S`` preserving ``z`` with ``S^T C S`` the standard frame matrix.

    ``C`` is the frame matrix at 0.  The ``z`` column of ``S`` is ``e_z``;
    the ``t`` vector pairs with ``dz/z`` and the rest is a symplectic basis
    of the kernel of ``C(e_z, .)``.
    """
    n = len(C)
    C = as_fraction_matrix(C)
    rest = [k for k in range(n) if k != zi]
    w = {k: C[zi][k] for k in rest if C[zi][k] != 0}
    if not w:
        raise DegenerateFormError("dz/z pairs with nothing: the b-form is degenerate")
    piv = next(iter(w))
    f0 = [Fraction(0)] * n
    f0[piv] = 1 / w[piv]
    kernel = []
    for k in rest:
        if k == piv:
            continue
        v = [Fraction(0)] * n
        v[k] = Fraction(1)
        v[piv] = -w.get(k, 0) / w[piv]
        kernel.append(v)

    def B(a, b):
        return sum(a[i] * C[i][j] * b[j] for i in range(n) for j in range(n) if C[i][j] != 0)

    Ck = [[B(a, b) for b in kernel] for a in kernel]
    T = symplectic_basis(Ck) if kernel else []
    basis = [[sum(T[r][c] * kernel[r][i] for r in range(len(kernel))) for i in range(n)]
             for c in range(len(kernel))]
    f = list(f0)
    for i in range(0, len(basis), 2):
        e, g = basis[i], basis[i + 1]
        a, b = -B(f0, g), B(f0, e)
        f = [f[j] + a * e[j] + b * g[j] for j in range(n)]
    cols = {zi: [Fraction(int(j == zi)) for j in range(n)]}
    slots = [k for k in range(n) if k != zi]
    ti = slots.pop()  # standard layout: t is the last variable
    cols[ti] = f
    for s, v in zip(slots, basis):
        cols[s] = v
    S = [[cols[c][r] for c in range(n)] for r in range(n)]
    return S


def _b_report(omega, m, target):
    pulled = b_pullback(omega, m)
    return (pulled - target).truncate(min(target.order, pulled.order)).max_abs()


def _internal_order(omega, order):
    if order is None:
        order = omega.order - 1
    if omega.order < order + 1:
        raise ValueError(f"b-Darboux to order {order} needs the form to order {order + 1}; "
                         "one order is used up by the logarithmic derivative of the z-component")
    return order


def _b_moser_flow(omega, target, order):
    zi = omega.zi
    data = moser_field(target.frame, omega.frame, primitive=_b_primitive_frame(zi))
    X = _from_frame_field(data.field, zi)
    phi = formal_flow(X, order + 2, nilpotent_ok=True)
    _check_b_map(phi, zi)
    return phi, data


def b_darboux(omega, order=None):
    """Map ``m`` preserving ``{z = 0}`` with ``b_pullback(omega, m)`` standard to ``order``.

    Parameters
    ----------
    omega : BForm
        Closed b-nondegenerate 2-form with ``z`` the second-to-last variable,
        known to order ``order + 1`` (default ``omega.order - 1``).

    Returns
    -------
    m : PolyMap
        New coordinates to old ones, of order ``order + 2``.
    report : DarbouxReport
    """
    order = _internal_order(omega, order)
    omega = omega.truncate(order + 1)
    zi = omega.zi
    n = omega.nvars
    if b_d(omega).max_abs() != 0:
        raise NotClosedError("b-form is not closed")
    if not b_nondegenerate(omega):
        raise DegenerateFormError("b-form is degenerate at the origin")
    S = b_frame_basis(omega.frame.constant_matrix(), zi)
    Smap = PolyMap.linear(S, order + 2)
    omega_s = b_pullback(omega, Smap).truncate(order + 1)
    target = standard_b_form(n, order + 1, zi)
    phi, _ = _b_moser_flow(omega_s, target, order)
    m = Smap.compose(phi)
    _check_b_map(m, zi)
    res = _b_report(omega, m, target.truncate(order))
    return m, DarbouxReport(res, details={"linear": S, "order": order})


def check_b_invariant(omega, A):
    """Max coefficient of the b-Lie derivatives of ``omega`` along ``x -> A_i x``."""
    mats = A.matrices if isinstance(A, LinearPart) else A
    worst = 0
    for M in mats:
        xb = frame_components(VectorFieldJet.from_matrix(M, omega.order + 1), omega.zi)
        worst = max(worst, b_lie_derivative(xb, omega).truncate(omega.order - 1).max_abs())
    return worst


def equivariant_b_darboux(omega, A, order=None):
    """b-Darboux map commuting with a linear action that fixes the function ``z``.

    The generators must have a zero ``z`` row (so ``z`` is invariant and
    ``{z = 0}`` is preserved), must preserve ``omega``, and ``omega(0)``
    must already be the standard frame matrix.
    """
    mats = A.matrices if isinstance(A, LinearPart) else A
    order = _internal_order(omega, order)
    omega = omega.truncate(order + 1)
    zi, n = omega.zi, omega.nvars
    for M in mats:
        if any(v != 0 for v in M[zi]):
            raise NotEquivariantError("the action must leave the z coordinate invariant")
    target = standard_b_form(n, order + 1, zi)
    if omega.frame.constant_matrix() != target.frame.constant_matrix():
        raise NormalizeFirstError("the b-form at the origin is not the standard one")
    if b_d(omega).max_abs() != 0:
        raise NotClosedError("b-form is not closed")
    inv = check_b_invariant(omega, mats)
    if inv != 0:
        raise NotEquivariantError(f"b-form is not invariant (residual {inv})")
    phi, data = _b_moser_flow(omega, target, order)
    res = _b_report(omega, phi, target.truncate(order))
    return phi, DarbouxReport(res, commutes_with_linear(phi, mats), {"order": order})


# -- bivectors ------------------------------------------------------------------
class BivectorJet:
    """Antisymmetric ``Pi^{ij}`` with jet entries, stored for ``i < j``."""

    def __init__(self, nvars, entries=None, order=None):
        self.nvars = nvars
        ents = {}
        for (i, j), c in (entries or {}).items():
            if i == j:
                if not c.is_zero():
                    raise ValueError("diagonal entries of a bivector must vanish")
                continue
            if i > j:
                i, j, c = j, i, -c
            ents[(i, j)] = ents[(i, j)] + c if (i, j) in ents else c
        if order is None:
            order = min((c.order for c in ents.values()), default=0)
        self.order = order
        self.entries = {k: c.truncate(order) for k, c in ents.items()
                        if not c.truncate(order).is_zero()}

    @classmethod
    def from_matrix(cls, P, order=None):
        n = len(P)
        return cls(n, {(i, j): P[i][j] for i in range(n) for j in range(i + 1, n)}, order)

    @classmethod
    def constant(cls, nvars, entries, order):
        return cls(nvars, {k: Jet.constant(nvars, order, Fraction(v)) for k, v in entries.items()},
                   order)

    def __getitem__(self, ij):
        i, j = ij
        if i == j:
            return Jet.zero(self.nvars, self.order)
        if i < j:
            return self.entries.get((i, j), Jet.zero(self.nvars, self.order))
        return -self[j, i]

    def to_matrix(self):
        return [[self[i, j] for j in range(self.nvars)] for i in range(self.nvars)]

    def constant_matrix(self):
        return [[self[i, j].constant_term() for j in range(self.nvars)] for i in range(self.nvars)]

    def __add__(self, other):
        ents = dict(self.entries)
        for k, c in other.entries.items():
            ents[k] = ents[k] + c if k in ents else c
        return BivectorJet(self.nvars, ents, min(self.order, other.order))

    def __neg__(self):
        return BivectorJet(self.nvars, {k: -c for k, c in self.entries.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, BivectorJet) and (self - other).is_zero()

    def __repr__(self):
        return f"BivectorJet({self.to_triples()})"

    def truncate(self, order):
        return BivectorJet(self.nvars, self.entries, min(order, self.order))

    def with_order(self, order):
        return BivectorJet(self.nvars, {k: c.with_order(order) for k, c in self.entries.items()},
                           order)

    def homogeneous(self, d):
        return BivectorJet(self.nvars, {k: c.homogeneous(d) for k, c in self.entries.items()},
                           self.order)

    def is_zero(self):
        return all(c.is_zero() for c in self.entries.values())

    def max_abs(self):
        return max((c.max_abs() for c in self.entries.values()), default=0)

    def agrees(self, other, order=None):
        order = min(self.order, other.order) if order is None else order
        return (self.truncate(order) - other.truncate(order)).is_zero()

    def to_triples(self, names=None):
        return [(i, j, c.to_str(names)) for (i, j), c in sorted(self.entries.items())]


def poisson_bracket(P, f, g):
    """``{f, g} = sum Pi^{ij} d_i f d_j g``."""
    acc = None
    for (i, j), c in P.entries.items():
        term = c * (f.diff(i) * g.diff(j) - f.diff(j) * g.diff(i))
        acc = term if acc is None else acc + term
    return acc if acc is not None else Jet.zero(P.nvars, P.order)


def schouten_square(P):
    """Components ``[Pi, Pi]^{ijk}`` for ``i < j < k``."""
    n = P.nvars
    M = P.to_matrix()
    D = {}

    def d(l, a, b):
        key = (l, a, b)
        if key not in D:
            D[key] = M[a][b].diff(l)
        return D[key]

    out = {}
    for i, j, k in combinations(range(n), 3):
        acc = Jet.zero(n, P.order - 1)
        for l in range(n):
            for a, b, c in ((i, j, k), (j, k, i), (k, i, j)):
                if M[l][a].is_zero():
                    continue
                dd = d(l, b, c)
                if not dd.is_zero():
                    acc = acc + M[l][a] * dd
        out[(i, j, k)] = acc.scale(2)
    return out


def check_poisson(P):
    """Max coefficient of the Schouten square."""
    return max((c.max_abs() for c in schouten_square(P).values()), default=0)


def bivector_pushforward(P, m, minv=None, order=None):
    """``(Dm . Pi . Dm^T) o m^{-1}``: the bivector in the new coordinates ``y = m(x)``.

    ``order`` caps the precision of intermediate products when only a
    lower order is needed.
    """
    n = P.nvars
    J = m.jacobian()
    M = P.to_matrix()
    minv = m.inverse() if minv is None else minv
    sub = Substitution(minv.components)
    JM = [[_dot([J[i][k] for k in range(n)], [M[k][j] for k in range(n)], order)
           for j in range(n)] for i in range(n)]
    ents = {}
    for i in range(n):
        for j in range(i + 1, n):
            c = _dot(JM[i], J[j], order)
            ents[(i, j)] = sub.apply(c)
    return BivectorJet(n, ents, min(c.order for c in ents.values()))


def _dot(a, b, cap=None):
    acc = None
    for x, y in zip(a, b):
        if x.is_zero() or y.is_zero():
            continue
        if cap is None:
            t = x * y
        else:
            t = x.mul_trunc(y, min(cap, x.order + y.valuation(), y.order + x.valuation()))
        acc = t if acc is None else acc + t
    if acc is None:
        order = min(min(x.order + y.valuation(), y.order + x.valuation()) for x, y in zip(a, b))
        if cap is not None:
            order = min(order, cap)
        return Jet.zero(a[0].nvars, order)
    return acc


def _jet_matrix_inverse(M):
    """Inverse of a matrix of jets with invertible constant part (Neumann series)."""
    n = len(M)
    C = [[M[i][j].constant_term() for j in range(n)] for i in range(n)]
    Cinv = inverse(as_fraction_matrix(C))
    order = min(c.order for row in M for c in row)
    E = [[M[i][j].high(1) for j in range(n)] for i in range(n)]
    cols = []
    for j in range(n):
        v = [Jet.constant(M[0][0].nvars, order, Cinv[i][j]) for i in range(n)]
        total = list(v)
        while not all(c.is_zero() for c in v):
            v = [-c.truncate(order) for c in _mat_apply(Cinv, _jetmat_apply(E, v))]
            total = [a + b for a, b in zip(total, v)]
        cols.append(total)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def b_form_to_bivector(omega):
    """Dual b-Poisson bivector: frame matrix ``-Omega^{-1}``, ``z``-row scaled by ``z``."""
    zi, n = omega.zi, omega.nvars
    P = _jet_matrix_inverse(omega.frame.to_matrix())
    z = Jet.variable(n, omega.order + 1, zi)
    ents = {}
    for i in range(n):
        for j in range(i + 1, n):
            c = -P[i][j]
            if zi in (i, j):
                c = (c * z).truncate(c.order)
            ents[(i, j)] = c
    return BivectorJet(n, ents, omega.order)


def bivector_to_b_form(P, zi):
    """Dual b-form of a b-Poisson bivector vanishing transversally on ``{z = 0}``."""
    n = P.nvars
    M = P.to_matrix()
    F = [[M[i][j].divide_by_variable(zi) if zi in (i, j) and i != j else M[i][j]
          for j in range(n)] for i in range(n)]
    order = min(c.order for row in F for c in row)
    F = [[c.truncate(order) for c in row] for row in F]
    Inv = _jet_matrix_inverse(F)
    terms = {(i, j): -Inv[i][j] for i in range(n) for j in range(i + 1, n)}
    return BForm(FormJet(n, 2, terms, order), zi)


# -- Weinstein splitting -------------------------------------------------------------
@dataclass
class SplitReport:
    """Outcome of :func:`weinstein_split`.

    ``rank`` is ``2k``; in the new coordinates the first ``2k`` variables
    form the symplectic block and the remaining ones are transverse.
    ``transverse`` maps index pairs ``(i, j)`` of transverse variables to
    the jets ``f_ij`` (functions of the transverse variables only).
    """

    rank: int
    transverse: dict
    linear: list
    residual: object
    commutation_residual: object = 0
    adapted_action: list = field(default_factory=list)

    @property
    def ok(self):
        return self.residual == 0 and self.commutation_residual == 0


_SPLIT_SOLVERS = {}


def _standard_block(n, k):
    P = [[Fraction(0)] * n for _ in range(n)]
    for i in range(k):
        P[2 * i][2 * i + 1] = Fraction(1)
        P[2 * i + 1][2 * i] = Fraction(-1)
    return P


def _split_solver(n, k, d):
    """System for ``h -> Dh P0 + P0 Dh^T`` on the rows that touch the symplectic block."""
    key = (n, k, d)
    hit = _SPLIT_SOLVERS.get(key)
    if hit is not None:
        return hit
    P0 = _standard_block(n, k)
    w = 2 * k
    cols = [(e, c) for e in monomials(n, d + 1) for c in range(n)]
    rows_index, rows = {}, []

    def row(a, b, e):
        rk = (a, b, e)
        r = rows_index.get(rk)
        if r is None:
            r = rows_index[rk] = len(rows)
            rows.append({})
        return rows[r]

    for col, (e, a) in enumerate(cols):
        # h = x^e in component a contributes d_c x^e * P0[c][b] to entry (a, b)
        # and P0[b][c] d_c x^e to entry (b, a)
        for c in range(w):
            if e[c] == 0:
                continue
            f = list(e)
            f[c] -= 1
            f = tuple(f)
            for b in range(w):
                v = P0[c][b]
                if v == 0 or b == a:
                    continue
                coef = v * e[c]
                i, j, s = (a, b, 1) if a < b else (b, a, -1)
                if i >= w and j >= w:
                    continue
                rw = row(i, j, f)
                rw[col] = rw.get(col, 0) + s * coef
    solver = SparseSolver(rows, len(cols))
    out = (solver, rows_index, cols)
    _SPLIT_SOLVERS[key] = out
    return out


def _adapted_basis(P0, mats):
    """Linear coordinates ``y = L x`` with ``L P0 L^T`` the standard block.

    The complement of the image of ``P0`` is the kernel of an invariant
    projector when generators are given, otherwise a coordinate complement.
    """
    n = len(P0)
    P0 = as_fraction_matrix(P0)
    cols_img = _column_basis(P0)
    rank = len(cols_img)
    if P0 == _standard_block(n, rank // 2) and all(
            M[i][j] == 0 for M in mats for i in range(n) for j in range(n)
            if (i < rank) != (j < rank)):
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)], rank
    if mats:
        Q = _projector_onto(cols_img, n)
        Qf = invariant_projection(mats, VectorFieldJet.from_matrix(Q, 2)).linear_matrix()
        Q = [[Fraction(v) for v in row] for row in Qf]
        comp = _kernel_basis(Q)
    else:
        comp = _coordinate_complement(cols_img, n)
    B = [[v[i] for v in cols_img + comp] for i in range(n)]
    Binv = inverse(B)
    Py = _mm(_mm(Binv, P0), _tr(Binv))
    PW = [row[:rank] for row in Py[:rank]]
    T = symplectic_basis(PW) if rank else []
    # new coordinates on the block: M with M PW M^T standard, M = T^T
    L = [[Fraction(0)] * n for _ in range(n)]
    for i in range(rank):
        for j in range(rank):
            L[i][j] = T[j][i]
    for i in range(rank, n):
        L[i][i] = Fraction(1)
    return _mm(L, Binv), rank


def _mm(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))]
            for i in range(len(A))]


def _tr(A):
    return [list(r) for r in zip(*A)]


def _column_basis(M):
    n = len(M)
    basis = []
    for j in range(n):
        col = [M[i][j] for i in range(n)]
        if matrix_rank(as_fraction_matrix(basis + [col])) > len(basis):
            basis.append(col)
    return basis


def _coordinate_complement(basis, n):
    out = []
    for i in range(n):
        e = [Fraction(int(j == i)) for j in range(n)]
        if matrix_rank(as_fraction_matrix(basis + out + [e])) > len(basis) + len(out):
            out.append(e)
    return out


def _projector_onto(basis, n):
    """Projector with image ``span(basis)`` along a coordinate complement."""
    comp = _coordinate_complement(basis, n)
    B = [[v[i] for v in basis + comp] for i in range(n)]
    D = [[Fraction(int(i == j and i < len(basis))) for j in range(n)] for i in range(n)]
    return _mm(_mm(B, D), inverse(B))


def _kernel_basis(M):
    from .linalg import nullspace
    return [[Fraction(v) for v in vec] for vec in nullspace(M)]


def _split_residual(P, rank):
    """Largest coefficient violating the split form."""
    n = P.nvars
    worst = 0
    std = _standard_block(n, rank // 2)
    for i in range(n):
        for j in range(i + 1, n):
            c = P[i, j]
            if j < rank:
                c = c - Jet.constant(n, P.order, std[i][j])
            elif i >= rank:
                # transverse entries: no block variables, no constant term
                c = Jet(n, c.order, {e: v for e, v in c.coeffs.items()
                                     if sum(e) == 0 or any(e[:rank])})
            worst = max(worst, c.max_abs())
    return worst


def weinstein_split(P, order=None, A=None):
    """Formal splitting of a Poisson bivector at a point.

    Returns ``m`` such that ``bivector_pushforward(P, m)`` is
    ``sum d/dx_i ^ d/dy_i + sum f_ij d/dz_i ^ d/dz_j`` to ``order`` with
    ``f_ij`` depending only on the ``z`` variables and ``f_ij(0) = 0``.

    A linear adapted frame comes first.  Then, degree by degree, a
    correction ``y = x + h`` with ``h`` homogeneous solves the linearized
    equation ``Dh P0 + P0 Dh^T = -Pi_d`` on every entry touching the
    symplectic block; transverse entries are left alone.  With generators
    ``A`` each correction is replaced by its invariant projection, so the
    nonlinear part commutes with the adapted linear action.
    """
    mats = (A.matrices if isinstance(A, LinearPart) else A) or []
    order = P.order if order is None else min(order, P.order)
    P = P.truncate(order)
    n = P.nvars
    jac = check_poisson(P)
    if jac != 0:
        raise NotPoissonError(f"Schouten square does not vanish (residual {jac})")
    if mats:
        for M in mats:
            xi = VectorFieldJet.from_matrix(M, order + 1)
            if not _lie_bivector(xi, P).truncate(order - 1).is_zero():
                raise NotEquivariantError("the linear action does not preserve the bivector")
    L, rank = _adapted_basis(P.constant_matrix(), mats)
    Lmap = PolyMap.linear(L, order + 1)
    cur = bivector_pushforward(P, Lmap, order=order).truncate(order)
    Linv = inverse(L)
    adapted = [_mm(_mm(L, as_fraction_matrix(M)), Linv) for M in mats]
    k = rank // 2
    m = PolyMap.identity(n, order + 1)
    for d in range(1, order + 1):
        piece = cur.homogeneous(d)
        solver, rows_index, cols = _split_solver(n, k, d)
        b = {}
        for (i, j), c in piece.entries.items():
            if i >= rank and j >= rank:
                continue
            for e, v in c.coeffs.items():
                r = rows_index.get((i, j, e))
                if r is None:
                    raise SplitFailure("term outside the image of the splitting operator", d)
                b[r] = -v
        if not b:
            continue
        if not solver.is_consistent(b):
            raise SplitFailure("splitting equation is inconsistent", d)
        x = solver.solve_min_norm(b)
        comps = [dict() for _ in range(n)]
        for col, v in x.items():
            e, c = cols[col]
            comps[c][e] = v
        h = VectorFieldJet([Jet(n, d + 1, cs) for cs in comps], d + 1)
        if adapted:
            h = invariant_projection(adapted, h)
        phi = PolyMap([Jet.variable(n, order + 1, i) + h[i].with_order(order + 1)
                       for i in range(n)], order + 1)
        cur = bivector_pushforward(cur, phi, order=order).truncate(order)
        m = phi.compose(m)
    res = _split_residual(cur, rank)
    if res != 0:
        raise SplitFailure(f"split form not reached (residual {res})", order)
    total = m.compose(Lmap)
    transverse = {(i, j): c for (i, j), c in cur.entries.items() if i >= rank}
    comm = commutes_with_linear(m, adapted) if adapted else 0
    return total, SplitReport(rank, transverse, L, res, comm, adapted)


def _lie_bivector(xi, P):
    """``L_xi Pi`` componentwise: ``xi(Pi^{ij}) - Pi^{kj} d_k xi^i - Pi^{ik} d_k xi^j``."""
    n = P.nvars
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            acc = xi.apply(P[i, j])
            for kk in range(n):
                a = xi[i].diff(kk)
                if not a.is_zero():
                    acc = acc - P[kk, j] * a
                b = xi[j].diff(kk)
                if not b.is_zero():
                    acc = acc - P[i, kk] * b
            out[(i, j)] = acc
    return BivectorJet(n, out, min(c.order for c in out.values()))
