"""Differential forms with jet coefficients and their exterior calculus.

A k-form is stored as ``{(i1 < ... < ik): coefficient jet}``.  All
coefficients share one ``order``.  Orders follow the jet precision rules:
``d`` lowers the order by one, the radial homotopy operator raises it by
one, products and pullbacks take the honest minimum.
"""
from fractions import Fraction

from .jet import DimensionError, Jet, Substitution


class NotClosedError(ValueError):
    """The homotopy operator was applied to a form that is not closed."""


def _sort_sign(idx):
    """Sorted index tuple and permutation sign, or ``(None, 0)`` on repeats."""
    idx = list(idx)
    if len(set(idx)) != len(idx):
        return None, 0
    sign = 1
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return tuple(idx), sign


def _min_val(jets, order):
    return min((j.valuation() for j in jets), default=order + 1)


class FormJet:
    """A differential k-form on R^n with jet coefficients of a common order."""

    def __init__(self, nvars, degree, terms=None, order=None):
        self.nvars = nvars
        self.degree = degree
        if order is None:
            if not terms:
                raise ValueError("order is required for an empty form")
            order = min(c.order for c in terms.values())
        self.order = order
        acc = {}
        for idx, c in (terms or {}).items():
            if len(idx) != degree:
                raise DimensionError(f"index {idx} does not have length {degree}")
            if c.nvars != nvars:
                raise DimensionError("coefficient lives in the wrong number of variables")
            key, sign = _sort_sign(idx)
            if key is None or c.is_zero():
                continue
            c = c.truncate(order) if sign > 0 else -c.truncate(order)
            old = acc.get(key)
            acc[key] = c if old is None else old + c
        self.terms = {k: v for k, v in acc.items() if not v.is_zero()}

    # -- constructors ----------------------------------------------------------
    @classmethod
    def zero(cls, nvars, degree, order):
        return cls(nvars, degree, {}, order)

    @classmethod
    def function(cls, f):
        return cls(f.nvars, 0, {(): f}, f.order)

    @classmethod
    def dx(cls, nvars, i, order):
        return cls(nvars, 1, {(i,): Jet.constant(nvars, order, Fraction(1))}, order)

    @classmethod
    def constant(cls, nvars, entries, order):
        """Constant-coefficient form from ``{index tuple: scalar}``."""
        if not entries:
            raise ValueError("no entries given")
        k = len(next(iter(entries)))
        return cls(nvars, k, {idx: Jet.constant(nvars, order, c) for idx, c in entries.items()}, order)

    @classmethod
    def from_matrix(cls, M, order=None):
        """2-form ``sum_{i<j} M[i][j] dx_i ^ dx_j`` from an antisymmetric matrix of jets."""
        n = len(M)
        terms = {(i, j): M[i][j] for i in range(n) for j in range(i + 1, n)}
        return cls(n, 2, terms, order if order is not None else min(M[i][j].order for i, j in terms))

    # -- basics ------------------------------------------------------------------
    def coefficient(self, idx):
        key, sign = _sort_sign(idx)
        c = self.terms.get(key)
        if c is None:
            return Jet.zero(self.nvars, self.order)
        return c if sign > 0 else -c

    def is_zero(self):
        return not self.terms

    def max_abs(self):
        return max((c.max_abs() for c in self.terms.values()), default=0)

    def valuation(self):
        return _min_val(self.terms.values(), self.order)

    def __eq__(self, other):
        return (isinstance(other, FormJet) and self.degree == other.degree
                and self.order == other.order and self.terms == other.terms)

    def __repr__(self):
        body = ", ".join(f"{k}: {v.to_str()}" for k, v in sorted(self.terms.items()))
        return f"FormJet(k={self.degree}, order={self.order}, {{{body}}})"

    def _like(self, other):
        if self.nvars != other.nvars or self.degree != other.degree:
            raise DimensionError("forms differ in dimension or degree")

    def __add__(self, other):
        self._like(other)
        order = min(self.order, other.order)
        terms = {k: v.truncate(order) for k, v in self.terms.items()}
        for k, v in other.terms.items():
            v = v.truncate(order)
            terms[k] = terms[k] + v if k in terms else v
        return FormJet(self.nvars, self.degree, terms, order)

    def __neg__(self):
        return FormJet(self.nvars, self.degree, {k: -v for k, v in self.terms.items()}, self.order)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return FormJet(self.nvars, self.degree, {k: v.scale(c) for k, v in self.terms.items()},
                       self.order)

    def times(self, f):
        """Multiply by a function jet."""
        order = min(self.order + f.valuation(), f.order + self.valuation())
        return FormJet(self.nvars, self.degree,
                       {k: f.mul_trunc(v, order) for k, v in self.terms.items()}, order)

    def truncate(self, order):
        return FormJet(self.nvars, self.degree, self.terms, min(order, self.order))

    def with_order(self, order):
        return FormJet(self.nvars, self.degree,
                       {k: v.with_order(order) for k, v in self.terms.items()}, order)

    def homogeneous(self, d):
        """Part whose coefficients are homogeneous of polynomial degree ``d``."""
        return FormJet(self.nvars, self.degree,
                       {k: v.homogeneous(d) for k, v in self.terms.items()}, self.order)

    def high(self, d):
        return FormJet(self.nvars, self.degree,
                       {k: v.high(d) for k, v in self.terms.items()}, self.order)

    def constant_part(self):
        return self.homogeneous(0)

    def agrees(self, other, order=None):
        if order is None:
            order = min(self.order, other.order)
        return (self - other).truncate(order).is_zero()

    def map_coeffs(self, f):
        return FormJet(self.nvars, self.degree,
                       {k: v.map_coeffs(f) for k, v in self.terms.items()}, self.order)

    def to_matrix(self):
        """Antisymmetric matrix of coefficient jets of a 2-form."""
        if self.degree != 2:
            raise ValueError("only 2-forms have a matrix")
        n = self.nvars
        M = [[Jet.zero(n, self.order) for _ in range(n)] for _ in range(n)]
        for (i, j), c in self.terms.items():
            M[i][j] = c
            M[j][i] = -c
        return M

    def constant_matrix(self):
        return [[c.constant_term() for c in row] for row in self.to_matrix()]

    def to_entries(self, names=None):
        return [[list(k), v.to_str(names)] for k, v in sorted(self.terms.items())]


def exterior_d(eta):
    """Exterior derivative; ``d`` of a k-form with k == nvars is the zero form."""
    n = eta.nvars
    out = {}
    for idx, c in eta.terms.items():
        for j in range(n):
            if j in idx:
                continue
            dc = c.diff(j)
            if dc.is_zero():
                continue
            key, sign = _sort_sign((j,) + idx)
            term = dc if sign > 0 else -dc
            out[key] = out[key] + term if key in out else term
    return FormJet(n, eta.degree + 1, out, eta.order - 1)


def wedge(a, b):
    if a.nvars != b.nvars:
        raise DimensionError("forms live on different spaces")
    order = min(a.order + b.valuation(), b.order + a.valuation())
    out = {}
    for ia, ca in a.terms.items():
        for ib, cb in b.terms.items():
            key, sign = _sort_sign(ia + ib)
            if key is None:
                continue
            prod = ca.mul_trunc(cb, order)
            if sign < 0:
                prod = -prod
            out[key] = out[key] + prod if key in out else prod
    return FormJet(a.nvars, a.degree + b.degree, out, order)


def interior(v, eta):
    """Contraction ``i_v eta``; the zero form when ``eta`` has degree 0."""
    n = eta.nvars
    if v.nvars != n:
        raise DimensionError("vector field and form live on different spaces")
    vval = v.valuation()
    order = min(v.order + eta.valuation(), eta.order + vval)
    if eta.degree == 0:
        return FormJet(n, 0, {}, order)
    out = {}
    for idx, c in eta.terms.items():
        for r, i in enumerate(idx):
            vi = v[i]
            if vi.is_zero():
                continue
            prod = vi.mul_trunc(c, order)
            if r % 2:
                prod = -prod
            key = idx[:r] + idx[r + 1:]
            out[key] = out[key] + prod if key in out else prod
    return FormJet(n, eta.degree - 1, out, order)


def lie_derivative(v, eta):
    """Cartan's formula ``L_v = i_v d + d i_v``."""
    first = interior(v, exterior_d(eta))
    if eta.degree == 0:
        return first
    return first + exterior_d(interior(v, eta))


def pullback(eta, m):
    """Pullback ``m^* eta`` along a map fixing the origin."""
    if len(m.components) != eta.nvars:
        raise DimensionError("map target dimension does not match the form")
    n = m.nvars
    sub = Substitution(m.components)
    J = m.jacobian()
    dm = [FormJet(n, 1, {(j,): J[i][j] for j in range(n)}, m.order - 1)
          for i in range(eta.nvars)]
    total = None
    for idx, c in eta.terms.items():
        piece = FormJet.function(sub.apply(c))
        for i in idx:
            piece = wedge(piece, dm[i])
        total = piece if total is None else total + piece
    if total is None:
        return FormJet(n, eta.degree, {}, eta.order)
    return total


def poincare_primitive(eta, tol=None):
    """Radial homotopy operator: a primitive ``H(eta)`` with ``d H(eta) = eta``.

    Each monomial ``x^a dx_I`` (k = |I|) maps to
    ``x^a / (|a| + k) * sum_r (-1)^r x_{I_r} dx_{I minus I_r}``.
    Raises :class:`NotClosedError` unless ``d eta`` vanishes (exactly, or up
    to ``tol`` for float coefficients).
    """
    k = eta.degree
    if k < 1:
        raise ValueError("the homotopy operator needs a form of degree >= 1")
    residual = exterior_d(eta).max_abs()
    if (tol is None and residual != 0) or (tol is not None and residual > tol):
        raise NotClosedError(f"form is not closed (|d eta| = {residual})")
    n = eta.nvars
    order = eta.order + 1
    out = {}
    for idx, c in eta.terms.items():
        for exps, coef in c.coeffs.items():
            w = coef * Fraction(1, sum(exps) + k)
            for r, i in enumerate(idx):
                e = list(exps)
                e[i] += 1
                key = idx[:r] + idx[r + 1:]
                val = -w if r % 2 else w
                bucket = out.setdefault(key, {})
                e = tuple(e)
                s = bucket.get(e)
                bucket[e] = val if s is None else s + val
    terms = {key: Jet(n, order, coeffs) for key, coeffs in out.items()}
    return FormJet(n, k - 1, terms, order)


def standard_symplectic(npairs, order, nvars=None):
    """``sum_i dx_{2i} ^ dx_{2i+1}`` (pairs (x1, y1), (x2, y2), ...)."""
    n = nvars if nvars is not None else 2 * npairs
    return FormJet.constant(n, {(2 * i, 2 * i + 1): Fraction(1) for i in range(npairs)}, order)


def form_from_vector(components, order=None):
    """1-form ``sum_j a_j dx_j`` from a list of coefficient jets."""
    n = len(components)
    return FormJet(n, 1, {(j,): a for j, a in enumerate(components)},
                   order if order is not None else min(a.order for a in components))

