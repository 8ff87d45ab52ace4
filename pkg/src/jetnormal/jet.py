"""Truncated multivariate polynomials (jets), formal maps and vector fields.

A :class:`Jet` in ``n`` variables with ``order`` N is a polynomial of total
degree at most N, read as a germ known modulo terms of degree > N.  Products
track precision honestly: if ``a`` is known to order ``Na`` and starts in
degree ``va`` (likewise ``b``), then ``a*b`` is known to order
``min(Na + vb, Nb + va)`` and is returned at exactly that order.
Differentiation lowers the order by one.  The strict same-order arithmetic
of the public ``jet_arith`` entry point is layered on top of this.

Monomials are exponent tuples.  Canonical ordering is graded lexicographic
with ``x1 > x2 > ... > xn``.
"""
import re
from fractions import Fraction

import numpy as np

from .linalg import as_fraction_matrix, inverse

__all__ = [
    "DimensionError", "InvalidMapError", "NonInvertibleError",
    "Jet", "PolyMap", "VectorFieldJet", "monomials", "jet_arith",
    "jet_compose", "polymap_compose", "polymap_inverse", "parse_jet",
]


class DimensionError(ValueError):
    """Operands disagree in number of variables (or order, where required)."""


class InvalidMapError(ValueError):
    """A map used for substitution does not fix the origin."""


class NonInvertibleError(ValueError):
    """A map or matrix that must be invertible is singular."""


def monomials(nvars, degree):
    """Exponent tuples of total degree ``degree``, in graded-lex order."""
    if nvars == 0:
        return [()] if degree == 0 else []
    if nvars == 1:
        return [(degree,)]
    out = []
    for first in range(degree, -1, -1):
        for rest in monomials(nvars - 1, degree - first):
            out.append((first,) + rest)
    return out


def glex_key(exps):
    return (sum(exps), tuple(-e for e in exps))


def _terms(coeffs):
    """Terms as ``(degree, exps, coef)`` sorted by degree."""
    return sorted(((sum(k), k, v) for k, v in coeffs.items()), key=lambda t: t[0])


def _mul_terms(ta, tb, cap):
    out = {}
    if not ta or not tb:
        return out
    for da, ea, ca in ta:
        lim = cap - da
        if lim < tb[0][0]:
            break
        for db, eb, cb in tb:
            if db > lim:
                break
            key = tuple([x + y for x, y in zip(ea, eb)])
            prod = ca * cb
            old = out.get(key)
            out[key] = prod if old is None else old + prod
    return {k: v for k, v in out.items() if v != 0}


class Jet:
    """Truncated polynomial in ``nvars`` variables, known to total degree ``order``.

    Instances are immutable.  Coefficients may be :class:`fractions.Fraction`,
    ``int``, ``float`` or any scalar-like object (e.g. :class:`TPoly`).
    """

    __slots__ = ("nvars", "order", "coeffs", "_t")

    def __init__(self, nvars, order, coeffs=None):
        self.nvars = nvars
        self.order = order
        cs = {}
        if coeffs:
            for k, v in coeffs.items():
                k = tuple(k)
                if len(k) != nvars:
                    raise DimensionError(f"exponent {k} does not have {nvars} entries")
                if v != 0 and sum(k) <= order:
                    cs[k] = v
        self.coeffs = cs
        self._t = None

    @classmethod
    def _raw(cls, nvars, order, coeffs):
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.order = order
        obj.coeffs = coeffs
        obj._t = None
        return obj

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, nvars, order):
        return cls._raw(nvars, order, {})

    @classmethod
    def constant(cls, nvars, order, value):
        if value == 0:
            return cls.zero(nvars, order)
        return cls._raw(nvars, order, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars, order, i, coef=Fraction(1)):
        e = [0] * nvars
        e[i] = 1
        return cls._raw(nvars, order, {tuple(e): coef} if order >= 1 else {})

    @classmethod
    def monomial(cls, nvars, order, exps, coef=Fraction(1)):
        return cls(nvars, order, {tuple(exps): coef})

    # -- basic queries -------------------------------------------------------
    def terms(self):
        if self._t is None:
            self._t = _terms(self.coeffs)
        return self._t

    def valuation(self):
        """Lowest degree present; ``order + 1`` for the zero jet."""
        t = self.terms()
        return t[0][0] if t else self.order + 1

    def degree(self):
        t = self.terms()
        return t[-1][0] if t else -1

    def is_zero(self):
        return not self.coeffs

    def constant_term(self):
        return self.coeffs.get((0,) * self.nvars, 0)

    def coefficient(self, exps):
        return self.coeffs.get(tuple(exps), 0)

    def max_abs(self):
        return max((abs(v) for v in self.coeffs.values()), default=0)

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return (self.nvars == other.nvars and self.order == other.order
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.nvars, self.order, frozenset(self.coeffs.items())))

    def agrees(self, other, order=None):
        """Coefficient-wise equality up to ``order`` (default: the smaller order)."""
        if order is None:
            order = min(self.order, other.order)
        return (self - other).truncate(order).is_zero() if self.nvars == other.nvars else False

    def __repr__(self):
        return f"Jet({self.nvars}, {self.order}, {self.to_str()!r})"

    def __str__(self):
        return self.to_str()

    # -- truncation / grading ------------------------------------------------
    def truncate(self, order):
        """Drop terms above ``order`` (never raises the order)."""
        if order >= self.order:
            return self
        return Jet._raw(self.nvars, order,
                        {k: v for k, v in self.coeffs.items() if sum(k) <= order})

    def with_order(self, order):
        """Truncate or relabel to ``order``.

        Raising the order asserts that the missing coefficients are zero; use it
        only where that is known to be harmless (e.g. exact polynomials).
        """
        if order <= self.order:
            return self.truncate(order)
        return Jet._raw(self.nvars, order, self.coeffs)

    def homogeneous(self, d):
        return Jet._raw(self.nvars, self.order,
                        {k: v for k, v in self.coeffs.items() if sum(k) == d})

    def low(self, d):
        """Part of degree ``<= d`` (order unchanged)."""
        return Jet._raw(self.nvars, self.order,
                        {k: v for k, v in self.coeffs.items() if sum(k) <= d})

    def high(self, d):
        """Part of degree ``>= d`` (order unchanged)."""
        return Jet._raw(self.nvars, self.order,
                        {k: v for k, v in self.coeffs.items() if sum(k) >= d})

    def map_coeffs(self, f):
        return Jet(self.nvars, self.order, {k: f(v) for k, v in self.coeffs.items()})

    def embed(self, nvars, positions):
        """View as a jet in ``nvars`` variables; variable i goes to slot ``positions[i]``."""
        out = {}
        for k, v in self.coeffs.items():
            e = [0] * nvars
            for i, p in enumerate(positions):
                e[p] = k[i]
            out[tuple(e)] = v
        return Jet._raw(nvars, self.order, out)

    # -- arithmetic ----------------------------------------------------------
    def _check(self, other):
        if self.nvars != other.nvars:
            raise DimensionError(f"nvars mismatch: {self.nvars} vs {other.nvars}")

    def __add__(self, other):
        if not isinstance(other, Jet):
            other = Jet.constant(self.nvars, self.order, other)
        self._check(other)
        order = min(self.order, other.order)
        out = {k: v for k, v in self.coeffs.items() if sum(k) <= order} \
            if self.order > order else dict(self.coeffs)
        for k, v in other.coeffs.items():
            if other.order > order and sum(k) > order:
                continue
            s = out.get(k)
            s = v if s is None else s + v
            if s == 0:
                out.pop(k, None)
            else:
                out[k] = s
        return Jet._raw(self.nvars, order, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet._raw(self.nvars, self.order, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, Jet):
            other = Jet.constant(self.nvars, self.order, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        if c == 0:
            return Jet.zero(self.nvars, self.order)
        return Jet._raw(self.nvars, self.order,
                        {k: v * c for k, v in self.coeffs.items() if v * c != 0})

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return self.scale(other)
        self._check(other)
        order = min(self.order + other.valuation(), other.order + self.valuation())
        return self.mul_trunc(other, order)

    def __rmul__(self, other):
        return self.scale(other)

    def mul_trunc(self, other, order):
        """Product truncated at ``order`` with no precision bookkeeping."""
        return Jet._raw(self.nvars, order, _mul_terms(self.terms(), other.terms(), order))

    def __truediv__(self, c):
        if isinstance(c, Jet):
            raise TypeError("use Jet.reciprocal for division by a jet")
        if isinstance(c, int):
            c = Fraction(c)
        return self.scale(1 / c)

    def __pow__(self, k):
        out = Jet.constant(self.nvars, self.order, Fraction(1))
        for _ in range(k):
            out = out * self
        return out

    def reciprocal(self):
        """``1/f`` for a jet with invertible constant term."""
        c = self.constant_term()
        if c == 0:
            raise NonInvertibleError("constant term is zero")
        inv_c = 1 / c if not isinstance(c, int) else Fraction(1, c)
        u = (self.scale(inv_c) - 1)     # u has positive valuation
        out = Jet.constant(self.nvars, self.order, Fraction(1))
        term = out
        for _ in range(self.order):
            term = -(term * u).truncate(self.order)
            if term.is_zero():
                break
            out = out + term
        return out.scale(inv_c)

    # -- calculus --------------------------------------------------------------
    def diff(self, i):
        """Partial derivative in variable ``i``; the result has order ``order - 1``."""
        out = {}
        for k, v in self.coeffs.items():
            e = k[i]
            if e:
                kk = list(k)
                kk[i] = e - 1
                out[tuple(kk)] = v * e
        return Jet._raw(self.nvars, self.order - 1, out)

    def gradient(self):
        return [self.diff(i) for i in range(self.nvars)]

    def divide_by_variable(self, i):
        """Exact division by ``x_i``; raises if some monomial lacks ``x_i``."""
        out = {}
        for k, v in self.coeffs.items():
            if k[i] == 0:
                raise ValueError(f"jet is not divisible by variable {i}")
            kk = list(k)
            kk[i] -= 1
            out[tuple(kk)] = v
        return Jet._raw(self.nvars, self.order - 1, out)

    def substitute_zero(self, i):
        """Restrict to the hyperplane ``x_i = 0`` (same variable count)."""
        return Jet._raw(self.nvars, self.order,
                        {k: v for k, v in self.coeffs.items() if k[i] == 0})

    def evaluate(self, point):
        total = 0
        for k, v in self.coeffs.items():
            term = v
            for x, e in zip(point, k):
                if e == 1:
                    term = term * x
                elif e:
                    term = term * x ** e
            total = total + term
        return total

    def compose(self, maps):
        return Substitution(maps).apply(self)

    # -- text ------------------------------------------------------------------
    def to_str(self, names=None):
        return format_terms(self.coeffs, names or default_names(self.nvars))


def default_names(n):
    return [f"x{i + 1}" for i in range(n)]


def _coef_str(c):
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    if isinstance(c, float):
        return repr(c)
    return str(c)


def format_terms(coeffs, names):
    """Canonical text: ``coef*x1^a1*...`` terms in graded-lex order."""
    if not coeffs:
        return "0"
    parts = []
    for k in sorted(coeffs, key=glex_key):
        c = coeffs[k]
        neg = False
        try:
            neg = c < 0
        except TypeError:
            pass
        cs = _coef_str(-c if neg else c)
        mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, k) if e)
        body = f"{cs}*{mono}" if mono else cs
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+|\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def parse_jet(text, nvars, order, names=None):
    """Parse a polynomial string such as ``"x1^2 - 1/3*x1*x2 + 2"`` into a Jet.

    ``names`` lists the variable names (default ``x1..xn``).  Supports
    ``+ - * /`` (division by constants only), ``^``/``**`` with nonnegative
    integer exponents, parentheses and decimal or integer literals.
    """
    names = list(names or default_names(nvars))
    if len(names) != nvars:
        raise DimensionError("names do not match nvars")
    index = {n: i for i, n in enumerate(names)}
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse polynomial near {text[pos:pos + 10]!r}")
        num, name, op = m.groups()
        toks.append(("num", Fraction(num)) if num else ("name", name) if name else ("op", op))
        pos = m.end()
    toks.append(("end", None))
    i = 0

    def peek():
        return toks[i]

    def take():
        nonlocal i
        i += 1
        return toks[i - 1]

    def expr():
        acc = term()
        while peek() in (("op", "+"), ("op", "-")):
            op = take()[1]
            rhs = term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term():
        acc = unary()
        while peek() in (("op", "*"), ("op", "/")):
            op = take()[1]
            rhs = unary()
            if op == "*":
                acc = acc.mul_trunc(rhs, order)
            else:
                if rhs.degree() > 0 or rhs.is_zero():
                    raise ValueError("division is only allowed by nonzero constants")
                acc = acc / rhs.constant_term()
        return acc

    def unary():
        if peek() == ("op", "-"):
            take()
            return -unary()
        if peek() == ("op", "+"):
            take()
            return unary()
        return power()

    def power():
        base = atom()
        if peek() in (("op", "^"), ("op", "**")):
            take()
            kind, val = take()
            if kind != "num" or val.denominator != 1 or val < 0:
                raise ValueError("exponents must be nonnegative integers")
            out = Jet.constant(nvars, order, Fraction(1))
            for _ in range(int(val)):
                out = out.mul_trunc(base, order)
            return out
        return base

    def atom():
        kind, val = take()
        if kind == "num":
            return Jet.constant(nvars, order, val)
        if kind == "name":
            if val not in index:
                raise ValueError(f"unknown variable {val!r}")
            return Jet.variable(nvars, order, index[val])
        if (kind, val) == ("op", "("):
            out = expr()
            if take() != ("op", ")"):
                raise ValueError("unbalanced parentheses")
            return out
        raise ValueError(f"unexpected token {val!r}")

    out = expr()
    if peek()[0] != "end":
        raise ValueError(f"trailing input in polynomial {text!r}")
    return out


# ---------------------------------------------------------------------------
# substitution
# ---------------------------------------------------------------------------
class Substitution:
    """Substitute ``x_i -> maps[i]`` into jets, caching monomial powers.

    Every ``maps[i]`` must vanish at the origin.  The result of substituting
    into ``f`` is known to order ``min(f.order, M + v - 1)`` where ``M`` is the
    smallest map order and ``v`` the valuation of ``f - f(0)``.
    """

    def __init__(self, maps):
        maps = list(maps)
        if not maps:
            raise DimensionError("empty substitution")
        for m in maps:
            if m.constant_term() != 0:
                raise InvalidMapError("map component has a nonzero constant term")
        self.maps = maps
        self.src = len(maps)
        self.nvars = maps[0].nvars
        self.map_order = min(m.order for m in maps)
        self._cache = {}
        self._cap = None

    def _power(self, exps, cap):
        if cap != self._cap:
            self._cache = {}
            self._cap = cap
        hit = self._cache.get(exps)
        if hit is not None:
            return hit
        if not any(exps):
            out = {(0,) * self.nvars: Fraction(1)}
        else:
            i = next(j for j, e in enumerate(exps) if e)
            parent = list(exps)
            parent[i] -= 1
            base = self._power(tuple(parent), cap)
            out = _mul_terms(_terms(base), self.maps[i].terms(), cap)
        self._cache[exps] = out
        return out

    def target_order(self, f):
        v = min((d for d, _, _ in f.terms() if d > 0), default=None)
        if v is None:
            return f.order
        return min(f.order, self.map_order + v - 1)

    def apply(self, f, order=None):
        if f.nvars != self.src:
            raise DimensionError(f"jet has {f.nvars} variables, map provides {self.src}")
        if order is None:
            order = self.target_order(f)
        out = {}
        for d, k, c in f.terms():
            if d > order:
                break
            for kk, v in self._power(k, order).items():
                s = out.get(kk)
                out[kk] = c * v if s is None else s + c * v
        return Jet._raw(self.nvars, order, {k: v for k, v in out.items() if v != 0})


def jet_arith(a, b, op):
    """Strict jet arithmetic: ``op`` in {'add', 'sub', 'mul', 'scale'}.

    For ``scale`` the second argument is a scalar.  Otherwise both operands
    must share ``nvars`` and ``order``; the result is truncated at that order.
    """
    if op == "scale":
        return a.scale(b)
    if a.nvars != b.nvars or a.order != b.order:
        raise DimensionError(
            f"jet_arith needs matching nvars/order, got ({a.nvars},{a.order}) and ({b.nvars},{b.order})")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a.mul_trunc(b, a.order)
    raise ValueError(f"unknown op {op!r}")


def jet_compose(f, m):
    """``f o m`` for a Jet ``f`` and a PolyMap (or sequence of jets) ``m``."""
    comps = m.components if isinstance(m, PolyMap) else list(m)
    return Substitution(comps).apply(f)


# ---------------------------------------------------------------------------
# maps
# ---------------------------------------------------------------------------
def _common_order(jets, order=None):
    if order is None:
        order = min(j.order for j in jets)
    return tuple(j.truncate(order) for j in jets), order


class PolyMap:
    """Formal map germ ``R^n -> R^m`` fixing the origin, given by component jets."""

    def __init__(self, components, order=None):
        comps = list(components)
        if not comps:
            raise DimensionError("a map needs at least one component")
        n = comps[0].nvars
        if any(c.nvars != n for c in comps):
            raise DimensionError("components disagree in nvars")
        self.components, self.order = _common_order(comps, order)
        self.nvars = n
        self._inverse = None

    @classmethod
    def identity(cls, n, order):
        return cls([Jet.variable(n, order, i) for i in range(n)])

    @classmethod
    def linear(cls, A, order):
        n = len(A[0])
        comps = []
        for row in A:
            comps.append(Jet(n, order, {tuple(int(i == j) for i in range(n)): row[j]
                                         for j in range(n)}))
        return cls(comps, order)

    @property
    def identity_linear_part(self):
        n = self.nvars
        return self.linear_part() == [[int(i == j) for j in range(n)] for i in range(len(self.components))]

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __eq__(self, other):
        return isinstance(other, PolyMap) and self.components == other.components

    def __repr__(self):
        return f"PolyMap({[c.to_str() for c in self.components]}, order={self.order})"

    def linear_part(self):
        n = self.nvars
        A = []
        for c in self.components:
            row = []
            for j in range(n):
                e = [0] * n
                e[j] = 1
                row.append(c.coefficient(e))
            A.append(row)
        return A

    def jacobian(self):
        """Matrix of partial derivatives (rows: components)."""
        return [[c.diff(j) for j in range(self.nvars)] for c in self.components]

    def truncate(self, order):
        return PolyMap([c.truncate(order) for c in self.components])

    def with_order(self, order):
        return PolyMap([c.with_order(order) for c in self.components], order)

    def compose(self, inner):
        """``self o inner``."""
        return polymap_compose(self, inner)

    def inverse(self):
        if self._inverse is None:
            self._inverse = polymap_inverse(self)
        return self._inverse

    def evaluate(self, point):
        return [c.evaluate(point) for c in self.components]

    def agrees(self, other, order=None):
        return all(a.agrees(b, order) for a, b in zip(self.components, other.components))

    def max_abs(self):
        return max((c.max_abs() for c in self.components), default=0)

    def to_strs(self, names=None):
        return [c.to_str(names) for c in self.components]


def polymap_compose(m1, m2):
    """``m1 o m2``: substitute the components of ``m2`` into those of ``m1``."""
    sub = Substitution(m2.components)
    return PolyMap([sub.apply(c) for c in m1.components])


def _mat_vec(A, jets, order):
    n = len(jets)
    out = []
    for row in A:
        acc = Jet.zero(jets[0].nvars, order)
        for j in range(n):
            if row[j] != 0:
                acc = acc + jets[j].scale(row[j])
        out.append(acc)
    return out


def polymap_inverse(m):
    """Formal inverse of a map with invertible linear part.

    Writes ``m = L + N`` and iterates ``g <- L^{-1}(y - N(g))`` from
    ``g = L^{-1} y``; each pass fixes one more degree.
    """
    n = m.nvars
    if len(m.components) != n:
        raise DimensionError("only square maps can be inverted")
    L = m.linear_part()
    try:
        if any(isinstance(v, float) for row in L for v in row):
            Linv = _float_inverse(L)
        else:
            Linv = inverse(as_fraction_matrix(L))
    except (ZeroDivisionError, np.linalg.LinAlgError):
        raise NonInvertibleError("linear part of the map is singular") from None
    order = m.order
    nonlin = [c.high(2) for c in m.components]
    y = [Jet.variable(n, order, i) for i in range(n)]
    g = _mat_vec(Linv, y, order)
    for _ in range(max(order - 1, 0)):
        sub = Substitution(g)
        corr = [yi - sub.apply(ni, order) for yi, ni in zip(y, nonlin)]
        g_new = _mat_vec(Linv, corr, order)
        if all(a == b for a, b in zip(g, g_new)):
            break
        g = g_new
    return PolyMap(g, order)


def _float_inverse(L):
    return np.linalg.inv(np.array(L, dtype=float)).tolist()


# ---------------------------------------------------------------------------
# vector fields
# ---------------------------------------------------------------------------
class VectorFieldJet:
    """Polynomial vector field ``sum_i v^i d/dx_i`` with jet components."""

    def __init__(self, components, order=None):
        comps = list(components)
        if not comps:
            raise DimensionError("a vector field needs components")
        n = comps[0].nvars
        if len(comps) != n or any(c.nvars != n for c in comps):
            raise DimensionError("vector field components must be n jets in n variables")
        self.components, self.order = _common_order(comps, order)
        self.nvars = n

    @classmethod
    def zero(cls, n, order):
        return cls([Jet.zero(n, order) for _ in range(n)], order)

    @classmethod
    def from_matrix(cls, A, order):
        """Linear field ``x -> A x``."""
        return cls(PolyMap.linear(A, order).components, order)

    @classmethod
    def coordinate(cls, n, order, i):
        """Constant field ``d/dx_i``."""
        return cls([Jet.constant(n, order, Fraction(int(j == i))) for j in range(n)], order)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return self.nvars

    def __eq__(self, other):
        return isinstance(other, VectorFieldJet) and self.components == other.components

    def __repr__(self):
        return f"VectorFieldJet({[c.to_str() for c in self.components]}, order={self.order})"

    def __add__(self, other):
        return VectorFieldJet([a + b for a, b in zip(self, other)])

    def __sub__(self, other):
        return VectorFieldJet([a - b for a, b in zip(self, other)])

    def __neg__(self):
        return VectorFieldJet([-a for a in self])

    def scale(self, c):
        return VectorFieldJet([a.scale(c) for a in self], self.order)

    def times(self, f):
        """Multiply every component by the function jet ``f``."""
        return VectorFieldJet([f * a for a in self])

    def truncate(self, order):
        return VectorFieldJet([c.truncate(order) for c in self])

    def with_order(self, order):
        return VectorFieldJet([c.with_order(order) for c in self], order)

    def homogeneous(self, d):
        return VectorFieldJet([c.homogeneous(d) for c in self], self.order)

    def high(self, d):
        return VectorFieldJet([c.high(d) for c in self], self.order)

    def is_zero(self):
        return all(c.is_zero() for c in self)

    def max_abs(self):
        return max((c.max_abs() for c in self), default=0)

    def vanishes_at_origin(self):
        return all(c.constant_term() == 0 for c in self)

    def valuation(self):
        return min(c.valuation() for c in self)

    def is_linear(self, order=None):
        """All terms of degree != 1 vanish (up to ``order``)."""
        order = self.order if order is None else order
        return all(sum(k) == 1 for c in self for k in c.truncate(order).coeffs)

    def linear_matrix(self):
        return PolyMap(self.components, self.order).linear_part()

    def apply(self, f):
        """Directional derivative ``v(f) = sum_j v^j df/dx_j``."""
        acc = None
        for j, vj in enumerate(self.components):
            term = vj * f.diff(j)
            acc = term if acc is None else acc + term
        return acc

    def bracket(self, other):
        return bracket_vf(self, other)

    def evaluate(self, point):
        return [c.evaluate(point) for c in self]

    def pushforward(self, m, minv=None):
        """Pushforward by the coordinate change ``y = m(x)``.

        ``(m_* v)(y) = Dm(x) v(x)`` at ``x = m^{-1}(y)``.
        """
        if minv is None:
            minv = m.inverse()
        J = m.jacobian()
        n = self.nvars
        raw = []
        for i in range(n):
            acc = None
            for j in range(n):
                if J[i][j].is_zero() and self[j].is_zero():
                    continue
                term = J[i][j] * self[j]
                acc = term if acc is None else acc + term
            raw.append(acc if acc is not None else Jet.zero(n, self.order))
        sub = Substitution(minv.components)
        return VectorFieldJet([sub.apply(r) for r in raw])

    def to_strs(self, names=None):
        return [c.to_str(names) for c in self]


def bracket_vf(v, w):
    """Lie bracket ``[v, w]^i = sum_j (v^j d_j w^i - w^j d_j v^i)``."""
    if v.nvars != w.nvars:
        raise DimensionError("vector fields live on different spaces")
    return VectorFieldJet([v.apply(wi) - w.apply(vi) for vi, wi in zip(v, w)])
