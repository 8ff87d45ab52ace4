"""Closed-form expression fields, including a flat (non-analytic) primitive.

Expressions are small immutable trees built from :class:`Const`, :class:`Var`,
sums, products, quotients, integer powers and :class:`Flat`, with

    flat(s) = exp(-1/s) for s > 0,  0 for s <= 0.

Evaluation is vectorized over points with numpy.  A product containing a
``Flat`` factor whose argument is ``<= 0`` evaluates to exactly 0, even when
another factor is singular there (e.g. a ``1/r^2`` next to a flat factor
that already vanishes).  Any other division by zero raises
:class:`SingularityError`.
"""
import math

import numpy as np

from .cotangent import numeric_rank


class SingularityError(ZeroDivisionError):
    """Evaluation hit the singular locus of a quotient."""


# -- expression nodes -------------------------------------------------------------
class Expr:
    """Base class; subclasses implement ``_eval``, ``diff`` and ``__str__``."""

    def __add__(self, other):
        return add(self, _wrap(other))

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, mul(Const(-1), _wrap(other)))

    def __rsub__(self, other):
        return add(_wrap(other), mul(Const(-1), self))

    def __neg__(self):
        return mul(Const(-1), self)

    def __mul__(self, other):
        return mul(self, _wrap(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return Div(self, _wrap(other))

    def __rtruediv__(self, other):
        return Div(_wrap(other), self)

    def __pow__(self, k):
        return power(self, int(k))

    def __call__(self, *coords):
        """Evaluate at one point; raises :class:`SingularityError` on a pole."""
        out = self.evaluate(np.asarray(coords, dtype=float).reshape(-1, 1))
        return float(out[0])

    def evaluate(self, X):
        """Values at the columns of ``X`` (shape ``(nvars, npoints)``)."""
        val = self._eval(np.asarray(X, dtype=float))
        if np.any(np.isnan(val)):
            raise SingularityError(f"{self} is singular at some evaluation point")
        return val

    def __repr__(self):
        return str(self)


def _wrap(v):
    return v if isinstance(v, Expr) else Const(v)


class Const(Expr):
    def __init__(self, value):
        self.value = float(value)

    def _eval(self, X):
        return np.full(X.shape[1], self.value)

    def diff(self, i):
        return ZERO

    def __str__(self):
        v = self.value
        return str(int(v)) if v == int(v) else repr(v)


ZERO = Const(0)
ONE = Const(1)


class Var(Expr):
    def __init__(self, index, name=None):
        self.index = index
        self.name = name or f"x{index + 1}"

    def _eval(self, X):
        return X[self.index]

    def diff(self, i):
        return ONE if i == self.index else ZERO

    def __str__(self):
        return self.name


class Add(Expr):
    def __init__(self, terms):
        self.terms = tuple(terms)

    def _eval(self, X):
        out = self.terms[0]._eval(X)
        for t in self.terms[1:]:
            out = out + t._eval(X)
        return out

    def diff(self, i):
        return add(*(t.diff(i) for t in self.terms))

    def __str__(self):
        return "(" + " + ".join(str(t) for t in self.terms) + ")"


class Mul(Expr):
    def __init__(self, factors):
        self.factors = tuple(factors)

    def _eval(self, X):
        flat_zero = np.zeros(X.shape[1], dtype=bool)
        for f in self.factors:
            if isinstance(f, Flat):
                flat_zero |= f.arg._eval(X) <= 0
        with np.errstate(all="ignore"):
            out = np.ones(X.shape[1])
            for f in self.factors:
                out = out * f._eval(X)
        return np.where(flat_zero, 0.0, out)

    def diff(self, i):
        terms = []
        for k, f in enumerate(self.factors):
            df = f.diff(i)
            if df is ZERO:
                continue
            terms.append(mul(*self.factors[:k], df, *self.factors[k + 1:]))
        return add(*terms)

    def __str__(self):
        return "*".join(str(f) for f in self.factors)


class Div(Expr):
    def __init__(self, num, den):
        self.num = num
        self.den = den

    def _eval(self, X):
        d = self.den._eval(X)
        n = self.num._eval(X)
        with np.errstate(all="ignore"):
            out = n / d
        return np.where(d == 0, np.nan, out)

    def diff(self, i):
        dn = self.num.diff(i)
        dd = self.den.diff(i)
        first = Div(dn, self.den) if dn is not ZERO else ZERO
        if dd is ZERO:
            return first
        second = mul(Const(-1), self.num, dd, Div(ONE, power(self.den, 2)))
        return add(first, second)

    def __str__(self):
        return f"({self.num})/({self.den})"


class Pow(Expr):
    def __init__(self, base, exponent):
        self.base = base
        self.exponent = exponent

    def _eval(self, X):
        b = self.base._eval(X)
        if self.exponent >= 0:
            return b ** self.exponent
        with np.errstate(all="ignore"):
            out = 1.0 / b ** (-self.exponent)
        return np.where(b == 0, np.nan, out)

    def diff(self, i):
        db = self.base.diff(i)
        if db is ZERO:
            return ZERO
        return mul(Const(self.exponent), power(self.base, self.exponent - 1), db)

    def __str__(self):
        return f"({self.base})^{self.exponent}"


class Flat(Expr):
    """``exp(-1/s)`` for ``s > 0`` and ``0`` otherwise; its derivative is ``flat(s)/s^2``."""

    def __init__(self, arg):
        self.arg = arg

    def _eval(self, X):
        s = self.arg._eval(X)
        out = np.zeros_like(s)
        pos = s > 0
        out[pos] = np.exp(-1.0 / s[pos])
        return out

    def diff(self, i):
        ds = self.arg.diff(i)
        if ds is ZERO:
            return ZERO
        return mul(self, power(self.arg, -2), ds)

    def __str__(self):
        return f"flat({self.arg})"


def add(*terms):
    flat = []
    const = 0.0
    for t in terms:
        if isinstance(t, Add):
            flat.extend(t.terms)
        elif isinstance(t, Const):
            const += t.value
        else:
            flat.append(t)
    if const != 0:
        flat.append(Const(const))
    if not flat:
        return ZERO
    return flat[0] if len(flat) == 1 else Add(flat)


def mul(*factors):
    flat = []
    const = 1.0
    for f in factors:
        if isinstance(f, Mul):
            for g in f.factors:
                if isinstance(g, Const):
                    const *= g.value
                else:
                    flat.append(g)
        elif isinstance(f, Const):
            const *= f.value
        else:
            flat.append(f)
    if const == 0:
        return ZERO
    if const != 1:
        flat.insert(0, Const(const))
    if not flat:
        return Const(const)
    return flat[0] if len(flat) == 1 else Mul(flat)


def power(base, k):
    if k == 0:
        return ONE
    if k == 1:
        return base
    if isinstance(base, Const):
        return Const(base.value ** k)
    return Pow(base, k)


def flat(s):
    """The flat function applied to an expression (or evaluated on a number)."""
    if isinstance(s, Expr):
        return Flat(s)
    return math.exp(-1.0 / s) if s > 0 else 0.0


# -- fields -----------------------------------------------------------------------
class ExprField:
    """Vector field with expression components; the jacobian is symbolic and cached."""

    def __init__(self, components, names=None):
        self.components = [_wrap(c) for c in components]
        self.nvars = len(self.components)
        self.names = names
        self._jac = None

    def __getitem__(self, i):
        return self.components[i]

    def __add__(self, other):
        return ExprField([a + b for a, b in zip(self.components, other.components)], self.names)

    def scaled(self, f):
        return ExprField([f * c for c in self.components], self.names)

    def jacobian_exprs(self):
        if self._jac is None:
            self._jac = [[c.diff(j) for j in range(self.nvars)] for c in self.components]
        return self._jac

    def eval_many(self, pts):
        """Values at many points, shape ``(npoints, nvars)``."""
        X = np.asarray(pts, dtype=float).T
        return np.stack([c.evaluate(X) for c in self.components], axis=1)

    def jacobian_many(self, pts):
        X = np.asarray(pts, dtype=float).T
        J = self.jacobian_exprs()
        return np.stack([np.stack([e.evaluate(X) for e in row], axis=1) for row in J], axis=1)

    def __str__(self):
        return "[" + ", ".join(str(c) for c in self.components) + "]"


def eval_field(F, pt):
    return F.eval_many([pt])[0]


def jacobian(F, pt):
    return F.jacobian_many([pt])[0]


def bracket_many(F, G, pts):
    """``[F, G] = DG . F - DF . G`` at many points, shape ``(npoints, n)``."""
    Fv, Gv = F.eval_many(pts), G.eval_many(pts)
    JF, JG = F.jacobian_many(pts), G.jacobian_many(pts)
    return np.einsum("pij,pj->pi", JG, Fv) - np.einsum("pij,pj->pi", JF, Gv)


def bracket_residual_numeric(fields, c, pts):
    """Max over points and pairs of ``|[F_i, F_j] - sum_k c_ij^k F_k|``."""
    d = len(fields)
    vals = [F.eval_many(pts) for F in fields]
    worst = 0.0
    for i in range(d):
        for j in range(i + 1, d):
            res = bracket_many(fields[i], fields[j], pts)
            for k in range(d):
                if c[i][j][k] != 0:
                    res = res - float(c[i][j][k]) * vals[k]
            if res.size:
                worst = max(worst, float(np.max(np.abs(res))))
    return worst


def orbit_dim_numeric(fields, pt, rtol=None):
    """Numeric rank of the generator values at ``pt`` and the singular values."""
    M = [eval_field(F, pt) for F in fields]
    if rtol is None:
        return numeric_rank(M)
    return numeric_rank(M, rtol)


def orbit_dims_many(fields, pts, rtol=1e-9):
    """Vectorized numeric ranks at many points."""
    V = np.stack([F.eval_many(pts) for F in fields], axis=1)
    s = np.linalg.svd(V, compute_uv=False)
    top = s[:, :1]
    with np.errstate(invalid="ignore"):
        keep = np.where(top > 0, s > rtol * top, False)
    return keep.sum(axis=1), s


# -- case studies -------------------------------------------------------------------
def _xyz():
    return Var(0, "x"), Var(1, "y"), Var(2, "z")


def linear_sl2_fields():
    """X = y dz + z dy, Y = x dz + z dx, Z = x dy - y dx."""
    x, y, z = _xyz()
    names = ["x", "y", "z"]
    return [ExprField([ZERO, z, y], names), ExprField([z, ZERO, x], names),
            ExprField([-y, x, ZERO], names)]


def radial_field():
    x, y, z = _xyz()
    return ExprField([x, y, z], ["x", "y", "z"])


def cone_argument():
    """``r^2 - z^2`` with ``r^2 = x^2 + y^2``; the fields are linear where it is ``<= 0``."""
    x, y, z = _xyz()
    return x * x + y * y - z * z


def cairns_ghys_fields():
    """Linear fields perturbed along the radial field by flat factors.

    ``X~ = X + f R``, ``Y~ = Y + g R``, ``Z~ = Z`` with
    ``f = x a(r^2 - z^2) / r^2`` and ``g = -y a(r^2 - z^2) / r^2``.
    """
    x, y, z = _xyz()
    X, Y, Z = linear_sl2_fields()
    R = radial_field()
    a = Flat(cone_argument())
    inv_r2 = Div(ONE, x * x + y * y)
    f = mul(x, a, inv_r2)
    g = mul(Const(-1), y, a, inv_r2)
    return [X + R.scaled(f), Y + R.scaled(g), Z]


def gs_remark_fields():
    """Perturbation that also moves Z: ``Z^ = Z + g R`` with ``g = a(r^2 - z^2)``."""
    x, y, z = _xyz()
    X, Y, Z = linear_sl2_fields()
    R = radial_field()
    a = Flat(cone_argument())
    inv_r2 = Div(ONE, x * x + y * y)
    return [X + R.scaled(mul(x, z, inv_r2, a)),
            Y + R.scaled(mul(Const(-1), y, z, inv_r2, a)),
            Z + R.scaled(a)]


def lifted(fields):
    """Cotangent lifts on ``(q, p)``: ``sum xi^j dq_j - sum p_j d_i xi^j dp_i``."""
    n = fields[0].nvars
    names = (["x", "y", "z", "a", "b", "c"] if n == 3
             else [f"q{i + 1}" for i in range(n)] + [f"p{i + 1}" for i in range(n)])
    p = [Var(n + j, names[n + j]) for j in range(n)]
    out = []
    for F in fields:
        J = F.jacobian_exprs()
        fiber = [-add(*(mul(p[j], J[j][i]) for j in range(n))) for i in range(n)]
        out.append(ExprField(list(F.components) + fiber, names))
    return out


# -- sampling ---------------------------------------------------------------------
DEFAULT_BOX = 5.0


def cone_samples(count, seed, region="outside", box=DEFAULT_BOX):
    """``count`` seeded points, uniform in ``[-box, box]^3`` and filtered by region.

    Parameters
    ----------
    region : {"outside", "inside", "any"}
        ``"outside"`` keeps ``x^2 + y^2 > z^2``, ``"inside"`` keeps
        ``x^2 + y^2 <= z^2``.

    Notes
    -----
    Near the cone the flat factor ``exp(-1/s)`` drops below the rank
    tolerance (for ``s`` below about 0.05), so a small fraction of outside
    points has numeric rank 2.  A larger box makes that shell relatively
    thinner.
    """
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        pts = rng.uniform(-box, box, size=(max(64, 2 * (count - len(out))), 3))
        s = pts[:, 0] ** 2 + pts[:, 1] ** 2 - pts[:, 2] ** 2
        if region == "outside":
            pts = pts[s > 0]
        elif region == "inside":
            pts = pts[s <= 0]
        elif region != "any":
            raise ValueError(f"unknown region {region!r}")
        out.extend(pts.tolist())
    return np.asarray(out[:count])
