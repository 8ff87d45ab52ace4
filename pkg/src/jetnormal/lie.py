"""Lie algebras by structure constants and their representations by vector fields.

Conventions
-----------
``[e_i, e_j] = sum_k c[i][j][k] e_k``.  A representation assigns a
:class:`~jetnormal.jet.VectorFieldJet` to each basis element with
``[rho(e_i), rho(e_j)] = sum_k c[i][j][k] rho(e_k)`` for the vector field
bracket ``[v, w]^i = v(w^i) - w(v^i)``.

For linear fields ``x -> A x`` that bracket is ``[Ax, Bx] = (BA - AB) x``, so
the matrices of a representation satisfy ``A_i A_j - A_j A_i =
-sum_k c[i][j][k] A_k``.  :class:`LinearPart` checks that relation.
"""
from dataclasses import dataclass, field
from fractions import Fraction

from .jet import DimensionError, VectorFieldJet, bracket_vf, parse_jet
from .linalg import InconsistentSystem, SparseSolver, as_fraction_matrix, determinant, inverse, matmul


@dataclass
class Report:
    """Outcome of a verification: ``ok`` plus human-readable details."""

    ok: bool
    residual: object = 0
    violations: list = field(default_factory=list)
    order: int = None


class LieAlgebra:
    """Finite-dimensional Lie algebra given by structure constants.

    Parameters
    ----------
    c : nested list or dict
        Either a ``d x d x d`` nested list ``c[i][j][k]`` or a dict
        ``{(i, j, k): value}``.  A dict lists each bracket once; the
        antisymmetric partner is filled in.
    names : list of str, optional
    """

    def __init__(self, c, dim=None, names=None):
        if isinstance(c, dict):
            if dim is None:
                dim = 1 + max(max(key) for key in c) if c else 0
            C = [[[Fraction(0)] * dim for _ in range(dim)] for _ in range(dim)]
            for (i, j, k), v in c.items():
                C[i][j][k] = v
                if (j, i, k) not in c:
                    C[j][i][k] = -v
            c = C
        self.dim = len(c)
        self.c = [[list(row) for row in plane] for plane in c]
        self.names = list(names) if names else [f"e{i + 1}" for i in range(self.dim)]

    def bracket(self, u, v):
        """Bracket of two elements given by coordinate vectors."""
        d = self.dim
        out = [0] * d
        for i in range(d):
            if u[i] == 0:
                continue
            for j in range(d):
                if v[j] == 0:
                    continue
                for k in range(d):
                    out[k] += u[i] * v[j] * self.c[i][j][k]
        return out

    def ad(self, i):
        """Matrix of ``ad_{e_i}``: column ``j`` holds ``[e_i, e_j]``."""
        d = self.dim
        return [[self.c[i][j][k] for j in range(d)] for k in range(d)]

    def killing_form(self):
        ads = [self.ad(i) for i in range(self.dim)]
        return [[sum(matmul(ads[i], ads[j])[k][k] for k in range(self.dim))
                 for j in range(self.dim)] for i in range(self.dim)]

    def change_basis(self, P):
        """Structure constants in the basis ``f_a = sum_i P[i][a] e_i``."""
        d = self.dim
        Pinv = inverse(as_fraction_matrix(P))
        cols = [[P[i][a] for i in range(d)] for a in range(d)]
        C = []
        for a in range(d):
            plane = []
            for b in range(d):
                br = self.bracket(cols[a], cols[b])
                plane.append([sum(Pinv[k][i] * br[i] for i in range(d)) for k in range(d)])
            C.append(plane)
        return LieAlgebra(C, names=[f"f{a + 1}" for a in range(d)])

    def table(self):
        """Nonzero brackets ``[e_i, e_j]`` (i < j) as readable strings."""
        lines = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                terms = [(k, v) for k, v in enumerate(self.c[i][j]) if v != 0]
                rhs = " + ".join(f"{v}*{self.names[k]}" for k, v in terms) or "0"
                lines.append(f"[{self.names[i]},{self.names[j]}] = {rhs}")
        return lines


def check_lie_algebra(g):
    """Exact check of antisymmetry and the Jacobi identity."""
    d = g.dim
    c = g.c
    bad = []
    for i in range(d):
        for j in range(d):
            for k in range(d):
                if c[i][j][k] != -c[j][i][k]:
                    bad.append(f"antisymmetry fails at ({i},{j},{k})")
    for i in range(d):
        for j in range(i + 1, d):
            for k in range(j + 1, d):
                for m in range(d):
                    s = sum(c[i][j][l] * c[l][k][m] + c[j][k][l] * c[l][i][m]
                            + c[k][i][l] * c[l][j][m] for l in range(d))
                    if s != 0:
                        bad.append(f"Jacobi fails for ({i},{j},{k}) in component {m}")
    return Report(not bad, violations=bad)


def is_semisimple(g):
    """Cartan's criterion: the Killing form is nondegenerate."""
    if g.dim == 0:
        return False
    return determinant(g.killing_form()) != 0


class LinearPart:
    """Matrices ``A_i`` of the linear fields ``x -> A_i x``."""

    def __init__(self, matrices):
        self.matrices = [[list(r) for r in A] for A in matrices]
        self.n = len(self.matrices[0]) if self.matrices else 0

    def __len__(self):
        return len(self.matrices)

    def __iter__(self):
        return iter(self.matrices)

    def __getitem__(self, i):
        return self.matrices[i]

    def __eq__(self, other):
        return isinstance(other, LinearPart) and self.matrices == other.matrices

    def fields(self, order):
        return [VectorFieldJet.from_matrix(A, order) for A in self.matrices]

    def check_brackets(self, g):
        """Residual of ``A_i A_j - A_j A_i + sum_k c_ij^k A_k``."""
        worst = 0
        d = len(self.matrices)
        for i in range(d):
            for j in range(i + 1, d):
                AB = matmul(self.matrices[i], self.matrices[j])
                BA = matmul(self.matrices[j], self.matrices[i])
                for r in range(self.n):
                    for s in range(self.n):
                        v = AB[r][s] - BA[r][s] + sum(
                            g.c[i][j][k] * self.matrices[k][r][s] for k in range(d))
                        worst = max(worst, abs(v))
        return worst

    def conjugate(self, L, Linv):
        return LinearPart([matmul(matmul(L, A), Linv) for A in self.matrices])


class Representation:
    """Basis-indexed vector fields vanishing at the origin."""

    def __init__(self, algebra, fields):
        fields = list(fields)
        if len(fields) != algebra.dim:
            raise DimensionError(f"algebra has dimension {algebra.dim}, got {len(fields)} fields")
        n = fields[0].nvars
        if any(f.nvars != n for f in fields):
            raise DimensionError("fields live on different spaces")
        for f in fields:
            if not f.vanishes_at_origin():
                raise ValueError("representation fields must vanish at the origin")
        self.algebra = algebra
        self.fields = fields
        self.nvars = n
        self.order = min(f.order for f in fields)

    def truncate(self, order):
        return Representation(self.algebra, [f.truncate(order) for f in self.fields])

    def is_linear(self):
        return all(f.is_linear() for f in self.fields)

    def to_dict(self, names=None):
        g = self.algebra
        sc = [[i, j, k, str(g.c[i][j][k])] for i in range(g.dim) for j in range(i + 1, g.dim)
              for k in range(g.dim) if g.c[i][j][k] != 0]
        return {"algebra": {"dim": g.dim, "names": g.names, "structure_constants": sc},
                "rep": {"nvars": self.nvars, "order": self.order,
                        "fields": [{"components": f.to_strs(names)} for f in self.fields]}}

    @classmethod
    def from_dict(cls, doc, order=None, names=None):
        """Build from the JSON layout used by the command line tool."""
        alg = doc["algebra"]
        d = int(alg["dim"])
        c = {}
        for i, j, k, v in alg.get("structure_constants", []):
            c[(int(i), int(j), int(k))] = Fraction(str(v))
        g = LieAlgebra(c, dim=d, names=alg.get("names"))
        rep = doc["rep"]
        n = int(rep["nvars"])
        N = int(order if order is not None else rep["order"])
        names = names or rep.get("names")
        fields = [VectorFieldJet([parse_jet(s, n, N, names) for s in f["components"]], N)
                  for f in rep["fields"]]
        return cls(g, fields)


def check_representation(r):
    """Max coefficient of ``sum_k c_ij^k rho(e_k) - [rho(e_i), rho(e_j)]`` over i < j.

    A zero residual certifies the relations modulo terms of degree above the
    reported order.
    """
    g = r.algebra
    d = g.dim
    worst = 0
    bad = []
    order = r.order
    for i in range(d):
        for j in range(i + 1, d):
            br = bracket_vf(r.fields[i], r.fields[j])
            order = min(order, br.order)
            rhs = VectorFieldJet.zero(r.nvars, br.order)
            for k in range(d):
                if g.c[i][j][k] != 0:
                    rhs = rhs + r.fields[k].scale(g.c[i][j][k])
            res = (rhs - br).max_abs()
            if res != 0:
                bad.append(f"[{g.names[i]},{g.names[j]}] residual {res}")
            worst = max(worst, res)
    return Report(worst == 0, residual=worst, violations=bad, order=order)


def linear_part(r):
    return LinearPart([f.linear_matrix() for f in r.fields])


def pushforward_rep(r, m):
    """Representation in the coordinates ``y = m(x)``."""
    minv = m.inverse()
    return Representation(r.algebra, [f.pushforward(m, minv) for f in r.fields])


def structure_constants_of(fields):
    """Recover structure constants from a linearly independent family of fields.

    Raises :class:`~jetnormal.linalg.InconsistentSystem` when some bracket
    leaves the span.
    """
    d = len(fields)
    keys = sorted({(comp, e) for f in fields for comp, c in enumerate(f) for e in c.coeffs})
    index = {key: r for r, key in enumerate(keys)}
    rows = [dict() for _ in keys]
    for k, f in enumerate(fields):
        for comp, c in enumerate(f):
            for e, v in c.coeffs.items():
                rows[index[(comp, e)]][k] = v
    solver = SparseSolver(rows, d)
    if solver.rank < d:
        raise ValueError("fields are linearly dependent")
    C = [[[Fraction(0)] * d for _ in range(d)] for _ in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            br = bracket_vf(fields[i], fields[j])
            b = {}
            for comp, c in enumerate(br):
                for e, v in c.coeffs.items():
                    if (comp, e) not in index:
                        raise InconsistentSystem("bracket leaves the span of the fields")
                    b[index[(comp, e)]] = v
            x = solver.solve(b)
            for k, v in x.items():
                C[i][j][k] = v
                C[j][i][k] = -v
    return LieAlgebra(C)


# -- the sl(2,R) fixture ---------------------------------------------------------
def sl2_algebra():
    """sl(2,R) in the basis (X, Y, Z) with [X,Y] = -Z, [Z,X] = Y, [Z,Y] = -X."""
    one = Fraction(1)
    return LieAlgebra({(0, 1, 2): -one, (2, 0, 1): one, (2, 1, 0): -one},
                      dim=3, names=["X", "Y", "Z"])


SL2_MATRICES = [
    [[0, 0, 0], [0, 0, 1], [0, 1, 0]],
    [[0, 0, 1], [0, 0, 0], [1, 0, 0]],
    [[0, -1, 0], [1, 0, 0], [0, 0, 0]],
]


def sl2_linear_rep(order):
    """Linear action on R^3: X = y dz + z dy, Y = x dz + z dx, Z = x dy - y dx."""
    mats = [[[Fraction(v) for v in row] for row in A] for A in SL2_MATRICES]
    return Representation(sl2_algebra(), [VectorFieldJet.from_matrix(A, order) for A in mats])


def linear_rep(algebra, matrices, order):
    return Representation(algebra, [VectorFieldJet.from_matrix(A, order) for A in matrices])

