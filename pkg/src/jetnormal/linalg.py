"""Exact (rational) linear algebra on sparse and dense matrices.

Everything here works over :class:`fractions.Fraction`.  Floats are accepted
when a tolerance is passed; entries with absolute value ``<= tol`` are then
treated as zero.

The workhorse is :class:`SparseSolver`, a Gauss-Jordan elimination that
records its row operations so the same factorization can be replayed on many
right-hand sides.  The normal-form algorithms build one solver per
(linear data, degree) pair and reuse it across calls.
"""
from fractions import Fraction


class InconsistentSystem(ValueError):
    """Raised when ``M x = b`` has no solution."""


def _is_zero(v, tol):
    if tol is None:
        return v == 0
    return abs(v) <= tol


class SparseSolver:
    """Reduced row echelon form of a sparse matrix, reusable for many RHS.

    Parameters
    ----------
    rows : list of dict
        ``rows[r]`` maps column index to the (nonzero) entry ``M[r, c]``.
    ncols : int
        Number of unknowns.
    tol : float, optional
        Zero threshold for float entries.  ``None`` means exact arithmetic.

    Notes
    -----
    Columns are processed in index order, so the pivot columns (and hence the
    solution returned with free variables set to zero) depend only on the
    column ordering, never on the pivot row choice.  The sparsest candidate
    row is used as pivot to limit fill-in.
    """

    def __init__(self, rows, ncols, tol=None):
        self.nrows = len(rows)
        self.ncols = ncols
        self.tol = tol
        R = [{c: v for c, v in r.items() if not _is_zero(v, tol)} for r in rows]
        col_rows = [set() for _ in range(ncols)]
        for i, r in enumerate(R):
            for c in r:
                col_rows[c].add(i)
        ops = []
        pivots = {}
        used = set()
        for c in range(ncols):
            cands = [i for i in col_rows[c] if i not in used]
            if not cands:
                continue
            p = min(cands, key=lambda i: (len(R[i]), i))
            used.add(p)
            pivots[c] = p
            prow = R[p]
            inv = 1 / prow[c] if tol is not None else Fraction(1) / prow[c]
            if prow[c] != 1:
                for k in prow:
                    prow[k] = prow[k] * inv
                ops.append((p, None, inv))
            for t in list(col_rows[c]):
                if t == p:
                    continue
                trow = R[t]
                f = trow[c]
                for k, v in prow.items():
                    nv = trow.get(k, 0) - f * v
                    if _is_zero(nv, tol):
                        if k in trow:
                            del trow[k]
                            col_rows[k].discard(t)
                    else:
                        if k not in trow:
                            col_rows[k].add(t)
                        trow[k] = nv
                ops.append((p, t, f))
        self.R = R
        self.ops = ops
        self.pivots = pivots
        self.rank = len(pivots)
        self._pivot_rows = set(pivots.values())
        self._kernel = None
        self._gram = None

    def reduce(self, b):
        """Apply the recorded row operations to a RHS given as ``{row: value}``."""
        b = {r: v for r, v in b.items() if not _is_zero(v, self.tol)}
        for p, t, f in self.ops:
            bp = b.get(p)
            if bp is None:
                continue
            if t is None:
                b[p] = bp * f
            else:
                nv = b.get(t, 0) - f * bp
                if _is_zero(nv, self.tol):
                    b.pop(t, None)
                else:
                    b[t] = nv
        return b

    def is_consistent(self, b):
        red = self.reduce(b)
        return all(r in self._pivot_rows for r in red)

    def solve(self, b):
        """A solution of ``M x = b`` with all free variables set to zero.

        Returns a dict ``{col: value}``; raises :class:`InconsistentSystem`.
        """
        red = self.reduce(b)
        bad = [r for r in red if r not in self._pivot_rows]
        if bad:
            worst = max(abs(red[r]) for r in bad)
            raise InconsistentSystem(f"system is inconsistent (residual {worst})")
        x = {}
        for c, p in self.pivots.items():
            v = red.get(p)
            if v is not None:
                x[c] = v
        return x

    def kernel(self):
        """Basis of the null space as a list of sparse vectors."""
        if self._kernel is None:
            free = [c for c in range(self.ncols) if c not in self.pivots]
            basis = []
            for f in free:
                vec = {f: Fraction(1) if self.tol is None else 1.0}
                for c, p in self.pivots.items():
                    v = self.R[p].get(f)
                    if v is not None:
                        vec[c] = -v
                basis.append(vec)
            self._kernel = basis
        return self._kernel

    def solve_min_norm(self, b):
        """The solution of minimal Euclidean norm in the coordinate basis."""
        x0 = self.solve(b)
        K = self.kernel()
        if not K or not x0:
            return x0
        if self._gram is None:
            k = len(K)
            rows = []
            for i in range(k):
                row = {}
                for j in range(k):
                    v = _sparse_dot(K[i], K[j])
                    if v != 0:
                        row[j] = v
                rows.append(row)
            self._gram = SparseSolver(rows, k, self.tol)
        rhs = {}
        for i, kv in enumerate(K):
            v = -_sparse_dot(kv, x0)
            if v != 0:
                rhs[i] = v
        coef = self._gram.solve(rhs)
        x = dict(x0)
        for i, ci in coef.items():
            for c, v in K[i].items():
                nv = x.get(c, 0) + ci * v
                if _is_zero(nv, self.tol):
                    x.pop(c, None)
                else:
                    x[c] = nv
        return x


def _sparse_dot(a, b):
    if len(a) > len(b):
        a, b = b, a
    s = 0
    for k, v in a.items():
        w = b.get(k)
        if w is not None:
            s += v * w
    return s


def _to_sparse(M):
    return [{j: v for j, v in enumerate(row) if v != 0} for row in M]


def as_fraction_matrix(M):
    return [[v if isinstance(v, Fraction) else Fraction(v) for v in row] for row in M]


def matrix_rank(M, tol=None):
    """Rank of a dense matrix (list of rows)."""
    if not M:
        return 0
    return SparseSolver(_to_sparse(M), len(M[0]), tol).rank


def determinant(M):
    """Exact determinant of a square matrix by fraction-free (Bareiss) elimination."""
    n = len(M)
    if n == 0:
        return Fraction(1)
    A = [list(row) for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return Fraction(0)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) / prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def inverse(M):
    """Exact inverse of a square matrix; raises ``ZeroDivisionError`` if singular."""
    n = len(M)
    solver = SparseSolver(_to_sparse(M), n)
    if solver.rank < n:
        raise ZeroDivisionError("matrix is singular")
    cols = []
    for j in range(n):
        x = solver.solve({j: Fraction(1)})
        cols.append([x.get(i, Fraction(0)) for i in range(n)])
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def matmul(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))]
            for i in range(len(A))]


def transpose(A):
    return [list(col) for col in zip(*A)]


def identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def nullspace(M, tol=None):
    """Null space basis of a dense matrix, as dense vectors."""
    ncols = len(M[0]) if M else 0
    solver = SparseSolver(_to_sparse(M), ncols, tol)
    return [[v.get(j, 0) for j in range(ncols)] for v in solver.kernel()]


def column_space_basis(M):
    """Indices of pivot columns of ``M`` (a basis of its column space)."""
    ncols = len(M[0]) if M else 0
    return sorted(SparseSolver(_to_sparse(M), ncols).pivots)
