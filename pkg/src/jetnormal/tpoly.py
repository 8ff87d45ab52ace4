"""Univariate polynomials in a formal time parameter ``t``.

A :class:`TPoly` behaves like a scalar, so it can be used as the coefficient
type of a :class:`~jetnormal.jet.Jet`.  That is how time-dependent vector
fields and flows are represented: a jet whose coefficients are polynomials
in ``t``.
"""
from fractions import Fraction


class TPoly:
    """Polynomial ``c0 + c1 t + c2 t^2 + ...`` with exact or float coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        c = list(coeffs)
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def t(cls):
        return cls((0, 1))

    @property
    def degree(self):
        return len(self.c) - 1

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        if isinstance(other, TPoly):
            return self.c == other.c
        if other == 0:
            return not self.c
        return self.c == (other,)

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"TPoly({list(self.c)!r})"

    def _coerce(self, other):
        if isinstance(other, TPoly):
            return other
        return TPoly((other,))

    def __add__(self, other):
        other = self._coerce(other)
        a, b = self.c, other.c
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, v in enumerate(b):
            out[i] = out[i] + v
        return TPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return TPoly(-v for v in self.c)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, TPoly):
            if other == 0:
                return TPoly()
            return TPoly(v * other for v in self.c)
        if not self.c or not other.c:
            return TPoly()
        out = [0] * (len(self.c) + len(other.c) - 1)
        for i, u in enumerate(self.c):
            if u == 0:
                continue
            for j, v in enumerate(other.c):
                out[i + j] += u * v
        return TPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TPoly):
            raise TypeError("division by a time polynomial is not supported")
        if isinstance(other, int):
            other = Fraction(other)
        return TPoly(v / other for v in self.c)

    def integrate(self):
        """Antiderivative vanishing at ``t = 0``."""
        out = [0]
        for k, v in enumerate(self.c):
            out.append(v / (k + 1) if not isinstance(v, int) else Fraction(v, k + 1))
        return TPoly(out)

    def at(self, t):
        """Evaluate by Horner's rule."""
        acc = 0
        for v in reversed(self.c):
            acc = acc * t + v
        return acc

    def __abs__(self):
        return max((abs(v) for v in self.c), default=0)
