"""Scalar arithmetic kernels: exact rationals, quadratic extensions, truncated jets.

Everything downstream (operators, flows, Darboux residuals) is generic in the
scalar, so one code path serves exact identity verification and floating-point
simulation.  Three kinds of scalars are used:

* exact rationals -- :class:`fractions.Fraction` (always in lowest terms,
  positive denominator, never rounded);
* :class:`QuadExt` -- elements ``a + b*w`` of a quadratic extension with a
  formal square root ``w`` of a fixed discriminant ``D``;
* :class:`Jet` -- truncated Taylor data ``(value, f', ..., f^(K))`` propagated
  through arithmetic by the Leibniz rule.  Jets nest: a jet whose coefficients
  are jets in a second variable carries mixed partial derivatives.

All values are immutable after construction and safe to share between threads.
"""

from fractions import Fraction
from math import comb, isqrt, sqrt

__all__ = [
    "Fraction",
    "Jet",
    "QuadExt",
    "format_scalar",
    "is_degenerate_pair",
    "is_exact_scalar",
    "is_rational_square",
    "rational",
    "scalar_abs",
    "scalar_value",
]

# Relative threshold below which two floats count as a degenerate collision.
NUMERIC_DEGENERACY_RTOL = 1e-12


def rational(value):
    """Coerce ``value`` to an exact :class:`Fraction`.

    Accepts Fractions, ints, and strings ("3/7", "-2", "1.25").  Floats are
    rejected: their exact binary expansion is rarely what the caller meant.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot coerce {type(value).__name__} to an exact rational")


def is_rational_square(q):
    """True when the rational ``q`` is the square of a rational."""
    q = Fraction(q)
    if q < 0:
        return False
    n, d = q.numerator, q.denominator
    return isqrt(n) ** 2 == n and isqrt(d) ** 2 == d


class QuadExt:
    """``a + b*w`` with ``w**2 = disc`` over any base field.

    The discriminant is fixed per element; mixing elements with different
    discriminants raises.  Zero testing (``x == 0``) checks both components,
    which is a sound nonzero certificate whenever ``disc`` is not a square in
    the base field; callers that need that guarantee should sample
    discriminants accordingly (see :func:`is_rational_square`).  No
    simplification is attempted when ``disc`` happens to be a square.
    """

    __slots__ = ("a", "b", "disc")

    def __init__(self, a, b, disc):
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "disc", disc)

    def __setattr__(self, name, value):
        raise AttributeError("QuadExt is immutable")

    def _lift(self, other):
        if isinstance(other, QuadExt):
            if other.disc != self.disc:
                raise ValueError(
                    f"mixing quadratic extensions with different discriminants "
                    f"({self.disc} vs {other.disc})"
                )
            return other
        if isinstance(other, (int, Fraction, float)):
            return QuadExt(other, 0, self.disc)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a + o.a, self.b + o.b, self.disc)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a - o.a, self.b - o.b, self.disc)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return QuadExt(o.a - self.a, o.b - self.b, self.disc)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        # zero components are the common case (embedded base-field values)
        if self.b == 0:
            return QuadExt(self.a * o.a, self.a * o.b, self.disc)
        if o.b == 0:
            return QuadExt(self.a * o.a, self.b * o.a, self.disc)
        return QuadExt(
            self.a * o.a + self.disc * self.b * o.b,
            self.a * o.b + self.b * o.a,
            self.disc,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        nrm = o.a * o.a - self.disc * o.b * o.b
        if nrm == 0:
            raise ZeroDivisionError(
                "division by a zero divisor in the quadratic extension"
            )
        return QuadExt(
            (self.a * o.a - self.disc * self.b * o.b) / nrm,
            (self.b * o.a - self.a * o.b) / nrm,
            self.disc,
        )

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o.__truediv__(self)

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.disc)

    def __pos__(self):
        return self

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = QuadExt(self.a * 0 + 1, self.b * 0, self.disc)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def conjugate(self):
        return QuadExt(self.a, -self.b, self.disc)

    def norm(self):
        """Field norm ``a**2 - disc*b**2`` (a base-field element)."""
        return self.a * self.a - self.disc * self.b * self.b

    def __eq__(self, other):
        if isinstance(other, QuadExt):
            return self.disc == other.disc and self.a == other.a and self.b == other.b
        if isinstance(other, (int, Fraction, float)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.disc))

    def __bool__(self):
        return not (self.a == 0 and self.b == 0)

    def __repr__(self):
        return f"QuadExt({self.a!r}, {self.b!r}, disc={self.disc!r})"

    def __str__(self):
        return format_scalar(self)


class Jet:
    """Truncated Taylor jet: ``coeffs = (f, f', ..., f^(K))``.

    Coefficients are raw derivatives (not divided by factorials); products use
    the Leibniz/binomial rule, quotients require a nonzero value coefficient.
    Arithmetic between jets demands equal orders -- mixing orders is almost
    always a bug, so it raises instead of silently truncating.  Non-jet
    operands are treated as constants.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", tuple(coeffs))
        if not self.coeffs:
            raise ValueError("a jet needs at least a value coefficient")

    def __setattr__(self, name, value):
        raise AttributeError("Jet is immutable")

    @property
    def order(self):
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, value, order):
        zero = value * 0
        return cls((value,) + (zero,) * order)

    @classmethod
    def variable(cls, value, order):
        """Jet of the identity function seeded at ``value`` (slope 1)."""
        if order == 0:
            return cls((value,))
        one = value * 0 + 1
        zero = value * 0
        return cls((value, one) + (zero,) * (order - 1))

    def value(self):
        return self.coeffs[0]

    def derivative(self):
        """Jet of ``f'`` (one order lower)."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        return Jet(self.coeffs[1:])

    def truncate(self, order):
        if order > self.order:
            raise ValueError(f"cannot extend a jet of order {self.order} to {order}")
        return Jet(self.coeffs[: order + 1])

    def _lift(self, other):
        if isinstance(other, Jet):
            if other.order != self.order:
                raise ValueError(
                    f"jet order mismatch: {self.order} vs {other.order}"
                )
            return other
        return Jet.constant(other, self.order)

    def __add__(self, other):
        if not isinstance(other, Jet):
            # constants only touch the value coefficient
            return Jet((self.coeffs[0] + other,) + self.coeffs[1:])
        o = self._lift(other)
        return Jet(tuple(x + y for x, y in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Jet):
            return Jet((self.coeffs[0] - other,) + self.coeffs[1:])
        o = self._lift(other)
        return Jet(tuple(x - y for x, y in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other):
        if not isinstance(other, Jet):
            return Jet((other - self.coeffs[0],) + tuple(-c for c in self.coeffs[1:]))
        o = self._lift(other)
        return Jet(tuple(y - x for x, y in zip(self.coeffs, o.coeffs)))

    def __mul__(self, other):
        if not isinstance(other, Jet):
            # constants have no derivatives: Leibniz collapses to a scale
            return Jet(tuple(c * other for c in self.coeffs))
        o = self._lift(other)
        a, b = self.coeffs, o.coeffs
        out = []
        for k in range(len(a)):
            term = a[0] * b[k]
            for j in range(1, k + 1):
                term = term + comb(k, j) * (a[j] * b[k - j])
            out.append(term)
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(tuple(c / other for c in self.coeffs))
        o = self._lift(other)
        if o.coeffs[0] == 0:
            raise ZeroDivisionError("division by a jet with zero value coefficient")
        a, b = self.coeffs, o.coeffs
        h = [a[0] / b[0]]
        for k in range(1, len(a)):
            acc = a[k]
            for j in range(k):
                acc = acc - comb(k, j) * (h[j] * b[k - j])
            h.append(acc / b[0])
        return Jet(h)

    def __rtruediv__(self, other):
        return self._lift(other).__truediv__(self)

    def __neg__(self):
        return Jet(tuple(-c for c in self.coeffs))

    def __pos__(self):
        return self

    def __pow__(self, exponent):
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        result = Jet.constant(self.coeffs[0] * 0 + 1, self.order)
        for _ in range(exponent):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, Jet):
            return self.coeffs == other.coeffs
        if self.coeffs[0] != other:
            return False
        return all(c == 0 for c in self.coeffs[1:])

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return any(bool(c) if isinstance(c, (Jet, QuadExt)) else c != 0
                   for c in self.coeffs)

    def __repr__(self):
        return f"Jet({list(self.coeffs)!r})"


def scalar_value(x):
    """Strip jet layers and return the underlying value component."""
    while isinstance(x, Jet):
        x = x.coeffs[0]
    return x


def is_exact_scalar(x):
    """True when ``x`` lives on the exact (never-rounded) path."""
    x = scalar_value(x)
    if isinstance(x, QuadExt):
        return is_exact_scalar(x.a) and is_exact_scalar(x.b)
    return isinstance(x, (int, Fraction))


def scalar_abs(x):
    """Magnitude used for residual reporting.

    Exact rationals keep exact absolute values.  Quadratic-extension elements
    report 0 when exactly zero, otherwise a numeric embedding (|a + b*sqrt(D)|
    for D >= 0, complex modulus for D < 0).  Jets report the max over their
    coefficients, so a "zero residual" means every derivative vanished too.
    """
    if isinstance(x, Jet):
        return max(scalar_abs(c) for c in x.coeffs)
    if isinstance(x, QuadExt):
        if x.a == 0 and x.b == 0:
            return 0 if is_exact_scalar(x) else 0.0
        a, b, d = float(x.a), float(x.b), float(x.disc)
        if d >= 0:
            return abs(a + b * sqrt(d))
        return sqrt(a * a - d * b * b)
    if isinstance(x, (int, Fraction)):
        return abs(Fraction(x))
    return abs(x)


def format_scalar(x):
    """Serialize a scalar for JSON/CSV reports.

    Exact rationals render as ``"p/q"`` (denominator always written);
    extension elements as ``"a + b*w | w^2 = D"``; jets component-wise.
    """
    if isinstance(x, Jet):
        return "jet(" + "; ".join(format_scalar(c) for c in x.coeffs) + ")"
    if isinstance(x, QuadExt):
        return (
            f"{format_scalar(x.a)} + {format_scalar(x.b)}*w"
            f" | w^2 = {format_scalar(x.disc)}"
        )
    if isinstance(x, (int, Fraction)):
        q = Fraction(x)
        return f"{q.numerator}/{q.denominator}"
    return repr(float(x))


def is_degenerate_pair(a, b):
    """Collision test used by flow evaluation guards.

    Exact scalars collide only on literal equality; floats collide below a
    relative threshold so near-singular configurations fail fast instead of
    overflowing.
    """
    a = scalar_value(a)
    b = scalar_value(b)
    if is_exact_scalar(a) and is_exact_scalar(b):
        return a == b
    fa, fb = float(a), float(b)
    return abs(fa - fb) < NUMERIC_DEGENERACY_RTOL * max(1.0, abs(fa), abs(fb))
