"""Truncated complex power series (jets) in a single expansion parameter.

A jet of order N stores the coefficients c[0..N] of sum_k c_k eps^k and
supports ring operations truncated at order N.  Coefficients may be scalars
or numpy arrays of a common broadcastable shape, so one jet can carry the
expansion of a quantity sampled at many grid points at once.

Every closed-form eigenfunction in this package is expanded through this
module, which makes it the independent route against which the binomial
coefficient tables are checked.
"""

import numpy as np

# Convolutions are exercised and tolerance-tested only up to this order.
MAX_ORDER = 24


class NumericOverflowError(ArithmeticError):
    """exp() of a jet whose constant term exceeds the double range."""

    def __init__(self, exponent):
        super().__init__(
            f"exp overflow: constant-term real part {exponent!r} exceeds the double range"
        )
        self.exponent = exponent


class Jet:
    """Power series truncated at a fixed order.  Treat instances as immutable."""

    __slots__ = ("coeffs",)

    # Defer all mixed numpy arithmetic to __rmul__ and friends, otherwise
    # ndarray.__mul__ would try to iterate the jet.
    __array_ufunc__ = None

    def __init__(self, coeffs):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValueError("a jet needs at least the constant coefficient")
        if len(coeffs) - 1 > MAX_ORDER:
            raise ValueError(f"jet order {len(coeffs) - 1} exceeds the cap {MAX_ORDER}")
        self.coeffs = coeffs

    @property
    def order(self):
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, value, order):
        return cls((value,) + (0.0,) * order)

    @classmethod
    def variable(cls, order, scale=1.0):
        """scale * eps as a jet of the given order (order >= 1)."""
        if order < 1:
            raise ValueError("the expansion variable needs order >= 1")
        return cls((0.0, scale) + (0.0,) * (order - 1))

    def _matched(self, other):
        if not isinstance(other, Jet):
            raise TypeError(f"expected a Jet, got {type(other).__name__}")
        if self.order != other.order:
            raise ValueError(f"jet order mismatch: {self.order} != {other.order}")
        return other

    def __add__(self, other):
        other = self._matched(other)
        return Jet(a + b for a, b in zip(self.coeffs, other.coeffs))

    def __sub__(self, other):
        other = self._matched(other)
        return Jet(a - b for a, b in zip(self.coeffs, other.coeffs))

    def __neg__(self):
        return Jet(-a for a in self.coeffs)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(a * other for a in self.coeffs)
        self._matched(other)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(self.order + 1):
            # Cauchy product with compensated accumulation: the tables this
            # oracle certifies are compared at 1e-9 relative, so the sum
            # itself must not be the noise floor.
            acc = 0.0
            comp = 0.0
            for j in range(k + 1):
                term = a[j] * b[k - j]
                y = term - comp
                s = acc + y
                comp = (s - acc) - y
                acc = s
            out.append(acc)
        return Jet(out)

    def __rmul__(self, other):
        return Jet(other * a for a in self.coeffs)

    def __repr__(self):
        return f"Jet({list(self.coeffs)!r})"


def apply_entire(term, z, terms=None):
    """Sum term(k) * z**k for an entire series, truncated at z.order.

    z must have an exactly zero constant coefficient, so the truncated sum is
    exact at the truncation order; factor constant terms out first (see exp).
    term(k) supplies the k-th series coefficient.
    """
    z0 = z.coeffs[0]
    if not np.all(np.asarray(z0) == 0):
        raise ValueError("apply_entire needs a zero constant term")
    n = z.order
    if terms is None:
        terms = n
    result = Jet.constant(term(0), n)
    power = Jet.constant(1.0, n)
    for k in range(1, min(terms, n) + 1):
        power = power * z
        result = result + term(k) * power
    return result


def exp(z):
    """exp of a jet; the constant term is exponentiated separately."""
    z0 = z.coeffs[0]
    biggest = float(np.max(np.real(np.asarray(z0))))
    if biggest > 709.7:
        raise NumericOverflowError(biggest)
    lead = np.exp(np.asarray(z0, dtype=complex))
    if lead.ndim == 0:
        lead = complex(lead)
    body = apply_entire(exp_term, z - Jet.constant(z0, z.order))
    return lead * body


def exp_term(k):
    """1/k!, accumulated by iterated division."""
    c = 1.0
    for i in range(1, k + 1):
        c /= i
    return c


def cos_square_term(k):
    """Coefficient of w**k in cos(sqrt(w)): (-1)^k / (2k)!.

    cos is even, so feeding it the square of its argument keeps the series a
    polynomial in the jet variable and makes the result branch independent.
    """
    c = 1.0
    for i in range(1, 2 * k + 1):
        c /= i
    return c if k % 2 == 0 else -c


def sinc_square_term(k):
    """Coefficient of w**k in sin(sqrt(w))/sqrt(w): (-1)^k / (2k+1)!."""
    c = 1.0
    for i in range(1, 2 * k + 2):
        c /= i
    return c if k % 2 == 0 else -c
