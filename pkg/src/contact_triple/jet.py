"""Order-2 forward-mode differentiation.

A :class:`Jet` carries the value, gradient and Hessian of a scalar quantity
with respect to a fixed list of independent variables.  Arithmetic on jets
is truncated Taylor arithmetic, so derivatives are exact up to rounding.
The elementary functions in this module accept plain floats as well, which
lets the same evaluator code run with or without differentiation.
"""

from __future__ import annotations

import math
from numbers import Real

import numpy as np

from .errors import DomainError


class Jet:
    __slots__ = ("value", "grad", "hess")

    def __init__(self, value, grad, hess):
        self.value = float(value)
        self.grad = grad
        self.hess = hess

    @property
    def nvars(self):
        return self.grad.shape[0]

    @classmethod
    def constant(cls, value, nvars):
        return cls(value, np.zeros(nvars), np.zeros((nvars, nvars)))

    @classmethod
    def variable(cls, value, index, nvars):
        g = np.zeros(nvars)
        g[index] = 1.0
        return cls(value, g, np.zeros((nvars, nvars)))

    def __repr__(self):
        return f"Jet(value={self.value!r}, grad={self.grad!r}, hess={self.hess!r})"

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        if isinstance(other, Real):
            return Jet.constant(other, self.nvars)
        return NotImplemented

    def _unary(self, f0, f1, f2):
        g = self.grad
        return Jet(f0, f1 * g, f1 * self.hess + f2 * np.outer(g, g))

    def __neg__(self):
        return Jet(-self.value, -self.grad, -self.hess)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, Real):
            return Jet(self.value + other, self.grad, self.hess)
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return Jet(self.value + other.value, self.grad + other.grad, self.hess + other.hess)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Real):
            return Jet(self.value - other, self.grad, self.hess)
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return Jet(self.value - other.value, self.grad - other.grad, self.hess - other.hess)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Real):
            return Jet(self.value * other, self.grad * other, self.hess * other)
        other = self._lift(other)
        if other is NotImplemented:
            return other
        a, b = self, other
        cross = np.outer(a.grad, b.grad)
        return Jet(
            a.value * b.value,
            a.value * b.grad + b.value * a.grad,
            a.value * b.hess + b.value * a.hess + (cross + cross.T),
        )

    __rmul__ = __mul__

    def reciprocal(self):
        v = self.value
        if v == 0.0:
            raise DomainError("division by zero")
        return self._unary(1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def __truediv__(self, other):
        if isinstance(other, Real):
            if other == 0:
                raise DomainError("division by zero")
            return self * (1.0 / other)
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, exponent):
        return power(self, exponent)

    def __rpow__(self, base):
        return power(base, self)

    def compose(self, inputs):
        """Chain rule: treat ``self`` as the jet of f at g(u) and return the jet of f∘g.

        ``inputs`` holds one entry per variable of ``self``; each is a Jet over
        the outer variables or a plain float (a constant).
        """
        jets = [x for x in inputs if isinstance(x, Jet)]
        if not jets:
            return self.value
        n = jets[0].nvars
        m = len(inputs)
        J = np.zeros((m, n))
        for k, x in enumerate(inputs):
            if isinstance(x, Jet):
                J[k] = x.grad
        grad = J.T @ self.grad
        hess = J.T @ self.hess @ J
        for k, x in enumerate(inputs):
            if isinstance(x, Jet) and self.grad[k] != 0.0:
                hess = hess + self.grad[k] * x.hess
        return Jet(self.value, grad, 0.5 * (hess + hess.T))


JetValue = Jet


def value_of(x):
    return x.value if isinstance(x, Jet) else float(x)


def seed(point):
    """Independent-variable jets for a point in R^n."""
    point = np.asarray(point, dtype=float)
    n = point.shape[0]
    return [Jet.variable(v, i, n) for i, v in enumerate(point)]


def jet_of(fn, point):
    """Evaluate ``fn`` on seeded jets and return its Jet at ``point``."""
    out = fn(seed(point))
    if not isinstance(out, Jet):
        return Jet.constant(out, len(point))
    return out


def sin(x):
    if isinstance(x, Jet):
        s, c = math.sin(x.value), math.cos(x.value)
        return x._unary(s, c, -s)
    return math.sin(x)


def cos(x):
    if isinstance(x, Jet):
        s, c = math.sin(x.value), math.cos(x.value)
        return x._unary(c, -s, -c)
    return math.cos(x)


def exp(x):
    if isinstance(x, Jet):
        try:
            e = math.exp(x.value)
        except OverflowError as exc:
            raise DomainError("exp overflow") from exc
        return x._unary(e, e, e)
    try:
        return math.exp(x)
    except OverflowError as exc:
        raise DomainError("exp overflow") from exc


def log(x):
    v = value_of(x)
    if v <= 0.0:
        raise DomainError(f"log of non-positive value {v!r}")
    if isinstance(x, Jet):
        return x._unary(math.log(v), 1.0 / v, -1.0 / v**2)
    return math.log(v)


def sqrt(x):
    v = value_of(x)
    if v < 0.0:
        raise DomainError(f"sqrt of negative value {v!r}")
    if isinstance(x, Jet):
        if v == 0.0:
            raise DomainError("sqrt is not differentiable at 0")
        r = math.sqrt(v)
        return x._unary(r, 0.5 / r, -0.25 / (r * v))
    return math.sqrt(v)


def fabs(x):
    if isinstance(x, Jet):
        s = math.copysign(1.0, x.value) if x.value != 0.0 else 0.0
        return x._unary(abs(x.value), s, 0.0)
    return abs(x)


def _is_integral_constant(x):
    if isinstance(x, Jet):
        return not x.grad.any() and float(x.value).is_integer()
    return float(x).is_integer()


def power(base, exponent):
    """``base ** exponent`` with the integer-exponent rule where it applies.

    Integer exponents admit any base (0 to a negative power excepted); other
    exponents need a positive base, or a zero base for a constant exponent >= 2.
    """
    try:
        return _power(base, exponent)
    except (OverflowError, ZeroDivisionError) as exc:
        raise DomainError(f"power out of range: {exc}") from exc


def _power(base, exponent):
    b = value_of(base)
    if _is_integral_constant(exponent):
        k = int(value_of(exponent))
        if b == 0.0 and k < 0:
            raise DomainError("0 raised to a negative power")
        if not isinstance(base, Jet):
            return float(b**k)
        if k == 0:
            return Jet.constant(1.0, base.nvars)
        f1 = k * b ** (k - 1) if k != 1 else 1.0
        f2 = k * (k - 1) * b ** (k - 2) if k not in (0, 1) else 0.0
        return base._unary(b**k, f1, f2)
    if b < 0.0:
        raise DomainError(f"negative base {b!r} with non-integer exponent")
    if b == 0.0:
        if isinstance(exponent, Jet) or value_of(exponent) <= 0.0:
            raise DomainError("0 raised to a non-integer or non-positive power")
        e = value_of(exponent)
        if not isinstance(base, Jet):
            return 0.0
        if e < 2.0:
            raise DomainError("power not twice differentiable at base 0")
        return Jet.constant(0.0, base.nvars)
    if not isinstance(exponent, Jet):
        e = float(exponent)
        if not isinstance(base, Jet):
            return b**e
        return base._unary(b**e, e * b ** (e - 1), e * (e - 1) * b ** (e - 2))
    return exp(exponent * log(base))


FUNCTIONS = {
    "sin": sin,
    "cos": cos,
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
    "abs": fabs,
}
