"""Truncated Taylor series in time for nodal fields.

A :class:`Jet` stores ``c[k] = d^k f / dt^k / k!`` for ``k = 0..order``.
Arithmetic follows the usual recurrences for products, quotients, exp and
log, so a formula written once for arrays also yields its time derivatives
when fed jets.
"""

import math

import numpy as np


class Jet:
    __slots__ = ("c",)
    __array_priority__ = 100

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs, dtype=float)

    @classmethod
    def constant(cls, value, order):
        value = np.asarray(value, dtype=float)
        c = np.zeros((order + 1,) + value.shape)
        c[0] = value
        return cls(c)

    @property
    def order(self):
        return self.c.shape[0] - 1

    @property
    def value(self):
        return self.c[0]

    def derivative(self, k):
        """The k-th time derivative (not the Taylor coefficient)."""
        return math.factorial(k) * self.c[k]

    def derivatives(self):
        return [self.derivative(k) for k in range(self.order + 1)]

    def truncate(self, order):
        return Jet(self.c[: order + 1])

    def map(self, linear_op):
        """Apply a time-independent linear operator coefficientwise."""
        return Jet(linear_op(self.c))

    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.order != self.order:
                n = min(self.order, other.order)
                return self.truncate(n), other.truncate(n)
            return self, other
        return self, self._lift(other)

    def _lift(self, value):
        value = np.broadcast_to(np.asarray(value, dtype=float), self.c.shape[1:])
        return Jet.constant(value, self.order)

    def __add__(self, other):
        a, b = self._coerce(other)
        return Jet(a.c + b.c)

    __radd__ = __add__

    def __sub__(self, other):
        a, b = self._coerce(other)
        return Jet(a.c - b.c)

    def __rsub__(self, other):
        a, b = self._coerce(other)
        return Jet(b.c - a.c)

    def __neg__(self):
        return Jet(-self.c)

    def __mul__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other, dtype=float)
            return Jet(self.c * other)
        a, b = self._coerce(other)
        n = a.order
        out = np.zeros(np.broadcast_shapes(a.c.shape, b.c.shape))
        for k in range(n + 1):
            for j in range(k + 1):
                out[k] += a.c[j] * b.c[k - j]
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / np.asarray(other, dtype=float))
        a, b = self._coerce(other)
        n = a.order
        out = np.zeros(np.broadcast_shapes(a.c.shape, b.c.shape))
        for k in range(n + 1):
            acc = a.c[k].copy()
            for j in range(1, k + 1):
                acc = acc - b.c[j] * out[k - j]
            out[k] = acc / b.c[0]
        return Jet(out)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def exp(self):
        n = self.order
        out = np.zeros_like(self.c)
        out[0] = np.exp(self.c[0])
        for k in range(1, n + 1):
            acc = np.zeros_like(self.c[0])
            for j in range(1, k + 1):
                acc = acc + j * self.c[j] * out[k - j]
            out[k] = acc / k
        return Jet(out)

    def log(self):
        n = self.order
        out = np.zeros_like(self.c)
        out[0] = np.log(self.c[0])
        for k in range(1, n + 1):
            acc = self.c[k].copy()
            for j in range(1, k):
                acc = acc - j * out[j] * self.c[k - j] / k
            out[k] = acc / self.c[0]
        return Jet(out)

    def __pow__(self, p):
        if p == 2:
            return self * self
        if p == 3:
            return self * self * self
        if p == 4:
            sq = self * self
            return sq * sq
        return (self.log() * float(p)).exp()


def exp(f):
    return f.exp() if isinstance(f, Jet) else np.exp(f)


def log(f):
    return f.log() if isinstance(f, Jet) else np.log(f)


def linear(op, f):
    """Apply a linear spatial operator to an array or a jet."""
    return f.map(op) if isinstance(f, Jet) else op(f)
