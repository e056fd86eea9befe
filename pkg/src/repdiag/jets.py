"""Truncated Taylor arithmetic.

A jet of order ``K`` at ``x`` stores the normalized Taylor coefficients
``c_k = f^(k)(x) / k!`` for ``k = 0..K``.  Products truncate to the shorter
operand, and differentiation drops the top coefficient, so the stored order
is always the order to which the jet is exact.
"""

from __future__ import annotations

import math
from typing import Union

import numpy as np

Number = Union[int, float, complex]


class Jet:
    """Jet of a scalar (``shape == ()``) or array-valued function."""

    __slots__ = ("x", "c")

    def __init__(self, x: float, coeffs):
        self.x = x
        self.c = np.asarray(coeffs, dtype=complex)
        if self.c.ndim == 0:
            self.c = self.c.reshape(1)

    @property
    def K(self) -> int:
        return self.c.shape[0] - 1

    @property
    def shape(self):
        return self.c.shape[1:]

    @property
    def value(self) -> np.ndarray:
        return self.c[0]

    def deriv(self, d: int) -> np.ndarray:
        """``d``-th derivative at ``x``."""
        if d > self.K:
            raise ValueError(f"jet of order {self.K} has no derivative of degree {d}")
        return self.c[d] * math.factorial(d)

    def derivative(self) -> "Jet":
        if self.K < 1:
            raise ValueError("cannot differentiate an order-0 jet")
        k = np.arange(1, self.K + 1).reshape((-1,) + (1,) * len(self.shape))
        return _wrap(self.x, self.c[1:] * k)

    def truncate(self, K: int) -> "Jet":
        if K > self.K:
            raise ValueError(f"jet of order {self.K} cannot be extended to {K}")
        return _wrap(self.x, self.c[: K + 1])

    def __add__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            c = self.c.copy()
            c[0] = c[0] + other
            return _wrap(self.x, c)
        K = min(self.K, other.K)
        return _wrap(self.x, self.c[: K + 1] + other.c[: K + 1])

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return _wrap(self.x, -self.c)

    def __sub__(self, other) -> "Jet":
        return self + (-other)

    def __rsub__(self, other) -> "Jet":
        return (-self) + other

    def __mul__(self, other) -> "Jet":
        if not isinstance(other, Jet):
            return _wrap(self.x, self.c * other)
        a, b = self.c, other.c
        # scalar jet times matrix jet: broadcast the scalar coefficients
        if a.ndim == 1 and b.ndim == 3:
            a = a[:, None, None]
        elif b.ndim == 1 and a.ndim == 3:
            b = b[:, None, None]
        return _wrap(self.x, _cauchy(a, b, np.multiply))

    def __rmul__(self, other) -> "Jet":
        return self * other

    def __truediv__(self, other) -> "Jet":
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return _wrap(self.x, self.c / other)

    def reciprocal(self) -> "Jet":
        return power(self, -1)

    def __matmul__(self, other: "Jet") -> "Jet":
        return _wrap(self.x, _cauchy(self.c, other.c, np.matmul))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(x={self.x!r}, K={self.K}, shape={self.shape})"


class MatrixJet(Jet):
    """Jet of an ``n x n`` matrix function."""

    __slots__ = ()

    @property
    def n(self) -> int:
        return self.shape[0]

    def dg(self) -> "MatrixJet":
        d = np.zeros_like(self.c)
        idx = np.arange(self.n)
        d[:, idx, idx] = self.c[:, idx, idx]
        return MatrixJet(self.x, d)

    def offdiag(self) -> "MatrixJet":
        return self - self.dg()

    def inv(self) -> "MatrixJet":
        b0 = np.linalg.inv(self.c[0])
        out = np.empty_like(self.c)
        out[0] = b0
        for k in range(1, self.K + 1):
            acc = np.zeros_like(b0)
            for j in range(1, k + 1):
                acc += self.c[j] @ out[k - j]
            out[k] = -b0 @ acc
        return MatrixJet(self.x, out)

    @classmethod
    def identity(cls, x: float, n: int, K: int) -> "MatrixJet":
        c = np.zeros((K + 1, n, n), dtype=complex)
        c[0] = np.eye(n)
        return cls(x, c)

    @classmethod
    def constant(cls, x: float, mat, K: int) -> "MatrixJet":
        mat = np.asarray(mat, dtype=complex)
        c = np.zeros((K + 1,) + mat.shape, dtype=complex)
        c[0] = mat
        return cls(x, c)


def _wrap(x: float, coeffs) -> Jet:
    coeffs = np.asarray(coeffs)
    if coeffs.ndim == 3:
        return MatrixJet(x, coeffs)
    return Jet(x, coeffs)


def _cauchy(a: np.ndarray, b: np.ndarray, op) -> np.ndarray:
    K = min(a.shape[0], b.shape[0]) - 1
    first = op(a[0], b[0])
    out = np.zeros((K + 1,) + np.shape(first), dtype=complex)
    for k in range(K + 1):
        acc = op(a[0], b[k]) if k else first
        for i in range(1, k + 1):
            acc = acc + op(a[i], b[k - i])
        out[k] = acc
    return out


def power(g: Jet, s: Number) -> Jet:
    """``g**s`` for a scalar jet, principal branch at the base point."""
    if g.shape != ():
        raise TypeError("power() needs a scalar jet")
    c = g.c
    g0 = c[0]
    if g0 == 0:
        raise ZeroDivisionError("power of a jet with zero constant term")
    f = np.zeros_like(c)
    f[0] = g0**s
    for k in range(1, g.K + 1):
        j = np.arange(1, k + 1)
        f[k] = np.sum(((s + 1) * j - k) * c[1 : k + 1] * f[k - j]) / (k * g0)
    return Jet(g.x, f)


def monomial(x: float, alpha: float, K: int, shift: Number = 0.0) -> Jet:
    """Exact jet of ``shift + t**alpha`` at ``t = x``."""
    if x <= 0:
        raise ValueError("x must be positive")
    c = np.zeros(K + 1, dtype=complex)
    c[0] = x**alpha
    for k in range(1, K + 1):
        c[k] = c[k - 1] * (alpha - k + 1) / (k * x)
    c[0] += shift
    return Jet(x, c)
