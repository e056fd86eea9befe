"""Transcript atoms as matrix polynomials in derivatives of Q.

Apart from the inverse factors, every atom is a finite sum

    sum_mu C_mu * Q^s(mu) * prod_j (Q^(j))^m_j(mu)

with constant complex ``n x n`` matrices ``C_mu``.  Nothing here depends on
``lambda``; it enters only when a monomial is evaluated or bounded.  The
representation gives a second, independent realization of the transcript
and the entrywise envelopes used for ``eps(X)``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterator, Optional, Tuple

import numpy as np

from .ncalg import Atom, NCExpr, P, S, V
from .realize import base_matrices
from .recur import Transcript

# (exponent of Q, ((j, multiplicity of Q^(j)), ...))
Monomial = Tuple[Fraction, Tuple[Tuple[int, int], ...]]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    d = dict(a[1])
    for j, m in b[1]:
        d[j] = d.get(j, 0) + m
    return (a[0] + b[0], tuple(sorted(d.items())))


def _mono_derivative(mu: Monomial) -> Iterator[Tuple[Fraction, Monomial]]:
    s, derivs = mu
    if s != 0:
        yield s, _mono_mul((s - 1, derivs), (Fraction(0), ((1, 1),)))
    for j, m in derivs:
        d = dict(derivs)
        d[j] -= 1
        if d[j] == 0:
            del d[j]
        d[j + 1] = d.get(j + 1, 0) + 1
        yield Fraction(m), (s, tuple(sorted(d.items())))


class MatPoly:
    """Sparse map monomial -> constant matrix."""

    __slots__ = ("terms", "n")

    def __init__(self, terms: Dict[Monomial, np.ndarray], n: int = 4):
        self.n = n
        self.terms = {k: v for k, v in terms.items() if np.any(v != 0)}

    @classmethod
    def zero(cls, n: int = 4) -> "MatPoly":
        return cls({}, n)

    @classmethod
    def identity(cls, n: int = 4) -> "MatPoly":
        return cls({(Fraction(0), ()): np.eye(n, dtype=complex)}, n)

    def __add__(self, other: "MatPoly") -> "MatPoly":
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return MatPoly(out, self.n)

    def __neg__(self) -> "MatPoly":
        return MatPoly({k: -v for k, v in self.terms.items()}, self.n)

    def __sub__(self, other: "MatPoly") -> "MatPoly":
        return self + (-other)

    def scale(self, c: complex) -> "MatPoly":
        return MatPoly({k: c * v for k, v in self.terms.items()}, self.n)

    def __matmul__(self, other: "MatPoly") -> "MatPoly":
        out: Dict[Monomial, np.ndarray] = {}
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                k = _mono_mul(ka, kb)
                prod = va @ vb
                out[k] = out[k] + prod if k in out else prod
        return MatPoly(out, self.n)

    def times_monomial(self, mu: Monomial, c: complex = 1) -> "MatPoly":
        return MatPoly({_mono_mul(k, mu): c * v for k, v in self.terms.items()}, self.n)

    def derivative(self, alpha: Optional[float] = None) -> "MatPoly":
        """d/dx; monomials containing a vanishing ``Q^(j)`` are dropped when ``alpha`` is given."""
        out: Dict[Monomial, np.ndarray] = {}
        for k, v in self.terms.items():
            for c, mu in _mono_derivative(k):
                if alpha is not None and not _alive(mu, alpha):
                    continue
                add = float(c) * v
                out[mu] = out[mu] + add if mu in out else add
        return MatPoly(out, self.n)

    def dg(self) -> "MatPoly":
        return MatPoly({k: np.diag(np.diag(v)) for k, v in self.terms.items()}, self.n)

    def map_entries(self, f) -> "MatPoly":
        return MatPoly({k: f(v) for k, v in self.terms.items()}, self.n)

    def evaluate(self, alpha: float, lam: complex, x: float) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=complex)
        Q = complex(lam) + x**alpha
        for (s, derivs), v in self.terms.items():
            w = Q ** float(s)
            for j, m in derivs:
                w *= (_falling(alpha, j) * x ** (alpha - j)) ** m
            out += w * v
        return out

    def __len__(self) -> int:
        return len(self.terms)


def _falling(alpha: float, j: int) -> float:
    out = 1.0
    for t in range(j):
        out *= alpha - t
    return out


def _alive(mu: Monomial, alpha: float) -> bool:
    return all(_falling(alpha, j) != 0 for j, _ in mu[1])


class PolyRealizer:
    """Builds :class:`MatPoly` forms of transcript atoms free of inverse factors."""

    def __init__(self, transcript: Transcript, alpha: Optional[float] = None, n: int = 4):
        if n != 4:
            raise NotImplementedError("only n = 4 is wired")
        self.tr = transcript
        self.alpha = alpha
        self.n = n
        self.base = base_matrices(n)
        self._memo: Dict[Atom, MatPoly] = {}
        gap = self.base.omega[None, :] - self.base.omega[:, None]
        np.fill_diagonal(gap, 1.0)
        self._gap = gap

    def atom(self, a: Atom) -> MatPoly:
        hit = self._memo.get(a)
        if hit is None:
            hit = self._memo[a] = self._atom(a)
        return hit

    def _atom(self, a: Atom) -> MatPoly:
        k = a.kind
        if k == "V":
            if a.j == 1 and a.m == 1:
                # p = -(1/4) Q' Q^(-5/4)
                mu = (Fraction(-5, 4), ((1, 1),))
                return MatPoly({mu: -0.25 * self.base.V1_template.astype(complex)}, self.n)
            return self.expr(self.tr.V(a.j, a.m))
        if k in ("S",):
            return self.expr(self.tr.definition(a))
        if k == "Dg":
            return self.expr(a.inner).dg()
        if k == "P":
            def solve(v):
                out = v / self._gap
                np.fill_diagonal(out, 0)
                return out

            return self.atom(V(1, a.m)).map_entries(solve)
        if k == "DP":
            return self.atom(P(a.m)).derivative(self.alpha).times_monomial((Fraction(-1, 4), ()), -1)
        if k == "T":
            Pm, Dl = self.atom(P(a.m)), self.delta(a.m)
            return Dl @ Pm - Pm @ Dl
        raise ValueError(f"{a} has no polynomial form")

    def delta(self, m: int) -> MatPoly:
        out = MatPoly.zero(self.n)
        for j in range(2, min(m, self.tr.M - 1) + 1):
            out = out + self.atom(S(j)).dg()
        return out

    def product(self, factors) -> MatPoly:
        out = MatPoly.identity(self.n)
        for a in factors:
            out = out @ self.atom(a)
        return out

    def expr(self, e: NCExpr) -> MatPoly:
        out = MatPoly.zero(self.n)
        for f, c in e.items():
            out = out + self.product(f).scale(c)
        return out
