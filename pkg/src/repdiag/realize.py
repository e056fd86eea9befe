"""Numerical realization of transcript expressions for Q(x) = lambda + x**alpha.

Atoms become ``n x n`` matrix jets at a point ``x``; derivatives of the
correctors ``P_m`` come from jet arithmetic, so the depth of the
``P_m -> P'_m -> S_{m+1} -> P_{m+1}`` chain is limited only by the jet order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from .jets import Jet, MatrixJet, monomial, power
from .ncalg import Atom, NCExpr, P, S, V
from .recur import Transcript


class RealizationError(RuntimeError):
    """Raised when an expression cannot be evaluated at the requested point."""


@dataclass(frozen=True)
class BaseMatrices:
    n: int
    omega: np.ndarray
    D: np.ndarray
    Omega: np.ndarray
    Omega_inv: np.ndarray
    C: np.ndarray
    V1_template: np.ndarray  # V_1 = p * V1_template


def base_matrices(n: int = 4) -> BaseMatrices:
    k = np.arange(n)
    omega = np.exp(2j * np.pi * k / n)
    if n == 4:
        omega = np.array([1, 1j, -1, -1j], dtype=complex)
    Omega = omega[None, :] ** k[:, None]
    Omega_inv = omega[:, None] ** (-k[None, :]) / n
    # R = -Omega^-1 (Q'/(nQ)) dg(0..n-1) Omega = (Q' Q^(-1-1/n)) C
    C = -Omega_inv @ np.diag(k.astype(complex)) @ Omega / n
    # Q' Q^(-1-1/n) = -n p
    V1_template = -n * (C - np.diag(np.diag(C)))
    return BaseMatrices(n, omega, np.diag(omega), Omega, Omega_inv, C, V1_template)


@dataclass
class ScalarContext:
    alpha: float
    lam: complex
    x: float
    K: int
    n: int
    Q: Jet
    Q_root: Jet  # Q^(1/n)
    Q_iroot: Jet  # Q^(-1/n)
    p: Jet
    base: BaseMatrices = field(repr=False)

    def q_derivative(self, j: int) -> complex:
        return complex(self.Q.deriv(j))


def make_context(alpha: float, lam: complex, x: float, K: int, n: int = 4) -> ScalarContext:
    if x <= 0:
        raise ValueError("x must be positive")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if K < 1:
        raise ValueError("jet order K must be >= 1")
    Q = monomial(x, alpha, K + 1, shift=complex(lam))
    Q_iroot = power(Q, -1.0 / n)
    p = Q_iroot.derivative()
    return ScalarContext(
        alpha=alpha,
        lam=complex(lam),
        x=x,
        K=K,
        n=n,
        Q=Q,
        Q_root=power(Q, 1.0 / n).truncate(K),
        Q_iroot=Q_iroot.truncate(K),
        p=p,
        base=base_matrices(n),
    )


def realize_level1(ctx: ScalarContext) -> Tuple[MatrixJet, MatrixJet]:
    """``D_1 = D + (n-1)/2 p I`` and ``V_1 = p * template``."""
    n, K = ctx.n, ctx.p.K
    D1 = MatrixJet.constant(ctx.x, ctx.base.D, K) + ctx.p * MatrixJet.identity(ctx.x, n, K) * ((n - 1) / 2)
    V1 = ctx.p * MatrixJet.constant(ctx.x, ctx.base.V1_template, K)
    return D1, V1


def realize_P(V1m: MatrixJet, omega: Optional[np.ndarray] = None, tol: float = 1e-12) -> MatrixJet:
    """Solve ``P D - D P = V`` entrywise with zero diagonal."""
    n = V1m.n
    if omega is None:
        omega = base_matrices(n).omega
    diag = np.abs(V1m.c[:, np.arange(n), np.arange(n)])
    scale = max(1.0, float(np.abs(V1m.c).max()))
    if diag.max(initial=0.0) > tol * scale:
        raise ValueError("V_{1,m} must have zero diagonal")
    gap = omega[None, :] - omega[:, None]
    np.fill_diagonal(gap, 1.0)
    c = V1m.c / gap[None]
    c[:, np.arange(n), np.arange(n)] = 0
    return MatrixJet(V1m.x, c)


class Realizer:
    """Evaluates transcript atoms at one point, memoizing per atom."""

    def __init__(self, ctx: ScalarContext, transcript: Transcript):
        self.ctx = ctx
        self.tr = transcript
        self.M = transcript.M
        self._memo: Dict[Atom, MatrixJet] = {}
        self._D1, self._V1 = realize_level1(ctx)

    @property
    def n(self) -> int:
        return self.ctx.n

    def _eye(self, K: int) -> MatrixJet:
        return MatrixJet.identity(self.ctx.x, self.n, K)

    def atom(self, a: Atom) -> MatrixJet:
        hit = self._memo.get(a)
        if hit is None:
            hit = self._memo[a] = self._atom(a)
        return hit

    def _atom(self, a: Atom) -> MatrixJet:
        k = a.kind
        try:
            if k == "V":
                if a.j == 1 and a.m == 1:
                    return self._V1
                return self.expr(self.tr.V(a.j, a.m))
            if k in ("S", "E"):
                return self.expr(self.tr.definition(a))
            if k == "P":
                return realize_P(self.atom(V(1, a.m)), self.ctx.base.omega)
            if k == "DP":
                dP = self.atom(P(a.m)).derivative()
                return -(self.ctx.Q_iroot * dP)
            if k == "T":
                Pm, Dl = self.atom(P(a.m)), self.delta(a.m)
                return Dl @ Pm - Pm @ Dl
            if k == "IP":
                Pm = self.atom(P(a.m))
                return self._eye(Pm.K) + Pm
            if k == "A":
                Pm = self.atom(P(a.m))
                IP = self._eye(Pm.K) + Pm
                if np.linalg.cond(IP.value) > 1e12:
                    raise RealizationError(f"I+P{a.m} is singular at x={self.ctx.x}")
                return IP.inv()
            if k == "Dg":
                return self.expr(a.inner).dg()
        except ValueError as exc:
            raise RealizationError(f"cannot realize {a} at x={self.ctx.x}: {exc}") from exc
        raise KeyError(f"unknown atom kind {k!r}")

    def expr(self, e: NCExpr, order: Optional[int] = None) -> MatrixJet:
        total = None
        for f, c in e.items():
            prod = None
            for a in f:
                j = self.atom(a)
                if order is not None and j.K > order:
                    j = j.truncate(order)
                prod = j if prod is None else prod @ j
            if prod is None:
                prod = self._eye(self.ctx.K if order is None else order)
            term = prod * c
            total = term if total is None else total + term
        if total is None:
            K = self.ctx.K if order is None else order
            return MatrixJet(self.ctx.x, np.zeros((K + 1, self.n, self.n), dtype=complex))
        return total

    def value(self, e: NCExpr) -> np.ndarray:
        return self.expr(e, order=0).value

    def delta(self, m: int) -> MatrixJet:
        """``Delta_m = sum_{j=2..m} dg S_j`` (``S_M`` is never formed)."""
        top = min(m, self.M - 1)
        out = None
        for j in range(2, top + 1):
            d = self.atom(S(j)).dg()
            out = d if out is None else out + d
        if out is None:
            return MatrixJet(self.ctx.x, np.zeros((self.ctx.K + 1, self.n, self.n), dtype=complex))
        return out

    def D(self, m: int) -> MatrixJet:
        return self._D1 + self.delta(m)

    def F(self, m: int) -> np.ndarray:
        """Value of the full coefficient matrix ``Q^(1/n)(D_m + V_m + E_m)``."""
        acc = self.D(m).value.copy()
        if m < self.M:
            for j in range(1, self.tr.mu(m) + 1):
                acc = acc + self.value(self.tr.V(j, m))
        acc = acc + self.value(self.tr.E(m))
        return self.ctx.Q_root.value * acc

    def transfer_product(self, upto: Optional[int] = None) -> np.ndarray:
        """Value of ``(I+P_1)(I+P_2)...(I+P_{upto})``, ``upto`` defaulting to ``M-1``."""
        top = self.M - 1 if upto is None else upto
        out = np.eye(self.n, dtype=complex)
        for m in range(1, top + 1):
            out = out @ (np.eye(self.n) + self.atom(P(m)).value)
        return out


def realize_expr(e: NCExpr, ctx: ScalarContext, transcript: Transcript) -> MatrixJet:
    return Realizer(ctx, transcript).expr(e)


def default_order(M: int) -> int:
    return M + 2
