"""Power-law envelopes on ``[X, oo)`` and the certified seed error ``eps(X)``.

Every realized matrix ``F(x)`` gets an envelope ``max_ij |F_ij(x)| <= c x^-e``
valid for all ``x >= X``.  Scalars come from exact derivatives of
``Q = lambda + x^alpha`` together with

    x^alpha / k <= |Q(x)| <= k_up x^alpha,
    k = (1 - X^-alpha)^-1,  k_up = 1 + |lambda| X^-alpha,

the lower bound needing ``Re lambda >= -1``.  Matrix products cost a factor
``n`` in the max-entry norm.  Derivatives of atoms are bounded through
their definitions with Leibniz' rule, so no atom is ever bounded at a single
point only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import sympy as sp

from .matpoly import MatPoly, Monomial, PolyRealizer
from .ncalg import Atom, NCExpr, P, S
from .realize import Realizer, default_order, make_context
from .recur import Transcript, generate_transcript

N = 4
# min |omega_j - omega_k| over j != k for the fourth roots of unity
ROOT_GAP = math.sqrt(2.0)
# max |entry| of V_1 / p
V1_ENTRY = math.sqrt(2.0) / 2


class EnvelopeError(ValueError):
    """An envelope cannot be made valid at the requested anchor."""


@dataclass(frozen=True)
class PowerEnvelope:
    """``|f(x)| <= c x^-e`` for ``x >= X``."""

    c: float
    e: float
    X: float

    def __post_init__(self):
        if self.c < 0:
            raise ValueError("envelope constant must be non-negative")

    def __call__(self, x: float) -> float:
        return self.c * x ** (-self.e)

    @property
    def at_anchor(self) -> float:
        return self(self.X)

    def _anchor(self, other: "PowerEnvelope") -> float:
        return max(self.X, other.X)

    def __mul__(self, other):
        if isinstance(other, PowerEnvelope):
            return PowerEnvelope(self.c * other.c, self.e + other.e, self._anchor(other))
        return PowerEnvelope(self.c * abs(other), self.e, self.X)

    __rmul__ = __mul__

    def __add__(self, other: "PowerEnvelope") -> "PowerEnvelope":
        X = self._anchor(other)
        if other.c == 0:
            return PowerEnvelope(self.c, self.e, X)
        if self.c == 0:
            return PowerEnvelope(other.c, other.e, X)
        e = min(self.e, other.e)
        c = self.c * X ** (e - self.e) + other.c * X ** (e - other.e)
        return PowerEnvelope(c, e, X)

    def tail_integral(self) -> float:
        """Bound on ``int_X^oo f``."""
        if self.e <= 1:
            raise EnvelopeError(f"exponent {self.e} is not integrable")
        return self.c * self.X ** (1 - self.e) / (self.e - 1)

    @classmethod
    def zero(cls, X: float) -> "PowerEnvelope":
        return cls(0.0, 0.0, X)

    @classmethod
    def constant(cls, c: float, X: float) -> "PowerEnvelope":
        return cls(c, 0.0, X)


def q_lower_bound(alpha: float, X: float) -> float:
    """``k`` with ``|Q(x)| >= x^alpha / k`` on ``[X, oo)`` whenever ``Re lambda >= -1``."""
    if X <= 1:
        raise ValueError("X must exceed 1")
    return 1.0 / (1.0 - X ** (-alpha))


def q_upper_factor(alpha: float, lam: complex, X: float) -> float:
    return 1.0 + abs(lam) * X ** (-alpha)


def falling(alpha: float, j: int) -> float:
    out = 1.0
    for t in range(j):
        out *= alpha - t
    return out


@lru_cache(maxsize=None)
def _monomials(power: sp.Rational, r: int, with_derivative: bool) -> Tuple[Tuple[float, Tuple[Tuple[int, int], ...], float], ...]:
    """``d^r/dx^r`` of ``Q^power`` (or of ``(Q^power)'``) as (coeff, ((j, mult), ...), s) monomials in ``Q^(j)`` and ``Q^s``."""
    x = sp.Symbol("x")
    Q = sp.Function("Q")(x)
    f = Q**power
    total = r + (1 if with_derivative else 0)
    expr = sp.expand(sp.diff(f, x, total)) if total else f
    out = []
    for term in sp.Add.make_args(expr):
        coeff, factors = term.as_coeff_mul()
        derivs: Dict[int, int] = {}
        s = sp.Integer(0)
        for fac in factors:
            base, ex = fac.as_base_exp()
            if isinstance(base, sp.Derivative):
                j = sum(cnt for _, cnt in base.variable_count)
                derivs[j] = derivs.get(j, 0) + int(ex)
            elif base == Q:
                s += ex
            else:
                raise AssertionError(f"unexpected factor {fac}")
        out.append((float(coeff), tuple(sorted(derivs.items())), float(s)))
    return tuple(out)


def bound_q_power_derivative(alpha: float, X: float, k: float, k_up: float, power, r: int, with_derivative: bool = False) -> PowerEnvelope:
    """Envelope of ``d^r/dx^r Q^power`` (shifted by one derivative if ``with_derivative``)."""
    env = PowerEnvelope.zero(X)
    for coeff, derivs, s in _monomials(sp.Rational(power), r, with_derivative):
        c = abs(coeff)
        e = 0.0
        for j, mult in derivs:
            c *= abs(falling(alpha, j)) ** mult
            e += (j - alpha) * mult
        if c == 0:
            continue
        c *= (k ** (-s)) if s < 0 else (k_up**s)
        e += -alpha * s
        env = env + PowerEnvelope(c, e, X)
    return env


def bound_p_derivative(alpha: float, X: float, k: float, r: int) -> PowerEnvelope:
    """Envelope of ``|p^(r)|`` with ``p = (Q^(-1/4))'``."""
    if r < 0:
        raise ValueError("r must be >= 0")
    return bound_q_power_derivative(alpha, X, k, 1.0, sp.Rational(-1, 4), r, with_derivative=True)


class EnvelopeBuilder:
    """Envelopes for derivatives of transcript atoms and expressions."""

    def __init__(self, transcript: Transcript, alpha: float, lam: complex, X: float):
        if complex(lam).real < -1:
            raise EnvelopeError("envelopes need Re lambda >= -1")
        self.tr = transcript
        self.M = transcript.M
        self.alpha = alpha
        self.lam = complex(lam)
        self.X = X
        self.k = q_lower_bound(alpha, X)
        self.k_up = q_upper_factor(alpha, lam, X)
        self._memo: Dict[Tuple[Atom, int], PowerEnvelope] = {}
        self.p_bound_at_X: Dict[int, float] = {}

    # scalars
    def p(self, r: int) -> PowerEnvelope:
        return bound_p_derivative(self.alpha, self.X, self.k, r)

    def q_iroot(self, r: int) -> PowerEnvelope:
        return bound_q_power_derivative(self.alpha, self.X, self.k, self.k_up, sp.Rational(-1, 4), r)

    def q_root(self) -> PowerEnvelope:
        return PowerEnvelope(self.k_up**0.25, -self.alpha / 4, self.X)

    # matrices
    def atom(self, a: Atom, r: int = 0) -> PowerEnvelope:
        key = (a, r)
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = self._atom(a, r)
        return hit

    def _leibniz(self, f, g, r: int, factor: float) -> PowerEnvelope:
        env = PowerEnvelope.zero(self.X)
        for i in range(r + 1):
            env = env + f(i) * g(r - i) * (math.comb(r, i) * factor)
        return env

    def _inverse_norm(self, m: int) -> float:
        b = self.P_at_X(m)
        return 1.0 + b / (1.0 - N * b)

    def P_at_X(self, m: int) -> float:
        b = self.atom(P(m)).at_anchor
        self.p_bound_at_X[m] = b
        if N * b >= 1:
            raise EnvelopeError(f"|P{m}| bound {b:.3g} at X={self.X} is not below 1/{N}")
        return b

    def _atom(self, a: Atom, r: int) -> PowerEnvelope:
        k = a.kind
        if k == "V":
            if a.j == 1 and a.m == 1:
                return self.p(r) * V1_ENTRY
            return self.expr(self.tr.V(a.j, a.m), r)
        if k in ("S", "E"):
            return self.expr(self.tr.definition(a), r)
        if k == "Dg":
            return self.expr(a.inner, r)
        if k == "P":
            from .ncalg import V

            return self.atom(V(1, a.m), r) * (1 / ROOT_GAP)
        if k == "DP":
            # -(Q^(-1/4) P')^(r): the scalar factor costs no n
            return self._leibniz(self.q_iroot, lambda i: self.atom(P(a.m), i + 1), r, 1.0)
        if k == "T":
            # Delta is diagonal, so |Delta P| <= |Delta| |P| entrywise
            return self._leibniz(lambda i: self.delta(a.m, i), lambda i: self.atom(P(a.m), i), r, 2.0)
        if r > 0:
            raise EnvelopeError(f"derivatives of {a} are never needed")
        if k == "IP":
            return PowerEnvelope.constant(1.0 + self.P_at_X(a.m), self.X)
        if k == "A":
            return PowerEnvelope.constant(self._inverse_norm(a.m), self.X)
        raise KeyError(f"unknown atom kind {k!r}")

    def delta(self, m: int, r: int) -> PowerEnvelope:
        env = PowerEnvelope.zero(self.X)
        for j in range(2, min(m, self.M - 1) + 1):
            env = env + self.atom(S(j), r)
        return env

    def product(self, factors: Sequence[Atom], r: int) -> PowerEnvelope:
        if not factors:
            return PowerEnvelope.constant(1.0 if r == 0 else 0.0, self.X)
        if len(factors) == 1:
            return self.atom(factors[0], r)
        head, rest = factors[0], factors[1:]
        return self._leibniz(lambda i: self.atom(head, i), lambda i: self.product(rest, i), r, float(N))

    def expr(self, e: NCExpr, r: int = 0) -> PowerEnvelope:
        env = PowerEnvelope.zero(self.X)
        for f, c in e.items():
            env = env + self.product(f, r) * abs(c)
        return env


def bound_expr_norm(e: NCExpr, transcript: Transcript, alpha: float, lam: complex, X: float) -> PowerEnvelope:
    return EnvelopeBuilder(transcript, alpha, lam, X).expr(e)


def monomial_envelope(mu: Monomial, alpha: float, X: float, k: float, k_up: float) -> PowerEnvelope:
    """Envelope of ``|Q^s prod_j (Q^(j))^m_j|``."""
    s, derivs = mu
    s = float(s)
    c = (k ** (-s)) if s < 0 else (k_up**s)
    e = -alpha * s
    for j, m in derivs:
        c *= abs(falling(alpha, j)) ** m
        e += (j - alpha) * m
    return PowerEnvelope(c, e, X)


def matpoly_entry_bound(poly: MatPoly, alpha: float, X: float, k: float, k_up: float):
    """``(B, e)`` with ``|F_ij(x)| <= B_ij x^-e`` on ``[X, oo)`` for the realized ``poly``."""
    if not poly.terms:
        return np.zeros((poly.n, poly.n)), 0.0
    envs = {mu: monomial_envelope(mu, alpha, X, k, k_up) for mu in poly.terms}
    e = min(env.e for env in envs.values())
    B = np.zeros((poly.n, poly.n))
    for mu, C in poly.terms.items():
        env = envs[mu]
        B += np.abs(C) * env.c * X ** (e - env.e)
    return B, e


def split_chain_term(factors: Sequence[Atom]):
    """Split ``A... (middle) IP...`` into its three parts."""
    i = 0
    while i < len(factors) and factors[i].kind == "A":
        i += 1
    j = len(factors)
    while j > i and factors[j - 1].kind == "IP":
        j -= 1
    middle = tuple(factors[i:j])
    if any(a.kind in ("A", "IP", "E") for a in middle):
        raise EnvelopeError(f"term {factors} is not of chain form")
    return tuple(factors[:i]), middle, tuple(factors[j:])


class StructuredBounds:
    """Entrywise envelopes through the polynomial form of each atom.

    Inverse and ``I+P`` factors only ever sit at the ends of remainder
    terms; there they are bounded in the induced row-sum and column-sum
    norms, which for max-entry norms give
    ``|A F B|_max <= |A|_inf |F|_max |B|_1``.
    """

    def __init__(self, transcript: Transcript, alpha: float, lam: complex, X: float):
        if complex(lam).real < -1:
            raise EnvelopeError("envelopes need Re lambda >= -1")
        self.tr = transcript
        self.alpha = alpha
        self.X = X
        self.k = q_lower_bound(alpha, X)
        self.k_up = q_upper_factor(alpha, lam, X)
        self.poly = PolyRealizer(transcript, alpha)

    def entry_bound(self, poly: MatPoly):
        return matpoly_entry_bound(poly, self.alpha, self.X, self.k, self.k_up)

    def envelope(self, poly: MatPoly) -> PowerEnvelope:
        B, e = self.entry_bound(poly)
        return PowerEnvelope(float(B.max()), e, self.X)

    def atom(self, a: Atom) -> PowerEnvelope:
        return self.envelope(self.poly.atom(a))

    def P_norms(self, m: int) -> Tuple[float, float, float]:
        """max-entry, row-sum and column-sum bounds of ``P_m`` on ``[X, oo)``."""
        B, e = self.entry_bound(self.poly.atom(P(m)))
        B = B * self.X ** (-e)
        return float(B.max()), float(B.sum(axis=1).max()), float(B.sum(axis=0).max())

    def _chain(self, atoms: Sequence[Atom]) -> float:
        out = 1.0
        for a in atoms:
            _, row, col = self.P_norms(a.m)
            if a.kind == "A":
                if row >= 1:
                    raise EnvelopeError(f"|P{a.m}|_inf bound {row:.3g} >= 1")
                out *= 1.0 / (1.0 - row)
            else:
                out *= 1.0 + col
        return out

    def remainder(self, M: Optional[int] = None) -> PowerEnvelope:
        """Envelope of ``max_ij |E_M(x)_ij|``."""
        M = self.tr.M if M is None else M
        groups: Dict[Tuple[Tuple[Atom, ...], Tuple[Atom, ...]], MatPoly] = {}
        for f, c in self.tr.expanded_E(M).items():
            left, middle, right = split_chain_term(f)
            part = self.poly.product(middle).scale(c)
            key = (left, right)
            groups[key] = groups[key] + part if key in groups else part
        env = PowerEnvelope.zero(self.X)
        for (left, right), poly in groups.items():
            env = env + self.envelope(poly) * (self._chain(left) * self._chain(right))
        return env


@dataclass
class EpsilonReport:
    eps: Optional[float]
    I: float
    X: float
    M: int
    alpha: float
    lam: complex
    method: str = "structured"
    envelopes: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    flags: Dict[str, bool] = field(default_factory=dict)
    message: str = ""

    @property
    def valid(self) -> bool:
        return bool(self.flags) and all(self.flags.values()) and self.eps is not None

    def as_dict(self) -> dict:
        return {
            "eps": self.eps,
            "I": self.I,
            "X": self.X,
            "M": self.M,
            "alpha": self.alpha,
            "lambda": {"re": self.lam.real, "im": self.lam.imag},
            "method": self.method,
            "envelopes": {k: {"c": c, "e": e} for k, (c, e) in self.envelopes.items()},
            "flags": dict(self.flags),
            "valid": self.valid,
            "message": self.message,
        }


def epsilon_of_X(
    alpha: float,
    lam: complex,
    X: float,
    M: int = 6,
    transcript: Optional[Transcript] = None,
    method: str = "structured",
) -> EpsilonReport:
    """``eps = I / (1 - n I)`` with ``I >= int_X^oo |Q^(1/4)| |E_M|``.

    ``method="structured"`` bounds through the polynomial form of the atoms;
    ``method="coarse"`` uses only max-entry norms and ``|AB| <= n |A||B|``.
    """
    if method not in ("structured", "coarse"):
        raise ValueError(f"unknown method {method!r}")
    tr = transcript if transcript is not None else generate_transcript(M)
    lam = complex(lam)
    rep = EpsilonReport(None, math.inf, X, M, alpha, lam, method)
    try:
        if method == "structured":
            SB = StructuredBounds(tr, alpha, lam, X)
            for m in range(1, M):
                env = SB.atom(P(m))
                rep.envelopes[f"P{m}"] = (env.c, env.e)
                rep.flags[f"|P{m}|<1/4"] = env.at_anchor < 1 / N
            E_env = SB.remainder(M)
            root = PowerEnvelope(SB.k_up**0.25, -alpha / 4, X)
        else:
            B = EnvelopeBuilder(tr, alpha, lam, X)
            for m in range(1, M):
                env = B.atom(P(m))
                rep.envelopes[f"P{m}"] = (env.c, env.e)
                rep.flags[f"|P{m}|<1/4"] = B.P_at_X(m) < 1 / N
            E_env = B.expr(tr.E(M))
            root = B.q_root()
        rep.envelopes[f"E{M}"] = (E_env.c, E_env.e)
        rep.I = (root * E_env).tail_integral()
    except EnvelopeError as exc:
        rep.flags["envelopes"] = False
        rep.message = str(exc)
        return rep
    rep.flags["nI<1"] = N * rep.I < 1
    if rep.flags["nI<1"]:
        rep.eps = rep.I / (1 - N * rep.I)
    else:
        rep.message = f"n*I = {N * rep.I:.3g} >= 1"
    return rep


@dataclass
class DichotomyReport:
    ok: bool
    pairs: Dict[Tuple[int, int], bool]
    remainder_exponent: float
    grid: Tuple[float, ...]


def check_dichotomy(
    alpha: float,
    lam: complex,
    X: float,
    M: int = 6,
    transcript: Optional[Transcript] = None,
    grid: Optional[Iterable[float]] = None,
) -> DichotomyReport:
    """Sign test of ``Re{(w_j - w_k + d_j - d_k) Q^(1/4)}`` on a grid, plus remainder integrability."""
    tr = transcript if transcript is not None else generate_transcript(M)
    xs = tuple(np.geomspace(X, 100 * X, 40) if grid is None else grid)
    omega = np.array([1, 1j, -1, -1j])
    values = []
    for x in xs:
        R = Realizer(make_context(alpha, lam, x, default_order(M)), tr)
        d = np.diag(R.delta(M).value)
        root = complex(R.ctx.Q_root.value)
        values.append(((omega + d)[:, None] - (omega + d)[None, :]) * root)
    values = np.real(np.array(values))
    pairs = {}
    for j in range(4):
        for k in range(4):
            if j == k:
                continue
            v = values[:, j, k]
            pairs[(j + 1, k + 1)] = bool(np.all(v >= 0) or np.all(v <= 0))
    exponent = M * (1 + alpha / 4) - alpha / 4
    return DichotomyReport(all(pairs.values()) and exponent > 1, pairs, exponent, xs)
