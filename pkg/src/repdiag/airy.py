"""Closed-form oracle for ``alpha = 1`` from ``y'''' = z y``.

The recessive solution is

    J(z) = sum_r c_r z^r f_r(z),   f_r(z) = sum_k a_{r,k} z^(5k)

and ``J(w z)`` with ``w = exp(-2 pi i / 5)`` is a second solution, so for
``Q(x) = lambda + x`` the two L2 solutions are ``J(x + lambda)`` and
``J(w (x + lambda))``.  All arithmetic is in mpmath at a working precision
that grows with the cancellation expected in the series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

import mpmath as mp
import numpy as np

from .riccati import MResult, symmetry_defect

# Gamma(j/5), j = 1..4, to 100 significant digits
GAMMA_FIFTHS = (
    "4.590843711998803053204758275929152003434109998293403017788853136230039273106444998974039408287785075",
    "2.218159543757688223059054021907679450770566501771469582241977752646185168123004736510991683356179177",
    "1.489192248812817102394333388321342281320599038759924735338679564045080163121934938245116319794320791",
    "1.164229713725303373636320938268458693141961768891187752984894467861835466078953744755957908037138736",
)
LITERAL_DIGITS = 100

DEFAULT_TERMS = 20
DEFAULT_DPS = 40
TAIL_TOL = 1e-20


class SeriesTruncationError(RuntimeError):
    pass


def gamma_fifth(j: int) -> mp.mpf:
    """``Gamma(j/5)`` for ``j`` in ``-4..4``, ``j != 0``; negatives by reflection."""
    if j == 0 or abs(j) > 4:
        raise ValueError("j must be in -4..4 and nonzero")
    if j > 0:
        return mp.mpf(GAMMA_FIFTHS[j - 1])
    x = mp.mpf(-j) / 5
    # Gamma(-x) Gamma(1+x) = -pi / sin(pi x), Gamma(1+x) = x Gamma(x)
    return -mp.pi / (mp.sin(mp.pi * x) * x * gamma_fifth(-j))


@dataclass(frozen=True)
class AiryConstants:
    c: Tuple[mp.mpf, ...]
    dps: int


@lru_cache(maxsize=None)
def airy_constants(dps: int = DEFAULT_DPS) -> AiryConstants:
    with mp.workdps(dps):
        g = gamma_fifth
        five = mp.mpf(5)
        c = (
            g(1) * g(2) * g(3),
            g(-1) * g(1) * g(2) * five ** (-mp.mpf(4) / 5),
            g(-2) * g(-1) * g(1) * five ** (-mp.mpf(8) / 5),
            g(-3) * g(-2) * g(-1) * five ** (-mp.mpf(12) / 5),
        )
    return AiryConstants(c, dps)


def series_coefficients(r: int, terms: int) -> List[mp.mpf]:
    """``a_{r,0..terms-1}`` of ``f_r``."""
    if not 0 <= r <= 3:
        raise ValueError("r must be in 0..3")
    a = [mp.mpf(1)]
    for k in range(1, terms):
        e = 5 * k + r
        a.append(a[-1] / (e * (e - 1) * (e - 2) * (e - 3)))
    return a


@dataclass(frozen=True)
class SeriesValue:
    """``d^d/dz^d [z^r f_r(z)]`` for ``d = 0..3`` plus a bound on the dropped tail."""

    derivs: Tuple[mp.mpc, ...]
    tail: mp.mpf
    terms: int


def _falling(e: int, d: int) -> int:
    out = 1
    for t in range(d):
        out *= e - t
    return out


def f_series(r: int, z, terms: int = DEFAULT_TERMS) -> SeriesValue:
    """Termwise derivatives 0..3 of ``z^r f_r(z)`` truncated after ``terms`` terms.

    The tail bound is the first dropped term (largest over the four
    derivative orders) times a geometric factor, valid once the term ratio
    is below 1/2.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    z = mp.mpc(z)
    a = series_coefficients(r, terms + 2)
    out = [mp.mpc(0)] * 4
    for k in range(terms):
        e = 5 * k + r
        zk = a[k] * mp.power(z, e - 3) if e >= 3 else None
        for d in range(4):
            if e - d < 0:
                continue
            ff = _falling(e, d)
            term = zk * ff * z ** (3 - d) if zk is not None else a[k] * ff * mp.power(z, e - d)
            out[d] += term
    tail = mp.mpf(0)
    az = abs(z)
    for d in range(4):
        e = 5 * terms + r
        nxt = a[terms] * _falling(e, d) * az ** max(e - d, 0)
        e2 = e + 5
        ratio = (a[terms + 1] / a[terms]) * (mp.mpf(_falling(e2, d)) / max(_falling(e, d), 1)) * az**5
        tail = max(tail, nxt / (1 - ratio) if ratio < 0.5 else mp.inf)
    return SeriesValue(tuple(out), tail, terms)


def _working_dps(z) -> int:
    # J is recessive: the partial sums cancel by about exp(1.6 |z|^(5/4))
    lost = int(math.ceil(1.6 * abs(complex(z)) ** 1.25 / math.log(10)))
    if lost > LITERAL_DIGITS - 20:
        raise SeriesTruncationError(f"|z| = {abs(complex(z)):.3g} needs more than {LITERAL_DIGITS} digits of Gamma(j/5)")
    return DEFAULT_DPS + lost


def recessive_solution(z, phase=1, terms: int = DEFAULT_TERMS, tol: float = TAIL_TOL, max_terms: int = 640):
    """``(J, J', J'', J''')`` of ``x -> J(phase * x)`` at ``x = z``.

    ``phase`` must be a fifth root of unity.  Terms double from ``terms``
    until the tail bound falls below ``tol`` relative to ``|J|`` and its
    derivatives.
    """
    dps = _working_dps(z)
    with mp.workdps(dps):
        c = airy_constants(dps).c
        w = mp.mpc(phase)
        n = terms
        while True:
            vals = [mp.mpc(0)] * 4
            tail = mp.mpf(0)
            for r in range(4):
                s = f_series(r, z, n)
                coef = c[r] * w**r
                for d in range(4):
                    vals[d] += coef * s.derivs[d]
                tail += abs(c[r]) * s.tail
            scale = min(abs(v) for v in vals)
            if tail <= tol * scale:
                return tuple(vals), tail, n
            if n >= max_terms:
                raise SeriesTruncationError(f"tail {mp.nstr(tail, 3)} at z={z} with {n} terms")
            n *= 2


def fifth_root_phase(sign: int = -1):
    return mp.exp(sign * 2j * mp.pi / 5)


def oracle_frame(lam: complex, x: float = 0.0, terms: int = DEFAULT_TERMS, sign: int = -1):
    """``(sigma, tau)`` of ``psi_1 = J(x+lam)``, ``psi_2 = J(w(x+lam))`` as mpmath matrices."""
    z = mp.mpc(lam) + x
    with mp.workdps(_working_dps(z)):
        p1, _, n1 = recessive_solution(z, 1, terms)
        p2, _, n2 = recessive_solution(z, fifth_root_phase(sign), terms)
        sigma = mp.matrix([[p1[0], p2[0]], [p1[1], p2[1]]])
        tau = mp.matrix([[-p1[3], -p2[3]], [p1[2], p2[2]]])
    return sigma, tau, max(n1, n2)


def oracle_vectors(lam: complex, x: float) -> np.ndarray:
    """4 x 2 complex array of ``(psi, psi', psi'', psi''')`` for both oracle columns."""
    sigma, tau, _ = oracle_frame(lam, x)
    rows = [sigma[0, :], sigma[1, :], tau[1, :], -tau[0, :]]
    return np.array([[complex(v) for v in row] for row in rows])


def airy_m_matrix_mp(lam: complex, terms: int = DEFAULT_TERMS, sign: int = -1):
    """``M = tau sigma^-1`` at ``x = 0`` in extended precision."""
    sigma, tau, n = oracle_frame(lam, 0.0, terms, sign)
    with mp.workdps(_working_dps(lam)):
        return tau * sigma**-1, n


def airy_m_matrix(lam: complex, terms: int = DEFAULT_TERMS) -> MResult:
    if complex(lam).imag <= 0:
        raise ValueError("need Im lambda > 0")
    Mmp, n = airy_m_matrix_mp(lam, terms)
    M = np.array([[complex(Mmp[i, j]) for j in range(2)] for i in range(2)])
    return MResult(M, symmetry_defect(M), 0.0, 0.0, "airy", {"terms": n})


def ode_residual(z, r: int, terms: int = DEFAULT_TERMS) -> Tuple[mp.mpf, mp.mpf]:
    """``|y'''' - z y|`` for ``y = z^r f_r`` truncated, and the first dropped term of ``z y``."""
    with mp.workdps(_working_dps(z)):
        z = mp.mpc(z)
        a = series_coefficients(r, terms + 1)
        y = sum(a[k] * mp.power(z, 5 * k + r) for k in range(terms))
        d4 = sum(a[k] * _falling(5 * k + r, 4) * mp.power(z, 5 * k + r - 4) for k in range(1, terms))
        dropped = abs(a[terms - 1] * mp.power(z, 5 * (terms - 1) + r + 1))
        return abs(d4 - z * y), dropped


def column_match(approx: np.ndarray, exact: np.ndarray) -> Tuple[complex, float]:
    """Best scalar ``c`` with ``approx ~ c * exact`` and the 2-norm residual."""
    c = np.vdot(exact, approx) / np.vdot(exact, exact)
    return complex(c), float(np.linalg.norm(approx - c * exact))


def sample_modulus(lam: complex, xs: Sequence[float], column: int = 1) -> List[float]:
    return [abs(oracle_vectors(lam, x)[0, column]) for x in xs]
