"""Asymptotic solution frame at the matching point X.

At ``x = X`` the exponential factor of the Levinson solution is exactly 1,
so column ``k`` of the solution vector ``(y, y', y'', y''')`` is

    dg(1, Q^(1/4), Q^(1/2), Q^(3/4)) . Omega . (I+P_1)...(I+P_{M-1}) . e_k

up to the uncertainty ``u`` with ``|u| <= eps(X)``.  The two L2 solutions for
``Im lambda > 0`` belong to ``omega = i`` and ``omega = -1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .realize import Realizer, default_order, make_context
from .recur import Transcript, generate_transcript

#: zero-based columns of the decaying solutions (omega = i, -1)
DECAYING = (1, 2)


@dataclass(frozen=True)
class SolutionFrame:
    """Values of two solutions at ``x``: ``sigma`` rows (psi, psi'), ``tau`` rows (-psi''', psi'')."""

    sigma: np.ndarray
    tau: np.ndarray
    sigma_radius: np.ndarray
    tau_radius: np.ndarray
    alpha: float
    lam: complex
    x: float
    M: int
    columns: Tuple[int, ...] = DECAYING

    @property
    def vectors(self) -> np.ndarray:
        """4 x 2 matrix of ``(y, y', y'', y''')`` per column."""
        return frame_to_vectors(self.sigma, self.tau)

    def rank_condition(self) -> float:
        return float(np.linalg.cond(self.vectors))


def vectors_to_frame(Y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Split stacked ``(y, y', y'', y''')`` columns into ``(sigma, tau)``."""
    sigma = np.array([Y[0], Y[1]])
    tau = np.array([-Y[3], Y[2]])
    return sigma, tau


def frame_to_vectors(sigma: np.ndarray, tau: np.ndarray) -> np.ndarray:
    return np.array([sigma[0], sigma[1], tau[1], -tau[0]])


def transfer_product(realizer: Realizer, upto: Optional[int] = None) -> np.ndarray:
    """``(I+P_1)(I+P_2)...(I+P_upto)`` at the realizer's point."""
    return realizer.transfer_product(upto)


def leading_matrix(realizer: Realizer) -> np.ndarray:
    """``dg(1, Q^(1/4), ..., Q^(3/4)) . Omega . (I+P)`` at the realizer's point."""
    ctx = realizer.ctx
    root = complex(ctx.Q_root.value)
    scale = np.diag([root**r for r in range(ctx.n)])
    return scale @ ctx.base.Omega @ realizer.transfer_product()


def solution_frame(
    alpha: float,
    lam: complex,
    X: float,
    M: int = 6,
    eps: float = 0.0,
    transcript: Optional[Transcript] = None,
    columns: Tuple[int, ...] = DECAYING,
) -> SolutionFrame:
    if X <= 1:
        raise ValueError("X must exceed 1")
    tr = transcript if transcript is not None else generate_transcript(M)
    if tr.M != M:
        raise ValueError(f"transcript depth {tr.M} does not match M={M}")
    R = Realizer(make_context(alpha, lam, X, default_order(M)), tr)
    L = leading_matrix(R)
    Y = L[:, list(columns)]
    radius = eps * np.abs(L).sum(axis=1)
    rad = np.repeat(radius[:, None], len(columns), axis=1)
    sigma, tau = vectors_to_frame(Y)
    s_rad, t_rad = vectors_to_frame(rad)
    return SolutionFrame(sigma, tau, s_rad, np.abs(t_rad), alpha, complex(lam), float(X), M, tuple(columns))
