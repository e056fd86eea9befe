"""From the frame at X to the spectral matrix at 0.

Two independent routes:

* the Riccati variable ``xi = sigma tau^-1`` carried from X to 0 by the
  hand-written Dormand-Prince pair in :mod:`repdiag.ode`;
* the linear system ``Y' = A(x) Y`` for the two solution columns, solved
  with scipy's DOP853 segment by segment with column renormalization.

Both end in ``M = xi(0)^-1 = tau(0) sigma(0)^-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp

from .asymsol import SolutionFrame, frame_to_vectors, vectors_to_frame
from .ode import IntegrationStats, SolutionBlowUp, StepSizeUnderflow, dopri54

B1 = np.array([[0, 1], [0, 0]], dtype=complex)
B2 = np.array([[0, 0], [0, 1]], dtype=complex)
C2 = np.array([[0, 0], [-1, 0]], dtype=complex)


def potential(alpha: float, lam: complex) -> Callable[[float], complex]:
    lam = complex(lam)
    return lambda x: lam + abs(x) ** alpha


def riccati_rhs(xi: np.ndarray, x: float, Q: complex) -> np.ndarray:
    """``B1 xi + B2 - xi C1 xi - xi C2`` with ``C1 = [[-Q, 0], [0, 0]]``."""
    C1 = np.array([[-Q, 0], [0, 0]], dtype=complex)
    return B1 @ xi + B2 - xi @ C1 @ xi - xi @ C2


@dataclass
class RiccatiState:
    x: float
    xi: np.ndarray
    stats: IntegrationStats


@dataclass
class MResult:
    M: np.ndarray
    symmetry_defect: float
    eps: float
    tol: float
    route: str
    stats: dict = field(default_factory=dict)

    @property
    def m11(self) -> complex:
        return complex(self.M[0, 0])

    @property
    def m12(self) -> complex:
        return complex(self.M[0, 1])

    @property
    def m22(self) -> complex:
        return complex(self.M[1, 1])


def symmetry_defect(M: np.ndarray) -> float:
    return float(abs(M[0, 1] - M[1, 0]) / np.abs(M).max())


def integrate_riccati(
    frame: SolutionFrame,
    tol: float = 1e-10,
    x_end: float = 0.0,
    cap: float = 1e8,
) -> RiccatiState:
    """Carry ``xi`` from ``frame.x`` to ``x_end``.

    Raises :class:`SolutionBlowUp` near a pole of ``xi`` (``tau`` singular)
    and :class:`StepSizeUnderflow` if the step collapses.
    """
    tau = frame.tau
    if np.linalg.cond(tau) > 1e12:
        raise SolutionBlowUp("tau is singular at the starting point")
    xi0 = frame.sigma @ np.linalg.inv(tau)
    Q = potential(frame.alpha, frame.lam)

    def f(x, y):
        return riccati_rhs(y, x, Q(x))

    traj = dopri54(f, frame.x, xi0, x_end, rtol=tol, atol=tol * 1e-2, cap=cap)
    return RiccatiState(traj.x, traj.y, traj.stats)


def integrate_linear_oracle(
    frame: SolutionFrame,
    tol: float = 1e-10,
    x_end: float = 0.0,
    segment: float = 1.0,
):
    """Return ``(sigma, tau)`` at ``x_end`` from the linear system.

    Columns are rescaled to unit max-modulus at the end of every segment; the
    scale factors cancel in ``tau sigma^-1``.
    """
    Q = potential(frame.alpha, frame.lam)

    def rhs(x, v):
        Y = v.reshape(4, 2)
        out = np.empty_like(Y)
        out[:3] = Y[1:]
        out[3] = Q(x) * Y[0]
        return out.ravel()

    Y = frame_to_vectors(frame.sigma, frame.tau).astype(complex)
    x = frame.x
    nseg = max(1, int(np.ceil(abs(x - x_end) / segment)))
    grid = np.linspace(x, x_end, nseg + 1)
    for a, b in zip(grid[:-1], grid[1:]):
        sol = solve_ivp(rhs, (a, b), Y.ravel(), method="DOP853", rtol=tol, atol=tol * 1e-3)
        if not sol.success:
            raise RuntimeError(f"linear integration failed on [{b:g}, {a:g}]: {sol.message}")
        Y = sol.y[:, -1].reshape(4, 2)
        Y = Y / np.abs(Y).max(axis=0)
    return vectors_to_frame(Y)


def m_from_frame(sigma: np.ndarray, tau: np.ndarray) -> np.ndarray:
    if np.linalg.cond(sigma) > 1e13:
        raise np.linalg.LinAlgError("sigma(0) is singular")
    return tau @ np.linalg.inv(sigma)


def m_matrix(
    frame: SolutionFrame,
    tol: float = 1e-10,
    eps: float = 0.0,
    route: str = "riccati",
) -> MResult:
    """``M(lambda)`` via the Riccati route, falling back to the linear one on a pole."""
    if route == "riccati":
        try:
            st = integrate_riccati(frame, tol)
            M = np.linalg.inv(st.xi)
            stats = {
                "steps": st.stats.steps,
                "rejected": st.stats.rejected,
                "min_step": st.stats.min_step,
            }
            return MResult(M, symmetry_defect(M), eps, tol, "riccati", stats)
        except (SolutionBlowUp, StepSizeUnderflow, np.linalg.LinAlgError) as exc:
            fallback = str(exc)
    elif route == "linear":
        fallback = None
    else:
        raise ValueError(f"unknown route {route!r}")
    sigma, tau = integrate_linear_oracle(frame, tol)
    M = m_from_frame(sigma, tau)
    stats = {"fallback": fallback} if fallback else {}
    return MResult(M, symmetry_defect(M), eps, tol, "linear", stats)


def neumann_from_dirichlet(M_D: np.ndarray) -> np.ndarray:
    """``M_N = -M_D^-1``."""
    return -np.linalg.inv(M_D)
