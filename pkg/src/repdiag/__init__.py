"""Repeated approximate diagonalization for y'''' = (lambda + x^alpha) y and its spectral matrix."""

from .asymsol import SolutionFrame, solution_frame
from .bounds import EpsilonReport, PowerEnvelope, epsilon_of_X
from .ncalg import NCExpr
from .recur import Transcript, generate_transcript
from .riccati import MResult, m_matrix

__all__ = [
    "EpsilonReport",
    "MResult",
    "NCExpr",
    "PowerEnvelope",
    "SolutionFrame",
    "Transcript",
    "epsilon_of_X",
    "generate_transcript",
    "m_matrix",
    "solution_frame",
]
