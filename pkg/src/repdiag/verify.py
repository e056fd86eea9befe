"""Invariant checks shared by the CLI ``verify`` subcommand and the test suite."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence

import numpy as np

from .asymsol import solution_frame
from .bounds import StructuredBounds, EnvelopeError, epsilon_of_X
from .ncalg import P, V
from .realize import Realizer, default_order, make_context
from .recur import Transcript, generate_transcript
from .riccati import m_matrix


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail}"


def rel(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(np.abs(b).max(), 1e-300)
    return float(np.abs(np.asarray(a) - np.asarray(b)).max() / scale)


def sig_figs(got: complex, want: complex) -> float:
    """Number of matching significant figures, ``-log10(|d| / (5 |w|)) ``."""
    d = abs(got - want)
    if d == 0:
        return np.inf
    return float(-np.log10(d / (5 * abs(want))))


def transformation_defect(R: Realizer, m: int) -> float:
    """Relative residual of ``F_{m+1} = (I+P_m)^-1 (F_m (I+P_m) - P_m')``."""
    Pm = R.atom(P(m))
    IP = np.eye(R.n) + Pm.value
    lhs = np.linalg.solve(IP, R.F(m) @ IP - Pm.derivative().value)
    return rel(lhs, R.F(m + 1))


def commutator_defect(R: Realizer, m: int) -> float:
    D = R.ctx.base.D
    Pm = R.atom(P(m)).value
    Vm = R.atom(V(1, m)).value
    return float(np.abs(Pm @ D - D @ Pm - Vm).max())


def diagonal_of_V1(R: Realizer, m: int) -> float:
    return float(np.abs(np.diag(R.atom(V(1, m)).value)).max())


def decay_slope(alpha: float, lam: complex, transcript: Transcript, value: Callable[[Realizer], np.ndarray], xs: Sequence[float]) -> float:
    """Fitted ``d log |F| / d log x`` of the max-entry norm."""
    norms = []
    for x in xs:
        R = Realizer(make_context(alpha, lam, x, default_order(transcript.M)), transcript)
        norms.append(np.abs(value(R)).max())
    return float(np.polyfit(np.log(xs), np.log(norms), 1)[0])


def run_checks(alpha: float = 1.0, lam: complex = 1j, X: float = 10.0, M: int = 6, tol: float = 1e-10, seed: int = 0) -> List[Check]:
    rng = np.random.default_rng(seed)
    tr = generate_transcript(M)
    a = 1 + alpha / 4
    out: List[Check] = []
    xs = rng.uniform(max(X, 5.0), 100.0, 5)

    worst_id = worst_comm = worst_dg = 0.0
    for x in xs:
        R = Realizer(make_context(alpha, lam, x, default_order(M)), tr)
        for m in range(1, M):
            worst_id = max(worst_id, transformation_defect(R, m))
            worst_comm = max(worst_comm, commutator_defect(R, m))
            worst_dg = max(worst_dg, diagonal_of_V1(R, m))
    out.append(Check("exact transformation identity", worst_id < 1e-10, f"max rel {worst_id:.2e}"))
    out.append(Check("P D - D P = V1", worst_comm < 1e-13, f"max {worst_comm:.2e}"))
    out.append(Check("dg V1 = 0", worst_dg < 1e-14, f"max {worst_dg:.2e}"))

    grid = np.geomspace(10, 100, 8)
    worst_slope = 0.0
    for m in range(1, M):
        s = decay_slope(alpha, lam, tr, lambda R, m=m: R.atom(P(m)).value, grid)
        worst_slope = max(worst_slope, abs(s + m * a))
    out.append(Check("grading of P_m", worst_slope < 0.1, f"max slope error {worst_slope:.3f}"))

    try:
        SB = StructuredBounds(tr, alpha, lam, X)
        env = SB.remainder()
        ratio = 0.0
        for x in X * 10 ** rng.uniform(0, 2, 10):
            R = Realizer(make_context(alpha, lam, x, default_order(M)), tr)
            ratio = max(ratio, np.abs(R.value(tr.E(M))).max() / env(x))
            for m in range(1, M):
                ratio = max(ratio, np.abs(R.atom(P(m)).value).max() / SB.atom(P(m))(x))
        out.append(Check("envelope soundness", ratio <= 1.0, f"max realized/envelope {ratio:.3f}"))
    except EnvelopeError as exc:
        out.append(Check("envelope soundness", False, str(exc)))

    rep = epsilon_of_X(alpha, lam, X, M, tr)
    out.append(Check("eps(X) report valid", rep.valid, f"eps={rep.eps} {rep.message}".strip()))

    if complex(lam).imag > 0:
        try:
            fr = solution_frame(alpha, lam, X, M, transcript=tr)
            r = m_matrix(fr, tol)
            l = m_matrix(fr, tol, route="linear")
            d = rel(r.M, l.M)
            out.append(Check("dual-path agreement", d < 5e-7, f"rel {d:.2e}"))
            out.append(Check("symmetry", r.symmetry_defect < 1e-6, f"defect {r.symmetry_defect:.2e}"))
            if alpha == 1.0:
                from .airy import airy_m_matrix

                o = airy_m_matrix(lam)
                d = rel(r.M, o.M)
                out.append(Check("airy oracle agreement", d < 5e-7, f"rel {d:.2e}"))
        except Exception as exc:  # surfaced as a failed check
            out.append(Check("pipeline", False, f"{type(exc).__name__}: {exc}"))
    return out
