"""Adaptive Dormand-Prince 5(4) for complex array-valued ODEs.

Integrates in either direction.  The error norm is the max over components
of ``|err| / (atol + rtol * max(|y|, |y_new|))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B_LOW = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_ERR = _B - _B_LOW


class StepSizeUnderflow(RuntimeError):
    pass


class SolutionBlowUp(RuntimeError):
    pass


@dataclass
class IntegrationStats:
    steps: int = 0
    rejected: int = 0
    evaluations: int = 0
    min_step: float = float("inf")
    max_step: float = 0.0

    def record(self, h: float) -> None:
        self.steps += 1
        self.min_step = min(self.min_step, abs(h))
        self.max_step = max(self.max_step, abs(h))


@dataclass
class Trajectory:
    x: float
    y: np.ndarray
    stats: IntegrationStats
    xs: List[float] = field(default_factory=list)
    ys: List[np.ndarray] = field(default_factory=list)


def dopri54(
    f: Callable[[float, np.ndarray], np.ndarray],
    x0: float,
    y0: np.ndarray,
    x1: float,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    h0: Optional[float] = None,
    h_min: float = 1e-12,
    h_max: Optional[float] = None,
    cap: float = np.inf,
    keep: bool = False,
) -> Trajectory:
    """Carry ``y' = f(x, y)`` from ``x0`` to ``x1``.

    Raises :class:`StepSizeUnderflow` if the step would drop below
    ``h_min`` and :class:`SolutionBlowUp` if ``max|y|`` exceeds ``cap``.
    """
    y = np.array(y0, dtype=complex)
    stats = Trajectory(x0, y, IntegrationStats())
    if x1 == x0:
        return stats
    direction = 1.0 if x1 > x0 else -1.0
    span = abs(x1 - x0)
    h_max = span if h_max is None else h_max
    h = min(h0 if h0 is not None else max(1e-3 * span, min(span, h_min)), h_max)
    x = x0
    k1 = f(x, y)
    st = stats.stats
    st.evaluations += 1
    if keep:
        stats.xs.append(x)
        stats.ys.append(y.copy())
    while direction * (x1 - x) > 0:
        h = min(h, abs(x1 - x))
        hs = direction * h
        ks = [k1]
        for i in range(1, 7):
            yi = y + hs * sum(a * k for a, k in zip(_A[i], ks))
            ks.append(f(x + _C[i] * hs, yi))
        st.evaluations += 6
        y_new = y + hs * sum(b * k for b, k in zip(_B, ks) if b)
        err = hs * sum(e * k for e, k in zip(_ERR, ks))
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        en = float(np.max(np.abs(err) / scale))
        if en <= 1.0 and np.all(np.isfinite(y_new)):
            x = x + hs if abs(x1 - x - hs) > 1e-14 * span else x1
            y = y_new
            k1 = ks[6]  # first-same-as-last
            st.record(h)
            if keep:
                stats.xs.append(x)
                stats.ys.append(y.copy())
            if np.max(np.abs(y)) > cap:
                stats.x, stats.y = x, y
                raise SolutionBlowUp(f"|y| exceeded {cap:g} at x={x:g}")
            factor = 5.0 if en == 0 else min(5.0, 0.9 * en ** -0.2)
        else:
            st.rejected += 1
            factor = 0.2 if not np.isfinite(en) else max(0.2, 0.9 * en ** -0.2)
        h = min(h * factor, h_max)
        if direction * (x1 - x) > 0 and h < min(h_min, abs(x1 - x)):
            stats.x, stats.y = x, y
            raise StepSizeUnderflow(f"step {h:g} below floor at x={x:g}")
    stats.x, stats.y = x, y
    return stats
