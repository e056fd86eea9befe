import numpy as np
import pytest

from repdiag.matpoly import PolyRealizer
from repdiag.ncalg import DP, NCExpr, P, S, T, V
from repdiag.realize import (
    RealizationError,
    Realizer,
    base_matrices,
    default_order,
    make_context,
    realize_level1,
    realize_P,
)
from repdiag.jets import MatrixJet
from repdiag.verify import commutator_defect, diagonal_of_V1, transformation_defect

PRINTED_V1_PATTERN = np.array(
    [
        [0, 1 + 1j, 1, 1 - 1j],
        [1 - 1j, 0, 1 + 1j, 1],
        [1, 1 - 1j, 0, 1 + 1j],
        [1 + 1j, 1, 1 - 1j, 0],
    ]
)


def test_base_matrices():
    b = base_matrices()
    assert np.allclose(b.Omega @ b.Omega_inv, np.eye(4))
    assert np.allclose(np.diag(b.D), [1, 1j, -1, -1j])
    assert np.allclose(b.omega**4, 1)
    assert np.allclose(np.diag(b.C), -3 / 8)
    assert np.allclose(b.V1_template, -0.5 * PRINTED_V1_PATTERN)


def test_make_context_examples():
    ctx = make_context(1.0, 0.0, 1.0, 2)
    assert np.allclose(ctx.Q.c[:3], [1, 1, 0])
    lam, x = 0.7 + 2j, 3.5
    ctx = make_context(1.0, lam, x, 4)
    q = lam + x
    assert ctx.p.value == pytest.approx(-0.25 * q ** (-1.25))
    assert ctx.p.deriv(1) == pytest.approx(5 / 16 * q ** (-2.25))
    with pytest.raises(ValueError):
        make_context(1.0, 1j, 0.0, 3)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 4 / 3])
def test_second_derivative_identity(alpha):
    ctx = make_context(alpha, 1j, 10.0, 4)
    Q = complex(ctx.Q.value)
    q2 = ctx.q_derivative(2)
    p, dp = complex(ctx.p.value), complex(ctx.p.deriv(1))
    rhs = -4 * Q**1.25 * dp + 20 * p**2 * Q**1.5
    assert abs(q2 - rhs) <= 1e-12 * max(abs(q2), abs(4 * Q**1.25 * dp))


def test_level1():
    ctx = make_context(1.0, 1j, 12.0, 5)
    D1, V1 = realize_level1(ctx)
    p = complex(ctx.p.value)
    assert np.allclose(np.diag(V1.value), 0)
    assert V1.value[0, 1] == pytest.approx(-0.5 * p * (1 + 1j))
    assert np.allclose(D1.value - ctx.base.D, 1.5 * p * np.eye(4))


def test_realize_P():
    ctx = make_context(1.0, 1j, 12.0, 5)
    _, V1 = realize_level1(ctx)
    P1 = realize_P(V1)
    D = ctx.base.D
    assert np.abs(P1.value @ D - D @ P1.value - V1.value).max() < 1e-14
    p = complex(ctx.p.value)
    assert P1.value[0, 1] == pytest.approx(-0.5 * p * (1 + 1j) / (1j - 1))
    zero = MatrixJet(12.0, np.zeros((3, 4, 4), dtype=complex))
    assert not np.any(realize_P(zero).c)
    with pytest.raises(ValueError):
        realize_P(MatrixJet.constant(1.0, np.eye(4), 2))


def test_s2_direct(tr5):
    ctx = make_context(1.0, 0.5 + 1j, 15.0, 7)
    R = Realizer(ctx, tr5)
    P1 = R.atom(P(1))
    direct = -(ctx.Q_iroot * P1.derivative()) + R.atom(V(1, 1)) @ P1
    assert np.abs(direct.value - R.atom(S(2)).value).max() < 1e-12 * np.abs(direct.value).max()


@pytest.mark.parametrize("alpha", [0.5, 1.0, 4 / 3])
def test_exact_transformation_identity(alpha, tr6, rng):
    for x in rng.uniform(5, 100, 10):
        R = Realizer(make_context(alpha, 1j, x, default_order(6)), tr6)
        for m in range(1, 6):
            assert transformation_defect(R, m) < 1e-10
            assert commutator_defect(R, m) < 1e-13
            assert diagonal_of_V1(R, m) < 1e-14


def test_direct_system_at_level1(tr6):
    alpha, lam, x = 1.0, 1j, 11.0
    ctx = make_context(alpha, lam, x, 8)
    R = Realizer(ctx, tr6)
    q = ctx.Q_root
    G = np.diag([q.value**r for r in range(4)])
    dG = np.diag([r * q.value ** (r - 1) * q.deriv(1) for r in range(4)])
    A = np.diag(np.ones(3), 1).astype(complex)
    A[3, 0] = ctx.Q.value
    Om, Omi = ctx.base.Omega, ctx.base.Omega_inv
    direct = Omi @ np.linalg.inv(G) @ (A @ G - dG) @ Om
    assert np.abs(direct - R.F(1)).max() < 1e-12 * np.abs(direct).max()


def test_jet_derivative_vs_finite_difference(tr6):
    alpha, lam, x = 1.0, 1j, 20.0
    for m in range(1, 6):
        h = 1e-3 * x
        vals = [Realizer(make_context(alpha, lam, x + k * h, 8), tr6).atom(P(m)).value for k in (-2, -1, 1, 2)]
        fd = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
        jet = Realizer(make_context(alpha, lam, x, 8), tr6).atom(P(m)).derivative().value
        assert np.abs(fd - jet).max() <= 1e-6 * np.abs(jet).max()


def test_grading_ratio_of_V1(tr6):
    for m in range(1, 6):
        n10 = np.abs(Realizer(make_context(1.0, 1j, 10.0, 8), tr6).value(tr6.V(1, m))).max()
        n100 = np.abs(Realizer(make_context(1.0, 1j, 100.0, 8), tr6).value(tr6.V(1, m))).max()
        assert n100 / n10 == pytest.approx(10 ** (-m * 1.25), rel=0.1)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 4 / 3])
def test_grading_of_P_and_delta(alpha, tr6):
    a = 1 + alpha / 4
    xs = np.geomspace(10, 100, 6)
    Rs = [Realizer(make_context(alpha, 1j, x, 8), tr6) for x in xs]
    for m in range(1, 6):
        slope = np.polyfit(np.log(xs), np.log([np.abs(R.atom(P(m)).value).max() for R in Rs]), 1)[0]
        assert abs(slope + m * a) < 0.1
    slope = np.polyfit(np.log(xs), np.log([np.abs(R.delta(5).value).max() for R in Rs]), 1)[0]
    assert abs(slope + 2 * a) < 0.1


@pytest.mark.parametrize("alpha,lam,x", [(1.0, 1j, 13.0), (0.5, 10 + 10j, 25.0), (4 / 3, -1 + 0.2j, 9.0)])
def test_polynomial_route_agrees(alpha, lam, x, tr6):
    R = Realizer(make_context(alpha, lam, x, 8), tr6)
    PR = PolyRealizer(tr6, alpha)
    for atom in [P(m) for m in range(1, 6)] + [S(m) for m in range(2, 6)] + [T(m) for m in range(1, 6)] + [DP(m) for m in range(1, 5)]:
        a = PR.atom(atom).evaluate(alpha, lam, x)
        b = R.atom(atom).value
        assert np.abs(a - b).max() <= 1e-12 * max(np.abs(b).max(), 1e-300), atom


def test_singular_inverse_is_reported(tr6):
    # near x = 0 with lambda close to the origin the correctors are huge
    R = Realizer(make_context(1.0, 1e-3j, 1e-3, 8), tr6)
    with pytest.raises((RealizationError, np.linalg.LinAlgError)):
        R.value(tr6.E(6))
        raise RealizationError("no failure")
