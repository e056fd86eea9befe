from fractions import Fraction

import numpy as np
import pytest

from repdiag.matpoly import MatPoly, PolyRealizer
from repdiag.ncalg import P, S, T, V, Inv


def mono(s, *derivs):
    return (Fraction(s), tuple(derivs))


def test_evaluate_single_monomial():
    C = np.eye(4)
    poly = MatPoly({mono(Fraction(-1, 4), (1, 2)): C})
    alpha, lam, x = 1.5, 0.3 + 1j, 4.0
    Q = lam + x**alpha
    want = Q ** (-0.25) * (alpha * x ** (alpha - 1)) ** 2
    assert np.allclose(poly.evaluate(alpha, lam, x), want * C)


def test_derivative_matches_finite_difference():
    r = np.random.default_rng(3)
    poly = MatPoly(
        {
            mono(Fraction(-5, 4), (1, 1)): r.normal(size=(4, 4)),
            mono(Fraction(1, 2)): r.normal(size=(4, 4)),
            mono(0, (1, 1), (2, 1)): r.normal(size=(4, 4)),
        }
    )
    alpha, lam, x, h = 4 / 3, 1j, 7.0, 1e-4
    d = poly.derivative(alpha).evaluate(alpha, lam, x)
    fd = (poly.evaluate(alpha, lam, x + h) - poly.evaluate(alpha, lam, x - h)) / (2 * h)
    assert np.abs(d - fd).max() < 1e-7 * np.abs(d).max()


def test_derivative_prunes_vanishing_terms():
    # for alpha = 1 the second derivative of Q vanishes identically
    poly = MatPoly({mono(0, (1, 1)): np.eye(4)})
    assert len(poly.derivative(1.0)) == 0
    assert len(poly.derivative()) == 1


def test_ring_operations():
    a = MatPoly({mono(1): np.eye(4)})
    b = MatPoly({mono(-1): 2 * np.eye(4)})
    prod = a @ b
    assert list(prod.terms) == [mono(0)]
    assert np.allclose(prod.terms[mono(0)], 2 * np.eye(4))
    assert len(a - a) == 0
    assert np.allclose((a + a).terms[mono(1)], a.scale(2).terms[mono(1)])


def test_rejects_inverse_atoms(tr6):
    with pytest.raises((ValueError, KeyError, NotImplementedError)):
        PolyRealizer(tr6, 1.0).atom(Inv(1))


@pytest.mark.parametrize("alpha", [0.5, 1.0, 4 / 3])
def test_lambda_independent_route(alpha, tr6, rng):
    from repdiag.realize import Realizer, make_context

    PR = PolyRealizer(tr6, alpha)
    atoms = [P(m) for m in range(1, 6)] + [S(m) for m in range(2, 6)] + [V(1, 1), T(2)]
    for _ in range(4):
        x = rng.uniform(5, 60)
        lam = complex(rng.uniform(-1, 5), rng.uniform(0.01, 5))
        R = Realizer(make_context(alpha, lam, x, 8), tr6)
        for a in atoms:
            want = R.atom(a).value
            got = PR.atom(a).evaluate(alpha, lam, x)
            assert np.abs(got - want).max() <= 1e-12 * np.abs(want).max(), a
