import numpy as np
import pytest

from repdiag.ncalg import DP, Dg, Inv, NCExpr, P, S, T, V
from repdiag.realize import Realizer, make_context
from repdiag.recur import dump_transcript, generate_transcript, nu_for, reference_expressions


def test_nu_examples():
    assert nu_for(3, 1, 5) == 1
    assert nu_for(2, 1, 5) == 2
    for m in range(1, 6):
        assert nu_for(6, m, 7) == 0


@pytest.mark.parametrize("o,m,M", [(o, m, M) for M in range(3, 9) for m in range(1, M) for o in range(1, M)])
def test_nu_is_minimal(o, m, M):
    nu = nu_for(o, m, M)
    assert m * (nu + 1) + o >= M
    assert nu == 0 or m * nu + o < M


def test_level1_remainders_in_E2(tr5):
    E2 = tr5.E(2)
    assert E2.coeff((Inv(1), P(1), P(1), T(1))) == 1
    assert E2.coeff((Inv(1), P(1), P(1), P(1), S(2))) == -1


def test_small_transcripts():
    tr = generate_transcript(4)
    a = NCExpr.atom
    assert tr.S(2) == a(DP(1)) + a(V(1, 1)) * a(P(1))
    assert tr.S(3) == a(DP(2)) + a(T(1)) - a(P(1)) * a(S(2))
    tr5 = generate_transcript(5)
    s4 = a(DP(3)) + a(T(2)) - a(P(1)) * a(T(1)) + a(V(1, 2)) * a(P(2)) + a(P(1)) * a(P(1)) * a(S(2))
    assert tr5.S(4) == s4


def test_rejects_small_M():
    with pytest.raises(ValueError):
        generate_transcript(1)
    tr = generate_transcript(2)
    assert tr.E(2) and tr.mu(1) == 1


def test_mu_and_V1(tr6):
    assert tr6.mu(1) == 1 and not tr6.E(1)
    for m in range(2, 6):
        assert tr6.mu(m) == 6 - m
        v1 = tr6.V(1, m)
        assert v1 == NCExpr.atom(S(m)) - NCExpr.atom(Dg(NCExpr.atom(S(m))))


def test_uniform_grades(tr7):
    M = tr7.M
    for m in range(2, M):
        for j in range(2, M - m + 1):
            v = tr7.V(j, m)
            if v:
                assert v.is_uniform() and v.min_order() == m + j - 1
        assert tr7.S(m).is_uniform() and tr7.S(m).min_order() == m
        assert tr7.E(m + 1).min_order() >= M if tr7.E(m + 1) else True
    with pytest.raises(KeyError):
        tr7.S(M)


def _points(rng, k=5):
    for _ in range(k):
        x = rng.uniform(5, 50)
        r, th = np.sqrt(rng.uniform()), rng.uniform(0, 2 * np.pi)
        yield x, r * np.exp(1j * th) + 1j


@pytest.mark.parametrize("alpha", [0.5, 1.0, 4 / 3])
def test_references_match_generated(alpha, rng, tr5, tr7):
    ref = reference_expressions()
    for x, lam in _points(rng):
        for tr, names in ((tr5, ("S2", "S3", "S4", "E5")), (tr7, ("S6",))):
            R = Realizer(make_context(alpha, lam, x, tr.M + 2), tr)
            for name in names:
                gen = tr.E(5) if name == "E5" else tr.S(int(name[1]))
                a, b = R.value(ref[name]), R.value(gen)
                assert np.abs(a - b).max() <= 1e-10 * np.abs(b).max(), name


def test_dump_format(tr5):
    text = dump_transcript(tr5)
    lines = text.splitlines()
    assert lines[0] == "transcript M=5"
    assert "    + 1 [DP1] order=2" in lines
    assert any(line.strip().startswith("- 1 [A1 P1 P1 P1 S2] order=5") for line in lines)


def test_bucket_grading_fits(tr6):
    alpha, lam, a = 1.0, 1j, 1.25
    xs = np.geomspace(10, 100, 6)
    vals = {}
    for x in xs:
        R = Realizer(make_context(alpha, lam, x, 8), tr6)
        for m in range(2, 6):
            for j in range(1, 6 - m + 1):
                e = tr6.V(j, m)
                if e:
                    vals.setdefault((j, m), []).append(np.abs(R.value(e)).max())
    for (j, m), ys in vals.items():
        slope = np.polyfit(np.log(xs), np.log(ys), 1)[0]
        assert abs(slope + (m + j - 1) * a) < 0.1, (j, m, slope)
