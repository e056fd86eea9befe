"""One test per acceptance criterion; each records a PASS/FAIL line for the terminal summary."""

import time

import numpy as np
import pytest

from repdiag.airy import airy_m_matrix, column_match, oracle_vectors
from repdiag.asymsol import frame_to_vectors, solution_frame
from repdiag.benchmarks import EPS_VALUES, M_VALUES, entries
from repdiag.bounds import epsilon_of_X
from repdiag.ncalg import P
from repdiag.realize import Realizer, default_order, make_context
from repdiag.recur import generate_transcript, reference_expressions
from repdiag.riccati import integrate_linear_oracle, m_from_frame, m_matrix
from repdiag.verify import commutator_defect, diagonal_of_V1, rel, transformation_defect

TOL = 1e-10
STRICT = (1j, 0.5 + 1j, 10 + 10j)


def max_rel_entry(got, want):
    """Worst ``|d| / |w|`` over the three entries."""
    return max(abs(g - w) / abs(w) for g, w in zip(got, want))


def sf_bound(figures):
    # at least `figures` significant figures means |d| <= 5 * 10^-figures * |w|
    return 5 * 10.0 ** (-figures)


def record(log, number, name, ok, detail):
    log.append(f"{'PASS' if ok else 'FAIL'}  criterion {number} ({name}): {detail}")
    return ok


@pytest.fixture(scope="module")
def tr6():
    return generate_transcript(6)


@pytest.fixture(scope="module")
def runs(tr6):
    out = {}
    for alpha, table in M_VALUES.items():
        for lam in table:
            t0 = time.perf_counter()
            eps = epsilon_of_X(alpha, lam, 10.0, 6, tr6)
            fr = solution_frame(alpha, lam, 10.0, 6, eps=eps.eps, transcript=tr6)
            res = m_matrix(fr, TOL, eps=eps.eps)
            out[alpha, lam] = (res, fr, time.perf_counter() - t0)
    return out


@pytest.fixture(scope="module")
def oracle():
    return {lam: airy_m_matrix(lam) for lam in M_VALUES[1.0]}


def test_criterion_1_table_alpha_1(runs, acceptance_log):
    worst = {}
    slowest = 0.0
    for lam, want in M_VALUES[1.0].items():
        res, _, dt = runs[1.0, lam]
        worst[lam] = max_rel_entry(entries(res.M), want)
        slowest = max(slowest, dt)
    ok = all(worst[lam] <= sf_bound(7 if lam in STRICT else 6) for lam in worst) and slowest < 60
    detail = ", ".join(f"{lam}: {d:.2e}" for lam, d in worst.items()) + f"; slowest {slowest:.2f} s"
    assert record(acceptance_log, 1, "alpha=1 table", ok, detail)


def test_criterion_2_pipeline_vs_oracle(runs, oracle, acceptance_log):
    worst = max(max_rel_entry(entries(runs[1.0, lam][0].M), entries(oracle[lam].M)) for lam in oracle)
    ok = worst <= sf_bound(7)
    assert record(acceptance_log, "2a", "pipeline vs oracle", ok, f"worst rel {worst:.2e}")


@pytest.mark.xfail(strict=True, reason="printed values carry errors near 1e-7, about 7 figures")
def test_criterion_2_oracle_vs_table(oracle, acceptance_log):
    worst = max(max_rel_entry(entries(oracle[lam].M), want) for lam, want in M_VALUES[1.0].items())
    ok = worst <= sf_bound(9)
    assert record(acceptance_log, "2b", "oracle vs table at 9 figures", ok, f"worst rel {worst:.2e}")


def test_criterion_3_other_tables(runs, acceptance_log):
    worst = 0.0
    for alpha in (0.5, 4 / 3):
        for lam, want in M_VALUES[alpha].items():
            worst = max(worst, max_rel_entry(entries(runs[alpha, lam][0].M), want))
    ok = worst <= sf_bound(6)
    assert record(acceptance_log, 3, "alpha=1/2 and 4/3 tables", ok, f"worst rel {worst:.2e}")


def test_criterion_4_epsilon(tr6, acceptance_log):
    reps = {X: epsilon_of_X(1.0, 1j, X, 6, tr6) for X in (10.0, 20.0)}
    ratios = {X: reps[X].eps / EPS_VALUES[1.0, X] for X in reps}
    ok = all(r.valid for r in reps.values()) and all(0.01 <= q <= 100 for q in ratios.values())
    ok &= reps[20.0].eps < reps[10.0].eps
    eps_m4 = epsilon_of_X(1.0, 1j, 10.0, 4).eps
    ok &= eps_m4 > reps[10.0].eps
    # certification against the exact frame
    worst = 0.0
    for X in (10.0, 20.0):
        for lam in M_VALUES[1.0]:
            eps = epsilon_of_X(1.0, lam, X, 6, tr6).eps
            fr = solution_frame(1.0, lam, X, 6, eps=eps, transcript=tr6)
            exact = oracle_vectors(lam, X)
            radius = np.abs(frame_to_vectors(fr.sigma_radius, fr.tau_radius))
            for mine, theirs in ((0, 1), (1, 0)):
                _, resid = column_match(fr.vectors[:, mine], exact[:, theirs])
                worst = max(worst, resid / np.linalg.norm(radius[:, mine]))
    ok &= worst <= 1.0
    detail = (
        f"eps(10)={reps[10.0].eps:.3e} (x{ratios[10.0]:.2f}), eps(20)={reps[20.0].eps:.3e} (x{ratios[20.0]:.2f}), "
        f"eps(M=4)={eps_m4:.2e}, worst error/bound {worst:.3f}"
    )
    assert record(acceptance_log, 4, "eps(X) bounds", ok, detail)


def test_criterion_5_symbolic_golden(acceptance_log):
    rng = np.random.default_rng(5)
    ref = reference_expressions()
    tr5, tr7 = generate_transcript(5), generate_transcript(7)
    worst = 0.0
    for _ in range(5):
        x = rng.uniform(5, 50)
        lam = np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform()) + 1j
        for tr, names in ((tr5, ("S2", "S3", "S4", "E5")), (tr7, ("S6",))):
            R = Realizer(make_context(1.0, lam, x, default_order(tr.M)), tr)
            for name in names:
                gen = tr.E(5) if name == "E5" else tr.S(int(name[1]))
                worst = max(worst, rel(R.value(ref[name]), R.value(gen)))
    assert record(acceptance_log, 5, "symbolic golden", worst < 1e-10, f"worst rel {worst:.2e}")


def test_criterion_6_exact_transformation(tr6, acceptance_log):
    rng = np.random.default_rng(6)
    worst = 0.0
    for alpha in (0.5, 1.0, 4 / 3):
        for x in rng.uniform(5, 100, 10):
            R = Realizer(make_context(alpha, 1j, x, default_order(6)), tr6)
            worst = max(worst, max(transformation_defect(R, m) for m in range(1, 6)))
    assert record(acceptance_log, 6, "exact transformation", worst < 1e-10, f"worst rel {worst:.2e}")


def test_criterion_7_structure(tr6, acceptance_log):
    alpha, lam = 1.0, 1j
    a = 1 + alpha / 4
    xs = np.geomspace(10, 100, 8)
    Rs = [Realizer(make_context(alpha, lam, x, default_order(6)), tr6) for x in xs]
    comm = max(commutator_defect(R, m) for R in Rs for m in range(1, 6))
    diag = max(diagonal_of_V1(R, m) for R in Rs for m in range(1, 6))
    slope_err = 0.0
    for m in range(1, 6):
        s = np.polyfit(np.log(xs), np.log([np.abs(R.atom(P(m)).value).max() for R in Rs]), 1)[0]
        slope_err = max(slope_err, abs(s + m * a))
        for j in range(1, 7 - m):
            e = tr6.V(j, m)
            if e:
                s = np.polyfit(np.log(xs), np.log([np.abs(R.value(e)).max() for R in Rs]), 1)[0]
                slope_err = max(slope_err, abs(s + (m + j - 1) * a))
    ok = comm < 1e-13 and diag < 1e-14 and slope_err <= 0.1
    detail = f"commutator {comm:.1e}, dg {diag:.1e}, slope error {slope_err:.3f}"
    assert record(acceptance_log, 7, "structural invariants", ok, detail)


def test_criterion_8_riccati_robustness(runs, acceptance_log):
    dual = scaling = sym = 0.0
    for (alpha, lam), (res, fr, _) in runs.items():
        sym = max(sym, res.symmetry_defect)
        if alpha != 1.0:
            continue
        lin = m_matrix(fr, TOL, route="linear")
        dual = max(dual, max_rel_entry(entries(res.M), entries(lin.M)))
        s, t = integrate_linear_oracle(fr, TOL)
        D = np.diag([1e3, 1e-3])
        scaling = max(scaling, rel(m_from_frame(s @ D, t @ D), m_from_frame(s, t)))
    ok = dual <= sf_bound(7) and scaling < 1e-12 and sym < 1e-6
    detail = f"dual-path {dual:.2e}, rescaling {scaling:.1e}, symmetry {sym:.1e}"
    assert record(acceptance_log, 8, "Riccati robustness", ok, detail)


def test_criterion_9_term_counts(acceptance_log):
    e6 = len(generate_transcript(6).expanded_E(6, expand_identity=True))
    e8 = len(generate_transcript(8).expanded_E(8, expand_identity=True))
    s8 = len(generate_transcript(9).S(8))
    ok = e6 > 250 and 42 <= s8 <= 78 and 490 <= e8 <= 910
    # soft report, never gating
    record(acceptance_log, 9, "term counts (soft)", ok, f"E6={e6}, S8={s8}, E8={e8}")
