"""Acceptance gate: one test per criterion, each printing a single pass/fail line.

Run alone with ``pytest tests/test_acceptance.py -s`` to see the lines inline;
they are also collected into an "acceptance criteria" section of the summary.
"""

import io
import json
import math
import time

import numpy as np
import pytest

from sparseprime import cli, curves, harmonic, ntheory, sequences


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


OMEGA_ARGS = ("--eta", "1e-4", "--grid", "800", "--grid4", "40", "--no-timestamp")


@pytest.fixture(scope="module")
def omega_reports():
    reports, elapsed = {}, {}
    for j in (1, 2):
        t0 = time.perf_counter()
        code, text, err = _cli("omega-bounds", "--case", str(j), *OMEGA_ARGS)
        elapsed[j] = time.perf_counter() - t0
        assert code == 0, err
        reports[j] = text
    return reports, elapsed


# 1 -------------------------------------------------------------------------


def test_criterion_1_sieve_constants(omega_reports, criterion):
    reports, elapsed = omega_reports
    r1, r2 = (json.loads(reports[j]) for j in (1, 2))
    total = sum(elapsed.values())
    ok = (
        r1["omega2"] <= 0.38
        and r1["omega4"] <= 0.017
        and r2["omega2"] <= 0.38
        and r2["omega4"] <= 0.49
        and r1["deficiency"] >= 0.6
        and r2["deficiency"] >= 0.1
        and r1["conservative"]
        and r2["conservative"]
        and total <= 300
    )
    criterion(
        1,
        ok,
        f"Omega2(1)={r1['omega2']:.5f} Omega4(1)={r1['omega4']:.5f} def(1)={r1['deficiency']:.4f}; "
        f"Omega2(2)={r2['omega2']:.5f} Omega4(2)={r2['omega4']:.5f} def(2)={r2['deficiency']:.4f}; "
        f"{total:.1f}s",
    )


# 2 -------------------------------------------------------------------------


def test_criterion_2_remark_counts(criterion):
    got = (
        sequences.remark_counts(5, "quartic_shift"),
        sequences.remark_counts(5, "two_squares"),
        sequences.remark_counts(3, "quartic_shift"),
    )
    criterion(2, got == (8, 9, 0), f"(quartic 5, squares 5, quartic 3) = {got}, expected (8, 9, 0)")


# 3 -------------------------------------------------------------------------


def test_criterion_3_weil_suite(criterion):
    t0 = time.perf_counter()
    rep = curves.verify_weil_suite(200, raise_on_violation=False)
    dt = time.perf_counter() - t0
    worst = rep.worst()
    lemmas = {r.lemma for r in rep.rows}
    summary = " ".join(f"{k}={v.ratio:.3f}" for k, v in sorted(worst.items()))
    ok = rep.passed and dt <= 600 and lemmas == {"eps_N1", "S1", "S2", "N3", "Kl2", "Kl3"}
    criterion(3, ok, f"worst observed/bound: {summary}; {len(rep.rows)} rows; {dt:.1f}s")


# 4 -------------------------------------------------------------------------


def _crt_sweep_n1_n3_s1(rng):
    """Mismatch count for N1, N3 and the phase histogram of S1 on all coprime m < n <= 100."""
    bad = checks = 0
    for m, n in curves.iter_coprime_pairs(100):
        D = m * n
        for a in sorted({0, 1, 2, D - 1, int(rng.integers(D))}):
            checks += 2
            bad += curves.count_N1(a, D).count != curves.count_N1(a % m, m).count * curves.count_N1(a % n, n).count
            bad += curves.count_N3(a, D).count != curves.count_N3(a % m, m).count * curves.count_N3(a % n, n).count
            for h in ((0, 0), (1, 0), (int(rng.integers(D)), int(rng.integers(D)))):
                fm, fn = curves.twisted_frequencies(h, m, n)
                lhs = curves.exp_sum_S1(a, *h, D).phases
                rhs = curves.crt_product(
                    curves.exp_sum_S1(a % m, *fm, m).phases, curves.exp_sum_S1(a % n, *fn, n).phases, m, n
                )
                checks += 1
                bad += not np.array_equal(lhs, rhs)
    return bad, checks


def _s2_pair_check(m, n, a, h):
    D = m * n
    fm, fn = curves.twisted_frequencies(h, m, n)
    lhs = curves.exp_sum_S2(a, h, D).phases
    rhs = curves.crt_product(curves.exp_sum_S2(a % m, fm, m).phases, curves.exp_sum_S2(a % n, fn, n).phases, m, n)
    return not np.array_equal(lhs, rhs)


def _crt_sweep_s2(rng):
    """S2 is quadratic in the modulus: exhaustive for mn <= 500, a seeded sample up to the module limit."""
    bad = checks = 0
    for m, n in curves.iter_coprime_pairs(100, max_product=500):
        for a in sorted({1, int(rng.integers(1, m * n))}):
            h = tuple(int(v) for v in rng.integers(0, m * n, 4))
            checks += 1
            bad += _s2_pair_check(m, n, a, h)
    large = [(m, n) for m, n in curves.iter_coprime_pairs(100, max_product=curves.S2_LIMIT) if m * n > 500]
    for i in rng.choice(len(large), size=40, replace=False):
        m, n = large[int(i)]
        h = tuple(int(v) for v in rng.integers(0, m * n, 4))
        checks += 1
        bad += _s2_pair_check(m, n, int(rng.integers(1, m * n)), h)
    return bad, checks


def _decomposition_sweep():
    bad = checks = 0
    for D in range(1, 501):
        if ntheory.mobius(D) == 0:
            continue
        divs = ntheory.divisors(D)
        for a in range(D):
            if math.gcd(a * (a - 1), D) != 1:
                continue
            checks += 1
            bad += curves.count_N1(a, D).count != sum((D // d) * curves.eps_d(a, d) for d in divs)
    return bad, checks


def test_criterion_4_crt_identities(criterion):
    rng = np.random.default_rng(20240601)
    b1, c1 = _crt_sweep_n1_n3_s1(rng)
    b2, c2 = _crt_sweep_s2(rng)
    b3, c3 = _decomposition_sweep()
    criterion(
        4,
        b1 == b2 == b3 == 0,
        f"N1/N3/S1 {b1}/{c1} mismatches; S2 {b2}/{c2}; N1 = sum (D/d) eps_d {b3}/{c3}",
    )


# 5 -------------------------------------------------------------------------


def test_criterion_5_buchstab_identity(criterion):
    residuals = []
    for X in (10**3, 10**4, 10**5):
        for Z in (2.0, X ** (1 / 12), X**0.08):
            r = sequences.buchstab_identity_check(X, Z)
            residuals.append(r.residual)
    criterion(5, all(r == 0 for r in residuals), f"residuals over 9 (X, Z) cases: {residuals}")


# 6 -------------------------------------------------------------------------


def test_criterion_6_analytic_identities(criterion):
    om = {g: sequences.omega_integral_check(g) for g in (1000, 2000)}
    part = {
        (N, d): harmonic.partition_reconstruction(N, d) for N, d in ((100, 0.05), (1, 0.05), (100, 0.01))
    }
    pois = {(N, q, a): harmonic.poisson_check(N, q, a, 0.05) for N, q, a in ((1000, 7, 3), (1000, 1, 0))}
    ok = (
        all(abs(v - 1.0) <= 1e-3 for v in om.values())
        and all(v <= 1e-6 for v in part.values())
        and all(v <= 1e-6 for v in pois.values())
    )
    criterion(
        6,
        ok,
        "omega integral "
        + ", ".join(f"{v:.6f}" for v in om.values())
        + "; partition "
        + ", ".join(f"{v:.1e}" for v in part.values())
        + "; poisson "
        + ", ".join(f"{v:.1e}" for v in pois.values()),
    )


# 7 -------------------------------------------------------------------------


def test_criterion_7_enumeration_scaling(criterion):
    Xs = [10**5, 10**6, 10**7]
    bands = {"quartic_shift": (0.70, 0.80), "cubes": (0.78, 0.88)}
    parts, ok = [], True
    for form, (lo, hi) in bands.items():
        counts = [sequences.window_counts(form, X) for X in Xs]
        ex = sequences.growth_exponents([c.representations for c in counts], Xs)
        ex_p = sequences.growth_exponents([c.prime_representations for c in counts], Xs)
        ok &= all(lo <= e <= hi for e in ex)
        parts.append(
            f"{form} exponents {', '.join(f'{e:.3f}' for e in ex)} in [{lo}, {hi}]"
            f" (prime-only, recorded: {', '.join(f'{e:.3f}' for e in ex_p)})"
        )
    criterion(7, ok, "; ".join(parts))


# 8 -------------------------------------------------------------------------


def test_criterion_8_kappa_convergence(criterion):
    parts, ok = [], True
    for j in (1, 2):
        k4, k5 = ntheory.kappa(j, 10**4), ntheory.kappa(j, 10**5)
        gap = abs(k4.value - k5.value)
        ok &= gap <= k4.tail_estimate
        parts.append(f"j={j}: |k(1e4)-k(1e5)|={gap:.2e} <= tail {k4.tail_estimate:.2e}")
    criterion(8, ok, "; ".join(parts))


# 9 -------------------------------------------------------------------------


REPORT_COMMANDS = [
    ("weil-verify", "--pmax", "60"),
    ("enumerate", "--form", "b2p1", "--x", "1e5"),
    ("enumerate", "--form", "cubes", "--x", "1e5", "--format", "json"),
    ("kappa", "--j", "2"),
    ("buchstab", "--u", "3.7"),
    ("poisson-check", "--n", "1000", "--q", "7", "--a", "3"),
    ("typei", "--j", "1", "--x", "1e5", "--d", "40"),
    ("buchstab-identity", "--x", "1e4", "--z", "3"),
    ("pair-stats", "--n", "200", "--y", "10"),
]


def test_criterion_9_determinism(omega_reports, criterion):
    reports, _ = omega_reports
    differing = []
    for j in (1, 2):
        for threads in ("1", "4"):
            code, text, err = _cli("omega-bounds", "--case", str(j), *OMEGA_ARGS, "--threads", threads)
            if code != 0 or text != reports[j]:
                differing.append(f"omega-bounds case {j} threads {threads}")
    for cmd in REPORT_COMMANDS:
        outs = {_cli(*cmd, "--no-timestamp", "--threads", t) for t in ("1", "1", "3")}
        if len(outs) != 1 or next(iter(outs))[0] != 0:
            differing.append(" ".join(cmd))
    n = 4 + len(REPORT_COMMANDS)
    criterion(9, not differing, f"{n - len(differing)}/{n} reports byte-identical" + (f"; differ: {differing}" if differing else ""))
