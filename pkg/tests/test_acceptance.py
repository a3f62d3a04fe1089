"""Acceptance criteria 1 to 11, one PASS/FAIL line each.

Run alone with ``pytest tests/test_acceptance.py -v``; the lines are printed
past pytest's capture so they appear in the plain log.
"""

import random
import sys
import time
from itertools import product
from math import gcd

import mpmath
import numpy as np
import pytest

from anticyc.cyclo import Cyclo
from anticyc.errors import ConductorGap
from anticyc.heckechar import (DirichletCharacter, build_lambda, characters_of, check_admissible,
                               dirichlet_characters, gauss_sum, padic_avatar)
from anticyc.lvalues import main_interpolation_report, partition_primes, ratio_spread
from anticyc.nearly_holo import (PeriodCharacter, calibrate_shift, class_representatives, delta_power,
                                 euler_depletion_check, evaluate, finite_difference_delta_power, period_summands)
from anticyc.padic_measure import (LocallyConstantFn, PCoeffRing, act, act_precision_plan, frobenius_substitute,
                                   is_unit_supported, mahler_selftest, q_model_measure, random_series,
                                   verschiebung_root_evaluate)
from anticyc.qexp import Eigenform, QExpansion, p_deplete, twist
from anticyc.quadfield import ImagQuadField, class_number_formula, enumerate_class_group


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            sys.stdout.write("\nCRITERION %2d: %s  %s\n" % (n, "PASS" if ok else "FAIL", detail))
        assert ok, detail
    return emit


def test_criterion_01_class_number_formula(report):
    t = time.time()
    configs = [(d, c, p, n) for d, c, p, n in product((-4, -7, -8, -11, -23), (1, 3), (5, 11, 13), (0, 1, 2))
               if gcd(c, p) == 1 and ImagQuadField(d).splitting(p) == "split"
               and c * c * p ** (2 * n) * abs(d) < 10**6]
    bad = [cfg for cfg in configs
           if enumerate_class_group(ImagQuadField(cfg[0]).order(cfg[1] * cfg[2] ** cfg[3])).size
           != class_number_formula(ImagQuadField(cfg[0]), cfg[1], cfg[2], cfg[3])]
    dt = time.time() - t
    report(1, len(configs) >= 20 and not bad and dt < 10,
           "%d configurations, %d mismatches, %.1f s" % (len(configs), len(bad), dt))


def test_criterion_02_mahler_calculus(report):
    t = time.time()
    reps = [mahler_selftest(p, M=8, count=50, max_degree=50, seed=p) for p in (3, 5)]
    dt = time.time() - t
    failed = sum(v["failed"] for r in reps for v in r["suites"].values())
    passed = sum(v["passed"] for r in reps for v in r["suites"].values())
    report(2, all(r["ok"] for r in reps) and dt < 30,
           "100 series, %d checks passed, %d failed, spanning sets %s, %.1f s"
           % (passed, failed, [r["spanning_set_size"] for r in reps], dt))


def _reflected(chi):
    return DirichletCharacter(chi.modulus, {(-a) % chi.modulus: t for a, t in chi.turns.items()})


def test_criterion_03_key_identity(report, level11):
    t = time.time()
    f = level11.base.truncate(200)
    checked, bad = 0, []
    for p in (3, 5):
        ring = PCoeffRing(p, 8, 2)
        Ds = act_precision_plan(ring, 40, 8, 2)
        mu = q_model_measure(f, ring, "geometric", Ds)
        for chi in dirichlet_characters(p * p):
            lhs = act(LocallyConstantFn.from_character(ring, chi), mu)
            rhs = q_model_measure(twist(f, _reflected(chi)), ring, "geometric", Ds)
            checked += 1
            if not lhs.equals(rhs):
                bad.append((p, str(chi)))
    dt = time.time() - t
    report(3, checked == 6 + 20 and not bad and dt < 30,
           "%d characters mod 9 and 25, D = 200, %d failures, %.1f s" % (checked, len(bad), dt))


def test_criterion_04_unit_support(report, level11):
    f = level11.base.truncate(200)
    rows = []
    for p in (3, 5, 7):
        ring = PCoeffRing(p, 8, 1)
        Ds = act_precision_plan(ring, 40, 8, 1)
        dep = is_unit_supported(q_model_measure(p_deplete(f, p), ring, "geometric", Ds))
        full = is_unit_supported(q_model_measure(f, ring, "geometric", Ds))
        rows.append((p, dep, full))
    report(4, all(dep and not full for _, dep, full in rows),
           "p-depleted supported on units / undepleted not: %s" % rows)


def test_criterion_05_gauss_sums(report):
    count, bad = 0, 0
    for p in (3, 5, 7, 11, 13):
        for n in (1, 2):
            q = p**n
            for phi in dirichlet_characters(q):
                if not phi.is_primitive():
                    continue
                count += 1
                G = gauss_sum(phi)
                L = G.L
                ok = G * G.conj() == q
                g = np.array(G.num)
                inv = phi.inverse()
                us = np.array(list(phi.turns), dtype=np.int64)
                ex = np.array([t.numerator * (L // t.denominator) for t in phi.turns.values()], dtype=np.int64)
                for x in range(q):
                    # phi*(x) = sum_u phi(u) e(xu/q) as exponent counts in Z[zeta_L]
                    v = np.bincount((ex + x * us * (L // q)) % L, minlength=L)
                    if x % p:
                        t = inv.turn(x)
                        ok = ok and np.array_equal(v, np.roll(g, t.numerator * (L // t.denominator)))
                    else:
                        ok = ok and Cyclo(L, v.tolist()).is_zero()
                bad += not ok
    report(5, bad == 0, "%d primitive characters, p in {3,5,7,11,13}, n <= 2, %d failures" % (count, bad))


def test_criterion_06_serre_tate(report):
    checked, bad = 0, 0
    for p, n, count, deg in ((3, 1, 15, 40), (3, 2, 15, 25), (5, 1, 12, 25), (5, 2, 8, 6)):
        ring = PCoeffRing(p, 8, n)
        rng = random.Random(100 * p + n)
        for _ in range(count):
            mu = random_series(ring, rng, deg)
            fr = frobenius_substitute(mu, n)
            ok = True
            for u in range(p**n):
                val, prec = verschiebung_root_evaluate(fr, u, n)
                ok = ok and prec == ring.M and ring.equal(val, mu.coeffs[0])
            phi = LocallyConstantFn(ring, n, [rng.randrange(ring.mod) for _ in range(p**n)])
            ok = ok and act(phi, fr).equals(fr.scale(phi.at(0)))
            checked += 1
            bad += not ok
    report(6, checked == 50 and bad == 0, "%d random series, %d failures" % (checked, bad))


def test_criterion_07_delta_operator(report, level11):
    worst_fd = 0
    f = level11.base.truncate(400)
    rng = random.Random(7)
    points = [mpmath.mpc(rng.uniform(-0.5, 0.5), rng.uniform(0.3, 1.2)) for _ in range(10)]
    for i, z in enumerate(points):
        m = 1 + i % 2
        fd = finite_difference_delta_power(f, m, z, digits=40, h=mpmath.mpf(10) ** -10)
        ev = evaluate(delta_power(f, m), z, 40).value
        with mpmath.workdps(50):
            worst_fd = max(worst_fd, abs(fd - ev) / abs(ev))
    worst_single = 0
    for k in (0, 2, 4, 12):
        got = evaluate(delta_power(QExpansion([0, 1], weight=k), 1), mpmath.mpc(0, 1), 40).value
        with mpmath.workdps(50):
            want = mpmath.exp(-2 * mpmath.pi) * (1 - k / (4 * mpmath.pi))
            worst_single = max(worst_single, abs(got - want) / abs(want))
    report(7, worst_fd < 1e-8 and worst_single < 1e-20,
           "finite differences at 10 points: max rel %s; single term at i: max rel %s"
           % (mpmath.nstr(worst_fd, 3), mpmath.nstr(worst_single, 3)))


def test_criterion_08_summand_invariance(report, level11, field7, lam7, conductor11_chars):
    reps = class_representatives(field7.order(11))
    worst = 0
    for m in (0, 1):
        for xi in conductor11_chars[:3]:
            chi = PeriodCharacter(lam7, xi, m)
            base = period_summands(level11.base, m, chi, reps, digits=40)
            for beta in (field7.from_coords(3, 1), field7.elt(5), field7.from_coords(-2, 3)):
                moved = period_summands(level11.base, m, chi, [r.scale(beta) for r in reps], digits=40)
                with mpmath.workdps(50):
                    worst = max(worst, max(abs(x - y) / abs(y) for x, y in zip(moved, base)))
    report(8, worst < 1e-20, "Q(sqrt-7), p = 11, s = 1, m in {0,1}: max rel change %s" % mpmath.nstr(worst, 3))


def test_criterion_09_euler_depletion(report, level11):
    level = Eigenform(level11.base.truncate(2000), newform_level=11)
    F7 = ImagQuadField(-7)
    lam = build_lambda(F7, 2, DirichletCharacter.trivial(1))
    order = F7.order(1)
    shift, _ = calibrate_shift(level, PeriodCharacter(lam, characters_of(enumerate_class_group(order))[0], 0),
                               class_representatives(order), 11, digits=40)
    rows = []
    for d, c in ((-7, 1), (-7, 3), (-8, 1)):
        F = ImagQuadField(d)
        lamF = build_lambda(F, 2, DirichletCharacter.trivial(1))
        ordr = F.order(c)
        reps = class_representatives(ordr)
        for xi in characters_of(enumerate_class_group(ordr)):
            for m in (0, 1):
                r = euler_depletion_check(level, m, PeriodCharacter(lamF, xi, m), reps, 11, shift=shift, digits=40)
                rows.append((d, c, m, r.rel_err))
    ok = all(e < (1e-15 if m == 0 else 1e-12) for _, _, m, e in rows)
    worst = {m: max(e for *_, mm, e in rows if mm == m) for m in (0, 1)}
    report(9, ok and len({(d, c) for d, c, _, _ in rows}) >= 2,
           "global shift %d; %d checks over fields -7 (c = 1, 3) and -8 at p = 11; worst m=0 %s, m=1 %s"
           % (shift, len(rows), mpmath.nstr(worst[0], 3), mpmath.nstr(worst[1], 3)))


@pytest.fixture(scope="module")
def ratio_reports(level11, lam7, conductor11_chars):
    return [main_interpolation_report(level11, lam7, phi, 0, 11) for phi in conductor11_chars[:4]]


def test_criterion_10_ratio_constancy(report, ratio_reports):
    live = [r for r in ratio_reports if r.ratio is not None]
    spread_abs = ratio_spread([r.abs_ratio for r in live])
    spread_gauss = ratio_spread([r.gauss_normalized_ratio for r in live])
    spread_cx = ratio_spread([r.ratio for r in live])
    report(10, len(live) >= 3 and spread_abs < 1e-2 and spread_gauss < 1e-2,
           "%d characters of conductor 11 on Q(sqrt-7), p = 11, m = 0: |ratio| spread %.2e, "
           "Gauss-normalised spread %.2e (raw complex spread %.2e carries the Gauss-sum phase); L-value NOT-RIGOROUS"
           % (len(live), spread_abs, spread_gauss, spread_cx))


@pytest.mark.xfail(strict=True, reason="raw complex ratios differ by the unit phase of the Gauss sum of the "
                                       "p-part of phi; the modulus and the phase-normalised ratio are constant")
def test_criterion_10_raw_complex_ratio(ratio_reports):
    assert ratio_spread([r.ratio for r in ratio_reports if r.ratio is not None]) < 1e-2


def test_criterion_11_conductor_gap(report, lam7, field7, conductor11_chars):
    outcomes = []
    for call in (lambda: check_admissible(1, 11, 121),
                 lambda: partition_primes(field7, 121, 11, 11, 1),
                 lambda: padic_avatar(conductor11_chars[0], 0, 11, 121),
                 lambda: main_interpolation_report(
                     Eigenform(QExpansion.from_list([1, -2, -1, 2, 1, 2, -2, 0, -2, -2], level=121),
                               newform_level=121), lam7, conductor11_chars[0], 0, 11)):
        try:
            call()
            outcomes.append("returned")
        except ConductorGap:
            outcomes.append("ConductorGap")
    report(11, all(o == "ConductorGap" for o in outcomes),
           "s = 1 < ord_11(121) = 2 on four entry points: %s" % outcomes)
