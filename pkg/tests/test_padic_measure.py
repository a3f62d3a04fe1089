import random
from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from anticyc.errors import CoefficientNotIntegral, CyclotomicLevelTooSmall, NotDepleted
from anticyc.heckechar import DirichletCharacter, dirichlet_characters
from anticyc.padic_measure import (LocallyConstantFn, MeasureSeries, PCoeffRing, act, act_precision_plan,
                                   assemble_cuspidal_measure, ball_measure, dirac, frobenius_substitute,
                                   integrate, is_unit_supported, mahler_selftest, moment, q_model_measure,
                                   random_series, restrict_to_units, series_from_ints, twisted_moment,
                                   verschiebung_root_evaluate)
from anticyc.qexp import QExpansion, p_deplete, twist


def stirling_moment(coeffs, m, mod):
    """sum_n c_n S(m, n) n!, with S from the explicit inclusion-exclusion formula."""
    total = 0
    for n, c in enumerate(coeffs):
        surj = sum((-1) ** (n - i) * comb(n, i) * i**m for i in range(n + 1))
        total += c * surj
    return total % mod


def reflected(chi):
    return DirichletCharacter(chi.modulus, {(-a) % chi.modulus: t for a, t in chi.turns.items()})


def scalar(ring, v):
    v = np.asarray(v, dtype=object) % ring.mod
    assert not np.any(v[1:])
    return int(v[0])


R5 = PCoeffRing(5, 6, 1)


@pytest.mark.parametrize("m", range(6))
def test_moment_dirac_examples(m):
    assert scalar(R5, moment(dirac(R5, 1), m)) == 1
    for j in (0, 2, 7):
        assert scalar(R5, moment(dirac(R5, j), m)) == pow(j, m, R5.mod)


def test_moment_stirling_example():
    mu = series_from_ints(R5, [1, 1, 1])
    assert scalar(R5, moment(mu, 2)) == stirling_moment([1, 1, 1], 2, R5.mod)


@given(st.lists(st.integers(0, 5**6 - 1), min_size=1, max_size=20), st.integers(0, 6))
def test_moment_matches_stirling_oracle(coeffs, m):
    mu = series_from_ints(R5, coeffs)
    assert scalar(R5, moment(mu, m)) == stirling_moment(coeffs, m, R5.mod)


def test_act_examples():
    ring = PCoeffRing(3, 8, 2)
    mu = series_from_ints(ring, [4, 1, 7, 2])
    assert act(LocallyConstantFn.constant(ring), mu).equals(mu)
    phi = LocallyConstantFn(ring, 2, [(3 * x + 1) % 5 for x in range(9)])
    for j in (0, 1, 5, 11):
        assert act(phi, dirac(ring, j)).equals(dirac(ring, j).scale(phi.at(j)))
    t = dirac(ring, 1)
    for b in range(9):
        out = act(LocallyConstantFn.indicator(ring, 2, b), t)
        assert out.equals(t if b == 1 else series_from_ints(ring, [0]))


def test_twisted_moment_examples():
    ring = PCoeffRing(5, 8, 2)
    mu = series_from_ints(ring, [3, 1, 4, 1, 5])
    assert ring.equal(twisted_moment(mu, LocallyConstantFn.constant(ring), 2), moment(mu, 2))
    units = LocallyConstantFn.units_indicator(ring)
    assert ring.equal(twisted_moment(dirac(ring, 5), units, 0), ring.zero())
    chi = next(c for c in dirichlet_characters(25) if c.order == 20)
    f = QExpansion.from_list([2, -1, 0, 3, 1, 4, -2, 5, 1, 1, 2, 0, 3])
    m = 3
    oracle = ring.zero()
    for j in range(1, f.truncation + 1):
        if chi.turn(j) is not None:
            oracle = oracle + ring.root_of_unity(chi.turn(j)) * (int(f[j]) * j**m)
    got = twisted_moment(q_model_measure(f, ring, "+"), LocallyConstantFn.from_character(ring, chi), m)
    assert ring.equal(got, oracle % ring.mod, 6)


def test_restriction_examples():
    ring = PCoeffRing(3, 8, 1)
    assert restrict_to_units(dirac(ring, 3)).equals(series_from_ints(ring, [0]))
    mu = dirac(ring, 1).add(dirac(ring, 3))
    assert restrict_to_units(mu).equals(dirac(ring, 1))
    assert not is_unit_supported(mu) and is_unit_supported(dirac(ring, 2))


def test_frobenius_verschiebung_examples():
    ring = PCoeffRing(5, 6, 1)
    t = dirac(ring, 1)
    assert frobenius_substitute(t, 1).equals(dirac(ring, 5))
    val, _ = verschiebung_root_evaluate(t, 1, 1)
    assert ring.equal(val, ring.root_of_unity(Fraction(1, 5)))
    one = series_from_ints(ring, [1])
    assert frobenius_substitute(one, 1).equals(one)
    for u in range(5):
        assert ring.equal(verschiebung_root_evaluate(one, u, 1)[0], ring.one())
    with pytest.raises(CyclotomicLevelTooSmall):
        verschiebung_root_evaluate(t, 1, 2)


@pytest.mark.parametrize("p,n,count,deg", [(3, 1, 15, 40), (3, 2, 15, 25), (5, 1, 12, 25), (5, 2, 8, 6)])
def test_serre_tate_substitution_laws(p, n, count, deg):
    ring = PCoeffRing(p, 8, n)
    rng = random.Random(1000 * p + n)
    for _ in range(count):
        mu = random_series(ring, rng, deg)
        fr = frobenius_substitute(mu, n)
        for u in range(p**n):
            val, prec = verschiebung_root_evaluate(fr, u, n)
            assert prec == ring.M and ring.equal(val, mu.coeffs[0])
        phi = LocallyConstantFn(ring, n, [rng.randrange(ring.mod) for _ in range(p**n)])
        assert act(phi, fr).equals(fr.scale(phi.at(0)))


def test_q_model_examples():
    ring = PCoeffRing(3, 8, 1)
    assert q_model_measure(QExpansion.from_list([1]), ring, "+").equals(dirac(ring, 1))
    f = QExpansion.from_list([1, -2, -1, 2, 1, 2, -2, 0, -2, -2])
    mu = q_model_measure(f, ring, "+")
    for m in range(4):
        assert scalar(ring, moment(mu, m)) == sum(int(f[j]) * j**m for j in range(1, 11)) % ring.mod
    with pytest.raises(CoefficientNotIntegral):
        q_model_measure(QExpansion([0, Fraction(1, 3)]), ring, "+")


def test_key_identity_small(level11):
    f = level11.base.truncate(60)
    ring = PCoeffRing(3, 8, 1)
    Ds = act_precision_plan(ring, 30, 8, 1)
    mu = q_model_measure(f, ring, "geometric", Ds)
    for chi in dirichlet_characters(3):
        lhs = act(LocallyConstantFn.from_character(ring, chi), mu)
        assert lhs.equals(q_model_measure(twist(f, reflected(chi)), ring, "geometric", Ds))
        plus = act(LocallyConstantFn.from_character(ring, chi), q_model_measure(f, ring, "+"))
        assert plus.equals(q_model_measure(twist(f, chi), ring, "+"))


@pytest.mark.parametrize("p", [3, 5])
def test_depleted_measure_is_unit_supported(level11, p):
    ring = PCoeffRing(p, 8, 1)
    f = level11.base.truncate(80)
    assert is_unit_supported(q_model_measure(p_deplete(f, p), ring, "+"))
    assert not is_unit_supported(q_model_measure(f, ring, "+"))
    Ds = act_precision_plan(ring, 30, 8, 1)
    assert is_unit_supported(q_model_measure(p_deplete(f, p), ring, "geometric", Ds))


@given(st.integers(0, 3**8 - 1), st.integers(0, 3**8 - 1), st.data())
def test_act_is_linear(a, b, data):
    ring = PCoeffRing(3, 8, 2)
    c1 = data.draw(st.lists(st.integers(0, ring.mod - 1), min_size=1, max_size=15))
    c2 = data.draw(st.lists(st.integers(0, ring.mod - 1), min_size=1, max_size=15))
    vals = data.draw(st.lists(st.integers(0, ring.mod - 1), min_size=9, max_size=9))
    phi = LocallyConstantFn(ring, 2, vals)
    x, y = series_from_ints(ring, c1), series_from_ints(ring, c2)
    assert act(phi, x.add(y, a, b)).equals(act(phi, x).add(act(phi, y), a, b))


@settings(max_examples=10)
@given(st.lists(st.integers(0, 5**6 - 1), min_size=1, max_size=12))
def test_ball_additivity(coeffs):
    ring = PCoeffRing(5, 6, 2)
    mu = series_from_ints(ring, coeffs)
    for n in (1, 2):
        balls = [ball_measure(mu, b, n) for b in range(5**n)]
        prec = min(pr for _, pr in balls)
        assert prec == ring.M - n
        acc = sum(np.asarray(v, dtype=object) for v, _ in balls)
        assert ring.equal(acc, moment(mu, 0), prec)


def test_assembled_measure():
    ring = PCoeffRing(3, 8, 1)
    f = QExpansion.from_list([1, 2, 3, 4, 5, 6, 7])
    mu = q_model_measure(p_deplete(f, 3), ring, "+")
    single = assemble_cuspidal_measure([mu], [1])
    assert single[0][1].equals(mu)
    comp = assemble_cuspidal_measure([mu, mu.scale(2)], [3, 5], tags=["a", "b"])
    const = [LocallyConstantFn.constant(ring)] * 2
    total = integrate(comp, const, 0)
    expect = (3 * scalar(ring, moment(mu, 0)) + 5 * scalar(ring, moment(mu.scale(2), 0))) % ring.mod
    assert scalar(ring, total) == expect
    with pytest.raises(NotDepleted):
        assemble_cuspidal_measure([q_model_measure(f, ring, "+")], [1])


def test_mahler_selftest_small():
    rep = mahler_selftest(3, M=8, count=6, max_degree=20)
    assert rep["ok"] and rep["spanning_set_size"] == 21
    assert all(v["failed"] == 0 and v["passed"] > 0 for v in rep["suites"].values())


def test_measure_series_bookkeeping():
    ring = PCoeffRing(3, 5, 0)
    mu = MeasureSeries(ring, [1, 2, 3, 4])
    assert mu.truncation == 3 and mu.prec == 5
    assert mu.truncate(1).truncation == 1
