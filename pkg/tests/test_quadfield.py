from fractions import Fraction
from itertools import product
from math import gcd, isqrt

import pytest
from hypothesis import given, strategies as st

from anticyc.errors import ConductorMismatch, NonSplitPrime
from anticyc.quadfield import (ImagQuadField, class_number_formula, cm_point, compose_forms,
                               Lattice, coset_representatives, enumerate_class_group, identity_form,
                               inverse_form, project_class, reduce_form, split_prime)


def brute_reduced_forms(D):
    """Reduced primitive forms listed straight from the definition."""
    out = []
    for a in range(1, isqrt(abs(D) // 3) + 1):
        for b in range(-a + 1, a + 1):
            if (b * b - D) % (4 * a):
                continue
            c = (b * b - D) // (4 * a)
            if c < a or (b < 0 and a == c) or gcd(gcd(a, abs(b)), c) != 1:
                continue
            out.append((a, b, c))
    return sorted(out)


def test_minus23_group():
    G = enumerate_class_group(ImagQuadField(-23).order(1))
    assert G.size == 3
    assert sorted(G.representatives) == [(1, 1, 6), (2, -1, 3), (2, 1, 3)]
    assert G.generator_orders == [3]


def test_gaussian_trivial_group():
    assert enumerate_class_group(ImagQuadField(-4).order(1)).size == 1


def test_minus7_conductor11():
    F = ImagQuadField(-7)
    assert enumerate_class_group(F.order(11)).size == 10
    assert class_number_formula(F, 1, 11, 1) == 10


@pytest.mark.parametrize("d,c", [(-7, 11), (-23, 1), (-23, 5), (-4, 3), (-8, 9), (-11, 13), (-3, 7)])
def test_enumeration_matches_brute_force(d, c):
    D = c * c * d
    assert sorted(enumerate_class_group(ImagQuadField(d).order(c)).representatives) == brute_reduced_forms(D)


def test_formula_examples():
    assert class_number_formula(ImagQuadField(-4), 1, 5, 1) == 2
    for d in (-7, -8, -11, -15, -23):
        F = ImagQuadField(d)
        p = next(q for q in (3, 5, 7, 11, 13, 17, 19, 23) if F.splitting(q) == "split")
        assert class_number_formula(F, 1, p, 0) == 2 * F.h // F.w


def test_formula_trivial_conductor_is_h():
    # for w > 2 the displayed ratio is fractional at c p^n = 1; the group is the class group
    for d in (-3, -4):
        F = ImagQuadField(d)
        p = 7 if d == -3 else 5
        assert class_number_formula(F, 1, p, 0) == F.h == 1


def test_formula_rejects_nonsplit():
    with pytest.raises(NonSplitPrime):
        class_number_formula(ImagQuadField(-4), 1, 7, 1)


CONFIGS = [(d, c, p, n) for d, c, p, n in product((-4, -7, -8, -11, -23), (1, 3), (5, 11, 13), (0, 1, 2))
           if gcd(c, p) == 1 and ImagQuadField(d).splitting(p) == "split" and c * c * p**(2 * n) * abs(d) < 10**6]


@pytest.mark.parametrize("d,c,p,n", CONFIGS)
def test_formula_matches_enumeration(d, c, p, n):
    F = ImagQuadField(d)
    assert enumerate_class_group(F.order(c * p**n)).size == class_number_formula(F, c, p, n)


def test_split_prime_minus7():
    F = ImagQuadField(-7)
    pbar, p = split_prime(F, 11)
    s = F.sqrt_rad
    assert p.lattice.contains(s - 2) and p.lattice.contains(F.elt(11))
    assert pbar.lattice.contains(s + 2) and not p.lattice.contains(s + 2)
    assert (p * pbar).lattice == F.maximal_order.lattice * 11


def test_split_prime_gaussian():
    F = ImagQuadField(-4)
    with pytest.raises(NonSplitPrime):
        split_prime(F, 7)
    pbar, p = split_prime(F, 5)
    i = F.sqrt_rad
    assert p.lattice.contains(i - 2) and pbar.lattice.contains(i + 2)
    assert (p * pbar).lattice == F.maximal_order.lattice * 5


def test_split_prime_ramified():
    with pytest.raises(NonSplitPrime):
        split_prime(ImagQuadField(-7), 7)


def test_projection_to_class_group():
    F = ImagQuadField(-7)
    G = enumerate_class_group(F.order(11))
    R = F.maximal_order
    for form in G.representatives:
        img = project_class(G.ideal(form), R)
        assert img.normalized_form == identity_form(R.discriminant)


def test_projection_fibres_equal():
    F = ImagQuadField(-7)
    G2 = enumerate_class_group(F.order(121))
    G1 = enumerate_class_group(F.order(11))
    fibres = {}
    for form in G2.representatives:
        key = project_class(G2.ideal(form), G1.order).normalized_form
        fibres[key] = fibres.get(key, 0) + 1
    assert set(fibres) == set(G1.representatives)
    assert set(fibres.values()) == {G2.size // G1.size}


def test_projection_is_homomorphism():
    F = ImagQuadField(-23)
    G = enumerate_class_group(F.order(25))
    H = G.order.field.order(5)
    reps = G.representatives
    for f, g in product(reps, reps):
        lhs = project_class(G.ideal(G.mul(f, g)), H).normalized_form
        a = project_class(G.ideal(f), H).normalized_form
        b = project_class(G.ideal(g), H).normalized_form
        assert lhs == reduce_form(compose_forms(a, b))


def test_projection_needs_nested_orders():
    F = ImagQuadField(-7)
    with pytest.raises(ConductorMismatch):
        project_class(F.order(11).unit_ideal(), F.order(3))


def test_group_axioms_exhaustive():
    G = enumerate_class_group(ImagQuadField(-7).order(33))
    assert G.size <= 200
    reps = G.representatives
    e = G.identity
    for f in reps:
        assert reduce_form(compose_forms(f, e)) == f
        assert reduce_form(compose_forms(f, inverse_form(f))) == e
    for f, g in product(reps, reps):
        assert reduce_form(compose_forms(f, g)) == reduce_form(compose_forms(g, f))
    sample = reps[:12]
    for f, g, h in product(sample, sample, sample):
        assert reduce_form(compose_forms(compose_forms(f, g), h)) == reduce_form(compose_forms(f, compose_forms(g, h)))


def test_representatives_are_proper():
    for d, c in [(-7, 11), (-23, 3), (-4, 5), (-8, 9)]:
        G = enumerate_class_group(ImagQuadField(d).order(c))
        for form in G.representatives:
            assert G.ideal(form).multiplier_conductor() == c


def test_coset_representatives():
    F = ImagQuadField(-23)
    reps = coset_representatives(1, 13, F)
    assert len(reps) == 3
    assert sorted(r.normalized_form for r in reps) == sorted(enumerate_class_group(F.order(1)).representatives)
    for r in reps:
        assert gcd(int(r.norm()), 13) == 1
    single = coset_representatives(1, 11, ImagQuadField(-7))
    assert len(single) == 1 and single[0].normalized_form == identity_form(-7)


def test_cm_points_of_unit_lattices():
    z = cm_point(ImagQuadField(-4).maximal_order.unit_ideal(), 30)
    assert abs(z.tau - 1j) < 1e-25
    z = cm_point(ImagQuadField(-3).maximal_order.unit_ideal(), 30)
    F = z.tau_exact.F
    assert z.tau_exact == (F.elt(1) + F.sqrt_rad) * Fraction(1, 2)


@given(st.sampled_from([(-7, 11), (-23, 1), (-8, 3), (-20, 1), (-4, 5)]), st.data())
def test_cm_point_keeps_lattice(dc, data):
    d, c = dc
    G = enumerate_class_group(ImagQuadField(d).order(c))
    ideal = G.ideal(data.draw(st.sampled_from(G.representatives)))
    z = cm_point(ideal, 30)
    (a, b), (cc, dd) = z.matrix
    assert a * dd - b * cc == 1
    t = z.tau_exact
    assert abs(t.x) <= Fraction(1, 2) and t.norm() >= 1
    w1 = t * z.omega2_exact
    assert Lattice.from_gens(t.F, [w1, z.omega2_exact]) == ideal.lattice
