"""Maass-Shimura derivatives of q-expansions and their values on CM lattices.

A nearly holomorphic expansion of weight w is stored as integer-coefficient
q-series h_0..h_m with value

    F(z) = sum_r h_r(q) (-4 pi y)^(-r),     q = exp(2 pi i z), y = Im z,

so that delta_w = (1/2 pi i)(d/dz + w/(z - zbar)) acts by

    h'_r = theta h_r + (w - r + 1) h_(r-1),      theta = q d/dq,

raising the weight by 2 and the depth by one.

Lattice values: for a proper ideal a with basis (w1, w2) adapted to the level
(the cyclic subgroup generated by w2/N is the canonical one), the quantity
w2^-(k+2m) delta^m f(w1/w2) depends only on the lattice and is homogeneous of
degree -(k+2m).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd

import mpmath

from .arith import lcm
from .errors import IncompleteRepresentatives, PrecisionLoss
from .qexp import QExpansion, p_deplete, psi_at, to_complex
from .quadfield import (ProperIdeal, adapted_basis, enumerate_class_group, improve_gamma0,
                        split_prime)

DEFAULT_DIGITS = 40


class NearlyHoloExpansion:
    """Components h_0..h_m (lists of exact coefficients) of weight base_weight + 2 m."""

    def __init__(self, components, base_weight, truncation):
        self.components = [list(c) for c in components]
        self.base_weight = int(base_weight)
        self.truncation = int(truncation)

    @classmethod
    def from_qexp(cls, f):
        return cls([list(f.coeffs)], f.weight, f.truncation)

    @property
    def depth(self):
        return len(self.components) - 1

    @property
    def weight(self):
        return self.base_weight + 2 * self.depth

    def coefficient_bound_factor(self, n):
        """Upper bound for sum_r |h_r(n)| / |a(n)| scaled per component (list over r)."""
        k, m = self.base_weight, self.depth
        return [comb(m, r) * _falling(k + m - 1, r) * n ** (m - r) for r in range(m + 1)]


def _falling(x, r):
    out = 1
    for i in range(r):
        out *= x - i
    return out


def maass_shimura(F, current_weight=None):
    """One application of delta_w; w defaults to the expansion's weight."""
    w = F.weight if current_weight is None else current_weight
    D = F.truncation
    comps = F.components
    new = []
    for r in range(len(comps) + 1):
        out = [0] * (D + 1)
        if r < len(comps):
            h = comps[r]
            for n in range(D + 1):
                if n and h[n]:
                    out[n] = n * h[n]
        if r >= 1:
            h = comps[r - 1]
            c = w - r + 1
            for n in range(D + 1):
                if h[n]:
                    out[n] = out[n] + c * h[n]
        new.append(out)
    return NearlyHoloExpansion(new, F.base_weight, D)


def delta_power(f, m):
    F = NearlyHoloExpansion.from_qexp(f)
    for _ in range(m):
        F = maass_shimura(F)
    return F


def closed_form_components(f, m):
    """h_r(n) = binom(m, r) (k+m-1)(k+m-2)...(k+m-r) n^(m-r) a(n), an independent formula."""
    k = f.weight
    out = []
    for r in range(m + 1):
        c = comb(m, r) * _falling(k + m - 1, r)
        out.append([c * n ** (m - r) * f.coeffs[n] if n else (f.coeffs[0] if m == r == 0 else 0) * c
                    for n in range(f.truncation + 1)])
    return out


# ---------------------------------------------------------------- evaluation


@dataclass
class Evaluation:
    value: object
    tail_bound: object
    terms: int
    z: object


def _tail(F, absq, D, digits):
    """Bound for sum_{n > D} sum_r B_r(n) |q|^n, with |a(n)| <= 2 sqrt(n) n^((k-1)/2)."""
    k, m = F.base_weight, F.depth
    with mpmath.workdps(digits):
        n = mpmath.mpf(D + 1)
        deg = mpmath.mpf(m) + mpmath.mpf(k) / 2
        ratio = absq * (1 + 1 / n) ** deg
        if ratio >= 1:
            return mpmath.inf
        term = 2 * n**deg * absq ** (D + 1)
        return term / (1 - ratio)


def needed_terms(F, y, digits=DEFAULT_DIGITS, target_exp=None):
    """Smallest D whose tail bound (times the largest component factor) is below 10^-target."""
    target_exp = digits - 5 if target_exp is None else target_exp
    with mpmath.workdps(digits):
        absq = mpmath.exp(-2 * mpmath.pi * y)
        k, m = F.base_weight, F.depth
        scale = sum(comb(m, r) * _falling(k + m - 1, r) * (4 * mpmath.pi * y) ** (-r) for r in range(m + 1))
        D = 8
        while True:
            if _tail(F, absq, D, digits) * scale < mpmath.mpf(10) ** (-target_exp):
                return D
            D = int(D * 1.25) + 1


def evaluate(F, z, digits=DEFAULT_DIGITS, terms=None):
    """F(z) = sum_r h_r(q) (-4 pi y)^-r, summed to ``terms`` (default: tail-bound driven)."""
    with mpmath.workdps(digits + 10):
        z = mpmath.mpc(z)
        y = z.imag
        if y <= 0:
            raise ValueError("z must lie in the upper half plane")
        need = needed_terms(F, y, digits) if terms is None else terms
        D = min(need, F.truncation)
        q = mpmath.expjpi(2 * z)
        Y = [(-4 * mpmath.pi * y) ** (-r) for r in range(F.depth + 1)]
        coeffs = []
        for n in range(D + 1):
            c = 0
            for r, h in enumerate(F.components):
                a = h[n]
                if a:
                    c += to_complex(a, digits + 10) * Y[r] if not isinstance(a, int) else a * Y[r]
            coeffs.append(c)
        # Horner in q
        s = mpmath.mpc(0)
        for c in reversed(coeffs):
            s = s * q + c
        absq = abs(q)
        scale = sum(abs(Yr) * comb(F.depth, r) * _falling(F.base_weight + F.depth - 1, r)
                    for r, Yr in enumerate(Y))
        tail = _tail(F, absq, D, digits) * scale
        return Evaluation(value=+s, tail_bound=tail, terms=D, z=z)


def evaluate_qexp(f, z, digits=DEFAULT_DIGITS, terms=None):
    return evaluate(NearlyHoloExpansion.from_qexp(f), z, digits, terms).value


def finite_difference_delta(func, z, w, h=None, digits=DEFAULT_DIGITS):
    """(1/2 pi i)(d/dz F + w F/(z - zbar)) with d/dz = (d/dx - i d/dy)/2 by central differences.

    ``func`` is any (not necessarily holomorphic) function of z.
    """
    with mpmath.workdps(digits):
        z = mpmath.mpc(z)
        h = mpmath.mpf(10) ** -10 if h is None else mpmath.mpf(h)
        fx = (func(z + h) - func(z - h)) / (2 * h)
        fy = (func(z + 1j * h) - func(z - 1j * h)) / (2 * h)
        dz = (fx - 1j * fy) / 2
        return (dz + w * func(z) / (z - mpmath.conj(z))) / (2j * mpmath.pi)


def finite_difference_delta_power(f, m, z, digits=DEFAULT_DIGITS, h=None):
    """delta^m f(z) by nested finite differences (independent of the recurrence)."""
    k = f.weight

    def make(depth):
        if depth == 0:
            return lambda x: evaluate_qexp(f, x, digits + 20)
        inner = make(depth - 1)
        w = k + 2 * (depth - 1)
        hh = mpmath.mpf(10) ** (-(digits // (2 * (m + 1)) + 2)) if h is None else h
        return lambda x: finite_difference_delta(inner, x, w, hh, digits + 20)

    with mpmath.workdps(digits + 20):
        return make(m)(z)


# ---------------------------------------------------------------- lattice values


@dataclass
class CMEvaluation:
    ideal: object
    tau: object
    omega2: object
    value: object
    tail_bound: object
    terms: int
    level: int


def cm_basis(ideal, level):
    """Level-adapted basis (w1, w2) with Im(w1/w2) pushed up inside Gamma_0(level)."""
    w1, w2 = adapted_basis(ideal, level)
    return improve_gamma0(w1, w2, level)


def lattice_value(f, m, ideal, level=None, digits=DEFAULT_DIGITS, expansion=None, check=True):
    """w2^-(k+2m) delta^m f(w1/w2) on the level-adapted basis of ``ideal``."""
    level = f.level if level is None else level
    F = expansion if expansion is not None else delta_power(f, m)
    w1, w2 = cm_basis(ideal, level)
    with mpmath.workdps(digits + 10):
        tau = (w1 / w2).to_complex(digits + 10)
        om2 = w2.to_complex(digits + 10)
        ev = evaluate(F, tau, digits)
        wt = f.weight + 2 * m
        val = ev.value * om2 ** (-wt)
        tail = ev.tail_bound * abs(om2) ** (-wt)
        if check and tail > mpmath.mpf(10) ** -5 * abs(val):
            raise PrecisionLoss("tail bound %s exceeds 1e-5 |value| (%s)" % (mpmath.nstr(tail, 5), mpmath.nstr(abs(val), 5)),
                                terms=ev.terms)
        return CMEvaluation(ideal=ideal, tau=tau, omega2=om2, value=+val, tail_bound=tail, terms=ev.terms,
                            level=level)


# ---------------------------------------------------------------- characters on lattices


class PeriodCharacter:
    """chi*(a) = gamma^(k+2m) eps_lambda(gamma) xi([a]) for a proper R_c-ideal a, with a R = (gamma).

    This is the class-number-one realisation of chi_m on lattices: it is
    multiplicative, satisfies chi*(beta a) = beta^(k+2m) chi*(a) for beta
    prime to the modulus of lambda, and agrees with chi_m(a R) on ideals
    prime to the conductor.
    """

    def __init__(self, lam, xi, m):
        self.lam = lam
        self.xi = xi
        self.m = int(m)
        self.k = lam.k1
        self.order = xi.group.order if xi is not None else None

    @property
    def weight(self):
        return self.k + 2 * self.m

    def generator(self, ideal):
        from .heckechar import ideal_generator
        F = ideal.order.field
        return ideal_generator(ideal.lattice * F.maximal_order.lattice)

    def value(self, ideal, digits=DEFAULT_DIGITS):
        g = self.generator(ideal)
        with mpmath.workdps(digits + 10):
            v = g.to_complex(digits + 10) ** self.weight
            if self.lam.residues.norm > 1:
                t = self.lam.eps_turn(g)
                if t is None:
                    raise ValueError("generator not prime to the modulus of lambda")
                v *= mpmath.expjpi(2 * mpmath.mpf(t.numerator) / t.denominator)
            if self.xi is not None:
                t = self.xi.turn_of_ideal(ideal)
                v *= mpmath.expjpi(2 * mpmath.mpf(t.numerator) / t.denominator)
            return v

    def value_on_maximal(self, lat, digits=DEFAULT_DIGITS):
        """chi* on an R-ideal prime to the conductor, via lat cap R_c."""
        order = self.order
        inter = lat.intersect(order.lattice) if order.conductor > 1 else lat
        return self.value(ProperIdeal.from_lattice(order, inter), digits)


def check_representatives(reps, order):
    G = enumerate_class_group(order)
    seen = [r.normalized_form for r in reps]
    if sorted(seen) != sorted(G.representatives) or len(set(seen)) != len(seen):
        raise IncompleteRepresentatives("representatives do not cover Cl(R_%d) exactly once" % order.conductor,
                                        have=len(set(seen)), need=G.size)


def period_summands(f, m, chi, reps, level=None, digits=DEFAULT_DIGITS, expansion=None):
    """[chi*(a_j) * lattice_value(a_j)] for each representative."""
    F = expansion if expansion is not None else delta_power(f, m)
    out = []
    for a in reps:
        lv = lattice_value(f, m, a, level, digits, expansion=F)
        with mpmath.workdps(digits + 10):
            out.append(chi.value(a, digits) * lv.value)
    return out


def period_sum(f, m, chi, reps, level=None, digits=DEFAULT_DIGITS, normalize=False, check=True,
               expansion=None):
    """sum_j chi*(a_j) lattice_value(f, m, a_j) over a complete set of class representatives.

    With ``normalize`` the sum is multiplied by phi_Q(c) / (2 phi_M(c)) for
    the conductor c of the order.
    """
    if check and reps:
        check_representatives(reps, reps[0].order)
    terms = period_summands(f, m, chi, reps, level, digits, expansion)
    with mpmath.workdps(digits + 10):
        s = mpmath.fsum(terms)
        if normalize and reps:
            from .arith import euler_phi
            c = reps[0].order.conductor
            F = reps[0].order.field
            s = s * mpmath.mpf(euler_phi(c)) / (2 * F.phi_M(c))
        return +s


def class_representatives(order):
    G = enumerate_class_group(order)
    return [order.ideal_from_form(fm) for fm in G.representatives]


# ---------------------------------------------------------------- Euler factor at p


@dataclass
class EulerCheck:
    lhs: object
    rhs: object
    rel_err: object
    factor: object
    exponent_shift: int
    config: dict = field(default_factory=dict)


def euler_factor(a_p, psi_p, k, m, chi_pbar, p, shift=0, digits=DEFAULT_DIGITS):
    """1 - a(p) X + psi(p) p^(k-1) X^2 with X = p^(m + shift) / chi*(pbar)."""
    with mpmath.workdps(digits + 10):
        X = mpmath.mpf(p) ** (m + shift) / chi_pbar
        return 1 - to_complex(a_p, digits) * X + to_complex(psi_p, digits) * mpmath.mpf(p) ** (k - 1) * X**2


def euler_depletion_check(eig, m, chi, reps, p, shift=0, digits=DEFAULT_DIGITS):
    """Compare the period sum of f^(p) with E~(p) times the period sum of f.

    lhs uses the depleted q-series on bases adapted to level lcm(N, p^2);
    rhs uses f on bases adapted to level N. ``shift`` is the calibrated
    exponent correction in X = p^(m + shift)/chi*(pbar).
    """
    f = eig.base if hasattr(eig, "base") else eig
    N = f.level
    order = reps[0].order
    if order.conductor % p == 0:
        from .errors import ConductorMismatch
        raise ConductorMismatch("the depletion check needs p prime to the conductor (s = 0)")
    fp = p_deplete(f, p)
    Np = lcm(N, p * p)
    lhs = period_sum(fp, m, chi, reps, level=Np, digits=digits)
    base = period_sum(f, m, chi, reps, level=N, digits=digits)
    F = order.field
    pbar, _ = split_prime(F, p)
    chi_pbar = chi.value_on_maximal(pbar.lattice, digits)
    E = euler_factor(f.coeffs[p], psi_at(f, p), f.weight, m, chi_pbar, p, shift, digits)
    with mpmath.workdps(digits + 10):
        rhs = E * base
        rel = abs(lhs - rhs) / abs(rhs)
    return EulerCheck(lhs=lhs, rhs=rhs, rel_err=rel, factor=E, exponent_shift=shift,
                      config={"field": F.d, "p": p, "conductor": order.conductor, "m": m, "level": N})


def calibrate_shift(eig, chi, reps, p, candidates=range(-3, 4), digits=DEFAULT_DIGITS):
    """The exponent shift minimising the m = 0 relative error on one configuration."""
    best = None
    for e in candidates:
        r = euler_depletion_check(eig, 0, chi, reps, p, shift=e, digits=digits)
        if best is None or r.rel_err < best[1]:
            best = (e, r.rel_err)
    return best
