"""Main-theorem constants and central Rankin-Selberg values.

Conventions. Characters chi_m are built in :mod:`anticyc.heckechar` as ideal
characters chi* with chi*((g)) = g^(k+2m) eps(g) on principal ideals.  The
idele class character omega attached to the unitary projection chi_m^- is
normalised by its values at uniformizers:

    omega(varpi_l) = |chi*(conj l)| / chi*(conj l)      (l prime to the modulus)

which matches the reading chi_m(pbar) = p^m / chi*(pbar) fixed by the Euler
factor at p.  Local components at ramified places, restrictions to Q_l^x
and local Gauss sums are all derived from this one normalisation.

Two estimators of the central value are offered.  ``rankin_selberg_central``
is the truncated unfolded Dirichlet series (heuristic, flagged
NOT-RIGOROUS).  ``smoothed_central_value`` evaluates the primitive L-value
through a smoothed sum weighted by Bessel functions and checks the
functional equation numerically before trusting it.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

import mpmath
import numpy as np

from .arith import euler_phi, factor, isprime, lcm, val
from .errors import (ConductorGap, ConductorMismatch, DivisionByZero, NonSplitPrime,
                     SlowConvergence, VanishingSplitCoefficient)
from .heckechar import (DirichletCharacter, PAdicAvatar, chi_m, check_admissible,
                        gauss_sum, ideal_generator, ramified_prime)
from .qexp import satake as _satake_exact
from .qexp import to_complex
from .quadfield import Lattice, enumerate_class_group, split_prime

RIGOROUS = "RIGOROUS"
HEURISTIC = "HEURISTIC"
NOT_RIGOROUS = "NOT-RIGOROUS"

DEFAULT_DPS = 30
# central values below this are treated as zero and excluded from ratios
VANISHING_TOL = 1e-10


def _primes(n):
    return [p for p, _ in factor(n)] if n not in (0, 1, -1) else []


# ---------------------------------------------------------------- prime sets


@dataclass(frozen=True)
class PrimeSets:
    """The partition A, C_1, C_i, C_r, C_sp of the relevant primes."""

    d: int
    N0: int
    conductor: int
    p: int
    s: int
    A: tuple
    C1: tuple
    Ci: tuple
    Cr: tuple
    Csp: tuple
    nu: dict = field(default_factory=dict)

    @property
    def ramified_case(self):
        return bool(self.A)

    @property
    def case(self):
        return "p-ramified" if self.A else "p-unramified"

    @property
    def C(self):
        return tuple(sorted(self.C1 + self.Ci + self.Cr + self.Csp))

    def nu_of(self, l):
        return self.nu.get(l, 0)

    def to_json(self):
        return {"A": list(self.A), "C1": list(self.C1), "Ci": list(self.Ci), "Cr": list(self.Cr),
                "Csp": list(self.Csp), "case": self.case, "nu": {str(k): v for k, v in sorted(self.nu.items())},
                "p": self.p, "s": self.s}


def nonsplit_part(field, N0):
    out = 1
    for l, e in factor(N0):
        if field.splitting(l) != "split":
            out *= l**e
    return out


def partition_primes(field, N0, conductor_of_phi, p, s):
    """Split the primes of d(M), N0 and the conductor of phi into A, C_1, C_i, C_r, C_sp.

    ``conductor_of_phi`` is the ring class conductor N_ns p^s (s = 0 in the
    p-unramified case). When 2 satisfies the C_r condition it is placed in
    C_r rather than C_1 so that the sets stay disjoint.
    """
    d = field.d
    if not isprime(p) or field.splitting(p) != "split":
        raise NonSplitPrime("%d does not split in Q(sqrt(%d))" % (p, d), p=p, d=d)
    c = int(conductor_of_phi)
    if s < 0 or (c % p**s) or (c // p**s) % p == 0:
        raise ConductorMismatch("conductor %d does not have p-part %d^%d" % (c, p, s), conductor=c, p=p, s=s)
    check_admissible(s, p, N0)
    Nns = nonsplit_part(field, N0)
    if c // p**s != Nns:
        raise ConductorMismatch("conductor %d is not N_ns p^s = %d * %d^%d" % (c, Nns, p, s),
                                conductor=c, N_ns=Nns)
    primes = sorted(set(_primes(d)) | set(_primes(N0)) | set(_primes(c)))
    nu = {l: val(N0, l) for l in primes if N0 % l == 0}
    A = (p,) if s >= 1 else ()
    C1, Ci, Cr, Csp = [], [], [], []
    for l in primes:
        if l in A:
            continue
        if d % l == 0:
            if l == 2 and val(d, 2) == 2 and nu.get(2, 0) > 2:
                Cr.append(l)
            else:
                C1.append(l)
        elif field.splitting(l) == "inert":
            Ci.append(l)
        else:
            Csp.append(l)
    return PrimeSets(d=d, N0=int(N0), conductor=c, p=p, s=s, A=A, C1=tuple(C1), Ci=tuple(Ci),
                     Cr=tuple(Cr), Csp=tuple(Csp), nu=nu)


# ---------------------------------------------------------------- primes of M


@lru_cache(maxsize=4096)
def primes_above(field, l):
    """Prime ideals of the maximal order above l.

    Split: (pbar, p) in the naming of ``split_prime`` for odd l; for l = 2
    the prime called p is (2, omega - r) with r the smallest root mod 2 of
    the minimal polynomial of omega. Inert: (lR,). Ramified: (P,) with P^2 = lR.
    """
    F = field
    kind = F.splitting(l)
    R = F.maximal_order.lattice
    if kind == "inert":
        return (R * l,)
    if kind == "ramified":
        return (ramified_prime(F, l),)
    if l != 2:
        pbar, pp = split_prime(F, l)
        return (pbar.lattice, pp.lattice)
    d = F.d
    c0 = (d * d - d) // 4
    roots = [r for r in range(2) if (r * r - d * r + c0) % 2 == 0]
    lats = []
    for r in roots:
        g = F.omega - F.elt(r)
        lats.append(Lattice.from_gens(F, [F.elt(2), F.omega * 2, g, g * F.omega]))
    return (lats[1], lats[0])


def _prime_norm(lat):
    return int(lat.covolume())


def _valuation(lat_prime, x):
    """Exponent of a prime ideal in the principal ideal (x), x integral and nonzero."""
    F = lat_prime.F
    v = 0
    cur = lat_prime
    while cur.contains(x):
        v += 1
        cur = cur * lat_prime
    return v


def _ideal_factor(lat):
    """[(prime lattice, exponent)] for an integral ideal of the maximal order."""
    F = lat.F
    n = int(lat.covolume())
    out = []
    for l, _ in factor(n) if n > 1 else []:
        for P in primes_above(F, l):
            e = 0
            cur = P
            while cur.contains_lattice(lat):
                e += 1
                cur = cur * P
            if e:
                out.append((P, e))
    return out


def _power(lat, e):
    R = lat.F.maximal_order.lattice
    out = R
    for _ in range(e):
        out = out * lat
    return out


def _crt_one(F, Q, B):
    """a in Q with 1 - a in B, for coprime integral ideals Q and B."""
    R = F.maximal_order.lattice
    if B == R:
        return F.elt(0)
    if Q == R:
        return F.elt(1)
    b1, b2 = Q.basis()
    n = int(B.covolume())
    for i in range(n):
        for j in range(n):
            a = b1 * i + b2 * j
            if B.contains(F.elt(1) - a):
                return a
    raise ConductorMismatch("ideals are not coprime")


# ---------------------------------------------------------------- unitary characters


class UnitaryCharacter:
    """The unitary projection chi^- of an ideal character chi*, as an idele class character.

    ``chi_star`` is an ArithmeticHeckeCharacter. Values are complex numbers
    at ``dps`` digits.
    """

    def __init__(self, chi_star, dps=DEFAULT_DPS):
        self.chi = chi_star
        self.field = chi_star.field
        self.dps = dps
        self.modulus = chi_star.modulus.conj()
        self._fac = _ideal_factor(self.modulus)
        self._cond_cache = {}
        self._crt_cache = {}

    # pieces of the modulus
    def _exp_in_modulus(self, P):
        for Q, e in self._fac:
            if Q == P:
                return e
        return 0

    def _complement(self, P):
        R = self.field.maximal_order.lattice
        out = R
        for Q, e in self._fac:
            if Q != P:
                out = out * _power(Q, e)
        return out

    def _eps_phase(self, x):
        """exp(2 pi i eps(conj x)) for x prime to the modulus of omega."""
        t = self.chi.eps_turn(x.conj())
        if t is None:
            raise ConductorMismatch("element not prime to the modulus")
        return mpmath.expjpi(2 * mpmath.mpf(t.numerator) / t.denominator)

    def infinity(self, z):
        """omega_infinity at a nonzero complex number."""
        with mpmath.workdps(self.dps):
            z = mpmath.mpc(z)
            u = z / abs(z)
            return mpmath.conj(u) ** self.chi.k1 * u**self.chi.k2

    def _unit_value(self, P, u):
        """omega_P(u) for an element u prime to P (exponent of P in the modulus known)."""
        F = self.field
        e = self._exp_in_modulus(P)
        if e == 0:
            return mpmath.mpc(1)
        a = self._idempotent(P, e)
        x = u * (F.elt(1) - a) + a
        return self._eps_phase(x)

    def _idempotent(self, P, e):
        key = P.key()
        if key not in self._crt_cache:
            self._crt_cache[key] = _crt_one(self.field, _power(P, e), self._complement(P))
        return self._crt_cache[key]

    def _uniformizer_value(self, P):
        F = self.field
        pi = ideal_generator(P)
        e = self._exp_in_modulus(P)
        with mpmath.workdps(self.dps):
            if e == 0:
                return self.ideal_value(P)
            a = self._idempotent(P, e)
            # y = pi mod B, 1 mod P^e
            y = pi * a + (F.elt(1) - a)
            inf = self.infinity(pi.to_complex(self.dps))
            return 1 / (inf * self._eps_phase(y))

    def ideal_value(self, P):
        """omega at a uniformizer of a prime P prime to the modulus (the ideal value)."""
        lb = P.conj()
        R = self.field.maximal_order.lattice
        if lb + self.chi.modulus != R:
            return self._uniformizer_value(P) if self.conductor_exponent(P) == 0 else mpmath.mpc(0)
        with mpmath.workdps(self.dps):
            v = self.chi.value_complex(lb, self.dps)
            return abs(v) / v

    def local(self, P, x):
        """omega_P(x) for an integral nonzero element x of M (QElt or int)."""
        F = self.field
        if not hasattr(x, "coords"):
            x = F.elt(x)
        v = _valuation(P, x)
        pi = ideal_generator(P)
        u = x
        for _ in range(v):
            u = u / pi
        with mpmath.workdps(self.dps):
            out = self._unit_value(P, u)
            if v:
                out *= self._uniformizer_value(P) ** v
            return out

    def value_at_prime(self, P):
        """omega(varpi_P) if omega is unramified at P, else 0."""
        if self.conductor_exponent(P) > 0:
            return mpmath.mpc(0)
        e = self._exp_in_modulus(P)
        if e == 0:
            return self.ideal_value(P)
        return self._uniformizer_value(P)

    def restriction(self, l, x):
        """omega restricted to Q_l^x, at a rational integer x."""
        with mpmath.workdps(self.dps):
            out = mpmath.mpc(1)
            for P in primes_above(self.field, l):
                out *= self.local(P, x)
            return out

    def conductor_exponent(self, P):
        """Least a with omega_P trivial on 1 + P^a (on all local units when a = 0)."""
        key = P.key()
        if key in self._cond_cache:
            return self._cond_cache[key]
        F = self.field
        e = self._exp_in_modulus(P)
        l = factor(_prime_norm(P))[0][0]
        M = l**e
        tol = mpmath.mpf(10) ** (-(self.dps // 2))
        units = []
        for i in range(M):
            for j in range(M):
                z = F.from_coords(i, j)
                if not P.contains(z):
                    units.append(z)
        res = 0
        for a in range(e - 1, -1, -1):
            Pa = _power(P, a)
            if any(abs(self._unit_value(P, z) - 1) > tol for z in units if Pa.contains(z - F.elt(1))):
                res = a + 1
                break
        self._cond_cache[key] = res
        return res

    def gauss_sum(self, P):
        """Local Gauss sum sum_{u mod l^a} omega_P(u) e(u / l^a) at a split prime P (M_P = Q_l)."""
        a = self.conductor_exponent(P)
        if a == 0:
            return mpmath.mpc(1)
        l = factor(_prime_norm(P))[0][0]
        q = l**a
        with mpmath.workdps(self.dps):
            s = mpmath.mpc(0)
            for u in range(1, q):
                if u % l:
                    s += self.local(P, u) * mpmath.expjpi(2 * mpmath.mpf(u) / q)
            return s


def unitary_character(lam, phi, m, dps=DEFAULT_DPS):
    """omega = chi_m^- for chi_m = lambda * phi * |.|^m."""
    return UnitaryCharacter(chi_m(lam, phi, m), dps)


# ---------------------------------------------------------------- Satake data


def satake_complex(eig, l, dps=DEFAULT_DPS):
    """Exact Satake pair, embedded."""
    a, b = _satake_exact(eig, l)
    return to_complex(a, dps), to_complex(b, dps)


def satake_numeric(eig, l):
    """Satake pair as complex floats (order unspecified), for bulk Euler products."""
    k = eig.weight
    a = complex(to_complex(eig.a(l), 20)) / l ** ((k - 1) / 2)
    if eig.N0 % l == 0:
        return a, 0j
    psi = complex(to_complex(eig.psi(l), 20))
    r = np.sqrt(a * a - 4 * psi + 0j)
    return (a + r) / 2, (a - r) / 2


# ---------------------------------------------------------------- Euler modification factors


def _inv_factor(x, where):
    if abs(x) < mpmath.mpf(10) ** -25:
        raise DivisionByZero("vanishing Euler factor at %s" % (where,), prime=where)
    return 1 / x


def euler_E_half(chi_minus, satake, sets, field=None):
    """E(1/2): the product over primes above C_sp and over primes dividing d(M).

    ``chi_minus`` is a UnitaryCharacter (or None when all sets are empty);
    ``satake`` maps l to (alpha_l, beta_l).
    """
    F = field if field is not None else (chi_minus.field if chi_minus is not None else None)
    out = mpmath.mpc(1)
    if F is None:
        return out
    for l in sets.Csp:
        al, _ = satake(l)
        if abs(al) == 0:
            raise VanishingSplitCoefficient("alpha_%d = 0 at a split prime" % l, prime=l)
        for P in primes_above(F, l):
            x = 1 - chi_minus.value_at_prime(P) * al / mpmath.sqrt(l)
            out *= _inv_factor(x, l)
    for l in _primes(abs(F.d)):
        al, be = satake(l)
        P = primes_above(F, l)[0]
        chi = chi_minus.value_at_prime(P)
        for t in (al, be):
            x = 1 - chi * t / mpmath.sqrt(_prime_norm(P))
            out *= _inv_factor(x, l)
    return out


def euler_E_prime(chi_minus, satake, sets, m, c_psi=1, k=2, field=None):
    """E'(m), transcribed with the l | c(psi) versus l not dividing c(psi) split.

    The chosen prime lbar above l in C_sp is the one named pbar by
    ``primes_above``.
    """
    F = field if field is not None else (chi_minus.field if chi_minus is not None else None)
    num = mpmath.mpc(1)
    den = mpmath.mpc(1)
    for l in sets.Csp:
        al, _ = satake(l)
        if abs(al) == 0:
            raise VanishingSplitCoefficient("alpha_%d = 0 at a split prime" % l, prime=l)
        nu = sets.nu_of(l)
        o = val(c_psi, l) if c_psi % l == 0 else 0
        lbar, lp = primes_above(F, l)
        sl = mpmath.sqrt(l)
        if o > 0:
            num *= al ** (nu - o) / mpmath.mpf(l) ** ((nu - o) * (m + mpmath.mpf(k - 1) / 2))
        else:
            cb = chi_minus.value_at_prime(lbar)
            if abs(cb) == 0:
                raise DivisionByZero("chi^- vanishes at the chosen prime above %d" % l, prime=l)
            num *= al**nu * sl**nu * cb**nu * (1 - 1 / (al * sl * cb))
        cp = chi_minus.value_at_prime(lp)
        if abs(cp) == 0:
            raise DivisionByZero("chi^- vanishes at the prime above %d" % l, prime=l)
        dfac = al**nu * sl**nu * cp**nu * (1 - 1 / (al * sl * cp))
        if abs(dfac) < mpmath.mpf(10) ** -25:
            raise DivisionByZero("vanishing denominator factor at %d" % l, prime=l)
        den *= dfac
    return num / den


# ---------------------------------------------------------------- constants


def c2_table(d, nu2):
    """The four-case table for c_2."""
    if d % 2 != 0 or nu2 >= 2:
        return 1
    o = val(d, 2)
    if nu2 == 0 and o == 2:
        return 6
    if nu2 == 0 and o == 3:
        return 4
    if nu2 == 1:
        return 2
    raise ValueError("unreachable c_2 case")


@dataclass
class MainTheoremConstants:
    c1: object = None
    c2: object = None
    v: object = None
    G: object = None
    c: object = None
    E_tilde_p: object = None
    C_tilde: object = None
    E_half: object = None
    E_prime_m: object = None
    sets: object = None
    provenance: dict = field(default_factory=dict)

    def to_json(self):
        out = {}
        for name in ("c1", "c2", "v", "G", "c", "E_tilde_p", "C_tilde", "E_half", "E_prime_m"):
            out[name] = _jsonable(getattr(self, name))
        out["sets"] = self.sets.to_json() if self.sets is not None else None
        out["provenance"] = dict(sorted(self.provenance.items()))
        return out


def _jsonable(x, digits=20):
    if x is None:
        return None
    if isinstance(x, Fraction):
        return {"exact": str(x)}
    if isinstance(x, int):
        return {"exact": str(x)}
    if isinstance(x, (mpmath.mpc, complex)):
        x = mpmath.mpc(x)
        return {"re": mpmath.nstr(x.real, digits), "im": mpmath.nstr(x.imag, digits)}
    if isinstance(x, mpmath.mpf) or isinstance(x, float):
        return {"re": mpmath.nstr(mpmath.mpf(x), digits), "im": "0.0"}
    return {"value": str(x)}


def constants_c(sets, field, N, s, k, m, p_case=None, chi_minus=None, c_psi=1):
    """c1, c2, v and G; the bracketed p-factors are active only in the p-ramified case."""
    ram = sets.ramified_case if p_case is None else (p_case == "p-ramified")
    p = sets.p
    d = field.d
    w = k + 2 * m
    with mpmath.workdps(DEFAULT_DPS):
        c1 = mpmath.sqrt(mpmath.mpf(d)) * (2j) ** (-w) * mpmath.mpf(N) ** w
        c1 = mpmath.mpc(c1)
        if ram:
            c1 *= mpmath.expjpi(-2 * mpmath.mpf(1) / p**s)
    c2 = c2_table(d, sets.nu_of(2))
    num = Fraction(1)
    for l in sets.Csp:
        num *= l ** sets.nu_of(l)
    den = Fraction(c2)
    if ram:
        den *= p**s * (1 - Fraction(1, p)) ** 3
    for l in sets.Ci:
        nu = sets.nu_of(l)
        den *= Fraction(l) ** (2 * nu) * (1 + Fraction(1, l)) ** 2 * (1 - Fraction(1, l))
    for l in sets.Cr + sets.C1:
        if sets.nu_of(l) > 0:
            den *= 1 - Fraction(1, l)
    v = num / den
    G = None
    if chi_minus is not None:
        with mpmath.workdps(DEFAULT_DPS):
            G = mpmath.mpc(1)
            if ram:
                pbar = primes_above(field, p)[0]
                G *= chi_minus.gauss_sum(pbar) / chi_minus.restriction(p, p**s)
            for l in sets.C:
                nu = sets.nu_of(l)
                if nu:
                    G /= chi_minus.restriction(l, l**nu)
            for l in sets.Csp:
                if c_psi % l:
                    continue
                nu = sets.nu_of(l)
                o = val(c_psi, l)
                lbar = primes_above(field, l)[0]
                G *= mpmath.power(l, (mpmath.mpf(k) / 2 + m) * (nu - o))
                if nu > o:
                    G *= chi_minus.local(lbar, l ** (nu - o))
                elif nu < o:
                    G /= chi_minus.local(lbar, l ** (o - nu))
                G *= chi_minus.gauss_sum(lbar)
    c = None
    if G is not None:
        with mpmath.workdps(DEFAULT_DPS):
            c = c1 * G * mpmath.mpf(v.numerator) / v.denominator
    return {"c1": c1, "c2": c2, "v": v, "G": G, "c": c}


def E_tilde_p(a_p, psi_p, k, chi_m_at_pbar, p=None):
    """1 - a(p) chi + psi(p) p^(k-1) chi^2 with chi = chi_m(pbar); exact for exact inputs."""
    if p is None:
        raise ValueError("p is required")
    x = chi_m_at_pbar
    return 1 - a_p * x + psi_p * p ** (k - 1) * x * x


def E_tilde_p_factored(alpha, beta, k, chi_m_at_pbar, p):
    """(1 - alpha p^((k-1)/2) chi)(1 - beta p^((k-1)/2) chi), with alpha, beta Satake parameters."""
    from .cyclo import sqrt_int
    sc = sqrt_int(p) ** (k - 1)
    x = chi_m_at_pbar
    return (1 - alpha * sc * x) * (1 - beta * sc * x)


def g1_infinity(field):
    """(j(g_{1,inf}, i), |det g_1^(inf)|_A data) for z_1 = omega: j = Im(omega)^(-1/2)."""
    with mpmath.workdps(DEFAULT_DPS):
        y = mpmath.sqrt(abs(field.d)) / 2
        return y ** mpmath.mpf(-0.5)


def det_g1_finite(sets):
    """|det g_1^(inf)|_A = p^-s prod_{l in C_sp} l^-nu(l) (non-split choices taken unimodular)."""
    out = Fraction(1, sets.p**sets.s) if sets.ramified_case else Fraction(1)
    for l in sets.Csp:
        out /= l ** sets.nu_of(l)
    return out


def C_tilde(gauss, j_g1, det_g1, N_ns, p, s, k, m, field):
    """G(phi~_p) j^(k+2m) |det|^m (phi_Q(N_ns p^s) / (2 phi_M(N_ns p^s)))^-1."""
    n = N_ns * p**s
    ratio = Fraction(euler_phi(n), 2 * field.phi_M(n))
    with mpmath.workdps(DEFAULT_DPS):
        g = mpmath.mpc(1) if gauss is None else mpmath.mpc(to_complex(gauss, DEFAULT_DPS))
        det = mpmath.mpf(Fraction(det_g1).numerator) / Fraction(det_g1).denominator
        return g * mpmath.mpf(j_g1) ** (k + 2 * m) * det**m / (mpmath.mpf(ratio.numerator) / ratio.denominator)


def phi_tilde_gauss(phi, m, p):
    """Exact Gauss sum of phi~_p on (Z/p^s)^x; 1 when phi is unramified at p."""
    c = phi.conductor
    s = 0
    while c % p == 0:
        c //= p
        s += 1
    if s == 0:
        return 1
    av = PAdicAvatar(phi, m, p)
    q = p**s
    turns = {u: av.finite_turn(u) for u in range(q) if u % p}
    chi = DirichletCharacter(q, turns)
    return gauss_sum(chi)


# ---------------------------------------------------------------- central values


@dataclass
class CentralEstimate:
    value: object
    truncation: int
    last_term: object
    tail_estimate: object
    flag: str = NOT_RIGOROUS
    method: str = "truncation"
    extra: dict = field(default_factory=dict)

    def to_json(self):
        out = {"value": _jsonable(self.value), "truncation": self.truncation,
               "last_term": mpmath.nstr(self.last_term, 8), "tail_estimate": mpmath.nstr(self.tail_estimate, 8),
               "flag": self.flag, "method": self.method}
        for k, v in sorted(self.extra.items()):
            out[k] = v if isinstance(v, (int, str, bool, float)) or v is None else (
                _jsonable(v) if not isinstance(v, dict) else v)
        return out


def _coeff_array(series, D, dps=20):
    out = np.zeros(D + 1, dtype=complex)
    for n in range(1, D + 1):
        x = series[n]
        if x:
            out[n] = complex(to_complex(x, dps))
    return out


BLOCK = 4096


def block_sum(terms, threads=1):
    """Sum of a 1-d array over fixed blocks of BLOCK terms, combined left to right.

    The block structure does not depend on ``threads``, so the result is
    bit-identical for any thread count.
    """
    terms = np.asarray(terms)
    starts = list(range(0, len(terms), BLOCK))
    if threads > 1 and len(starts) > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(lambda a: terms[a:a + BLOCK].sum(), starts))
    else:
        parts = [terms[a:a + BLOCK].sum() for a in starts]
    total = terms.dtype.type(0)
    for x in parts:
        total = total + x
    return total


def rankin_selberg_central(f, theta, Nd, truncation=None, tol=None, omega=None, theta_weight=None, threads=1):
    """Truncated estimate of L^(Nd)(1/2) for f x theta in the unitary normalisation.

    The Dirichlet coefficients are c(n) = sum_{m^2 | n} omega(m) m^(kf+kt-2)
    a_f(n/m^2) a_theta(n/m^2) over n prime to Nd, evaluated at the centre
    s0 = (kf + kt - 1)/2, with omega the product of the nebentypus
    characters (trivial if unknown).  The partial sums do not converge
    absolutely at the centre; the result is a heuristic.
    """
    base = f.base if hasattr(f, "base") else f
    kf = base.weight
    kt = theta.weight if theta_weight is None else theta_weight
    D = min(base.truncation, theta.truncation) if truncation is None else int(truncation)
    af = _coeff_array(base, D)
    at = _coeff_array(theta, D)
    prod = af * at
    c = np.zeros(D + 1, dtype=complex)
    for mm in range(1, int(D**0.5) + 1):
        if gcd(mm, Nd) != 1:
            continue
        w = 1.0 if omega is None else complex(omega.value_complex(mm)) if gcd(mm, omega.modulus) == 1 else 0.0
        if w == 0:
            continue
        sq = mm * mm
        c[sq::sq] += w * mm ** (kf + kt - 2) * prod[1: D // sq + 1]
    for n in range(1, D + 1):
        if gcd(n, Nd) != 1:
            c[n] = 0
    s0 = (kf + kt - 1) / 2
    n = np.arange(D + 1, dtype=float)
    n[0] = 1
    terms = c / n**s0
    terms[0] = 0
    partial = np.cumsum(terms)
    value = block_sum(terms, threads)
    half = max(1, D // 2)
    tail = 2 * float(np.max(np.abs(partial[half:] - value))) if D > 1 else 0.0
    nz = np.nonzero(terms)[0]
    last = float(abs(terms[nz[-1]])) if len(nz) else 0.0
    if tol is not None and last > tol:
        raise SlowConvergence("last retained term %.3g exceeds tol %.3g at D = %d" % (last, tol, D),
                              D=D, last_term=last, tol=tol)
    return CentralEstimate(value=mpmath.mpc(value), truncation=D, last_term=mpmath.mpf(last),
                           tail_estimate=mpmath.mpf(tail), flag=NOT_RIGOROUS, method="truncation")


def _local_poly(alpha, beta, kind, u):
    """Local Euler polynomial in T = l^-s for one prime of M above l, times nothing else."""
    if kind == "inert":
        # Frobenius of degree 2: (1 - alpha^2 u T^2)(1 - beta^2 u T^2)
        return np.convolve([1, 0, -alpha * alpha * u], [1, 0, -beta * beta * u])
    return np.convolve([1, -alpha * u], [1, -beta * u])


def _inv_series(poly, n):
    out = np.zeros(n + 1, dtype=complex)
    out[0] = 1 / poly[0]
    for i in range(1, n + 1):
        acc = 0
        for j in range(1, min(i, len(poly) - 1) + 1):
            acc += poly[j] * out[i - j]
        out[i] = -acc / poly[0]
    return out


def base_change_coefficients(eig, omega, D, dps=20):
    """Dirichlet coefficients b(n), n <= D, of L(s, pi_f base-changed to M, twisted by omega).

    Unitary normalisation (centre s = 1/2). Local factors: for f unramified
    at l the Satake pair, for l exactly dividing N0 the pair (alpha_l, 0);
    a prime of M where omega is ramified contributes 1. Also returns the
    local polynomials at each prime l, for removing Euler factors.
    """
    F = omega.field
    N0 = eig.N0
    for l, e in factor(N0) if N0 > 1 else []:
        if e > 1:
            raise ConductorMismatch("base change factors need a squarefree level (l = %d)" % l, prime=l)
    polys = {}
    pp = {}
    for l in range(2, D + 1):
        if not isprime(l):
            continue
        a, b = satake_numeric(eig, l)
        kind = F.splitting(l)
        poly = np.array([1], dtype=complex)
        for P in primes_above(F, l):
            u = complex(omega.value_at_prime(P))
            poly = np.convolve(poly, _local_poly(a, b, kind, u))
        polys[l] = poly
        e = 1
        q = l
        while q * l <= D:
            q *= l
            e += 1
        pp[l] = _inv_series(poly, e)
    b = np.zeros(D + 1, dtype=complex)
    b[1] = 1
    for n in range(2, D + 1):
        v = 1
        for l, e in factor(n):
            v *= pp[l][e]
        b[n] = v
    return b, polys


def analytic_conductor(omega, N0):
    """Conductor of L(s, pi_f_M x omega) for squarefree N0: d^2 * norm of the conductor over M.

    Exponent at a prime P of M: 2a(omega_P) if f is unramified there, and
    1 (omega unramified) or 2a(omega_P) (omega ramified) if l exactly divides N0.
    """
    F = omega.field
    Q = F.d**2
    primes = set(_primes(N0)) | set(_primes(int(omega.modulus.covolume())))
    for l in sorted(primes):
        for P in primes_above(F, l):
            a = omega.conductor_exponent(P)
            NP = _prime_norm(P)
            if N0 % l == 0:
                e = 2 * a if a else 1
            else:
                e = 2 * a
            Q *= NP**e
    return Q


def smoothed_central_value(coeffs, Q, k=2, m=0, root_number=None, t_check=1.2, dps=20, threads=1):
    """Primitive central value L(1/2) from a smoothed sum, for gamma factor
    Gamma_C(s + (2m+1)/2) Gamma_C(s + (2k+2m-1)/2).

    With A = sqrt(Q)/(4 pi^2) and the kernel phi(x) = 2 x^((a+b)/2) K_(b-a)(2 sqrt x),
    Lambda(1/2) = (1 + eps) sum b(n) G(n/A), G(y) = int_1^oo phi(y t) t^(1/2) dt/t.
    The root number is read off the functional equation of the theta
    function at t_check when not supplied, and the residual is reported.
    """
    from scipy.special import kv
    from scipy.integrate import quad
    a = (2 * m + 1) / 2
    bb = (2 * k + 2 * m - 1) / 2
    nu = bb - a
    D = len(coeffs) - 1
    A = float(np.sqrt(Q) / (4 * np.pi**2))
    n = np.arange(1, D + 1, dtype=float)
    c = np.asarray(coeffs[1:], dtype=complex)

    def theta(t):
        x = n * t / A
        return np.sum(c * 2 * x ** ((a + bb) / 2) * kv(nu, 2 * np.sqrt(x)))

    th = theta(t_check)
    th_inv = theta(1 / t_check)
    ratio = th_inv / (t_check * th)
    eps = root_number if root_number is not None else (1 if ratio.real >= 0 else -1)
    fe_residual = float(abs(th_inv - eps * t_check * th) / max(abs(th_inv), 1e-300))
    y = n / A
    if m == 0:
        # int_X^oo v^k K_(k-1)(v) dv = X^k K_k(X)
        G = 2 ** (1 - a - bb) * (2 * np.sqrt(y)) ** k * kv(k, 2 * np.sqrt(y)) / np.sqrt(y)
    else:
        def integrand(vv):
            return vv ** (a + bb) * kv(nu, vv)

        G = np.array([2 ** (1 - a - bb) * quad(integrand, 2 * np.sqrt(yy), np.inf, limit=200)[0] / np.sqrt(yy)
                      for yy in y])
    lam = (1 + eps) * block_sum(c * G, threads)
    from scipy.special import gamma
    L = lam / (np.sqrt(A) * gamma(0.5 + a) * gamma(0.5 + bb))
    kmax = int(D)
    last = float(abs(c[-1] * G[-1]))
    return CentralEstimate(value=mpmath.mpc(complex(L)), truncation=kmax, last_term=mpmath.mpf(last),
                           tail_estimate=mpmath.mpf(last * 10), flag=NOT_RIGOROUS, method="smoothed",
                           extra={"conductor": int(Q), "root_number": int(eps),
                                  "fe_residual": float(fe_residual)})


def smoothed_terms_needed(Q, digits=15):
    """Terms after which the Bessel weights drop below 10^-digits."""
    A = np.sqrt(Q) / (4 * np.pi**2)
    x = (digits * np.log(10) / 2 + 3) ** 2
    return int(A * x) + 10


def remove_euler_factors(value, polys, primes, s=0.5):
    """Divide a primitive value by its local factors at the given primes."""
    out = complex(value)
    for l in primes:
        poly = polys.get(l)
        if poly is None:
            continue
        T = l ** (-s)
        out *= sum(complex(cf) * T**i for i, cf in enumerate(poly))
    return out


# ---------------------------------------------------------------- the interpolation report


def gamma_factor(k, m):
    """Gamma(k+m) Gamma(m+1) / (2 pi i)^(k+2m+1)."""
    with mpmath.workdps(DEFAULT_DPS):
        return mpmath.gamma(k + m) * mpmath.gamma(m + 1) / (2j * mpmath.pi) ** (k + 2 * m + 1)


@dataclass
class InterpolationReport:
    lhs: object
    rhs: object
    ratio: object
    period: object
    L_value: object
    constants: MainTheoremConstants
    config: dict
    flags: dict
    gauss_phase: object = None

    @property
    def abs_ratio(self):
        return None if self.ratio is None else abs(self.ratio)

    @property
    def gauss_normalized_ratio(self):
        """ratio * G(phi~_p)/|G(phi~_p)|: the ratio with the unit phase of the p-adic Gauss sum removed."""
        if self.ratio is None:
            return None
        return self.ratio * (1 if self.gauss_phase is None else self.gauss_phase)

    def to_json(self):
        return {"config": self.config, "lhs": _jsonable(self.lhs), "rhs": _jsonable(self.rhs),
                "lhs_squared": _jsonable(self.lhs**2 if self.lhs is not None else None),
                "ratio": _jsonable(self.ratio), "abs_ratio": _jsonable(self.abs_ratio),
                "gauss_normalized_ratio": _jsonable(self.gauss_normalized_ratio),
                "period_sum": _jsonable(self.period), "L_value": self.L_value.to_json(),
                "constants": self.constants.to_json(), "flags": dict(sorted(self.flags.items()))}


def main_interpolation_report(eig, lam, phi, m, p, method="smoothed", digits=30, truncation=None, tol=None,
                              threads=1):
    """Assemble both sides of the interpolation formula for one character phi.

    lhs = C~ E~(p) L_chi, where the toric period L_chi is recovered from the
    lattice period sum P through the (adelic-sum) normalisation, so that
    lhs = G(phi~_p) E~(p) P.  rhs = C~^2 E~(p)^2 c Gamma-factor E(1/2) E'(m)
    L^(Nd)(1/2). Periods Omega are omitted on both sides.
    """
    from .nearly_holo import PeriodCharacter, class_representatives, period_sum
    from .qexp import psi_at
    F = lam.field
    f = eig.base if hasattr(eig, "base") else eig
    k = f.weight
    N0 = eig.N0
    c = phi.conductor
    s = 0
    cc = c
    while cc % p == 0:
        cc //= p
        s += 1
    sets = partition_primes(F, N0, c, p, s)
    N = lcm(N0, p**s)
    omega = unitary_character(lam, phi, m)
    chi_star = omega.chi
    # period side
    order = phi.group.order
    reps = class_representatives(order)
    per = PeriodCharacter(lam, phi, m)
    P = period_sum(f, m, per, reps, level=f.level, digits=digits)
    # E~(p) with chi_m(pbar) = p^m / chi*(pbar)
    pbar = primes_above(F, p)[0]
    with mpmath.workdps(DEFAULT_DPS):
        if pbar + chi_star.modulus != F.maximal_order.lattice:
            chi_pbar = mpmath.mpc(0)
        else:
            chi_pbar = mpmath.mpf(p) ** m / chi_star.value_complex(pbar, DEFAULT_DPS)
        Et = E_tilde_p(to_complex(f[p], DEFAULT_DPS), to_complex(psi_at(f, p), DEFAULT_DPS), k, chi_pbar, p)
    gphi = phi_tilde_gauss(phi, m, p)
    j1 = g1_infinity(F)
    det1 = det_g1_finite(sets)
    Ns = nonsplit_part(F, N0)
    Ct = C_tilde(gphi, j1, det1, Ns, p, s, k, m, F)
    cons = constants_c(sets, F, N, s, k, m, chi_minus=omega, c_psi=lam.central_restriction.conductor()
                       if hasattr(lam, "central_restriction") else 1)

    def sat(l):
        return satake_complex(eig, l)

    c_psi = lam.central_restriction.conductor() if hasattr(lam, "central_restriction") else 1
    Eh = euler_E_half(omega, sat, sets, F)
    Ep = euler_E_prime(omega, sat, sets, m, c_psi, k, F)
    # L-value
    Nd = N * abs(F.d)
    if method == "smoothed":
        Q = analytic_conductor(omega, N0)
        D = truncation or smoothed_terms_needed(Q)
        if f.truncation < D:
            raise SlowConvergence("the form has %d coefficients; the smoothed sum needs %d" % (f.truncation, D),
                                  need=D, have=f.truncation)
        bcoef, polys = base_change_coefficients(eig, omega, D)
        est = smoothed_central_value(bcoef, Q, k, m, threads=threads)
        Limp = remove_euler_factors(est.value, polys, _primes(Nd))
        est.extra["primitive_value"] = _jsonable(est.value)
        est.value = mpmath.mpc(Limp)
    else:
        from .qexp import theta_series
        D = truncation or f.truncation
        theta = _unitary_theta(omega, D)
        est = rankin_selberg_central(f, theta, Nd, D, tol=tol, omega=_nebentypus_product(F, f), theta_weight=1,
                                     threads=threads)
    with mpmath.workdps(DEFAULT_DPS):
        gam = gamma_factor(k, m)
        lhs = mpmath.mpc(to_complex(gphi, DEFAULT_DPS)) * Et * P
        rhs = Ct**2 * Et**2 * cons["c"] * gam * Eh * Ep * est.value
        vanishes = abs(est.value) < VANISHING_TOL
        ratio = None if vanishes or abs(rhs) == 0 else lhs**2 / rhs
        gp = mpmath.mpc(to_complex(gphi, DEFAULT_DPS))
        gauss_phase = gp / abs(gp)
    consts = MainTheoremConstants(c1=cons["c1"], c2=cons["c2"], v=cons["v"], G=cons["G"], c=cons["c"],
                                  E_tilde_p=Et, C_tilde=Ct, E_half=Eh, E_prime_m=Ep, sets=sets,
                                  provenance={"c1": RIGOROUS, "c2": RIGOROUS, "v": RIGOROUS, "G": RIGOROUS,
                                              "E_tilde_p": RIGOROUS, "C_tilde": HEURISTIC, "E_half": RIGOROUS,
                                              "E_prime_m": RIGOROUS, "L_value": est.flag})
    config = {"field": F.d, "p": p, "s": s, "m": m, "k": k, "N0": N0, "conductor": c,
              "character_turns": [str(t) for t in phi.turns], "method": method}
    flags = {"L_value": est.flag, "period_sum": RIGOROUS, "central_value_vanishes": bool(vanishes)}
    return InterpolationReport(lhs=lhs, rhs=rhs, ratio=ratio, period=P, L_value=est, constants=consts,
                               config=config, flags=flags, gauss_phase=gauss_phase)


def ratio_spread(values):
    """max over pairs of |x_i / x_j - 1| (0 for fewer than two values)."""
    vals = [complex(v) for v in values]
    if len(vals) < 2:
        return 0.0
    return max(abs(a / b - 1) for a in vals for b in vals)


def ratio_summary(reports):
    """Spreads of the complex, absolute and Gauss-normalised ratios over (index, report) pairs."""
    live = [(i, r) for i, r in reports if r.ratio is not None]
    out = {"used": [i for i, _ in live], "excluded_vanishing": [i for i, r in reports if r.ratio is None]}
    if live:
        out["complex_ratio_spread"] = mpmath.nstr(ratio_spread([r.ratio for _, r in live]), 5)
        out["abs_ratio_spread"] = mpmath.nstr(ratio_spread([r.abs_ratio for _, r in live]), 5)
        out["gauss_normalized_spread"] = mpmath.nstr(ratio_spread([r.gauss_normalized_ratio for _, r in live]), 5)
    return out


def _nebentypus_product(F, f=None):
    """psi_f times the quadratic character of M (the central character of the theta side)."""
    from .qexp import _kronecker_character
    out = _kronecker_character(F.d)
    neb = getattr(f, "nebentypus", None)
    if isinstance(neb, DirichletCharacter):
        out = out * neb
    return out


def _unitary_theta(omega, D):
    """sum over ideals a of omega(a) q^(N a), up to q^D (complex coefficients, unitary)."""
    from .qexp import QExpansion
    F = omega.field
    vals = {}
    coeffs = [0] * (D + 1)
    coeffs[1] = 1
    # multiplicative: a(l^e) from the prime ideals above l
    for l in range(2, D + 1):
        if not isprime(l):
            continue
        kind = F.splitting(l)
        us = [complex(omega.value_at_prime(P)) for P in primes_above(F, l)]
        e_max = 0
        q = 1
        while q * l <= D:
            q *= l
            e_max += 1
        seq = [1] + [0] * e_max
        if kind == "split":
            for e in range(1, e_max + 1):
                seq[e] = sum(us[0] ** i * us[1] ** (e - i) for i in range(e + 1))
        elif kind == "inert":
            for e in range(1, e_max + 1):
                seq[e] = us[0] ** (e // 2) if e % 2 == 0 else 0
        else:
            for e in range(1, e_max + 1):
                seq[e] = us[0] ** e
        vals[l] = seq
    for n in range(2, D + 1):
        v = 1
        for l, e in factor(n):
            v *= vals[l][e]
        coeffs[n] = v
    return QExpansion(coeffs, weight=1, level=abs(F.d) * int(omega.modulus.covolume()), truncation=D)
