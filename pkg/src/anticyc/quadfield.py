"""Imaginary quadratic fields, orders, proper ideals and ring class groups.

Field elements are exact: x + y*sqrt(r) with rational x, y, where r is the
squarefree integer with M = Q(sqrt(r)). The maximal order is Z[omega] with
omega = (d + sqrt(d))/2 for the fundamental discriminant d, and the order of
conductor c is R_c = Z + c*omega*Z.

Lattices are stored in Hermite normal form with respect to (1, omega), which
makes equality, containment and products exact. Classes of proper ideals are
carried by reduced primitive binary quadratic forms; the lattice of the form
(a, b, c) is [a, (-b + sqrt(D))/2] with basis ordered so that
tau = (-b + sqrt(D)) / (2a) lies in the upper half plane.
"""

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd, isqrt

import mpmath
import numpy as np

from .arith import euler_phi, factor, isprime, kronecker, lcm, sqrt_mod_prime
from .errors import BoundExceeded, ConductorMismatch, NonIntegralResult, NonSplitPrime
from .groups import FiniteAbelianGroup, smith_normal_form

DEFAULT_ENUM_BOUND = 10**7


def is_fundamental(d):
    if d >= 0:
        return False
    if d % 4 == 1:
        return all(e == 1 for _, e in factor(d))
    if d % 4 == 0:
        m = d // 4
        if m % 4 not in (2, 3):
            return False
        return all(e == 1 for _, e in factor(m))
    return False


# ---------------------------------------------------------------- fields


class ImagQuadField:
    """The imaginary quadratic field of fundamental discriminant ``d``."""

    def __init__(self, d):
        d = int(d)
        if not is_fundamental(d):
            raise ValueError("%d is not a negative fundamental discriminant" % d)
        self.d = d
        self.rad = d if d % 4 == 1 else d // 4
        self.d0 = abs(d) // 4 if d % 4 == 0 else abs(d)
        self.w = 6 if d == -3 else (4 if d == -4 else 2)

    def __repr__(self):
        return "ImagQuadField(%d)" % self.d

    def __eq__(self, other):
        return isinstance(other, ImagQuadField) and other.d == self.d

    def __hash__(self):
        return hash(("field", self.d))

    @cached_property
    def h(self):
        return len(reduced_forms(self.d))

    def elt(self, x, y=0):
        return QElt(self, Fraction(x), Fraction(y))

    @cached_property
    def sqrt_rad(self):
        return self.elt(0, 1)

    @cached_property
    def sqrt_d(self):
        return self.elt(0, 1 if self.d % 4 == 1 else 2)

    @cached_property
    def omega(self):
        return (self.elt(self.d) + self.sqrt_d) * Fraction(1, 2)

    def from_coords(self, u, v):
        """u + v*omega."""
        return self.elt(u) + self.omega * v

    def order(self, c=1):
        return QuadOrder(self, c)

    @cached_property
    def maximal_order(self):
        return QuadOrder(self, 1)

    def splitting(self, ell):
        """'split', 'inert' or 'ramified' for a rational prime."""
        k = kronecker(self.d, ell)
        return {1: "split", -1: "inert", 0: "ramified"}[k]

    def phi_M(self, m):
        """Euler function of the ideal mR for a positive integer m."""
        r = 1
        for ell, e in factor(m):
            kind = self.splitting(ell)
            if kind == "split":
                r *= (ell ** (e - 1) * (ell - 1)) ** 2
            elif kind == "inert":
                r *= ell ** (2 * (e - 1)) * (ell * ell - 1)
            else:
                r *= ell ** (2 * e - 1) * (ell - 1)
        return r

    def units(self):
        """The roots of unity of the maximal order."""
        if self.d == -4:
            i = self.sqrt_rad
            return [self.elt(1), i, self.elt(-1), -i]
        if self.d == -3:
            z = self.omega  # (-3 + sqrt(-3))/2 = zeta_3 - 1; use (1+sqrt(-3))/2
            z6 = (self.elt(1) + self.sqrt_rad) * Fraction(1, 2)
            out, x = [], self.elt(1)
            for _ in range(6):
                out.append(x)
                x = x * z6
            del z
            return out
        return [self.elt(1), self.elt(-1)]


@dataclass(frozen=True)
class QElt:
    """Exact element x + y*sqrt(rad) of an imaginary quadratic field."""

    F: ImagQuadField = dc_field(compare=False, hash=False, repr=False)
    x: Fraction = Fraction(0)
    y: Fraction = Fraction(0)

    def _c(self, o):
        if isinstance(o, QElt):
            return o
        return QElt(self.F, Fraction(o), Fraction(0))

    def __add__(self, o):
        o = self._c(o)
        return QElt(self.F, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return QElt(self.F, -self.x, -self.y)

    def __sub__(self, o):
        return self + (-self._c(o))

    def __rsub__(self, o):
        return self._c(o) - self

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)):
            return QElt(self.F, self.x * o, self.y * o)
        o = self._c(o)
        r = self.F.rad
        return QElt(self.F, self.x * o.x + r * self.y * o.y, self.x * o.y + self.y * o.x)

    __rmul__ = __mul__

    def conj(self):
        return QElt(self.F, self.x, -self.y)

    def norm(self):
        return self.x * self.x - self.F.rad * self.y * self.y

    def trace(self):
        return 2 * self.x

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError
        return self.conj() * (1 / n)

    def __truediv__(self, o):
        if isinstance(o, (int, Fraction)):
            return self * (1 / Fraction(o))
        return self * self._c(o).inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        r = QElt(self.F, Fraction(1), Fraction(0))
        b = self
        while e:
            if e & 1:
                r = r * b
            b = b * b
            e >>= 1
        return r

    def is_zero(self):
        return self.x == 0 and self.y == 0

    def coords(self):
        """(u, v) with self = u + v*omega."""
        F = self.F
        if F.d % 4 == 1:
            return (self.x - self.y * F.rad, 2 * self.y)
        return (self.x - 2 * F.rad * self.y, self.y)

    def is_integral(self):
        u, v = self.coords()
        return u.denominator == 1 and v.denominator == 1

    def to_complex(self, dps=40):
        with mpmath.workdps(dps):
            return mpmath.mpc(mpmath.mpf(self.x.numerator) / self.x.denominator,
                              mpmath.mpf(self.y.numerator) / self.y.denominator
                              * mpmath.sqrt(-self.F.rad))

    def __complex__(self):
        return complex(self.to_complex(20))

    def __repr__(self):
        return "(%s + %s*sqrt(%d))" % (self.x, self.y, self.F.rad)


# ---------------------------------------------------------------- lattices


def _xgcd(a, b):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


class Lattice:
    """A full-rank Z-lattice in M, in Hermite normal form.

    The basis is b1 = (t + g2*omega)/den, b2 = g1/den with g1, g2 > 0 and
    0 <= t < g1, made canonical by dividing out common factors with den.
    """

    __slots__ = ("F", "den", "g1", "g2", "t")

    def __init__(self, F, den, g1, g2, t):
        self.F, self.den, self.g1, self.g2, self.t = F, den, g1, g2, t

    @classmethod
    def from_gens(cls, F, gens):
        coords = [g.coords() for g in gens]
        den = 1
        for u, v in coords:
            den = lcm(den, u.denominator, v.denominator)
        rows = [(int(u * den), int(v * den)) for u, v in coords]
        # combine rows to reach gcd of the omega-coordinates
        piv = None
        rest = []
        for U, V in rows:
            if piv is None:
                if V:
                    piv = (U, V)
                else:
                    rest.append(U)
                continue
            if V == 0:
                rest.append(U)
                continue
            g, a, b = _xgcd(piv[1], V)
            newp = (a * piv[0] + b * U, g)
            # the complementary combination has zero omega-coordinate
            other = (V // g) * piv[0] - (piv[1] // g) * U
            rest.append(other)
            piv = newp
        if piv is None:
            raise ValueError("generators do not span a full-rank lattice")
        if piv[1] < 0:
            piv = (-piv[0], -piv[1])
        g1 = 0
        for U in rest:
            g1 = gcd(g1, U)
        if g1 == 0:
            raise ValueError("generators do not span a full-rank lattice")
        t = piv[0] % g1
        g2 = piv[1]
        c = gcd(gcd(den, g1), gcd(g2, t))
        return cls(F, den // c, g1 // c, g2 // c, t // c)

    def basis(self):
        F = self.F
        b1 = F.from_coords(Fraction(self.t, self.den), Fraction(self.g2, self.den))
        b2 = F.elt(Fraction(self.g1, self.den))
        return b1, b2

    def key(self):
        return (self.den, self.g1, self.g2, self.t)

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.F == other.F and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "Lattice(%r)" % (self.basis(),)

    def __mul__(self, other):
        if isinstance(other, Lattice):
            a1, a2 = self.basis()
            b1, b2 = other.basis()
            return Lattice.from_gens(self.F, [a1 * b1, a1 * b2, a2 * b1, a2 * b2])
        if isinstance(other, (QElt, int, Fraction)):
            a1, a2 = self.basis()
            return Lattice.from_gens(self.F, [a1 * other, a2 * other])
        return NotImplemented

    __rmul__ = __mul__

    def __add__(self, other):
        return Lattice.from_gens(self.F, list(self.basis()) + list(other.basis()))

    def conj(self):
        return Lattice.from_gens(self.F, [b.conj() for b in self.basis()])

    def covolume(self):
        """Index relative to the maximal order: [R : L] as a rational number."""
        return Fraction(self.g1 * self.g2, self.den * self.den)

    def contains(self, x):
        u, v = x.coords()
        U, V = u * self.den, v * self.den
        if U.denominator != 1 or V.denominator != 1:
            return False
        U, V = int(U), int(V)
        if V % self.g2:
            return False
        k = V // self.g2
        return (U - k * self.t) % self.g1 == 0

    def intersect(self, other):
        """The intersection of two lattices."""
        b1, b2 = self.basis()
        v = [other.coords_rational(b) for b in (b1, b2)]
        den = lcm(*[x.denominator for pair in v for x in pair])
        # column j holds the other-coordinates of b_j, scaled to integers
        A = [[int(v[0][0] * den), int(v[1][0] * den)], [int(v[0][1] * den), int(v[1][1] * den)]]
        D, U, V = smith_normal_form(A)
        steps = []
        for i in range(2):
            d = D[i][i]
            steps.append(den // gcd(d, den) if d else 1)
        gens = []
        for i in range(2):
            # x = V e_i * steps[i]
            x0, x1 = V[0][i] * steps[i], V[1][i] * steps[i]
            gens.append(b1 * x0 + b2 * x1)
        return Lattice.from_gens(self.F, gens)

    def coords_rational(self, x):
        """Rational coordinates of x in the HNF basis."""
        u, v = x.coords()
        U, V = u * self.den, v * self.den
        k = V / self.g2
        j = (U - k * self.t) / self.g1
        return k, j

    def contains_lattice(self, other):
        return all(self.contains(b) for b in other.basis())

    def coords_in(self, x):
        """Integer coordinates of x in this lattice's HNF basis."""
        u, v = x.coords()
        U, V = u * self.den, v * self.den
        k = V / self.g2
        j = (U - k * self.t) / self.g1
        if k.denominator != 1 or j.denominator != 1:
            raise ValueError("element not in lattice")
        return int(k), int(j)

    def multiplier_conductor(self):
        """Conductor f of the multiplier ring {x : xL in L} = R_f."""
        return form_of_basis(*self.basis())[1]

    def form(self):
        return form_of_basis(*self.basis())[0]


def form_of_basis(w1, w2):
    """Primitive form (A, B, C), A > 0, with A tau^2 + B tau + C = 0, tau = w1/w2.

    Also returns the conductor of the order of discriminant B^2 - 4AC.
    """
    tau = w1 / w2
    F = tau.F
    u, v = tau.x, tau.y
    # x^2 - 2u x + (u^2 - v^2 rad)
    b = -2 * u
    c = u * u - v * v * F.rad
    den = lcm(b.denominator, c.denominator)
    A, B, C = den, int(b * den), int(c * den)
    g = gcd(gcd(A, B), C)
    A, B, C = A // g, B // g, C // g
    D = B * B - 4 * A * C
    f2 = Fraction(D, F.d)
    f = isqrt(int(f2))
    if f2.denominator != 1 or f * f != f2:
        raise ArithmeticError("discriminant is not c^2 d")
    return (A, B, C), f


# ---------------------------------------------------------------- forms


def reduce_form(form):
    """Reduce a positive definite primitive form (a, b, c) and return it."""
    a, b, c = form
    while True:
        if a > c or (a == c and b < 0):
            a, b, c = c, -b, a
            continue
        if b > a or b <= -a:
            # translate b into (-a, a]
            k = (a - b) // (2 * a)
            c = a * k * k + b * k + c
            b = b + 2 * a * k
            continue
        if a == c and b < 0:
            b = -b
            continue
        return (a, b, c)


def _reduce_with_matrix(form):
    """Reduce and return (reduced_form, gamma) with form∘gamma = reduced (gamma in SL2(Z))."""
    a, b, c = form
    g = [[1, 0], [0, 1]]
    while True:
        if a > c or (a == c and b < 0):
            a, b, c = c, -b, a
            g = [[g[0][1], -g[0][0]], [g[1][1], -g[1][0]]]
            continue
        if b > a or b <= -a:
            k = (a - b) // (2 * a)
            c = a * k * k + b * k + c
            b = b + 2 * a * k
            g = [[g[0][0], g[0][0] * k + g[0][1]], [g[1][0], g[1][0] * k + g[1][1]]]
            continue
        return (a, b, c), g


def compose_forms(f1, f2):
    """Gauss composition of primitive forms of equal discriminant (reduced result)."""
    a1, b1, c1 = f1
    a2, b2, c2 = f2
    if a1 > a2:
        a1, b1, c1, a2, b2, c2 = a2, b2, c2, a1, b1, c1
    s = (b1 + b2) // 2
    n = b2 - s
    if a2 % a1 == 0:
        y1, d = 0, a1
    else:
        d, u, v = _xgcd(a2, a1)
        y1 = u
    if s % d == 0:
        y2, x2, d1 = -1, 0, d
    else:
        d1, x2, y2 = _xgcd(s, d)
        y2 = -y2
    v1 = a1 // d1
    v2 = a2 // d1
    r = (y1 * y2 * n - x2 * c2) % v1
    b3 = b2 + 2 * v2 * r
    a3 = v1 * v2
    c3 = (c2 * d1 + r * (b2 + v2 * r)) // v1
    return reduce_form((a3, b3, c3))


def inverse_form(f):
    return reduce_form((f[0], -f[1], f[2]))


def identity_form(D):
    b = D % 2
    return (1, b, (b * b - D) // 4)


@lru_cache(maxsize=256)
def reduced_forms(D, bound=DEFAULT_ENUM_BOUND):
    """All reduced primitive positive definite forms of discriminant D < 0, sorted."""
    if D >= 0 or D % 4 not in (0, 1):
        raise ValueError("bad discriminant %d" % D)
    if abs(D) > bound:
        raise BoundExceeded("discriminant %d exceeds enumeration bound %d" % (D, bound), D=D, bound=bound)
    out = []
    amax = isqrt(abs(D) // 3)
    for a in range(1, amax + 1):
        b = np.arange(-a + 1, a + 1, dtype=np.int64)
        b = b[(b - D) % 2 == 0]
        num = b * b - D
        ok = num % (4 * a) == 0
        b, num = b[ok], num[ok]
        c = num // (4 * a)
        ok = c >= a
        b, c = b[ok], c[ok]
        ok = ~((c == a) & (b < 0))
        b, c = b[ok], c[ok]
        g = np.gcd(np.gcd(a, b), c)
        ok = g == 1
        for bb, cc in zip(b[ok].tolist(), c[ok].tolist()):
            out.append((a, bb, cc))
    return tuple(sorted(out))


def count_reduced_forms(D, bound=DEFAULT_ENUM_BOUND):
    return len(reduced_forms(D, bound))


# ---------------------------------------------------------------- orders and ideals


class QuadOrder:
    """The order R_c = Z + c*R of conductor c."""

    def __init__(self, field, c=1):
        if c < 1:
            raise ValueError("conductor must be positive")
        self.field = field
        self.conductor = int(c)
        self.discriminant = self.conductor ** 2 * field.d

    def __repr__(self):
        return "QuadOrder(d=%d, c=%d)" % (self.field.d, self.conductor)

    def __eq__(self, other):
        return isinstance(other, QuadOrder) and other.field == self.field and other.conductor == self.conductor

    def __hash__(self):
        return hash(("order", self.field.d, self.conductor))

    @cached_property
    def lattice(self):
        F = self.field
        return Lattice.from_gens(F, [F.elt(1), F.omega * self.conductor])

    @cached_property
    def sqrt_disc(self):
        return self.field.sqrt_d * self.conductor

    def ideal_from_form(self, form):
        a, b, c = form
        if b * b - 4 * a * c != self.discriminant:
            raise ValueError("form discriminant does not match the order")
        F = self.field
        w1 = (F.elt(-b) + self.sqrt_disc) * Fraction(1, 2)
        return ProperIdeal(self, w1, F.elt(a))

    def unit_ideal(self):
        return self.ideal_from_form(identity_form(self.discriminant))

    def unit_index(self):
        """[R^x : R_c^x]."""
        return 1 if self.conductor == 1 else self.field.w // 2

    def norm_of(self, lattice):
        """[R_c : L] for a lattice (may be fractional)."""
        return lattice.covolume() / self.lattice.covolume()


class ProperIdeal:
    """A proper ideal (lattice) of an order, with an oriented basis.

    ``normalized_form`` is the reduced form of its class.
    """

    def __init__(self, order, w1, w2, check=True):
        tau = w1 / w2
        if tau.y <= 0:
            w1 = -w1
        self.order = order
        self.w1, self.w2 = w1, w2
        self.lattice = Lattice.from_gens(order.field, [w1, w2])
        form, f = form_of_basis(w1, w2)
        if check and f != order.conductor:
            raise ConductorMismatch("lattice is proper for conductor %d, not %d" % (f, order.conductor))
        self.form = form
        self.normalized_form = reduce_form(form)

    @classmethod
    def from_lattice(cls, order, lat):
        b1, b2 = lat.basis()
        return cls(order, b1, b2)

    @property
    def basis(self):
        return (self.w1, self.w2)

    @property
    def tau(self):
        return self.w1 / self.w2

    def norm(self):
        return self.order.norm_of(self.lattice)

    def scale(self, beta):
        return ProperIdeal(self.order, self.w1 * beta, self.w2 * beta)

    def conj(self):
        return ProperIdeal.from_lattice(self.order, self.lattice.conj())

    def __mul__(self, other):
        if other.order != self.order:
            raise ConductorMismatch("ideals of different orders")
        return ProperIdeal.from_lattice(self.order, self.lattice * other.lattice)

    def same_lattice(self, other):
        return self.lattice == other.lattice

    def __repr__(self):
        return "ProperIdeal(c=%d, form=%s)" % (self.order.conductor, self.normalized_form)

    def multiplier_conductor(self):
        return self.lattice.multiplier_conductor()


# ---------------------------------------------------------------- class groups


class RingClassGroup:
    """Cl(R_c): reduced forms with the composition law and Smith structure."""

    def __init__(self, order, bound=DEFAULT_ENUM_BOUND):
        self.order = order
        self.representatives = list(reduced_forms(order.discriminant, bound))
        self.size = len(self.representatives)
        self.identity = identity_form(order.discriminant)

    def mul(self, f, g):
        return compose_forms(f, g)

    def inverse(self, f):
        return inverse_form(f)

    @cached_property
    def _structure(self):
        return FiniteAbelianGroup(self.representatives, compose_forms, self.identity)

    @property
    def generators(self):
        return list(self._structure.generators)

    @property
    def generator_orders(self):
        return list(self._structure.generator_orders)

    def dlog(self, form):
        return self._structure.dlog(reduce_form(form))

    def class_of(self, ideal):
        return ideal.normalized_form

    def ideal(self, form):
        return self.order.ideal_from_form(form)

    def character_turns(self):
        return self._structure.character_turns()

    def evaluate_turn(self, turns, form):
        return self._structure.evaluate_turn(turns, reduce_form(form))


def enumerate_class_group(order, bound=DEFAULT_ENUM_BOUND):
    return RingClassGroup(order, bound)


def class_number_formula(field, c, p, n):
    """|Cl(R_{c p^n})| = 2 h phi_M(c p^n) / (w phi_Q(c p^n)).

    The displayed formula assumes c p^n > 1 (so that the unit index is w/2);
    for the trivial conductor the count is h itself.
    """
    if not isprime(p) or field.splitting(p) != "split":
        raise NonSplitPrime("%d does not split in Q(sqrt(%d))" % (p, field.d), p=p, d=field.d)
    if gcd(c, p) != 1:
        raise ValueError("c must be prime to p")
    m = c * p**n
    if m == 1:
        return field.h
    num = 2 * field.h * field.phi_M(m)
    den = field.w * euler_phi(m)
    if num % den:
        raise NonIntegralResult("class number formula gave %d/%d" % (num, den))
    return num // den


def split_prime(field, p):
    """The primes (pbar, p) above a split odd prime p.

    The name p is given to (p, sqrt(r) - s) where s is the smallest
    nonnegative square root of r = squarefree part of d modulo p.
    """
    if p == 2 or not isprime(p):
        raise NonSplitPrime("%d is not an odd prime" % p, p=p)
    if field.splitting(p) != "split":
        raise NonSplitPrime("%d does not split in Q(sqrt(%d))" % (p, field.d), p=p, d=field.d)
    s = sqrt_mod_prime(field.rad, p)[0]
    R = field.maximal_order
    gen = field.sqrt_rad - s
    lat_p = Lattice.from_gens(field, [field.elt(p), field.omega * p, gen, gen * field.omega])
    frak_p = ProperIdeal.from_lattice(R, lat_p)
    frak_pbar = ProperIdeal.from_lattice(R, lat_p.conj())
    return frak_pbar, frak_p


def project_class(ideal, target_order):
    """Class of ideal * R_{c'} in Cl(R_{c'}) for c' dividing the conductor."""
    c = ideal.order.conductor
    c2 = target_order.conductor
    if target_order.field != ideal.order.field or c % c2:
        raise ConductorMismatch("cannot project conductor %d to %d" % (c, c2))
    lat = ideal.lattice * target_order.lattice
    return ProperIdeal.from_lattice(target_order, lat)


def _equivalent_form_with_first(form, avoid, search=60):
    """An SL2(Z)-equivalent form whose first coefficient is prime to ``avoid``."""
    a, b, c = form
    best = None
    for s in range(0, search):
        for x in range(-s, s + 1):
            for y in (s - abs(x), -(s - abs(x))) if s - abs(x) else (0,):
                if gcd(x, y) != 1:
                    continue
                val = a * x * x + b * x * y + c * y * y
                if gcd(val, avoid) == 1 and (best is None or val < best[0]):
                    best = (val, x, y)
        if best is not None:
            break
    if best is None:
        raise ArithmeticError("no representation prime to %d found" % avoid)
    _, x, y = best
    g, u, v = _xgcd(x, y)  # u x + v y = 1
    # gamma = [[x, -v], [y, u]] has det 1
    s, t = -v, u
    A = a * x * x + b * x * y + c * y * y
    B = 2 * a * x * s + b * (x * t + y * s) + 2 * c * y * t
    C = a * s * s + b * s * t + c * t * t
    # shift B into (-A, A] without changing A
    k = (A - B) // (2 * A)
    C = A * k * k + B * k + C
    B = B + 2 * A * k
    return (A, B, C)


def coset_representatives(c, p, field):
    """Representatives of Cl(R_c) whose norms are prime to p*c."""
    if gcd(c, p) != 1:
        raise ValueError("c must be prime to p")
    split_prime(field, p)
    order = field.order(c)
    out = []
    for form in reduced_forms(order.discriminant):
        f2 = _equivalent_form_with_first(form, p * c)
        out.append(order.ideal_from_form(f2))
    return out


# ---------------------------------------------------------------- CM points


@dataclass
class CMPoint:
    tau: object
    omega2: object
    word: list
    matrix: tuple
    tau_exact: QElt
    omega2_exact: QElt


def cm_point(ideal, dps=40):
    """Reduce tau = w1/w2 into the standard fundamental domain.

    The domain is |Re tau| <= 1/2, |tau| >= 1, with Re tau > -1/2 and
    Re tau >= 0 on the unit arc. The reduction acts on the basis (w1, w2) by
    SL2(Z), so the lattice is unchanged; the word records the steps ('T^k'
    translations and 'S').
    """
    w1, w2 = ideal.w1, ideal.w2
    word = []
    M = [[1, 0], [0, 1]]  # (w1', w2')^T = M (w1, w2)^T
    for _ in range(10000):
        tau = w1 / w2
        # translate real part into (-1/2, 1/2]
        k = (Fraction(1, 2) - tau.x).__floor__()
        if k:
            w1 = w1 + w2 * k
            M = [[M[0][0] + k * M[1][0], M[0][1] + k * M[1][1]], M[1]]
            word.append("T^%d" % k)
            tau = w1 / w2
        if tau.norm() < 1:
            # S: tau -> -1/tau, basis (w1, w2) -> (-w2, w1)
            w1, w2 = -w2, w1
            M = [[-M[1][0], -M[1][1]], [M[0][0], M[0][1]]]
            word.append("S")
            continue
        break
    # on the unit arc keep the point with nonnegative real part
    tau = w1 / w2
    if tau.norm() == 1 and tau.x < 0:
        w1, w2 = -w2, w1
        M = [[-M[1][0], -M[1][1]], [M[0][0], M[0][1]]]
        word.append("S")
        tau = w1 / w2
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    assert det == 1
    return CMPoint(tau=tau.to_complex(dps), omega2=w2.to_complex(dps), word=word,
                   matrix=((M[0][0], M[0][1]), (M[1][0], M[1][1])),
                   tau_exact=tau, omega2_exact=w2)


# ---------------------------------------------------------------- level structures


@lru_cache(maxsize=None)
def heegner_ideal(order, ell, nu):
    """The R_c-ideal n with n R = l^nu, where l is the prime named by split_prime.

    For ramified ell (nu = 1 only) it is the unique prime above ell.
    Returned as a pair of lattices (n, conj(n)).
    """
    F = order.field
    kind = F.splitting(ell)
    if order.conductor % ell == 0:
        raise ConductorMismatch("Heegner ideal needs ell prime to the conductor")
    if kind == "inert" or (kind == "ramified" and nu > 1):
        raise ConductorMismatch("no cyclic ideal of norm %d^%d in this order" % (ell, nu))
    D = order.discriminant
    q = ell**nu
    if kind == "split" and ell != 2:
        target = split_prime(F, ell)[1].lattice
        tl = target
        for _ in range(nu - 1):
            tl = tl * target
    else:
        tl = None
    for beta in range(2 * q):
        if (beta * beta - D) % (4 * q):
            continue
        gen = (F.elt(-beta) + order.sqrt_disc) * Fraction(1, 2)
        n = Lattice.from_gens(F, [F.elt(q), gen])
        nR = n * F.maximal_order.lattice
        if tl is not None and nR != tl:
            continue
        if tl is None and kind == "split":
            # ell = 2 split: name the prime by the smallest beta
            pass
        if n.multiplier_conductor() != order.conductor:
            continue
        return n, n.conj()
    raise ConductorMismatch("no Heegner ideal of norm %d found" % q)


def level_overlattice(ideal, N):
    """Canonical overlattice L' with L'/a cyclic of order N.

    At l | N with l^nu dividing the order's conductor, the l-part is
    a * R_{c / l^nu}; at l prime to the conductor it is a * n_l^{-1} for
    the Heegner ideal n_l.
    """
    order = ideal.order
    c = order.conductor
    F = order.field
    a = ideal.lattice
    parts = []
    for ell, nu in factor(N):
        q = ell**nu
        if c % q == 0:
            parts.append(a * F.order(c // q).lattice)
        elif c % ell == 0:
            raise ConductorMismatch("conductor exponent at %d is below the level exponent" % ell)
        else:
            _, nbar = heegner_ideal(order, ell, nu)
            parts.append((a * nbar) * Fraction(1, q))
    if not parts:
        return a
    L = parts[0]
    for P in parts[1:]:
        L = L + P
    return L


def adapted_basis(ideal, N):
    """Basis (w1, w2) of the ideal with [w1, w2/N] equal to the level overlattice.

    tau = w1/w2 lies in the upper half plane; the pair is determined up to
    Gamma_0(N).
    """
    if N == 1:
        return ideal.w1, ideal.w2
    Lp = level_overlattice(ideal, N)
    f1, f2 = Lp.basis()
    rows = [Lp.coords_in(b) for b in ideal.lattice.basis()]
    # coords_in returns (k, j) for k*f1 + j*f2
    Mx = [[rows[0][0], rows[0][1]], [rows[1][0], rows[1][1]]]
    D, U, V = smith_normal_form(Mx)
    if sorted([abs(D[0][0]), abs(D[1][1])]) != [1, N]:
        raise ConductorMismatch("level structure is not cyclic of order %d" % N)
    # U Mx V = D; the lattice a is spanned by rows of D V^{-1} in the f-basis
    det = V[0][0] * V[1][1] - V[0][1] * V[1][0]
    Vinv = [[V[1][1] * det, -V[0][1] * det], [-V[1][0] * det, V[0][0] * det]]
    e = [f1 * Vinv[i][0] + f2 * Vinv[i][1] for i in range(2)]
    if abs(D[0][0]) == 1:
        w1, w2 = e[0], e[1] * N
    else:
        w1, w2 = e[1], e[0] * N
    if (w1 / w2).y < 0:
        w1 = -w1
    return w1, w2


def improve_gamma0(w1, w2, N, search=40):
    """Move (w1, w2) by Gamma_0(N) to increase Im(w1/w2); the level structure is kept."""
    tau = complex(w1 / w2)
    for _ in range(50):
        y = tau.imag
        best = None
        for c1 in range(1, search + 1):
            c = N * c1
            if c * c * y * y >= 1:
                # |c tau + d| >= c Im tau >= 1 gives no gain
                break
            x = tau.real
            d0 = -c * x
            for d in range(int(np.floor(d0)) - 1, int(np.ceil(d0)) + 2):
                if gcd(c, d) != 1:
                    continue
                m2 = abs(c * tau + d) ** 2
                if m2 < 1 - 1e-12 and (best is None or m2 < best[0]):
                    best = (m2, c, d)
        if best is None:
            break
        _, c, d = best
        g, a0, b0 = _xgcd(d, c)  # a0 d + b0 c = 1 -> matrix [[a0, -b0], [c, d]]
        a, b = a0, -b0
        w1, w2 = w1 * a + w2 * b, w1 * c + w2 * d
        tau = complex(w1 / w2)
    # translate
    k = -int(np.floor(tau.real + 0.5))
    w1 = w1 + w2 * k
    return w1, w2
