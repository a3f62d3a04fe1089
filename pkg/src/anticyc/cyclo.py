"""Exact arithmetic in cyclotomic fields.

An element of Q(zeta_L) is stored as an integer vector of length L, read as a
polynomial in x modulo x^L - 1, together with a positive common denominator.
The vector is not canonical (x^L - 1 is not irreducible); equality and
hashing reduce modulo the cyclotomic polynomial Phi_L first.
"""

from fractions import Fraction
from functools import lru_cache
from math import gcd

import mpmath
import numpy as np


def _lcm(a, b):
    return a // gcd(a, b) * b


@lru_cache(maxsize=None)
def cyclotomic_poly(n):
    """Integer coefficients of Phi_n, lowest degree first."""
    # Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d, by exact long division.
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num = _polydiv_exact(num, cyclotomic_poly(d))
    return tuple(num)


def _polydiv_exact(a, b):
    a = list(a)
    db = len(b) - 1
    q = [0] * (len(a) - db)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]  # b is monic
        q[i - db] = c
        if c:
            for j in range(db + 1):
                a[i - db + j] -= c * b[j]
    assert not any(a[:db]), "inexact cyclotomic division"
    return q


@lru_cache(maxsize=64)
def _reduction_matrix(L):
    """Row i holds the coefficients of x^i mod Phi_L (length phi(L))."""
    phi = cyclotomic_poly(L)
    deg = len(phi) - 1
    rows = np.zeros((L, deg), dtype=np.int64)
    cur = np.zeros(deg, dtype=np.int64)
    cur[0] = 1
    tail = -np.array(phi[:deg], dtype=np.int64)
    for i in range(L):
        rows[i] = cur
        top = cur[-1]
        cur = np.concatenate(([0], cur[:-1]))
        if top:
            cur = cur + top * tail
    return rows


@lru_cache(maxsize=32)
def _unit_roots(L, dps):
    with mpmath.workdps(dps):
        return [mpmath.expjpi(mpmath.mpf(2 * i) / L) for i in range(L)]


class Cyclo:
    """Element of Q(zeta_L) with zeta_L = exp(2 pi i / L) under the fixed embedding."""

    __slots__ = ("L", "num", "den", "_canon")

    def __init__(self, L, num, den=1):
        if len(num) != L:
            raise ValueError("coefficient vector must have length L")
        if den <= 0:
            raise ValueError("denominator must be positive")
        self.L = int(L)
        self.num = tuple(int(x) for x in num)
        self.den = int(den)
        self._canon = None

    # constructors
    @classmethod
    def from_int(cls, n, L=1):
        v = [0] * L
        if isinstance(n, Fraction):
            v[0] = n.numerator
            return cls(L, v, n.denominator)
        v[0] = int(n)
        return cls(L, v)

    @classmethod
    def root(cls, L, a=1):
        v = [0] * L
        v[a % L] = 1
        return cls(L, v)

    @classmethod
    def from_turn(cls, t, L=None):
        """exp(2 pi i t) for rational t; L defaults to the denominator of t."""
        t = Fraction(t)
        if L is None:
            L = t.denominator
        if L % t.denominator:
            raise ValueError("level not divisible by the turn denominator")
        return cls.root(L, t.numerator * (L // t.denominator))

    @classmethod
    def coerce(cls, x, L=1):
        if isinstance(x, Cyclo):
            return x
        if isinstance(x, (int, np.integer)):
            return cls.from_int(int(x), L)
        if isinstance(x, Fraction):
            return cls.from_int(x, L)
        raise TypeError("cannot coerce %r to Cyclo" % (type(x),))

    # structure
    def lift(self, L2):
        if L2 == self.L:
            return self
        if L2 % self.L:
            raise ValueError("can only lift to a multiple of the level")
        s = L2 // self.L
        v = [0] * L2
        for i, c in enumerate(self.num):
            if c:
                v[i * s] = c
        return Cyclo(L2, v, self.den)

    @staticmethod
    def _common(a, b):
        if not isinstance(b, Cyclo):
            b = Cyclo.coerce(b, a.L)
        if a.L == b.L:
            return a, b
        L = _lcm(a.L, b.L)
        return a.lift(L), b.lift(L)

    # arithmetic
    def __add__(self, other):
        try:
            a, b = Cyclo._common(self, other)
        except TypeError:
            return NotImplemented
        den = _lcm(a.den, b.den)
        fa, fb = den // a.den, den // b.den
        return Cyclo(a.L, [x * fa + y * fb for x, y in zip(a.num, b.num)], den)._tidy()

    __radd__ = __add__

    def __neg__(self):
        return Cyclo(self.L, [-x for x in self.num], self.den)

    def __sub__(self, other):
        return self + (-Cyclo.coerce(other, self.L) if not isinstance(other, Cyclo) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, np.integer)):
            return Cyclo(self.L, [x * int(other) for x in self.num], self.den)._tidy()
        if isinstance(other, Fraction):
            return Cyclo(self.L, [x * other.numerator for x in self.num], self.den * other.denominator)._tidy()
        if not isinstance(other, Cyclo):
            return NotImplemented
        a, b = Cyclo._common(self, other)
        L = a.L
        out = [0] * L
        nzb = [(j, y) for j, y in enumerate(b.num) if y]
        for i, x in enumerate(a.num):
            if x:
                for j, y in nzb:
                    out[(i + j) % L] += x * y
        return Cyclo(L, out, a.den * b.den)._tidy()

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, np.integer, Fraction)):
            f = Fraction(other)
            if f == 0:
                raise ZeroDivisionError
            return self * (1 / f)
        if isinstance(other, Cyclo):
            return self * other.inverse()
        return NotImplemented

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = Cyclo.from_int(1, self.L)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self):
        """Multiplicative inverse via the product of the other Galois conjugates."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        L = self.L
        prod = Cyclo.from_int(1, L)
        for a in range(2, L + 1):
            if gcd(a, L) == 1 and a % L != 1:
                prod = prod * self.galois(a)
        norm = (self * prod).rational_value()
        if norm is None:
            raise ArithmeticError("norm is not rational")
        return prod * (1 / norm)

    def conj(self):
        L = self.L
        v = [0] * L
        for i, c in enumerate(self.num):
            v[(-i) % L] = c
        return Cyclo(L, v, self.den)

    def galois(self, a):
        """The automorphism zeta -> zeta^a (a coprime to L)."""
        L = self.L
        v = [0] * L
        for i, c in enumerate(self.num):
            if c:
                v[(a * i) % L] += c
        return Cyclo(L, v, self.den)

    def _tidy(self):
        g = self.den
        for x in self.num:
            if g == 1:
                break
            g = gcd(g, x)
        if g > 1:
            return Cyclo(self.L, [x // g for x in self.num], self.den // g)
        return self

    # canonical form
    def canonical(self):
        """(L, reduced coefficient tuple mod Phi_L, den) in lowest terms."""
        if self._canon is None:
            R = _reduction_matrix(self.L)
            big = max((abs(x) for x in self.num), default=0)
            if big < 2**40:
                num = np.asarray(self.num, dtype=np.int64)
                nz = np.flatnonzero(num)
                red = [int(x) for x in num[nz] @ R[nz]]
            else:
                red = [0] * R.shape[1]
                for i, c in enumerate(self.num):
                    if c:
                        row = R[i]
                        for j in np.nonzero(row)[0]:
                            red[j] += c * int(row[j])
            g = self.den
            for x in red:
                g = gcd(g, x)
            if g == 0:
                g = 1
            self._canon = (self.L, tuple(x // g for x in red), self.den // g)
        return self._canon

    def is_zero(self):
        return not any(self.canonical()[1])

    def rational_value(self):
        """The element as a Fraction if it is rational, else None."""
        _, red, den = self.canonical()
        if any(red[1:]):
            return None
        return Fraction(red[0], den)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, np.integer)) or isinstance(other, Cyclo):
            try:
                return (self - other).is_zero()
            except TypeError:
                return NotImplemented
        return NotImplemented

    def __hash__(self):
        r = self.rational_value()
        if r is not None:
            return hash(r)
        return hash(self.canonical())

    def __bool__(self):
        return not self.is_zero()

    # embeddings
    def to_complex(self, dps=40):
        roots = _unit_roots(self.L, dps)
        with mpmath.workdps(dps):
            s = mpmath.mpc(0)
            for i, c in enumerate(self.num):
                if c:
                    s += c * roots[i]
            return s / self.den

    def __complex__(self):
        return complex(self.to_complex(20))

    def __repr__(self):
        terms = ["%d*z^%d" % (c, i) for i, c in enumerate(self.num) if c]
        body = " + ".join(terms) if terms else "0"
        return "Cyclo(L=%d, (%s)/%d)" % (self.L, body, self.den)


def zero(L=1):
    return Cyclo.from_int(0, L)


def one(L=1):
    return Cyclo.from_int(1, L)


def quadratic_gauss_sum(q):
    """sum_u (u/q) zeta_q^u for an odd prime q; its square is (-1/q) q."""
    v = [0] * q
    for u in range(1, q):
        v[u] = 1 if pow(u, (q - 1) // 2, q) == 1 else -1
    return Cyclo(q, v)


def sqrt_int(n):
    """Exact square root of an integer inside a cyclotomic field.

    Root choice: the positive real root for n > 0, positive imaginary part
    for n < 0.
    """
    n = int(n)
    if n == 0:
        return zero()
    sign = -1 if n < 0 else 1
    m = abs(n)
    sq, free = 1, 1
    q = 2
    while q * q <= m:
        while m % (q * q) == 0:
            m //= q * q
            sq *= q
        q += 1
    free = m
    root = Cyclo.from_int(sq)
    # square root of the squarefree part, prime by prime
    rem = free
    q = 2
    primes = []
    while q * q <= rem:
        if rem % q == 0:
            primes.append(q)
            rem //= q
        q += 1
    if rem > 1:
        primes.append(rem)
    i4 = Cyclo.root(4, 1)
    for q in primes:
        if q == 2:
            z8 = Cyclo.root(8, 1)
            root = root * (z8 + z8.conj())
        else:
            g = quadratic_gauss_sum(q)
            # g = sqrt(q) if q = 1 mod 4, i sqrt(q) if q = 3 mod 4
            root = root * (g if q % 4 == 1 else -(i4 * g))
    if sign < 0:
        root = root * i4
    return root
