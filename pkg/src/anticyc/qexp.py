"""Truncated q-expansions with exact coefficients.

A QExpansion stores a(0..D) and the index D up to which the coefficients are
known. Every operation returns the largest index its output is valid to, so
truncation never silently leaks into results.

Coefficients may be ints, Fractions, cyclotomic numbers (Cyclo), elements of
a quadratic extension (QuadExt) or of a declared number field (NFElt).
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import mpmath
import numpy as np

from .arith import factor, isprime, kronecker_symbol
from .cyclo import Cyclo, sqrt_int
from .errors import (HeckeRecursionError, InternalMismatch, MultiplicativityError, SchemaError,
                     VanishingSplitCoefficient)
from .heckechar import DirichletCharacter


def _is_zero(x):
    if isinstance(x, (int, Fraction)):
        return x == 0
    return x.is_zero()


def _eq(x, y):
    d = x - y
    return _is_zero(d)


def to_complex(x, dps=40):
    """Complex value of an exact coefficient under the fixed embedding."""
    if isinstance(x, int):
        return mpmath.mpc(x)
    if isinstance(x, Fraction):
        with mpmath.workdps(dps):
            return mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator)
    if isinstance(x, (mpmath.mpc, mpmath.mpf, complex, float)):
        return mpmath.mpc(x)
    return x.to_complex(dps)


# ---------------------------------------------------------------- algebraic coefficients


class QuadExt:
    """x + y*r with r^2 = D, x, y, D cyclotomic; r is the root with Im > 0 (or > 0 if real)."""

    __slots__ = ("D", "x", "y")

    def __init__(self, D, x, y=0):
        self.D = Cyclo.coerce(D)
        self.x = Cyclo.coerce(x)
        self.y = Cyclo.coerce(y)

    def _c(self, o):
        if isinstance(o, QuadExt):
            if not _eq(o.D, self.D):
                raise ValueError("quadratic extensions differ")
            return o
        return QuadExt(self.D, Cyclo.coerce(o), 0)

    def __add__(self, o):
        o = self._c(o)
        return QuadExt(self.D, self.x + o.x, self.y + o.y)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(self.D, -self.x, -self.y)

    def __sub__(self, o):
        return self + (-self._c(o))

    def __rsub__(self, o):
        return self._c(o) - self

    def __mul__(self, o):
        o = self._c(o)
        return QuadExt(self.D, self.x * o.x + self.y * o.y * self.D, self.x * o.y + self.y * o.x)

    __rmul__ = __mul__

    def __pow__(self, e):
        out = QuadExt(self.D, 1, 0)
        for _ in range(e):
            out = out * self
        return out

    def is_zero(self):
        # x + y r = 0 with r irrational over Q(zeta) forces x = y = 0; if r lies in the
        # base field fall back to the numerical check
        if self.y.is_zero():
            return self.x.is_zero()
        v = self.to_complex(60)
        return abs(v) < mpmath.mpf(10) ** -45 * (1 + abs(self.x.to_complex(60)))

    def __eq__(self, o):
        try:
            return (self - o).is_zero()
        except (TypeError, ValueError):
            return NotImplemented

    def __hash__(self):
        return hash((self.x, self.y))

    def root_complex(self, dps=40):
        with mpmath.workdps(dps + 10):
            r = mpmath.sqrt(self.D.to_complex(dps + 10))
            if r.imag < 0 or (r.imag == 0 and r.real < 0):
                r = -r
            return r

    def to_complex(self, dps=40):
        with mpmath.workdps(dps):
            return self.x.to_complex(dps) + self.y.to_complex(dps) * self.root_complex(dps)

    def __repr__(self):
        return "QuadExt(%r + %r*sqrt(%r))" % (self.x, self.y, self.D)


def algebraic_sqrt(D):
    """A square root of D, exact; Cyclo when D is a rational integer, else a QuadExt generator."""
    D = Cyclo.coerce(D)
    r = D.rational_value()
    if r is not None:
        num, den = r.numerator, r.denominator
        return sqrt_int(num * den) * Fraction(1, den)
    return QuadExt(D, 0, 1)


class NFElt:
    """Element of Q[x]/(P) in the power basis, embedded at a declared complex root."""

    __slots__ = ("P", "c", "root_index")

    def __init__(self, P, c, root_index=0):
        self.P = tuple(int(v) for v in P)  # monic, lowest degree first
        g = len(self.P) - 1
        c = [Fraction(v) for v in c] + [Fraction(0)] * (g - len(c))
        self.c = tuple(c[:g]) if len(c) <= g else tuple(self._reduce(c))
        self.root_index = root_index

    def _reduce(self, c):
        c = list(c)
        g = len(self.P) - 1
        for i in range(len(c) - 1, g - 1, -1):
            t = c[i]
            if t:
                for j in range(g + 1):
                    c[i - g + j] -= t * self.P[j]
        return c[:g]

    def _c(self, o):
        if isinstance(o, NFElt):
            return o
        return NFElt(self.P, [Fraction(o)], self.root_index)

    def __add__(self, o):
        o = self._c(o)
        return NFElt(self.P, [a + b for a, b in zip(self.c, o.c)], self.root_index)

    __radd__ = __add__

    def __neg__(self):
        return NFElt(self.P, [-a for a in self.c], self.root_index)

    def __sub__(self, o):
        return self + (-self._c(o))

    def __rsub__(self, o):
        return self._c(o) - self

    def __mul__(self, o):
        o = self._c(o)
        prod = [Fraction(0)] * (2 * len(self.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(o.c):
                    prod[i + j] += a * b
        return NFElt(self.P, self._reduce(prod) if len(prod) >= len(self.P) else prod, self.root_index)

    __rmul__ = __mul__

    def __pow__(self, e):
        out = self._c(1)
        for _ in range(e):
            out = out * self
        return out

    def is_zero(self):
        return not any(self.c)

    def __eq__(self, o):
        return (self - o).is_zero()

    def __hash__(self):
        return hash(self.c)

    def to_complex(self, dps=40):
        with mpmath.workdps(dps):
            roots = sorted(mpmath.polyroots(list(reversed(self.P)), maxsteps=200, extraprec=2 * dps),
                           key=lambda z: (float(mpmath.re(z)), float(mpmath.im(z))))
            z = roots[self.root_index]
            return sum((mpmath.mpf(a.numerator) / a.denominator * z**i for i, a in enumerate(self.c)),
                       mpmath.mpc(0))


# ---------------------------------------------------------------- q-expansions


class QExpansion:
    """a(0..D) with weight, level, nebentypus and the truncation index D."""

    def __init__(self, coeffs, weight=2, level=1, nebentypus=None, truncation=None, cusp=True):
        self.coeffs = list(coeffs)
        self.weight = int(weight)
        self.level = int(level)
        self.nebentypus = nebentypus if nebentypus is not None else DirichletCharacter.trivial(1)
        D = len(self.coeffs) - 1 if truncation is None else int(truncation)
        if D > len(self.coeffs) - 1:
            raise ValueError("truncation beyond stored coefficients")
        self.coeffs = self.coeffs[: D + 1]
        self.truncation = D
        self.cusp = cusp and _is_zero(self.coeffs[0]) if self.coeffs else cusp

    @classmethod
    def from_list(cls, a, **kw):
        """From [a(1), a(2), ...]; a(0) = 0."""
        return cls([0] + list(a), **kw)

    def __getitem__(self, n):
        if n > self.truncation:
            raise IndexError("coefficient %d beyond truncation %d" % (n, self.truncation))
        return self.coeffs[n]

    def __len__(self):
        return self.truncation + 1

    def _like(self, coeffs, truncation=None, **kw):
        args = dict(weight=self.weight, level=self.level, nebentypus=self.nebentypus)
        args.update(kw)
        return QExpansion(coeffs, truncation=truncation, **args)

    def truncate(self, D):
        return self._like(self.coeffs[: D + 1], truncation=min(D, self.truncation))

    def __add__(self, other):
        D = min(self.truncation, other.truncation)
        return self._like([self.coeffs[i] + other.coeffs[i] for i in range(D + 1)], D)

    def __sub__(self, other):
        D = min(self.truncation, other.truncation)
        return self._like([self.coeffs[i] - other.coeffs[i] for i in range(D + 1)], D)

    def scale(self, c):
        return self._like([c * a for a in self.coeffs], self.truncation)

    def equals(self, other, upto=None):
        D = min(self.truncation, other.truncation)
        if upto is not None:
            D = min(D, upto)
        return all(_eq(self.coeffs[i], other.coeffs[i]) for i in range(D + 1))

    def first_mismatch(self, other):
        D = min(self.truncation, other.truncation)
        for i in range(D + 1):
            if not _eq(self.coeffs[i], other.coeffs[i]):
                return i
        return None

    def complex_coeffs(self, dps=40):
        return [to_complex(a, dps) for a in self.coeffs]

    def __repr__(self):
        return "QExpansion(k=%d, N=%d, D=%d)" % (self.weight, self.level, self.truncation)


def hecke_U(f, p):
    """a'(j) = a(jp); valid to floor(D/p)."""
    D = f.truncation // p
    return f._like([f.coeffs[j * p] for j in range(D + 1)], D)


def hecke_V(f, p, cap=None):
    """a'(jp) = a(j), zero elsewhere; valid to D*p + p - 1, stored up to ``cap`` (default D)."""
    full = f.truncation * p + p - 1
    D = min(full, f.truncation if cap is None else cap)
    out = [0] * (D + 1)
    for j in range(D // p + 1):
        out[j * p] = f.coeffs[j]
    g = f._like(out, D, level=f.level * p)
    g.valid_to = full
    return g


def psi_at(f, n):
    """psi(n) for the nebentypus viewed modulo the level (0 when gcd(n, N) > 1)."""
    if gcd(n, f.level) > 1:
        return 0
    return _cyclo_or_rational(f.nebentypus(n))


def _psi_p_power(f, p):
    if f.level % p == 0:
        return 0
    return _cyclo_or_rational(f.nebentypus(p) * p ** (f.weight - 1))


def hecke_T(f, p):
    """T_p = U_p + psi(p) p^(k-1) V_p, coefficientwise; valid to floor(D/p)."""
    U = hecke_U(f, p)
    D = U.truncation
    c = _psi_p_power(f, p)
    out = []
    for j in range(D + 1):
        v = U.coeffs[j]
        if j % p == 0:
            v = v + c * f.coeffs[j // p]
        out.append(v)
    return f._like(out, D)


def p_deplete(f, p):
    """f^(p): drop coefficients at multiples of p.

    Computed as f|(1 - U_p V_p) and as f|(1 - T_p V_p + psi(p) p^(k-1) V_p^2)
    (right actions); the two results are compared.
    """
    D = f.truncation
    u = hecke_V(hecke_U(f, p), p, cap=D)
    first = [f.coeffs[i] - u.coeffs[i] for i in range(D + 1)]
    tv = hecke_V(hecke_T(f, p), p, cap=D)
    vv = hecke_V(hecke_V(f, p, cap=D), p, cap=D)
    c = _psi_p_power(f, p)
    # T_p output is valid to floor(D/p); after V_p that covers indices <= p*floor(D/p),
    # and indices not divisible by p are exact zeros, so all of 0..D is valid
    second = [f.coeffs[i] - tv.coeffs[i] + c * vv.coeffs[i] for i in range(D + 1)]
    for i in range(D + 1):
        if not _eq(first[i], second[i]):
            raise InternalMismatch("depletion formulas disagree at index %d" % i, index=i)
    return f._like(first, D, level=_lcm(f.level, p * p))


def _lcm(a, b):
    return a // gcd(a, b) * b


def twist(f, phi, n=None):
    """a'(j) = phi(j) a(j) for phi a DirichletCharacter or a list of values mod n."""
    if isinstance(phi, DirichletCharacter):
        vals = [phi(a) for a in range(phi.modulus)]
        q = phi.modulus
        level = f.level * q * q
        neb = f.nebentypus * phi * phi
    else:
        vals = list(phi)
        q = len(vals) if n is None else n
        level = f.level * q * q
        neb = f.nebentypus
    simp = [_cyclo_or_rational(v) for v in vals]
    out = [simp[j % q] * f.coeffs[j] for j in range(f.truncation + 1)]
    return f._like(out, f.truncation, level=level, nebentypus=neb)


# ---------------------------------------------------------------- eigenforms


class Eigenform:
    """A normalised eigenform: q-expansion plus newform level and Satake data."""

    def __init__(self, base, newform_level=None, root_choice=None):
        self.base = base
        self.N0 = base.level if newform_level is None else int(newform_level)
        self.root_choice = dict(root_choice or {})

    @property
    def weight(self):
        return self.base.weight

    @property
    def level(self):
        return self.base.level

    @property
    def psi(self):
        return self.base.nebentypus

    @property
    def truncation(self):
        return self.base.truncation

    def a(self, n):
        return self.base[n]

    def satake(self, l):
        return satake(self, l)

    def __repr__(self):
        return "Eigenform(N0=%d, k=%d, D=%d)" % (self.N0, self.weight, self.truncation)


def _cyclo_or_rational(x):
    """Collapse rational cyclotomic numbers to Fraction, integral ones to int."""
    if isinstance(x, Cyclo):
        r = x.rational_value()
        if r is None:
            return x
        x = r
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return x


def satake(eig, l, root=0):
    """(alpha_l, beta_l) exactly.

    alpha + beta = a(l)/l^((k-1)/2), alpha*beta = psi(l) at l not dividing N0; at
    l | N0 the pair is (a(l)/l^((k-1)/2), 0). ``root`` 0 takes the + square root
    of the discriminant for alpha, 1 the - root.
    """
    k = eig.weight
    a = eig.a(l)
    scale = sqrt_int(l) ** (k - 1)
    inv_scale = scale.inverse()
    if eig.N0 % l == 0:
        if isinstance(a, (QuadExt, NFElt)):
            return (a * inv_scale, 0)
        return (_cyclo_or_rational(Cyclo.coerce(a) * inv_scale), 0)
    psi_l = eig.psi(l)
    disc = Cyclo.coerce(a) * a - psi_l * (4 * l ** (k - 1))
    r = algebraic_sqrt(disc)
    sign = 1 if root == 0 else -1
    alpha = (r * sign + a) * Fraction(1, 2)
    beta = (a - r * sign) * Fraction(1, 2)
    return (_cyclo_or_rational(alpha * inv_scale), _cyclo_or_rational(beta * inv_scale))


def _rebuild_multiplicative(prime_powers, D, one=1):
    """Coefficients a(n), n <= D, from a dict p -> [a(1), a(p), a(p^2), ...]."""
    out = [0] * (D + 1)
    out[1] = one
    for n in range(2, D + 1):
        v = one
        for p, e in factor(n):
            v = v * prime_powers[p][e]
        out[n] = v
    return out


def stabilize(f0, S, root_choice=None, split_primes=()):
    """Replace the Hecke eigenvalue at each l in S (l not dividing N0) by alpha_l l^((k-1)/2).

    Coefficients are rebuilt multiplicatively: a(l^r) = (alpha_l l^((k-1)/2))^r
    at stabilized primes, f0's own prime-power coefficients elsewhere.
    ``root_choice`` maps l to 0 or 1 (default 0). A vanishing a(l, f0) at a
    split prime listed in ``split_primes`` is rejected.
    """
    root_choice = dict(root_choice or {})
    for l in split_primes:
        if _is_zero(f0.a(l)):
            raise VanishingSplitCoefficient("a(%d, f0) = 0 at a split prime" % l, prime=l)
    S = sorted(set(S))
    if not S:
        return f0
    D = f0.truncation
    k = f0.weight
    pp = {}
    for p in range(2, D + 1):
        if not isprime(p):
            continue
        seq = [1]
        q = p
        while q <= D:
            seq.append(f0.a(q))
            q *= p
        pp[p] = seq
    level = f0.level
    for l in S:
        if f0.N0 % l == 0:
            continue
        if l > D:
            continue
        alpha, _ = satake(f0, l, root_choice.get(l, 0))
        al = alpha * sqrt_int(l) ** (k - 1)
        al = _cyclo_or_rational(al)
        seq = [1]
        q = l
        cur = 1
        while q <= D:
            cur = cur * al
            seq.append(cur)
            q *= l
        pp[l] = seq
        level = _lcm(level, l)
    coeffs = _rebuild_multiplicative(pp, D)
    base = QExpansion(coeffs, weight=k, level=level, nebentypus=f0.psi, truncation=D)
    rc = dict(f0.root_choice)
    rc.update({l: root_choice.get(l, 0) for l in S})
    return Eigenform(base, newform_level=f0.N0, root_choice=rc)


# ---------------------------------------------------------------- theta series


def theta_series(chi, D, field=None):
    """sum over integral ideals a prime to the conductor of chi(a) q^{N a}, up to D.

    ``chi`` is an ArithmeticHeckeCharacter (class number one: ideals are
    enumerated through generators up to units) or None for the trivial
    character of ``field`` (ideal counts, any class number).
    """
    if chi is None:
        F = field
        d = F.d
        coeffs = [0] * (D + 1)
        for n in range(1, D + 1):
            coeffs[n] = sum(kronecker_symbol(d, e) for e in range(1, n + 1) if n % e == 0)
        return QExpansion(coeffs, weight=1, level=abs(d), truncation=D,
                          nebentypus=_kronecker_character(d))
    F = chi.field
    w = F.w
    coeffs = [0] * (D + 1)
    # enumerate x + y*omega with norm <= D; omega = (d + sqrt d)/2
    d = F.d
    ymax = int((4 * D / abs(d)) ** 0.5) + 2
    acc = {}
    for y in range(-ymax, ymax + 1):
        # N(x + y w) = (x + y d/2)^2 + y^2 |d| / 4
        c = y * d / 2
        r = D - y * y * abs(d) / 4
        if r < 0:
            continue
        s = r**0.5
        for x in range(int(-c - s) - 1, int(-c + s) + 2):
            if x == 0 and y == 0:
                continue
            g = F.from_coords(x, y)
            n = g.norm()
            if n > D:
                continue
            n = int(n)
            v = chi.value_at_element(g)
            acc[n] = acc.get(n, 0) + v
    for n, v in acc.items():
        coeffs[n] = _cyclo_or_rational(v * Fraction(1, w))
    level = abs(d) * chi.conductor_norm()
    return QExpansion(coeffs, weight=chi.k1 + chi.k2 + 1, level=level, truncation=D)


def _kronecker_character(d):
    n = abs(d)
    return DirichletCharacter(n, {a: Fraction(0 if kronecker_symbol(d, a) == 1 else 1, 2)
                                  for a in range(n) if gcd(a, n) == 1})


# ---------------------------------------------------------------- ingestion


_REQUIRED = ("level", "weight", "nebentypus", "coeff_field_degree", "coefficients")


def _int_field(obj, key, where="record"):
    v = obj.get(key)
    if not isinstance(v, int) or isinstance(v, bool):
        raise SchemaError("%s field %r must be an integer" % (where, key), field=key)
    return v


def parse_eigenform(data):
    """Validate an eigenform record (already decoded from JSON)."""
    if not isinstance(data, dict):
        raise SchemaError("top level must be an object")
    for k in _REQUIRED:
        if k not in data:
            raise SchemaError("missing field %r" % k, field=k)
    N = _int_field(data, "level")
    k = _int_field(data, "weight")
    g = _int_field(data, "coeff_field_degree")
    if N < 1 or k < 1 or g < 1:
        raise SchemaError("level, weight and degree must be positive")
    neb = data["nebentypus"]
    if not isinstance(neb, dict) or "modulus" not in neb or "values" not in neb:
        raise SchemaError("nebentypus needs 'modulus' and 'values'", field="nebentypus")
    m = _int_field(neb, "modulus", "nebentypus")
    vals = neb["values"]
    if not isinstance(vals, list) or not all(
            isinstance(v, list) and len(v) == 3 and all(isinstance(x, int) and not isinstance(x, bool) for x in v)
            and v[2] > 0 for v in vals):
        raise SchemaError("nebentypus values must be [residue, num, den] integer triples", field="nebentypus")
    try:
        psi = DirichletCharacter.from_values(m, vals) if m > 1 else DirichletCharacter.trivial(1)
    except ValueError as e:
        raise SchemaError("nebentypus: %s" % e, field="nebentypus")
    P = None
    if g > 1:
        P = data.get("coeff_field_poly")
        if not (isinstance(P, list) and len(P) == g + 1 and all(isinstance(x, int) for x in P) and P[-1] == 1):
            raise SchemaError("degree > 1 needs 'coeff_field_poly': monic integer list of length degree+1",
                              field="coeff_field_poly")
    rows = data["coefficients"]
    if not isinstance(rows, list) or not rows:
        raise SchemaError("coefficients must be a nonempty list", field="coefficients")
    table = {}
    for row in rows:
        if not isinstance(row, list) or len(row) != g + 1:
            raise SchemaError("coefficient rows must have length degree+1", field="coefficients")
        for x in row:
            if not isinstance(x, int) or isinstance(x, bool):
                raise SchemaError("coefficients must be integers (no denominators)", field="coefficients", row=row)
        n = row[0]
        if n < 1 or n in table:
            raise SchemaError("bad or repeated index %r" % n, field="coefficients")
        table[n] = row[1] if g == 1 else NFElt(P, row[1:])
    D = max(table)
    if sorted(table) != list(range(1, D + 1)):
        raise SchemaError("coefficient indices must be 1..D without gaps", field="coefficients")
    coeffs = [0] + [table[n] for n in range(1, D + 1)]
    one = 1 if g == 1 else NFElt(P, [1])
    if not _eq(coeffs[1], one):
        raise SchemaError("eigenform must be normalised: a(1) = 1", field="coefficients")
    f = QExpansion(coeffs, weight=k, level=N, nebentypus=psi, truncation=D)
    check_multiplicativity(f)
    check_hecke_recursion(f)
    return Eigenform(f, newform_level=N)


def ingest_eigenform(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise SchemaError("invalid JSON: %s" % e)
    return parse_eigenform(data)


def eigenform_to_json(eig):
    f = eig.base
    psi = f.nebentypus
    return {
        "level": f.level,
        "weight": f.weight,
        "nebentypus": {"modulus": psi.modulus,
                       "values": [[a, t.numerator, t.denominator] for a, t in sorted(psi.turns.items())]},
        "coeff_field_degree": 1,
        "coefficients": [[n, int(f.coeffs[n])] for n in range(1, f.truncation + 1)],
    }


def coprime_pairs(D, count=20):
    """The first ``count`` coprime pairs 2 <= m < n with m*n <= D, by product then m."""
    out = []
    for prod in range(6, D + 1):
        for m in range(2, int(prod**0.5) + 1):
            if prod % m == 0:
                n = prod // m
                if m < n and gcd(m, n) == 1:
                    out.append((m, n))
                    if len(out) == count:
                        return out
    return out


def check_multiplicativity(f, count=20):
    for m, n in coprime_pairs(f.truncation, count):
        if not _eq(f.coeffs[m * n], f.coeffs[m] * f.coeffs[n]):
            raise MultiplicativityError("a(%d) != a(%d) a(%d)" % (m * n, m, n), indices=[m, n])


def check_hecke_recursion(f):
    D = f.truncation
    N = f.level
    k = f.weight
    for p in range(2, D + 1):
        if not isprime(p) or N % p == 0 or p * p > D:
            continue
        c = _psi_p_power(f, p)
        r = 1
        while p ** (r + 1) <= D:
            lhs = f.coeffs[p ** (r + 1)]
            rhs = f.coeffs[p] * f.coeffs[p**r] - c * f.coeffs[p ** (r - 1)]
            if not _eq(lhs, rhs):
                raise HeckeRecursionError("recursion fails at p=%d, r=%d" % (p, r), prime=p, r=r)
            r += 1


# ---------------------------------------------------------------- reference data


def eta_product_level11(D):
    """q prod (1-q^n)^2 (1-q^{11n})^2 up to q^D (integer arithmetic)."""
    poly = np.zeros(D + 1, dtype=object)
    poly[0] = 1
    for n in range(1, D + 1):
        for step, reps in ((n, 2), (11 * n, 2)):
            if step > D:
                continue
            for _ in range(reps):
                poly[step:] = poly[step:] - poly[:-step]
    out = [0] * (D + 1)
    for i in range(D):
        out[i + 1] = int(poly[i])
    return out


def level11_form(D=200):
    coeffs = eta_product_level11(D)
    return Eigenform(QExpansion(coeffs, weight=2, level=11, truncation=D), newform_level=11)


def load_level11(D=None):
    """The bundled level-11 weight-2 newform, truncated to D if given."""
    from importlib import resources
    with resources.files("anticyc.data").joinpath("level11.json").open("r", encoding="utf-8") as fh:
        eig = parse_eigenform(json.load(fh))
    if D is not None and D < eig.truncation:
        eig = Eigenform(eig.base.truncate(D), newform_level=eig.N0)
    return eig
