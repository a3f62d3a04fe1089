"""Dirichlet characters, ring class characters and algebraic Hecke characters.

Character values are exact: finite parts are stored as turns (rationals
mod 1, the value being exp(2 pi i turn)) and evaluated into the cyclotomic
field. Infinity types are realised through the fixed complex embedding of
the imaginary quadratic field, whose square root of r has positive
imaginary part.

Algebraic Hecke characters are only built for class number one, where an
ideal has a generator and
    chi((g)) = g^k1 * conj(g)^k2 * N(g)^t * eps(g mod m)
with eps a character of (R/m)^x that compensates the units.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from math import gcd

import mpmath

from .arith import euler_phi, factor, isprime, lcm
from .cyclo import Cyclo, sqrt_int
from .errors import (BoundExceeded, ClassNumberUnsupported, ConductorGap, NoSolution,
                     NotPrimitive)
from .groups import FiniteAbelianGroup
from .quadfield import ImagQuadField, Lattice, QElt, split_prime

DEFAULT_CHAR_BOUND = 10**4


def _frac1(t):
    t = Fraction(t)
    return t - (t.numerator // t.denominator)


def turn_to_cyclo(t, L=None):
    t = _frac1(t)
    return Cyclo.from_turn(t, L)


# ---------------------------------------------------------------- Dirichlet characters


class DirichletCharacter:
    """A character of (Z/n)^x, extended by zero; values stored as turns."""

    def __init__(self, modulus, turns):
        self.modulus = int(modulus)
        self.turns = {int(a) % self.modulus: _frac1(t) for a, t in turns.items()}

    @classmethod
    def trivial(cls, n=1):
        return cls(n, {a: 0 for a in range(n) if gcd(a, n) == 1})

    @classmethod
    def from_values(cls, modulus, values):
        """From [[residue, num, den], ...] on a generating set of (Z/n)^x."""
        n = int(modulus)
        gens = {int(r) % n: Fraction(int(a), int(b)) for r, a, b in values}
        table = {1 % n: Fraction(0)}
        frontier = [1 % n]
        while frontier:
            new = []
            for x in frontier:
                for g, t in gens.items():
                    y = x * g % n
                    ty = _frac1(table[x] + t)
                    if y in table:
                        if table[y] != ty:
                            raise ValueError("inconsistent Dirichlet character values")
                    else:
                        table[y] = ty
                        new.append(y)
            frontier = new
        units = [a for a in range(n) if gcd(a, n) == 1]
        if len(table) != len(units):
            raise ValueError("values do not determine the character on all units")
        return cls(n, table)

    def turn(self, a):
        return self.turns.get(int(a) % self.modulus)

    def __call__(self, a):
        t = self.turn(a)
        if t is None:
            return Cyclo.from_int(0)
        return turn_to_cyclo(t)

    def value_complex(self, a, dps=30):
        t = self.turn(a)
        if t is None:
            return mpmath.mpc(0)
        with mpmath.workdps(dps):
            return mpmath.expjpi(2 * mpmath.mpf(t.numerator) / t.denominator)

    @property
    def order(self):
        o = 1
        for t in self.turns.values():
            o = lcm(o, t.denominator)
        return o

    def is_trivial(self):
        return all(t == 0 for t in self.turns.values())

    def __mul__(self, other):
        n = lcm(self.modulus, other.modulus)
        return DirichletCharacter(n, {a: self.turn(a) + other.turn(a)
                                      for a in range(n) if gcd(a, n) == 1})

    def inverse(self):
        return DirichletCharacter(self.modulus, {a: -t for a, t in self.turns.items()})

    def conductor(self):
        n = self.modulus
        for d in sorted(x for x in range(1, n + 1) if n % x == 0):
            if all(t == 0 for a, t in self.turns.items() if a % d == 1 % d):
                return d
        return n

    def is_primitive(self):
        return self.conductor() == self.modulus

    def is_even(self):
        return self.turn(-1) == 0

    def __eq__(self, other):
        return (isinstance(other, DirichletCharacter) and self.modulus == other.modulus
                and self.turns == other.turns)

    def __hash__(self):
        return hash((self.modulus, tuple(sorted(self.turns.items()))))

    def __repr__(self):
        return "DirichletCharacter(mod %d, order %d)" % (self.modulus, self.order)


@lru_cache(maxsize=64)
def _unit_group_mod(n):
    units = [a for a in range(n) if gcd(a, n) == 1]
    return FiniteAbelianGroup(units, lambda x, y: x * y % n, 1 % n)


def dirichlet_characters(n):
    """All characters of (Z/n)^x, in a fixed order."""
    G = _unit_group_mod(n)
    out = []
    for turns in G.character_turns():
        out.append(DirichletCharacter(n, {a: G.evaluate_turn(turns, a) for a in G.elements}))
    return out


def gauss_sum(phi):
    """G(phi) = sum_u phi(u) e(u/n) exactly, for a primitive character mod n."""
    n = phi.modulus
    if not phi.is_primitive():
        raise NotPrimitive("character of modulus %d has conductor %d" % (n, phi.conductor()))
    L = lcm(n, phi.order)
    v = [0] * L
    for u, t in phi.turns.items():
        idx = (t.numerator * (L // t.denominator) + u * (L // n)) % L
        v[idx] += 1
    return Cyclo(L, v)


def fourier_transform(values, n):
    """phi*(x) = sum_u phi(u) e(x u / n) for a function given as a list of n Cyclo values."""
    vals = [Cyclo.coerce(v) for v in values]
    L = n
    for v in vals:
        L = lcm(L, v.L)
    out = []
    for x in range(n):
        acc = Cyclo.from_int(0, L)
        for u in range(n):
            if not vals[u].is_zero():
                acc = acc + vals[u] * Cyclo.root(L, (x * u % n) * (L // n))
        out.append(acc)
    return out


def character_function(phi, n=None):
    """Values of a Dirichlet character as a list indexed by Z/n."""
    n = n or phi.modulus
    return [phi(a) for a in range(n)]


# ---------------------------------------------------------------- ring class characters


class FiniteClassCharacter:
    """A character of a ring class group, by its turns on the Smith generators."""

    def __init__(self, group, turns):
        self.group = group
        self.turns = tuple(_frac1(t) for t in turns)
        for t, d in zip(self.turns, group.generator_orders):
            if (t * d).denominator != 1:
                raise ValueError("value order does not divide the generator order")

    @property
    def values_on_generators(self):
        return [turn_to_cyclo(t) for t in self.turns]

    def turn(self, form):
        return self.group.evaluate_turn(self.turns, form)

    def __call__(self, form):
        return turn_to_cyclo(self.turn(form))

    def value_of_ideal(self, ideal):
        return self(ideal.normalized_form)

    def turn_of_ideal(self, ideal):
        return self.turn(ideal.normalized_form)

    @property
    def order(self):
        o = 1
        for t in self.turns:
            o = lcm(o, t.denominator)
        return o

    def is_trivial(self):
        return all(t == 0 for t in self.turns)

    def __mul__(self, other):
        return FiniteClassCharacter(self.group, [a + b for a, b in zip(self.turns, other.turns)])

    def inverse(self):
        return FiniteClassCharacter(self.group, [-a for a in self.turns])

    @cached_property
    def conductor(self):
        """Smallest c' | c such that the character factors through Cl(R_c')."""
        from .quadfield import project_class
        order = self.group.order
        c = order.conductor
        F = order.field
        for c2 in sorted(d for d in range(1, c + 1) if c % d == 0):
            if c2 == c:
                return c
            target = F.order(c2)
            ok = True
            seen = {}
            for form in self.group.representatives:
                img = project_class(order.ideal_from_form(form), target).normalized_form
                t = self.turn(form)
                if img in seen and seen[img] != t:
                    ok = False
                    break
                seen[img] = t
            if ok:
                return c2
        return c

    def is_primitive(self):
        return self.conductor == self.group.order.conductor

    def __repr__(self):
        return "FiniteClassCharacter(c=%d, turns=%s)" % (self.group.order.conductor,
                                                         [str(t) for t in self.turns])


def characters_of(group, bound=DEFAULT_CHAR_BOUND):
    """All characters of a ring class group."""
    if group.size > bound:
        raise BoundExceeded("group of size %d exceeds the character bound %d" % (group.size, bound))
    return [FiniteClassCharacter(group, t) for t in group.character_turns()]


# ---------------------------------------------------------------- residues mod an ideal


class ResidueUnits:
    """(R/m)^x for an integral ideal m of the maximal order."""

    def __init__(self, field, modulus):
        self.field = field
        self.modulus = modulus
        if modulus.den != 1:
            raise ValueError("modulus must be integral")
        self.norm = modulus.g1 * modulus.g2
        m = modulus
        R = field.maximal_order.lattice
        elems = []
        for v in range(m.g2):
            for u in range(m.g1):
                if u == 0 and v == 0:
                    if m == R:
                        elems.append((0, 0))
                    continue
                x = field.from_coords(u, v)
                if (Lattice.from_gens(field, [x, x * field.omega]) + m) == R:
                    elems.append((u, v))
        self.elements = elems
        self.group = FiniteAbelianGroup(elems, self._mul_keys, self.key(field.elt(1)))

    def key(self, x):
        u, v = x.coords()
        if u.denominator != 1 or v.denominator != 1:
            raise ValueError("element is not integral")
        u, v = int(u), int(v)
        m = self.modulus
        k = v // m.g2
        v -= k * m.g2
        u -= k * m.t
        return (u % m.g1, v)

    def _mul_keys(self, a, b):
        F = self.field
        return self.key(F.from_coords(*a) * F.from_coords(*b))

    def is_unit(self, x):
        try:
            return self.key(x) in self.group._log
        except ValueError:
            return False


def _shortest_vector(lat):
    """A shortest nonzero vector of a lattice (Lagrange-Gauss reduction, exact)."""
    a, b = lat.basis()
    while True:
        if b.norm() < a.norm():
            a, b = b, a
        # mu = round(<a, b> / <a, a>), <x, y> = Re(x conj(y))
        ip = (a.conj() * b).x
        mu = ip / a.norm()
        r = round(mu)
        if r == 0:
            return a
        b = b - a * r


def ideal_generator(lat):
    """A generator of a principal ideal of the maximal order."""
    g = _shortest_vector(lat)
    F = lat.F
    if Lattice.from_gens(F, [g, g * F.omega]) != lat:
        raise ClassNumberUnsupported("ideal is not principal")
    return g


def _qelt_to_cyclo(x):
    F = x.F
    return Cyclo.from_int(x.x) + sqrt_int(F.rad) * x.y


class ArithmeticHeckeCharacter:
    """An algebraic Hecke character of an imaginary quadratic field of class number one.

    ``eps`` maps residue keys of (R/m)^x to turns.
    """

    def __init__(self, field, k1, k2, t=Fraction(0), modulus=None, eps=None, label=""):
        if field.h != 1:
            raise ClassNumberUnsupported("class number %d > 1" % field.h)
        self.field = field
        s = min(k1, k2)
        self.k1, self.k2 = int(k1 - s), int(k2 - s)
        self.t = Fraction(t) + s
        R = field.maximal_order.lattice
        self.modulus = modulus if modulus is not None else R
        self.residues = ResidueUnits(field, self.modulus)
        if eps is None:
            eps = {k: Fraction(0) for k in self.residues.elements}
        self.eps = {k: _frac1(v) for k, v in eps.items()}
        self.label = label
        for u in field.units():
            lhs = self._eps_turn(u)
            target = self._unit_turn(u)
            if lhs != target:
                raise NoSolution("finite part does not compensate the unit %r" % (u,))

    @property
    def infinity_type(self):
        return (self.k1, self.k2)

    def _unit_turn(self, u):
        # u^{-k1} conj(u)^{-k2} = u^{k2-k1} for a root of unity u, as a turn
        F = self.field
        ang = _root_of_unity_turn(u)
        return _frac1(ang * (self.k2 - self.k1))

    def _eps_turn(self, x):
        return self.eps[self.residues.key(x)]

    def eps_turn(self, x):
        """Turn of the finite part at an element prime to the modulus, else None."""
        try:
            k = self.residues.key(x)
        except ValueError:
            return None
        return self.eps.get(k)

    def value_at_element(self, g):
        """chi((g)) exactly, for g prime to the modulus; 0 otherwise."""
        et = self.eps_turn(g)
        if et is None:
            return Cyclo.from_int(0)
        val = _qelt_to_cyclo(g) ** self.k1 * _qelt_to_cyclo(g.conj()) ** self.k2
        val = val * turn_to_cyclo(et)
        return val * _norm_power(g.norm(), self.t)

    def value(self, lat):
        """chi on an integral ideal of the maximal order (exact)."""
        return self.value_at_element(ideal_generator(lat))

    def value_complex(self, lat, dps=30):
        g = ideal_generator(lat)
        et = self.eps_turn(g)
        if et is None:
            return mpmath.mpc(0)
        with mpmath.workdps(dps):
            z = g.to_complex(dps)
            v = z**self.k1 * mpmath.conj(z) ** self.k2
            v *= mpmath.expjpi(2 * mpmath.mpf(et.numerator) / et.denominator)
            n = g.norm()
            v *= mpmath.power(mpmath.mpf(n.numerator) / n.denominator, mpmath.mpf(self.t.numerator) / self.t.denominator)
            return v

    def conj_char(self):
        """chi o c."""
        F = self.field
        mod = self.modulus.conj()
        res = ResidueUnits(F, mod)
        eps = {}
        for key in res.elements:
            x = F.from_coords(*key)
            eps[key] = self.eps[self.residues.key(x.conj())]
        return ArithmeticHeckeCharacter(F, self.k2, self.k1, self.t, mod, eps, label="conj(%s)" % self.label)

    def __mul__(self, other):
        F = self.field
        mod = self.modulus * other.modulus
        res = ResidueUnits(F, mod)
        eps = {}
        for key in res.elements:
            x = F.from_coords(*key)
            eps[key] = self.eps[self.residues.key(x)] + other.eps[other.residues.key(x)]
        return ArithmeticHeckeCharacter(F, self.k1 + other.k1, self.k2 + other.k2, self.t + other.t,
                                        mod, eps, label="%s*%s" % (self.label, other.label))

    def norm_twist(self, m):
        return ArithmeticHeckeCharacter(self.field, self.k1, self.k2, self.t + m, self.modulus,
                                        self.eps, label="%s*N^%s" % (self.label, m))

    def is_unitary(self):
        return Fraction(self.k1 + self.k2, 2) + self.t == 0

    def conductor_norm(self):
        return self.residues.norm

    def central_turn(self, a):
        """Turn of eps at a rational integer a prime to the modulus."""
        return self.eps_turn(self.field.elt(a))


def _norm_power(n, t):
    n = Fraction(n)
    t = Fraction(t)
    if t.denominator == 1:
        return Cyclo.from_int(n ** int(t))
    if t.denominator != 2:
        raise ValueError("only half-integral norm powers are exact")
    e = int(t - Fraction(1, 2))
    base = n ** e
    root = sqrt_int(n.numerator * n.denominator) * Fraction(1, n.denominator)
    return root * base


def _root_of_unity_turn(u):
    z = complex(u)
    import cmath
    ang = cmath.phase(z) / (2 * cmath.pi)
    for den in (1, 2, 3, 4, 6):
        num = round(ang * den)
        if abs(ang * den - num) < 1e-9:
            return _frac1(Fraction(num, den))
    raise ValueError("not a root of unity")


def unitary_projection(chi):
    """chi^- = (chi o c) / |chi|."""
    c = chi.conj_char()
    t_new = c.t - (Fraction(chi.k1 + chi.k2, 2) + chi.t)
    out = ArithmeticHeckeCharacter(chi.field, c.k1, c.k2, t_new, c.modulus, c.eps,
                                   label="(%s)^-" % chi.label)
    return out


def norm_character(field, m):
    """|.|^m as an ideal character: N(a)^m, of type (m, m) with t = 0 normalised."""
    return ArithmeticHeckeCharacter(field, 0, 0, Fraction(m), label="N^%s" % m)


# ---------------------------------------------------------------- lambda


def ramified_prime(field, ell):
    """The prime of R above a ramified rational prime ell."""
    F = field
    r = F.rad % ell
    s0 = next(x for x in range(ell) if (x * x - r) % ell == 0)
    g = F.sqrt_rad - F.elt(s0)
    return Lattice.from_gens(F, [F.elt(ell), F.omega * ell, g, g * F.omega])


def _candidate_moduli(field, psi, extra_ramification):
    """Moduli to try, ordered by norm.

    Split l | c(psi) contribute the fixed power of the prime named p above l.
    Inert l contribute l^e. Ramified primes (those dividing c(psi), plus all
    ramified primes if ``extra_ramification``) range over powers of the prime
    above l, so the smallest admissible conductor is found first.
    """
    import itertools
    F = field
    R = F.maximal_order.lattice
    base = R
    ram_choices = {}
    for ell, e in factor(psi.conductor()):
        kind = F.splitting(ell)
        if kind == "split":
            if ell == 2:
                raise NoSolution("split prime 2 dividing c(psi) is not supported")
            l = split_prime(F, ell)[1].lattice
            for _ in range(e):
                base = base * l
        elif kind == "inert":
            base = base * (R * ell**e)
        else:
            ram_choices[ell] = range(0, 2 * e + 4)
    if extra_ramification:
        for ell, _ in factor(abs(F.d)):
            ram_choices.setdefault(ell, range(0, 4))
    ells = sorted(ram_choices)
    out = []
    for exps in itertools.product(*(ram_choices[l] for l in ells)):
        cur = base
        for ell, j in zip(ells, exps):
            P = ramified_prime(F, ell)
            for _ in range(j):
                cur = cur * P
        out.append(cur)
    out.sort(key=lambda L: (L.g1 * L.g2, L.key()))
    return out


def build_lambda(field, k, psi, extra_ramification=True, twist_index=0):
    """An algebraic Hecke character lambda of type (k, 0) restricting to psi^{-1}.

    On principal ideals lambda((a)) = a^k eps(a) with eps a character of
    (R/m)^x satisfying eps(u) = u^{-k} on units and eps(l) = psi(l)^{-1} on
    rational integers. The modulus follows the conductor recipe; if no eps
    exists there and ``extra_ramification`` is set, powers of ramified primes
    are added. Among solutions at the first successful modulus, the one of
    index ``twist_index`` in a fixed order is returned.
    """
    if field.h != 1:
        raise ClassNumberUnsupported("class number %d > 1" % field.h)
    F = field
    if psi.turn(-1) != _frac1(Fraction(k, 2)):
        raise NoSolution("psi(-1) != (-1)^k: no character of type (%d, 0) restricts to psi^-1" % k)
    tried = []
    for mod in _candidate_moduli(F, psi, extra_ramification):
        res = ResidueUnits(F, mod)
        tried.append(res.norm)
        G = res.group
        # constraints: list of (element key, required turn)
        cons = []
        for u in F.units():
            if res.is_unit(u):
                cons.append((res.key(u), _frac1(_root_of_unity_turn(u) * (-k))))
        n_rat = mod.g1  # mod contains g1 * Z; rationals modulo the modulus
        for a in range(1, lcm(n_rat, psi.modulus) + 1):
            if gcd(a, n_rat) == 1 and gcd(a, psi.modulus) == 1:
                x = F.elt(a)
                if res.is_unit(x):
                    cons.append((res.key(x), _frac1(-psi.turn(a))))
        sols = []
        for turns in G.character_turns():
            if all(G.evaluate_turn(turns, key) == want for key, want in cons):
                sols.append(turns)
        if sols:
            turns = sols[twist_index % len(sols)]
            eps = {key: G.evaluate_turn(turns, key) for key in res.elements}
            lam = ArithmeticHeckeCharacter(F, k, 0, 0, mod, eps, label="lambda")
            lam.central_restriction = psi
            lam.solutions_found = len(sols)
            return lam
    raise NoSolution("no finite twist found for k=%d on moduli of norms %s" % (k, tried), moduli=tried)


def ring_class_hecke(field, phi, k1=0, k2=0, t=0):
    """The ideal character attached to a ring class character of conductor c.

    On an ideal b of R prime to c, phi(b) is the value on the class of
    b cap R_c; the resulting finite part has modulus cR.
    """
    F = field
    order = phi.group.order
    c = order.conductor
    R = F.maximal_order.lattice
    mod = R * c
    res = ResidueUnits(F, mod)
    eps = {}
    Rc = order.lattice
    from .quadfield import ProperIdeal
    for key in res.elements:
        x = F.from_coords(*key)
        # modulo R itself the only residue is 0; it stands for the unit class
        lat = Rc if c == 1 else Lattice.from_gens(F, [x, x * F.omega]).intersect(Rc)
        eps[key] = phi.turn(ProperIdeal.from_lattice(order, lat).normalized_form)
    return ArithmeticHeckeCharacter(F, k1, k2, t, mod, eps, label="phi")


def chi_m(lam, phi, m):
    """chi_m = lambda * phi_m * N^m with phi_m((a)) = (a / conj a)^m phi((a)), of type (m, -m)."""
    F = lam.field
    ph = ring_class_hecke(F, phi, 2 * m, 0, -m)
    out = lam * ph
    out = ArithmeticHeckeCharacter(F, out.k1, out.k2, out.t + m, out.modulus, out.eps, label="chi_%d" % m)
    return out


# ---------------------------------------------------------------- avatar


@dataclass
class PAdicAvatar:
    """phi~_p(z) z^m on Z_p^x, with phi~_p read off the ring class character.

    The unit z in Z_p^x is placed at the prime p of M (and 1 at pbar); its
    class in Cl(R_{p^s}) gives the finite value.
    """

    phi: FiniteClassCharacter
    m: int
    p: int

    def finite_turn(self, z):
        F = self.phi.group.order.field
        order = self.phi.group.order
        c = order.conductor
        s = 0
        while c % self.p == 0:
            c //= self.p
            s += 1
        if s == 0:
            return Fraction(0)
        q = self.p**s
        # x = z mod p^s at frak p, 1 mod p^s at frak pbar (frak p = (p, sqrt(r) - r0))
        from .arith import sqrt_mod_prime
        r0 = sqrt_mod_prime(F.rad, self.p)[0]
        root = _hensel_sqrt(F.rad, r0, self.p, s)
        # element a + b sqrt(r): at frak p sqrt(r) -> root, at pbar -> -root
        # a + b root = z, a - b root = 1  =>  a = (z+1)/2, b = (z-1)/(2 root)
        inv2 = pow(2, -1, q)
        a = (z + 1) * inv2 % q
        b = (z - 1) * inv2 * pow(root, -1, q) % q
        x = F.elt(a, b)
        # prime-to-p part of the conductor: make x = 1 there by CRT
        cc = c
        if cc > 1:
            a2 = _crt(a, q, 1, cc)
            b2 = _crt(b, q, 0, cc)
            x = F.elt(a2, b2)
        lat = Lattice.from_gens(F, [x, x * F.omega]).intersect(order.lattice)
        from .quadfield import ProperIdeal
        return self.phi.turn(ProperIdeal.from_lattice(order, lat).normalized_form)


def _hensel_sqrt(r, x, p, s):
    q = p
    for _ in range(1, s):
        q *= p
        x = (x - (x * x - r) * pow(2 * x, -1, q)) % q
    return x % (p**s)


def _crt(a, m, b, n):
    t = (b - a) * pow(m, -1, n) % n
    return a + m * t


def padic_avatar(phi, m, p, N0=1):
    s = 0
    c = phi.conductor
    while c % p == 0:
        c //= p
        s += 1
    from .arith import val
    nu = val(N0, p) if N0 % p == 0 else 0
    if 1 <= s < nu:
        raise ConductorGap("s = %d lies in the excluded range 1 <= s < ord_p(N0) = %d" % (s, nu), s=s, nu=nu)
    return PAdicAvatar(phi, m, p)


def check_admissible(s, p, N0):
    """Raise ConductorGap for 1 <= s < ord_p(N0)."""
    nu = 0
    n = N0
    while n % p == 0:
        n //= p
        nu += 1
    if 1 <= s < nu:
        raise ConductorGap("s = %d lies in the excluded range 1 <= s < ord_p(N0) = %d" % (s, nu), s=s, nu=nu)
    return nu
