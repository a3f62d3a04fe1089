"""Measures on Z_p as truncated power series in T = t - 1.

Coefficients live in W_n = (Z/p^M)[x]/(Phi_{p^n}(x)), a finite-precision
stand-in for a ring of Witt vectors with p^n-th roots of unity adjoined
(x plays the role of zeta_{p^n}). Elements are integer vectors of length
phi(p^n). Roots of unity of order prime to p that divide p - 1 are sent to
Teichmueller lifts of powers of the least primitive root mod p.

A MeasureSeries records its coefficients c_0..c_K, the exponent ``prec``
to which they are known, and whether it is an exact polynomial (all
coefficients beyond K vanish). Operations propagate both.
"""

from fractions import Fraction
from functools import cached_property, lru_cache
from math import comb, gcd

import numpy as np
from sympy import primitive_root

from .cyclo import Cyclo
from .errors import (CoefficientNotIntegral, CyclotomicLevelTooSmall, DivisionNotExact, NotDepleted,
                     PrecisionExhausted)

_INT64_LIMIT = 2**62


# ---------------------------------------------------------------- coefficient ring


class PCoeffRing:
    def __init__(self, p, M=20, n=0):
        if p < 2 or M < 1 or n < 0:
            raise ValueError("need p >= 2, M >= 1, n >= 0")
        self.p = int(p)
        self.M = int(M)
        self.n = int(n)
        self.mod = self.p**self.M
        self.L = self.p**self.n
        self.dim = 1 if self.n == 0 else (self.p - 1) * self.p ** (self.n - 1)
        big = self.mod * self.mod * (2 * self.dim + 1) * max(self.L, 1)
        self.dtype = np.int64 if big < _INT64_LIMIT else object

    def __repr__(self):
        return "PCoeffRing(p=%d, M=%d, level=%d)" % (self.p, self.M, self.L)

    def __eq__(self, other):
        return isinstance(other, PCoeffRing) and (self.p, self.M, self.n) == (other.p, other.M, other.n)

    def __hash__(self):
        return hash((self.p, self.M, self.n))

    def with_level(self, n):
        return PCoeffRing(self.p, self.M, n)

    def array(self, x):
        return np.asarray(x, dtype=self.dtype) % self.mod

    @cached_property
    def _power_table(self):
        """Row i = x^i reduced mod Phi_{p^n}, for 0 <= i < max(L, 2*dim)."""
        d = self.dim
        size = max(self.L, 2 * d)
        rows = np.zeros((size, d), dtype=self.dtype)
        if self.n == 0:
            rows[:, 0] = 1
            return rows
        m = self.p ** (self.n - 1)
        for i in range(size):
            e = i % self.L
            if e < d:
                rows[i, e] = 1
            else:
                # x^e with e = (p-1) m + j: equals -sum_{b < p-1} x^{b m + j}
                j = e - (self.p - 1) * m
                for b in range(self.p - 1):
                    rows[i, b * m + j] = -1
        return rows % self.mod

    def x_pow(self, e):
        return self._power_table[e % max(self.L, 1)].copy()

    def zero(self):
        return np.zeros(self.dim, dtype=self.dtype)

    def one(self):
        return self.from_int(1)

    def from_int(self, a):
        v = self.zero()
        v[0] = int(a) % self.mod
        return v

    def from_fraction(self, q):
        q = Fraction(q)
        if q.denominator % self.p == 0:
            raise CoefficientNotIntegral("denominator %d divisible by p = %d" % (q.denominator, self.p))
        return self.from_int(q.numerator * pow(q.denominator, -1, self.mod))

    def mul(self, a, b):
        conv = np.convolve(np.asarray(a, dtype=self.dtype), np.asarray(b, dtype=self.dtype)) % self.mod
        return (conv @ self._power_table[: len(conv)]) % self.mod

    def mult_matrix(self, a):
        """Matrix A with v @ A = v * a."""
        d = self.dim
        a = np.asarray(a, dtype=self.dtype) % self.mod
        shifted = np.zeros((d, 2 * d - 1), dtype=self.dtype)
        for j in range(d):
            shifted[j, j:j + d] = a
        return (shifted @ self._power_table[: 2 * d - 1]) % self.mod

    def power(self, a, e):
        out = self.one()
        base = np.asarray(a, dtype=self.dtype)
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def equal(self, a, b, prec=None):
        m = self.p ** (self.M if prec is None else prec)
        return bool(np.all((np.asarray(a, dtype=object) - np.asarray(b, dtype=object)) % m == 0))

    def valuation(self, a):
        """Minimal p-adic valuation of the coordinates (M if zero)."""
        v = self.M
        for x in np.asarray(a, dtype=object).ravel():
            x = int(x) % self.mod
            if x:
                k = 0
                while x % self.p == 0:
                    x //= self.p
                    k += 1
                v = min(v, k)
        return v

    # embeddings of roots of unity
    @cached_property
    def _teich_gen(self):
        if self.p == 2:
            return 1
        g = int(primitive_root(self.p))
        return pow(g, self.p ** (self.M - 1), self.mod)

    def root_of_unity(self, t):
        """Image of exp(2 pi i t), t rational, if its order is p^e r with e <= n and r | p - 1."""
        t = Fraction(t) % 1
        L = t.denominator
        e = 0
        r = L
        while r % self.p == 0:
            r //= self.p
            e += 1
        if e > self.n or (self.p - 1) % r:
            raise CyclotomicLevelTooSmall("root of unity of order %d not available at level %d" % (L, self.L),
                                          order=L, level=self.L)
        # t = u / p^e + v / r
        pe = self.p**e
        u = (t.numerator * pow(r, -1, pe)) % pe if pe > 1 else 0
        v = (t.numerator * pow(pe, -1, r)) % r if r > 1 else 0
        zp = self.x_pow(u * self.p ** (self.n - e)) if e else self.one()
        tame = pow(self._teich_gen, v * ((self.p - 1) // r), self.mod) if r > 1 else 1
        return (zp * tame) % self.mod

    def embed(self, c):
        """Embed an int, Fraction or Cyclo coefficient."""
        if isinstance(c, (int, np.integer)):
            return self.from_int(int(c))
        if isinstance(c, Fraction):
            return self.from_fraction(c)
        if isinstance(c, Cyclo):
            out = self.zero()
            for i, a in enumerate(c.num):
                if a:
                    out = (out + a * self.root_of_unity(Fraction(i, c.L))) % self.mod
            if c.den % self.p == 0:
                raise CoefficientNotIntegral("cyclotomic coefficient has denominator divisible by p")
            return (out * pow(c.den, -1, self.mod)) % self.mod
        raise TypeError("cannot embed %r" % (type(c),))


# ---------------------------------------------------------------- series


class MeasureSeries:
    """Phi(t) = sum_k c_k T^k, coefficients in ``ring``, known mod p^prec up to degree K."""

    def __init__(self, ring, coeffs, prec=None, exact=False):
        self.ring = ring
        c = np.asarray(coeffs, dtype=ring.dtype)
        if c.ndim == 1:
            c2 = np.zeros((len(c), ring.dim), dtype=ring.dtype)
            c2[:, 0] = c
            c = c2
        self.coeffs = c % ring.mod
        self.prec = ring.M if prec is None else int(prec)
        self.exact = bool(exact)

    @property
    def truncation(self):
        return len(self.coeffs) - 1

    def __repr__(self):
        return "MeasureSeries(%r, D=%d, prec=%d%s)" % (self.ring, self.truncation, self.prec,
                                                        ", polynomial" if self.exact else "")

    def lift_level(self, n):
        """The same series over a ring of higher cyclotomic level."""
        if n == self.ring.n:
            return self
        if n < self.ring.n:
            raise CyclotomicLevelTooSmall("cannot lower the level")
        R = self.ring.with_level(n)
        out = np.zeros((len(self.coeffs), R.dim), dtype=R.dtype)
        step = R.L // max(self.ring.L, 1)
        for j in range(self.ring.dim):
            out += np.outer(self.coeffs[:, j], R.x_pow(j * step)).astype(R.dtype)
        return MeasureSeries(R, out % R.mod, self.prec, self.exact)

    def truncate(self, D):
        D = min(D, self.truncation)
        exact = self.exact and not np.any(self.coeffs[D + 1:] % self.ring.p**self.prec)
        return MeasureSeries(self.ring, self.coeffs[: D + 1], self.prec, exact)

    def add(self, other, a=1, b=1):
        n = max(self.ring.n, other.ring.n)
        x, y = self.lift_level(n), other.lift_level(n)
        D = _common_truncation(x, y)
        cx = _pad(x.coeffs, D + 1)
        cy = _pad(y.coeffs, D + 1)
        return MeasureSeries(x.ring, (a * cx + b * cy) % x.ring.mod, min(x.prec, y.prec), x.exact and y.exact)

    def scale(self, c):
        R = self.ring
        if isinstance(c, (int, np.integer)):
            return MeasureSeries(R, (self.coeffs * int(c)) % R.mod, self.prec, self.exact)
        A = R.mult_matrix(c)
        return MeasureSeries(R, (self.coeffs @ A) % R.mod, self.prec, self.exact)

    def equals(self, other, upto=None):
        """Equality mod p^(common precision) up to the common valid degree."""
        n = max(self.ring.n, other.ring.n)
        x, y = self.lift_level(n), other.lift_level(n)
        D = _common_truncation(x, y)
        if upto is not None:
            D = min(D, upto)
        prec = min(x.prec, y.prec)
        return x.ring.equal(_pad(x.coeffs, D + 1), _pad(y.coeffs, D + 1), prec)


def _pad(c, n):
    if len(c) >= n:
        return c[:n]
    out = np.zeros((n, c.shape[1]), dtype=c.dtype)
    out[: len(c)] = c
    return out


def _common_truncation(x, y):
    if x.exact and y.exact:
        return max(x.truncation, y.truncation)
    if x.exact:
        return y.truncation
    if y.exact:
        return x.truncation
    return min(x.truncation, y.truncation)


def series_from_ints(ring, coeffs, exact=True):
    return MeasureSeries(ring, [int(c) % ring.mod for c in coeffs], exact=exact)


def dirac(ring, a, D=None):
    """Phi = t^a: the Dirac measure at a >= 0, as a polynomial in T."""
    return series_from_ints(ring, [comb(a, k) for k in range(a + 1)])


# ---------------------------------------------------------------- locally constant functions


class LocallyConstantFn:
    """A function on Z_p factoring through Z/p^n, with values in a coefficient ring."""

    def __init__(self, ring, n, values):
        if n > ring.n:
            raise CyclotomicLevelTooSmall("function of level p^%d needs ring level >= p^%d" % (n, n))
        self.ring = ring
        self.n = n
        self.level = ring.p**n
        vals = []
        for v in values:
            if isinstance(v, np.ndarray):
                vals.append(v % ring.mod)
            else:
                vals.append(ring.embed(v))
        if len(vals) != self.level:
            raise ValueError("need %d values" % self.level)
        self.values = vals

    @classmethod
    def indicator(cls, ring, n, b):
        L = ring.p**n
        return cls(ring, n, [1 if x == b % L else 0 for x in range(L)])

    @classmethod
    def constant(cls, ring, c=1):
        return cls(ring, 0, [c])

    @classmethod
    def units_indicator(cls, ring):
        return cls(ring, 1, [0] + [1] * (ring.p - 1))

    @classmethod
    def from_character(cls, ring, chi):
        """A Dirichlet character mod p^n (extended by zero), values embedded in the ring."""
        L = chi.modulus
        n = 0
        while ring.p**n < L:
            n += 1
        if ring.p**n != L:
            raise ValueError("character modulus is not a power of p")
        vals = []
        for x in range(L):
            t = chi.turn(x)
            vals.append(ring.zero() if t is None else ring.root_of_unity(t))
        return cls(ring, n, vals)

    def at(self, x):
        return self.values[x % self.level]

    def lift(self, n):
        """The same function viewed at level p^n (n >= own level)."""
        L = self.ring.p**n
        return LocallyConstantFn(self.ring, n, [self.at(x) for x in range(L)])

    def __mul__(self, other):
        n = max(self.n, other.n)
        a, b = self.lift(n), other.lift(n)
        return LocallyConstantFn(self.ring, n, [self.ring.mul(x, y) for x, y in zip(a.values, b.values)])

    def reflect(self):
        """x -> phi(-x)."""
        return LocallyConstantFn(self.ring, self.n, [self.at(-x) for x in range(self.level)])


# ---------------------------------------------------------------- act


def _binom_matrix(K, dtype, mod):
    """B[k, i] = binom(k, i) mod p^M for k, i < K."""
    B = np.zeros((K, K), dtype=object)
    for k in range(K):
        row = 1
        for i in range(k + 1):
            B[k, i] = row % mod
            row = row * (k - i) // (i + 1)
    return B.astype(dtype) if dtype is not object else B


@lru_cache(maxsize=32)
def _binom_cached(K, p, M, big):
    mod = p**M
    return _binom_matrix(K, object if big else np.int64, mod)


def _binoms(ring, K):
    return _binom_cached(K, ring.p, ring.M, ring.dtype is object)


def _pi_powers(ring, a, R):
    """Rows r = (x^a - 1)^r for r < R (cached, read-only)."""
    return _pi_powers_cached(ring, a % max(ring.L, 1), R)


@lru_cache(maxsize=4096)
def _pi_powers_cached(ring, a, R):
    out = np.zeros((R, ring.dim), dtype=ring.dtype)
    pi = (ring.x_pow(a) - ring.one()) % ring.mod
    cur = ring.one()
    for r in range(R):
        out[r] = cur
        cur = ring.mul(cur, pi)
        if not np.any(cur):
            break
    out.setflags(write=False)
    return out


def _rotation(ring, j):
    return _rotation_cached(ring, j % max(ring.L, 1))


@lru_cache(maxsize=4096)
def _rotation_cached(ring, j):
    out = ring.mult_matrix(ring.x_pow(j))
    out.setflags(write=False)
    return out


def _pi_range(ring, prec):
    """Powers of x - 1 beyond which everything vanishes mod p^prec."""
    return ring.dim * prec + 1 if ring.n else 1


def _substituted(mu, a, ring, R_needed=None):
    """Coefficients of Phi(x^a (1+T)) over ``ring`` (without the x^{a i} rotation).

    E[i] = sum_k c_k binom(k, i) (x^a - 1)^(k - i).
    """
    K = len(mu.coeffs)
    mod = ring.mod
    R = min(K, _pi_range(ring, ring.M)) if R_needed is None else R_needed
    P = _pi_powers(ring, a, R)
    B = _binoms(ring, K)
    C = mu.coeffs  # (K, d)
    d = ring.dim
    E = np.zeros((K, d), dtype=ring.dtype)
    # Y[j][i, r] = binom(i + r, i) * C[i + r, j]
    idx_i = np.arange(K)[:, None]
    idx_r = np.arange(R)[None, :]
    kk = idx_i + idx_r
    valid = kk < K
    kk_c = np.where(valid, kk, 0)
    Bsel = np.where(valid, B[kk_c, np.broadcast_to(idx_i, kk_c.shape)], 0)
    for j in range(d):
        col = C[:, j]
        if not np.any(col):
            continue
        Y = (Bsel * np.where(valid, col[kk_c], 0)) % mod
        part = (Y @ P) % mod  # (K, d): sum_r Y[i, r] * pi^r
        if j:
            part = (part @ _rotation(ring, j)) % mod
        E = (E + part) % mod
    return E


def act(phi, mu, check=True):
    """[phi]Phi(t) = p^-n sum_b phi(b) sum_zeta zeta^-b Phi(zeta t).

    The result lives over a ring of level at least the level of phi, is known
    mod p^(prec - n), and for a non-polynomial input is valid only up to the
    degree where the neglected tail is provably below that precision.
    """
    ring = phi.ring
    if mu.ring.p != ring.p or mu.ring.M != ring.M:
        raise ValueError("rings differ")
    n = phi.n
    if n == 0:
        c = phi.at(0)
        return mu.lift_level(ring.n).scale(c)
    mu = mu.lift_level(ring.n)
    L = ring.p**n
    step = ring.L // L
    mod = ring.mod
    K = len(mu.coeffs)
    d = ring.dim
    # rotation matrices Rot[e] = multiplication by x^e
    rot = [_rotation(ring, e) for e in range(ring.L)]
    # hat_a = sum_b phi(b) x^{-a b step}
    support = [(b, np.asarray(v, dtype=ring.dtype)) for b, v in ((b, phi.at(b)) for b in range(L)) if np.any(v)]
    hats = []
    for a in range(L):
        h = ring.zero()
        for b, v in support:
            h = h + v @ rot[(-a * b * step) % ring.L]
        hats.append(h % mod)
    total = np.zeros((K, d), dtype=ring.dtype)
    for a in range(L):
        if not np.any(hats[a]):
            continue
        E = _substituted(mu, a * step, ring)
        H = ring.mult_matrix(hats[a])
        for i in range(K):
            e = (a * step * i) % ring.L
            if e:
                E[i] = (E[i] @ rot[e]) % mod
        total = (total + (E @ H)) % mod
    pn = ring.p**n
    prec_in = mu.prec
    prec_out = prec_in - n
    if prec_out < 1:
        raise PrecisionExhausted("precision %d does not survive division by p^%d" % (prec_in, n))
    if mu.exact:
        valid = K - 1
    else:
        # a neglected c_k (k >= K) enters degree i with valuation >= (K - i)/phi(p^n) - n
        valid = K - 1 - d * prec_in if ring.n == n else K - 1 - (pn - pn // ring.p) * prec_in
        if valid < 0:
            raise PrecisionExhausted("series too short for the requested precision",
                                     truncation=K - 1, needed=d * prec_in)
    total = total[: valid + 1]
    mod_in = ring.p**prec_in
    obj = total.astype(object) % mod_in
    if check and np.any(obj % pn):
        bad = int(np.argwhere(obj % pn)[0][0])
        raise DivisionNotExact("sum not divisible by p^%d at degree %d" % (n, bad), degree=bad)
    out = (obj // pn) % (ring.p**prec_out)
    return MeasureSeries(ring, out.astype(ring.dtype) if ring.dtype is not object else out, prec_out, mu.exact)


def theta_operator(mu, times=1):
    """(t d/dt)^times on the T-expansion: c'_i = (i+1) c_{i+1} + i c_i."""
    R = mu.ring
    c = mu.coeffs
    for _ in range(times):
        K = len(c)
        if K == 0:
            break
        i = np.arange(K, dtype=object)[:, None]
        nxt = np.zeros_like(c)
        nxt[:-1] = c[1:]
        new = ((i + 1) * nxt.astype(object) + i * c.astype(object)) % R.mod
        if not mu.exact:
            new = new[:-1]
        c = new.astype(R.dtype) if R.dtype is not object else new
    return MeasureSeries(R, c, mu.prec, mu.exact)


def moment_by_derivative(mu, m):
    if not mu.exact and m > mu.truncation:
        raise PrecisionExhausted("moment %d needs truncation >= %d" % (m, m))
    out = theta_operator(mu, m)
    return out.coeffs[0] % (mu.ring.p**mu.prec)


@lru_cache(maxsize=None)
def _stirling2_row(m):
    """S(m, n) for n = 0..m."""
    row = [1]
    for i in range(1, m + 1):
        new = [0] * (i + 1)
        for k in range(1, i + 1):
            new[k] = k * (row[k] if k < len(row) else 0) + row[k - 1]
        row = new
    return tuple(row)


def moment_by_stirling(mu, m):
    """sum_n c_n S(m, n) n! (x^m = sum_n S(m, n) n! binom(x, n))."""
    R = mu.ring
    S = _stirling2_row(m)
    acc = np.zeros(R.dim, dtype=object)
    fact = 1
    for n in range(0, min(m, mu.truncation) + 1):
        if n:
            fact *= n
        acc = acc + mu.coeffs[n].astype(object) * (S[n] * fact)
    return (acc % (R.p**mu.prec)).astype(R.dtype) if R.dtype is not object else acc % (R.p**mu.prec)


def moment(mu, m):
    """int x^m dmu, computed by (t d/dt)^m at t = 1 and by the Stirling expansion; both must agree."""
    if mu.prec < 1:
        raise PrecisionExhausted("no significant digits remain")
    a = moment_by_derivative(mu, m)
    b = moment_by_stirling(mu, m)
    if not mu.ring.equal(a, b, mu.prec):
        from .errors import InternalMismatch
        raise InternalMismatch("moment routes disagree for m = %d" % m)
    return a


def evaluate_at_root(mu, u, n):
    """Phi(zeta_{p^n}^u) = sum_k c_k (zeta^u - 1)^k, in the ring of level n (or higher).

    Returns (value, precision). For a polynomial the value is exact mod p^prec;
    otherwise the tail bounds the precision by ceil(K / phi(p^n)).
    """
    ring = mu.ring
    if ring.n < n:
        raise CyclotomicLevelTooSmall("ring level p^%d below p^%d" % (ring.n, n), level=ring.L)
    step = ring.L // ring.p**n
    K = len(mu.coeffs)
    P = _pi_powers(ring, u * step, K)
    d = ring.dim
    # row j: the x^j-coordinate series summed against the powers of (zeta^u - 1)
    C, Pk = mu.coeffs[:, :d], P[:K]
    if ring.dtype is not object and K * ring.mod * ring.mod >= _INT64_LIMIT:
        C, Pk = C.astype(object), Pk.astype(object)
    parts = ((C.T @ Pk) % ring.mod).astype(ring.dtype)
    conv = np.zeros(2 * d - 1, dtype=ring.dtype)
    for j in range(d):
        conv[j:j + d] = (conv[j:j + d] + parts[j]) % ring.mod
    acc = (conv @ ring._power_table[: 2 * d - 1]) % ring.mod
    prec = mu.prec
    if not mu.exact and n > 0:
        phi = (ring.p - 1) * ring.p ** (n - 1)
        prec = min(prec, -(-K // phi))
    return acc, prec


def root_values(mu, n):
    """[evaluate_at_root(mu, u, n) for u < p^n], for reuse across balls."""
    return [evaluate_at_root(mu, u, n) for u in range(mu.ring.p**n)]


def ball_measure(mu, b, n, roots=None):
    """mu(b + p^n Z_p) = p^-n sum_zeta zeta^-b Phi(zeta), as (value, precision).

    ``roots`` may carry the output of ``root_values(mu, n)``.
    """
    ring = mu.ring
    if ring.n < n:
        raise CyclotomicLevelTooSmall("ring level p^%d below p^%d" % (ring.n, n), level=ring.L)
    L = ring.p**n
    step = ring.L // L
    acc = np.zeros(ring.dim, dtype=object)
    prec = mu.prec
    for u in range(L):
        val, pr = roots[u] if roots is not None else evaluate_at_root(mu, u, n)
        prec = min(prec, pr)
        acc = acc + ring.mul(val, ring.x_pow(-u * b * step)).astype(object)
    acc %= ring.p**prec
    if np.any(acc % L):
        raise DivisionNotExact("ball sum not divisible by p^%d" % n)
    return ((acc // L) % ring.p ** (prec - n)).astype(ring.dtype) if ring.dtype is not object else (acc // L), prec - n


def twisted_moment(mu, phi, m):
    """moment(act(phi, mu), m), cross-checked against sum_a hat(a) (t d/dt)^m Phi at zeta^a."""
    a = moment(act(phi, mu), m)
    b = _twisted_moment_direct(mu, phi, m)
    ring = phi.ring
    prec = mu.prec - phi.n
    if not ring.equal(a, b, prec):
        from .errors import InternalMismatch
        raise InternalMismatch("twisted moment routes disagree")
    return a


def _twisted_moment_direct(mu, phi, m):
    ring = phi.ring
    n = phi.n
    L = ring.p**n
    step = ring.L // L
    dm = theta_operator(mu.lift_level(ring.n), m)
    acc = np.zeros(ring.dim, dtype=object)
    prec = dm.prec
    support = [(b, np.asarray(v, dtype=ring.dtype)) for b, v in ((b, phi.at(b)) for b in range(L)) if np.any(v)]
    for a in range(L):
        h = ring.zero()
        for b, v in support:
            h = h + v @ _rotation(ring, -a * b * step)
        h %= ring.mod
        if not np.any(h):
            continue
        val, pr = evaluate_at_root(dm, a, n) if n else (dm.coeffs[0], dm.prec)
        prec = min(prec, pr)
        acc = acc + ring.mul(h, val).astype(object)
    acc %= ring.p**prec
    if np.any(acc % L):
        raise DivisionNotExact("twisted moment not divisible by p^%d" % n)
    return (acc // L) % ring.p ** (prec - n)


def restrict_to_units(mu):
    ring = mu.ring if mu.ring.n >= 1 else mu.ring.with_level(1)
    return act(LocallyConstantFn.units_indicator(ring), mu.lift_level(ring.n))


def is_unit_supported(mu):
    r = restrict_to_units(mu)
    return r.equals(mu)


# ---------------------------------------------------------------- substitution laws


def frobenius_substitute(mu, n):
    """Phi(t^{p^n}) = sum_k c_k ((1+T)^{p^n} - 1)^k.

    A polynomial input yields the full polynomial of degree D p^n; otherwise
    the output keeps the input truncation.
    """
    R = mu.ring
    q = R.p**n
    D = mu.truncation
    Dout = D * q if mu.exact else D
    base = np.array([comb(q, i) % R.mod for i in range(1, min(q, Dout) + 1)], dtype=object)
    base = np.concatenate(([0], base))  # (1+T)^q - 1, truncated
    out = np.zeros((Dout + 1, R.dim), dtype=object)
    cur = np.zeros(Dout + 1, dtype=object)
    cur[0] = 1
    for k in range(D + 1):
        ck = mu.coeffs[k].astype(object)
        if np.any(ck):
            out += np.outer(cur, ck)
        cur = np.convolve(cur, base)[: Dout + 1] % R.mod
        if len(cur) < Dout + 1:
            cur = np.concatenate((cur, np.zeros(Dout + 1 - len(cur), dtype=object)))
    out %= R.mod
    return MeasureSeries(R, out.astype(R.dtype) if R.dtype is not object else out, mu.prec, mu.exact)


def verschiebung_root_evaluate(mu, u, n):
    """Phi(zeta_{p^n}^u); returns (value, precision)."""
    return evaluate_at_root(mu, u, n)


# ---------------------------------------------------------------- q-model


def q_model_measure(f, ring, orientation="geometric", D_series=None):
    """The q-model measure of a q-expansion.

    orientation "+": Phi = sum_j a(j) t^j (a polynomial in T).
    orientation "geometric": Phi = sum_j a(j) t^-j, expanded to degree
    ``D_series`` (binom(-j, k) coefficients); under this orientation
    act(phi, Phi_f) = Phi_{twist(f, phi^-)} with phi^-(x) = phi(-x).
    """
    R = ring
    D = f.truncation
    vals = [R.embed(f.coeffs[j]) for j in range(D + 1)]
    if orientation == "+":
        K = D + 1
        out = np.zeros((K, R.dim), dtype=object)
        for j in range(1, D + 1):
            v = vals[j].astype(object)
            if np.any(v):
                for k in range(j + 1):
                    out[k] += comb(j, k) * v
        if np.any(vals[0]):
            out[0] += vals[0].astype(object)
        out %= R.mod
        return MeasureSeries(R, out.astype(R.dtype) if R.dtype is not object else out, exact=True)
    if orientation != "geometric":
        raise ValueError("orientation must be '+' or 'geometric'")
    K = (D_series if D_series is not None else D) + 1
    out = np.zeros((K, R.dim), dtype=object)
    for j in range(0, D + 1):
        v = vals[j].astype(object)
        if not np.any(v):
            continue
        b = 1  # binom(-j, k) = (-1)^k binom(j + k - 1, k)
        for k in range(K):
            out[k] += b * v
            b = b * (-j - k) // (k + 1)
    out %= R.mod
    return MeasureSeries(R, out.astype(R.dtype) if R.dtype is not object else out, exact=(D == 0))


def act_precision_plan(ring, D, prec, n):
    """Series length needed so that act at level p^n is valid to degree D mod p^(prec - n)."""
    phi = (ring.p - 1) * ring.p ** (ring.n - 1) if ring.n else 1
    return D + phi * prec + 1


# ---------------------------------------------------------------- assembled measure


def assemble_cuspidal_measure(components, weights, tags=None):
    """Components dmu_j = weight_j * mu_j after checking each mu_j is unit-supported.

    ``components`` are MeasureSeries (q-model or otherwise), ``weights`` the
    values lambda_hat(A_j^-1) as ring elements or ints.
    """
    out = []
    tags = tags if tags is not None else list(range(len(components)))
    for tag, mu, w in zip(tags, components, weights):
        if not is_unit_supported(mu):
            raise NotDepleted("component %r is not supported on Z_p^x" % (tag,), component=str(tag))
        out.append((tag, mu.scale(w)))
    return out


def integrate(assembled, fn_per_component, m=0):
    """sum_j int fn_j(x) x^m dmu_j(x) for locally constant fn_j."""
    total = None
    for (tag, mu), fn in zip(assembled, fn_per_component):
        v = twisted_moment(mu, fn, m) if fn.n else moment(mu.scale(fn.at(0)), m)
        v = np.asarray(v, dtype=object)
        if total is None:
            total = v
        else:
            n = max(len(total), len(v))
            total = _pad1(total, n) + _pad1(v, n)
    return total


def _pad1(v, n):
    out = np.zeros(n, dtype=object)
    out[: len(v)] = v
    return out


# ---------------------------------------------------------------- self-test suites


def spanning_functions(ring, max_level=2):
    """Indicators of every ball b + p^n Z_p (1 <= n <= max_level) plus the Dirichlet characters mod p^n.

    Every locally constant function of level <= p^max_level is a linear
    combination of these indicators; the characters are included as a
    second, non-basis family.
    """
    from .heckechar import dirichlet_characters
    p = ring.p
    out = [("const", LocallyConstantFn.constant(ring))]
    for n in range(1, max_level + 1):
        for b in range(p**n):
            out.append(("1[%d+%d^%d]" % (b, p, n), LocallyConstantFn.indicator(ring, n, b)))
    for n in range(1, max_level + 1):
        for i, chi in enumerate(dirichlet_characters(p**n)):
            out.append(("chi%d mod %d" % (i, p**n), LocallyConstantFn.from_character(ring, chi)))
    return out


def random_series(ring, rng, max_degree=50):
    D = rng.randrange(1, max_degree + 1)
    return series_from_ints(ring, [rng.randrange(ring.mod) for _ in range(D + 1)])


def mahler_selftest(p, M=8, count=100, max_degree=50, per_series=3, seed=0, moments=(0, 1, 2)):
    """Randomised checks of the measure calculus.

    For ``count`` random polynomial series of degree <= max_degree:
    (a) moment(act(phi, mu), m) equals the Fourier-side twisted moment,
    (b) sum_b mu(b + p^n Z_p) = moment(mu, 0) for n = 1, 2,
    (c) act(phi phi') = act(phi) o act(phi').
    Each series meets ``per_series`` functions from the spanning set, rotated
    so that the whole set is covered; pairs for (c) are rotated the same way.
    Returns a JSON-ready summary; ``ok`` is true only if nothing failed.
    """
    import random
    rng = random.Random(seed)
    ring = PCoeffRing(p, M, 2)
    fns = spanning_functions(ring)
    res = {"a_twisted_moment": [0, 0], "b_ball_additivity": [0, 0], "c_act_multiplicative": [0, 0]}
    failures = []
    k = 0
    for i in range(count):
        mu = random_series(ring, rng, max_degree)
        for j in range(per_series):
            name, phi = fns[k % len(fns)]
            name2, phi2 = fns[(7 * k + 3) % len(fns)]
            k += 1
            tw = act(phi, mu)
            for m in moments:
                lhs = moment(tw, m)
                rhs = _twisted_moment_direct(mu, phi, m)
                ok = ring.equal(lhs, rhs, mu.prec - phi.n)
                res["a_twisted_moment"][0 if ok else 1] += 1
                if not ok:
                    failures.append({"series": i, "function": name, "m": m, "property": "a"})
            lhs = act(phi * phi2, mu)
            rhs = act(phi, act(phi2, mu))
            ok = lhs.equals(rhs)
            res["c_act_multiplicative"][0 if ok else 1] += 1
            if not ok:
                failures.append({"series": i, "functions": [name, name2], "property": "c"})
        total0 = moment(mu, 0)
        for n in (1, 2):
            acc = 0
            prec = mu.prec
            roots = root_values(mu, n)
            for b in range(p**n):
                v, pr = ball_measure(mu, b, n, roots)
                acc = acc + np.asarray(v, dtype=object)
                prec = min(prec, pr)
            ok = ring.equal(acc, total0, prec)
            res["b_ball_additivity"][0 if ok else 1] += 1
            if not ok:
                failures.append({"series": i, "n": n, "property": "b"})
    summary = {name: {"passed": v[0], "failed": v[1]} for name, v in res.items()}
    return {"p": p, "M": M, "count": count, "max_degree": max_degree, "seed": seed,
            "spanning_set_size": len(fns), "suites": summary, "failures": failures[:20],
            "ok": not failures}
