"""Small elementary number theory helpers used across modules."""

from functools import lru_cache
from math import gcd

from sympy import factorint as _factorint
from sympy import isprime as _isprime


@lru_cache(maxsize=4096)
def factor(n):
    """Prime factorisation of a nonzero integer as a sorted tuple of (prime, exponent)."""
    return tuple(sorted(_factorint(abs(int(n))).items()))


def isprime(n):
    return bool(_isprime(int(n)))


def euler_phi(n):
    r = 1
    for p, e in factor(n):
        r *= p ** (e - 1) * (p - 1)
    return r


def kronecker(d, p):
    """Kronecker symbol (d/p) for a prime p."""
    if p == 2:
        if d % 2 == 0:
            return 0
        return 1 if d % 8 in (1, 7) else -1
    r = pow(d % p, (p - 1) // 2, p)
    return 0 if r == 0 else (1 if r == 1 else -1)


def kronecker_symbol(d, n):
    """Kronecker symbol (d/n) for a positive integer n (multiplicative in n)."""
    r = 1
    for p, e in factor(n):
        r *= kronecker(d, p) ** e
    return r


def sqrt_mod_prime(a, p):
    """All square roots of a modulo an odd prime p, sorted."""
    a %= p
    return sorted(x for x in range(p) if x * x % p == a)


def val(n, p):
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def lcm(*xs):
    r = 1
    for x in xs:
        r = r * x // gcd(r, x)
    return r


def ceil_div(a, b):
    return -((-a) // b)
