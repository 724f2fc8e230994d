"""Exact integer helpers shared by every formula in the package.

Exponents in this domain are frequently towers (``C^(n^l)``, ``f^(a^(d-c))``),
so :func:`guarded_pow` returns :data:`OVERFLOW` instead of building an integer
with millions of digits.  ``OVERFLOW`` is an ordinary value that callers pass
along; it is never raised.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass


class NotCoprime(ValueError):
    pass


class NotPrime(ValueError):
    pass


class _Overflow:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "OVERFLOW"

    def __bool__(self):
        return False

    def __reduce__(self):
        return (_Overflow, ())


OVERFLOW = _Overflow()


def is_overflow(value) -> bool:
    return value is OVERFLOW


@dataclass(frozen=True)
class SizeGuard:
    max_bits: int = 4096
    max_tower_height: int = 3

    def __post_init__(self):
        if self.max_bits < 64:
            raise ValueError("max_bits must be at least 64")
        if self.max_tower_height < 1:
            raise ValueError("max_tower_height must be positive")


def default_guard() -> SizeGuard:
    """The default guard, with ``BS_TRIANGLE_MAX_BITS`` taken into account."""
    bits = os.environ.get("BS_TRIANGLE_MAX_BITS")
    return SizeGuard(max_bits=int(bits)) if bits else SizeGuard()


def gcd(m: int, n: int) -> int:
    return math.gcd(m, n)


def lcm(m: int, n: int) -> int:
    return math.lcm(m, n)


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    i = 3
    while i * i <= p:
        if p % i == 0:
            return False
        i += 2
    return True


def p_part(n: int, p: int) -> int:
    """Largest power of the prime ``p`` dividing ``n`` (``n >= 1``)."""
    if not is_prime(p):
        raise NotPrime(p)
    if n < 1:
        raise ValueError("p_part needs n >= 1")
    q = 1
    while n % p == 0:
        n //= p
        q *= p
    return q


def valuation(n: int, p: int) -> int:
    v = 0
    while n and n % p == 0:
        n //= p
        v += 1
    return v


def small_prime_factors(n: int, bound: int = 10**6) -> list[int]:
    """Distinct primes of ``|n|`` found by trial division up to ``bound``.

    A cofactor left over after the search is returned as well when it is
    below ``bound**2`` (and therefore prime).
    """
    n = abs(n)
    out = []
    p = 2
    while p * p <= n and p <= bound:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1 and (n < bound * bound or p * p > n):
        out.append(n)
    return out


def mod_inverse(a: int, m: int) -> int:
    """``alpha`` in ``[0, m)`` with ``alpha * a == 1 (mod m)``; 0 when ``m == 1``."""
    if m < 1:
        raise ValueError("modulus must be positive")
    if m == 1:
        return 0
    if math.gcd(a, m) != 1:
        raise NotCoprime(f"gcd({a}, {m}) = {math.gcd(a, m)}")
    return pow(a, -1, m)


def guarded_pow(base: int, exp: int, guard: SizeGuard | None = None):
    """``base ** exp`` or :data:`OVERFLOW` if the result would exceed ``guard.max_bits``."""
    guard = guard or default_guard()
    if is_overflow(base) or is_overflow(exp):
        return OVERFLOW
    if exp < 0:
        raise ValueError("negative exponent")
    if exp == 0:
        return 1
    if base in (0, 1):
        return base
    if base == -1:
        return -1 if exp & 1 else 1
    # bit length of |base|^exp lies in ((b-1)*exp, b*exp]
    if (abs(base).bit_length() - 1) * exp >= guard.max_bits:
        return OVERFLOW
    result = base ** exp
    if result.bit_length() > guard.max_bits:
        return OVERFLOW
    return result


def guarded_tower(base: int, *exps: int, guard: SizeGuard | None = None):
    """``base ** (exps[0] ** (exps[1] ** ...))`` evaluated right to left under the guard."""
    guard = guard or default_guard()
    if len(exps) > guard.max_tower_height:
        return OVERFLOW
    e = 1
    for x in reversed(exps):
        e = guarded_pow(x, e, guard)
        if is_overflow(e):
            return OVERFLOW
    return guarded_pow(base, e, guard)
