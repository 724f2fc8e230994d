import math

import pytest
from hypothesis import given, strategies as st

from bstriangle.arith import (
    OVERFLOW, NotCoprime, NotPrime, SizeGuard, default_guard, gcd, guarded_pow, guarded_tower,
    is_overflow, is_prime, lcm, mod_inverse, p_part, small_prime_factors, valuation,
)

PRIMES = [2, 3, 5, 7, 11, 13, 97]


def test_p_part_examples():
    assert p_part(567, 3) == 81
    assert p_part(567, 7) == 7
    assert p_part(8, 2) == 8
    assert p_part(8, 3) == 1


def test_p_part_rejects_composite():
    with pytest.raises(NotPrime):
        p_part(12, 4)


def test_mod_inverse_examples():
    assert mod_inverse(2, 27) == 14
    assert mod_inverse(1, 567) == 1
    assert mod_inverse(5, 1) == 0
    with pytest.raises(NotCoprime):
        mod_inverse(3, 27)


def test_is_prime_small():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@given(st.integers(1, 10**12), st.sampled_from(PRIMES))
def test_p_part_divides_and_cofactor_is_prime_free(n, p):
    q = p_part(n, p)
    assert n % q == 0 and (n // q) % p != 0
    assert q == p ** valuation(n, p)


@given(st.integers(-10**6, 10**6), st.integers(1, 10**6))
def test_mod_inverse_inverts(a, m):
    if math.gcd(a, m) != 1:
        with pytest.raises(NotCoprime):
            mod_inverse(a, m)
    else:
        assert (mod_inverse(a, m) * a - 1) % m == 0


@given(st.integers(1, 10**9))
def test_small_prime_factors_reconstruct(n):
    ps = small_prime_factors(n)
    assert all(is_prime(p) for p in ps)
    m = n
    for p in ps:
        m //= p_part(m, p)
    assert m == 1


@given(st.integers(-50, 50), st.integers(-50, 50))
def test_gcd_lcm(m, n):
    assert gcd(m, n) * lcm(m, n) == abs(m * n)


@given(st.integers(-1000, 1000), st.integers(0, 200))
def test_guarded_pow_matches_pow_or_overflows(base, exp):
    guard = SizeGuard(max_bits=256)
    r = guarded_pow(base, exp, guard)
    if is_overflow(r):
        assert (base ** exp).bit_length() > 256
    else:
        assert r == base ** exp


def test_guarded_tower():
    assert guarded_tower(2, 3, 2) == 2 ** 9
    assert guarded_tower(2, 2, 2, 2, 2) is OVERFLOW
    assert guarded_tower(10, 10, 10) is OVERFLOW
    assert not OVERFLOW


def test_default_guard_env(monkeypatch):
    assert default_guard().max_bits == 4096
    monkeypatch.setenv("BS_TRIANGLE_MAX_BITS", "128")
    assert default_guard().max_bits == 128
    assert guarded_pow(2, 200) is OVERFLOW
