"""Modular arithmetic utilities: exact values against wide-integer references."""

import math
import random

import pytest

from shiftlab.errors import GuardError
from shiftlab.group_arith import (
    N_CAP,
    VAL_INF,
    Modulus,
    inv_pow2_mod,
    mul_mod,
    two_adic_valuation,
)


def test_modulus_classifies_pow2():
    m = Modulus(16)
    assert m.N == 16 and m.n == 4 and m.is_pow2 and not m.is_odd


def test_modulus_classifies_odd():
    m = Modulus(15)
    assert m.is_odd and not m.is_pow2
    assert m.n == 4  # bit length of N-1


def test_modulus_rejects_degenerate():
    with pytest.raises(GuardError):
        Modulus(1)
    with pytest.raises(GuardError):
        Modulus(0)


def test_modulus_rejects_oversized():
    with pytest.raises(GuardError):
        Modulus(N_CAP * 2)


def test_mul_mod_small():
    assert mul_mod(3, 5, Modulus(7)) == 1


def test_mul_mod_zero_absorbs():
    m = Modulus(12345)
    for x in (0, 1, 777, 12344):
        assert mul_mod(0, x, m) == 0
        assert mul_mod(x, 0, m) == 0


def test_mul_mod_wide():
    # 2^31 * 2^31 = 2^62 = 2*(2^61 - 1) + 2
    m = Modulus(2**61 - 1)
    assert mul_mod(2**31, 2**31, m) == 2


def test_mul_mod_random_against_bignum():
    rng = random.Random(101)
    for _ in range(10**5):
        N = rng.randrange(2, 2**61)
        a = rng.randrange(N)
        b = rng.randrange(N)
        assert mul_mod(a, b, Modulus(N)) == a * b % N


def test_inv_pow2_small():
    assert inv_pow2_mod(1, Modulus(15)) == 8
    for N in (3, 15, 101, 4001):
        assert inv_pow2_mod(0, Modulus(N)) == 1


def test_inv_pow2_million():
    t = inv_pow2_mod(5, Modulus(10**6 + 3))
    assert t == 656252
    assert t * 32 % (10**6 + 3) == 1


def test_inv_pow2_property():
    rng = random.Random(5)
    for _ in range(500):
        N = rng.randrange(3, 2**40) | 1
        j = rng.randrange(0, 64)
        t = inv_pow2_mod(j, Modulus(N))
        assert (t << j) % N == 1


def test_inv_pow2_rejects_even():
    with pytest.raises(GuardError):
        inv_pow2_mod(3, Modulus(16))


def test_two_adic_valuation():
    assert two_adic_valuation(12) == 2
    assert two_adic_valuation(1) == 0
    assert two_adic_valuation(96) == 5
    assert two_adic_valuation(0) == VAL_INF
    assert math.isinf(two_adic_valuation(0))
