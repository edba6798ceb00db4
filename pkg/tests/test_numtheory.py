import math
import random

import numpy as np
import pytest
import sympy
from hypothesis import assume, example, given, settings
from hypothesis import strategies as st

from malleability.errors import DomainError, ResourceError
from malleability.numtheory import (
    Budget,
    FactorSet,
    PrimeFactor,
    brent_rho,
    cyclotomic_eval,
    cyclotomic_mod,
    divisors,
    euler_phi,
    factorize,
    integer_root,
    is_prime,
    mobius,
    mod_pow,
    mulmod_cost,
    multiplicative_order,
    pollard_pm1,
    omega,
    residues_mod_many,
    sieve_primes,
)


# --- mod_pow -------------------------------------------------------------------

@pytest.mark.parametrize("base, exponent, modulus, expected", [
    (2, 0, 7, 1),
    (2, 340, 341, 1),
    (2, 4, 7, 2),
])
def test_mod_pow_examples(base, exponent, modulus, expected):
    assert mod_pow(base, exponent, modulus) == expected


def test_mod_pow_square_and_multiply_oracle():
    # 341 is a base-2 Fermat pseudoprime: check by repeated multiplication
    acc = 1
    for _ in range(340):
        acc = acc * 2 % 341
    assert acc == 1


@pytest.mark.parametrize("modulus", [1, 0, -5])
def test_mod_pow_rejects_small_modulus(modulus):
    with pytest.raises(DomainError):
        mod_pow(2, 3, modulus)


@given(st.integers(-10**30, 10**30), st.integers(0, 500), st.integers(2, 10**20))
def test_mod_pow_range(base, exponent, modulus):
    out = mod_pow(base, exponent, modulus)
    assert 0 <= out < modulus
    assert out == base**exponent % modulus


# --- is_prime ------------------------------------------------------------------

def test_is_prime_examples():
    assert not is_prime(1)
    assert not is_prime(341)
    assert is_prime(86171)
    assert is_prime(86171).certainty.proven


def test_trial_division_oracle_for_examples():
    assert [d for d in range(2, 19) if 341 % d == 0] == [11]
    assert all(86171 % d for d in range(2, math.isqrt(86171) + 1))


@pytest.mark.parametrize("n", [
    561, 1105, 1729, 2047, 3215031751, 2152302898747, 3474749660383,
    341550071728321, 3825123056546413051, 318665857834031151167461,
])
def test_is_prime_rejects_pseudoprimes(n):
    assert not is_prime(n)


def test_large_prime_is_probabilistic_with_tiny_error():
    p = 2**127 - 1
    res = is_prime(p)
    assert res
    assert not res.certainty.proven
    assert res.certainty.error_bound <= 2.0**-80


def test_is_prime_below_2_64_is_proven():
    assert is_prime(2**61 - 1).certainty.proven
    assert is_prime(18446744073709551557).certainty.proven  # largest prime < 2^64


@settings(max_examples=500)
@given(st.integers(1, 2**72))
def test_is_prime_matches_sympy(x):
    assert bool(is_prime(x)) == sympy.isprime(x)


# --- sieve ---------------------------------------------------------------------

def test_sieve_examples():
    assert sieve_primes(2, 3) == [2]
    primes = sieve_primes(100, 200)
    assert len(primes) == 21 and primes[0] == 101 and primes[-1] == 199
    assert sieve_primes(24, 29) == []


@given(st.integers(2, 5000), st.integers(1, 3000))
def test_sieve_matches_sympy(lo, width):
    assert sieve_primes(lo, lo + width) == list(sympy.primerange(lo, lo + width))


def test_sieve_limit():
    with pytest.raises(ResourceError):
        sieve_primes(2, 1001, limit=1000)
    with pytest.raises(DomainError):
        sieve_primes(10, 10)


# --- factorization -------------------------------------------------------------

def test_factorize_one():
    fs = factorize(1)
    assert fs.factors == () and fs.cofactor == 1


def test_factorize_cyclotomic_examples():
    fs = factorize(2**35 + 1)
    assert fs.as_dict() == {3: 1, 11: 1, 43: 1, 281: 1, 86171: 1}
    assert fs.value == 34359738369
    assert factorize(44287).as_dict() == {67: 1, 661: 1}
    assert 44287 == (3**11 + 1) // 4


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 10**24))
@example(2**64 + 1)
@example(3**40)
@example(1000003**2 * 999983)
def test_factorization_roundtrip(x):
    fs = factorize(x)
    assert fs.complete
    assert fs.value == x
    assert fs.as_dict() == sympy.factorint(x)


def test_partial_factorization_keeps_product():
    x = 1000000007 * 998244353 * 6
    fs = factorize(x, budget=0)
    assert not fs.complete
    assert fs.value == x


def test_congruence_hint_uses_structure():
    value = cyclotomic_eval(62, 3)
    fs = factorize(value, congruence=62)
    assert fs.complete and fs.value == value
    assert all(r % 62 == 1 or 62 % r == 0 for r in fs.primes)


def test_factor_set_invariants():
    with pytest.raises(DomainError):
        FactorSet((PrimeFactor(5), PrimeFactor(3)))
    with pytest.raises(DomainError):
        PrimeFactor(1)
    with pytest.raises(DomainError):
        PrimeFactor(7, 0)


def test_brent_rho_splits_semiprime():
    n = 1000003 * 1000033
    f = brent_rho(n, Budget(10**6))
    assert f in (1000003, 1000033)


def test_brent_rho_cyclotomic_map():
    # both factors are 1 mod 206, so x^206 + c walks a much smaller image
    a, b = 100001053, 10000000141
    assert a % 206 == 1 and b % 206 == 1
    plain, structured = Budget(10**6), Budget(10**6)
    assert brent_rho(a * b, plain) in (a, b)
    assert brent_rho(a * b, structured, exponent=206) in (a, b)
    assert structured.used < plain.used


def test_brent_rho_respects_budget():
    budget = Budget(10)
    assert brent_rho(1000003 * 1000033, budget) is None
    assert budget.exhausted


def test_pollard_pm1_smooth_factor():
    # 1000003 - 1 = 2 * 3 * 166667; b is a safe prime, so b - 1 is never smooth
    a, b = 1000003, 1099511628443
    assert sympy.isprime((b - 1) // 2)
    assert pollard_pm1(a * b, Budget(10**6), bound=10**4) is None
    assert pollard_pm1(a * b, Budget(10**6), bound=10**4, known=166667) == a
    # r = 1 (mod 206) with (r - 1)/206 = 2 * 3^2 * 149 * 181: smooth once 206 is folded in
    r = 100001053
    assert pollard_pm1(r * b, Budget(10**6), bound=200, known=206) == r


def test_pollard_pm1_budget():
    budget = Budget(5)
    assert pollard_pm1(1000003 * 1099511628443, budget, bound=10**4, known=166667) is None
    assert budget.exhausted


@pytest.mark.parametrize("e, cost", [(2, 1), (3, 2), (4, 2), (538, 12), (1, 1)])
def test_mulmod_cost(e, cost):
    assert mulmod_cost(e) == cost


@given(st.integers(0, 2**200), st.integers(2, 40))
def test_integer_root(n, k):
    r = integer_root(n, k)
    assert r**k <= n < (r + 1) ** k


@given(st.integers(0, 2**300), st.lists(st.integers(2, 2**31 - 1), min_size=1, max_size=30))
def test_residues_mod_many(x, moduli):
    out = residues_mod_many(x, np.array(moduli))
    assert out.tolist() == [x % r for r in moduli]


# --- multiplicative structure --------------------------------------------------

@pytest.mark.parametrize("m, r, expected", [(1, 7, 1), (2, 31, 5), (3, 31, 30)])
def test_multiplicative_order_examples(m, r, expected):
    assert multiplicative_order(m, r, factorize(r - 1)) == expected


def test_multiplicative_order_exhaustive_oracle():
    for m, r in [(2, 31), (3, 31)]:
        brute = next(k for k in range(1, r) if pow(m, k, r) == 1)
        assert multiplicative_order(m, r) == brute


def test_multiplicative_order_errors():
    with pytest.raises(DomainError):
        multiplicative_order(31, 31)
    incomplete = FactorSet((PrimeFactor(2),), cofactor=15)
    with pytest.raises(DomainError):
        multiplicative_order(3, 31, incomplete)
    with pytest.raises(DomainError):
        multiplicative_order(3, 31, factorize(28))


@settings(max_examples=200)
@given(st.integers(3, 10**5), st.integers(1, 10**6))
def test_order_divides_group_order(r, m):
    assume(sympy.isprime(r) and m % r)
    k = multiplicative_order(m, r)
    assert (r - 1) % k == 0
    assert k == sympy.n_order(m, r)


@pytest.mark.parametrize("d, expected", [(1, 1), (30, 8), (341, 300)])
def test_euler_phi_examples(d, expected):
    assert euler_phi(d, factorize(d)) == expected


@given(st.integers(1, 10**9))
def test_euler_phi_matches_sympy(d):
    assert euler_phi(d) == sympy.totient(d)


def test_euler_phi_incomplete():
    with pytest.raises(DomainError):
        euler_phi(30, FactorSet((PrimeFactor(2),), cofactor=15))


def test_small_helpers():
    assert omega(30) == 3 and omega(2) == 1 and omega(1) == 0
    assert [mobius(k) for k in range(1, 11)] == [sympy.mobius(k) for k in range(1, 11)]
    assert divisors(60) == sympy.divisors(60)


# --- cyclotomic values ----------------------------------------------------------

@given(st.integers(2, 10**6))
def test_cyclotomic_phi2(m):
    assert cyclotomic_eval(2, m) == m + 1


def test_cyclotomic_examples():
    assert cyclotomic_eval(10, 2) == 2**4 - 2**3 + 2**2 - 2 + 1 == 11
    assert cyclotomic_eval(14, 2) == 43


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 400), st.integers(2, 50))
def test_cyclotomic_matches_sympy(d, m):
    x = sympy.Symbol("x")
    assert cyclotomic_eval(d, m) == sympy.cyclotomic_poly(d, x).subs(x, m)


PAIRS = [(5, 7), (5, 11), (11, 31), (7, 13), (13, 17)]


@pytest.mark.parametrize("p, q", PAIRS)
@pytest.mark.parametrize("m", [2, 3, 6, 10])
def test_cyclotomic_product_identity(p, q, m):
    n = p * q
    prod = cyclotomic_eval(2, m) * cyclotomic_eval(2 * p, m) * cyclotomic_eval(2 * q, m)
    prod *= cyclotomic_eval(2 * n, m)
    assert prod == m**n + 1


@pytest.mark.parametrize("p, q", [(10007, 10009), (65521, 65537), (1009, 99991)])
def test_cyclotomic_product_identity_modular(p, q):
    rng = random.Random(p * q)
    n = p * q
    for _ in range(5):
        P = sympy.randprime(2**61, 2**62)
        m = rng.randrange(2, 1000)
        lhs = 1
        for d in (2, 2 * p, 2 * q, 2 * n):
            lhs = lhs * cyclotomic_mod(d, m, P) % P
        assert lhs == (pow(m, n, P) + 1) % P


def test_cyclotomic_mod_matches_exact():
    for d in (1, 2, 10, 14, 22, 105, 210):
        for m in (2, 3, 7):
            assert cyclotomic_mod(d, m, 1000003) == cyclotomic_eval(d, m) % 1000003


# --- identities the reduction leans on ------------------------------------------

@settings(max_examples=300)
@given(st.integers(2, 1000), st.integers(1, 499))
def test_quotient_coprime_to_m_plus_one(m, half):
    n = 2 * half + 1
    assume(math.gcd(m + 1, n) == 1)
    quotient, rem = divmod(m**n + 1, m + 1)
    assert rem == 0
    assert math.gcd(quotient, m + 1) == 1
    assert quotient % (m + 1) == n % (m + 1)


@pytest.mark.parametrize("n", [35, 55, 77, 341, 10403, 1000003 * 1000033])
def test_three_divides_nine_does_not(n):
    assert pow(2, n, 9) in (2, 5)
    assert (pow(2, n, 9) + 1) % 3 == 0
    assert (pow(2, n, 9) + 1) % 9 != 0
