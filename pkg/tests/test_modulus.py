import math
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from malleability.errors import DomainError, ResourceError
from malleability.modulus import (
    Modulus,
    classify,
    gen_modulus,
    least_primitive_root,
)
from malleability.numtheory import multiplicative_order, sieve_primes


@pytest.mark.parametrize("p, q, expected", [(5, 7, True), (11, 31, False), (5, 11, True)])
def test_classify_examples(p, q, expected):
    assert classify(p, q) is expected


def test_classify_premises_by_hand():
    assert 2**4 % 7 == 2
    assert 2**10 % 31 == 1 and 2**30 % 11 == 1
    assert 2**4 % 11 == 5


@pytest.mark.parametrize("p, q", [(4, 7), (5, 9), (3, 7), (7, 5), (7, 7)])
def test_classify_rejects(p, q):
    with pytest.raises(DomainError):
        classify(p, q)


def test_modulus_invariants_and_json():
    mod = Modulus.from_primes(7, 5)
    assert (mod.n, mod.p, mod.q, mod.D, mod.particular_case) == (35, 5, 7, 2, True)
    doc = mod.to_json()
    assert doc == {"n": "35", "p": "5", "q": "7", "D": "2", "particular_case": True}
    assert Modulus.from_json(doc) == mod
    with pytest.raises(DomainError):
        Modulus.from_primes(7, 7)
    with pytest.raises(DomainError):
        Modulus(35, 5, 7, 2, False)
    with pytest.raises(DomainError):
        Modulus(36, 5, 7, 2, True)


def test_forced_pseudoprime_pair():
    mod = Modulus.from_primes(11, 31)
    assert not mod.particular_case
    assert pow(2, mod.n - 1, mod.n) == 1


def test_gen_small_particular():
    mod = gen_modulus(1, (3, 4), require_particular=True)
    assert mod.p in (5, 7, 11, 13) and mod.q in (7, 11, 13)
    assert mod.particular_case


def test_gen_is_seeded():
    a = gen_modulus(42, (8, 8))
    assert a == gen_modulus(42, (8, 8))
    assert a.to_json() == gen_modulus(42, (8, 8)).to_json()
    assert 128 <= a.p < a.q < 256


def test_gen_large_bits_uses_miller_rabin():
    mod = gen_modulus(7, (30, 32))
    assert sympy.isprime(mod.p) and sympy.isprime(mod.q)
    assert mod.q.bit_length() <= 32


def test_gen_rejects_bad_ranges():
    with pytest.raises(DomainError):
        gen_modulus(1, (2, 8))
    with pytest.raises(DomainError):
        gen_modulus(1, (9, 8))
    with pytest.raises(DomainError):
        gen_modulus(1, (8, 40))


def test_gen_attempt_budget():
    # among 3-bit primes {5, 7} every pair is particular
    with pytest.raises(ResourceError):
        gen_modulus(1, (3, 3), require_particular=False, max_attempts=50)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**64 - 1), st.integers(4, 16))
def test_generated_moduli_satisfy_invariants(seed, bits):
    mod = gen_modulus(seed, (4, bits))
    assert mod.D % 2 == 0 and mod.D == math.gcd(mod.p - 1, mod.q - 1)
    if not mod.particular_case:
        assert (mod.p - 1) % multiplicative_order(2, mod.q) == 0
        assert (mod.q - 1) % multiplicative_order(2, mod.p) == 0
        assert pow(2, mod.n - 1, mod.n) == 1
    if mod.D < math.log2(mod.n):
        assert mod.particular_case


def test_pseudoprime_implication_exhaustive():
    primes = sieve_primes(5, 400)
    for i, p in enumerate(primes):
        for q in primes[i + 1:]:
            if not classify(p, q):
                assert pow(2, p * q - 1, p * q) == 1
            if math.gcd(p - 1, q - 1) < math.log2(p * q):
                assert classify(p, q)


@pytest.mark.parametrize("q, g", [(3, 2), (7, 3), (31, 3)])
def test_least_primitive_root_examples(q, g):
    assert least_primitive_root(q).g == g


def test_primitive_root_premises():
    assert pow(2, 3, 7) == 1
    assert multiplicative_order(2, 31) == 5


def test_least_primitive_root_matches_sympy():
    for q in sieve_primes(3, 3000):
        rep = least_primitive_root(q)
        assert rep.g == sympy.primitive_root(q)
        assert rep.g % q != 0
        assert multiplicative_order(rep.g, q) == q - 1
        assert all(multiplicative_order(a, q) < q - 1 for a in range(2, rep.g))
        assert rep.density == Fraction(int(sympy.totient(q - 1)), q - 1)


def test_least_primitive_root_errors():
    with pytest.raises(DomainError):
        least_primitive_root(9)
    with pytest.raises(DomainError):
        least_primitive_root(2)
    assert least_primitive_root(65537).to_json() == {"q": "65537", "g": "3", "density": "1/2"}
