"""Desk-scale RSA moduli and primitive roots."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import DomainError, ResourceError
from .numtheory import (
    DEFAULT_BUDGET,
    DEFAULT_SIEVE_LIMIT,
    euler_phi,
    factorize,
    is_prime,
    prime_array,
)

MIN_PRIME = 5
DEFAULT_BIT_CAP = 32
DEFAULT_ATTEMPTS = 10_000


def classify(p: int, q: int) -> bool:
    """True iff 2^(p-1) != 1 (mod q) or 2^(q-1) != 1 (mod p).

    These are the moduli for which the base-2 probe already works.
    """
    for x in (p, q):
        if not is_prime(x):
            raise DomainError(f"{x} is not prime")
        if x < MIN_PRIME:
            raise DomainError(f"primes must be >= {MIN_PRIME}, got {x}")
    if p >= q:
        raise DomainError(f"need p < q, got p={p}, q={q}")
    return pow(2, p - 1, q) != 1 or pow(2, q - 1, p) != 1


@dataclass(frozen=True)
class Modulus:
    """n = p*q together with its (secret) factorization.

    The factors are stored on purpose: this is a simulator, and the
    structured oracle needs them.
    """

    n: int
    p: int
    q: int
    D: int
    particular_case: bool

    def __post_init__(self):
        if not (MIN_PRIME <= self.p < self.q):
            raise DomainError(f"need {MIN_PRIME} <= p < q, got p={self.p}, q={self.q}")
        if self.n != self.p * self.q:
            raise DomainError("n != p*q")
        if self.D != math.gcd(self.p - 1, self.q - 1):
            raise DomainError("D != gcd(p-1, q-1)")
        if self.particular_case != classify(self.p, self.q):
            raise DomainError("particular_case flag does not match classify(p, q)")

    @classmethod
    def from_primes(cls, p: int, q: int) -> "Modulus":
        if p == q:
            raise DomainError("p and q must be distinct")
        p, q = min(p, q), max(p, q)
        return cls(p * q, p, q, math.gcd(p - 1, q - 1), classify(p, q))

    def to_json(self) -> dict:
        return {
            "n": str(self.n),
            "p": str(self.p),
            "q": str(self.q),
            "D": str(self.D),
            "particular_case": self.particular_case,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Modulus":
        return cls(
            int(data["n"]), int(data["p"]), int(data["q"]), int(data["D"]),
            bool(data["particular_case"]),
        )


def _prime_sampler(rng: random.Random, lo_bits: int, hi_bits: int, sieve_limit: int):
    lo = max(MIN_PRIME, 1 << (lo_bits - 1))
    hi = 1 << hi_bits
    if hi <= sieve_limit:
        pool = prime_array(lo, hi, sieve_limit)
        if len(pool) == 0:
            raise DomainError(f"no primes >= {MIN_PRIME} with {lo_bits}..{hi_bits} bits")
        return lambda: int(pool[rng.randrange(len(pool))])

    def draw():
        while True:
            x = rng.randrange(lo, hi) | 1
            if is_prime(x):
                return x

    return draw


def gen_modulus(
    rng_seed: int,
    bit_range: tuple[int, int] = (8, 16),
    require_particular: Optional[bool] = None,
    *,
    bit_cap: int = DEFAULT_BIT_CAP,
    max_attempts: int = DEFAULT_ATTEMPTS,
    sieve_limit: int = DEFAULT_SIEVE_LIMIT,
) -> Modulus:
    """Draw a reproducible RSA modulus whose primes have ``bit_range`` bits.

    With ``require_particular`` set, pairs are rejected until the
    particular-case flag matches.
    """
    lo_bits, hi_bits = bit_range
    if not 3 <= lo_bits <= hi_bits <= bit_cap:
        raise DomainError(f"need 3 <= lo_bits <= hi_bits <= {bit_cap}, got {bit_range}")
    rng = random.Random(rng_seed)
    draw = _prime_sampler(rng, lo_bits, hi_bits, sieve_limit)
    for _ in range(max_attempts):
        p, q = draw(), draw()
        if p == q:
            continue
        mod = Modulus.from_primes(p, q)
        if require_particular is None or mod.particular_case == require_particular:
            return mod
    raise ResourceError(f"no qualifying prime pair in {max_attempts} attempts")


@dataclass(frozen=True)
class PrimitiveRootReport:
    q: int
    g: int
    density: Fraction

    def to_json(self) -> dict:
        return {
            "q": str(self.q),
            "g": str(self.g),
            "density": f"{self.density.numerator}/{self.density.denominator}",
        }


def least_primitive_root(q: int, budget: int = DEFAULT_BUDGET) -> PrimitiveRootReport:
    """Scan g = 2, 3, 4, ... for the first generator of (Z/q)^*."""
    if q < 3 or not is_prime(q):
        raise DomainError(f"{q} is not an odd prime")
    group = factorize(q - 1, budget)
    if not group.complete:
        raise ResourceError(f"could not factor {q - 1} within budget")
    exponents = [(q - 1) // ell for ell in group.primes]
    g = 2
    while any(pow(g, e, q) == 1 for e in exponents):
        g += 1
    return PrimitiveRootReport(q, g, Fraction(euler_phi(q - 1, group), q - 1))
