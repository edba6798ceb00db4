"""Arbitrary-precision integer primitives.

Everything here is a pure function of its arguments. Python integers carry
the big-number arithmetic; numpy is used for sieving and for batched trial
division of a single big integer by many small primes.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional, Union

import numpy as np

from .errors import DomainError, ResourceError

DEFAULT_SIEVE_LIMIT = 10**7
DEFAULT_TRIAL_BOUND = 10**4
DEFAULT_BUDGET = 10**7

# Jaeschke / Sorenson-Webster: the first twelve prime bases are exact below 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_DETERMINISTIC_BELOW = 1 << 64
_PROBABILISTIC_ROUNDS = 40
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


@dataclass(frozen=True)
class Certainty:
    """How sure we are that a number is prime."""

    kind: str  # "proven" or "probabilistic"
    error_bound: float = 0.0

    @property
    def proven(self) -> bool:
        return self.kind == "proven"

    def to_json(self) -> dict:
        if self.proven:
            return {"kind": "proven"}
        return {"kind": "probabilistic", "error_bound": self.error_bound}


PROVEN = Certainty("proven")
PROBABILISTIC = Certainty("probabilistic", 4.0 ** -_PROBABILISTIC_ROUNDS)


@dataclass(frozen=True)
class PrimalityResult:
    """Outcome of :func:`is_prime`; truthy iff the number is prime."""

    prime: bool
    certainty: Certainty

    def __bool__(self) -> bool:
        return self.prime

    @property
    def method(self) -> str:
        if self.certainty.proven:
            return "miller-rabin-deterministic"
        return f"miller-rabin-{_PROBABILISTIC_ROUNDS}-rounds"


@dataclass(frozen=True)
class PrimeFactor:
    value: int
    multiplicity: int = 1
    certainty: Certainty = PROVEN

    def __post_init__(self):
        if self.value < 2:
            raise DomainError(f"prime factor must be >= 2, got {self.value}")
        if self.multiplicity < 1:
            raise DomainError("multiplicity must be >= 1")


@dataclass(frozen=True)
class FactorSet:
    """A canonical (ascending) list of prime factors plus an unfactored cofactor.

    ``cofactor == 1`` means the factorization is complete.
    """

    factors: tuple = ()
    cofactor: int = 1

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        values = [f.value for f in self.factors]
        if any(a >= b for a, b in zip(values, values[1:])):
            raise DomainError("factor values must be strictly increasing")
        if self.cofactor < 1:
            raise DomainError("cofactor must be positive")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple], cofactor: int = 1) -> "FactorSet":
        """Build from ``(prime, multiplicity)`` pairs, merging duplicates."""
        merged: dict[int, int] = {}
        for p, e in pairs:
            merged[p] = merged.get(p, 0) + e
        factors = [PrimeFactor(p, e, is_prime(p).certainty) for p, e in sorted(merged.items())]
        return cls(tuple(factors), cofactor)

    @property
    def complete(self) -> bool:
        return self.cofactor == 1

    @property
    def value(self) -> int:
        """The number this set factors."""
        out = self.cofactor
        for f in self.factors:
            out *= f.value ** f.multiplicity
        return out

    @property
    def primes(self) -> list[int]:
        return [f.value for f in self.factors]

    def as_dict(self) -> dict[int, int]:
        return {f.value: f.multiplicity for f in self.factors}


class Budget:
    """A countdown of work units.

    One unit is a trial-division candidate or a modular multiplication inside
    rho or p - 1, so a budget tracks running time rather than step counts.

    Not thread-safe; each query should own its budget.
    """

    def __init__(self, units: int):
        if units < 0:
            raise DomainError("budget must be non-negative")
        self.initial = units
        self.remaining = units

    def spend(self, units: int = 1) -> bool:
        """Consume ``units`` if available; return False when exhausted."""
        if units > self.remaining:
            self.remaining = 0
            return False
        self.remaining -= units
        return True

    @property
    def exhausted(self) -> bool:
        return self.remaining <= 0

    @property
    def used(self) -> int:
        return self.initial - self.remaining


BudgetLike = Union[int, Budget, None]


def _as_budget(budget: BudgetLike) -> Budget:
    if isinstance(budget, Budget):
        return budget
    return Budget(DEFAULT_BUDGET if budget is None else budget)


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    """Return ``base**exponent mod modulus`` in [0, modulus)."""
    if modulus < 2:
        raise DomainError(f"modulus must be >= 2, got {modulus}")
    if exponent < 0:
        raise DomainError("exponent must be non-negative")
    return pow(base, exponent, modulus)


def _miller_rabin(n: int, bases: Iterable[int]) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in bases:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def is_prime(x: int) -> PrimalityResult:
    """Miller-Rabin primality test.

    Deterministic (fixed witness set) below 2**64; above that, 40 rounds with
    witnesses drawn from a PRNG seeded by ``x`` itself, so the verdict is
    reproducible and wrong with probability at most 2**-80.
    """
    if x < 2:
        return PrimalityResult(False, PROVEN)
    for p in _SMALL_PRIMES:
        if x % p == 0:
            return PrimalityResult(x == p, PROVEN)
    if x < _SMALL_PRIMES[-1] ** 2:
        return PrimalityResult(True, PROVEN)
    if x < _DETERMINISTIC_BELOW:
        return PrimalityResult(_miller_rabin(x, _MR_BASES), PROVEN)
    if not _miller_rabin(x, _MR_BASES):
        return PrimalityResult(False, PROVEN)
    rng = random.Random(x)
    bases = [rng.randrange(2, x - 1) for _ in range(_PROBABILISTIC_ROUNDS)]
    if not _miller_rabin(x, bases):
        return PrimalityResult(False, PROVEN)
    return PrimalityResult(True, PROBABILISTIC)


# --- sieving ---------------------------------------------------------------

def _sieve_bound(hi: int) -> int:
    # powers of two, so nearby requests share one cached table
    return max(1 << 16, 1 << (hi - 1).bit_length())


@lru_cache(maxsize=4)
def _prime_table(bound: int) -> np.ndarray:
    flags = np.ones(bound, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(bound - 1) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    primes = np.flatnonzero(flags).astype(np.int64)
    primes.flags.writeable = False
    return primes


def prime_array(lo: int, hi: int, limit: int = DEFAULT_SIEVE_LIMIT) -> np.ndarray:
    """numpy array of the primes in ``[lo, hi)`` (read-only view)."""
    if hi > limit:
        raise ResourceError(f"sieve bound {hi} exceeds limit {limit}")
    if hi <= lo:
        return np.empty(0, dtype=np.int64)
    table = _prime_table(_sieve_bound(hi))
    a, b = np.searchsorted(table, [lo, hi])
    return table[a:b]


def sieve_primes(lo: int, hi: int, limit: int = DEFAULT_SIEVE_LIMIT) -> list[int]:
    """Ascending list of the primes p with ``lo <= p < hi``."""
    if lo < 2 or hi <= lo:
        raise DomainError(f"need 2 <= lo < hi, got lo={lo}, hi={hi}")
    return prime_array(lo, hi, limit).tolist()


@lru_cache(maxsize=2)
def smallest_prime_factor_table(limit: int) -> np.ndarray:
    """``spf[k]`` is the least prime dividing k, for ``2 <= k < limit``."""
    spf = np.zeros(limit, dtype=np.int64)
    for p in range(2, limit):
        if p * p >= limit:
            break
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf.flags.writeable = False
    return spf


@lru_cache(maxsize=2)
def totient_table(limit: int) -> np.ndarray:
    """``phi[k]`` for ``0 <= k < limit`` (phi[0] is 0)."""
    phi = np.arange(limit, dtype=np.int64)
    for p in prime_array(2, limit, max(limit, DEFAULT_SIEVE_LIMIT)).tolist():
        phi[p::p] -= phi[p::p] // p
    phi.flags.writeable = False
    return phi


# --- trial division --------------------------------------------------------

_LIMB_BITS = 16


def residues_mod_many(x: int, moduli: np.ndarray) -> np.ndarray:
    """Compute ``x % r`` for every r in ``moduli`` (each below 2**31) at once.

    Horner's rule over 16-bit limbs keeps every intermediate below 2**47.
    """
    moduli = np.asarray(moduli, dtype=np.int64)
    if x < 0:
        raise DomainError("x must be non-negative")
    if moduli.size and int(moduli.max()) >= 1 << 31:
        raise DomainError("moduli must be below 2**31")
    nlimbs = max(1, -(-x.bit_length() // _LIMB_BITS))
    limbs = x.to_bytes(nlimbs * 2, "big")
    acc = np.zeros(moduli.shape, dtype=np.int64)
    for i in range(0, len(limbs), 2):
        limb = (limbs[i] << 8) | limbs[i + 1]
        acc = (acc * (1 << _LIMB_BITS) + limb) % moduli
    return acc


def trial_divide(x: int, candidates: np.ndarray) -> tuple[list[tuple[int, int]], int]:
    """Divide out every candidate prime from ``x``.

    Returns ``([(prime, multiplicity), ...], cofactor)`` in candidate order.
    """
    found = []
    if x == 1 or len(candidates) == 0:
        return found, x
    hits = np.asarray(candidates)[residues_mod_many(x, candidates) == 0]
    for r in hits.tolist():
        e = 0
        while x % r == 0:
            x //= r
            e += 1
        found.append((r, e))
    return found, x


def congruent_primes(d: int, bound: int, limit: int = DEFAULT_SIEVE_LIMIT) -> np.ndarray:
    """Primes r = 1 (mod d) below ``bound``."""
    primes = prime_array(2, min(bound, limit), limit)
    return primes[primes % d == 1]


# --- Pollard rho -----------------------------------------------------------

def brent_rho(
    n: int, budget: BudgetLike = None, c: int = 1, x0: int = 2, exponent: int = 2,
) -> Optional[int]:
    """Brent's variant of Pollard rho with iteration map x -> x^exponent + c.

    When every prime factor of n is 1 (mod k), the map x^k + c shrinks the
    expected cycle length by about sqrt(k - 1); pass ``exponent=k`` then.
    Returns a nontrivial factor of composite ``n``, or None if the budget runs
    out or the walk collapses.
    """
    budget = _as_budget(budget)
    if n % 2 == 0:
        return 2
    if exponent == 2:
        step = lambda v: (v * v + c) % n  # noqa: E731
    else:
        step = lambda v: (pow(v, exponent, n) + c) % n  # noqa: E731
    cost = mulmod_cost(exponent)
    y, r, q = x0, 1, 1
    g = 1
    block = 128
    x = ys = y
    while g == 1:
        x = y
        if not budget.spend(r * cost):
            return None
        for _ in range(r):
            y = step(y)
        k = 0
        while k < r and g == 1:
            ys = y
            steps = min(block, r - k)
            if not budget.spend(steps * (cost + 1)):
                return None
            for _ in range(steps):
                y = step(y)
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += steps
        r *= 2
    if g == n:
        while True:
            if not budget.spend(cost):
                return None
            ys = step(ys)
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g if 1 < g < n else None


def mulmod_cost(exponent: int) -> int:
    """Modular multiplications in one square-and-multiply pow(v, exponent, n)."""
    return max(1, exponent.bit_length() + bin(exponent).count("1") - 2)


def pollard_pm1(
    n: int, budget: BudgetLike = None, bound: int = 10**4, known: int = 1, base: int = 3,
) -> Optional[int]:
    """Stage-one Pollard p - 1 with smoothness bound ``bound``.

    ``known`` is a number dividing r - 1 for every prime r | n (d for factors
    of Phi_d(m)); it is folded into the exponent up front, so only the
    cofactor (r - 1)/known needs to be smooth.
    """
    budget = _as_budget(budget)
    if n % 2 == 0:
        return 2
    if not budget.spend(mulmod_cost(known)):
        return None
    a = pow(base, known, n)
    primes = prime_array(2, bound + 1, max(bound + 1, 1 << 16)).tolist()
    for i, ell in enumerate(primes):
        e = ell
        while e * ell <= bound:
            e *= ell
        if not budget.spend(mulmod_cost(e)):
            return None
        a = pow(a, e, n)
        if i % 256 == 255 or i == len(primes) - 1:
            g = math.gcd(a - 1, n)
            if g == n:
                return None
            if g > 1:
                return g
    return None


def integer_root(n: int, k: int) -> int:
    """Largest integer r with r**k <= n."""
    if n < 2:
        return n
    r = 1 << -(-n.bit_length() // k)
    while True:
        s = ((k - 1) * r + n // r ** (k - 1)) // k
        if s >= r:
            break
        r = s
    while r**k > n:
        r -= 1
    return r


def _split_composite(n: int, budget: Budget, exponent: int = 2,
                     pm1_bound: int = 0) -> Optional[int]:
    # perfect powers defeat rho; peel them off first
    for k in range(2, n.bit_length()):
        root = integer_root(n, k)
        if root < 2:
            break
        if root**k == n:
            return root
    if pm1_bound:
        f = pollard_pm1(n, budget, pm1_bound, known=exponent)
        if f is not None:
            return f
    for c in range(1, 64):
        f = brent_rho(n, budget, c=c, exponent=exponent)
        if f is not None:
            return f
        if budget.exhausted:
            return None
    return None


def factorize(
    x: int,
    budget: BudgetLike = None,
    *,
    trial_bound: int = DEFAULT_TRIAL_BOUND,
    congruence: Optional[int] = None,
    congruence_bound: int = 10**6,
    sieve_limit: int = DEFAULT_SIEVE_LIMIT,
) -> FactorSet:
    """Factor ``x`` by trial division then Brent rho.

    When ``x`` is known to divide a cyclotomic value Phi_d(m), pass
    ``congruence=d``: primes r = 1 (mod d) up to ``congruence_bound`` and the
    prime divisors of d are tried first, since those are the only candidates.

    Rho then iterates x -> x^d + c, which is valid because every remaining
    prime is 1 (mod d).

    A result with ``cofactor > 1`` is partial: the budget ran out before the
    cofactor could be split.
    """
    if x < 1:
        raise DomainError(f"cannot factor {x}")
    budget = _as_budget(budget)
    pairs: list[tuple[int, int]] = []

    def _trial(candidates):
        nonlocal x
        if x == 1 or len(candidates) == 0:
            return
        take = min(len(candidates), budget.remaining)
        budget.spend(take)
        found, x = trial_divide(x, candidates[:take])
        pairs.extend(found)

    rho_exponent = 2
    if congruence is not None and congruence > 1:
        rho_exponent = congruence if congruence % 2 == 0 else 2 * congruence
        exceptional = np.array(sorted(p for p, _ in _small_factor_pairs(congruence)), dtype=np.int64)
        _trial(exceptional)
        _trial(congruent_primes(congruence, congruence_bound, sieve_limit))
    _trial(prime_array(2, min(trial_bound, sieve_limit), sieve_limit))

    stack = [x] if x > 1 else []
    leftover = 1
    while stack:
        y = stack.pop()
        if y == 1:
            continue
        if is_prime(y):
            pairs.append((y, 1))
            continue
        f = None if budget.exhausted else _split_composite(y, budget, rho_exponent)
        if f is None:
            leftover *= y
            continue
        stack.extend((f, y // f))
    return FactorSet.from_pairs(pairs, leftover)


def _small_factor_pairs(x: int) -> list[tuple[int, int]]:
    """Exact factorization of a machine-size integer by trial division."""
    out = []
    p = 2
    while p * p <= x:
        if x % p == 0:
            e = 0
            while x % p == 0:
                x //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if x > 1:
        out.append((x, 1))
    return out


def _complete_factors(x: int, factors: Optional[FactorSet]) -> FactorSet:
    if factors is None:
        factors = factorize(x)
    if not factors.complete:
        raise DomainError(f"factorization of {x} is incomplete")
    if factors.value != x:
        raise DomainError(f"factor set multiplies to {factors.value}, not {x}")
    return factors


# --- multiplicative structure ------------------------------------------------

def euler_phi(d: int, factors: Optional[FactorSet] = None) -> int:
    """Euler's totient from a complete factorization of d."""
    if d < 1:
        raise DomainError("phi is defined for d >= 1")
    factors = _complete_factors(d, factors)
    phi = d
    for p in factors.primes:
        phi = phi // p * (p - 1)
    return phi


def omega(x: int, factors: Optional[FactorSet] = None) -> int:
    """Number of distinct prime factors of x."""
    if x < 1:
        raise DomainError("omega is defined for x >= 1")
    return len(_complete_factors(x, factors).factors)


def mobius(x: int, factors: Optional[FactorSet] = None) -> int:
    if x < 1:
        raise DomainError("mobius is defined for x >= 1")
    fs = _complete_factors(x, factors)
    if any(f.multiplicity > 1 for f in fs.factors):
        return 0
    return -1 if len(fs.factors) % 2 else 1


def divisors(x: int, factors: Optional[FactorSet] = None) -> list[int]:
    """All positive divisors of x in ascending order."""
    fs = _complete_factors(x, factors)
    divs = [1]
    for f in fs.factors:
        divs = [d * f.value**k for d in divs for k in range(f.multiplicity + 1)]
    return sorted(divs)


def multiplicative_order(m: int, r: int, factored_group_order: Optional[FactorSet] = None) -> int:
    """Order of m in the multiplicative group mod the prime r.

    Starts from r - 1 and strips each prime factor while the power stays 1.
    """
    if r < 2:
        raise DomainError("r must be >= 2")
    if math.gcd(m, r) != 1:
        raise DomainError(f"gcd({m}, {r}) != 1")
    fs = _complete_factors(r - 1, factored_group_order) if r > 2 else FactorSet()
    order = r - 1
    for f in fs.factors:
        for _ in range(f.multiplicity):
            if pow(m, order // f.value, r) == 1:
                order //= f.value
            else:
                break
    if pow(m, order, r) != 1:
        raise DomainError(f"{r} is not prime: m^(r-1) != 1")
    return order


def is_primitive_root(g: int, q: int, group_factors: Optional[FactorSet] = None) -> bool:
    """True iff g generates the multiplicative group mod the prime q."""
    if g % q == 0:
        return False
    fs = _complete_factors(q - 1, group_factors)
    return all(pow(g, (q - 1) // p, q) != 1 for p in fs.primes)


def cyclotomic_eval(d: int, m: int) -> int:
    """Phi_d(m) as an exact integer.

    Uses the divisor product over (m^e - 1)^mu(d/e): multiply the mu = +1
    terms, then divide exactly by the mu = -1 terms.
    """
    if d < 1:
        raise DomainError("d must be >= 1")
    if m < 2:
        raise DomainError("m must be >= 2")
    fs = FactorSet.from_pairs(_small_factor_pairs(d))
    num, den = 1, 1
    for e in divisors(d, fs):
        mu = mobius(d // e)
        if mu == 1:
            num *= m**e - 1
        elif mu == -1:
            den *= m**e - 1
    value, rem = divmod(num, den)
    assert rem == 0
    return value


def cyclotomic_mod(d: int, m: int, modulus: int) -> int:
    """Phi_d(m) mod a prime ``modulus``, without forming the full integer.

    Same divisor product as cyclotomic_eval, with modular inverses for the
    mu = -1 terms. Raises DomainError when one of those terms vanishes, which
    happens only if the multiplicative order of m divides a proper divisor of d.
    """
    if d < 1:
        raise DomainError("d must be >= 1")
    if m < 2:
        raise DomainError("m must be >= 2")
    if modulus < 2 or not is_prime(modulus):
        raise DomainError(f"modulus must be prime, got {modulus}")
    num, den = 1, 1
    fs = factorize(d)
    if not fs.complete:
        raise ResourceError(f"could not factor d={d}")
    for e in divisors(d, fs):
        mu = mobius(d // e, _fs_quotient(fs, e))
        term = (pow(m, e, modulus) - 1) % modulus
        if mu == 1:
            num = num * term % modulus
        elif mu == -1:
            den = den * term % modulus
    if den == 0:
        raise DomainError(f"degenerate prime {modulus} for Phi_{d}({m})")
    return num * pow(den, -1, modulus) % modulus


def _fs_quotient(fs: FactorSet, e: int) -> FactorSet:
    """Factorization of value/e, read off a complete factorization."""
    pairs = []
    for f in fs.factors:
        k = f.multiplicity
        while k and e % f.value == 0:
            e //= f.value
            k -= 1
        if k:
            pairs.append((f.value, k))
    return FactorSet.from_pairs(pairs)
