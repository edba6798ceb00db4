"""Simulated factoring oracle for probes m^n + 1.

A probe is the pair (c, m) where c is the bit string of 2^n + 1. Read in
base m the same digits give m^n + 1, so one encoding serves every base.
The oracle answers with residues mod n of certified prime factors of
m^n + 1, or with bottom.

Two realizations are provided:

* :class:`StructuredOracle` knows p and q. Since m^n + 1 is the product of
  Phi_2(m), Phi_2p(m), Phi_2q(m) and Phi_2pq(m), it only has to hunt the two
  low-degree middle factors, whose primes are all 1 mod 2p (resp. 2q).
* :class:`HonestOracle` knows nothing: it materializes m^n + 1 and factors it
  outright, which is only feasible for tiny n.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .modulus import Modulus
from .numtheory import (
    DEFAULT_SIEVE_LIMIT,
    Budget,
    Certainty,
    congruent_primes,
    cyclotomic_eval,
    factorize,
    is_prime,
    omega,
    pollard_pm1,
    trial_divide,
)

HONEST_N_CAP = 64
DEFAULT_ORACLE_BUDGET = 10**7
RHO_FIRST_SLICE = 1 << 12
PM1_BOUND = 10**5


@dataclass(frozen=True)
class ProbeEncoding:
    """The bit string c of 2^n + 1 together with the base m."""

    bits: str
    m: int

    def __post_init__(self):
        b = self.bits
        if len(b) < 3 or b[0] != "1" or b[-1] != "1" or set(b[1:-1]) - {"0"}:
            raise DomainError("probe bits must be 1 0...0 1")
        if self.m < 2:
            raise DomainError("probe base m must be >= 2")

    @property
    def n(self) -> int:
        return len(self.bits) - 1

    @property
    def value(self) -> int:
        """m^n + 1, i.e. the bit string read as base-m digits."""
        return int(self.bits, self.m) if self.m <= 36 else self.m**self.n + 1


def encode_probe(n: int, m: int) -> ProbeEncoding:
    if n < 3 or n % 2 == 0:
        raise DomainError(f"n must be odd and >= 3, got {n}")
    return ProbeEncoding("1" + "0" * (n - 1) + "1", m)


def decode_probe(probe: ProbeEncoding) -> tuple[int, int]:
    return probe.n, probe.m


@dataclass(frozen=True)
class Witness:
    """A certified prime factor r of the probe value and its class mod n."""

    r: int
    residue: int
    certainty: Certainty
    source: str

    @property
    def proof_method(self) -> str:
        if self.certainty.proven:
            return "miller-rabin-deterministic"
        return f"miller-rabin-probabilistic(err<={self.certainty.error_bound:.3g})"

    def to_json(self) -> dict:
        return {
            "r": str(self.r),
            "residue": str(self.residue),
            "proof_method": self.proof_method,
            "source": self.source,
        }


@dataclass(frozen=True)
class OracleResponse:
    """Either a set S of residues (with their witnesses) or bottom.

    ``pool`` holds every prime factor the oracle certified, S or not.
    """

    n: int
    m: int
    mode: str
    witnesses: Optional[tuple] = None
    pool: tuple = ()

    @property
    def bottom(self) -> bool:
        return self.witnesses is None

    @property
    def S(self) -> frozenset:
        if self.bottom:
            return frozenset()
        return frozenset(w.residue for w in self.witnesses)

    def to_json(self) -> dict:
        out = {"n": str(self.n), "m": str(self.m), "mode": self.mode}
        if self.bottom:
            out["bottom"] = True
        else:
            out["S"] = [str(s) for s in sorted(self.S)]
            out["witnesses"] = [w.to_json() for w in self.witnesses]
        if self.pool:
            out["pool"] = [w.to_json() for w in self.pool]
        return out

    def summary(self) -> str:
        if self.bottom:
            return "bottom"
        return "S=" + ",".join(str(s) for s in sorted(self.S))


def compute_Sm(m: int, n: int) -> frozenset:
    """Residues mod n of the distinct primes dividing m + 1."""
    if m < 2:
        raise DomainError("m must be >= 2")
    return frozenset(r % n for r in factorize(m + 1).primes)


def target_size(m: int) -> int:
    return omega(m) + 2


def excluded_residues(m: int, n: int) -> frozenset:
    return compute_Sm(m, n) | {1 % n}


def assemble(found: list, m: int, n: int, relaxed: bool = False) -> Optional[tuple]:
    """Pick S from witnesses listed in discovery order.

    S always contains the first witness outside S_m u {1}; remaining slots are
    filled in discovery order with distinct residues. In strict mode S must
    reach omega(m) + 2 elements; relaxed mode returns every distinct residue.
    """
    excluded = excluded_residues(m, n)
    useful = next((w for w in found if w.residue not in excluded), None)
    if useful is None:
        return None
    target = len(found) if relaxed else target_size(m)
    chosen = {useful.residue: useful}
    for w in found:
        if len(chosen) >= target:
            break
        chosen.setdefault(w.residue, w)
    if not relaxed and len(chosen) < target:
        return None
    order = {id(w): i for i, w in enumerate(found)}
    return tuple(sorted(chosen.values(), key=lambda w: order[id(w)]))


def _witness(r: int, n: int, source: str) -> Witness:
    return Witness(r, r % n, is_prime(r).certainty, source)


class StructuredOracle:
    """Privileged oracle that exploits the secret factorization of n."""

    mode = "structured"

    def __init__(
        self,
        secret: Modulus,
        budget: int = DEFAULT_ORACLE_BUDGET,
        *,
        relaxed: bool = False,
        trial_bound: int = DEFAULT_SIEVE_LIMIT,
        sieve_limit: int = DEFAULT_SIEVE_LIMIT,
    ):
        self._secret = secret
        self.n = secret.n
        self.budget = budget
        self.relaxed = relaxed
        self.trial_bound = min(trial_bound, sieve_limit)
        self.sieve_limit = sieve_limit

    def query(self, probe: ProbeEncoding) -> OracleResponse:
        return structured_query(
            probe, self._secret, self.budget, relaxed=self.relaxed,
            trial_bound=self.trial_bound, sieve_limit=self.sieve_limit,
        )


class HonestOracle:
    """Unprivileged oracle: factors m^n + 1 from scratch."""

    mode = "honest"

    def __init__(self, budget: int = DEFAULT_ORACLE_BUDGET, *, relaxed: bool = False,
                 n_cap: int = HONEST_N_CAP):
        self.budget = budget
        self.relaxed = relaxed
        self.n_cap = n_cap

    def query(self, probe: ProbeEncoding) -> OracleResponse:
        return honest_query(probe, self.budget, relaxed=self.relaxed, n_cap=self.n_cap)


def _extend(found: list, primes, n: int, source: str) -> None:
    seen = {w.r for w in found}
    found.extend(_witness(r, n, source) for r in primes if r not in seen)


def _trial_phase(value: int, d: int, budget: Budget, trial_bound: int, sieve_limit: int):
    """Divide out exceptional primes of d and primes = 1 (mod d) below the bound."""
    exceptional = np.array([ell for ell in (2, d // 2) if d % ell == 0], dtype=np.int64)
    candidates = np.concatenate([exceptional, congruent_primes(d, trial_bound, sieve_limit)])
    take = min(len(candidates), budget.remaining)
    budget.spend(take)
    found, cofactor = trial_divide(value, candidates[:take])
    primes = sorted(r for r, _ in found)
    if cofactor > 1 and is_prime(cofactor):
        primes.append(cofactor)
        cofactor = 1
    return primes, cofactor


def _pm1_phase(cofactor: int, d: int, budget: Budget, bound: int):
    """One p - 1 split of a composite cofactor of Phi_d(m)."""
    f = pollard_pm1(cofactor, budget, bound, known=d)
    if f is None:
        return [], cofactor
    primes, rest = [], 1
    for piece in (f, cofactor // f):
        if is_prime(piece):
            primes.append(piece)
        else:
            rest *= piece
    return sorted(primes), rest


def structured_query(
    probe: ProbeEncoding,
    secret: Modulus,
    budget: int = DEFAULT_ORACLE_BUDGET,
    *,
    relaxed: bool = False,
    trial_bound: int = DEFAULT_SIEVE_LIMIT,
    sieve_limit: int = DEFAULT_SIEVE_LIMIT,
) -> OracleResponse:
    """Answer a probe using the secret primes.

    Collects the primes of m + 1, then the smallest primes of Phi_2p(m) and
    Phi_2q(m) found by structured trial division (plus a primality check on
    the leftover cofactor), and finally rho on those cofactors, sharing the
    budget between them in doubling slices. Stops as soon
    as a valid S can be assembled. Phi_2pq(m) is never touched.
    """
    n, m = decode_probe(probe)
    if n != secret.n:
        raise DomainError(f"probe encodes n={n}, oracle holds n={secret.n}")
    p, q = secret.p, secret.q
    work = Budget(budget)
    bottom = OracleResponse(n, m, "structured")
    if work.exhausted:
        return bottom

    head = factorize(m + 1, work)
    if not head.complete:
        return bottom
    found = [_witness(r, n, "m+1") for r in head.primes]

    def attempt():
        S = assemble(found, m, n, relaxed)
        return None if S is None else OracleResponse(n, m, "structured", S, tuple(found))

    parts = []
    for ell in (p, q):
        d = 2 * ell
        value = cyclotomic_eval(d, m)
        primes, cofactor = _trial_phase(value, d, work, trial_bound, sieve_limit)
        _extend(found, primes, n, f"phi_{d}")
        parts.append((d, cofactor))
        if resp := attempt():
            return resp
    # p - 1 catches factors r with (r - 1)/d smooth, cheaply
    for i, (d, cofactor) in enumerate(parts):
        if cofactor > 1:
            primes, cofactor = _pm1_phase(cofactor, d, work, PM1_BOUND)
            parts[i] = (d, cofactor)
            _extend(found, primes, n, f"phi_{d}")
            if resp := attempt():
                return resp
    # rho on the leftover cofactors, alternating parts with doubling slices
    pending = [(d, c) for d, c in parts if c > 1]
    share = RHO_FIRST_SLICE
    while pending and not work.exhausted:
        still = []
        for d, cofactor in pending:
            slice_ = Budget(min(share, work.remaining))
            rest = factorize(cofactor, slice_, trial_bound=0, congruence=d, congruence_bound=0)
            work.spend(slice_.used)
            _extend(found, rest.primes, n, f"phi_{d}")
            if resp := attempt():
                return resp
            if rest.cofactor > 1:
                still.append((d, rest.cofactor))
        pending = still
        share *= 2
    return attempt() or bottom


def honest_query(
    probe: ProbeEncoding,
    budget: int = DEFAULT_ORACLE_BUDGET,
    *,
    relaxed: bool = False,
    n_cap: int = HONEST_N_CAP,
) -> OracleResponse:
    """Answer a probe by fully factoring m^n + 1.

    The response's ``pool`` lists every prime factor found; S is assembled
    from the primes of m + 1 first, then the rest in ascending order.
    """
    n, m = decode_probe(probe)
    if n > n_cap:
        raise DomainError(f"honest oracle handles n <= {n_cap}, got {n}")
    work = Budget(budget)
    if work.exhausted:
        return OracleResponse(n, m, "honest")
    fs = factorize(probe.value, work)
    head = [r for r in fs.primes if (m + 1) % r == 0]
    tail = [r for r in fs.primes if (m + 1) % r != 0]
    pool = tuple(_witness(r, n, "m+1" if r in head else "full") for r in head + tail)
    S = assemble(list(pool), m, n, relaxed)
    return OracleResponse(n, m, "honest", S, pool)


def order_dichotomy_holds(r: int, m: int, p: int, q: int) -> bool:
    """For a prime r | m^n + 1 with r not dividing m^2 - 1: p | r-1 or q | r-1."""
    if (m * m - 1) % r == 0:
        return True
    return (r - 1) % p == 0 or (r - 1) % q == 0


def is_sound(response: OracleResponse) -> bool:
    """Every witness is a certified prime with m^n = -1 (mod r) and the right residue."""
    if response.bottom:
        return True
    for w in response.witnesses + response.pool:
        if not is_prime(w.r) or w.residue != w.r % response.n:
            return False
        if pow(response.m, response.n, w.r) != w.r - 1:
            return False
    return True


def is_valid(response: OracleResponse, relaxed: bool = False) -> bool:
    """S obeys the size rule and is not contained in S_m u {1}."""
    if response.bottom:
        return False
    S = response.S
    if len(S) != len(response.witnesses):
        return False
    if not relaxed and len(S) != target_size(response.m):
        return False
    return not S <= excluded_residues(response.m, response.n)
