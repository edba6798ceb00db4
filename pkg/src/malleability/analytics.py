"""Empirical checks of the estimates behind the reduction.

Counts are exact integers; everything compared against an analytic formula
is a float64 with the tolerance stated at the call site.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BoundViolation, DomainError
from .modulus import least_primitive_root
from .numtheory import (
    DEFAULT_SIEVE_LIMIT,
    is_prime,
    prime_array,
    smallest_prime_factor_table,
    totient_table,
)

EULER_GAMMA = float(np.euler_gamma)
DEFAULT_ALPHA = 0.75


def proposition_bound(z: float) -> float:
    """(z / log z)^2 * (log log z)^2 / log z."""
    L = math.log(z)
    return (z / L) ** 2 * math.log(L) ** 2 / L


def _distinct_prime_factors(x: int, spf: np.ndarray) -> list[int]:
    out = []
    while x > 1:
        p = int(spf[x])
        out.append(p)
        while x % p == 0:
            x //= p
    return out


def _divisors_from_spf(x: int, spf: np.ndarray) -> list[int]:
    divs = [1]
    while x > 1:
        p = int(spf[x])
        e = 0
        while x % p == 0:
            x //= p
            e += 1
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return divs


def pi_counts(z: int, d_max: int, sieve_limit: int = DEFAULT_SIEVE_LIMIT) -> np.ndarray:
    """``out[d]`` = #{p prime, z <= p < 2z, p = 1 (mod d)} for 1 <= d <= d_max."""
    primes = prime_array(z, 2 * z, sieve_limit)
    spf = smallest_prime_factor_table(2 * z)
    out = np.zeros(d_max + 1, dtype=np.int64)
    for p in primes.tolist():
        for d in _divisors_from_spf(p - 1, spf):
            if d <= d_max:
                out[d] += 1
    return out


def residue_class_counts(z: int, d: int, sieve_limit: int = DEFAULT_SIEVE_LIMIT) -> dict[int, int]:
    """Prime counts in [z, 2z) for every class a mod d."""
    primes = prime_array(z, 2 * z, sieve_limit)
    classes, counts = np.unique(primes % d, return_counts=True)
    return dict(zip(classes.tolist(), counts.tolist()))


def _gcd_matrix(primes: np.ndarray) -> np.ndarray:
    shifted = primes - 1
    return np.gcd.outer(shifted, shifted)


@dataclass
class SurveyReport:
    """Exhaustive gcd(p-1, q-1) census over primes in [z, 2z).

    ``pair_count_exceeding`` counts ordered pairs (p, q) including p == q;
    ``pair_count_unordered`` counts p < q only.
    """

    z: int
    threshold: float
    prime_count: int
    pair_count_exceeding: int
    pair_count_unordered: int
    bound_value: float
    alpha: float
    S1: int
    S2: int
    S2_bound: float
    gcd_histogram: dict = field(repr=False)
    pi_table: dict = field(repr=False)
    error_table: dict = field(repr=False)

    @property
    def bound_holds(self) -> bool:
        return self.pair_count_exceeding <= self.bound_value

    def to_json(self) -> dict:
        return {
            "z": str(self.z),
            "threshold": self.threshold,
            "prime_count": str(self.prime_count),
            "pair_count_exceeding": str(self.pair_count_exceeding),
            "pair_count_unordered": str(self.pair_count_unordered),
            "bound_value": self.bound_value,
            "bound_holds": self.bound_holds,
            "alpha": self.alpha,
            "S1": str(self.S1),
            "S2": str(self.S2),
            "S2_bound": self.S2_bound,
            "gcd_histogram": {str(d): str(c) for d, c in self.gcd_histogram.items()},
        }

    def rows(self) -> list[dict]:
        """One record per d, for CSV output."""
        return [
            {"d": d, "pi": self.pi_table[d], "E": self.error_table[d]}
            for d in sorted(self.pi_table)
        ]


def survey_gcd_pairs(
    z: int,
    threshold: Optional[float] = None,
    *,
    alpha: float = DEFAULT_ALPHA,
    strict: bool = True,
    sieve_limit: int = DEFAULT_SIEVE_LIMIT,
) -> SurveyReport:
    """Count prime pairs in [z, 2z) whose gcd(p-1, q-1) exceeds the threshold.

    With ``strict`` and z >= 100, raises :class:`BoundViolation` if the count
    is above the closed-form bound (small z is exempt: the bound is
    asymptotic).
    """
    if not 10 <= z <= sieve_limit // 2:
        raise DomainError(f"z must lie in [10, {sieve_limit // 2}], got {z}")
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    log_z = math.log(z)
    if threshold is None:
        threshold = log_z
    primes = prime_array(z, 2 * z, sieve_limit)
    G = _gcd_matrix(primes)
    exceeding = int((G > threshold).sum())
    unordered = int(np.triu(G > threshold, k=1).sum())
    values, counts = np.unique(G, return_counts=True)
    histogram = dict(zip(values.tolist(), counts.tolist()))

    # gcd of two distinct members divides their difference, so d < z
    pi = pi_counts(z, z - 1, sieve_limit)
    phi = totient_table(z)
    ds = np.arange(1, z)
    errors = pi[1:] - z / (phi[1:] * log_z)
    cut = z**alpha
    squares = pi[1:] ** 2
    S1 = int(squares[(ds > log_z) & (ds < cut)].sum())
    S2 = int(squares[(ds > cut) & (ds < z)].sum())

    report = SurveyReport(
        z=z,
        threshold=float(threshold),
        prime_count=len(primes),
        pair_count_exceeding=exceeding,
        pair_count_unordered=unordered,
        bound_value=proposition_bound(z),
        alpha=alpha,
        S1=S1,
        S2=S2,
        S2_bound=4 * z ** (3 - 2 * alpha),
        gcd_histogram=histogram,
        pi_table=dict(zip(ds.tolist(), pi[1:].tolist())),
        error_table=dict(zip(ds.tolist(), errors.tolist())),
    )
    if strict and z >= 100 and not report.bound_holds:
        raise BoundViolation(
            f"z={z}: {exceeding} pairs exceed the bound {report.bound_value:.1f}"
        )
    return report


@dataclass(frozen=True)
class BDHReport:
    z: int
    d_max: int
    A: float
    epsilon: float
    sum_sq: float
    reference: float

    @property
    def ratio(self) -> float:
        return self.sum_sq / self.reference

    def to_json(self) -> dict:
        return {
            "z": str(self.z), "d_max": str(self.d_max), "A": self.A,
            "epsilon": self.epsilon, "sum_sq": self.sum_sq,
            "reference": self.reference, "ratio": self.ratio,
        }


def bdh_error_sum(
    z: int,
    d_max: int,
    A: float = 4.0,
    epsilon: float = 0.25,
    sieve_limit: int = DEFAULT_SIEVE_LIMIT,
) -> BDHReport:
    """Sum of E(d; z)^2 over d <= d_max next to z^2 / (log z)^A.

    Nothing is asserted: the implied constant in the mean-square bound is
    unknown, so only the ratio is reported.
    """
    if z < 3 or 2 * z > sieve_limit:
        raise DomainError(f"z out of range: {z}")
    if d_max < 1 or d_max > z ** (1 - epsilon):
        raise DomainError(f"d_max must lie in [1, z^(1-epsilon)] = [1, {z ** (1 - epsilon):.2f}]")
    log_z = math.log(z)
    pi = pi_counts(z, d_max, sieve_limit)[1:]
    phi = totient_table(d_max + 1)[1:]
    E = pi - z / (phi * log_z)
    return BDHReport(z, d_max, A, epsilon, float(np.sum(E * E)), z**2 / log_z**A)


@dataclass(frozen=True)
class MertensReport:
    x: int
    product: float
    reference: float

    @property
    def rel_error(self) -> float:
        return abs(self.product / self.reference - 1)

    def to_json(self) -> dict:
        return {"x": str(self.x), "product": self.product,
                "reference": self.reference, "rel_error": self.rel_error}


def mertens_product(
    x: int, *, strict: bool = True, tolerance: float = 0.05,
    sieve_limit: int = DEFAULT_SIEVE_LIMIT,
) -> MertensReport:
    """prod_{p < x} (1 - 1/p) against e^(-gamma) / log x."""
    if x < 3:
        raise DomainError("x must be >= 3")
    primes = prime_array(2, x, sieve_limit).astype(np.float64)
    product = float(np.exp(np.sum(np.log1p(-1.0 / primes))))
    report = MertensReport(x, product, math.exp(-EULER_GAMMA) / math.log(x))
    if strict and x >= 100 and report.rel_error >= tolerance:
        raise BoundViolation(f"Mertens product off by {report.rel_error:.2%} at x={x}")
    return report


def phi_lower_bound_ratio(limit: int) -> tuple[float, int]:
    """min over 3 <= d < limit of phi(d) * log(d) / d, and where it is attained."""
    phi = totient_table(limit)
    d = np.arange(3, limit)
    ratio = phi[3:] * np.log(d) / d
    i = int(np.argmin(ratio))
    return float(ratio[i]), int(d[i])


@dataclass
class PrimRootSurvey:
    """Least primitive roots g(p) for every odd prime p <= limit.

    Ratios and fractions are taken over primes p >= 11 (below that the
    log-log terms are meaningless).
    """

    limit: int
    epsilon: float
    worst_ratio_shoup: float
    worst_prime_shoup: int
    bach_fraction: float
    hb235_fraction: float
    max_g: int
    max_g_prime: int
    primes: np.ndarray = field(repr=False)
    g: np.ndarray = field(repr=False)

    def to_json(self) -> dict:
        return {
            "limit": str(self.limit),
            "epsilon": self.epsilon,
            "prime_count": str(len(self.primes)),
            "worst_ratio_shoup": self.worst_ratio_shoup,
            "worst_prime_shoup": str(self.worst_prime_shoup),
            "bach_fraction": self.bach_fraction,
            "hb235_fraction": self.hb235_fraction,
            "max_g": str(self.max_g),
            "max_g_prime": str(self.max_g_prime),
        }

    def rows(self) -> list[dict]:
        return [{"p": p, "g": g} for p, g in zip(self.primes.tolist(), self.g.tolist())]


def least_primitive_roots(limit: int, sieve_limit: int = DEFAULT_SIEVE_LIMIT):
    """Arrays (primes, g) with g[i] the least primitive root of primes[i], odd primes <= limit."""
    primes = prime_array(3, limit + 1, max(sieve_limit, limit + 1))
    spf = smallest_prime_factor_table(limit + 1)
    out = np.empty(len(primes), dtype=np.int64)
    hb = np.empty(len(primes), dtype=bool)
    for i, p in enumerate(primes.tolist()):
        exps = [(p - 1) // ell for ell in _distinct_prime_factors(p - 1, spf)]

        def generates(a):
            return a % p != 0 and all(pow(a, e, p) != 1 for e in exps)

        g = 2
        while not generates(g):
            g += 1
        out[i] = g
        hb[i] = g in (2, 3, 5) or generates(5)
    return primes, out, hb


def primroot_survey(
    limit: int, epsilon: float = 0.5, *, strict: bool = True,
    sieve_limit: int = DEFAULT_SIEVE_LIMIT,
) -> PrimRootSurvey:
    """Compare g(p) with the (log p)^6 bound and Bach's heuristic.

    With ``strict``, raises :class:`BoundViolation` if some p >= 11 has
    g(p) >= (log p)^6. That constant-1 check is empirical, not a theorem.
    """
    if limit < 11 or limit > sieve_limit:
        raise DomainError(f"limit must lie in [11, {sieve_limit}]")
    primes, g, hb = least_primitive_roots(limit, sieve_limit)
    big = primes >= 11
    lp = np.log(primes[big].astype(np.float64))
    gb = g[big].astype(np.float64)
    shoup = gb / lp**6
    bach = math.exp(EULER_GAMMA) * lp * np.log(lp) ** 2 * (1 + epsilon)
    worst = int(np.argmax(shoup))
    survey = PrimRootSurvey(
        limit=limit,
        epsilon=epsilon,
        worst_ratio_shoup=float(shoup[worst]),
        worst_prime_shoup=int(primes[big][worst]),
        bach_fraction=float(np.mean(gb <= bach)),
        hb235_fraction=float(np.mean(hb[big])),
        max_g=int(g.max()),
        max_g_prime=int(primes[int(np.argmax(g))]),
        primes=primes,
        g=g,
    )
    if strict and survey.worst_ratio_shoup >= 1:
        raise BoundViolation(
            f"g({survey.worst_prime_shoup}) exceeds (log p)^6"
        )
    return survey


@dataclass(frozen=True)
class DensityEstimate:
    """Monte Carlo estimate of P(no primitive root among k random residues)."""

    q: int
    C: float
    k: int
    trials: int
    fraction: float
    exact: float
    heuristic: float

    @property
    def stderr(self) -> float:
        return math.sqrt(max(self.exact * (1 - self.exact), 1e-300) / self.trials)

    def to_json(self) -> dict:
        return {
            "q": str(self.q), "C": self.C, "k": str(self.k), "trials": str(self.trials),
            "fraction": self.fraction, "exact": self.exact,
            "heuristic": self.heuristic, "stderr": self.stderr,
        }


def _primitive_root_mask(q: int) -> np.ndarray:
    mask = np.zeros(q, dtype=bool)
    x = 1
    g = least_primitive_root(q).g
    # walk the cyclic group: g^k is a generator iff gcd(k, q-1) == 1
    for k in range(1, q):
        x = x * g % q
        mask[x] = math.gcd(k, q - 1) == 1
    return mask


def density_montecarlo(
    q: int, C: float, trials: int, rng_seed: int, *, batch: int = 4096,
) -> DensityEstimate:
    """Draw ``trials`` samples of ceil(C log q) residues (with replacement)
    from [1, q-1] and record how often none of them is a primitive root.
    """
    if trials < 1:
        raise DomainError("trials must be >= 1")
    if q < 3 or q > DEFAULT_SIEVE_LIMIT or not is_prime(q):
        raise DomainError(f"q must be an odd prime below {DEFAULT_SIEVE_LIMIT}")
    mask = _primitive_root_mask(q)
    density = mask.sum() / (q - 1)
    k = max(1, math.ceil(C * math.log(q)))
    rng = np.random.default_rng(rng_seed)
    misses = 0
    done = 0
    while done < trials:
        size = min(batch, trials - done)
        draws = rng.integers(1, q, size=(size, k))
        misses += int((~mask[draws].any(axis=1)).sum())
        done += size
    return DensityEstimate(
        q=q, C=C, k=k, trials=trials,
        fraction=misses / trials,
        exact=float((1 - density) ** k),
        heuristic=math.exp(-C / math.exp(EULER_GAMMA)),
    )
