"""Factoring an RSA modulus n = pq from partial factor information about m^n + 1.

A desk-scale simulator: a factoring oracle answers residues of prime factors
of m^n + 1, and two reductions turn those residues into a prime divisor of n.
An analytics module checks the supporting number-theoretic estimates.
"""

from .errors import (
    BoundViolation,
    DomainError,
    MalleabilityError,
    ParticularCaseInapplicable,
    ProtocolViolation,
    ReductionFailed,
    ResourceError,
)
from .modulus import Modulus, PrimitiveRootReport, classify, gen_modulus, least_primitive_root
from .numtheory import (
    Budget,
    FactorSet,
    PrimeFactor,
    cyclotomic_eval,
    cyclotomic_mod,
    euler_phi,
    factorize,
    is_prime,
    mod_pow,
    multiplicative_order,
    sieve_primes,
)
from .oracle import (
    HonestOracle,
    OracleResponse,
    ProbeEncoding,
    StructuredOracle,
    compute_Sm,
    encode_probe,
    honest_query,
    structured_query,
)
from .reduction import ReductionResult, reduce_general, reduce_particular, verify_result

__version__ = "0.1.0"

__all__ = [
    "BoundViolation",
    "DomainError",
    "MalleabilityError",
    "ParticularCaseInapplicable",
    "ProtocolViolation",
    "ReductionFailed",
    "ResourceError",
    "Modulus",
    "PrimitiveRootReport",
    "classify",
    "gen_modulus",
    "least_primitive_root",
    "Budget",
    "FactorSet",
    "PrimeFactor",
    "cyclotomic_eval",
    "cyclotomic_mod",
    "euler_phi",
    "factorize",
    "is_prime",
    "mod_pow",
    "multiplicative_order",
    "sieve_primes",
    "HonestOracle",
    "OracleResponse",
    "ProbeEncoding",
    "StructuredOracle",
    "compute_Sm",
    "encode_probe",
    "honest_query",
    "structured_query",
    "ReductionResult",
    "reduce_general",
    "reduce_particular",
    "verify_result",
]

