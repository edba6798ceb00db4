"""Factor n from oracle answers about m^n + 1.

The reducers below see only the integer n and an opaque oracle handle with a
``query(probe)`` method. They never touch p or q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Protocol

from .errors import (
    DomainError,
    ParticularCaseInapplicable,
    ProtocolViolation,
    ReductionFailed,
)
from .numtheory import is_prime
from .oracle import OracleResponse, ProbeEncoding, encode_probe, excluded_residues

MIN_M_CAP = 100


class Oracle(Protocol):
    mode: str

    def query(self, probe: ProbeEncoding) -> OracleResponse: ...


@dataclass(frozen=True)
class TranscriptEntry:
    m: int
    outcome: str  # "bottom", "S=...", or "gcd-shortcut"

    def to_json(self) -> dict:
        return {"m": str(self.m), "outcome": self.outcome}


@dataclass(frozen=True)
class ReductionResult:
    """A recovered prime divisor d of n.

    ``r_witness`` is the prime whose residue gave d = gcd(r - 1, n); it is
    None when d came from the gcd(m + 1, n) shortcut.
    """

    n: int
    d: int
    r_witness: Optional[int]
    residue: Optional[int]
    m_used: int
    transcript: tuple = field(default=())
    method: str = "witness"

    @property
    def queries(self) -> int:
        return sum(1 for t in self.transcript if t.outcome != "gcd-shortcut")

    def to_json(self) -> dict:
        return {
            "n": str(self.n),
            "d": str(self.d),
            "cofactor": str(self.n // self.d),
            "r_witness": None if self.r_witness is None else str(self.r_witness),
            "residue": None if self.residue is None else str(self.residue),
            "m_used": str(self.m_used),
            "method": self.method,
            "queries": self.queries,
            "transcript": [t.to_json() for t in self.transcript],
        }


def default_m_cap(n: int) -> int:
    """ceil(log2(n)^6), floored at 100."""
    return max(MIN_M_CAP, math.ceil(math.log2(n) ** 6))


def select_witness(response: OracleResponse, excluded: frozenset):
    """Smallest certified prime in S whose residue is not excluded."""
    usable = [w for w in response.witnesses if w.residue not in excluded]
    return min(usable, key=lambda w: w.r, default=None)


def _check_n(n: int) -> None:
    if n < 15 or n % 2 == 0:
        raise DomainError(f"n must be an odd composite, got {n}")


def _finish(n, m, response, transcript):
    excluded = excluded_residues(m, n)
    w = select_witness(response, excluded)
    if w is None:
        raise ProtocolViolation(
            f"oracle S={sorted(response.S)} lies inside S_m u {{1}}={sorted(excluded)} at m={m}"
        )
    d = math.gcd(w.residue - 1, n)
    if not 1 < d < n or not is_prime(d):
        raise ReductionFailed(f"witness r={w.r} gave trivial divisor {d}", transcript, m)
    return ReductionResult(n, d, w.r, w.residue, m, tuple(transcript))


def reduce_particular(n: int, oracle: Oracle) -> ReductionResult:
    """One base-2 query: take r in S outside {1, 3}, return gcd(r - 1, n)."""
    _check_n(n)
    response = oracle.query(encode_probe(n, 2))
    transcript = [TranscriptEntry(2, response.summary())]
    if response.bottom:
        raise ParticularCaseInapplicable(
            "oracle returned bottom for m = 2; particular case inapplicable", transcript, 2
        )
    return _finish(n, 2, response, transcript)


def reduce_general(n: int, oracle: Oracle, m_cap: Optional[int] = None) -> ReductionResult:
    """Try m = 2, 3, ... until the oracle returns a usable S.

    Before each query, gcd(m + 1, n) is checked: a nontrivial value factors n
    on the spot.
    """
    _check_n(n)
    if m_cap is None:
        m_cap = default_m_cap(n)
    if m_cap < 2:
        raise DomainError("m_cap must be >= 2")
    transcript = []
    for m in range(2, m_cap + 1):
        g = math.gcd(m + 1, n)
        if 1 < g < n:
            transcript.append(TranscriptEntry(m, "gcd-shortcut"))
            return ReductionResult(n, g, None, None, m, tuple(transcript), "gcd-shortcut")
        if g == n:
            continue
        response = oracle.query(encode_probe(n, m))
        transcript.append(TranscriptEntry(m, response.summary()))
        if not response.bottom:
            return _finish(n, m, response, transcript)
    raise ReductionFailed(f"no usable oracle answer for m <= {m_cap}", transcript, m_cap)


def verify_result(result: ReductionResult, n: int) -> bool:
    """Check a result against n without trusting anything it claims."""
    d = result.d
    if result.n != n or not 1 < d < n or n % d or not is_prime(d):
        return False
    m = result.m_used
    if result.method == "gcd-shortcut":
        return (m + 1) % d == 0
    r = result.r_witness
    if r is None or not is_prime(r) or d != math.gcd(r - 1, n):
        return False
    return pow(m, n, r) == r - 1
