"""Command-line entry point: ``malleability <subcommand> ...``.

Standard output carries exactly one report document; logs go to stderr.
Exit codes: 0 ok, 2 domain error, 3 resource/budget error, 4 reduction
failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
from importlib import resources
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from typing import Optional

from .analytics import (
    bdh_error_sum,
    density_montecarlo,
    primroot_survey,
    survey_gcd_pairs,
)
from .errors import (
    BoundViolation,
    DomainError,
    ParticularCaseInapplicable,
    ProtocolViolation,
    ReductionFailed,
    ResourceError,
)
from .modulus import Modulus, gen_modulus
from .numtheory import DEFAULT_SIEVE_LIMIT, factorize, sieve_primes
from .oracle import (
    DEFAULT_ORACLE_BUDGET,
    HONEST_N_CAP,
    HonestOracle,
    StructuredOracle,
    encode_probe,
)
from .reduction import reduce_general, reduce_particular, verify_result

log = logging.getLogger("malleability")

CONFIG_ENV = "MALLEABILITY_CONFIG"
EXIT_OK, EXIT_DOMAIN, EXIT_RESOURCE, EXIT_REDUCTION, EXIT_USAGE = 0, 2, 3, 4, 64


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    sieve_limit: int = DEFAULT_SIEVE_LIMIT
    oracle_budget: int = DEFAULT_ORACLE_BUDGET
    m_cap: Optional[int] = None
    honest_n_cap: int = HONEST_N_CAP
    output: str = "json"

    def __post_init__(self):
        for name in ("sieve_limit", "oracle_budget", "honest_n_cap"):
            if getattr(self, name) <= 0:
                raise DomainError(f"{name} must be positive")
        if self.m_cap is not None and self.m_cap <= 0:
            raise DomainError("m_cap must be positive")
        if self.honest_n_cap > HONEST_N_CAP:
            raise DomainError(f"honest_n_cap must be <= {HONEST_N_CAP}")
        if self.output not in ("json", "csv", "human"):
            raise DomainError(f"unknown output format {self.output!r}")

    @classmethod
    def from_file(cls, path: str) -> "RunConfig":
        """Read ``key = value`` lines; ``#`` starts a comment."""
        types = {f.name: f.type for f in fields(cls)}
        values = {}
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                key, sep, value = (s.strip() for s in line.partition("="))
                if not sep or key not in types:
                    raise DomainError(f"{path}:{lineno}: bad config line")
                values[key] = value if key == "output" else int(value)
        return cls(**values)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_format_flags(p):
    p.add_argument("--json", dest="output", action="store_const", const="json")
    p.add_argument("--csv", dest="output", action="store_const", const="csv")
    p.add_argument("--human", dest="output", action="store_const", const="human")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="malleability", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help=f"key = value config file (default: ${CONFIG_ENV})")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--sieve-limit", type=int)
    parser.add_argument("--oracle-budget", type=int)
    parser.add_argument("--honest-n-cap", type=int)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a seeded RSA modulus")
    p.add_argument("--bits", type=int, default=8, help="bit length of each prime")
    p.add_argument("--max-bits", type=int)
    p.add_argument("--seed", type=int, dest="sub_seed")
    p.add_argument("--particular", choices=("true", "false"))
    p.add_argument("--p", type=int)
    p.add_argument("--q", type=int)
    _add_format_flags(p)

    p = sub.add_parser("reduce", help="factor n with one of the reductions")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mode", choices=("particular", "general"), default="general")
    p.add_argument("--oracle", choices=("structured", "honest"), default="structured")
    p.add_argument("--m-cap", type=int)
    p.add_argument("--relaxed", action="store_true", help="accept any S outside S_m u {1}")
    _add_format_flags(p)

    p = sub.add_parser("oracle-dump", help="print one oracle response")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--oracle", choices=("structured", "honest"), default="structured")
    p.add_argument("--relaxed", action="store_true")
    _add_format_flags(p)

    p = sub.add_parser("stats-gcd", help="gcd(p-1, q-1) pair survey")
    p.add_argument("--z", type=int, required=True)
    p.add_argument("--threshold", type=float)
    _add_format_flags(p)

    p = sub.add_parser("stats-bdh", help="mean-square error sum of E(d; z)")
    p.add_argument("--z", type=int, required=True)
    p.add_argument("--dmax", type=int, required=True)
    p.add_argument("--A", type=float, default=4.0)
    p.add_argument("--epsilon", type=float, default=0.25)
    _add_format_flags(p)

    p = sub.add_parser("stats-primroot", help="least primitive root statistics")
    p.add_argument("--limit", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.5)
    _add_format_flags(p)

    p = sub.add_parser("stats-density", help="Monte Carlo primitive-root density")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--C", type=float, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, dest="sub_seed")
    _add_format_flags(p)

    p = sub.add_parser("demo", help="sweep all n = pq with 5 <= p < q <= P")
    p.add_argument("--max-prime", type=int, required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--m-cap", type=int)
    _add_format_flags(p)
    return parser


def load_config(args) -> RunConfig:
    path = args.config or os.environ.get(CONFIG_ENV)
    config = RunConfig.from_file(path) if path else RunConfig()
    overrides = {
        "seed": args.seed,
        "sieve_limit": args.sieve_limit,
        "oracle_budget": args.oracle_budget,
        "honest_n_cap": args.honest_n_cap,
        "m_cap": getattr(args, "m_cap", None),
        "output": getattr(args, "output", None),
    }
    return replace(config, **{k: v for k, v in overrides.items() if v is not None})


def secret_modulus(n: int) -> Modulus:
    """Harness-side factorization of a desk-scale n into a Modulus."""
    fs = factorize(n)
    if not fs.complete or len(fs.factors) != 2 or any(f.multiplicity != 1 for f in fs.factors):
        raise DomainError(f"{n} is not a product of two distinct primes")
    return Modulus.from_primes(*fs.primes)


def _make_oracle(kind: str, n: int, config: RunConfig, relaxed: bool = False):
    if kind == "honest":
        return HonestOracle(config.oracle_budget, relaxed=relaxed, n_cap=config.honest_n_cap)
    return StructuredOracle(
        secret_modulus(n), config.oracle_budget, relaxed=relaxed,
        sieve_limit=config.sieve_limit, trial_bound=config.sieve_limit,
    )


# --- subcommands -------------------------------------------------------------
# Each returns (document, csv_rows or None).

def cmd_gen(args, config):
    if args.p is not None or args.q is not None:
        if args.p is None or args.q is None:
            raise DomainError("--p and --q go together")
        return Modulus.from_primes(args.p, args.q).to_json(), None
    seed = config.seed if args.sub_seed is None else args.sub_seed
    particular = None if args.particular is None else args.particular == "true"
    bits = (args.bits, args.max_bits or args.bits)
    mod = gen_modulus(seed, bits, particular, sieve_limit=config.sieve_limit)
    return mod.to_json(), None


def cmd_reduce(args, config):
    oracle = _make_oracle(args.oracle, args.n, config, relaxed=args.relaxed)
    doc = {"mode": args.mode, "oracle": args.oracle}
    if args.mode == "particular":
        result = reduce_particular(args.n, oracle)
    else:
        result = reduce_general(args.n, oracle, config.m_cap)
    doc.update(result.to_json())
    doc["verified"] = verify_result(result, args.n)
    return doc, None


def cmd_oracle_dump(args, config):
    oracle = _make_oracle(args.oracle, args.n, config, relaxed=args.relaxed)
    response = oracle.query(encode_probe(args.n, args.m))
    return response.to_json(), None


def cmd_stats_gcd(args, config):
    report = survey_gcd_pairs(args.z, args.threshold, sieve_limit=config.sieve_limit)
    return report.to_json(), report.rows()


def cmd_stats_bdh(args, config):
    report = bdh_error_sum(args.z, args.dmax, args.A, args.epsilon, config.sieve_limit)
    doc = report.to_json()
    return doc, [doc]


def cmd_stats_primroot(args, config):
    survey = primroot_survey(args.limit, args.epsilon, sieve_limit=config.sieve_limit)
    return survey.to_json(), survey.rows()


def cmd_stats_density(args, config):
    seed = config.seed if args.sub_seed is None else args.sub_seed
    est = density_montecarlo(args.q, args.C, args.trials, seed)
    doc = est.to_json()
    return doc, [doc]


def _demo_one(task):
    p, q, budget, m_cap, sieve_limit = task
    mod = Modulus.from_primes(p, q)
    oracle = StructuredOracle(mod, budget, sieve_limit=sieve_limit, trial_bound=sieve_limit)
    row = {"n": mod.n, "p": p, "q": q, "particular_case": mod.particular_case}
    try:
        result = reduce_general(mod.n, oracle, m_cap)
    except (ReductionFailed, ProtocolViolation) as exc:
        row.update(ok=False, d=None, m_used=getattr(exc, "m_used", None), queries=None,
                   method=type(exc).__name__)
        return row
    row.update(ok=verify_result(result, mod.n) and result.d in (p, q), d=result.d,
               m_used=result.m_used, queries=result.queries, method=result.method)
    return row


def cmd_demo(args, config):
    if args.max_prime < 7:
        raise DomainError("--max-prime must be >= 7")
    primes = sieve_primes(5, args.max_prime + 1, config.sieve_limit)
    tasks = [(p, q, config.oracle_budget, config.m_cap, config.sieve_limit)
             for i, p in enumerate(primes) for q in primes[i + 1:]]
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            rows = list(pool.map(_demo_one, tasks, chunksize=16))
    else:
        rows = [_demo_one(t) for t in tasks]
    rows.sort(key=lambda r: r["n"])
    successes = sum(r["ok"] for r in rows)
    by_m = {}
    for r in rows:
        if r["ok"]:
            by_m[str(r["m_used"])] = by_m.get(str(r["m_used"]), 0) + 1
    doc = {
        "max_prime": str(args.max_prime),
        "moduli": str(len(rows)),
        "successes": str(successes),
        "success_rate": successes / len(rows) if rows else 1.0,
        "by_m": dict(sorted(by_m.items(), key=lambda kv: int(kv[0]))),
        "rows": [_stringify(r) for r in rows],
    }
    return doc, rows


COMMANDS = {
    "gen": cmd_gen,
    "reduce": cmd_reduce,
    "oracle-dump": cmd_oracle_dump,
    "stats-gcd": cmd_stats_gcd,
    "stats-bdh": cmd_stats_bdh,
    "stats-primroot": cmd_stats_primroot,
    "stats-density": cmd_stats_density,
    "demo": cmd_demo,
}


def load_schema(name: str) -> dict:
    """The JSON schema for subcommand ``name`` (or ``"error"``)."""
    text = resources.files("malleability").joinpath("schemas", f"{name}.json").read_text()
    return json.loads(text)


def _stringify(row: dict) -> dict:
    return {k: str(v) if isinstance(v, int) and not isinstance(v, bool) else v
            for k, v in row.items()}


def render(doc: dict, rows: Optional[list], output: str) -> str:
    if output == "csv" and rows:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    if output == "human":
        lines = []
        for key, value in doc.items():
            if isinstance(value, (list, dict)) and len(value) > 8:
                value = f"<{len(value)} entries>"
            lines.append(f"{key:>22}: {value}")
        return "\n".join(lines) + "\n"
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _error_doc(kind: str, exc: Exception) -> dict:
    doc = {"error": kind, "message": str(exc)}
    if isinstance(exc, ReductionFailed):
        doc["transcript"] = [t.to_json() for t in exc.transcript]
        if isinstance(exc, ParticularCaseInapplicable):
            doc["escalate_to"] = "general"
    return doc


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s",
    )
    output = "json"
    try:
        config = load_config(args)
        output = config.output
        doc, rows = COMMANDS[args.command](args, config)
        code = EXIT_OK
    except DomainError as exc:
        doc, rows, code = _error_doc("domain", exc), None, EXIT_DOMAIN
    except ResourceError as exc:
        doc, rows, code = _error_doc("resource", exc), None, EXIT_RESOURCE
    except ParticularCaseInapplicable as exc:
        log.warning("particular case inapplicable; rerun with --mode general")
        doc, rows, code = _error_doc("inapplicable", exc), None, EXIT_REDUCTION
    except (ReductionFailed, ProtocolViolation) as exc:
        doc, rows, code = _error_doc("reduction", exc), None, EXIT_REDUCTION
    except BoundViolation as exc:
        doc, rows, code = _error_doc("bound", exc), None, 1
    if code != EXIT_OK:
        output = "json"
    sys.stdout.write(render(doc, rows, output))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
