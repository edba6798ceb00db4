"""
When base 2 is not enough: n = 341
==================================

341 = 11 * 31 is a base-2 Fermat pseudoprime, so every prime factor of
2^341 + 1 except 3 is 1 mod 341 and the base-2 probe is useless. Moving
to m = 3, a primitive root mod 31, brings out the factor 67.
"""

from malleability import (
    Modulus,
    ParticularCaseInapplicable,
    StructuredOracle,
    classify,
    least_primitive_root,
    reduce_general,
    reduce_particular,
)

print("2^340 mod 341 =", pow(2, 340, 341))
print("classify(11, 31) =", classify(11, 31))
print("least primitive root mod 31:", least_primitive_root(31).g)

oracle = StructuredOracle(Modulus.from_primes(11, 31))
try:
    reduce_particular(341, oracle)
except ParticularCaseInapplicable as exc:
    print("particular case:", exc)

result = reduce_general(341, oracle)
for step in result.transcript:
    print(f"  m = {step.m}: {step.outcome}")
print(f"d = {result.d} from r = {result.r_witness} ((3^11 + 1)/4 = {(3**11 + 1) // 4} = 67 * 661)")
