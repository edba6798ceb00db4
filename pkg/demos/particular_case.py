"""
Factoring 35 with a single base-2 probe
=======================================

The oracle is asked about 2^35 + 1 and answers with residues mod 35 of some
of its prime factors. Any residue other than 1 and 3 gives a factor of 35.
"""

import math

from malleability import Modulus, StructuredOracle, encode_probe, reduce_particular

# the harness knows p and q; the reduction below only ever sees n
secret = Modulus.from_primes(5, 7)
oracle = StructuredOracle(secret)

probe = encode_probe(35, 2)
print("probe bits:", probe.bits, "=", probe.value)

response = oracle.query(probe)
for w in response.witnesses:
    print(f"  r = {w.r:>6}  r mod 35 = {w.residue:>2}  gcd(r - 1, 35) = {math.gcd(w.r - 1, 35)}")

# 3 divides m + 1 = 3, so its residue says nothing; 11 does the job
result = reduce_particular(35, oracle)
print("d =", result.d, "from r =", result.r_witness)
