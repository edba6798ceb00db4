"""
Least primitive roots are small
===============================

The general reduction walks m = 2, 3, 4, ... and is guaranteed to succeed
once m is a primitive root mod q, so the size of the least primitive root
g(q) bounds the number of queries.
"""

import numpy as np

from malleability.analytics import density_montecarlo, primroot_survey

survey = primroot_survey(10**6)
values, counts = np.unique(survey.g, return_counts=True)
print("g(p) for odd p below 10^6:")
for g, c in zip(values[:8], counts[:8]):
    print(f"  g = {g:>2}: {c} primes")
print(f"largest g = {survey.max_g} at p = {survey.max_g_prime}")
print(f"worst g(p)/(log p)^6 = {survey.worst_ratio_shoup:.4f} at p = {survey.worst_prime_shoup}")

# a handful of random residues almost always contains a generator
est = density_montecarlo(1000003, C=2, trials=20000, rng_seed=0)
print(f"P(no primitive root among {est.k} random residues mod 1000003):"
      f" {est.fraction:.4f} (exact {est.exact:.2e})")
