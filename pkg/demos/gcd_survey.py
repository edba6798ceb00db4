"""
How often is gcd(p - 1, q - 1) large?
=====================================

The reduction fails for base 2 only when gcd(p - 1, q - 1) is big. This
counts prime pairs in [z, 2z) with a gcd above log z and compares the count
with (z/log z)^2 (log log z)^2 / log z.
"""

from malleability.analytics import bdh_error_sum, survey_gcd_pairs

for z in (100, 300, 1000, 3000):
    rep = survey_gcd_pairs(z)
    share = rep.pair_count_exceeding / rep.prime_count**2
    print(f"z = {z:>5}: {rep.prime_count:>4} primes, {rep.pair_count_exceeding:>6} pairs above"
          f" log z ({share:.1%}), bound {rep.bound_value:,.0f}")

# the mean-square error of primes in progressions, next to z^2 / (log z)^4
bdh = bdh_error_sum(1000, 177)
print(f"sum E(d; 1000)^2 over d <= 177: {bdh.sum_sq:.1f} (reference {bdh.reference:.1f})")
