"""
Where the useful prime factors live
===================================

m^n + 1 splits into cyclotomic pieces Phi_2(m) Phi_2p(m) Phi_2q(m) Phi_2pq(m).
The structured oracle factors only the first three. Here the honest oracle,
which factors everything, shows which piece each prime came from.
"""

from malleability import HonestOracle, cyclotomic_eval, encode_probe

p, q, m = 5, 11, 2
n = p * q
pieces = {d: cyclotomic_eval(d, m) for d in (2, 2 * p, 2 * q, 2 * n)}
print(f"{m}^{n} + 1 = " + " * ".join(f"Phi_{d}({m})" for d in pieces))
assert m**n + 1 == pieces[2] * pieces[2 * p] * pieces[2 * q] * pieces[2 * n]

response = HonestOracle().query(encode_probe(n, m))
for w in response.pool:
    home = next(d for d, v in pieces.items() if v % w.r == 0)
    useful = w.residue not in (1, 3)
    print(f"  r = {w.r:<22} Phi_{home:<4} r mod {n} = {w.residue:<3} {'useful' if useful else ''}")

# every prime of Phi_2pq(m) is 1 mod 2n, so it never helps
