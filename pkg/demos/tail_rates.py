"""Estimate pillar tail rates and connection exponents at beta = 1 on a small box."""

from ising_interfaces.lattice import Box
from ising_interfaces.sampler import sample_interfaces
from ising_interfaces.stats import alpha_estimate, gamma, m_star, pillar_tail

box = Box(8, 8, 5)
tail, _ = pillar_tail(sample_interfaces(box, 1.0, 400, sweeps_between=5, burn_in=200, seed=2), h_max=4)
for h in (1, 2):
    rate, lo, hi = tail.rate(h)
    print(f"rate({h}) = {rate:.3f}  [{lo:.3f}, {hi:.3f}]")
alpha = alpha_estimate(box, 1.0, [1, 2, 3], N=400, seed=3, sweeps_between=5)
for row in alpha.rows():
    print(f"alpha_{row['h']} = {row['alpha']:.3f}  [{row['ci_low']:.3f}, {row['ci_high']:.3f}]")
s = (2 * box.n) ** 2
print("m* =", m_star(s, alpha, 1.0), "gamma =", round(gamma(s, alpha, 1.0), 4))
