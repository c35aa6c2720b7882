"""Sample a few interfaces at beta = 1 and print their wall decomposition."""

from ising_interfaces.lattice import Box
from ising_interfaces.pillars import pillar_heights
from ising_interfaces.sampler import sample_interfaces
from ising_interfaces.walls import Decomposition, reconstruct

box = Box(8, 8, 5)
for k, I in enumerate(sample_interfaces(box, beta=1.0, n_samples=5, sweeps_between=10, burn_in=200, seed=1)):
    d = Decomposition(I)
    excess = [W.excess() for W in d.walls]
    assert reconstruct(d.collection) == I
    print(f"sample {k}: |I|={len(I)} walls={len(d.walls)} ceilings={len(d.ceilings)} "
          f"excess={sum(excess)} tallest pillar={pillar_heights(I).max()}")
