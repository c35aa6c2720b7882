"""Apply the isolation map to a pillar next to a small wall and recover the input from its witness."""

from ising_interfaces.interface import cells_to_plus, flat_interface
from ising_interfaces.lattice import Box
from ising_interfaces.maps import IsoParams, is_isolated, phi_iso, witness, witness_reconstruct

box = Box(6, 6, 6)
p = IsoParams(L=3, h=3)
column = [(1, 1, 1), (1, 1, 3), (1, 1, 5)]
I = cells_to_plus(flat_interface(box), column + [(5, 1, 1)])
print("isolated before:", is_isolated(I, (1, 1), p=p))
J, trace = phi_iso(I, (1, 1), p=p)
print("isolated after:", is_isolated(J, (1, 1), p=p))
print("excess area m(I;J):", trace.excess, "deleted walls:", len(trace.deleted))
w = witness(I, J, (1, 1), trace)
print("witness faces: green", len(w.green), "blue", len(w.blue), "red", len(w.red))
print("reconstructed input matches:", witness_reconstruct(J, w, (1, 1), p=p) == I)
