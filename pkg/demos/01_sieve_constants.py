"""
Sieve constants from the Buchstab function
==========================================

Bounds the two discarded integrals for each case and prints the
resulting deficiency.  Every number printed is a rigorous upper bound.
"""

import numpy as np

from sparseprime import sieve

# the Buchstab function is 1/u on [1, 2] and settles towards exp(-gamma)
for u in (1.5, 2.0, 2.5, 3.0, 4.0, 5.0):
    print(f"omega({u}) = {sieve.buchstab_omega(u):.6f}")

# the upper envelope used inside the integrals is monotone beyond 5
print("upper envelope on [5, 10]:", np.round(sieve.buchstab_upper(np.linspace(5, 10, 6)), 6))

# a coarse grid is already below the targets, the default grid is tighter
for grid2, grid4 in ((200, 20), (800, 40)):
    for j in (1, 2):
        rep = sieve.deficiency_report(j, grid2=grid2, grid4=grid4)
        print(
            f"case {j}, grids {grid2}/{grid4}: Omega2 <= {rep.omega2.value:.5f}, "
            f"Omega4 <= {rep.omega4.value:.5f}, deficiency >= {rep.deficiency:.4f}"
        )
