"""
Finer-than-dyadic smooth partitions
===================================

A narrow bump psi around 1 with width delta reproduces the constant
function after averaging over scales, and its Fourier transform decays
fast enough that Poisson summation can be truncated early.
"""

import numpy as np

from sparseprime import harmonic

bump = harmonic.make_bump(0.05)
print("integral of psi(1/t) dt/t:", harmonic.bump_identity(bump))

for N, delta in ((1, 0.05), (100, 0.05), (100, 0.01), (5000, 0.02)):
    err = harmonic.partition_reconstruction(N, delta)
    print(f"partition of unity, N={N}, delta={delta}: relative error {err:.1e}")

# decay of the transform: |psi-hat(x)| (delta x)^j stays bounded
xs = np.linspace(1, 400, 200)
for j in (1, 2, 4):
    print(f"j={j}: max |psi-hat| (delta x)^j = {harmonic.fourier_decay_constant(bump, xs, j):.3e}")

for N, q, a in ((1000, 7, 3), (1000, 1, 0), (20000, 101, 17)):
    r = harmonic.poisson_sides(N, q, a, 0.05)
    print(f"Poisson N={N} q={q} a={a}: H={r.H}, |lhs - rhs| = {r.difference:.1e}")
