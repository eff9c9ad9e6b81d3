"""
Sparse sequences of sums of two squares
=======================================

Tabulates the quartic and cubic forms on dyadic windows, then looks at
how their mass grows and how the prime terms thin out.
"""

from sparseprime import ntheory, sequences

k1 = ntheory.kappa(1)
k2 = ntheory.kappa(2)
print(f"kappa_1 = {k1.value:.6f} (+- {k1.tail_estimate:.1e})")
print(f"kappa_2 = {k2.value:.6f} (+- {k2.tail_estimate:.1e})")

s = sequences.enumerate("quartic_shift", 10**4, k1.value)
print(s.summary())

Xs = [10**4, 10**5, 10**6, 10**7]
for form in ("quartic_shift", "cubes"):
    counts = [sequences.window_counts(form, X) for X in Xs]
    reps = [c.representations for c in counts]
    primes = [c.prime_representations for c in counts]
    print(form, "representations", reps)
    print("  local exponents", [round(e, 3) for e in sequences.growth_exponents(reps, Xs)])
    print("  prime-only     ", [round(e, 3) for e in sequences.growth_exponents(primes, Xs)])

# the sieve recursion holds exactly on the integers
r = sequences.buchstab_identity_check(10**5, 10**5 ** 0.08)
print("Buchstab identity residual:", r.residual)
