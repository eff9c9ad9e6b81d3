"""
Square-root cancellation over small primes
==========================================

Runs the full bound suite for p <= 100 and shows how close each family
comes to its explicit constant.
"""

from sparseprime import curves

rep = curves.verify_weil_suite(100)
print("suite passed:", rep.passed)
for lemma, row in sorted(rep.worst().items()):
    print(f"{lemma:7s} worst at p={row.p:3d}  observed/bound = {row.ratio:.3f}")

# Kloosterman sums are real for k = 2, with |Kl_2| <= 2 sqrt(p)
kl = [curves.kloosterman(2, a, 101).value for a in range(1, 6)]
print("Kl_2(a; 101), a = 1..5:", [round(z.real, 4) for z in kl])

# the point count on the conic factors over coprime moduli
m, n, a = 7, 11, 5
print("N1(a; 77) =", curves.count_N1(a, m * n).count,
      "=", curves.count_N1(a % m, m).count, "*", curves.count_N1(a % n, n).count)
