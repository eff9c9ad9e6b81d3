import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sparseprime import gauss
from sparseprime.errors import NotInvertible, WindowTooLarge
from sparseprime.gauss import GaussInt

small = st.integers(-60, 60)


def test_gaussint_arithmetic():
    z, w = GaussInt(1, 2), GaussInt(3, -1)
    assert z * w == GaussInt(5, 5)
    assert z.conj() == GaussInt(1, -2)
    assert z.norm() == 5
    assert z + w == GaussInt(4, 1)
    assert 2 * z == GaussInt(2, 4)


def test_delta_examples():
    assert gauss.delta((1, 0), (0, 1)) == 1
    assert gauss.delta((3, 4), (3, 4)) == 0
    assert gauss.delta((1, 2), (3, 1)) == -5


@given(small, small, small, small)
def test_delta_is_imaginary_part(r1, s1, r2, s2):
    z1, z2 = GaussInt(r1, s1), GaussInt(r2, s2)
    assert gauss.delta(z1, z2) == (z2 * z1.conj()).im
    assert gauss.delta(z1, z2) == -gauss.delta(z2, z1)


def test_unitary_squarefree_examples():
    assert gauss.unitary_squarefree_part(30) == 30
    assert gauss.unitary_squarefree_part(12) == 3
    assert gauss.unitary_squarefree_part(8) == 1
    assert gauss.unitary_squarefree_part(-12) == 3


def test_unitary_squarefree_all():
    for D in range(1, 10**5 + 1, 7):
        d1 = gauss.unitary_squarefree_part(D)
        rest = D // d1
        assert D % d1 == 0 and math.gcd(d1, rest) == 1
        # every prime of the cofactor divides D at least twice
        from sparseprime.ntheory import factorize

        assert all(e >= 2 for _, e in factorize(rest))
        assert all(e == 1 for _, e in factorize(d1))


def test_residue_examples():
    assert gauss.residue_a((1, 0), (3, 2)) == 1
    assert gauss.residue_a((2, 1), (1, 2)) == 2
    with pytest.raises(NotInvertible):
        gauss.residue_a((1, 2), (1, -3))
    with pytest.raises(NotInvertible):
        gauss.residue_a((2, 3), (2, 3))


def _random_pairs(count, seed=7):
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        z1 = (rng.randint(-100, 100), rng.randint(-100, 100))
        z2 = (rng.randint(-100, 100), rng.randint(-100, 100))
        d = abs(gauss.delta(z1, z2))
        if d == 0 or z1[0] ** 2 + z1[1] ** 2 > 10**4 or z2[0] ** 2 + z2[1] ** 2 > 10**4:
            continue
        if math.gcd(z1[0] ** 2 + z1[1] ** 2, d) != 1 or d > 400:
            continue
        out.append((z1, z2))
    return out


def test_residue_congruences():
    for z1, z2 in _random_pairs(1000):
        d = abs(gauss.delta(z1, z2))
        a = gauss.residue_a(z1, z2)
        n1 = z1[0] ** 2 + z1[1] ** 2
        assert (a * n1 - (z1[0] * z2[0] + z1[1] * z2[1])) % d == 0
        # z2 = a z1 mod |Delta| in both coordinates
        assert (z2[0] - a * z1[0]) % d == 0 and (z2[1] - a * z1[1]) % d == 0
        if math.gcd(z2[0] ** 2 + z2[1] ** 2, d) == 1:
            assert math.gcd(a, d) == 1


def test_vector_identity_equivalence():
    for z1, z2 in _random_pairs(1000, seed=11):
        d = abs(gauss.delta(z1, z2))
        a = gauss.residue_a(z1, z2)
        b = np.arange(d, dtype=np.int64)
        B = b * b + 1
        B1, B2 = B[:, None], B[None, :]
        scalar = (B2 - a * B1) % d == 0
        vec = ((z2[0] * B1 - z1[0] * B2) % d == 0) & ((z2[1] * B1 - z1[1] * B2) % d == 0)
        assert np.array_equal(scalar, vec)
    assert gauss.vector_congruence_holds((2, 1), (1, 2), 1, 1) == ((2 - 2 * 2) % 3 == 0)


def test_diagonal_identity():
    # i Delta w = z2 (b1^2 + 1) - z1 (b2^2 + 1) has an integral w exactly when the congruence holds
    z1, z2 = GaussInt(2, 1), GaussInt(1, 2)
    d = gauss.delta(z1, z2)
    for b1 in range(6):
        for b2 in range(6):
            v = z2 * (b1 * b1 + 1) - z1 * (b2 * b2 + 1)
            integral = v.re % d == 0 and v.im % d == 0
            assert integral == gauss.vector_congruence_holds(z1, z2, b1, b2)


def brute_pair_stats(N, Y):
    from sparseprime.ntheory import factorize, is_powerful_divisor_above, tau

    zs = [(r, s) for r in range(-60, 61) for s in range(-60, 61) if N < r * r + s * s <= 2 * N]
    terms_half, terms_one = [], []
    pw = gc = pairs = 0
    for z2 in zs:  # outer loop over z2, the opposite order to the implementation
        for z1 in zs:
            d = abs(gauss.delta(z1, z2))
            if d == 0:
                continue
            pairs += 1
            d1 = math.prod(p for p, e in factorize(d) if e == 1)
            t = tau(d) ** 2
            terms_half.append(t / math.sqrt(d1))
            terms_one.append(t / d1)
            pw += is_powerful_divisor_above(d, Y)
            gc += math.gcd(math.gcd(z2[0] - z1[0], z2[1] - z1[1]), d) > Y
    return math.fsum(terms_half), math.fsum(terms_one), pw, gc, pairs


@pytest.mark.parametrize("N,Y", [(4, 1), (10, 2), (37, 3.5)])
def test_pair_stats_brute(N, Y):
    got = gauss.pair_stats(N, Y)
    h, o, pw, gc, pairs = brute_pair_stats(N, Y)
    assert got.pairs == pairs
    assert got.count_powerful_Y == pw
    assert got.count_gcd_above_Y == gc
    assert math.isclose(got.sum_half, h, rel_tol=1e-12)
    assert math.isclose(got.sum_one, o, rel_tol=1e-12)
    assert got.sum_one <= got.sum_half


def test_pair_stats_growth():
    a, b = gauss.pair_stats(64, 1), gauss.pair_stats(128, 1)
    assert b.sum_half / a.sum_half <= 2**1.5 * 4
    # the pair count alone grows like N^2
    assert 3.5 < b.pairs / a.pairs < 4.5


def test_pair_stats_cap():
    with pytest.raises(WindowTooLarge):
        gauss.pair_stats(10**4 + 1, 1)


def test_gaussian_window():
    zs = gauss.gaussian_window(50)
    norms = zs[:, 0] ** 2 + zs[:, 1] ** 2
    assert np.all((norms > 50) & (norms <= 100))
    assert len(zs) == sum(50 < r * r + s * s <= 100 for r in range(-10, 11) for s in range(-10, 11))
