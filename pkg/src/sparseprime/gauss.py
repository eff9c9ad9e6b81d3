"""Gaussian integers and the bilinear-form quantities built from pairs of them.

For z1, z2 in Z[i] the modulus of the bilinear problem is
Delta = Im(z2 * conj(z1)).  All congruences here are taken modulo |Delta|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NotInvertible, WindowTooLarge
from .ntheory import factorize, powerful_part

MAX_PAIR_WINDOW = 10**4
TAU_EXPONENT = 2


class GaussInt(NamedTuple):
    re: int
    im: int

    def __add__(self, other):
        return GaussInt(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return GaussInt(self.re - other.re, self.im - other.im)

    def __mul__(self, other):
        if isinstance(other, int):
            return GaussInt(self.re * other, self.im * other)
        return GaussInt(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def conj(self) -> "GaussInt":
        return GaussInt(self.re, -self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im


def delta(z1: GaussInt, z2: GaussInt) -> int:
    """Im(z2 * conj(z1)) = r1 s2 - r2 s1."""
    return z1[0] * z2[1] - z2[0] * z1[1]


def unitary_squarefree_part(D: int) -> int:
    """Product of the primes dividing D exactly once."""
    D = abs(D)
    if D < 1:
        raise ValueError("D must be nonzero")
    return math.prod(p for p, e in factorize(D) if e == 1)


def residue_a(z1: GaussInt, z2: GaussInt) -> int:
    """The residue a mod |Delta| with a |z1|^2 = r1 r2 + s1 s2.

    Equivalently z2 = a z1 (mod |Delta|) in both coordinates.  The result is
    a unit mod |Delta| exactly when |z2|^2 is also coprime to Delta.
    """
    d = abs(delta(z1, z2))
    if d == 0:
        raise NotInvertible("Delta(z1, z2) = 0: diagonal pair")
    n1 = z1[0] ** 2 + z1[1] ** 2
    if math.gcd(n1, d) != 1:
        raise NotInvertible(f"gcd(|z1|^2, Delta) = gcd({n1}, {d}) > 1")
    if d == 1:
        return 0
    inner = z1[0] * z2[0] + z1[1] * z2[1]
    return inner * pow(n1, -1, d) % d


def vector_congruence_holds(z1, z2, b1: int, b2: int) -> bool:
    """Whether z2 (b1^2+1) = z1 (b2^2+1) (mod |Delta|) in both coordinates."""
    d = abs(delta(z1, z2))
    B1, B2 = b1 * b1 + 1, b2 * b2 + 1
    return (z2[0] * B1 - z1[0] * B2) % d == 0 and (z2[1] * B1 - z1[1] * B2) % d == 0


@dataclass(frozen=True)
class PairStats:
    N: int
    Y: float
    sum_half: float
    sum_one: float
    count_powerful_Y: int
    count_gcd_above_Y: int
    pairs: int


def gaussian_window(N: int) -> np.ndarray:
    """All z = (r, s) with N < r^2 + s^2 <= 2N, as an (m, 2) integer array."""
    R = math.isqrt(2 * N)
    r, s = np.meshgrid(np.arange(-R, R + 1), np.arange(-R, R + 1), indexing="ij")
    nrm = r * r + s * s
    keep = (nrm > N) & (nrm <= 2 * N)
    return np.stack([r[keep], s[keep]], axis=1).astype(np.int64)


def _arith_tables(limit: int):
    tau = np.ones(limit + 1, dtype=np.int64)
    d1 = np.ones(limit + 1, dtype=np.int64)
    powerful = np.ones(limit + 1, dtype=np.int64)
    for m in range(1, limit + 1):
        f = factorize(m)
        tau[m] = math.prod(e + 1 for _, e in f)
        d1[m] = math.prod(p for p, e in f if e == 1)
        powerful[m] = powerful_part(m)
    return tau, d1, powerful


def pair_stats(N: int, Y: float, *, tau_exponent: int = TAU_EXPONENT) -> PairStats:
    """Exact pair sums over z1, z2 with |z_j|^2 in (N, 2N] and Delta != 0.

    sum_half sums tau(|Delta|)^k / sqrt(Delta_1) and sum_one sums
    tau(|Delta|)^k / Delta_1, where Delta_1 is the unitary squarefree part.
    Counts are of pairs whose |Delta| has a powerful divisor above Y, and of
    pairs with gcd(r2-r1, s2-s1, |Delta|) > Y.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    if N > MAX_PAIR_WINDOW:
        raise WindowTooLarge(f"pair_stats: N={N} above desk-scale cap {MAX_PAIR_WINDOW}")
    zs = gaussian_window(N)
    limit = 2 * N
    tau, d1, powerful = _arith_tables(limit)
    # integer histogram over |Delta|; the real sums are formed once at the end
    hist = np.zeros(limit + 1, dtype=np.int64)
    gcd_count = 0
    r2, s2 = zs[:, 0], zs[:, 1]
    for r1, s1 in zs:
        dl = np.abs(r1 * s2 - r2 * s1)
        nz = dl > 0
        dl = dl[nz]
        hist += np.bincount(dl, minlength=limit + 1)
        g = np.gcd(np.gcd(r2[nz] - r1, s2[nz] - s1), dl)
        gcd_count += int(np.count_nonzero(g > Y))
    idx = np.flatnonzero(hist)
    w = hist[idx].astype(np.float64) * tau[idx].astype(np.float64) ** tau_exponent
    sum_half = math.fsum(w / np.sqrt(d1[idx]))
    sum_one = math.fsum(w / d1[idx])
    count_pow = int(hist[idx][powerful[idx] > Y].sum())
    return PairStats(
        N=N,
        Y=Y,
        sum_half=sum_half,
        sum_one=sum_one,
        count_powerful_Y=count_pow,
        count_gcd_above_Y=gcd_count,
        pairs=int(hist.sum()),
    )
