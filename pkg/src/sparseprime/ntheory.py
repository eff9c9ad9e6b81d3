"""Integer primitives: factorization, multiplicative functions, local densities.

Everything here is exact integer arithmetic except the truncated series
behind :func:`kappa`, which is summed with ``math.fsum``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import DenominatorTooSmall

# Deterministic Miller-Rabin witnesses; correct for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_TRIAL_LIMIT = 10**6
_RHO2_DIRECT_LIMIT = 10**6


@dataclass(frozen=True)
class Factorization:
    n: int
    factors: tuple[tuple[int, int], ...]

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def prime_powers(self) -> list[int]:
        return [p**e for p, e in self.factors]


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """Return a nontrivial factor of the odd composite n."""
    for c in range(1, 200):
        y, m, g, r, q = 2, 128, 1, 1, 1
        f = lambda v: (v * v + c) % n  # noqa: E731
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = f(y)
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = f(y)
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = f(ys)
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"Pollard rho failed on {n}")


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_brent(n)
    _split(d, out)
    _split(n // d, out)


@lru_cache(maxsize=65536)
def factorize(n: int) -> Factorization:
    """Prime factorization of ``1 <= n < 2**63`` (trial division, then Pollard rho)."""
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    m = int(n)
    found: dict[int, int] = {}
    for p in (2, 3, 5):
        while m % p == 0:
            found[p] = found.get(p, 0) + 1
            m //= p
    # wheel mod 30
    p, steps, i = 7, (4, 2, 4, 2, 4, 6, 2, 6), 0
    limit = min(_TRIAL_LIMIT, math.isqrt(m))
    while p <= limit:
        if m % p == 0:
            while m % p == 0:
                found[p] = found.get(p, 0) + 1
                m //= p
            limit = min(_TRIAL_LIMIT, math.isqrt(m))
        p += steps[i]
        i = (i + 1) % 8
    if m > 1:
        if m <= _TRIAL_LIMIT**2 or is_prime(m):
            # anything left below the square of the trial bound is prime
            found[m] = found.get(m, 0) + 1
        else:
            _split(m, found)
    return Factorization(int(n), tuple(sorted(found.items())))


def mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def tau(n: int) -> int:
    return math.prod(e + 1 for _, e in factorize(n))


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def powerful_part(n: int) -> int:
    """Largest powerful divisor of n: product of p^e over primes with e >= 2."""
    return math.prod(p**e for p, e in factorize(n) if e >= 2)


def is_powerful_divisor_above(n: int, Y: float) -> bool:
    # every powerful divisor of n divides the powerful part
    return powerful_part(n) > Y


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    """Combine x = r1 (m1), x = r2 (m2) for coprime moduli."""
    t = (r2 - r1) * pow(m1, -1, m2) % m2
    return r1 + m1 * t


def _crt_lists(parts: Sequence[tuple[list[int], int]]) -> list[int]:
    residues, modulus = [0], 1
    for roots, q in parts:
        residues = [crt_pair(r, modulus, s, q) for r in residues for s in roots]
        modulus *= q
    return sorted(r % modulus for r in residues)


def _roots_prime_power(p: int, e: int) -> list[int]:
    if p == 2:
        return [1] if e == 1 else []
    if p % 4 == 3:
        return []
    base = [v for v in range(p) if (v * v + 1) % p == 0]
    q = p
    for _ in range(1, e):
        q_next = q * p
        lifted = []
        for v in base:
            # Newton step; f'(v) = 2v is a unit since p is odd and p does not divide v
            v = (v - (v * v + 1) * pow(2 * v, -1, q_next)) % q_next
            lifted.append(v)
        base, q = lifted, q_next
    return sorted(base)


def roots_nu_squared_plus_one(d: int) -> list[int]:
    """All residues v mod d with v^2 + 1 = 0 (mod d), sorted."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if d == 1:
        return [0]
    parts = []
    for p, e in factorize(d):
        roots = _roots_prime_power(p, e)
        if not roots:
            return []
        parts.append((roots, p**e))
    return _crt_lists(parts)


def _cube_histogram(q: int) -> np.ndarray:
    x = np.arange(q, dtype=np.int64)
    return np.bincount(x * x % q * x % q, minlength=q)


def _rho2_direct(q: int) -> int:
    h = _cube_histogram(q)
    neg = (-np.arange(q)) % q
    return int(np.dot(h, h[neg]))


def _cube_roots_of_minus_one(p: int, e: int) -> int:
    """Number of w mod p^e with w^3 = -1."""
    if p == 3:
        return 1 if e == 1 else 3
    # p != 3: the roots mod p lift uniquely
    return 3 if p % 3 == 1 else 1


@lru_cache(maxsize=4096)
def _rho2_prime_power(p: int, e: int) -> int:
    q = p**e
    if q <= _RHO2_DIRECT_LIMIT:
        return _rho2_direct(q)
    return _rho2_lifted(p, e)


def _rho2_lifted(p: int, e: int) -> int:
    q = p**e
    # beta a unit: alpha = w * beta with w^3 = -1; otherwise both divisible by p
    units = (q - q // p) * _cube_roots_of_minus_one(p, e)
    if e <= 3:
        return units + p ** (2 * (e - 1))
    return units + p**4 * _rho2_prime_power(p, e - 3)


@lru_cache(maxsize=4096)
def _rho1_prime_power(p: int, e: int) -> int:
    return len(_roots_prime_power(p, e))


def rho(j: int, d: int) -> int:
    """Local density: roots of v^2+1 (j=1) or pairs with a^3+b^3 = 0 (j=2) mod d."""
    if j not in (1, 2):
        raise ValueError("j must be 1 or 2")
    if d < 1:
        raise ValueError("d must be >= 1")
    local = _rho1_prime_power if j == 1 else _rho2_prime_power
    return math.prod(local(p, e) for p, e in factorize(d))


def euler_phi_gaussian(d: int) -> int:
    """Number of units in Z[i]/dZ[i]."""
    out = 1
    for p, e in factorize(d):
        q2 = p ** (2 * e)
        if p == 2:
            out *= q2 // 2
        elif p % 4 == 1:
            out *= q2 // (p * p) * (p - 1) ** 2
        else:
            out *= q2 // (p * p) * (p * p - 1)
    return out


def divisor_witness(n: int, k: int) -> int:
    """A divisor d of n with d <= n^(1/k) and tau(n) <= 2^(k^2) tau(d)^(k^3).

    Builds n = b_1 b_2^2 ... b_k^k with b_1..b_{k-1} squarefree, takes from
    each b_j the product of its floor(omega(b_j)/k) smallest primes, and
    multiplies by b_k.
    """
    if n < 1 or k < 2:
        raise ValueError("need n >= 1 and k >= 2")
    fac = factorize(n)
    b_k = math.prod(p ** (e // k) for p, e in fac)
    d = b_k
    for j in range(1, k):
        primes = [p for p, e in fac if e % k == j]
        d *= math.prod(primes[: len(primes) // k])
    if not _witness_ok(n, k, d):
        # not expected; keep the contract with an exhaustive scan
        d = max(
            (c for c in divisors(n) if c**k <= n),
            key=tau,
        )
    return d


def _witness_ok(n: int, k: int, d: int) -> bool:
    return n % d == 0 and d**k <= n and tau(n) <= 2 ** (k * k) * tau(d) ** (k**3)


# ---------------------------------------------------------------------------
# Arithmetic constants


@dataclass(frozen=True)
class KappaResult:
    j: int
    value: float
    truncation: int
    tail_estimate: float
    numerator: float
    denominator: float


def mobius_table(limit: int) -> np.ndarray:
    """mu(c) for 0 <= c <= limit (entry 0 is unused)."""
    mu = np.ones(limit + 1, dtype=np.int64)
    mu[0] = 0
    for p in primes_up_to(limit):
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def primes_up_to(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(limit + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve)


@lru_cache(maxsize=8)
def spf_table(limit: int) -> np.ndarray:
    """Smallest prime factor of every integer up to limit; spf[0] = spf[1] = 0."""
    spf = np.zeros(limit + 1, dtype=np.int64)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == 0:
            block = spf[p * p :: p]
            block[block == 0] = p
    rest = np.flatnonzero(spf == 0)
    spf[rest] = rest
    spf[:2] = 0
    spf.flags.writeable = False
    return spf


def _squarefree_rho_table(j: int, limit: int) -> np.ndarray:
    """rho_j(c) for squarefree c <= limit (garbage elsewhere; masked by mu)."""
    table = np.ones(limit + 1, dtype=np.float64)
    for p in primes_up_to(limit):
        table[p::p] *= _rho_prime(j, int(p))
    return table


def _rho_prime(j: int, p: int) -> int:
    if j == 1:
        return 1 if p == 2 else (2 if p % 4 == 1 else 0)
    return 1 + (p - 1) * _cube_roots_of_minus_one(p, 1)


def _tail_bounds(j: int, T: int) -> tuple[float, float]:
    # Partial summation with sum_{c<=x} tau(c) <= x(log x + 1) and
    # sum_{c<=x} tau_3(c) <= x(log x + 1)^2.  Only squarefree c survive mu, where
    # rho_1(c) <= 2^omega(c) = tau(c) and rho_2(c) <= c * 3^omega(c) = c * tau_3(c).
    L = math.log(T)
    num_tail = 1.0 / T
    if j == 1:
        den_tail = 2.0 * (L + 2.0) / T
    else:
        s = L + 1.0
        den_tail = 2.0 * (s * s + 2.0 * s + 2.0) / T
    return num_tail, den_tail


def kappa(
    j: int,
    T: int = 10**4,
    *,
    exponent: int | None = None,
    rho_override: Callable[[int], int] | None = None,
) -> KappaResult:
    """Truncated arithmetic factor kappa_j at truncation T.

    ``tail_estimate`` bounds |kappa_j - value| and also |value(T') - value(T)|
    for every T' >= T.  ``exponent`` overrides the denominator power 1+j;
    the tail bound assumes the default.
    """
    if j not in (1, 2):
        raise ValueError("j must be 1 or 2")
    if T < 100:
        raise ValueError("truncation must be >= 100")
    power = 1 + j if exponent is None else exponent
    mu = mobius_table(T)
    c = np.arange(1, T + 1, dtype=np.float64)
    sf = np.flatnonzero(mu[1:]) + 1
    if rho_override is None:
        rho_vals = _squarefree_rho_table(j, T)[sf]
    else:
        rho_vals = np.array([rho_override(int(v)) for v in sf], dtype=np.float64)
    num = math.fsum(mu[1:] / c**2)
    den = math.fsum(mu[sf] * rho_vals / np.asarray(sf, dtype=np.float64) ** power)
    num_tail, den_tail = _tail_bounds(j, T)
    # guard keeps the true denominator at least half the truncated one
    if abs(den) <= 2.0 * den_tail:
        raise DenominatorTooSmall(
            f"kappa(j={j}, T={T}): |denominator| {abs(den):.3g} <= 2 x tail {den_tail:.3g}"
        )
    tail = (num_tail * abs(den) + abs(num) * den_tail) / (abs(den) * (abs(den) - den_tail))
    return KappaResult(j, num / den, int(T), tail, num, den)
