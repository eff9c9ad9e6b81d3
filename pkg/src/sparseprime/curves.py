"""Point counts and complete exponential sums over Z/DZ, with bound checks.

Exponential sums are computed exactly as integer *phase histograms*:
``phases[k]`` is the number of summands equal to e_D(k).  The complex value
is formed from the histogram with ``math.fsum``, and two sums can be
compared exactly by comparing histograms.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import BoundViolation, BudgetExceeded
from .ntheory import factorize, is_prime, primes_up_to

DIRECT_LIMIT = 10**4
S2_LIMIT = 3000
KLOOSTERMAN_BUDGET = 10**7

# explicit constants standing in for the implied constants of the Weil-type bounds
EPS_CONST = 4.0
S1_CONST = 3.0
S2_CONST = 5.0
N3_CONST = 5.0


@dataclass(frozen=True)
class PointCount:
    modulus: int
    a: int
    count: int
    deviation: int


@dataclass(frozen=True)
class ExpSum:
    modulus: int
    freq: tuple[int, ...]
    value_re: float
    value_im: float
    exact_terms: int
    phases: np.ndarray = field(compare=False, repr=False)

    @property
    def value(self) -> complex:
        return complex(self.value_re, self.value_im)

    def __abs__(self) -> float:
        return math.hypot(self.value_re, self.value_im)


@lru_cache(maxsize=64)
def _unit_circle(D: int):
    k = np.arange(D, dtype=np.float64)
    ang = 2.0 * np.pi * k / D
    return np.cos(ang), np.sin(ang)


def _from_phases(D: int, freq: Sequence[int], phases: np.ndarray) -> ExpSum:
    c, s = _unit_circle(D)
    w = phases.astype(np.float64)
    nz = np.flatnonzero(phases)
    re = math.fsum(w[nz] * c[nz])
    im = math.fsum(w[nz] * s[nz])
    return ExpSum(D, tuple(int(h) for h in freq), re, im, int(phases.sum()), phases)


def crt_product(ph_m: np.ndarray, ph_n: np.ndarray, m: int, n: int) -> np.ndarray:
    """Phase histogram of S_m * S_n as a sum mod mn, via e_m(k) e_n(l) = e_mn(kn + lm)."""
    k = np.flatnonzero(ph_m)
    l = np.flatnonzero(ph_n)
    idx = (k[:, None] * n + l[None, :] * m) % (m * n)
    out = np.zeros(m * n, dtype=np.int64)
    np.add.at(out, idx.ravel(), (ph_m[k][:, None] * ph_n[l][None, :]).ravel())
    return out


def twisted_frequencies(h: Sequence[int], m: int, n: int):
    """Frequencies (h * n^-1 mod m, h * m^-1 mod n) for the CRT splitting of a sum mod mn."""
    nbar = pow(n, -1, m) if m > 1 else 0
    mbar = pow(m, -1, n) if n > 1 else 0
    return tuple(x * nbar % m for x in h), tuple(x * mbar % n for x in h)


# ---------------------------------------------------------------------------
# conics x1^2 = A x2^2 + B


def _conic_solutions(A: int, B: int, D: int):
    """All (x1, x2) mod D with x1^2 = A x2^2 + B (mod D)."""
    x = np.arange(D, dtype=np.int64)
    sq = x * x % D
    order = np.argsort(sq, kind="stable")
    counts = np.bincount(sq, minlength=D)
    starts = np.cumsum(counts) - counts
    target = (A % D * sq + B % D) % D
    c = counts[target]
    total = int(c.sum())
    x2 = np.repeat(x, c)
    first = np.repeat(starts[target], c)
    within = np.arange(total) - np.repeat(np.cumsum(c) - c, c)
    return order[first + within], x2


def _conic_count(A: int, B: int, D: int) -> int:
    x = np.arange(D, dtype=np.int64)
    sq = x * x % D
    counts = np.bincount(sq, minlength=D)
    return int(counts[(A % D * sq + B % D) % D].sum())


def _n1_direct(a: int, q: int) -> int:
    # x1^2 + 1 = a (x2^2 + 1)  <=>  x1^2 = a x2^2 + (a - 1)
    return _conic_count(a, a - 1, q)


def count_N1(a: int, d: int) -> PointCount:
    """Number of (x1, x2) mod d with x1^2 + 1 = a (x2^2 + 1)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    a %= d
    if d <= DIRECT_LIMIT:
        count = _n1_direct(a, d)
    else:
        count = math.prod(_n1_direct(a % q, q) for q in factorize(d).prime_powers())
    return PointCount(d, a, count, count - d)


@lru_cache(maxsize=1 << 16)
def _eps_prime_power(a: int, q: int) -> int:
    return _n1_direct(a, q) - q


def eps_d(a: int, d: int) -> int:
    """Product over p^k || d of N1(a; p^k) - p^k, with a reduced mod each p^k."""
    if d < 1:
        raise ValueError("d must be >= 1")
    return math.prod(_eps_prime_power(a % q, q) for q in factorize(d).prime_powers())


def exp_sum_S1(a: int, h1: int, h2: int, D: int) -> ExpSum:
    """Sum of e_D(h1 x1 + h2 x2) over x1^2 + 1 = a (x2^2 + 1) (mod D)."""
    if not 1 <= D <= DIRECT_LIMIT:
        raise ValueError(f"D must be in [1, {DIRECT_LIMIT}]")
    x1, x2 = _conic_solutions(a, a - 1, D)
    ph = np.bincount((h1 % D * x1 + h2 % D * x2) % D, minlength=D)
    return _from_phases(D, (h1, h2), ph)


def exp_sum_FI(a: int, h1: int, h2: int, D: int) -> ExpSum:
    """The singular-curve comparison sum over x1^2 = a x2^2 (mod D)."""
    if not 1 <= D <= DIRECT_LIMIT:
        raise ValueError(f"D must be in [1, {DIRECT_LIMIT}]")
    x1, x2 = _conic_solutions(a, 0, D)
    ph = np.bincount((h1 % D * x1 + h2 % D * x2) % D, minlength=D)
    return _from_phases(D, (h1, h2), ph)


# ---------------------------------------------------------------------------
# diagonal cubics


def _cube_residues(D: int) -> np.ndarray:
    x = np.arange(D, dtype=np.int64)
    return x * x % D * x % D


def _cyclic_self_convolution(h: np.ndarray) -> np.ndarray:
    D = len(h)
    if D <= 4096:
        full = np.convolve(h, h)
        out = full[:D].copy()
        out[: D - 1] += full[D:]
        return out
    f = np.fft.rfft(h.astype(np.float64))
    raw = np.fft.irfft(f * f, n=D)
    out = np.rint(raw)
    if np.max(np.abs(raw - out)) > 0.25:
        raise ArithmeticError("FFT convolution lost integer precision")
    return out.astype(np.int64)


@lru_cache(maxsize=256)
def _cube_pair_counts(D: int) -> np.ndarray:
    """C[u] = number of (x1, x2) mod D with x1^3 + x2^3 = u."""
    hc = np.bincount(_cube_residues(D), minlength=D)
    out = _cyclic_self_convolution(hc)
    out.flags.writeable = False
    return out


def count_N2(gamma: int, p: int) -> PointCount:
    """Number of (x1, x2) mod p with x1^3 + x2^3 = gamma."""
    if not is_prime(p):
        raise ValueError("N2 is defined for prime p")
    gamma %= p
    count = int(_cube_pair_counts(p)[gamma])
    return PointCount(p, gamma, count, count - p)


def count_N3(a: int, d: int) -> PointCount:
    """Number of (x1..x4) mod d with x1^3 + x2^3 = a (x3^3 + x4^3)."""
    if not 1 <= d <= DIRECT_LIMIT:
        raise ValueError(f"d must be in [1, {DIRECT_LIMIT}]")
    a %= d
    C = _cube_pair_counts(d)
    v = np.arange(d, dtype=np.int64)
    count = int(np.dot(C[a * v % d], C))
    return PointCount(d, a, count, count - d**3)


def exp_sum_S2(a: int, h: Sequence[int], D: int) -> ExpSum:
    """Sum of e_D(h . x) over x1^3 + x2^3 = a (x3^3 + x4^3) (mod D)."""
    if not 1 <= D <= S2_LIMIT:
        raise ValueError(f"D must be in [1, {S2_LIMIT}]")
    h = tuple(int(v) for v in h)
    if len(h) != 4:
        raise ValueError("h must have four entries")
    x = np.arange(D, dtype=np.int64)
    cube = _cube_residues(D)

    def joint(hx, hy):
        # G[u, k] = #{(x, y): x^3 + y^3 = u, hx x + hy y = k}
        u = (cube[:, None] + cube[None, :]) % D
        k = (hx % D * x[:, None] + hy % D * x[None, :]) % D
        return np.bincount((u * D + k).ravel(), minlength=D * D).reshape(D, D)

    g12 = joint(h[0], h[1])[a % D * x % D]
    g34 = joint(h[2], h[3])
    prod = np.fft.fft(g12, axis=1) * np.fft.fft(g34, axis=1)
    raw = np.fft.ifft(prod.sum(axis=0)).real
    ph = np.rint(raw)
    if np.max(np.abs(raw - ph)) > 0.25:
        raise ArithmeticError("FFT convolution lost integer precision")
    return _from_phases(D, h, ph.astype(np.int64))


# ---------------------------------------------------------------------------
# hyper-Kloosterman sums


def kloosterman(k: int, a: int, p: int) -> ExpSum:
    """Kl_k(a; p): sum of e_p(x1 + ... + xk) over units with x1 ... xk = a."""
    if k < 2:
        raise ValueError("k must be >= 2")
    if not is_prime(p):
        raise ValueError("p must be prime")
    if p ** (k - 1) > KLOOSTERMAN_BUDGET:
        raise BudgetExceeded(f"Kl_{k} mod {p}: p^(k-1) = {p ** (k - 1)} over budget")
    a %= p
    if a == 0:
        return _from_phases(p, (a,), np.zeros(p, dtype=np.int64))
    units = np.arange(1, p, dtype=np.int64)
    inv = np.zeros(p, dtype=np.int64)
    inv[units] = [pow(int(u), -1, p) for u in units]
    prod = np.ones(1, dtype=np.int64)
    tot = np.zeros(1, dtype=np.int64)
    for _ in range(k - 1):
        prod = (prod[:, None] * units[None, :] % p).ravel()
        tot = ((tot[:, None] + units[None, :]) % p).ravel()
    last = a * inv[prod] % p
    ph = np.bincount((tot + last) % p, minlength=p)
    return _from_phases(p, (a,), ph)


# ---------------------------------------------------------------------------
# the bound suite


@dataclass(frozen=True)
class BoundRow:
    lemma: str
    p: int
    a: int
    h: str
    observed: float
    bound: float

    @property
    def ratio(self) -> float:
        return self.observed / self.bound


@dataclass
class WeilReport:
    p_max: int
    rows: list[BoundRow]

    def worst(self) -> dict[str, BoundRow]:
        out: dict[str, BoundRow] = {}
        for r in self.rows:
            if r.lemma not in out or r.ratio > out[r.lemma].ratio:
                out[r.lemma] = r
        return out

    @property
    def passed(self) -> bool:
        return all(r.ratio <= 1.0 for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["lemma", "p", "a", "h", "observed", "bound", "ratio"])
        for r in self.rows:
            w.writerow([r.lemma, r.p, r.a, r.h, f"{r.observed:.12g}", f"{r.bound:.12g}", f"{r.ratio:.12g}"])
        return buf.getvalue()


S2_H_GRID = (
    (0, 0, 0, 0),
    (1, 0, 0, 0),
    (0, 1, 0, 0),
    (0, 0, 1, 0),
    (0, 0, 0, 1),
    (1, 1, 0, 0),
    (0, 0, 1, 1),
    (1, 0, 1, 0),
    (1, -1, 0, 0),
    (1, 1, 1, 1),
    (1, -1, 1, -1),
    (1, 2, 3, 4),
    (2, 3, 5, 7),
)


def s2_frequency_grid(p: int, extra: int = 6) -> list[tuple[int, ...]]:
    """Reduced frequency grid for S2: fixed patterns plus a per-prime seeded sample."""
    rng = np.random.default_rng(p)
    grid = [tuple(v % p for v in h) for h in S2_H_GRID]
    grid += [tuple(int(v) for v in rng.integers(0, p, 4)) for _ in range(extra)]
    return list(dict.fromkeys(grid))


def _fmt_h(h) -> str:
    return ":".join(str(int(v)) for v in h)


def _worst(lemma, p, ratios, observed, bounds, a_vals, h_of) -> BoundRow:
    i = int(np.argmax(ratios))
    return BoundRow(lemma, p, int(a_vals[i]), h_of(i), float(observed[i]), float(bounds[i]))


def _n1_all(p: int) -> np.ndarray:
    x = np.arange(p, dtype=np.int64)
    sq = x * x % p
    counts = np.bincount(sq, minlength=p)
    a = np.arange(p, dtype=np.int64)[:, None]
    return counts[(a * (sq[None, :] + 1) - 1) % p].sum(axis=1)


def _s1_all_frequencies(a: int, p: int) -> np.ndarray:
    """S1(a, h1, h2; p) for every (h1, h2), as a p x p complex array."""
    x1, x2 = _conic_solutions(a, a - 1, p)
    ind = np.zeros((p, p), dtype=np.float64)
    ind[x1, x2] = 1.0
    return np.fft.ifft2(ind) * (p * p)


def _cubic_gauss_table(p: int) -> np.ndarray:
    """g[h, c] = sum_x e_p(h x + c x^3)."""
    x = np.arange(p, dtype=np.int64)
    lin = np.exp(2j * np.pi * (np.outer(x, x) % p) / p)
    cub = np.exp(2j * np.pi * (np.outer(_cube_residues(p), x) % p) / p)
    return lin.T @ cub


def s2_character_expansion(p: int, h, a_vals) -> np.ndarray:
    """S2 via (1/p) sum_w prod_j g(h_j, w a_j), with a_1 = a_2 = 1 and a_3 = a_4 = -a."""
    g = _cubic_gauss_table(p)
    w = np.arange(p, dtype=np.int64)
    a_vals = np.asarray(a_vals, dtype=np.int64)
    neg = (-a_vals[:, None] * w[None, :]) % p
    h = [v % p for v in h]
    front = g[h[0]] * g[h[1]]
    return (front[None, :] * g[h[2]][neg] * g[h[3]][neg]).sum(axis=1) / p


def kloosterman_all(p: int, k: int) -> np.ndarray:
    """Kl_k(a; p) for a = 1..p-1 via Kl_k(a) = sum_y e_p(y) Kl_{k-1}(a / y)."""
    units = np.arange(1, p, dtype=np.int64)
    inv = np.zeros(p, dtype=np.int64)
    inv[units] = [pow(int(u), -1, p) for u in units]
    ey = np.exp(2j * np.pi * units / p)
    kl = np.zeros(p, dtype=np.complex128)
    kl[units] = ey  # Kl_1(a) = e_p(a)
    for _ in range(k - 1):
        idx = units[:, None] * inv[units][None, :] % p
        nxt = np.zeros(p, dtype=np.complex128)
        nxt[units] = (kl[idx] * ey[None, :]).sum(axis=1)
        kl = nxt
    return kl[1:]


def _suite_for_prime(p: int) -> list[BoundRow]:
    rows: list[BoundRow] = []
    sp = math.sqrt(p)
    a_gen = np.arange(2, p)  # a != 0, 1
    a_unit = np.arange(1, p)
    if len(a_gen):
        eps = np.abs(_n1_all(p)[a_gen] - p).astype(np.float64)
        b = np.full(len(a_gen), EPS_CONST * sp)
        rows.append(_worst("eps_N1", p, eps / b, eps, b, a_gen, lambda i: ""))

        best = None
        for a in a_gen:
            s = np.abs(_s1_all_frequencies(int(a), p))
            bound = np.full((p, p), S1_CONST * sp)
            bound[0, 0] = S1_CONST * math.sqrt(p) * sp  # gcd(0, 0, p) = p
            r = s / bound
            i = np.unravel_index(int(np.argmax(r)), r.shape)
            cand = BoundRow("S1", p, int(a), _fmt_h(i), float(s[i]), float(bound[i]))
            if best is None or cand.ratio > best.ratio:
                best = cand
        rows.append(best)

    C = _cube_pair_counts(p)
    v = np.arange(p, dtype=np.int64)
    n3 = np.array([int(np.dot(C[int(a) * v % p], C)) for a in a_unit], dtype=np.int64)
    dev = np.abs(n3 - p**3).astype(np.float64)
    b = np.full(len(a_unit), N3_CONST * p**2.5)
    rows.append(_worst("N3", p, dev / b, dev, b, a_unit, lambda i: ""))

    best = None
    for h in s2_frequency_grid(p):
        vals = np.abs(s2_character_expansion(p, h, a_unit))
        g = math.gcd(math.gcd(math.gcd(h[0], h[1]), math.gcd(h[2], h[3])), p)
        bound = S2_CONST * g * p * p
        i = int(np.argmax(vals))
        cand = BoundRow("S2", p, int(a_unit[i]), _fmt_h(h), float(vals[i]), bound)
        if best is None or cand.ratio > best.ratio:
            best = cand
    rows.append(best)

    for k in (2, 3):
        kl = np.abs(kloosterman_all(p, k))
        b = np.full(len(a_unit), k * p ** ((k - 1) / 2))
        rows.append(_worst(f"Kl{k}", p, kl / b, kl, b, a_unit, lambda i: ""))
    return rows


def verify_weil_suite(p_max: int, *, workers: int = 1, raise_on_violation: bool = True) -> WeilReport:
    """Check the explicit-constant bounds for every prime p <= p_max.

    Per prime and per lemma the row with the worst observed/bound ratio is
    kept.  Rows are ordered by (lemma, p).
    """
    if p_max > 300:
        raise ValueError("p_max must be <= 300")
    primes = [int(p) for p in primes_up_to(p_max)]
    if workers > 1 and len(primes) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            per_prime = list(ex.map(_suite_for_prime, primes))
    else:
        per_prime = [_suite_for_prime(p) for p in primes]
    rows = sorted((r for rs in per_prime for r in rs), key=lambda r: (r.lemma, r.p, r.a))
    report = WeilReport(p_max, rows)
    if raise_on_violation:
        for r in rows:
            if r.ratio > 1.0:
                raise BoundViolation(r.lemma, r.p, r.a, r.h, r.observed, r.bound)
    return report


def iter_coprime_pairs(limit: int, max_product: int | None = None) -> Iterable[tuple[int, int]]:
    for m in range(2, limit + 1):
        for n in range(m + 1, limit + 1):
            if math.gcd(m, n) == 1 and (max_product is None or m * n <= max_product):
                yield m, n
