"""The weighted sequences a_n^(1), a_n^(2), b_n over windows (X, 2X], and sieve sums on them.

Forms:

* ``quartic_shift``: n = a^2 + (b^2+1)^2, (a, b^2+1) = 1, b > 0, weight 2b
* ``cubes``: n = a^2 + (c^3+d^3)^2, (a, c^3+d^3) = 1, c, d > 0, weight Omega(c, d)
* ``two_squares``: n = a^2 + b^2, (a, b) = 1, b > 0, weight 1

``a`` always runs over a >= 0.
"""

from __future__ import annotations

import builtins
import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import WindowTooLarge
from .ntheory import primes_up_to, spf_table

FORMS = ("quartic_shift", "cubes", "two_squares")
FORM_ALIASES = {"b2p1": "quartic_shift", "squares": "two_squares"}
MAX_REPRESENTATIONS = 3 * 10**7
MAX_X = {"quartic_shift": 10**9, "cubes": 10**9, "two_squares": 10**10}


def canonical_form(form: str) -> str:
    form = FORM_ALIASES.get(form, form)
    if form not in FORMS:
        raise ValueError(f"unknown form {form!r}; expected one of {FORMS}")
    return form


def omega_weight(c, d):
    """9 c^2 d^2 / (c^3 + d^3)."""
    c = np.asarray(c, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    out = 9.0 * c * c * d * d / (c**3 + d**3)
    return float(out) if out.ndim == 0 else out


def _midpoints(n: int) -> np.ndarray:
    return (np.arange(n, dtype=np.float64) + 0.5) / n


def omega_integral_check(grid: int = 2000, *, weight: bool = True) -> float:
    """Midpoint rule for the integral of Omega over {u, v >= 0: u^3 + v^3 <= 1}.

    The inner variable is rescaled to v = t (1 - u^3)^(1/3), t in [0, 1].
    With ``weight=False`` the integrand is 1 and the result is the region's area.
    """
    if grid < 10:
        raise ValueError("grid must be >= 10")
    u = _midpoints(grid)
    t = _midpoints(grid)
    top = np.cbrt(1.0 - u**3)
    v = top[:, None] * t[None, :]
    f = omega_weight(u[:, None], v) if weight else np.ones_like(v)
    inner = f.mean(axis=1) * top
    return math.fsum(inner) / grid


def _a_range(X: int, m: int, upper: int | None = None) -> tuple[int, int]:
    """The a >= 0 with X < a^2 + m^2 <= upper (default 2X), as a half-open range [lo, hi)."""
    top = (2 * X if upper is None else upper) - m * m
    if top < 0:
        return 0, 0
    low = X - m * m
    lo = 0 if low < 0 else math.isqrt(low) + 1
    return lo, math.isqrt(top) + 1


def _strata(form: str, X: int, upper: int | None = None):
    """Yield (m, lo, hi, weight, witness) strata of the enumeration.

    ``m`` is the second summand's root, ``weight`` the per-representation
    weight before kappa, and ``witness`` the parameters producing m.
    Representations cover n in (X, upper], upper defaulting to 2X.
    """
    if upper is None:
        upper = 2 * X
    if form == "quartic_shift":
        b = 1
        while (b * b + 1) ** 2 <= upper:
            m = b * b + 1
            lo, hi = _a_range(X, m, upper)
            if hi > lo:
                yield m, lo, hi, 2.0 * b, (b,)
            b += 1
    elif form == "cubes":
        top = math.isqrt(upper)
        sums: dict[int, list[tuple[int, int]]] = {}
        c = 1
        while c**3 + 1 <= top:
            d = 1
            while c**3 + d**3 <= top:
                sums.setdefault(c**3 + d**3, []).append((c, d))
                d += 1
            c += 1
        for s in sorted(sums):
            lo, hi = _a_range(X, s, upper)
            if hi > lo:
                pairs = sums[s]
                w = math.fsum(9.0 * c * c * d * d / (c**3 + d**3) for c, d in pairs)
                yield s, lo, hi, w, tuple(pairs)
    else:
        for b in range(1, math.isqrt(upper) + 1):
            lo, hi = _a_range(X, b, upper)
            if hi > lo:
                yield b, lo, hi, 1.0, (b,)


def representation_budget(form: str, X: int) -> int:
    """Number of representations (before the gcd filter) enumerate() would visit, capped."""
    form = canonical_form(form)
    total = 0
    for m, lo, hi, _, wit in _strata(form, X):
        total += (hi - lo) * (len(wit) if form == "cubes" else 1)
        if total > MAX_REPRESENTATIONS:
            break
    return total


@dataclass
class SieveSeries:
    form: str
    X: int
    kappa: float
    n: np.ndarray
    raw_weight: np.ndarray  # weight before kappa; integer-valued for quartic_shift and two_squares
    reps: np.ndarray
    witnesses: dict | None = field(default=None, repr=False)

    @property
    def weight(self) -> np.ndarray:
        return self.kappa * self.raw_weight

    @property
    def total_mass(self) -> float:
        return math.fsum(self.weight)

    @property
    def entry_count(self) -> int:
        return int(self.n.size)

    def dense(self, *, raw: bool = False) -> np.ndarray:
        """Weights indexed by n - X - 1 for n in (X, 2X]."""
        out = np.zeros(self.X, dtype=np.float64)
        out[self.n - self.X - 1] = self.raw_weight if raw else self.weight
        return out

    def dense_int(self) -> np.ndarray:
        """Integer weights; only for two_squares, or quartic_shift before kappa."""
        if self.form == "cubes":
            raise TypeError("cubes weights are not integers")
        out = np.zeros(self.X, dtype=np.int64)
        out[self.n - self.X - 1] = np.rint(self.raw_weight).astype(np.int64)
        return out

    def summary(self) -> dict:
        return {"form": self.form, "X": self.X, "total_mass": self.total_mass, "entry_count": self.entry_count}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\r\n")
        w.writerow(["n", "weight"])
        for n, wt in zip(self.n.tolist(), self.weight.tolist()):
            w.writerow([n, repr(wt)])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True)

    def validate(self) -> bool:
        """Re-check every stored witness against its n and the coprimality rule."""
        if self.witnesses is None:
            raise ValueError("series was enumerated without witnesses")
        a, m, n = self.witnesses["a"], self.witnesses["m"], self.witnesses["n"]
        ok = np.all(a * a + m * m == n)
        ok &= np.all(np.gcd(a, m) == 1)
        ok &= np.all((n > self.X) & (n <= 2 * self.X))
        counts = np.bincount(np.searchsorted(self.n, n), minlength=self.n.size)
        ok &= bool(np.array_equal(counts, self.reps))
        if self.form == "quartic_shift":
            b = self.witnesses["b"]
            ok &= bool(np.all(b * b + 1 == m))
        elif self.form == "cubes":
            c, d = self.witnesses["c"], self.witnesses["d"]
            ok &= bool(np.all(c**3 + d**3 == m))
        return bool(ok)


def enumerate(
    form: str, X: int, kappa_value: float = 1.0, *, witnesses: bool = False, part: tuple[int, int] | None = None
) -> SieveSeries:
    """All representations of n in (X, 2X] in the given form, with weights.

    ``kappa_value`` scales the weights of quartic_shift and cubes; it is
    ignored for two_squares.  ``part = (lo, hi)`` restricts to n in (lo, hi],
    a sub-window of (X, 2X].
    """
    form = canonical_form(form)
    if X < 1:
        raise ValueError("X must be >= 1")
    if X > MAX_X[form]:
        raise WindowTooLarge(f"X={X} above {MAX_X[form]} for {form}")
    budget = representation_budget(form, X)
    if budget > MAX_REPRESENTATIONS:
        raise WindowTooLarge(f"{form} window X={X} has over {MAX_REPRESENTATIONS} representations")
    start, stop = X, 2 * X
    if part is not None:
        start, stop = part
        if not X <= start <= stop <= 2 * X:
            raise ValueError("part must lie inside (X, 2X]")
    ns, ws, ones = [], [], []
    wit = {"a": [], "m": [], "n": [], "b": [], "c": [], "d": []}
    for m, lo, hi, w, params in _strata(form, start, stop):
        a = np.arange(lo, hi, dtype=np.int64)
        a = a[np.gcd(a, m) == 1]
        if a.size == 0:
            continue
        n = a * a + m * m
        ns.append(n)
        ws.append(np.full(a.size, w))
        mult = len(params) if form == "cubes" else 1
        ones.append(np.full(a.size, mult, dtype=np.int64))
        if witnesses:
            if form == "cubes":
                for c, d in params:
                    wit["a"].append(a)
                    wit["m"].append(np.full(a.size, m, dtype=np.int64))
                    wit["n"].append(n)
                    wit["c"].append(np.full(a.size, c, dtype=np.int64))
                    wit["d"].append(np.full(a.size, d, dtype=np.int64))
            else:
                wit["a"].append(a)
                wit["m"].append(np.full(a.size, m, dtype=np.int64))
                wit["n"].append(n)
                wit["b"].append(np.full(a.size, params[0], dtype=np.int64))
    if ns:
        all_n = np.concatenate(ns)
        all_w = np.concatenate(ws)
        all_r = np.concatenate(ones)
        uniq, inv = np.unique(all_n, return_inverse=True)
        raw = np.bincount(inv, weights=all_w, minlength=uniq.size)
        reps = np.bincount(inv, weights=all_r, minlength=uniq.size).astype(np.int64)
    else:
        uniq = np.zeros(0, dtype=np.int64)
        raw = np.zeros(0)
        reps = np.zeros(0, dtype=np.int64)
    stored = None
    if witnesses:
        stored = {k: (np.concatenate(v) if v else np.zeros(0, dtype=np.int64)) for k, v in wit.items()}
    kap = 1.0 if form == "two_squares" else float(kappa_value)
    return SieveSeries(form, X, kap, uniq, raw, reps, stored)


def rep_count_two_cubes(n: int) -> int:
    """Ordered pairs (c, d), c, d > 0, with c^3 + d^3 = n."""
    if n < 2:
        return 0
    if n > 10**12:
        raise ValueError("n must be <= 10^12")
    c = np.arange(1, int(round(n ** (1 / 3))) + 2, dtype=np.int64)
    rest = n - c**3
    c, rest = c[rest > 0], rest[rest > 0]
    d = np.rint(np.cbrt(rest.astype(np.float64))).astype(np.int64)
    return int(np.count_nonzero(d**3 == rest))


def remark_counts(d: int, form: str) -> int:
    """Residue pairs (mu, nu) mod d with mu^2 + (nu^2+1)^2 = 0 (quartic) or mu^2 + nu^2 = 0."""
    form = canonical_form(form)
    if not 1 <= d <= 10**4:
        raise ValueError("d must be in [1, 10^4]")
    x = np.arange(d, dtype=np.int64)
    sq = x * x % d
    counts = np.bincount(sq, minlength=d)
    if form == "quartic_shift":
        second = (sq + 1) % d
        second = second * second % d
    elif form == "two_squares":
        second = sq
    else:
        raise ValueError("remark_counts is defined for quartic_shift and two_squares")
    return int(counts[(-second) % d].sum())


# ---------------------------------------------------------------------------
# sifting


@dataclass(frozen=True)
class SiftedSum:
    d: int
    Z: float
    value: float


def rough_mask(lo: int, hi: int, Z: float) -> np.ndarray:
    """Boolean mask over [lo, hi] of integers with no prime factor < Z (1 counts as rough)."""
    size = hi - lo + 1
    mask = np.ones(max(size, 0), dtype=bool)
    if size <= 0:
        return mask
    for p in primes_up_to(math.ceil(Z) - 1 if Z > 2 else 1):
        p = int(p)
        if p >= Z:
            break
        start = ((lo + p - 1) // p) * p
        mask[start - lo :: p] = False
    return mask


def sifted_sum(series: SieveSeries, d: int, Z: float) -> SiftedSum:
    """Sum of weights at dn, n in (X/d, 2X/d], over n free of primes below Z."""
    if d < 1:
        raise ValueError("d must be >= 1")
    X = series.X
    lo, hi = X // d + 1, (2 * X) // d
    if hi < lo:
        return SiftedSum(d, Z, 0.0)
    on = series.n % d == 0
    k = series.n[on] // d
    keep = rough_mask(lo, hi, Z)[k - lo]
    return SiftedSum(d, Z, math.fsum(series.weight[on][keep]))


@dataclass(frozen=True)
class BuchstabCheck:
    X: int
    Z: float
    lhs: int
    main: int
    single: int
    double: int

    @property
    def residual(self) -> int:
        return self.lhs - (self.main - self.single + self.double)

    @property
    def holds(self) -> bool:
        return self.residual == 0


def buchstab_identity_check(X: int, Z: float) -> BuchstabCheck:
    """Both sides of the doubled Buchstab identity on the b_n sequence, in integers.

    S(B, 2 sqrt X) = S(B, Z) - sum_{Z <= p < 2 sqrt X} S(B_p, Z)
                     + sum_{Z <= p2 < p1 < 2 sqrt X} S(B_{p1 p2}, p2)
    """
    if X > 10**6:
        raise WindowTooLarge("buchstab_identity_check needs X <= 10^6")
    z1 = 2.0 * math.sqrt(X)
    if not 0 < Z <= z1:
        raise ValueError("need 0 < Z <= 2 sqrt(X)")
    w = enumerate("two_squares", X).dense_int()
    spf = spf_table(2 * X)
    big = np.iinfo(np.int64).max

    def lpf(k: np.ndarray) -> np.ndarray:
        out = spf[k].astype(np.int64)
        out[k == 1] = big
        return out

    def s(dv: int, z: float) -> int:
        lo, hi = X // dv + 1, (2 * X) // dv
        if hi < lo:
            return 0
        k = np.arange(lo, hi + 1, dtype=np.int64)
        vals = w[k * dv - X - 1]
        return int(vals[lpf(k) >= z].sum())

    ps = [int(p) for p in primes_up_to(math.ceil(z1)) if Z <= p < z1]
    lhs = s(1, z1)
    main = s(1, Z)
    single = sum(s(p, Z) for p in ps)
    double = 0
    for i, p1 in builtins.enumerate(ps):
        for p2 in ps[:i]:
            if p1 * p2 > 2 * X:
                break
            double += s(p1 * p2, p2)
    return BuchstabCheck(X, Z, lhs, main, single, double)


# ---------------------------------------------------------------------------
# Type I comparison


def typei_profile(j: int, X: int, D: int, kappa_value: float | None = None):
    """Per-modulus relative discrepancies |sum_n a_dn - sum_n b_dn| / (X/d) for d in [D, 2D)."""
    if j not in (1, 2):
        raise ValueError("j must be 1 or 2")
    if X > 10**7:
        raise WindowTooLarge("typei needs X <= 10^7")
    if D < 1 or D > X**0.75:
        raise ValueError("need 1 <= D <= X^(3/4)")
    if kappa_value is None:
        from .ntheory import kappa

        kappa_value = kappa(j).value
    A = enumerate("quartic_shift" if j == 1 else "cubes", X, kappa_value).dense()
    B = enumerate("two_squares", X).dense()
    diff = A - B
    ds = np.arange(D, 2 * D, dtype=np.int64)
    out = np.empty(ds.size)
    for i, d in builtins.enumerate(ds.tolist()):
        first = (X // d + 1) * d
        out[i] = abs(math.fsum(diff[first - X - 1 :: d])) / (X / d)
    return ds, out


def typei_discrepancy(j: int, X: int, D: int, kappa_value: float | None = None) -> float:
    """Worst single-modulus relative discrepancy between A^(j) and B over d in [D, 2D)."""
    _, vals = typei_profile(j, X, D, kappa_value)
    return float(vals.max())


# ---------------------------------------------------------------------------
# growth of window masses


@dataclass(frozen=True)
class WindowCounts:
    form: str
    X: int
    representations: int
    prime_representations: int
    mass: float
    prime_mass: float


def window_counts(form: str, X: int) -> WindowCounts:
    """Representation counts and raw masses over (X, 2X], for all n and for prime n."""
    s = enumerate(form, X)
    is_p = np.zeros(2 * X + 1, dtype=bool)
    is_p[primes_up_to(2 * X)] = True
    pm = is_p[s.n]
    return WindowCounts(
        s.form,
        X,
        int(s.reps.sum()),
        int(s.reps[pm].sum()),
        math.fsum(s.raw_weight),
        math.fsum(s.raw_weight[pm]),
    )


def growth_exponents(values: list[float], Xs: list[int]) -> list[float]:
    """Local exponents log(v_{i+1}/v_i) / log(X_{i+1}/X_i)."""
    return [math.log(values[i + 1] / values[i]) / math.log(Xs[i + 1] / Xs[i]) for i in range(len(values) - 1)]
