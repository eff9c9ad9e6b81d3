"""Buchstab's function and rigorous upper bounds for the sieve deficiency integrals.

The integrals are

    Omega_k(j) = int_{U_k(j)} w((1 - b_1 - ... - b_k) / b_k) db / (b_1 ... b_{k-1} b_k^2)

with w the piecewise upper bound for Buchstab's function.  The bound is an
upper Riemann sum over a box partition of [gamma_j, 1/2]^k.  Each counted
cell contributes the exact integral of 1/(b_1 ... b_k^2) over the cell times
the supremum of w over the range of its argument on the cell.  Cells cut by
the region boundary are split in 2^k children, up to ``depth`` times; cells
still cut at the last level are counted whole.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DomainError, GridTooCoarse

DEFAULT_ETA = 1e-4
MIN_GRID = {2: 20, 4: 10}
DEFAULT_DEPTH = {2: 4, 4: 3}
DEFAULT_GRID = {2: 800, 4: 40}
# slack on every inequality so that rounding never drops a cell meeting the region
_TOL = 1e-12
_CHUNK = 1 << 18

UPPER_3_4 = 0.5644
UPPER_4_INF = 0.5617


# ---------------------------------------------------------------------------
# Buchstab's function


def _w23(u):
    return (1.0 + np.log(u - 1.0)) / u


def _omega_3_4(u: float) -> float:
    # u w(u) = 1 + int_1^{u-1} w(s) ds, with w known in closed form on [1, 3]
    tail, _ = quad(lambda s: (1.0 + math.log(s - 1.0)) / s, 2.0, u - 1.0, epsabs=1e-12, epsrel=1e-12)
    return (1.0 + math.log(2.0) + tail) / u


@lru_cache(maxsize=1)
def _integral_1_3() -> float:
    tail, _ = quad(lambda s: (1.0 + math.log(s - 1.0)) / s, 2.0, 3.0, epsabs=1e-12, epsrel=1e-12)
    return math.log(2.0) + tail


def buchstab_omega(u: float) -> float:
    """Buchstab's function on [1, 5]."""
    u = float(u)
    if not 1.0 <= u <= 5.0:
        raise DomainError(f"buchstab_omega is implemented on [1, 5], got u={u}")
    if u <= 2.0:
        return 1.0 / u
    if u <= 3.0:
        return float(_w23(u))
    if u <= 4.0:
        return _omega_3_4(u)
    rest, _ = quad(_omega_3_4, 3.0, u - 1.0, epsabs=1e-11, epsrel=1e-11)
    return (1.0 + _integral_1_3() + rest) / u


def buchstab_upper(u):
    """The piecewise upper bound for Buchstab's function, vectorized."""
    arr = np.asarray(u, dtype=np.float64)
    out = np.zeros_like(arr)
    m = (arr >= 1) & (arr < 2)
    out[m] = 1.0 / arr[m]
    m = (arr >= 2) & (arr < 3)
    out[m] = _w23(arr[m])
    out[(arr >= 3) & (arr < 4)] = UPPER_3_4
    out[arr >= 4] = UPPER_4_INF
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=1)
def _peak_23() -> tuple[float, float]:
    # (1 + log(u-1))/u peaks where u/(u-1) = 1 + log(u-1)
    u = brentq(lambda t: t / (t - 1.0) - 1.0 - math.log(t - 1.0), 2.1, 2.99, xtol=1e-15)
    return u, float(_w23(u)) + 1e-15


def buchstab_upper_sup(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """sup of buchstab_upper over [lo, hi], elementwise."""
    out = np.zeros_like(lo)
    m = (hi >= 1) & (lo < 2)
    out = np.where(m, np.maximum(out, 1.0 / np.maximum(lo, 1.0)), out)
    m = (hi >= 2) & (lo < 3)
    a = np.clip(lo, 2.0, 3.0)
    b = np.clip(hi, 2.0, 3.0)
    v = np.maximum(_w23(a), _w23(b))
    upk, wpk = _peak_23()
    v = np.where((a <= upk) & (b >= upk), wpk, v)
    out = np.where(m, np.maximum(out, v), out)
    out = np.where((hi >= 3) & (lo < 4), np.maximum(out, UPPER_3_4), out)
    out = np.where(hi >= 4, np.maximum(out, UPPER_4_INF), out)
    return out


# ---------------------------------------------------------------------------
# parameters and regions


@dataclass(frozen=True)
class SieveParams:
    j: int
    eta: float = DEFAULT_ETA

    def __post_init__(self):
        if self.j not in (1, 2):
            raise ValueError("j must be 1 or 2")
        if not 0 < self.eta < 1 / 40:
            raise ValueError("eta must be in (0, 1/40)")

    @property
    def alpha(self) -> float:
        return (0.75 if self.j == 1 else 5 / 6) - self.eta

    @property
    def gamma(self) -> float:
        # width of the Type II range: (1/3 - 1/4) or (2/9 - 1/6), less 2 eta
        return (1 / 12 if self.j == 1 else 1 / 18) - 2 * self.eta

    @property
    def intervals(self) -> tuple[tuple[float, float], tuple[float, float]]:
        a, g = self.alpha, self.gamma
        return (1 - a, 1 - a + g), (a - g, a)


@dataclass(frozen=True)
class Region:
    dim: int
    lower: float
    linear: tuple  # (coefficients, lo, hi), closed inequalities lo <= c.b <= hi
    sums: tuple  # 0/1 coefficient vectors whose value must avoid the Type II intervals
    intervals: tuple


def region(kind: str, params: SieveParams) -> Region:
    a, g = params.alpha, params.gamma
    inf = math.inf
    if kind == "dim2":
        lin = (
            ((1, -1), 0.0, inf),  # b2 <= b1
            ((0, 1), g, inf),
            ((1, 0), -inf, 0.5),
            ((1, 2), a, 1.0),
        )
        sums = ((1, 0), (0, 1), (1, 1))
        dim = 2
    elif kind == "dim4":
        lin = (
            ((0, 0, 0, 1), g, inf),
            ((0, 0, -1, 1), -inf, 0.0),
            ((0, -1, 1, 0), -inf, 0.0),
            ((-1, 1, 0, 0), -inf, 0.0),
            ((1, 0, 0, 0), -inf, 0.5),
            ((1, 2, 0, 0), -inf, a),
            ((1, 1, 2, 0), -inf, 1.0),
            ((1, 1, 1, 2), -inf, 1.0),
        )
        sums = tuple(
            tuple(1 if i in S else 0 for i in range(4)) for k in range(1, 5) for S in itertools.combinations(range(4), k)
        )
        dim = 4
    else:
        raise ValueError("kind must be 'dim2' or 'dim4'")
    lin = tuple((np.array(c, dtype=np.float64), lo, hi) for c, lo, hi in lin)
    sums = tuple(np.array(c, dtype=np.float64) for c in sums)
    return Region(dim, g, lin, sums, params.intervals)


def region_membership(kind: str, j: int, beta, params: SieveParams | None = None) -> bool:
    """Closed-boundary membership of beta in U_2(j) or U_4(j)."""
    if params is None:
        params = SieveParams(j)
    elif params.j != j:
        raise ValueError("params.j does not match j")
    reg = region(kind, params)
    b = np.asarray(beta, dtype=np.float64)
    if b.shape != (reg.dim,):
        raise ValueError(f"beta must have length {reg.dim}")
    for c, lo, hi in reg.linear:
        v = float(c @ b)
        if not lo <= v <= hi:
            return False
    for c in reg.sums:
        v = float(c @ b)
        for lo, hi in reg.intervals:
            if lo < v < hi:
                return False
    return True


def _ranges(c: np.ndarray, L: np.ndarray, H: np.ndarray):
    cp = np.maximum(c, 0.0)
    cn = np.minimum(c, 0.0)
    return L @ cp + H @ cn, H @ cp + L @ cn


def _classify(L, H, reg: Region, upto: int | None = None):
    """(possibly meets the region, certainly inside) for each box [L, H]."""
    poss = np.ones(len(L), dtype=bool)
    cert = np.ones(len(L), dtype=bool)
    for c, lo, hi in reg.linear:
        if upto is not None:
            if np.any(c[upto:]):
                continue
            c = c[:upto]
        mn, mx = _ranges(c, L, H)
        poss &= (mx >= lo - _TOL) & (mn <= hi + _TOL)
        cert &= (mn >= lo + _TOL) & (mx <= hi - _TOL)
    for c in reg.sums:
        if upto is not None:
            if np.any(c[upto:]):
                continue
            c = c[:upto]
        mn, mx = _ranges(c, L, H)
        for a, b in reg.intervals:
            poss &= ~((mn > a + _TOL) & (mx < b - _TOL))
            cert &= (mx <= a - _TOL) | (mn >= b + _TOL)
    return poss, cert


def _cell_bound(L: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Exact integral of 1/(b_1 ... b_k^2) over each cell times sup of the w factor."""
    weight = np.prod(np.log(H[:, :-1] / L[:, :-1]), axis=1) * (1.0 / L[:, -1] - 1.0 / H[:, -1])
    u_lo = (1.0 - H.sum(axis=1)) / H[:, -1]
    u_hi = (1.0 - L.sum(axis=1)) / L[:, -1]
    return buchstab_upper_sup(u_lo, u_hi) * weight


def _base_cells(reg: Region, grid: int):
    edges = np.linspace(reg.lower, 0.5, grid + 1)
    idx = np.arange(grid, dtype=np.int64)[:, None]
    for k in range(2, reg.dim + 1):
        idx = np.concatenate(
            [np.repeat(idx, grid, axis=0), np.tile(np.arange(grid, dtype=np.int64), len(idx))[:, None]], axis=1
        )
        poss, _ = _classify(edges[idx], edges[idx + 1], reg, upto=k)
        idx = idx[poss]
    return edges[idx], edges[idx + 1]


def _split(L: np.ndarray, H: np.ndarray):
    dim = L.shape[1]
    mid = 0.5 * (L + H)
    offs = np.array(list(itertools.product((0, 1), repeat=dim)), dtype=bool)
    NL = np.empty((len(L) * len(offs), dim))
    NH = np.empty_like(NL)
    for k, o in enumerate(offs):
        NL[k :: len(offs)] = np.where(o, mid, L)
        NH[k :: len(offs)] = np.where(o, H, mid)
    return NL, NH


def _accumulate(L, H, reg: Region, depth: int, out: list, stats: list):
    poss, cert = _classify(L, H, reg)
    out.append(_cell_bound(L[cert], H[cert]))
    stats[0] += int(cert.sum())
    edge = poss & ~cert
    L, H = L[edge], H[edge]
    if depth == 0 or len(L) == 0:
        out.append(_cell_bound(L, H))
        stats[0] += len(L)
        stats[1] += len(L)
        return
    step = max(1, _CHUNK >> reg.dim)
    for s in range(0, len(L), step):
        NL, NH = _split(L[s : s + step], H[s : s + step])
        _accumulate(NL, NH, reg, depth - 1, out, stats)


@dataclass(frozen=True)
class OmegaBound:
    kind: str
    j: int
    value: float
    grid: int
    eta: float
    depth: int
    cells_counted: int
    unresolved_cells: int
    conservative: bool = True


def omega_bound(kind: str, j: int, eta: float = DEFAULT_ETA, grid: int | None = None, *, depth=None, threads: int = 1):
    params = SieveParams(j, eta)
    reg = region(kind, params)
    if grid is None:
        grid = DEFAULT_GRID[reg.dim]
    if depth is None:
        depth = DEFAULT_DEPTH[reg.dim]
    if grid < MIN_GRID[reg.dim]:
        raise GridTooCoarse(f"{kind} needs grid >= {MIN_GRID[reg.dim]}, got {grid}")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    L, H = _base_cells(reg, grid)
    chunks = [(L[s : s + _CHUNK], H[s : s + _CHUNK]) for s in range(0, len(L), _CHUNK)]

    def run(chunk):
        out: list = []
        stats = [0, 0]
        _accumulate(chunk[0], chunk[1], reg, depth, out, stats)
        return out, stats

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(run, chunks))
    else:
        results = [run(c) for c in chunks]
    parts = [a for out, _ in results for a in out if a.size]
    # fsum is exactly rounded, so the total does not depend on chunking or order
    value = math.fsum(np.concatenate(parts).tolist()) if parts else 0.0
    counted = sum(s[0] for _, s in results)
    unresolved = sum(s[1] for _, s in results)
    return OmegaBound(kind, j, value, grid, eta, depth, counted, unresolved)


def omega2_bound(j: int, eta: float = DEFAULT_ETA, grid: int = DEFAULT_GRID[2], **kw) -> OmegaBound:
    return omega_bound("dim2", j, eta, grid, **kw)


def omega4_bound(j: int, eta: float = DEFAULT_ETA, grid: int = DEFAULT_GRID[4], **kw) -> OmegaBound:
    return omega_bound("dim4", j, eta, grid, **kw)


@dataclass(frozen=True)
class DeficiencyReport:
    j: int
    eta: float
    omega2: OmegaBound
    omega4: OmegaBound

    @property
    def deficiency(self) -> float:
        return 1.0 - self.omega2.value - self.omega4.value

    def as_dict(self) -> dict:
        return {
            "case": self.j,
            "eta": self.eta,
            "grid": {"dim2": self.omega2.grid, "dim4": self.omega4.grid},
            "depth": {"dim2": self.omega2.depth, "dim4": self.omega4.depth},
            "omega2": self.omega2.value,
            "omega4": self.omega4.value,
            "deficiency": self.deficiency,
            "conservative": True,
            "cells_counted": self.omega2.cells_counted + self.omega4.cells_counted,
        }


def deficiency_report(
    j: int, eta: float = DEFAULT_ETA, grid2: int = DEFAULT_GRID[2], grid4: int = DEFAULT_GRID[4], *, threads: int = 1
) -> DeficiencyReport:
    return DeficiencyReport(
        j, eta, omega2_bound(j, eta, grid2, threads=threads), omega4_bound(j, eta, grid4, threads=threads)
    )


def deficiency(j: int, eta: float = DEFAULT_ETA, grid2: int = DEFAULT_GRID[2], grid4: int = DEFAULT_GRID[4]) -> float:
    """1 - Omega_2(j) - Omega_4(j), using the upper bounds for both integrals."""
    return deficiency_report(j, eta, grid2, grid4).deficiency
