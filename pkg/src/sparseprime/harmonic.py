"""Smooth bumps for finer-than-dyadic partitions and truncated Poisson summation.

The bump is the standard mollifier exp(-1/(1-x^2)) moved to [1-delta, 1+delta],
scaled so that the integral of psi(1/t) dt/t over [1/2, 2] equals delta.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

QUAD_EPSABS = 1e-14
QUAD_EPSREL = 1e-13


def _mollifier(x):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    out[inside] = np.exp(-1.0 / (1.0 - xi * xi))
    return out


def _mollifier_scalar(x: float) -> float:
    return math.exp(-1.0 / (1.0 - x * x)) if abs(x) < 1.0 else 0.0


@dataclass(frozen=True)
class SmoothBump:
    delta: float
    scale: float  # psi(u) = scale * mollifier((u - 1) / delta)

    def __call__(self, u):
        r = self.scale * _mollifier((np.asarray(u, dtype=np.float64) - 1.0) / self.delta)
        return float(r) if np.ndim(r) == 0 else r

    def derivative(self, u):
        x = (np.asarray(u, dtype=np.float64) - 1.0) / self.delta
        inside = np.abs(x) < 1.0
        out = np.zeros_like(x)
        xi = x[inside]
        out[inside] = np.exp(-1.0 / (1.0 - xi * xi)) * (-2.0 * xi / (1.0 - xi * xi) ** 2)
        r = self.scale / self.delta * out
        return float(r) if np.ndim(r) == 0 else r

    def mass(self) -> float:
        """psi-hat(0), the integral of psi."""
        val, _ = quad(_mollifier_scalar, -1.0, 1.0, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL)
        return self.scale * self.delta * val

    def fourier(self, xi: float) -> complex:
        """psi-hat(xi) = integral of psi(x) e(-x xi) dx."""
        w = 2.0 * math.pi * self.delta * xi
        if w == 0.0:
            return complex(self.mass())
        # psi is even about 1, so the transform is e(-xi) times a cosine transform
        val, _ = quad(_mollifier_scalar, 0.0, 1.0, weight="cos", wvar=abs(w), epsabs=QUAD_EPSABS, limit=200)
        r = 2.0 * self.scale * self.delta * val
        ang = -2.0 * math.pi * xi
        return complex(r * math.cos(ang), r * math.sin(ang))


def make_bump(delta: float) -> SmoothBump:
    if not 0.0 < delta < 0.1:
        raise ValueError("delta must be in (0, 0.1)")
    # integral of psi(1/t) dt/t over [1/2, 2] is the integral of psi(u) du/u
    raw, _ = quad(
        lambda u: _mollifier_scalar((u - 1.0) / delta) / u,
        1.0 - delta,
        1.0 + delta,
        epsabs=QUAD_EPSABS,
        epsrel=QUAD_EPSREL,
    )
    return SmoothBump(delta, delta / raw)


def bump_identity(bump: SmoothBump) -> float:
    """The integral of psi(1/t) dt/t over t in [1/2, 2], computed in the t variable."""
    d = bump.delta
    val, _ = quad(
        lambda t: bump.scale * _mollifier_scalar((1.0 / t - 1.0) / d) / t,
        1.0 / (1.0 + d),
        1.0 / (1.0 - d),
        epsabs=QUAD_EPSABS,
        epsrel=QUAD_EPSREL,
    )
    return val


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(160)


def partition_reconstruction(N: int, delta: float) -> float:
    """Relative error of (1/delta) * sum_{n<=N} integral over [1/2, 2N] of psi(n/t) dt/t against N.

    Each n contributes an integral over t in its support [n/(1+delta), n/(1-delta)]
    clipped to [1/2, 2N], evaluated by Gauss-Legendre in log t.
    """
    if not 1 <= N <= 10**4:
        raise ValueError("N must be in [1, 10^4]")
    bump = make_bump(delta)
    n = np.arange(1, N + 1, dtype=np.float64)
    lo = np.log(np.maximum(n / (1.0 + delta), 0.5))
    hi = np.log(np.minimum(n / (1.0 - delta), 2.0 * N))
    half = 0.5 * (hi - lo)
    x = (lo + hi)[:, None] * 0.5 + half[:, None] * _GL_NODES[None, :]
    vals = bump(n[:, None] * np.exp(-x))  # dt/t = d(log t)
    per_n = (vals * _GL_WEIGHTS[None, :]).sum(axis=1) * half
    total = math.fsum(per_n) / delta
    return abs(total - N) / N


def nominal_H(N: float, q: int, delta: float) -> int:
    """Smallest integer H with H >= delta^-1 (q/N) (qN)^0.1."""
    return math.ceil(q / (delta * N) * (q * N) ** 0.1)


def default_H(N: float, q: int, delta: float) -> int:
    # the transform at xi has decayed below 1e-12 once delta * xi is about 160
    return max(nominal_H(N, q, delta), math.ceil(160.0 * q / (delta * N)))


@dataclass(frozen=True)
class PoissonResult:
    lhs: float
    rhs: float
    H: int

    @property
    def difference(self) -> float:
        return abs(self.lhs - self.rhs)


def poisson_sides(N: float, q: int, a: int, delta: float, H: int | None = None) -> PoissonResult:
    """Direct sum of psi(n/N) over n = a (q) against the truncated dual sum with |h| <= H."""
    if not 1 <= q <= 10**3:
        raise ValueError("q must be in [1, 1000]")
    if not 1 <= N <= 10**6:
        raise ValueError("N must be in [1, 10^6]")
    bump = make_bump(delta)
    if H is None:
        H = default_H(N, q, delta)
    if H < 0:
        raise ValueError("H must be >= 0")
    lo = math.floor(N * (1.0 - delta))
    hi = math.ceil(N * (1.0 + delta))
    start = lo + (a - lo) % q
    n = np.arange(start, hi + 1, q, dtype=np.float64)
    lhs = math.fsum(bump(n / N))
    terms = [bump.mass()]
    for h in range(1, H + 1):
        f = bump.fourier(h * N / q)
        e = complex(math.cos(2 * math.pi * a * h / q), math.sin(2 * math.pi * a * h / q))
        # h and -h combine to twice the real part
        terms.append(2.0 * (f * e).real)
    rhs = (N / q) * math.fsum(terms)
    return PoissonResult(lhs, rhs, H)


def poisson_check(N: float, q: int, a: int, delta: float, H: int | None = None) -> float:
    """|LHS - RHS| for truncated Poisson summation in a residue class mod q."""
    return poisson_sides(N, q, a, delta, H).difference


def fourier_decay_constant(bump: SmoothBump, xs, j: int = 2) -> float:
    """max over xs of |psi-hat(x)| (delta |x|)^j."""
    return max(abs(bump.fourier(x)) * (bump.delta * abs(x)) ** j for x in xs)
