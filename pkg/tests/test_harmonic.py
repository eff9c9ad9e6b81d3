import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from sparseprime import harmonic as hm


@pytest.mark.parametrize("delta", [0.01, 0.05, 0.099])
def test_bump_basic(delta):
    b = hm.make_bump(delta)
    assert b(1 - delta) == 0.0 and b(1 + delta) == 0.0
    assert b(1.0) > 0
    assert b(1 - 2 * delta) == 0.0
    u = np.linspace(0.5, 1.5, 20001)
    assert np.all(b(u) >= 0)
    assert abs(hm.bump_identity(b) - delta) <= 1e-10


def test_bump_rejects_bad_delta():
    for d in (0.0, 0.1, -0.01):
        with pytest.raises(ValueError):
            hm.make_bump(d)


def test_bump_derivative():
    d = 0.05
    b = hm.make_bump(d)
    u = np.linspace(1 - d, 1 + d, 4001)
    fd = np.gradient(b(u), u)
    assert np.max(np.abs(fd - b.derivative(u))) < 1e-3 * np.max(np.abs(fd))
    # |psi'| <= C / delta with C independent of delta
    cs = []
    for dd in (0.01, 0.02, 0.05):
        bb = hm.make_bump(dd)
        uu = np.linspace(1 - dd, 1 + dd, 4001)
        cs.append(np.max(np.abs(bb.derivative(uu))) * dd)
    assert max(cs) / min(cs) < 1.2


def test_fourier_properties():
    b = hm.make_bump(0.05)
    m = b.mass()
    want, _ = quad(b, 0.95, 1.05, epsabs=1e-14)
    assert abs(m - want) < 1e-13
    assert m > 0
    xs = np.linspace(0.1, 300, 101)
    assert all(abs(b.fourier(x)) <= m + 1e-15 for x in xs)
    # direct quadrature of the complex transform at a few points
    for x in (0.7, 3.0, 12.5):
        re, _ = quad(lambda t: b(t) * math.cos(2 * math.pi * x * t), 0.95, 1.05, epsabs=1e-14, limit=200)
        im, _ = quad(lambda t: -b(t) * math.sin(2 * math.pi * x * t), 0.95, 1.05, epsabs=1e-14, limit=200)
        assert abs(b.fourier(x) - complex(re, im)) < 1e-12


def test_fourier_decay():
    b = hm.make_bump(0.05)
    c2 = hm.fourier_decay_constant(b, np.linspace(10, 1000, 100))
    assert np.isfinite(c2) and c2 < 1.0


@pytest.mark.parametrize("N,delta", [(100, 0.05), (1, 0.05), (100, 0.01), (10**4, 0.05)])
def test_partition_reconstruction(N, delta):
    assert hm.partition_reconstruction(N, delta) <= 1e-8


def test_partition_error_independent_of_delta():
    assert abs(hm.partition_reconstruction(500, 0.01) - hm.partition_reconstruction(500, 0.05)) < 1e-8


def test_poisson_examples():
    assert hm.poisson_check(1000, 7, 3, 0.05) <= 1e-6
    assert hm.poisson_check(1000, 1, 0, 0.05) <= 1e-6
    full = hm.poisson_check(1000, 7, 3, 0.05)
    none = hm.poisson_check(1000, 7, 3, 0.05, H=0)
    r = hm.poisson_sides(1000, 7, 3, 0.05, H=0)
    assert none == pytest.approx(abs(r.lhs - 1000 / 7 * hm.make_bump(0.05).mass()))
    assert none > full


def test_nominal_H_is_smaller_than_default():
    assert hm.nominal_H(1000, 7, 0.05) == 1
    assert hm.default_H(1000, 7, 0.05) >= hm.nominal_H(1000, 7, 0.05)


@given(st.integers(100, 10**6), st.integers(1, 1000), st.integers(0, 999), st.sampled_from([0.02, 0.05, 0.09]))
def test_poisson_random(N, q, a, delta):
    if q > N:
        return
    assert hm.poisson_check(N, q, a % q, delta) <= 1e-6


def test_poisson_weakly_decreasing_in_H():
    for args in [(1000, 7, 3, 0.05), (5000, 31, 4, 0.02)]:
        vals = [hm.poisson_check(*args, H=H) for H in range(0, hm.default_H(args[0], args[1], args[3]) + 1, 4)]
        for a, b in zip(vals, vals[1:]):
            assert b <= a + 1e-12
