import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from phasewave.errors import AccuracyError, BlowUpError
from phasewave.fft import fft, ifft, is_power_of_two, wavenumbers
from phasewave.quadrature import (
    adaptive_simpson_panels,
    cumulative_from_zero,
    integrate_adaptive,
    rk_integrate,
)


def test_polynomial_exactness():
    assert integrate_adaptive(lambda x: x * x, 0.0, 1.0) == pytest.approx(1 / 3, abs=1e-15)


def test_empty_interval():
    assert integrate_adaptive(np.cos, 2.0, 2.0) == 0.0


@pytest.mark.parametrize("alpha,omega", [(0.05, 2.1), (0.5, 1.0), (0.9, 3.0)])
def test_periodic_map_period(alpha, omega):
    val = integrate_adaptive(lambda s: 1 / (1 + alpha * np.cos(omega * s)), 0.0, 2 * math.pi / omega)
    assert val == pytest.approx(2 * math.pi / (omega * math.sqrt(1 - alpha ** 2)), abs=1e-10)


def test_narrow_notch():
    # 1/(eps^2 + x^2) has a spike of width eps at 0
    eps = 1e-4
    val = integrate_adaptive(lambda x: 1 / (eps ** 2 + x * x), -1.0, 1.0, tol=1e-8)
    assert val == pytest.approx(2 * math.atan(1 / eps) / eps, rel=1e-10)


def test_reversed_limits_change_sign():
    a = integrate_adaptive(np.exp, 0.0, 1.0)
    b = integrate_adaptive(np.exp, 1.0, 0.0)
    assert a == pytest.approx(math.e - 1, abs=1e-12)
    assert b == pytest.approx(-a, abs=1e-14)


def test_depth_cap_reports_estimate():
    with pytest.raises(AccuracyError) as info:
        integrate_adaptive(lambda x: np.where(x > 1 / 3, 1.0, 0.0), 0.0, 1.0, tol=1e-14, max_depth=20)
    # the unresolved jump cell has width 2**-23
    assert info.value.estimate == pytest.approx(2 / 3, abs=1e-6)


def test_bad_tolerance():
    with pytest.raises(ValueError):
        integrate_adaptive(np.sin, 0.0, 1.0, tol=0.0)


def test_panels_flag_nonconvergence():
    vals, ok = adaptive_simpson_panels(lambda x: np.abs(x - 1 / 3) ** 0.01, [0.0, 1.0], 1e-15, max_depth=5)
    assert not ok
    vals, ok = adaptive_simpson_panels(np.cos, np.linspace(0, 1, 5), 1e-12)
    assert ok and vals.sum() == pytest.approx(math.sin(1.0), abs=1e-12)


def test_cumulative_from_zero_matches_antiderivative():
    x = np.linspace(-3, 4, 57)
    F = cumulative_from_zero(np.cos, x, tol=1e-12)
    assert np.max(np.abs(F - np.sin(x))) < 1e-11
    assert cumulative_from_zero(np.cos, 0.0) == 0.0


def test_cumulative_handles_unsorted_and_nonzero_origin():
    x = np.array([2.0, -1.0, 0.5])
    F = cumulative_from_zero(lambda t: 2 * t, x, origin=1.0)
    assert F == pytest.approx(x ** 2 - 1.0, abs=1e-12)


def test_rk_exponential():
    ts, ys = rk_integrate(lambda t, y: y, [1.0], 0.0, 1.0, 1e-3)
    assert ts[-1] == 1.0
    assert ys[-1, 0] == pytest.approx(math.e, abs=1e-8)


def test_rk_fourth_order():
    errs = []
    for h in (0.1, 0.05):
        _, ys = rk_integrate(lambda t, y: np.array([y[1], -y[0]]), [0.0, 1.0], 0.0, 3.0, h)
        errs.append(abs(ys[-1, 0] - math.sin(3.0)))
    assert errs[0] / errs[1] == pytest.approx(16, rel=0.1)


def test_rk_blow_up():
    with pytest.raises(BlowUpError) as info:
        rk_integrate(lambda t, y: y * y, [1.0], 0.0, 2.0, 1e-3)
    assert 0.9 < info.value.last_time < 1.1
    with pytest.raises(ValueError):
        rk_integrate(lambda t, y: y, [1.0], 0.0, 1.0, 0.0)


# -- FFT ----------------------------------------------------------------------


def test_power_of_two():
    assert [n for n in range(1, 70) if is_power_of_two(n)] == [1, 2, 4, 8, 16, 32, 64]


@pytest.mark.parametrize("n", [1, 2, 8, 64, 2048])
def test_fft_matches_numpy(n):
    rng = np.random.default_rng(n)
    x = rng.normal(size=(2, n)) + 1j * rng.normal(size=(2, n))
    assert np.max(np.abs(fft(x) - np.fft.fft(x, axis=-1))) < 1e-11 * max(1, n)
    assert np.max(np.abs(ifft(fft(x)) - x)) < 1e-13


def test_fft_rejects_other_lengths():
    with pytest.raises(ValueError):
        fft(np.ones(12))


def test_spectral_derivative():
    n, L = 128, 2 * math.pi
    dx = L / n
    x = dx * np.arange(n)
    u = np.exp(np.sin(x))
    k = wavenumbers(n, dx)
    assert k == pytest.approx(2 * math.pi * np.fft.fftfreq(n, dx))
    du = ifft(1j * k * fft(u)).real
    assert np.max(np.abs(du - np.cos(x) * u)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 9), st.integers(0, 2 ** 31))
def test_parseval(logn, seed):
    n = 2 ** logn
    x = np.random.default_rng(seed).normal(size=n)
    X = fft(x)
    assert np.sum(np.abs(X) ** 2) / n == pytest.approx(np.sum(x * x), rel=1e-12)
