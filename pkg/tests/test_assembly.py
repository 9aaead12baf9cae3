import math

import numpy as np
import pytest
from scipy.interpolate import CubicSpline

from phasewave import fixtures
from phasewave.assembly import StationarySolution, periodic_grid, sample_grid
from phasewave.errors import InconsistencyError, PhaseSingularityError, PositivityError
from phasewave.quadrature import integrate_adaptive
from phasewave.reduction import derive_coupling, eval_branch, root_triple
from phasewave.scaling import PotentialSpec, ScalingFamily
from phasewave.verification import current_residual


@pytest.fixture(scope="module")
def dark():
    return fixtures.dark_dark()


@pytest.fixture(scope="module")
def bright():
    return fixtures.bright_bright()


def three_periods(sol, n=2001):
    T = 2 * math.pi / sol.family.omega
    return np.linspace(-1.5 * T, 1.5 * T, n)


def test_dark_amplitude_at_origin(dark):
    R1, R2 = dark.amplitude(0.0)
    for R, d in zip((R1, R2), dark.deltas):
        assert R == pytest.approx(d * math.sqrt(1.05 * 0.1), rel=1e-15)


def test_dark_constants(dark):
    assert dark.deltas == pytest.approx((0.75593, 0.92582), abs=1e-5)
    assert dark.nus == pytest.approx((4 / 490, 9 / 490), rel=1e-13)
    assert dark.s == pytest.approx((math.sqrt(4 / 490), math.sqrt(9 / 490)), rel=1e-14)
    E = dark.family.omega ** 2 * (1 - 0.05 ** 2) / 4
    assert E == pytest.approx(1.1, rel=1e-14)


def test_zero_dark_has_vanishing_first_component():
    sol = fixtures.zero_dark()
    x = three_periods(sol, 301)
    R1, R2 = sol.amplitude(x)
    th1, th2 = sol.phase_theta(x)
    assert np.all(R1 == 0.0) and np.all(th1 == 0.0)
    assert np.all(R2 > 0) and np.all(np.diff(th2) > 0)


def test_bright_amplitude_is_localized(bright):
    R1, R2 = bright.amplitude(np.array([0.0, 6.0, 12.0]))
    assert R1[0] > 0.1 and R1[2] < 1e-4 and R2[2] < 1e-4
    assert R1[1] > R1[2]


@pytest.mark.parametrize("name", ["dark_dark", "zero_dark", "bright_bright"])
def test_amplitude_symmetry(name):
    sol = getattr(fixtures, name)()
    x = np.linspace(0, 9, 451)
    Rp, Rm = np.array(sol.amplitude(x)), np.array(sol.amplitude(-x))
    assert np.max(np.abs(Rp - Rm)) < 1e-12
    tp, tm = np.array(sol.phase_theta(x)), np.array(sol.phase_theta(-x))
    assert np.max(np.abs(tp + tm)) < 1e-8 * (1 + np.max(np.abs(tp)))


def test_amplitude_derivatives_by_differences(dark, bright):
    for sol, x in ((dark, three_periods(dark, 401)), (bright, np.linspace(-6, 6, 401))):
        h = 1e-5
        R = sol.amplitude_derivs(x)
        Rp, Rm = sol.amplitude_derivs(x + h), sol.amplitude_derivs(x - h)
        fd1 = (Rp[:, 0] - Rm[:, 0]) / (2 * h)
        fd2 = (Rp[:, 1] - Rm[:, 1]) / (2 * h)
        assert np.max(np.abs(fd1 - R[:, 1])) < 1e-7 * (1 + np.max(np.abs(R[:, 1])))
        assert np.max(np.abs(fd2 - R[:, 2])) < 1e-6 * (1 + np.max(np.abs(R[:, 2])))


def test_phase_matches_direct_quadrature(dark):
    x = np.array([-4.0, -1.3, 0.7, 2.2, 5.0])
    th1, th2 = dark.phase_theta(x)
    s1, s2 = dark.s
    for xi, t1, t2 in zip(x, th1, th2):
        q1 = integrate_adaptive(lambda u: s1 / dark.amplitude(u)[0] ** 2, 0.0, xi, tol=1e-13)
        q2 = integrate_adaptive(lambda u: s2 / dark.amplitude(u)[1] ** 2, 0.0, xi, tol=1e-13)
        assert t1 == pytest.approx(q1, abs=1e-10)
        assert t2 == pytest.approx(q2, abs=1e-10)


def test_phase_is_monotone_and_pinned(dark):
    x = three_periods(dark)
    th1, th2 = dark.phase_theta(x)
    assert np.all(np.diff(th1) > 0) and np.all(np.diff(th2) > 0)
    assert dark.phase_theta(0.0) == (0.0, 0.0)


def test_phase_derivative_by_differences(dark):
    x = three_periods(dark, 801)[1:-1]
    h = 1e-4
    d1 = (np.array(dark.phase_theta(x + h)) - np.array(dark.phase_theta(x - h))) / (2 * h)
    R = np.array(dark.amplitude(x))
    assert np.max(np.abs(d1 * R * R - np.array(dark.s)[:, None])) < 1e-7


@pytest.mark.parametrize("name", ["dark_dark", "zero_dark", "bright_bright"])
def test_current_is_constant(name):
    sol = getattr(fixtures, name)()
    x = np.linspace(-10, 10, 2001) if name == "bright_bright" else three_periods(sol)
    assert current_residual(sol, x).max_abs < 1e-7
    # interior of the localized fixture, where the accumulated phase is small
    assert current_residual(sol, x[np.abs(x) < 6]).max_abs < 1e-8


def test_trivial_phase():
    sol = fixtures.dark_dark()
    from dataclasses import replace

    zero = replace(sol, coupling=replace(sol.coupling, c1=0.0, c2=0.0))
    th = zero.phase_theta(np.linspace(-2, 2, 5))
    assert np.all(th[0] == 0) and np.all(th[1] == 0)


def test_negative_phase_sign(dark):
    flipped = StationarySolution.build(dark.family, dark.potential, dark.roots, "dark_soliton",
                                       dark.coupling, phase_signs=(-1.0, 1.0))
    x = np.linspace(0, 3, 7)
    assert np.allclose(flipped.phase_theta(x)[0], -dark.phase_theta(x)[0], atol=1e-14, rtol=0)


def test_field_modulus_and_phase_rate(dark):
    x = np.linspace(-3, 3, 61)
    psi0 = np.array(dark.field_at(0.0, x))
    R = np.array(dark.amplitude(x))
    th = np.array(dark.phase_theta(x))
    assert np.max(np.abs(psi0 - R * np.exp(1j * th))) < 1e-15
    for t in (0.3, 2.0):
        psi = np.array(dark.field_at(t, x))
        assert np.max(np.abs(np.abs(psi) - R)) < 1e-15
        rot = np.angle(psi * np.conj(psi0))
        want = np.angle(np.exp(1j * np.array(dark.mus) * t))
        assert np.max(np.abs(rot - want[:, None])) < 1e-12


def test_constant_family_reduces_to_autonomous_solution():
    roots = root_triple((0.1, 0.5, 0.5), 1.0)
    cp = derive_coupling(fixtures.DARK_H, roots.c, 1.0)
    sol = StationarySolution.build(ScalingFamily.constant(), PotentialSpec.zero(-1.1), roots,
                                   "dark_soliton", cp)
    x = np.linspace(-5, 5, 101)
    W, _ = eval_branch(sol.branch, roots, x)
    R1, R2 = sol.amplitude(x)
    assert np.max(np.abs(R1 - cp.delta1 * np.sqrt(W))) < 1e-15
    assert np.max(np.abs(R2 - cp.delta2 * np.sqrt(W))) < 1e-15


def test_standing_wave():
    w = 0.3
    roots = root_triple((w, w, w), 1.0)
    cp = derive_coupling(fixtures.DARK_H, roots.c, 1.0)
    sol = StationarySolution.build(ScalingFamily.constant(), PotentialSpec.zero(-3 * w), roots,
                                   "finite_sn", cp)
    R1, R2 = sol.amplitude(np.linspace(-4, 4, 9))
    assert np.all(R1 == R1[0]) and R1[0] == pytest.approx(cp.delta1 * math.sqrt(w), rel=1e-15)


def test_build_rejects_inconsistent_inputs(dark):
    with pytest.raises(InconsistencyError):
        StationarySolution.build(dark.family, PotentialSpec.zero(-3.0), dark.roots, "dark_soliton",
                                 dark.coupling)
    other = derive_coupling(fixtures.DARK_H, 0.03, 1.0)
    with pytest.raises(InconsistencyError):
        StationarySolution.build(dark.family, dark.potential, dark.roots, "dark_soliton", other)


def test_negative_w_window_refused(bright):
    from phasewave.errors import RealSolutionImpossibleError
    from phasewave.reduction import make_branch

    roots = root_triple((-2.0, -2.0, 1.999999), -1.0)
    # c = sigma W1 W2 W3 < 0 already rules out real constants
    with pytest.raises(RealSolutionImpossibleError):
        derive_coupling(fixtures.BRIGHT_H, roots.c, -1.0)
    sol = StationarySolution(bright.family, bright.potential, roots,
                             make_branch("bright_soliton", roots), bright.coupling)
    sol.amplitude(np.linspace(-0.3, 0.3, 7))
    with pytest.raises(PositivityError):
        sol.amplitude(np.linspace(-3, 3, 61))


def test_phase_through_a_zero_is_refused():
    # W1 = 0 puts a zero of W at the soliton centre
    roots = root_triple((0.0, 0.5, 0.5), 1.0)
    with pytest.raises(ValueError):
        derive_coupling(fixtures.DARK_H, roots.c, 1.0)
    sol = StationarySolution(ScalingFamily.constant(), PotentialSpec.zero(-1.0),
                             roots, fixtures.dark_dark().branch, fixtures.dark_dark().coupling)
    with pytest.raises((PhaseSingularityError, PositivityError)):
        sol.phase_theta(np.linspace(-1, 1, 5))


def test_sample_grid(bright):
    g = sample_grid(fixtures.dark_dark(), (0.0, 1.0), 64)
    assert g.n == 64 and np.allclose(np.diff(g.x), 1 / 64, rtol=0, atol=1e-15)
    assert g.meta["n"] == 64 and g.meta["k"] == 1.0
    gb = sample_grid(bright, (-12.0, 12.0), 1024)
    assert np.max(np.abs(gb.psi[:, [0, -1]])) < 1e-4
    assert gb.length == pytest.approx(24.0)
    for n in (48, 96):
        with pytest.raises(ValueError):
            sample_grid(bright, (-12.0, 12.0), n)


def test_resampling_agrees_with_interpolation(dark):
    T = 2 * math.pi / dark.family.omega
    coarse = sample_grid(dark, (-T, T), 2048)
    fine = sample_grid(dark, (-T, T), 4096)
    assert np.array_equal(fine.x[::2], coarse.x)
    assert np.max(np.abs(fine.psi[:, ::2] - coarse.psi)) < 1e-14
    spline = CubicSpline(coarse.x, coarse.psi, axis=1)
    inner = slice(8, -8)
    assert np.max(np.abs(spline(fine.x[1::2])[:, inner] - fine.psi[:, 1::2][:, inner])) < 1e-6


def test_periodic_grid_rejects_empty_window():
    with pytest.raises(ValueError):
        periodic_grid((1.0, 1.0), 64)
