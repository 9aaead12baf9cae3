import math
from dataclasses import replace

import numpy as np
import pytest

from phasewave import fixtures
from phasewave.assembly import FieldGrid, sample_grid
from phasewave.errors import BoundaryError
from phasewave.reduction import branch_period, make_branch, root_triple
from phasewave.verification import (
    ResidualReport,
    current_residual,
    oracle_compare,
    pde_residual,
    plane_wave_grid,
    sn_period_from_oracle,
    split_step_propagate,
    stationary_ode_residual,
)


def periods(sol, m=1.5, n=2001):
    T = 2 * math.pi / sol.family.omega
    return np.linspace(-m * T, m * T, n)


@pytest.mark.parametrize("name", ["dark_dark", "zero_dark"])
def test_dark_fixtures_stationary(name):
    sol = getattr(fixtures, name)()
    rep = stationary_ode_residual(sol, periods(sol))
    assert rep.max_abs < 1e-7
    assert rep.grid_size == 2001 and rep.check_kind == "stationary_ode_residual"


def test_bright_fixture_stationary():
    rep = stationary_ode_residual(fixtures.bright_bright(), np.linspace(-10, 10, 2001))
    assert rep.max_abs < 1e-7


@pytest.mark.parametrize("W1,W3", fixtures.MULTI_PEAK[1:])
def test_multi_peak_fixtures_stationary(W1, W3):
    sol = fixtures.gaussian_bright(W1, W3)
    # relative floor: W2 = -(W1 + W3) is rounded, amplified by a**-1.5 in the tails
    rep = stationary_ode_residual(sol, np.linspace(-6, 6, 1201))
    assert rep.max_abs < 1e-7


@pytest.mark.parametrize("name", ["dark_dark", "bright_bright"])
def test_perturbed_delta_is_detected(name):
    sol = getattr(fixtures, name)()
    bad = replace(sol, coupling=replace(sol.coupling, delta1=sol.coupling.delta1 * 1.01))
    x = np.linspace(-10, 10, 2001) if name == "bright_bright" else periods(sol)
    assert stationary_ode_residual(bad, x).max_abs > 1e-3


def test_report_norms():
    rep = stationary_ode_residual(fixtures.dark_dark(), np.linspace(-3, 3, 301))
    assert 0 <= rep.l2 <= rep.max_abs * math.sqrt(301 * 0.02) + 1e-300
    assert len(rep.per_component) == 2
    assert ResidualReport(1e-8, 0, 0, 1, "x").passed(1e-7)


def test_current_residual_fixtures():
    assert current_residual(fixtures.dark_dark(), periods(fixtures.dark_dark())).max_abs < 1e-7
    assert current_residual(fixtures.bright_bright(), np.linspace(-10, 10, 2001)).max_abs < 1e-7


# -- PDE residual -----------------------------------------------------------


def test_plane_wave_pde_residual():
    pw = plane_wave_grid(k=3.0, n=2048)
    k = pw.meta["k"]
    rep = pde_residual(pw, np.zeros((2, 2)), (-k * k, -k * k))
    assert rep.max_abs < 1e-8
    # wrong dispersion sign is detected
    assert pde_residual(pw, np.zeros((2, 2)), (k * k, k * k)).max_abs > 1.0


def test_pde_residual_fourth_order():
    sol = fixtures.dark_dark()
    T = 2 * math.pi / sol.family.omega
    errs = []
    for n in (128, 256, 512):
        g = sample_grid(sol, (-T, T), n)
        errs.append(pde_residual(g, sol.coefficients, sol.mus, sol.potential.V).max_abs)
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(2)]
    assert min(orders) >= 3.7


def test_pde_resolution_warning():
    pw = plane_wave_grid(k=20.0, n=64)
    rep = pde_residual(pw, np.zeros((2, 2)), (-400.0, -400.0))
    assert "under-resolves" in rep.warning


# -- split-step -------------------------------------------------------------


def test_plane_wave_propagation():
    pw = plane_wave_grid(k=3.0, n=256)
    g, rep = split_step_propagate(pw, np.zeros((2, 2)), 1e-3, 1000, check_edges=False,
                                  reference=np.abs(pw.psi))
    assert rep.modulus_drift < 1e-10
    k = pw.meta["k"]
    exact = np.exp(1j * (k * pw.x - k * k * 1.0))
    assert np.max(np.abs(g.psi[0] - exact)) < 1e-9


def test_norm_conservation():
    x = np.linspace(-20, 20, 1024, endpoint=False)
    psi = np.array([np.exp(-x ** 2 + 1j * x), 0.7 * np.exp(-(x - 1) ** 2 / 2)])
    g0 = FieldGrid(x, psi)
    _, rep = split_step_propagate(g0, np.array([[1.0, 0.5], [0.5, -1.0]]), 1e-3, 10_000,
                                  V=lambda s: 0.01 * s * s)
    assert max(rep.norm_drift) < 1e-8


def test_boundary_precondition():
    with pytest.raises(BoundaryError):
        split_step_propagate(plane_wave_grid(), np.zeros((2, 2)), 1e-3, 10)
    g = sample_grid(fixtures.dark_dark(), (-4.0, 4.0), 256)
    with pytest.raises(BoundaryError):
        split_step_propagate(g, fixtures.dark_dark().coefficients, 1e-4, 10)
    with pytest.raises(ValueError):
        split_step_propagate(FieldGrid(np.arange(12.0), np.zeros((2, 12))), np.zeros((2, 2)), 1e-3, 1,
                             check_edges=False)


def test_snapshots_and_phase_rate():
    # a constant-modulus state under constant g rotates at -(g11 |a|^2 + g12 |b|^2)
    x = np.linspace(0, 2 * math.pi, 64, endpoint=False)
    psi = np.array([np.full(64, 1.0 + 0j), np.full(64, 0.5 + 0j)])
    g = np.array([[1.0, 2.0], [0.5, 1.0]])
    out, rep = split_step_propagate(FieldGrid(x, psi), g, 1e-2, 100, check_edges=False,
                                    reference=np.abs(psi), mus=(-1.5, -0.75), snapshot_steps=(50,))
    assert rep.phase_rate_error < 1e-10
    assert set(out.meta["snapshots"]) == {50}


# -- oracle -----------------------------------------------------------------


def test_oracle_dark_soliton():
    sol = fixtures.dark_dark()
    rep = oracle_compare(sol.branch, sol.roots, 0.0, 10.0, step=1e-4)
    assert rep.max_deviation < 1e-6 and rep.first_integral_drift < 1e-8


def test_oracle_finite_sn_period():
    roots = root_triple((0.1, 0.3, 0.5), 1.0)
    br = make_branch("finite_sn", roots)
    P = branch_period(br, roots)
    rep = oracle_compare(br, roots, 0.0, P, step=1e-3)
    assert rep.max_deviation < 1e-6 and rep.first_integral_drift < 1e-8
    assert sn_period_from_oracle(br, roots, step=1e-4) == pytest.approx(P, abs=1e-6)


def test_oracle_fourth_order():
    roots = root_triple((0.1, 0.3, 0.5), 1.0)
    br = make_branch("finite_sn", roots)
    P = branch_period(br, roots)
    errs = [oracle_compare(br, roots, 0.0, P, step=h).max_deviation for h in (0.04, 0.02, 0.01)]
    for a, b in zip(errs, errs[1:]):
        assert a / b == pytest.approx(16.0, rel=0.15)
