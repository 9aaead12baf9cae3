"""Independent checks of constructed solutions.

Conventions: the evolution equation is

    i psi_t + psi_xx = V psi + (g_j1 |psi_1|**2 + g_j2 |psi_2|**2) psi_j

so a plane wave exp(i (k x - k**2 t)) solves the free equation.
"""

from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from .assembly import FieldGrid
from .errors import BlowUpError, BoundaryError
from .fft import fft, ifft, is_power_of_two, wavenumbers
from .quadrature import rk_integrate
from .reduction import branch_period, eval_branch_derivs, extended_constants

EDGE_AMPLITUDE = 1e-4


@dataclass(frozen=True)
class ResidualReport:
    max_abs: float
    l2: float
    worst_x: float
    grid_size: int
    check_kind: str
    per_component: tuple = ()
    warning: str = ""

    def passed(self, threshold):
        return self.max_abs < threshold


def _report(x, res, kind, warning=""):
    """``res`` has shape (ncomp, n); l2 uses the trapezoid-free Riemann sum."""
    x = np.asarray(x, dtype=float)
    res = np.abs(np.asarray(res))
    comb = np.max(res, axis=0)
    i = int(np.argmax(comb))
    dx = float(x[1] - x[0]) if x.size > 1 else 1.0
    l2 = float(np.sqrt(np.sum(comb.astype(float) ** 2) * abs(dx)))
    per = tuple(float(np.max(r)) for r in res)
    return ResidualReport(float(comb[i]), l2, float(x[i]), int(x.size), kind, per, warning)


def stationary_ode_residual(solution, x):
    """Residual of R_j'' + p_j R_j - nu_j R_j**-3 - (g_j1 R_1**2 + g_j2 R_2**2) R_j.

    Evaluated with analytic derivatives in extended precision: near the edges
    of localized fixtures the two largest terms are ~1e8 and cancel.
    """
    ld = np.longdouble
    x = np.asarray(x, dtype=float)
    deltas, nus = extended_constants(solution.coupling, solution.roots, ld)
    R = solution.amplitude_derivs(x, dtype=ld, deltas=deltas)
    xl = x.astype(ld)
    a = _a_ext(solution.family, x)
    h = solution.coupling.h
    res = []
    for j in range(2):
        pj = -ld((solution.potential.mu1, solution.potential.mu2)[j]) - ld(solution.potential.quad) * xl * xl
        Rj, _, Rjdd = R[j]
        cubic = (ld(h[j][0]) * R[0, 0] ** 2 + ld(h[j][1]) * R[1, 0] ** 2) / a ** 3
        nu = nus[j]
        sing = np.where(Rj != 0, nu / np.where(Rj != 0, Rj, 1) ** 3, 0)
        res.append(Rjdd + pj * Rj - sing - cubic * Rj)
    return _report(x, np.array(res, dtype=ld).astype(float), "stationary_ode_residual")


def _a_ext(family, x):
    from .scaling import eval_scaling

    return eval_scaling(family, x, dtype=np.longdouble)[0]


def current_residual(solution, x, h=1e-4):
    """max |R_j**2 theta_j' - s_j|, theta_j' from central differences of the
    phase quadrature in the canonical coordinate (theta' = dtheta/dy / a)."""
    x = np.asarray(x, dtype=float)
    y = solution.y(x)
    yp, ym = y + h, y - h
    thp = np.array(solution.phase_of_y(yp))
    thm = np.array(solution.phase_of_y(ym))
    R = np.array(solution.amplitude(x))
    a = solution.family.a(x)
    # y reaches ~1e6 on Gaussian windows, so divide by the rounded spacing
    dth = (thp - thm) / (yp - ym) / a
    s = np.array(solution.s)[:, None]
    return _report(x, R * R * dth - s, "current_residual")


def _d2_fourth_order(u, dx):
    """Fourth-order central second derivative; the two cells at each end are NaN."""
    out = np.full(u.shape, np.nan, dtype=u.dtype)
    out[..., 2:-2] = (
        -u[..., 4:] + 16.0 * u[..., 3:-1] - 30.0 * u[..., 2:-2] + 16.0 * u[..., 1:-3] - u[..., :-4]
    ) / (12.0 * dx * dx)
    return out


def pde_residual(grid, coefficients, mus, V=None):
    """Residual of the evolution equation for a stationary ansatz on ``grid``.

    psi_t = i mu_j psi_j (exact for the ansatz); psi_xx by a fourth-order
    stencil. ``coefficients`` is a callable x -> g of shape (2, 2, n) or a
    constant 2x2 array; ``V`` a callable or None.
    """
    x = grid.x
    psi = np.asarray(grid.psi, dtype=complex)
    dx = grid.dx
    g = coefficients(x) if callable(coefficients) else np.asarray(coefficients, dtype=float)[..., None] * np.ones_like(x)
    Vx = np.zeros_like(x) if V is None else np.asarray(V(x), dtype=float)
    dens = np.abs(psi) ** 2
    pxx = _d2_fourth_order(psi, dx)
    res = []
    for j in range(2):
        psi_t = 1j * mus[j] * psi[j]
        nl = (g[j, 0] * dens[0] + g[j, 1] * dens[1]) * psi[j]
        res.append(1j * psi_t + pxx[j] - Vx * psi[j] - nl)
    res = np.array(res)[:, 2:-2]
    # resolution warning: local wavenumber of the phase vs grid Nyquist
    warning = ""
    ph = np.unwrap(np.angle(psi), axis=-1)
    kloc = np.max(np.abs(np.diff(ph, axis=-1))) / dx
    if kloc > 0.05 * np.pi / dx:
        warning = f"grid under-resolves the field: local wavenumber {kloc:.3g} vs Nyquist {np.pi / dx:.3g}"
    return _report(x[2:-2], res, "pde_residual", warning)


def plane_wave_grid(k=3.0, window=(0.0, 2.0 * math.pi), n=256, t=0.0, amplitude=1.0):
    """Free plane wave amplitude exp(i (k x - k**2 t)); k is snapped to the grid."""
    lo, hi = window
    L = hi - lo
    k = 2.0 * math.pi / L * round(k * L / (2.0 * math.pi))
    x = lo + L / n * np.arange(n)
    psi = amplitude * np.exp(1j * (k * x - k * k * t))
    return FieldGrid(x, np.array([psi, psi]), t, {"k": k, "plane_wave": True})


@dataclass(frozen=True)
class PropagationReport:
    modulus_drift: float
    norm_drift: tuple
    phase_rate_error: float
    steps: int
    dt: float
    phase_rate: tuple = ()
    per_component_drift: tuple = field(default=())


def _edges_ok(psi, tol=EDGE_AMPLITUDE):
    m = np.abs(psi)
    return float(max(np.max(m[..., 0]), np.max(m[..., -1]))) < tol


def split_step_propagate(grid0, coefficients, dt, steps, V=None, reference=None,
                         mus=None, check_edges=True, monitor_every=100, snapshot_steps=()):
    """Strang split-step Fourier propagation.

    Half nonlinear/potential rotation, full kinetic step exp(-i k**2 dt) in
    Fourier space, half rotation. ``reference`` (moduli R_j on the grid)
    enables the modulus-drift monitor, checked every ``monitor_every`` steps
    and at the end; ``mus`` enables the phase-rate estimate at each
    component's peak. Fields after the steps listed in ``snapshot_steps``
    are returned in ``meta["snapshots"]`` keyed by step index.
    """
    psi = np.array(grid0.psi, dtype=complex)
    n = psi.shape[-1]
    if not is_power_of_two(n):
        raise ValueError(f"grid size must be a power of two, got {n}")
    if check_edges and not _edges_ok(psi):
        raise BoundaryError(
            "field does not decay at the window edges (|psi| >= 1e-4); "
            "validate non-decaying solutions with stationary_ode_residual instead"
        )
    x = grid0.x
    dx = grid0.dx
    g = coefficients(x) if callable(coefficients) else np.asarray(coefficients, dtype=float)[..., None] * np.ones_like(x)
    Vx = np.zeros_like(x) if V is None else np.asarray(V(x), dtype=float)
    kin = np.exp(-1j * wavenumbers(n, dx) ** 2 * dt)
    norm0 = np.sum(np.abs(psi) ** 2, axis=-1) * dx

    def half(p):
        dens = np.abs(p) ** 2
        rot = np.empty_like(p)
        for j in range(2):
            rot[j] = Vx + g[j, 0] * dens[0] + g[j, 1] * dens[1]
        return p * np.exp(-0.5j * dt * rot)

    snaps = {int(s): None for s in snapshot_steps if 0 < int(s) <= steps}
    drift = np.zeros(2)
    peaks = None
    if reference is not None:
        reference = np.asarray(reference, dtype=float)
        peaks = [int(np.argmax(r)) for r in reference]
    ph0 = None if peaks is None else np.array([np.angle(psi[j, peaks[j]]) for j in range(2)])
    unwrapped = None if ph0 is None else ph0.copy()
    last = ph0

    for step in range(1, steps + 1):
        psi = half(psi)
        psi = ifft(fft(psi) * kin)
        psi = half(psi)
        if not np.all(np.isfinite(psi)):
            raise BlowUpError("split-step field became non-finite", (step - 1) * dt)
        if step in snaps:
            snaps[step] = psi.copy()
        if peaks is not None:
            cur = np.array([np.angle(psi[j, peaks[j]]) for j in range(2)])
            d = np.angle(np.exp(1j * (cur - last)))
            unwrapped = unwrapped + d
            last = cur
            if step % monitor_every == 0 or step == steps:
                drift = np.maximum(drift, np.max(np.abs(np.abs(psi) - reference), axis=-1))

    norm = np.sum(np.abs(psi) ** 2, axis=-1) * dx
    T = steps * dt
    rate, rate_err = (), math.nan
    if peaks is not None:
        rate = tuple(float(v) for v in (unwrapped - ph0) / T)
        if mus is not None:
            rate_err = float(max(abs(r - m) for r, m in zip(rate, mus)))
    report = PropagationReport(
        modulus_drift=float(np.max(drift)) if peaks is not None else math.nan,
        norm_drift=tuple(float(v) for v in np.abs(norm - norm0)),
        phase_rate_error=rate_err,
        steps=int(steps),
        dt=float(dt),
        phase_rate=rate,
        per_component_drift=tuple(float(v) for v in drift),
    )
    meta = dict(grid0.meta)
    if snaps:
        meta["snapshots"] = snaps
    return FieldGrid(x, psi, grid0.t + T, meta), report


def propagate_solution(solution, window=(-12.0, 12.0), n=2048, t_final=1.0, dt=1e-4,
                       monitor_every=100):
    from .assembly import sample_grid

    grid = sample_grid(solution, window, n)
    R = np.array(solution.amplitude(grid.x))
    steps = int(round(t_final / dt))
    return split_step_propagate(
        grid, solution.coefficients, dt, steps, V=solution.potential.V,
        reference=R, mus=solution.mus, monitor_every=monitor_every,
    )


@dataclass(frozen=True)
class OracleReport:
    max_deviation: float
    first_integral_drift: float
    y_end: float
    steps: int
    period: float = math.nan
    period_error: float = math.nan


def oracle_compare(branch, roots, y_start, y_end, step=1e-4, nu=None):
    """RK4 integration of Phi'' + E Phi = nu Phi**-3 + 2 sigma Phi**3 seeded
    from the branch at ``y_start``, compared with Phi = sqrt(W).

    Also monitors  Phi'**2 - (sigma Phi**4 - nu Phi**-2 - E Phi**2 + C0),
    which is zero on exact solutions.
    """
    E, C0, sigma = roots.E, roots.C0, roots.sigma
    nu = roots.c if nu is None else nu
    W, dW, _ = eval_branch_derivs(branch, roots, np.array([y_start]))
    phi0 = math.sqrt(W[0])
    state0 = [phi0, dW[0] / (2.0 * phi0)]

    def rhs(_, s):
        p = s[0]
        return np.array([s[1], -E * p + nu / p ** 3 + 2.0 * sigma * p ** 3])

    ys, traj = rk_integrate(rhs, state0, y_start, y_end, step)
    Wa, _, _ = eval_branch_derivs(branch, roots, ys)
    dev = float(np.max(np.abs(traj[:, 0] - np.sqrt(Wa))))
    p, dp = traj[:, 0], traj[:, 1]
    fi = dp ** 2 - (sigma * p ** 4 - nu / p ** 2 - E * p ** 2 + C0)
    drift = float(np.max(np.abs(fi)))
    period = branch_period(branch, roots)
    return OracleReport(dev, drift, float(y_end), len(ys) - 1, period)


def sn_period_from_oracle(branch, roots, step=1e-4):
    """Locate successive maxima of sqrt(W) along an RK trajectory; returns the
    measured period of W."""
    period = branch_period(branch, roots)
    E, sigma, nu = roots.E, roots.sigma, roots.c
    # start at a maximum of W so phi' = 0 there
    y_max = branch.y0 + (0.5 * period if branch.kind == "finite_sn" else 0.0)
    W, _, _ = eval_branch_derivs(branch, roots, np.array([y_max]))

    def rhs(_, s):
        p = s[0]
        return np.array([s[1], -E * p + nu / p ** 3 + 2.0 * sigma * p ** 3])

    ys, traj = rk_integrate(rhs, [math.sqrt(W[0]), 0.0], y_max, y_max + 1.25 * period, step)
    v = traj[:, 1]
    # the next maximum: phi' crosses zero from + to - after the first half period
    mask = ys > y_max + 0.5 * period
    idx = np.nonzero(mask[1:] & (v[:-1] > 0) & (v[1:] <= 0))[0]
    if idx.size == 0:
        warnings.warn("no second maximum found on the oracle trajectory")
        return math.nan
    i = idx[0]
    t = ys[i] + (ys[i + 1] - ys[i]) * v[i] / (v[i] - v[i + 1])
    return float(t - y_max)
