"""Decoupling of the h_ij = 1 system in polar form U1 = U cos(g), U2 = U sin(g).

With a = 1 the autonomous system reads

    U_j'' + E U_j = c_j**2 U_j**-3 + (U1**2 + U2**2) U_j

where c_j are the phase constants. The radius obeys U'' + E U = U**3 + K1 U**-3,
i.e. the template equation with sigma = 1/2 and singular strength K1, and the
angle follows from  Omega'**2 + c1**2/cos**2 + c2**2/sin**2 = K1  in the
coordinate zeta = int dy / U**2.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError, PhaseSingularityError
from .quadrature import cumulative_from_zero, rk_integrate
from .reduction import eval_branch_derivs, make_branch, roots_from_invariants

# sigma of the radial template equation U'' + E U = K1 U**-3 + 2 sigma U**3
RADIAL_SIGMA = 0.5


@dataclass(frozen=True)
class PolarConstants:
    E: float
    K1: float
    K2: float
    c1: float
    c2: float

    def __post_init__(self):
        if not self.K1 > 0:
            raise DomainError(f"K1 must be positive, got {self.K1}")

    @property
    def b(self):
        return self.K1 - self.c1 ** 2 + self.c2 ** 2

    @property
    def delta(self):
        return self.b ** 2 - 4.0 * self.K1 * self.c2 ** 2

    @property
    def tau_range(self):
        r = math.sqrt(max(self.delta, 0.0))
        return (self.b - r) / (2.0 * self.K1), (self.b + r) / (2.0 * self.K1)

    @property
    def angular_period(self):
        """Period of gamma in zeta."""
        return math.pi / math.sqrt(self.K1)


def radial_roots(E, K1, K2):
    """Roots with W1 + W2 + W3 = 2E, pairs = 2 K2, W1 W2 W3 = 2 K1.

    The returned triple carries sigma = 1/2, so branch evaluation applies the
    1/sqrt(2) rescaling of y automatically.
    """
    if not K1 > 0:
        raise DomainError(f"K1 must be positive, got {K1}")
    return roots_from_invariants(E, K2, K1, RADIAL_SIGMA)


def zeta_of_y(U, y, tol=1e-12):
    """zeta(y) = int_0^y ds / U(s)**2 for scalar or array ``y``."""
    def inv_sq(s):
        u = np.asarray(U(s), dtype=float)
        if np.any(u == 0.0):
            raise PhaseSingularityError("U vanishes on the integration path")
        return 1.0 / (u * u)

    return cumulative_from_zero(inv_sq, y, tol, max_panel=0.25)


def _tau(zeta, pc, zeta0):
    arg = 2.0 * math.sqrt(pc.K1) * (np.asarray(zeta, dtype=float) - zeta0)
    r = math.sqrt(pc.delta)
    tau = (pc.b + r * np.sin(arg)) / (2.0 * pc.K1)
    dtau = r * np.cos(arg) / math.sqrt(pc.K1)
    d2tau = 2.0 * pc.b - 4.0 * pc.K1 * tau
    return tau, dtau, d2tau


def _check_polar(pc):
    if pc.c1 == 0.0 or pc.c2 == 0.0:
        # phi**2 then touches 0 or 1 and the principal arcsin branch has a kink
        raise DomainError("the closed-form angle needs c1 != 0 and c2 != 0")
    if pc.delta < 0:
        raise DomainError(f"b**2 - 4 K1 c2**2 = {pc.delta:.6g} < 0: no real phase")


def gamma_derivs(zeta, pc, zeta0=0.0):
    """(gamma, dgamma/dzeta, d2gamma/dzeta2) on the principal branch."""
    _check_polar(pc)
    tau, t1, t2 = _tau(zeta, pc, zeta0)
    bad = (tau < 0.0) | (tau > 1.0)
    if np.any(bad):
        z = np.ravel(np.asarray(zeta, dtype=float) + 0 * tau)[np.argmax(np.ravel(bad))]
        raise DomainError(f"phi**2 leaves [0, 1] at zeta = {z:.6g}")
    q = tau * (1.0 - tau)
    if np.any(q <= 0.0):
        raise DomainError("gamma reaches 0 or pi/2, where the angular equation is singular")
    g = np.arcsin(np.sqrt(tau))
    g1 = t1 / (2.0 * np.sqrt(q))
    q1 = t1 * (1.0 - 2.0 * tau)
    g2 = t2 / (2.0 * np.sqrt(q)) - t1 * q1 / (4.0 * q ** 1.5)
    return g, g1, g2


def gamma_phase(zeta, pc, zeta0=0.0):
    g = gamma_derivs(zeta, pc, zeta0)[0]
    return float(g) if np.ndim(g) == 0 else g


def angular_first_integral(zeta, pc, zeta0=0.0):
    """Omega'**2 + c1**2/cos**2 + c2**2/sin**2 along the closed form (should be K1)."""
    g, g1, _ = gamma_derivs(zeta, pc, zeta0)
    return g1 ** 2 + pc.c1 ** 2 / np.cos(g) ** 2 + pc.c2 ** 2 / np.sin(g) ** 2


def angular_rk(pc, zeta_end, step=1e-3, zeta0=0.0):
    """RK4 integration of Omega'' = -(c1**2 sin/cos**3 - c2**2 cos/sin**3),
    seeded from the closed form at zeta = 0."""
    g0, g1, _ = gamma_derivs(0.0, pc, zeta0)
    c1s, c2s = pc.c1 ** 2, pc.c2 ** 2

    def rhs(_, s):
        sn, cs = math.sin(s[0]), math.cos(s[0])
        return np.array([s[1], -(c1s * sn / cs ** 3 - c2s * cs / sn ** 3)])

    return rk_integrate(rhs, [float(g0), float(g1)], 0.0, zeta_end, step)


@dataclass(frozen=True)
class PolarSolution:
    constants: PolarConstants
    roots: object
    branch: object
    zeta0: float = 0.0

    @classmethod
    def build(cls, constants, kind="dark_soliton", y0=0.0, zeta0=0.0):
        roots = radial_roots(constants.E, constants.K1, constants.K2)
        return cls(constants, roots, make_branch(kind, roots, y0), zeta0)

    @property
    def nus(self):
        return (self.constants.c1 ** 2, self.constants.c2 ** 2)

    def radius(self, y):
        """(U, U', U'') from the radial branch."""
        W, W1, W2 = eval_branch_derivs(self.branch, self.roots, y)
        if np.any(W <= 0):
            raise PhaseSingularityError("radial branch touches U = 0")
        U = np.sqrt(W)
        U1 = W1 / (2.0 * U)
        U2 = W2 / (2.0 * U) - W1 * W1 / (4.0 * U ** 3)
        return U, U1, U2

    def zeta(self, y):
        return zeta_of_y(lambda s: self.radius(s)[0], y)

    def phases(self, y, tol=1e-10):
        """Component phases theta_j' = c_j / U_j**2 with theta_j(0) = 0.

        In zeta these are c1 / cos**2 and c2 / sin**2 of the angle, so one
        quadrature over zeta replaces a nested one over y.
        """
        z = np.asarray(self.zeta(y), dtype=float)
        pc = self.constants

        def tau(t):
            return _tau(t, pc, self.zeta0)[0]

        th1 = pc.c1 * np.asarray(cumulative_from_zero(lambda t: 1.0 / (1.0 - tau(t)), z, tol, max_panel=0.05))
        th2 = pc.c2 * np.asarray(cumulative_from_zero(lambda t: 1.0 / tau(t), z, tol, max_panel=0.05))
        return th1, th2

    def components(self, y):
        """(U1, U2) and their first two y-derivatives, each shape (3, ...)."""
        y = np.asarray(y, dtype=float)
        U, Ud, Udd = self.radius(y)
        om, om1, om2 = gamma_derivs(self.zeta(y), self.constants, self.zeta0)
        W = U * U
        g, g1 = om, om1 / W
        g2 = om2 / (W * W) - om1 * 2.0 * U * Ud / (W * W)
        cs, sn = np.cos(g), np.sin(g)
        U1 = np.array([
            U * cs,
            Ud * cs - U * g1 * sn,
            Udd * cs - 2.0 * Ud * g1 * sn - U * g2 * sn - U * g1 * g1 * cs,
        ])
        U2 = np.array([
            U * sn,
            Ud * sn + U * g1 * cs,
            Udd * sn + 2.0 * Ud * g1 * cs + U * g2 * cs - U * g1 * g1 * sn,
        ])
        return U1, U2


@dataclass(frozen=True)
class PolarReport:
    analytic_residual: float
    fd_residual: float
    angular_residual: float
    radial_residual: float
    pythagoras: float


def _system_residual(U1, U2, U1dd, U2dd, E, nus):
    rho = U1 * U1 + U2 * U2
    r1 = U1dd + E * U1 - nus[0] / U1 ** 3 - rho * U1
    r2 = U2dd + E * U2 - nus[1] / U2 ** 3 - rho * U2
    return max(float(np.max(np.abs(r1))), float(np.max(np.abs(r2))))


def polar_reconstruct(sol, y, fd_step=2e-3):
    """Residuals of the h_ij = 1 system for the reconstructed components.

    The analytic residual uses chain-rule derivatives; the finite-difference
    one uses a fourth-order stencil of width ``fd_step`` on the same points.
    """
    y = np.asarray(y, dtype=float)
    pc = sol.constants
    U1, U2 = sol.components(y)
    ana = _system_residual(U1[0], U2[0], U1[2], U2[2], pc.E, sol.nus)

    h = fd_step
    offs = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * h
    pts = y[None, :] + offs[:, None]
    V1, V2 = sol.components(pts.ravel())
    V1 = V1[0].reshape(pts.shape)
    V2 = V2[0].reshape(pts.shape)
    w = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * h * h)
    fd = _system_residual(V1[2], V2[2], w @ V1, w @ V2, pc.E, sol.nus)

    U, Ud, Udd = sol.radius(y)
    radial = float(np.max(np.abs(Udd + pc.E * U - U ** 3 - pc.K1 / U ** 3)))
    ang = float(np.max(np.abs(angular_first_integral(sol.zeta(y), pc, sol.zeta0) - pc.K1)))
    pyth = float(np.max(np.abs(U1[0] ** 2 + U2[0] ** 2 - U * U)))
    return PolarReport(ana, fd, ang, radial, pyth)
