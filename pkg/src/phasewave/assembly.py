"""Assemble psi_j(t, x) = R_j(x) exp(i (theta_j(x) + mu_j t)) from the pieces.

R_j = delta_j sqrt(a(x) W(y(x))) and theta_j' = s_j / R_j**2 with s_j = +-sqrt(nu_j).
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import InconsistencyError, PhaseSingularityError, PoleError, PositivityError
from .reduction import eval_branch_derivs, inverse_w_integral, make_branch
from .scaling import (
    canonical_y,
    coefficients_from_scaling,
    eval_scaling,
    family_E,
)


@dataclass(frozen=True)
class StationarySolution:
    family: object
    potential: object
    roots: object
    branch: object
    coupling: object
    phase_signs: tuple = (1.0, 1.0)
    domain: tuple = (-math.inf, math.inf)

    @classmethod
    def build(cls, family, potential, roots, kind, coupling, y0=0.0, phase_signs=(1.0, 1.0),
              domain=(-math.inf, math.inf), e_tol=1e-9):
        """Validate that the family's first integral matches the roots' E, then assemble."""
        E = family_E(family, potential)
        if abs(E - roots.E) > e_tol * max(1.0, abs(E)):
            raise InconsistencyError(
                f"family first integral E = {E:.12g} differs from the roots' E = {roots.E:.12g}"
            )
        if coupling.c != roots.c and abs(coupling.c - roots.c) > 1e-12 * abs(roots.c):
            raise InconsistencyError(f"coupling c = {coupling.c} differs from roots c = {roots.c}")
        if coupling.sigma != roots.sigma:
            raise InconsistencyError("coupling and roots use different sigma")
        branch = make_branch(kind, roots, y0)
        return cls(family, potential, roots, branch, coupling, tuple(phase_signs), tuple(domain))

    @property
    def deltas(self):
        return self.coupling.deltas

    @property
    def nus(self):
        return self.coupling.nus

    @property
    def s(self):
        """Phase constants s_j = sign_j sqrt(nu_j)."""
        return tuple(sg * math.sqrt(nu) for sg, nu in zip(self.phase_signs, self.nus))

    @property
    def mus(self):
        return (self.potential.mu1, self.potential.mu2)

    def y(self, x):
        return canonical_y(self.family, x)

    def _F(self, x, dtype=float):
        # F = a W(y(x)) and its first two x-derivatives
        x = np.asarray(x, dtype=float)
        a, a1, a2, _ = eval_scaling(self.family, x, dtype=dtype)
        W, Wy, Wyy = eval_branch_derivs(self.branch, self.roots, self.y(x), dtype=dtype)
        F = a * W
        F1 = a1 * W + Wy
        F2 = a2 * W + a1 * Wy / a + Wyy / a
        return F, F1, F2, W

    def amplitude_derivs(self, x, dtype=float, deltas=None):
        """Arrays of shape (2, 3, ...): R_j, R_j', R_j''."""
        deltas = self.deltas if deltas is None else deltas
        F, F1, F2, W = self._F(x, dtype)
        if np.any(W < 0):
            raise PositivityError("W < 0 on the requested window: sqrt(W) is not real")
        if np.any(F <= 0) and any(d != 0 for d in deltas):
            raise PositivityError("W vanishes on the requested window")
        rF = np.sqrt(F)
        base = np.array([rF, F1 / (2.0 * rF), F2 / (2.0 * rF) - F1 * F1 / (4.0 * F * rF)])
        return np.array([d * base for d in deltas])

    def amplitude(self, x):
        R = self.amplitude_derivs(x)[:, 0]
        return R[0], R[1]

    def phase_theta(self, x, tol=1e-11):
        """theta_j(x) = int_0^x s_j / R_j**2 dx, theta_j(0) = 0.

        Since dx = a dy and R_j**2 = delta_j**2 a W, this equals
        (s_j / delta_j**2) int_0^{y(x)} dy / W, which stays smooth in y even
        where the x-profile oscillates faster than any grid could follow.
        """
        x = np.asarray(x, dtype=float)
        if any(self.s):
            self.amplitude_derivs(x)  # positivity diagnostics
        return self.phase_of_y(self.y(x), tol)

    def phase_of_y(self, y, tol=1e-11):
        y = np.asarray(y, dtype=float)
        base = None
        out = []
        for j, (sj, dj) in enumerate(zip(self.s, self.deltas)):
            if sj == 0.0:
                out.append(np.zeros_like(y) if y.ndim else 0.0)
                continue
            if dj == 0.0:
                raise PhaseSingularityError(f"component {j + 1} vanishes but s_{j + 1} != 0")
            if base is None:
                try:
                    base = inverse_w_integral(self.branch, self.roots, y, tol)
                except PoleError as exc:
                    raise PhaseSingularityError(f"R_{j + 1} vanishes on the phase path") from exc
            out.append(sj / (dj * dj) * base)
        return out[0], out[1]

    def theta_prime(self, x):
        R = self.amplitude_derivs(x)[:, 0]
        return np.array([sj / (r * r) if sj else np.zeros_like(r) for sj, r in zip(self.s, R)])

    def field_at(self, t, x):
        R1, R2 = self.amplitude(x)
        th1, th2 = self.phase_theta(x)
        m1, m2 = self.mus
        return R1 * np.exp(1j * (th1 + m1 * t)), R2 * np.exp(1j * (th2 + m2 * t))

    def coefficients(self, x):
        return coefficients_from_scaling(self.coupling.h, self.family, x)

    def derived_constants(self):
        r, b, cp = self.roots, self.branch, self.coupling
        return {
            "m_s": cp.m_s,
            "c1": cp.c1,
            "c2": cp.c2,
            "delta1": cp.delta1,
            "delta2": cp.delta2,
            "k": b.k,
            "lambda": b.lam,
            "E": r.E,
            "C0": r.C0,
            "c": r.c,
            "W1": r.W1,
            "W2": r.W2,
            "W3": r.W3,
            "s1": self.s[0],
            "s2": self.s[1],
        }


@dataclass
class FieldGrid:
    x: np.ndarray
    psi: np.ndarray
    t: float = 0.0
    meta: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.x.size

    @property
    def dx(self):
        return float(self.x[1] - self.x[0])

    @property
    def length(self):
        return self.n * self.dx


def periodic_grid(window, n):
    lo, hi = (float(v) for v in window)
    if not hi > lo:
        raise ValueError("window must have hi > lo")
    return lo + (hi - lo) / n * np.arange(n)


def sample_grid(solution, window, n, t=0.0):
    """Sample psi on the periodic grid lo + j (hi - lo)/n, j < n."""
    from .fft import is_power_of_two

    if n < 64 or not is_power_of_two(n):
        raise ValueError(f"sample count must be a power of two >= 64, got {n}")
    lo, hi = window
    dlo, dhi = solution.domain
    if lo < dlo or hi > dhi:
        raise ValueError(f"window {window} leaves the solution domain {solution.domain}")
    x = periodic_grid(window, n)
    psi = np.array(solution.field_at(t, x))
    meta = {"window": (float(lo), float(hi)), "n": n, **solution.derived_constants()}
    return FieldGrid(x, psi, float(t), meta)
