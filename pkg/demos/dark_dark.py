"""Dark-dark pair on a periodic nonlinearity.

Builds the solution from three roots and a coupling matrix, prints the
derived constants, then checks the stationary equations and the conserved
current on three spatial periods.
"""
import math

import numpy as np

from phasewave import fixtures
from phasewave.verification import current_residual, stationary_ode_residual

sol = fixtures.dark_dark()
cp = sol.coupling
print(f"roots W = {sol.roots.W}, E = {sol.roots.E:.6g}, C0 = {sol.roots.C0:.6g}, c = {sol.roots.c:.6g}")
print(f"m_s = {cp.m_s:.6g}, c1 = {cp.c1:.6g}, c2 = {cp.c2:.6g}")
print(f"delta1 = {cp.delta1:.6g}, delta2 = {cp.delta2:.6g}")
print(f"trig family: alpha = {sol.family.C2}, omega = {sol.family.omega:.6g}")

T = 2 * math.pi / sol.family.omega
x = np.linspace(-1.5 * T, 1.5 * T, 2001)
R1, R2 = sol.amplitude(x)
print(f"background R1 in [{R1.min():.4f}, {R1.max():.4f}], notch at x = {x[np.argmin(R1)]:.3g}")
print(f"stationary residual {stationary_ode_residual(sol, x).max_abs:.2e}")
print(f"current residual    {current_residual(sol, x).max_abs:.2e}")
