"""Bright family on the Gaussian scaling a = exp(mu x**2).

Walks the root pairs of the bright figures, printing the elliptic modulus,
the number of W maxima the canonical coordinate sweeps over [-10, 10], and
the stationary residual. The canonical coordinate here is unbounded, so
every member carries many oscillations of W in y; the visible profile is
shaped by the a**(1/2) envelope.
"""
import numpy as np

from phasewave import fixtures
from phasewave.reduction import branch_maxima_count
from phasewave.scaling import canonical_y
from phasewave.verification import stationary_ode_residual

x = np.linspace(-6, 6, 1201)
ylo, yhi = canonical_y(fixtures.bright_bright().family, np.array([-10.0, 10.0]))
print(f"y(+-10) = +-{yhi:.4g}")
print(f"{'W1':>6} {'W3':>11} {'k':>9} {'maxima':>9} {'residual':>9}")
for W1, W3 in fixtures.MULTI_PEAK:
    sol = fixtures.gaussian_bright(W1, W3)
    peaks = branch_maxima_count(sol.branch, sol.roots, ylo, yhi)
    res = stationary_ode_residual(sol, x).max_abs
    print(f"{W1:6g} {W3:11.8g} {sol.branch.k:9.6f} {peaks:9d} {res:9.2e}")
