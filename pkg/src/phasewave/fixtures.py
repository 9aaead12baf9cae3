"""Reference configurations: periodic dark-dark, zero-dark, Gaussian bright and
multi-peak families, and the h_ij = 1 polar example."""

import math

from .assembly import StationarySolution
from .polar import PolarConstants, PolarSolution
from .reduction import derive_coupling, root_triple
from .scaling import PotentialSpec, ScalingFamily

DARK_H = ((2.0, 1.0), (0.5, 2.0))
ZERO_DARK_H = ((2.0, 2.0), (0.5, 2.0))
# sigma = -1 needs attractive couplings for real delta_j
BRIGHT_H = ((-2.0, -1.0), (-0.5, -2.0))
GAUSS_MU = -0.15


def trig_omega_for(E, alpha):
    """omega such that 1 + alpha cos(omega x) has first integral E (V = 0)."""
    return 2.0 * math.sqrt(E / (1.0 - alpha * alpha))


def dark_dark(alpha=0.05, W=(0.1, 0.5, 0.5), h=DARK_H, sigma=1.0):
    roots = root_triple(W, sigma)
    omega = trig_omega_for(roots.E, alpha)
    family = ScalingFamily.trig(alpha, omega)
    potential = PotentialSpec.zero(-omega * omega / 4.0)
    coupling = derive_coupling(h, roots.c, sigma)
    return StationarySolution.build(family, potential, roots, "dark_soliton", coupling)


def zero_dark(alpha=0.1, W=(0.1, 0.5, 0.5)):
    return dark_dark(alpha, W, ZERO_DARK_H)


def gaussian_bright(W1=-0.1, W3=0.0501, mu=GAUSS_MU, h=BRIGHT_H, sigma=-1.0):
    """sn-type solution on the Gaussian family; E = 0 fixes W2 = -(W1 + W3)."""
    roots = root_triple((W1, -(W1 + W3), W3), sigma)
    family = ScalingFamily.gaussian(mu)
    potential = PotentialSpec.quadratic(mu)
    coupling = derive_coupling(h, roots.c, sigma)
    return StationarySolution.build(family, potential, roots, "finite_sn_neg_sigma", coupling)


def bright_bright():
    return gaussian_bright()


MULTI_PEAK = ((-0.1, 0.0501), (-2.0, 1.5), (-2.0, 1.999999), (-6.0, 4.5), (-6.0, 5.9999999))


def polar_example(K1=1.0, c1=0.25, c2=0.25, W=(0.5, 2.0, 2.0)):
    """Dark radial branch with W1 W2 W3 = 2 K1; E and K2 follow from the roots."""
    W1, W2, W3 = W
    if abs(W1 * W2 * W3 - 2.0 * K1) > 1e-12 * max(1.0, K1):
        raise ValueError("radial roots must satisfy W1 W2 W3 = 2 K1")
    E = 0.5 * (W1 + W2 + W3)
    K2 = 0.5 * (W1 * W2 + W2 * W3 + W1 * W3)
    return PolarSolution.build(PolarConstants(E, K1, K2, c1, c2))
