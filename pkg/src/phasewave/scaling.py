"""Scaling function a(x), its third-order ODE, first integrals and the
canonical coordinate y(x) = int dx / a.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy.special import erfi

from .errors import InconsistencyError, PositivityError
from .quadrature import cumulative_from_zero

KINDS = ("trig", "exp", "gaussian", "constant")


@dataclass(frozen=True)
class ScalingFamily:
    """Closed-form solutions a(x) of a''' + 4 p a' + 2 p' a = 0.

    trig:     C1 sin(wx) + C2 cos(wx) + C3
    exp:      C1 exp(wx) + C2 exp(-wx) + C3
    gaussian: exp(mu x**2), mu < 0
    constant: 1
    """

    kind: str
    C1: float = 0.0
    C2: float = 0.0
    C3: float = 1.0
    omega: float = 0.0
    mu: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown family kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "gaussian" and not self.mu < 0:
            raise PositivityError("gaussian family needs mu < 0")
        if self.kind in ("trig", "exp") and not self.omega > 0:
            raise ValueError("trig/exp families need omega > 0")

    @classmethod
    def trig(cls, alpha, omega):
        """The periodic family 1 + alpha cos(omega x)."""
        return cls("trig", C1=0.0, C2=alpha, C3=1.0, omega=omega)

    @classmethod
    def gaussian(cls, mu):
        return cls("gaussian", mu=mu)

    @classmethod
    def constant(cls):
        return cls("constant")

    @property
    def closed_form_map(self):
        if self.kind in ("gaussian", "constant"):
            return True
        if self.kind == "trig":
            return self.C3 > math.hypot(self.C1, self.C2)
        return False

    def a(self, x):
        return eval_scaling(self, x, check=False)[0]


def eval_scaling(family, x, check=True, dtype=float):
    """Return ``(a, a', a'', a''')`` at ``x``.

    Raises :class:`PositivityError` if a(x) <= 0 anywhere and ``check`` is set.
    ``dtype=np.longdouble`` evaluates in extended precision.
    """
    x = np.asarray(x, dtype=dtype)
    f = family
    if f.kind == "trig":
        w = f.omega
        s, c = np.sin(w * x), np.cos(w * x)
        a = f.C1 * s + f.C2 * c + f.C3
        a1 = w * (f.C1 * c - f.C2 * s)
        a2 = -w * w * (f.C1 * s + f.C2 * c)
        a3 = -w ** 3 * (f.C1 * c - f.C2 * s)
    elif f.kind == "exp":
        w = f.omega
        ep, em = f.C1 * np.exp(w * x), f.C2 * np.exp(-w * x)
        a = ep + em + f.C3
        a1 = w * (ep - em)
        a2 = w * w * (ep + em)
        a3 = w ** 3 * (ep - em)
    elif f.kind == "gaussian":
        mu = f.mu
        a = np.exp(mu * x * x)
        a1 = 2.0 * mu * x * a
        a2 = (2.0 * mu + 4.0 * mu * mu * x * x) * a
        a3 = (12.0 * mu * mu * x + 8.0 * mu ** 3 * x ** 3) * a
    else:
        a = np.ones_like(x)
        a1 = a2 = a3 = np.zeros_like(x)
    if check and np.any(a <= 0.0):
        bad = np.ravel(x)[np.argmax(np.ravel(a) <= 0.0)]
        raise PositivityError(f"a(x) <= 0 at x = {bad}")
    return a, a1, a2, a3


@dataclass(frozen=True)
class PotentialSpec:
    """V_1 = V_2 = quad * x**2 and chemical potentials mu_j; p_j = -mu_j - V_j."""

    mu1: float
    mu2: float
    quad: float = 0.0

    @classmethod
    def zero(cls, mu):
        return cls(mu, mu, 0.0)

    @classmethod
    def quadratic(cls, mu):
        """The trap V = mu**2 x**2 that pairs with the gaussian family."""
        return cls(mu, mu, mu * mu)

    @property
    def kind(self):
        return "zero" if self.quad == 0.0 else "quadratic"

    @property
    def equal(self):
        return self.mu1 == self.mu2

    def V(self, x):
        x = np.asarray(x, dtype=float)
        return self.quad * x * x

    def p(self, x, j=0):
        mu = (self.mu1, self.mu2)[j]
        return -mu - self.V(x)

    def dp(self, x, j=0):
        return -2.0 * self.quad * np.asarray(x, dtype=float)


def _single_potential(potential):
    if not potential.equal:
        raise NotImplementedError("only the p1 = p2 regime is implemented")


def verify_scaling_ode(family, potential, x):
    """max |a''' + 4 p a' + 2 p' a| over the sample points ``x``."""
    _single_potential(potential)
    a, a1, _, a3 = eval_scaling(family, x, check=False)
    r = a3 + 4.0 * potential.p(x) * a1 + 2.0 * potential.dp(x) * a
    return float(np.max(np.abs(r)))


def first_integral_values(family, potential, x, j=0):
    a, a1, a2, _ = eval_scaling(family, x, check=False)
    return 0.25 * (2.0 * a * a2 - a1 * a1) + potential.p(x, j) * a * a


def first_integral_E(family, potential, x, tol=1e-6):
    """E = (2 a a'' - a'**2)/4 + p a**2, as the median over ``x``.

    Raises :class:`InconsistencyError` when E varies by more than ``tol``,
    meaning ``family`` does not solve the ODE for this potential.
    """
    _single_potential(potential)
    vals = np.atleast_1d(first_integral_values(family, potential, x))
    spread = float(np.max(vals) - np.min(vals))
    if spread > tol:
        raise InconsistencyError(
            f"first integral varies by {spread:.3e} over the grid; "
            "family and potential are inconsistent"
        )
    return float(np.median(vals))


def family_E(family, potential, x=None):
    """E for a family/potential pair, consistency-checked on a sample grid."""
    if x is None:
        span = 2.0 * math.pi / family.omega if family.kind in ("trig", "exp") else 2.0
        x = np.linspace(-span, span, 41)
    return first_integral_E(family, potential, x)


def _trig_unit_map(z, alpha, omega):
    # int_0^z ds / (1 + alpha cos(omega s)).  arctan(beta tan h) plus its
    # branch offset equals h - arctan((1 - beta) s c / (c**2 + beta s**2)),
    # which is smooth for all h, so no unwrapping is needed.
    beta = math.sqrt((1.0 - alpha) / (1.0 + alpha))
    half = 0.5 * omega * np.asarray(z)
    s, c = np.sin(half), np.cos(half)
    phase = half - np.arctan((1.0 - beta) * s * c / (c * c + beta * s * s))
    return 2.0 / (omega * math.sqrt(1.0 - alpha * alpha)) * phase


def canonical_y(family, x, tol=1e-12):
    """Canonical coordinate y(x) = int_0^x ds / a(s), with y(0) = 0."""
    x = np.asarray(x, dtype=float)
    f = family
    if f.kind == "constant":
        y = x.copy()
    elif f.kind == "gaussian":
        # int_0^x exp(-mu s**2) ds; grows like exp(-mu x**2) / (-2 mu x)
        r = math.sqrt(-f.mu)
        y = 0.5 * math.sqrt(math.pi) / r * np.asarray(erfi(r * x))
    elif f.kind == "trig" and f.closed_form_map:
        amp = math.hypot(f.C1, f.C2)
        if amp == 0.0:
            y = x / f.C3
        else:
            alpha = amp / f.C3
            shift = math.atan2(f.C1, f.C2) / f.omega
            y = (_trig_unit_map(x - shift, alpha, f.omega) - _trig_unit_map(-shift, alpha, f.omega)) / f.C3
    else:
        lo, hi = min(0.0, float(np.min(x))), max(0.0, float(np.max(x)))
        eval_scaling(f, np.linspace(lo, hi, 2049))
        y = np.asarray(cumulative_from_zero(lambda s: 1.0 / eval_scaling(f, s, check=False)[0], x, tol))
    eval_scaling(f, x)
    return float(y) if y.ndim == 0 else y


def canonical_y_range(family):
    """Range of y over the real line.

    Every supported family with a > 0 on the whole line gives the full line:
    for the gaussian family 1/a grows without bound.
    """
    return -math.inf, math.inf


def coefficients_from_scaling(h, family, x):
    """g_ij(x) = h_ij / a(x)**3, shape ``(2, 2) + x.shape``."""
    h = np.asarray(h, dtype=float)
    a = eval_scaling(family, x)[0]
    return h.reshape((2, 2) + (1,) * np.ndim(a)) / a ** 3
