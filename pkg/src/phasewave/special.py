"""Special-function kernels: elliptic integrals and functions, erf, cubic roots,
Weierstrass p.

All functions accept scalars or numpy arrays unless noted otherwise.
"""

from dataclasses import dataclass
import math

import numpy as np

from .errors import DomainError, PoleError, UnsupportedBranchError

# Jacobi functions switch to the k = 1 closed form above this modulus.
HYPERBOLIC_SWITCH = 1.0 - 1e-10

_AGM_MAXITER = 40


def complete_elliptic_K(k):
    """Complete elliptic integral of the first kind K(k) by the AGM.

    ``k`` is the modulus (not the parameter m = k**2), 0 <= k < 1.
    """
    k = float(k)
    if not 0.0 <= k < 1.0:
        raise DomainError(f"complete_elliptic_K needs 0 <= k < 1, got {k!r}")
    a, b = 1.0, math.sqrt((1.0 - k) * (1.0 + k))
    for _ in range(_AGM_MAXITER):
        if abs(a - b) <= 4e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (a + b)


@dataclass(frozen=True)
class EllipticTriple:
    sn: np.ndarray
    cn: np.ndarray
    dn: np.ndarray

    def __iter__(self):
        return iter((self.sn, self.cn, self.dn))


def jacobi_sn_cn_dn(u, k):
    """Jacobi elliptic functions sn, cn, dn of real argument ``u`` and modulus ``k``.

    Uses the descending Landen / AGM scheme (A&S 16.4). For k above
    ``HYPERBOLIC_SWITCH`` the k = 1 forms (tanh, sech, sech) are returned.
    ``u`` and ``k`` broadcast against each other.
    """
    u = np.asarray(u, dtype=float)
    k = np.asarray(k, dtype=float)
    if np.any(~((k >= 0.0) & (k <= 1.0))):
        raise DomainError("jacobi_sn_cn_dn needs 0 <= k <= 1")
    u, k = np.broadcast_arrays(u, k)
    hyper = k > HYPERBOLIC_SWITCH
    kk = np.where(hyper, 0.0, k)

    a = np.ones_like(kk)
    b = np.sqrt((1.0 - kk) * (1.0 + kk))
    c = kk.copy()
    a_seq, c_seq = [a], [c]
    for _ in range(_AGM_MAXITER):
        if np.all(np.abs(c) <= 1e-16):
            break
        a, b, c = 0.5 * (a + b), np.sqrt(a * b), 0.5 * (a - b)
        a_seq.append(a)
        c_seq.append(c)
    n = len(a_seq) - 1

    phi = (2.0 ** n) * a_seq[n] * u
    for j in range(n, 0, -1):
        ratio = np.clip(c_seq[j] / a_seq[j] * np.sin(phi), -1.0, 1.0)
        phi = 0.5 * (phi + np.arcsin(ratio))
    sn = np.sin(phi)
    cn = np.cos(phi)
    # dn**2 = k'**2 + k**2 cn**2 has no cancellation, unlike the AGM ratio
    # cn / cos(phi_1 - phi_0), which degrades where cn -> 0
    dn = np.sqrt((1.0 - kk) * (1.0 + kk) + kk * kk * cn * cn)

    if np.any(hyper):
        t = np.tanh(u)
        s = 1.0 / np.cosh(u)
        sn = np.where(hyper, t, sn)
        cn = np.where(hyper, s, cn)
        dn = np.where(hyper, s, dn)
    if sn.ndim == 0:
        return EllipticTriple(float(sn), float(cn), float(dn))
    return EllipticTriple(sn, cn, dn)


_erf_vec = np.vectorize(math.erf, otypes=[float])


def erf(x):
    """Error function (backed by :func:`math.erf`)."""
    x = np.asarray(x, dtype=float)
    out = _erf_vec(x)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CubicRoots:
    """Roots of a monic cubic, sorted by real part."""

    roots: tuple
    discriminant: float
    all_real: bool

    def real(self):
        if not self.all_real:
            raise UnsupportedBranchError("cubic has complex roots", self.discriminant)
        return tuple(float(r.real) for r in self.roots)


def real_cubic_roots(p2, p1, p0, degenerate_rtol=1e-14):
    """Roots of x**3 + p2 x**2 + p1 x + p0.

    Three real roots are computed with the trigonometric method; a single real
    root with Cardano's formula. A discriminant indistinguishable from zero
    (within its own rounding error, or ``degenerate_rtol`` relative to the
    root scale) is treated as a multiple root.
    """
    p2, p1, p0 = float(p2), float(p1), float(p0)
    shift = p2 / 3.0
    p = p1 - p2 * p2 / 3.0
    q = 2.0 * p2 ** 3 / 27.0 - p2 * p1 / 3.0 + p0
    disc = -(4.0 * p ** 3 + 27.0 * q * q)
    scale = max(abs(p), abs(q) ** (2.0 / 3.0)) ** 3
    # size of the roots themselves; p, q below roundoff of it mean a triple root
    size = max(abs(p2), math.sqrt(abs(p1)), abs(p0) ** (1.0 / 3.0))

    if scale <= (1e-14 * size * size) ** 3:
        t = (0.0, 0.0, 0.0)
        disc = 0.0
    elif abs(disc) <= max(degenerate_rtol * scale, _disc_noise(p2, p1, p0, p, q)):
        # double root (p != 0 here, since p == 0 forces q == 0 or a large |disc|)
        # the double root is a critical point, which is well conditioned
        D = math.sqrt(max(p2 * p2 - 3.0 * p1, 0.0))
        big = -(p2 + math.copysign(D, p2)) / 3.0
        crit = [big, p1 / (3.0 * big)] if big != 0.0 else [0.0]
        double = min(crit, key=lambda x: abs(((x + p2) * x + p1) * x + p0))
        t = (-p2 - 2.0 * double + shift, double + shift, double + shift)
        disc = 0.0
    elif disc > 0.0:
        r = math.sqrt(-p / 3.0)
        arg = (3.0 * q / (2.0 * p)) * math.sqrt(-3.0 / p)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        t = tuple(2.0 * r * math.cos(theta - 2.0 * math.pi * j / 3.0) for j in range(3))
    else:
        sq = math.sqrt(-disc / 108.0)
        u = np.cbrt(-q / 2.0 + sq)
        v = np.cbrt(-q / 2.0 - sq)
        t1 = u + v
        re = -0.5 * t1
        im = 0.5 * math.sqrt(3.0) * (u - v)
        t = (complex(t1), complex(re, im), complex(re, -im))

    xs = [complex(ti) - shift for ti in t]
    if disc > 0.0:
        xs = [complex(_polish(x.real, p2, p1, p0)) for x in xs]
    xs.sort(key=lambda z: (z.real, z.imag))
    return CubicRoots(tuple(xs), float(disc), disc >= 0.0)


def _disc_noise(p2, p1, p0, p, q):
    # first-order rounding error of the discriminant inherited from p and q
    eps = np.finfo(float).eps
    dp = eps * (abs(p1) + p2 * p2 / 3.0)
    dq = eps * (2.0 * abs(p2) ** 3 / 27.0 + abs(p2 * p1) / 3.0 + abs(p0))
    return 8.0 * (12.0 * p * p * dp + 54.0 * abs(q) * dq)


def _polish(x, p2, p1, p0):
    # one Newton step; skipped where the derivative vanishes (multiple roots)
    f = ((x + p2) * x + p1) * x + p0
    df = (3.0 * x + 2.0 * p2) * x + p1
    if df != 0.0:
        step = f / df
        if abs(step) < 1e-8 * max(1.0, abs(x)):
            return x - step
    return x


def weierstrass_roots(g2, g3):
    """Roots e3 <= e2 <= e1 of 4t**3 - g2 t - g3 (three-real-root lattice only)."""
    cr = real_cubic_roots(0.0, -g2 / 4.0, -g3 / 4.0)
    if not cr.all_real:
        raise UnsupportedBranchError(
            "weierstrass_p supports only real roots (discriminant < 0)", cr.discriminant
        )
    e3, e2, e1 = cr.real()
    # enforce e1 + e2 + e3 = 0 against roundoff
    m = (e1 + e2 + e3) / 3.0
    return e1 - m, e2 - m, e3 - m


def weierstrass_p(y, g2, g3):
    """Weierstrass p(y; g2, g3) for real y in the three-real-root case."""
    if g2 < 0:
        raise DomainError("g2 must be nonnegative")
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(y) < 1e-8):
        raise DomainError("weierstrass_p: |y| < 1e-8 is at the double pole")
    e1, e2, e3 = weierstrass_roots(g2, g3)
    span = e1 - e3
    if span <= 0.0:
        out = 1.0 / y ** 2
        return float(out) if out.ndim == 0 else out
    k = math.sqrt(max(0.0, min(1.0, (e2 - e3) / span)))
    sn = np.asarray(jacobi_sn_cn_dn(y * math.sqrt(span), k).sn)
    if np.any(np.abs(sn) < 1e-12):
        raise PoleError("weierstrass_p evaluated at a lattice point")
    out = e3 + span / sn ** 2
    return float(out) if out.ndim == 0 else out
