"""The singular template ODE  Phi'' + E Phi = c Phi**-3 + 2 sigma Phi**3.

With W = Phi**2 its first integral reads

    W'**2 = 4 (sigma W**3 - E W**2 + C0 W - c) = 4 sigma (W - W1)(W - W2)(W - W3)

and the bounded/blow-up solutions are sn**2 forms in the rescaled variable
sqrt(|sigma|) y. This module holds the root algebra, the coupling algebra
that maps the two-component autonomous system onto the template ODE, the
explicit branches, and the Weierstrass consistency relations.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .errors import (
    BranchUnavailableError,
    IncompatibleCouplingError,
    PoleError,
    RealSolutionImpossibleError,
)
from .special import jacobi_sn_cn_dn, real_cubic_roots

# Root gaps below this are treated as exact double roots when evaluating branches.
DEGENERATE_GAP = 1e-9

BRANCH_KINDS = ("finite_sn", "dark_soliton", "singular_sn", "finite_sn_neg_sigma", "bright_soliton")


@dataclass(frozen=True)
class RootTriple:
    """Roots W1 <= W2 <= W3 of W**3 - (E/s) W**2 + (C0/s) W - c/s, s = sigma."""

    W1: float
    W2: float
    W3: float
    sigma: float
    E: float
    C0: float
    c: float

    @property
    def W(self):
        return (self.W1, self.W2, self.W3)

    @property
    def sign(self):
        return 1.0 if self.sigma > 0 else -1.0

    @property
    def scale(self):
        """sqrt(|sigma|): the y-rescaling that normalizes sigma to +-1."""
        return math.sqrt(abs(self.sigma))

    def vieta_residuals(self):
        s = self.sigma
        W1, W2, W3 = self.W
        return (
            W1 + W2 + W3 - self.E / s,
            W1 * W2 + W2 * W3 + W1 * W3 - self.C0 / s,
            W1 * W2 * W3 - self.c / s,
        )

    def polynomial(self, W):
        """sigma (W - W1)(W - W2)(W - W3)."""
        return self.sigma * (W - self.W1) * (W - self.W2) * (W - self.W3)


def invariants_from_roots(roots, sigma):
    """(E, C0, c) = sigma * (sum W, sum of pairs, product)."""
    W1, W2, W3 = (float(w) for w in roots)
    return (
        sigma * (W1 + W2 + W3),
        sigma * (W1 * W2 + W2 * W3 + W1 * W3),
        sigma * W1 * W2 * W3,
    )


def roots_from_invariants(E, C0, c, sigma):
    """Sorted real roots for the invariants; complex roots raise
    :class:`BranchUnavailableError` carrying the discriminant."""
    if sigma == 0:
        raise ValueError("sigma must be nonzero")
    cr = real_cubic_roots(-E / sigma, C0 / sigma, -c / sigma)
    if not cr.all_real:
        raise BranchUnavailableError(
            f"roots for (E={E}, C0={C0}, c={c}, sigma={sigma}) are complex", cr.discriminant
        )
    W1, W2, W3 = cr.real()
    return RootTriple(W1, W2, W3, float(sigma), float(E), float(C0), float(c))


def root_triple(W, sigma):
    """RootTriple from explicit roots (sorted here)."""
    W1, W2, W3 = sorted(float(w) for w in W)
    E, C0, c = invariants_from_roots((W1, W2, W3), sigma)
    return RootTriple(W1, W2, W3, float(sigma), E, C0, c)


# -- coupling algebra -------------------------------------------------------


@dataclass(frozen=True)
class CouplingSolution:
    """Constants reducing U_j = delta_j Phi to the template ODE.

    ``c1``, ``c2`` are the singular strengths nu_j of the component equations;
    ``delta_j**4 = c_j / c``.
    """

    h: tuple
    c: float
    sigma: float
    c1: float
    c2: float
    delta1: float
    delta2: float
    m_s: float = None
    compatibility_residual: float = 0.0
    relation_residuals: tuple = field(default=(0.0, 0.0))

    @property
    def deltas(self):
        return (self.delta1, self.delta2)

    @property
    def nus(self):
        return (self.c1, self.c2)


def _relations(h, c, sigma, c1, c2):
    (h11, h12), (h21, h22) = h
    r12 = math.sqrt(c1 * c2)
    return (
        c1 * h11 + r12 * h12 - 2.0 * sigma * math.sqrt(c * c1),
        r12 * h21 + c2 * h22 - 2.0 * sigma * math.sqrt(c * c2),
    )


def _compat(h, c1, c2):
    (h11, h12), (h21, h22) = h
    return c1 * (h11 - h21) ** 2 - c2 * (h22 - h12) ** 2


def derive_coupling(h, c, sigma, c1=None, c2=None, rtol=1e-10):
    """Solve the coupling relations for (c1, c2, delta1, delta2).

    Generic case (h11 != h21): closed form through
    m_s = (h22 - h12) / (h11 - h21). Symmetric case (h11 = h21, h22 = h12):
    the relations collapse to one and the caller supplies ``c1``, ``c2``.

    In terms of d_j = delta_j**2 the relations are linear,
    h_j1 d1 + h_j2 d2 = 2 sigma, so a real solution needs d_j >= 0; a negative
    d_j raises :class:`RealSolutionImpossibleError`. d_j = 0 is allowed and
    gives a vanishing component.
    """
    h = tuple(tuple(float(v) for v in row) for row in h)
    (h11, h12), (h21, h22) = h
    c, sigma = float(c), float(sigma)
    if c == 0:
        raise ValueError("c must be nonzero")
    if c < 0:
        raise RealSolutionImpossibleError(
            f"c = {c} < 0: singular strengths c_j = c delta_j**4 would be negative"
        )
    m_s = None
    if h11 != h21:
        m_s = (h22 - h12) / (h11 - h21)
        denom = m_s * h11 + h12
        if denom == 0:
            raise IncompatibleCouplingError("m_s h11 + h12 = 0: relations have no solution")
        d2 = 2.0 * sigma / denom
        d1 = m_s * d2
        if d1 < 0 or d2 < 0:
            raise RealSolutionImpossibleError(
                f"delta_1**2 = {d1:.6g}, delta_2**2 = {d2:.6g}: the signs of h are "
                f"incompatible with sigma = {sigma:g} (attractive h needs sigma < 0)"
            )
        c2 = 4.0 * sigma ** 2 * c / denom ** 2
        c1 = m_s ** 2 * c2
    else:
        if h22 != h12:
            raise IncompatibleCouplingError(
                "h11 = h21 but h22 != h12: compatibility condition cannot hold"
            )
        if c1 is None or c2 is None:
            raise IncompatibleCouplingError(
                "symmetric coupling (h11 = h21, h22 = h12) needs c1 and c2 supplied"
            )
        c1, c2 = float(c1), float(c2)
        if c1 / c < 0 or c2 / c < 0:
            raise RealSolutionImpossibleError("c_j / c must be nonnegative")
    rel = _relations(h, c, sigma, c1, c2)
    scale = max(abs(c1), abs(c2), abs(c)) * max(1.0, max(abs(v) for row in h for v in row))
    if max(abs(r) for r in rel) > rtol * scale:
        raise IncompatibleCouplingError(
            f"coupling relations not satisfied (residuals {rel[0]:.3e}, {rel[1]:.3e})"
        )
    return CouplingSolution(
        h=h,
        c=c,
        sigma=sigma,
        c1=c1,
        c2=c2,
        delta1=(c1 / c) ** 0.25,
        delta2=(c2 / c) ** 0.25,
        m_s=m_s,
        compatibility_residual=_compat(h, c1, c2),
        relation_residuals=rel,
    )


def extended_constants(coupling, roots, dtype=np.longdouble):
    """(deltas, nus) recomputed in ``dtype`` from h and the roots.

    Residual checks on localized fixtures cancel terms of size ~1e10, so the
    double-rounded delta_j, nu_j would set the floor.
    """
    W1, W2, W3 = (dtype(w) for w in roots.W)
    sigma = dtype(coupling.sigma)
    c = dtype(roots.sigma) * W1 * W2 * W3
    (h11, h12), (h21, h22) = ((dtype(v) for v in row) for row in coupling.h)
    if coupling.m_s is not None:
        m_s = (h22 - h12) / (h11 - h21)
        d2 = 2 * sigma / (m_s * h11 + h12)
        d = (m_s * d2, d2)
        nus = tuple(dj * dj * c for dj in d)
    else:
        nus = (dtype(coupling.c1), dtype(coupling.c2))
        d = tuple(np.sqrt(nu / c) for nu in nus)
    deltas = []
    for dj, stored in zip(d, coupling.deltas):
        ext = np.sqrt(dj)
        # keep a stored delta that is not the rounding of the exact one
        deltas.append(ext if abs(float(ext) - stored) <= 4e-16 * abs(stored) else dtype(stored))
    return tuple(deltas), nus


# -- explicit branches ------------------------------------------------------


@dataclass(frozen=True)
class BranchSelector:
    """Closed-form solution W(y) of the elliptic equation.

    ``lam`` and ``k`` are the sn scale and modulus in the rescaled variable;
    the argument of sn is ``lam * scale * (y - y0)``.
    """

    kind: str
    lam: float
    k: float
    y0: float = 0.0


def _gap_ok(lo, hi):
    return hi - lo >= -DEGENERATE_GAP


def make_branch(kind, roots, y0=0.0):
    """Validate root ordering for ``kind`` and fix lambda, k."""
    if kind not in BRANCH_KINDS:
        raise ValueError(f"unknown branch {kind!r}; expected one of {BRANCH_KINDS}")
    W1, W2, W3 = roots.W
    pos = roots.sigma > 0

    def need(cond, msg):
        if not cond:
            raise BranchUnavailableError(f"{kind}: {msg} (roots {roots.W}, sigma {roots.sigma})")

    if kind == "finite_sn":
        need(pos, "needs sigma > 0")
        need(0 < W1 <= W2 <= W3, "needs 0 < W1 <= W2 <= W3")
        lam = math.sqrt(W3 - W1)
        if W3 == W1:
            k = 0.0  # equilibrium W = W1
        elif W3 - W2 < DEGENERATE_GAP:
            k = 1.0
        else:
            k = math.sqrt((W2 - W1) / (W3 - W1))
    elif kind == "dark_soliton":
        need(pos, "needs sigma > 0")
        need(0 < W1 < W2 and W3 - W2 < DEGENERATE_GAP, "needs 0 < W1 < W2 = W3")
        lam, k = math.sqrt(W2 - W1), 1.0
    elif kind == "singular_sn":
        need(pos, "needs sigma > 0")
        need(0 < W1 <= W2 < W3, "needs 0 < W1 <= W2 < W3")
        lam = math.sqrt(W3 - W1)
        k = math.sqrt((W2 - W1) / (W3 - W1))
    elif kind == "finite_sn_neg_sigma":
        need(not pos, "needs sigma < 0")
        need(W1 < 0 < W2 <= W3 and W1 < W2, "needs W1 < 0 < W2 <= W3")
        lam = math.sqrt(W3 - W1)
        k = 1.0 if W2 - W1 < DEGENERATE_GAP else math.sqrt((W3 - W2) / (W3 - W1))
    else:
        need(not pos, "needs sigma < 0")
        need(W2 - W1 < DEGENERATE_GAP and W1 < W3, "needs W1 = W2 < W3")
        lam, k = math.sqrt(W3 - W1), 1.0
    return BranchSelector(kind, lam, min(k, 1.0), float(y0))


def eval_branch_derivs(branch, roots, y, dtype=float):
    """W, dW/dy, d2W/dy2 with y the unscaled canonical coordinate.

    For ``dtype=np.longdouble`` sn comes from the double-precision kernel and
    cn, dn are rebuilt from it in extended precision, so the triple satisfies
    the first integral to extended precision at a slightly shifted point.
    """
    y = np.asarray(y, dtype=float)
    W1, W2, W3 = roots.W
    kappa = branch.lam * roots.scale
    u = kappa * (y - branch.y0)
    k = branch.k
    s, c, d = (np.asarray(v) for v in jacobi_sn_cn_dn(u, k))
    if dtype is not float:
        kk = dtype(k)
        s = s.astype(dtype)
        c = np.where(c < 0, -1, 1) * np.sqrt(1 - s * s)
        d = np.sqrt(1 - kk * kk * s * s)
        kappa = dtype(kappa)
        W1, W2, W3 = (dtype(w) for w in roots.W)
    kind = branch.kind

    if kind == "singular_sn":
        if np.any(np.abs(s) < 1e-12):
            raise PoleError("singular_sn evaluated at a pole (sn = 0)")
        G = 1.0 / (s * s)
        G1 = -2.0 * c * d / s ** 3
        G2 = 2.0 * ((d * d + k * k * c * c) * G + 3.0 * c * c * d * d * G * G)
        A, B = W1, W3 - W1
    else:
        G = s * s
        G1 = 2.0 * s * c * d
        G2 = 2.0 * (c * c * d * d - s * s * d * d - k * k * s * s * c * c)
        if kind in ("finite_sn", "dark_soliton"):
            A, B = W1, W2 - W1
        else:
            # W3 - (W3 - Wm) sn**2 written as Wm + (W3 - Wm) cn**2, which
            # keeps full relative precision near the lower turning point
            G, G1, G2 = c * c, -G1, -G2
            A = W2 if kind == "finite_sn_neg_sigma" else W1
            B = W3 - A
    W = A + B * G
    dW = B * kappa * G1
    d2W = B * kappa * kappa * G2
    return W, dW, d2W


def eval_branch(branch, roots, y):
    """(W, dW/dy) on the selected branch."""
    W, dW, _ = eval_branch_derivs(branch, roots, y)
    return W, dW


def branch_first_integral_residual(branch, roots, y):
    """max |W'**2 - 4 sign(sigma) (W-W1)(W-W2)(W-W3)| in the rescaled variable."""
    W, dW = eval_branch(branch, roots, y)
    lhs = dW * dW / abs(roots.sigma)
    rhs = 4.0 * roots.sign * (W - roots.W1) * (W - roots.W2) * (W - roots.W3)
    return float(np.max(np.abs(lhs - rhs)))


def branch_period(branch, roots):
    """Period of W in y (infinite for solitons)."""
    from .special import complete_elliptic_K

    if branch.k >= 1.0:
        return math.inf
    return 2.0 * complete_elliptic_K(branch.k) / (branch.lam * roots.scale)


def inverse_w_integral(branch, roots, y, tol=1e-11):
    """int_0^y ds / W(s) for scalar or array ``y``.

    Periodic branches are reduced modulo one period, so huge ``y`` costs no
    more than a single period; soliton tails are continued linearly once W
    has reached its asymptote to roundoff.
    """
    from .errors import AccuracyError
    from .quadrature import adaptive_simpson_panels, cumulative_from_zero

    y = np.asarray(y, dtype=float)
    y0 = branch.y0

    def inv(t):
        W = eval_branch_derivs(branch, roots, t)[0]
        if np.any(W <= 0):
            raise PoleError("W vanishes on the integration path: 1/W is not integrable")
        return 1.0 / W

    P = branch_period(branch, roots)
    if math.isfinite(P):
        vals, ok = adaptive_simpson_panels(inv, np.linspace(y0, y0 + P, 33), tol * 1e-3, rtol=1e-12)
        if not ok:
            raise AccuracyError("period integral of 1/W did not converge", float(vals.sum()))
        per = float(vals.sum())

        def G(v):
            # int_{y0}^{v}
            n = np.floor((v - y0) / P)
            r = y0 + (v - y0 - n * P)
            return n * per + cumulative_from_zero(inv, r, tol, origin=y0, max_panel=0.05 * P, rtol=1e-12)
    else:
        # sech**2(u) < 1e-34 past |u| = 40, where W equals its asymptote
        cut = 40.0 / (branch.lam * roots.scale)
        W_inf = eval_branch_derivs(branch, roots, np.array([y0 + 2.0 * cut]))[0][0]

        def G(v):
            inner = np.clip(v, y0 - cut, y0 + cut)
            core = cumulative_from_zero(inv, inner, tol, origin=y0, max_panel=0.05 * cut)
            return core + (v - inner) / W_inf

    out = G(y) - G(np.array(0.0))
    return float(out) if np.ndim(out) == 0 else out


def branch_maxima_count(branch, roots, y_lo, y_hi):
    """Number of local maxima of W(y) with y_lo <= y <= y_hi.

    Maxima sit at sn**2 = 1 on the finite sn branch and at sn = 0 on the
    negative-sigma branch; the bright soliton has one, at y0.
    """
    from .special import complete_elliptic_K

    kind, y0 = branch.kind, branch.y0
    if kind == "bright_soliton" or (kind == "finite_sn_neg_sigma" and branch.k >= 1.0):
        return int(y_lo <= y0 <= y_hi)
    if kind not in ("finite_sn", "finite_sn_neg_sigma") or branch.k >= 1.0 or roots.W3 == roots.W1:
        return 0
    half = complete_elliptic_K(branch.k) / (branch.lam * roots.scale)  # K / kappa
    offset = 1.0 if kind == "finite_sn" else 0.0
    # maxima at y0 + (2n + offset) * half
    lo = math.ceil(((y_lo - y0) / half - offset) / 2.0)
    hi = math.floor(((y_hi - y0) / half - offset) / 2.0)
    return max(0, hi - lo + 1)


def check_nonnegative(branch, roots, y):
    """Raise if W < 0 anywhere on ``y`` (Phi = sqrt(W) must be real)."""
    from .errors import PositivityError

    W, _ = eval_branch(branch, roots, y)
    if np.any(W < 0):
        i = int(np.argmin(W))
        raise PositivityError(
            f"W = {float(np.ravel(W)[i]):.6g} < 0 at y = {float(np.ravel(y)[i]):.6g}; "
            "Phi = sqrt(W) is not real on this window"
        )


# -- Weierstrass relations --------------------------------------------------


@dataclass(frozen=True)
class WeierstrassCheck:
    relation_residual: float
    relative_residual: float
    discriminant: float
    applicable: bool


def weierstrass_invariants(roots):
    """(g2, g3, k**2) for the zero-sum shift of the roots W1 <= W2 <= W3."""
    W = np.asarray(roots, dtype=float)
    e = np.sort(W - W.mean())
    g2 = -4.0 * (e[0] * e[1] + e[1] * e[2] + e[0] * e[2])
    g3 = 4.0 * e[0] * e[1] * e[2]
    k2 = (e[1] - e[0]) / (e[2] - e[0]) if e[2] > e[0] else 0.0
    return float(g2), float(g3), float(k2)


def weierstrass_consistency(k2, g2, g3):
    """Residual of 108 g3^2 (1-k^2+k^4)^3 = g2^3 (k^2+1)^2 (k^2-2)^2 (2k^2-1)^2
    and the discriminant g2^3 - 27 g3^2."""
    lhs = 108.0 * g3 * g3 * (1.0 - k2 + k2 * k2) ** 3
    rhs = g2 ** 3 * (k2 + 1.0) ** 2 * (k2 - 2.0) ** 2 * (2.0 * k2 - 1.0) ** 2
    res = lhs - rhs
    denom = max(abs(lhs), abs(rhs))
    rel = abs(res) / denom if denom > 0 else 0.0
    return WeierstrassCheck(res, rel, g2 ** 3 - 27.0 * g3 * g3, g2 * g3 != 0)
