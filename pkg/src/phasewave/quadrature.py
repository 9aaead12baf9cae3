"""Adaptive Simpson quadrature and fixed-step RK4.

The quadrature engine refines all active panels at once, so integrands must
accept numpy arrays. Scalar-only callables are wrapped with ``np.vectorize``.
"""

import math

import numpy as np

from .errors import AccuracyError, BlowUpError

MAX_DEPTH = 60
MAX_ACTIVE = 1 << 21
_ROUNDOFF = 50.0 * np.finfo(float).eps


def _as_vectorized(f):
    probe = np.array([0.25, 0.5])
    try:
        out = np.asarray(f(probe), dtype=float)
        if out.shape == probe.shape:
            return f
    except Exception:
        pass
    return np.vectorize(f, otypes=[float])


def adaptive_simpson_panels(f, edges, tol, max_depth=MAX_DEPTH, rtol=0.0, max_active=MAX_ACTIVE):
    """Integrate ``f`` over each panel ``[edges[i], edges[i+1]]``.

    ``tol`` is the absolute error budget for the whole range, shared between
    panels in proportion to their length; a sub-panel is also accepted when
    its error is below ``rtol`` times its own integral. Returns
    ``(integrals, converged)`` where ``converged`` is False if any panel hit
    ``max_depth`` or the number of live sub-panels exceeded ``max_active``.
    """
    f = _as_vectorized(f)
    edges = np.asarray(edges, dtype=float)
    npan = edges.size - 1
    out = np.zeros(npan)
    if npan <= 0:
        return out, True
    total_len = float(np.sum(np.abs(np.diff(edges))))
    if total_len == 0.0:
        return out, True
    density = tol / total_len

    a = edges[:-1].copy()
    b = edges[1:].copy()
    owner = np.arange(npan)
    m = 0.5 * (a + b)
    fa, fm, fb = f(a), f(m), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    depth = 0
    converged = True
    while a.size:
        lm = 0.5 * (a + m)
        rm = 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        fine = left + right
        err = np.abs(fine - whole)
        budget = 15.0 * density * np.abs(b - a)
        floor = max(_ROUNDOFF, rtol) * (np.abs(left) + np.abs(right))
        done = (err <= budget) | (err <= floor)
        if depth >= max_depth or 2 * np.count_nonzero(~done) > max_active:
            if not np.all(done):
                converged = False
            done[:] = True
        np.add.at(out, owner[done], (fine + (fine - whole) / 15.0)[done])
        keep = ~done
        if not np.any(keep):
            break
        a, m, b = a[keep], m[keep], b[keep]
        lm, rm = lm[keep], rm[keep]
        fa, fm, fb, flm, frm = fa[keep], fm[keep], fb[keep], flm[keep], frm[keep]
        left, right, owner = left[keep], right[keep], owner[keep]
        # children: [a, m] with midpoint lm, [m, b] with midpoint rm
        a = np.concatenate([a, m])
        b = np.concatenate([m, b])
        m = np.concatenate([lm, rm])
        fa, fb, fm = np.concatenate([fa, fm]), np.concatenate([fm, fb]), np.concatenate([flm, frm])
        whole = np.concatenate([left, right])
        owner = np.concatenate([owner, owner])
        depth += 1
    return out, converged


def integrate_adaptive(f, a, b, tol=1e-10, panels=8, max_depth=MAX_DEPTH):
    """Adaptive Simpson integral of ``f`` from ``a`` to ``b``.

    The interval is first cut into ``panels`` equal pieces so narrow features
    are not missed by the initial five-point rule. Raises
    :class:`AccuracyError` (with ``estimate``) if the depth cap is reached.
    """
    a, b = float(a), float(b)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if a == b:
        return 0.0
    edges = np.linspace(a, b, panels + 1)
    vals, ok = adaptive_simpson_panels(f, edges, tol, max_depth=max_depth)
    total = float(np.sum(vals))
    if not ok:
        raise AccuracyError(f"integrate_adaptive hit depth {max_depth} on [{a}, {b}]", total)
    return total


def cumulative_from_zero(f, x, tol=1e-10, origin=0.0, max_panel=None, rtol=0.0):
    """``F(x) = integral of f from origin to x`` for every entry of ``x``.

    Panels are the gaps between the sorted sample points (plus ``origin``),
    optionally subdivided to at most ``max_panel`` in length.
    """
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    nodes = np.unique(np.concatenate([flat, [origin]]))
    if max_panel is not None and nodes.size > 1:
        pieces = [nodes[:1]]
        for lo, hi in zip(nodes[:-1], nodes[1:]):
            n = max(1, int(math.ceil((hi - lo) / max_panel)))
            pieces.append(np.linspace(lo, hi, n + 1)[1:])
        nodes = np.concatenate(pieces)
    vals, ok = adaptive_simpson_panels(f, nodes, tol, rtol=rtol)
    cum = np.concatenate([[0.0], np.cumsum(vals)])
    i0 = int(np.searchsorted(nodes, origin))
    cum = cum - cum[i0]
    if not ok:
        raise AccuracyError("cumulative quadrature hit the depth cap", cum)
    idx = np.searchsorted(nodes, flat)
    out = cum[idx].reshape(x.shape)
    return float(out) if out.ndim == 0 else out


def rk4_step(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def rk_integrate(f, y0, t0, t1, step, guard=1e150):
    """Classical fixed-step RK4 from ``t0`` to ``t1``.

    The step is shrunk slightly so that ``t1`` is hit exactly. Returns the
    times and the state trajectory (``len(t) x len(y0)``). Raises
    :class:`BlowUpError` once the state norm exceeds ``guard``.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    y = np.array(y0, dtype=float)
    span = float(t1) - float(t0)
    n = max(1, int(math.ceil(abs(span) / step - 1e-9)))
    h = span / n
    ts = t0 + h * np.arange(n + 1)
    ys = np.empty((n + 1,) + y.shape)
    ys[0] = y
    for i in range(n):
        y = rk4_step(f, ts[i], y, h)
        if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > guard:
            raise BlowUpError(f"RK4 state blew up after t = {ts[i]}", ts[i])
        ys[i + 1] = y
    ts[-1] = t1
    return ts, ys
