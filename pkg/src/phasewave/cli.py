"""``phasewave solve|verify|propagate|sweep`` command-line front end.

Exit codes: 0 success, 1 verification failure, 2 configuration or
precondition error, 3 propagation precondition (non-decaying field).
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
import math
import os
import sys
import tempfile

import numpy as np

from .assembly import StationarySolution, periodic_grid
from .config import ConfigError, load_config, serialize_config
from .errors import BoundaryError, PhasewaveError
from .polar import PolarConstants, PolarSolution, polar_reconstruct
from .reduction import (
    branch_first_integral_residual,
    branch_maxima_count,
    derive_coupling,
    roots_from_invariants,
    root_triple,
)
from .scaling import PotentialSpec, ScalingFamily, canonical_y, eval_scaling, family_E
from .fft import is_power_of_two

EXIT_OK, EXIT_VERIFY, EXIT_CONFIG, EXIT_PROPAGATE = 0, 1, 2, 3

CSV_HEADER = "x,a,y,g11,g12,g21,g22,R1,R2,theta1,theta2"

THRESHOLDS = {
    "stationary_ode_residual": 1e-7,
    "branch_first_integral_residual": 1e-9,
    "coupling_relation_residual": 1e-10,
    "compatibility_residual": 1e-12,
    "current_residual": 1e-7,
    "polar_system_residual": 1e-6,
    "polar_fd_residual": 1e-6,
    "polar_angular_residual": 1e-7,
    "polar_radial_residual": 1e-7,
}

PROPAGATION_THRESHOLDS = {"modulus_drift": 1e-4, "phase_rate_error": 1e-3}

SWEEP_PARAMS = ("W1", "W3", "alpha", "mu")


# -- building solutions from a config --------------------------------------


def _family(cfg, E_roots=None):
    v = cfg.values
    kind = v["family.kind"]
    if kind == "constant":
        return ScalingFamily.constant()
    if kind == "gaussian":
        return ScalingFamily.gaussian(v["family.mu"])
    C1 = v.get("family.C1", 0.0)
    C2 = v.get("family.C2", v.get("family.alpha", 0.0))
    C3 = v.get("family.C3", 1.0)
    omega = v.get("family.omega")
    if omega is None:
        # trig only (exp requires omega): E = omega**2 (C3**2 - C1**2 - C2**2) / 4
        if E_roots is None:
            raise cfg.error("family.omega is needed when roots.W2 is omitted", "family.omega")
        span = C3 * C3 - C1 * C1 - C2 * C2
        if span <= 0 or E_roots / span <= 0:
            raise cfg.error("no real omega makes the family's E match the roots", "family.omega")
        omega = 2.0 * math.sqrt(E_roots / span)
    return ScalingFamily(kind, C1=C1, C2=C2, C3=C3, omega=omega)


def _potential(cfg, family, E_roots):
    v = cfg.values
    kind = v.get("potential.kind", "quadratic" if family.kind == "gaussian" else "zero")
    if "potential.mu" in v:
        mu1 = mu2 = v["potential.mu"]
    elif "potential.mu1" in v or "potential.mu2" in v:
        mu1, mu2 = v.get("potential.mu1"), v.get("potential.mu2")
        if mu1 is None or mu2 is None:
            raise cfg.error("give both potential.mu1 and potential.mu2", "potential.mu1")
    elif family.kind == "gaussian":
        mu1 = mu2 = family.mu
    elif family.kind == "trig":
        mu1 = mu2 = -family.omega ** 2 / 4.0
    elif family.kind == "exp":
        mu1 = mu2 = family.omega ** 2 / 4.0
    else:
        if E_roots is None:
            raise cfg.error("potential.mu is needed for the constant family", "potential.mu")
        mu1 = mu2 = -E_roots
    quad = mu1 * mu1 if kind == "quadratic" else 0.0
    if kind == "quadratic" and mu1 != mu2:
        raise cfg.error("quadratic potential needs mu1 = mu2", "potential.mu2")
    return PotentialSpec(mu1, mu2, quad)


def build_stationary(cfg):
    v = cfg.values
    sigma = v["sigma"]
    if "invariants.E" in v:
        roots = roots_from_invariants(v["invariants.E"], v["invariants.C0"], v["invariants.c"], sigma)
    elif "roots.W2" in v:
        roots = root_triple((v["roots.W1"], v["roots.W2"], v["roots.W3"]), sigma)
    else:
        roots = None
    E_roots = None if roots is None else roots.E
    family = _family(cfg, E_roots)
    potential = _potential(cfg, family, E_roots)
    if roots is None:
        E = family_E(family, potential)
        W1, W3 = v["roots.W1"], v["roots.W3"]
        roots = root_triple((W1, E / sigma - W1 - W3, W3), sigma)
    h = ((v["h.11"], v["h.12"]), (v["h.21"], v["h.22"]))
    coupling = derive_coupling(h, roots.c, sigma, v.get("symmetric.c1"), v.get("symmetric.c2"))
    for j in (1, 2):
        eps = v.get(f"perturb.delta{j}")
        if eps:
            name = f"delta{j}"
            coupling = replace(coupling, **{name: getattr(coupling, name) * (1.0 + eps)})
    signs = (v.get("phase.sign1", 1.0), v.get("phase.sign2", 1.0))
    return StationarySolution.build(
        family, potential, roots, v["branch.kind"], coupling, y0=v.get("branch.y0", 0.0),
        phase_signs=signs,
    )


def build_polar(cfg):
    v = cfg.values
    K1 = v["polar.K1"]
    if "polar.W1" in v:
        W = (v["polar.W1"], v["polar.W2"], v["polar.W3"])
        E = 0.5 * sum(W)
        K2 = 0.5 * (W[0] * W[1] + W[1] * W[2] + W[0] * W[2])
        if abs(0.5 * W[0] * W[1] * W[2] - K1) > 1e-12 * max(1.0, K1):
            raise cfg.error("radial roots must satisfy W1 W2 W3 = 2 K1", "polar.W1")
    else:
        E, K2 = v["polar.E"], v["polar.K2"]
    pc = PolarConstants(E, K1, K2, v["polar.c1"], v["polar.c2"])
    return PolarSolution.build(pc, v.get("branch.kind", "dark_soliton"), v.get("branch.y0", 0.0))


def build(cfg):
    return build_polar(cfg) if cfg.is_polar else build_stationary(cfg)


def derived_constants(cfg, sol):
    if isinstance(sol, PolarSolution):
        pc, r = sol.constants, sol.roots
        return {
            "E": pc.E, "K1": pc.K1, "K2": pc.K2, "b": pc.b, "Delta": pc.delta,
            "W1": r.W1, "W2": r.W2, "W3": r.W3, "k": sol.branch.k, "lambda": sol.branch.lam,
        }
    d = sol.derived_constants()
    d.update(omega=sol.family.omega if sol.family.kind in ("trig", "exp") else None,
             mu1=sol.potential.mu1, mu2=sol.potential.mu2)
    return d


# -- output helpers ------------------------------------------------------------


def _write_atomic(path, text):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _g17(v):
    return "%.17g" % v


def _csv(header, columns):
    rows = [header]
    for row in zip(*columns):
        rows.append(",".join(_g17(float(c)) for c in row))
    return "\n".join(rows) + "\n"


def solution_table(cfg, sol):
    x = np.linspace(cfg.values["window.lo"], cfg.values["window.hi"], cfg.values["samples"])
    if isinstance(sol, PolarSolution):
        # a = 1 and h_ij = 1, so y = x and g_ij = 1
        U1, U2 = sol.components(x)
        one = np.ones_like(x)
        th = sol.phases(x)
        cols = [x, one, x, one, one, one, one, U1[0], U2[0], th[0], th[1]]
    else:
        a = eval_scaling(sol.family, x)[0]
        y = canonical_y(sol.family, x)
        g = sol.coefficients(x)
        R1, R2 = sol.amplitude(x)
        th1, th2 = sol.phase_theta(x)
        cols = [x, a, y, g[0, 0], g[0, 1], g[1, 0], g[1, 1], R1, R2, th1, th2]
    return cols


def _out_path(out, name, ext):
    return os.path.join(out, f"{name}.{ext}")


def _report_text(items):
    return "".join(f"{k}={_fmt_report(v)}\n" for k, v in items)


def _fmt_report(v):
    if isinstance(v, float):
        return _g17(v)
    return str(v)


def _fail(msg, code):
    print(f"phasewave: {msg}", file=sys.stderr)
    return code


# -- commands --------------------------------------------------------------


def cmd_solve(cfg, out):
    sol = build(cfg)
    name = cfg.get("name", "solution")
    cols = solution_table(cfg, sol)
    derived = derived_constants(cfg, sol)
    _write_atomic(_out_path(out, name, "csv"), _csv(CSV_HEADER, cols))
    _write_atomic(_out_path(out, name, "params"), serialize_config(cfg, derived))
    return EXIT_OK, sol, cols


def verify_items(cfg, sol):
    from .verification import current_residual, stationary_ode_residual

    x = np.linspace(cfg.values["window.lo"], cfg.values["window.hi"], cfg.values["samples"])
    items = []
    if isinstance(sol, PolarSolution):
        rep = polar_reconstruct(sol, x)
        items += [
            ("kind", "polar"),
            ("polar_system_residual", rep.analytic_residual),
            ("polar_fd_residual", rep.fd_residual),
            ("polar_angular_residual", rep.angular_residual),
            ("polar_radial_residual", rep.radial_residual),
            ("branch_first_integral_residual",
             branch_first_integral_residual(sol.branch, sol.roots, x)),
        ]
    else:
        cp = sol.coupling
        interior = x[1:-1] if x.size > 2 else x
        step = max(1, interior.size // 200)
        items += [
            ("kind", "stationary"),
            ("stationary_ode_residual", stationary_ode_residual(sol, x).max_abs),
            ("branch_first_integral_residual",
             branch_first_integral_residual(sol.branch, sol.roots, sol.y(x))),
            ("coupling_relation_residual", float(max(abs(r) for r in cp.relation_residuals))),
            ("compatibility_residual", abs(cp.compatibility_residual)),
            ("current_residual", current_residual(sol, interior[::step]).max_abs),
        ]
    checks = [(k, v) for k, v in items if k in THRESHOLDS]
    failed = [(k, v / THRESHOLDS[k]) for k, v in checks if not v < THRESHOLDS[k]]
    worst = max(failed, key=lambda kv: kv[1])[0] if failed else "none"
    out = list(items)
    out += [(f"{k}.threshold", THRESHOLDS[k]) for k, _ in checks]
    out += [("worst", worst), ("status", "fail" if failed else "pass")]
    return out, bool(failed), worst


def cmd_verify(cfg, out):
    sol = build(cfg)
    items, failed, worst = verify_items(cfg, sol)
    name = cfg.get("name", "solution")
    _write_atomic(_out_path(out, name, "report"), _report_text(items))
    if failed:
        return _fail(f"verification failed: {worst}", EXIT_VERIFY)
    return EXIT_OK


def _propagation_items(rep, t_final):
    items = [
        ("modulus_drift", rep.modulus_drift),
        ("norm_drift1", rep.norm_drift[0]),
        ("norm_drift2", rep.norm_drift[1]),
    ]
    if rep.phase_rate:
        items += [("phase_rate1", rep.phase_rate[0]), ("phase_rate2", rep.phase_rate[1])]
    items += [
        ("phase_rate_error", rep.phase_rate_error),
        ("steps", rep.steps),
        ("dt", rep.dt),
        ("t_final", float(t_final)),
    ]
    return items


def _propagation_status(items):
    vals = dict(items)
    failed = [k for k, thr in PROPAGATION_THRESHOLDS.items()
              if k in vals and not (isinstance(vals[k], float) and vals[k] < thr)]
    return failed


def cmd_propagate(cfg, out, t_final, dt, snapshots=(), plane_wave=False):
    from .verification import EDGE_AMPLITUDE, plane_wave_grid, split_step_propagate

    steps = int(round(t_final / dt))
    if steps < 1:
        return _fail("t_final / dt must be at least one step", EXIT_CONFIG)
    snap_steps = sorted({int(round(t / dt)) for t in snapshots})
    if plane_wave:
        grid = plane_wave_grid()
        ref = np.abs(grid.psi)
        k = grid.meta["k"]
        _, rep = split_step_propagate(grid, np.zeros((2, 2)), dt, steps, reference=ref,
                                      mus=(-k * k, -k * k), check_edges=False)
        items = _propagation_items(rep, t_final)
        failed = [k_ for k_ in ("modulus_drift",) if not rep.modulus_drift < 1e-10]
        items += [("mode", "plane_wave"), ("status", "fail" if failed else "pass")]
        _write_atomic(os.path.join(out, "plane_wave.report"), _report_text(items))
        return EXIT_VERIFY if failed else EXIT_OK

    sol = build(cfg)
    if isinstance(sol, PolarSolution):
        return _fail("propagation is implemented for stationary configs only", EXIT_CONFIG)
    window = (cfg.values["window.lo"], cfg.values["window.hi"])
    edge = np.array(sol.amplitude(np.array(window)))
    if np.max(edge) >= EDGE_AMPLITUDE:
        return _fail(
            f"field does not decay at the window edges (max |psi| = {np.max(edge):.3g} >= "
            f"{EDGE_AMPLITUDE:g}); non-decaying solutions are checked statically, "
            "run 'phasewave verify' for this configuration",
            EXIT_PROPAGATE,
        )
    n = cfg.values["samples"]
    if not is_power_of_two(n) or n < 64:
        raise cfg.error("propagation needs a power-of-two sample count >= 64", "samples")
    x = periodic_grid(window, n)
    from .assembly import FieldGrid

    grid = FieldGrid(x, np.array(sol.field_at(0.0, x)), 0.0, {})
    R = np.array(sol.amplitude(x))
    try:
        final, rep = split_step_propagate(grid, sol.coefficients, dt, steps, V=sol.potential.V,
                                          reference=R, mus=sol.mus, snapshot_steps=snap_steps)
    except BoundaryError as exc:
        return _fail(f"{exc}; run 'phasewave verify' for this configuration", EXIT_PROPAGATE)
    name = cfg.get("name", "solution")
    snaps = final.meta.get("snapshots", {})
    if snaps:
        a = eval_scaling(sol.family, x)[0]
        y = canonical_y(sol.family, x)
        g = sol.coefficients(x)
        for s in sorted(snaps):
            t = s * dt
            psi = snaps[s]
            th = [np.unwrap(np.angle(psi[j])) - sol.mus[j] * t for j in range(2)]
            cols = [np.full_like(x, t), x, a, y, g[0, 0], g[0, 1], g[1, 0], g[1, 1],
                    np.abs(psi[0]), np.abs(psi[1]), th[0], th[1]]
            _write_atomic(os.path.join(out, f"{name}_t{_g17(t)}.csv"), _csv("t," + CSV_HEADER, cols))
    items = _propagation_items(rep, t_final)
    failed = _propagation_status(items)
    items += [("worst", failed[0] if failed else "none"), ("status", "fail" if failed else "pass")]
    _write_atomic(_out_path(out, name, "propagation"), _report_text(items))
    if failed:
        return _fail(f"propagation check failed: {', '.join(failed)}", EXIT_VERIFY)
    return EXIT_OK


def _parse_sweep(param, values):
    names = param.split(":")
    for nm in names:
        if nm not in SWEEP_PARAMS:
            raise ConfigError(f"sweep parameter must be one of {SWEEP_PARAMS} (or a ':' joined pair)")
    points = []
    for item in values.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != len(names):
            raise ConfigError(f"sweep value {item!r} does not match parameter {param!r}")
        try:
            points.append(tuple(float(p) for p in parts))
        except ValueError:
            raise ConfigError(f"cannot parse sweep value {item!r}") from None
    if not points:
        raise ConfigError("empty sweep value list")
    return names, points


_SWEEP_KEYS = {"W1": ("roots.W1",), "W3": ("roots.W3",), "alpha": ("family.alpha",),
               "mu": ("family.mu", "potential.mu")}


def cmd_sweep(cfg, out, param, values):
    names, points = _parse_sweep(param, values)
    base = cfg.get("name", "solution")

    def one(i, point):
        upd = {}
        for nm, val in zip(names, point):
            for key in _SWEEP_KEYS[nm]:
                if key == "potential.mu" and "potential.mu" not in cfg.values:
                    continue
                upd[key] = val
        sub = cfg.updated(upd).updated({"name": f"{base}_{i:03d}"})
        label = ":".join(_g17(p) for p in point)
        try:
            from .config import validate

            validate(sub)
            _, sol, cols = cmd_solve(sub, out)
            y = cols[2]
            peaks = branch_maxima_count(sol.branch, sol.roots, float(y[0]), float(y[-1]))
            return (i, label, "ok", sol.branch.k, sol.branch.lam, peaks, "")
        except (PhasewaveError, ValueError) as exc:
            return (i, label, "error", math.nan, math.nan, -1, str(exc).replace(",", ";"))

    workers = int(os.environ.get("PHASEWAVE_THREADS", "1") or 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(lambda ip: one(*ip), enumerate(points)))
    else:
        rows = [one(i, p) for i, p in enumerate(points)]
    lines = [f"index,{param},status,k,lambda,peaks,message"]
    for i, label, status, k, lam, peaks, msg in rows:
        lines.append(f"{i},{label},{status},{_g17(k)},{_g17(lam)},{peaks},{msg}")
    _write_atomic(os.path.join(out, f"{base}_sweep_summary.csv"), "\n".join(lines) + "\n")
    errors = [r for r in rows if r[2] != "ok"]
    for r in errors:
        print(f"phasewave: sweep value {r[1]} failed: {r[6]}", file=sys.stderr)
    return EXIT_CONFIG if errors else EXIT_OK


# -- entry point -------------------------------------------------------------


def _floats(text):
    return [float(t) for t in text.split(",") if t.strip()]


def make_parser():
    p = argparse.ArgumentParser(prog="phasewave", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("solve", "verify", "propagate", "sweep"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=(name != "propagate"))
        sp.add_argument("--out", default=".")
        if name == "propagate":
            sp.add_argument("--t-final", type=float, default=1.0)
            sp.add_argument("--dt", type=float, default=1e-4)
            sp.add_argument("--snapshots", type=_floats, default=[])
            sp.add_argument("--plane-wave", action="store_true",
                            help="built-in free plane-wave self test")
        if name == "sweep":
            sp.add_argument("--param", required=True)
            sp.add_argument("--values", required=True)
    return p


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        if args.command == "propagate" and args.plane_wave:
            if args.t_final == 1.0 and "--t-final" not in (argv or sys.argv):
                args.t_final = 1000 * args.dt
            return cmd_propagate(None, args.out, args.t_final, args.dt, plane_wave=True)
        if args.config is None:
            return _fail("--config is required", EXIT_CONFIG)
        cfg = load_config(args.config)
        if args.command == "solve":
            return cmd_solve(cfg, args.out)[0]
        if args.command == "verify":
            return cmd_verify(cfg, args.out)
        if args.command == "propagate":
            return cmd_propagate(cfg, args.out, args.t_final, args.dt, args.snapshots)
        return cmd_sweep(cfg, args.out, args.param, args.values)
    except ConfigError as exc:
        return _fail(f"{args.config}: {exc}", EXIT_CONFIG)
    except OSError as exc:
        return _fail(str(exc), EXIT_CONFIG)
    except (PhasewaveError, ValueError) as exc:
        return _fail(f"precondition failed: {exc}", EXIT_CONFIG)


if __name__ == "__main__":
    sys.exit(main())
