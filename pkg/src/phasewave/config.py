"""Flat ``key = value`` job configuration.

Example::

    # periodic dark-dark profile
    family.kind = trig
    family.alpha = 0.05
    potential.kind = zero
    h.11 = 2
    h.12 = 1
    h.21 = 0.5
    h.22 = 2
    roots.W1 = 0.1
    roots.W2 = 0.5
    roots.W3 = 0.5
    sigma = 1
    branch.kind = dark_soliton
    window.lo = -9
    window.hi = 9
    samples = 2001

Roots are given either as ``roots.W1..W3`` (``W2`` may be omitted, in which
case it follows from the family's first integral) or as ``invariants.E``,
``invariants.C0``, ``invariants.c``. A ``polar.*`` block (K1, c1, c2 plus
either radial roots ``polar.W1..W3`` or ``polar.E``, ``polar.K2``) selects the
h_ij = 1 polar construction instead.
"""

from dataclasses import dataclass, field, replace
import math

from .errors import PhasewaveError
from .reduction import BRANCH_KINDS

FAMILY_KINDS = ("trig", "exp", "gaussian", "constant")
POTENTIAL_KINDS = ("zero", "quadratic")

_FLOAT_KEYS = {
    "family.alpha", "family.omega", "family.C1", "family.C2", "family.C3", "family.mu",
    "potential.mu", "potential.mu1", "potential.mu2",
    "h.11", "h.12", "h.21", "h.22",
    "roots.W1", "roots.W2", "roots.W3",
    "invariants.E", "invariants.C0", "invariants.c",
    "sigma", "branch.y0", "window.lo", "window.hi",
    "phase.sign1", "phase.sign2", "perturb.delta1", "perturb.delta2",
    "polar.K1", "polar.c1", "polar.c2", "polar.W1", "polar.W2", "polar.W3",
    "polar.E", "polar.K2", "symmetric.c1", "symmetric.c2",
}
_INT_KEYS = {"samples"}
_STR_KEYS = {"family.kind", "potential.kind", "branch.kind", "name"}
KNOWN_KEYS = _FLOAT_KEYS | _INT_KEYS | _STR_KEYS

# canonical order for serialization
_ORDER = [
    "name", "family.kind", "family.alpha", "family.omega", "family.C1", "family.C2", "family.C3",
    "family.mu", "potential.kind", "potential.mu", "potential.mu1", "potential.mu2",
    "h.11", "h.12", "h.21", "h.22", "symmetric.c1", "symmetric.c2",
    "roots.W1", "roots.W2", "roots.W3", "invariants.E", "invariants.C0", "invariants.c",
    "sigma", "branch.kind", "branch.y0", "phase.sign1", "phase.sign2",
    "perturb.delta1", "perturb.delta2",
    "polar.K1", "polar.c1", "polar.c2", "polar.W1", "polar.W2", "polar.W3", "polar.E", "polar.K2",
    "window.lo", "window.hi", "samples",
]


class ConfigError(PhasewaveError, ValueError):
    """Malformed or inconsistent configuration; ``line`` and ``key`` locate it."""

    def __init__(self, message, key=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)
        self.key = key
        self.line = line


@dataclass(frozen=True)
class JobConfig:
    values: dict
    lines: dict = field(default_factory=dict, compare=False)

    def get(self, key, default=None):
        return self.values.get(key, default)

    def __contains__(self, key):
        return key in self.values

    def line_of(self, key):
        return self.lines.get(key)

    def error(self, message, key=None):
        return ConfigError(message, key, self.line_of(key) if key else None)

    def updated(self, mapping):
        vals = dict(self.values)
        vals.update(mapping)
        return replace(self, values=vals)

    @property
    def is_polar(self):
        return any(k.startswith("polar.") for k in self.values)


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def parse_config(text, source="<config>"):
    """Parse key-value text; unknown keys and bad numbers raise :class:`ConfigError`."""
    values, lines = {}, {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line=n)
        key, val = (s.strip() for s in line.split("=", 1))
        if key.startswith("derived."):
            continue  # echoed derived constants
        if key not in KNOWN_KEYS:
            raise ConfigError("unknown key", key, n)
        if key in values:
            raise ConfigError(f"duplicate key (first set on line {lines[key]})", key, n)
        try:
            if key in _FLOAT_KEYS:
                parsed = float(val)
                if not math.isfinite(parsed):
                    raise ValueError
            elif key in _INT_KEYS:
                parsed = int(val)
            else:
                parsed = val
        except ValueError:
            raise ConfigError(f"cannot parse value {val!r}", key, n) from None
        values[key] = parsed
        lines[key] = n
    cfg = JobConfig(values, lines)
    validate(cfg)
    return cfg


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), str(path))


def serialize_config(cfg, derived=None):
    """Canonical text form; ``derived`` constants are echoed under ``derived.*``."""
    out = []
    for key in _ORDER:
        if key in cfg.values:
            out.append(f"{key} = {_fmt(cfg.values[key])}")
    if derived:
        for key in sorted(derived):
            v = derived[key]
            if v is None:
                continue
            out.append(f"derived.{key} = {_fmt(float(v)) if isinstance(v, (int, float)) else v}")
    return "\n".join(out) + "\n"


def validate(cfg):
    """Structural checks with field-level diagnostics."""
    v = cfg.values
    if cfg.is_polar:
        for key in ("polar.K1", "polar.c1", "polar.c2"):
            if key not in v:
                raise cfg.error("polar block needs K1, c1 and c2", key)
        has_roots = any(f"polar.W{i}" in v for i in (1, 2, 3))
        has_inv = "polar.E" in v or "polar.K2" in v
        if has_roots == has_inv:
            raise cfg.error("give exactly one of polar.W1..W3 or polar.E/polar.K2", "polar.K1")
        if has_roots:
            for key in ("polar.W1", "polar.W2", "polar.W3"):
                if key not in v:
                    raise cfg.error("missing radial root", key)
        else:
            for key in ("polar.E", "polar.K2"):
                if key not in v:
                    raise cfg.error("missing radial invariant", key)
        if not v["polar.K1"] > 0:
            raise cfg.error("K1 must be positive", "polar.K1")
        _validate_window(cfg)
        return

    kind = v.get("family.kind")
    if kind is None:
        raise cfg.error("missing family.kind", "family.kind")
    if kind not in FAMILY_KINDS:
        raise cfg.error(f"family.kind must be one of {FAMILY_KINDS}", "family.kind")
    if kind == "gaussian":
        if "family.mu" not in v:
            raise cfg.error("gaussian family needs family.mu", "family.mu")
        if not v["family.mu"] < 0:
            raise cfg.error("gaussian family needs mu < 0", "family.mu")
    if kind == "trig" and "family.alpha" in v and not abs(v["family.alpha"]) < 1:
        raise cfg.error("|alpha| < 1 is required for a(x) > 0", "family.alpha")
    if kind == "exp" and "family.omega" not in v:
        raise cfg.error("exp family needs family.omega", "family.omega")
    pk = v.get("potential.kind", "quadratic" if kind == "gaussian" else "zero")
    if pk not in POTENTIAL_KINDS:
        raise cfg.error(f"potential.kind must be one of {POTENTIAL_KINDS}", "potential.kind")
    for key in ("h.11", "h.12", "h.21", "h.22"):
        if key not in v:
            raise cfg.error("missing coupling entry", key)
    if "sigma" not in v:
        raise cfg.error("missing sigma", "sigma")
    if v["sigma"] == 0:
        raise cfg.error("sigma must be nonzero", "sigma")
    has_roots = any(k.startswith("roots.") for k in v)
    has_inv = any(k.startswith("invariants.") for k in v)
    if has_roots and has_inv:
        key = next(k for k in v if k.startswith("invariants."))
        raise cfg.error("give roots or invariants, not both", key)
    if not (has_roots or has_inv):
        raise cfg.error("missing roots.W1..W3 or invariants.E/C0/c", "roots.W1")
    if has_roots:
        for key in ("roots.W1", "roots.W3"):
            if key not in v:
                raise cfg.error("missing root", key)
    else:
        for key in ("invariants.E", "invariants.C0", "invariants.c"):
            if key not in v:
                raise cfg.error("missing invariant", key)
    bk = v.get("branch.kind")
    if bk is None:
        raise cfg.error("missing branch.kind", "branch.kind")
    if bk not in BRANCH_KINDS:
        raise cfg.error(f"branch.kind must be one of {BRANCH_KINDS}", "branch.kind")
    for key in ("phase.sign1", "phase.sign2"):
        if key in v and v[key] not in (1.0, -1.0):
            raise cfg.error("phase sign must be +1 or -1", key)
    _validate_window(cfg)


def _validate_window(cfg):
    v = cfg.values
    for key in ("window.lo", "window.hi", "samples"):
        if key not in v:
            raise cfg.error("missing sampling key", key)
    if not v["window.hi"] > v["window.lo"]:
        raise cfg.error("window.hi must exceed window.lo", "window.hi")
    if v["samples"] < 2:
        raise cfg.error("samples must be at least 2", "samples")
