from pathlib import Path

import pytest

from phasewave.config import ConfigError, load_config, parse_config, serialize_config

CONFIGS = Path(__file__).resolve().parents[1] / "demos" / "configs"

DARK = """
# comment line
family.kind = trig
family.alpha = 0.05
h.11 = 2
h.12 = 1
h.21 = 0.5
h.22 = 2
roots.W1 = 0.1
roots.W2 = 0.5
roots.W3 = 0.5   # trailing comment
sigma = 1
branch.kind = dark_soliton
window.lo = -9
window.hi = 9
samples = 2001
"""


def test_parse_types_and_lines():
    cfg = parse_config(DARK)
    assert cfg.get("family.alpha") == 0.05 and cfg.get("samples") == 2001
    assert cfg.get("branch.kind") == "dark_soliton"
    assert cfg.line_of("family.kind") == 3
    assert not cfg.is_polar


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.cfg")), ids=lambda p: p.stem)
def test_serialization_round_trip(path):
    cfg = load_config(path)
    text = serialize_config(cfg, {"k": 1.0, "note": "x", "skip": None})
    again = parse_config(text)
    assert again == cfg
    assert serialize_config(again) == serialize_config(cfg)


@pytest.mark.parametrize(
    "edit,key,line",
    [
        ("bogus.key = 1", "bogus.key", 17),
        ("sigma = 2", "sigma", 17),
        ("samples = 1.5", "samples", 17),
        ("family.alpha = nan", "family.alpha", 17),
    ],
)
def test_line_level_diagnostics(edit, key, line):
    with pytest.raises(ConfigError) as info:
        parse_config(DARK + edit + "\n")
    assert info.value.key == key and info.value.line == line
    assert f"line {line}" in str(info.value)


@pytest.mark.parametrize(
    "drop_or_add,key",
    [
        ("-branch.kind", "branch.kind"),
        ("-h.21", "h.21"),
        ("+invariants.E = 1.1", "invariants.E"),
        ("-roots.W1", "roots.W1"),
        ("+family.alpha = 1.5", "family.alpha"),
    ],
)
def test_structural_errors(drop_or_add, key):
    lines = DARK.strip().splitlines()
    if drop_or_add.startswith("-"):
        lines = [l for l in lines if not l.startswith(drop_or_add[1:] + " ")]
    else:
        new = drop_or_add[1:]
        lines = [l for l in lines if not l.startswith(new.split(" = ")[0] + " ")] + [new]
    with pytest.raises(ConfigError) as info:
        parse_config("\n".join(lines))
    assert info.value.key == key


def test_bad_syntax_and_window():
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("family.kind trig\n")
    with pytest.raises(ConfigError):
        parse_config(DARK.replace("window.hi = 9", "window.hi = -10"))
    with pytest.raises(ConfigError):
        parse_config(DARK + "sigma = 1\n")  # duplicate
    with pytest.raises(ConfigError):
        parse_config(DARK.replace("branch.kind = dark_soliton", "branch.kind = cnoidal"))


def test_gaussian_and_polar_checks():
    gauss = DARK.replace("family.kind = trig", "family.kind = gaussian").replace("family.alpha = 0.05", "family.mu = 0.1")
    with pytest.raises(ConfigError, match="mu < 0"):
        parse_config(gauss)
    polar = "polar.K1 = 1\npolar.c1 = 0.25\npolar.W1 = 0.5\npolar.W2 = 2\npolar.W3 = 2\nwindow.lo = -1\nwindow.hi = 1\nsamples = 3\n"
    with pytest.raises(ConfigError) as info:
        parse_config(polar)
    assert info.value.key == "polar.c2"
    cfg = parse_config(polar + "polar.c2 = 0.25\n")
    assert cfg.is_polar
    with pytest.raises(ConfigError):
        parse_config(polar + "polar.c2 = 0.25\npolar.E = 1\n")


def test_derived_keys_are_ignored_on_input():
    cfg = parse_config(DARK + "derived.k = 1\n")
    assert "derived.k" not in cfg
