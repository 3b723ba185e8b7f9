"""Strict parser for scenario files.

Scenario files are line-oriented ``key = value`` text with ``[section]``
headers. Repeated objects use dotted section names (``[source.a]``,
``[sphere.outer]``, ``[mode.1]``). Every key has a default listed in
:data:`SCHEMA`; unknown sections or keys are errors.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .amplitudes import DEFAULT_COUPLING

KINDS = ("spinor", "amplitude", "field-grid", "gauss-flux", "ab-pattern", "boost-modes")


class ConfigError(ValueError):
    """Malformed scenario file; the message names the offending key."""


def _floats(n):
    def parse(text):
        parts = [p for p in text.replace(",", " ").split()]
        if len(parts) != n:
            raise ValueError(f"expected {n} numbers")
        return tuple(float(p) for p in parts)
    return parse


def _ints(n):
    def parse(text):
        vals = _floats(n)(text)
        if any(v != int(v) for v in vals):
            raise ValueError("expected integers")
        return tuple(int(v) for v in vals)
    return parse


def _bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError("expected a boolean")


def _choice(*options):
    def parse(text):
        t = text.strip()
        if t not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return t
    return parse


vec3 = _floats(3)

# section -> key -> (parser, default)
SCHEMA = {
    "scenario": {
        "kind": (_choice(*KINDS), None),
        "output": (str, None),
    },
    "physics": {
        "coupling": (float, DEFAULT_COUPLING),
        "mass": (float, 1.0),
    },
    "spinor": {
        "momentum": (vec3, (0.0, 0.0, 0.0)),
    },
    "amplitude": {
        "p": (vec3, (0.0, 0.0, 0.01)),
        "p_out": (vec3, (0.01, 0.0, 0.0)),
        "k": (vec3, (0.0, 0.0, -0.01)),
        "k_out": (vec3, (-0.01, 0.0, 0.0)),
        "conservation_tol": (float, 1e-10),
        "coulomb_rtol": (float, 1e-3),
    },
    "source": {
        "center": (vec3, (0.0, 0.0, 0.0)),
        "momentum": (vec3, (0.0, 0.0, 0.0)),
    },
    "grid": {
        "origin": (vec3, (-1.5, -1.5, -1.5)),
        "spacing": (float, 0.1),
        "dims": (_ints(3), (31, 31, 31)),
        "width": (float, 0.0),
        "exclusion": (float, 0.0),
        "convergence_radius": (float, 1.0),
        "min_convergence_ratio": (float, 3.0),
    },
    "sphere": {
        "center": (vec3, (0.0, 0.0, 0.0)),
        "radius": (float, 1.0),
    },
    "quadrature": {
        "n_theta": (int, 200),
        "n_phi": (int, 400),
        "flux_rtol": (float, 1e-3),
        "steps_per_segment": (int, 0),
    },
    "solenoid": {
        "variant": (_choice("ideal_infinite", "source_array"), "ideal_infinite"),
        "flux": (float, 0.0),
        "radius": (float, 0.1),
        "center": (vec3, (2.0, 0.0, 0.0)),
        "n_rings": (int, 16),
        "per_ring": (int, 32),
        "pitch": (float, 0.25),
        "speed": (float, 0.5),
    },
    "geometry": {
        "slit1": (vec3, (0.0, 0.5, 0.0)),
        "slit2": (vec3, (0.0, -0.5, 0.0)),
        "source": (vec3, (-10.0, 0.0, 0.0)),
        "screen_x": (float, 1000.0),
        "y_min": (float, -80.0),
        "y_max": (float, 80.0),
        "n_samples": (int, 4001),
        "wavevector": (vec3, (100.0, 0.0, 0.0)),
        "write_phases": (_bool, False),
        "shift_tol": (float, 5e-3),
    },
    "boost": {
        "velocity": (float, 0.6),
        "axis": (_choice("x", "y", "z"), "z"),
        "n_events": (int, 100),
        "seed": (int, 0),
        "invariance_tol": (float, 1e-10),
    },
    "mode": {
        "omega": (float, 0.0),
        "k": (vec3, (0.0, 0.0, 1.0)),
        "amplitude": (_floats(2), (0.0, -0.5)),
    },
}

REPEATED = ("source", "sphere", "mode")

# sections each scenario kind accepts besides [scenario] and [physics]
KIND_SECTIONS = {
    "spinor": ("spinor",),
    "amplitude": ("amplitude",),
    "field-grid": ("source", "grid"),
    "gauss-flux": ("source", "sphere", "quadrature"),
    "ab-pattern": ("solenoid", "geometry", "quadrature"),
    "boost-modes": ("boost", "mode"),
}


@dataclass
class ScenarioConfig:
    kind: str
    sections: dict = field(default_factory=dict)  # name -> {key: value}
    output: str | None = None
    path: Path | None = None

    def section(self, name: str) -> dict:
        """Values for ``name`` with defaults filled in."""
        base = name.split(".", 1)[0]
        out = {k: d for k, (_, d) in SCHEMA[base].items()}
        out.update(self.sections.get(name, {}))
        return out

    def repeated(self, base: str) -> list:
        """(name, values) for every ``[base.*]`` section, in file order."""
        return [(n, self.section(n)) for n in self.sections if n.split(".", 1)[0] == base
                and "." in n]

    @property
    def coupling(self) -> float:
        return self.section("physics")["coupling"]

    @property
    def mass(self) -> float:
        return self.section("physics")["mass"]


def parse_text(text: str, kind: str | None = None, path=None) -> ScenarioConfig:
    cp = configparser.ConfigParser(strict=True, interpolation=None, delimiters=("=",),
                                   comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unparseable scenario file: {exc}") from None
    sections = {}
    for name in cp.sections():
        base = name.split(".", 1)[0]
        if base not in SCHEMA:
            raise ConfigError(f"unknown section [{name}]")
        if ("." in name) != (base in REPEATED):
            raise ConfigError(f"section [{name}] must be written as [{base}.<name>]"
                              if base in REPEATED else f"section [{name}] takes no suffix")
        values = {}
        for key, raw in cp.items(name):
            if key not in SCHEMA[base]:
                raise ConfigError(f"unknown key '{name}.{key}'")
            parser = SCHEMA[base][key][0]
            try:
                values[key] = parser(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for '{name}.{key}': {raw!r} ({exc})") from None
        sections[name] = values
    file_kind = sections.get("scenario", {}).get("kind")
    if kind is None:
        kind = file_kind
    if kind is None:
        raise ConfigError("scenario kind missing: give it on the command line or as 'scenario.kind'")
    if kind not in KINDS:
        raise ConfigError(f"unknown scenario kind '{kind}'")
    if file_kind is not None and file_kind != kind:
        raise ConfigError(f"'scenario.kind' is {file_kind!r} but {kind!r} was requested")
    allowed = ("scenario", "physics") + KIND_SECTIONS[kind]
    for name in sections:
        if name.split(".", 1)[0] not in allowed:
            raise ConfigError(f"section [{name}] is not used by scenario kind '{kind}'")
    output = sections.get("scenario", {}).get("output")
    return ScenarioConfig(kind, sections, output, Path(path) if path else None)


def load(path, kind: str | None = None) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc.strerror}") from None
    return parse_text(text, kind, path)
