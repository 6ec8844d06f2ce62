"""Run configuration: JSON file plus command-line overrides.

Frequencies are given in Hz (ordinary frequency) under ``*_hz`` keys and
converted to rad/s; temperatures are in K, fields in T, lengths in m.
An empty configuration reproduces the parameter set of the detuning maps,
with the drive described physically (field amplitude and sphere size).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

from .constants import TWO_PI
from .errors import DomainError
from .gaussian import TRIPARTITE_THRESHOLD
from .model import (
    KERR_THRESHOLD,
    LOW_EXCITATION_THRESHOLD,
    STABILITY_MARGIN,
    DirectCoupling,
    PhysicalDrive,
    SystemParams,
)
from .sweep import AXIS_NAMES, MEASURES, Axis, InnerOptimization, SweepSpec

COMMANDS = ("derive", "stability", "entangle", "sweep", "reproduce", "validate")

PARAM_DEFAULTS: Dict[str, Any] = {
    "omega_a_hz": 10e9,
    "omega_b_hz": 10e6,
    "delta_a_hz": -10e6,
    "delta_m_eff_hz": 9e6,
    "kappa_a_hz": 1e6,
    "kappa_m_hz": 1e6,
    "gamma_b_hz": 100.0,
    "g_ma_hz": 3.2e6,
    "temperature": 0.01,
    "coupling_mode": "physical",
    "g_mb_eff_hz": 3.2e6,
    "b0": 3.9e-5,
    "g_mb_hz": 0.2,
    "sphere_diameter": 250e-6,
    "spin_density": 4.22e27,
    "gyromagnetic_ratio_hz_per_t": 28e9,
    "spin_s": 2.5,
    "kerr_1mm_hz": 1e-10,
}

THRESHOLD_DEFAULTS = {
    "low_excitation": LOW_EXCITATION_THRESHOLD,
    "kerr": KERR_THRESHOLD,
    "tripartite": TRIPARTITE_THRESHOLD,
    "stability_margin": STABILITY_MARGIN,
}

OTHER_KEYS = ("sweep", "figure", "out", "workers", "thresholds")

_POSITIVE = {
    "omega_a_hz", "omega_b_hz", "kappa_a_hz", "kappa_m_hz", "gamma_b_hz", "g_ma_hz",
    "sphere_diameter", "spin_density", "gyromagnetic_ratio_hz_per_t", "spin_s",
}
_NON_NEGATIVE = {"temperature", "g_mb_eff_hz", "b0", "g_mb_hz", "kerr_1mm_hz"}

# sweep axis unit conversion: config value * factor -> internal value
AXIS_FACTORS = {
    "delta_a": TWO_PI,
    "delta_m_eff": TWO_PI,
    "kappa_a": TWO_PI,
    "temperature": 1.0,
    "g_ratio": 1.0,
}
AXIS_UNITS = {
    "delta_a": "Hz",
    "delta_m_eff": "Hz",
    "kappa_a": "Hz",
    "temperature": "K",
    "g_ratio": "1",
}


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class RunConfig:
    command: str
    values: Dict[str, Any] = field(default_factory=lambda: dict(PARAM_DEFAULTS))
    sweep: Optional[Dict[str, Any]] = None
    figure: Optional[str] = None
    out: Optional[str] = None
    workers: int = 1
    thresholds: Dict[str, float] = field(default_factory=lambda: dict(THRESHOLD_DEFAULTS))

    def params(self) -> SystemParams:
        return build_params(self.values)

    def sweep_spec(self) -> SweepSpec:
        if not self.sweep:
            raise ConfigError("sweep", "the sweep command needs a 'sweep' section")
        return build_sweep(self.sweep, self.params())


def _number(path, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(path, "must be finite")
    return float(value)


def _check_values(values):
    for key, value in values.items():
        if key == "coupling_mode":
            if value not in ("direct", "physical"):
                raise ConfigError(key, "must be 'direct' or 'physical'")
            continue
        x = _number(key, value)
        if key in _POSITIVE and x <= 0:
            raise ConfigError(key, "must be > 0")
        if key in _NON_NEGATIVE and x < 0:
            raise ConfigError(key, "must be >= 0")


def build_params(values: Dict[str, Any]) -> SystemParams:
    """Convert config-unit values to :class:`SystemParams` (rad/s)."""
    _check_values(values)
    v = values
    if v["coupling_mode"] == "direct":
        coupling = DirectCoupling(TWO_PI * v["g_mb_eff_hz"])
    else:
        coupling = PhysicalDrive(
            b0=v["b0"],
            g_mb=TWO_PI * v["g_mb_hz"],
            sphere_diameter=v["sphere_diameter"],
            spin_density=v["spin_density"],
            gyromagnetic_ratio=TWO_PI * v["gyromagnetic_ratio_hz_per_t"],
            spin_s=v["spin_s"],
            kerr_1mm=TWO_PI * v["kerr_1mm_hz"],
        )
    try:
        return SystemParams(
            omega_a=TWO_PI * v["omega_a_hz"],
            omega_b=TWO_PI * v["omega_b_hz"],
            delta_a=TWO_PI * v["delta_a_hz"],
            delta_m_eff=TWO_PI * v["delta_m_eff_hz"],
            kappa_a=TWO_PI * v["kappa_a_hz"],
            kappa_m=TWO_PI * v["kappa_m_hz"],
            gamma_b=TWO_PI * v["gamma_b_hz"],
            g_ma=TWO_PI * v["g_ma_hz"],
            temperature=v["temperature"],
            coupling=coupling,
        )
    except DomainError as exc:
        raise ConfigError("params", str(exc)) from exc


def params_to_values(p: SystemParams) -> Dict[str, Any]:
    """Inverse of :func:`build_params`, for metadata."""
    out = {
        "omega_a_hz": p.omega_a / TWO_PI,
        "omega_b_hz": p.omega_b / TWO_PI,
        "delta_a_hz": p.delta_a / TWO_PI,
        "delta_m_eff_hz": p.delta_m_eff / TWO_PI,
        "kappa_a_hz": p.kappa_a / TWO_PI,
        "kappa_m_hz": p.kappa_m / TWO_PI,
        "gamma_b_hz": p.gamma_b / TWO_PI,
        "g_ma_hz": p.g_ma / TWO_PI,
        "temperature": p.temperature,
    }
    c = p.coupling
    if isinstance(c, DirectCoupling):
        out.update(coupling_mode="direct", g_mb_eff_hz=c.g_mb_eff / TWO_PI)
    else:
        out.update(
            coupling_mode="physical",
            b0=c.b0,
            g_mb_hz=c.g_mb / TWO_PI,
            sphere_diameter=c.sphere_diameter,
            spin_density=c.spin_density,
            gyromagnetic_ratio_hz_per_t=c.gyromagnetic_ratio / TWO_PI,
            spin_s=c.spin_s,
            kerr_1mm_hz=c.kerr_1mm / TWO_PI,
        )
    return out


def build_sweep(section: Dict[str, Any], base: SystemParams) -> SweepSpec:
    if not isinstance(section, dict):
        raise ConfigError("sweep", "must be an object")
    unknown = set(section) - {"axes", "outputs", "inner"}
    if unknown:
        raise ConfigError(f"sweep.{sorted(unknown)[0]}", "unknown key")
    axes_cfg = section.get("axes")
    if not isinstance(axes_cfg, list) or not 1 <= len(axes_cfg) <= 2:
        raise ConfigError("sweep.axes", "must be a list of one or two axes")
    axes = []
    for i, ax in enumerate(axes_cfg):
        path = f"sweep.axes[{i}]"
        if not isinstance(ax, dict):
            raise ConfigError(path, "must be an object")
        extra = set(ax) - {"name", "min", "max", "points"}
        if extra:
            raise ConfigError(f"{path}.{sorted(extra)[0]}", "unknown key")
        name = ax.get("name")
        if name not in AXIS_NAMES:
            raise ConfigError(f"{path}.name", f"must be one of {', '.join(AXIS_NAMES)}")
        lo = _number(f"{path}.min", ax.get("min"))
        hi = _number(f"{path}.max", ax.get("max"))
        points = ax.get("points", 101)
        if not isinstance(points, int) or isinstance(points, bool) or points < 2:
            raise ConfigError(f"{path}.points", "must be an integer >= 2")
        if not lo < hi:
            raise ConfigError(path, "min must be below max")
        f = AXIS_FACTORS[name]
        axes.append(Axis(name, lo * f, hi * f, points))
    outputs = section.get("outputs", list(MEASURES))
    if not isinstance(outputs, list) or not outputs or any(o not in MEASURES for o in outputs):
        raise ConfigError("sweep.outputs", f"must be a nonempty subset of {', '.join(MEASURES)}")
    inner = None
    if section.get("inner") is not None:
        sec = section["inner"]
        if not isinstance(sec, dict):
            raise ConfigError("sweep.inner", "must be an object")
        lo = _number("sweep.inner.min", sec.get("min", -2 * base.omega_b / TWO_PI))
        hi = _number("sweep.inner.max", sec.get("max", 2 * base.omega_b / TWO_PI))
        points = sec.get("points", 401)
        if not isinstance(points, int) or points < 2:
            raise ConfigError("sweep.inner.points", "must be an integer >= 2")
        inner = InnerOptimization(TWO_PI * lo, TWO_PI * hi, points)
    try:
        return SweepSpec(base, tuple(axes), tuple(outputs), inner)
    except DomainError as exc:
        raise ConfigError("sweep", str(exc)) from exc


def _parse_scalar(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def _assign(raw, dotted, value):
    parts = dotted.split(".")
    target = raw
    for part in parts[:-1]:
        target = target.setdefault(part, {})
        if not isinstance(target, dict):
            raise ConfigError(dotted, "cannot override inside a non-object value")
    target[parts[-1]] = value


def load_config(
    command: str,
    path: Optional[str] = None,
    sets=(),
    flags: Optional[Dict[str, Any]] = None,
    environ=os.environ,
) -> RunConfig:
    """Merge defaults, the JSON file, ``--set key=value`` pairs and explicit flags.

    Later sources win in that order.
    """
    if command not in COMMANDS:
        raise ConfigError("command", f"must be one of {', '.join(COMMANDS)}")
    raw: Dict[str, Any] = {}
    if path is not None:
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise ConfigError("config", f"cannot read {path}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"invalid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config", "top level must be an object")
    for item in sets:
        if "=" not in item:
            raise ConfigError("--set", f"expected key=value, got {item!r}")
        key, text = item.split("=", 1)
        _assign(raw, key.strip(), _parse_scalar(text))
    for key, value in (flags or {}).items():
        if value is not None:
            raw[key] = value

    for key in raw:
        if key not in PARAM_DEFAULTS and key not in OTHER_KEYS:
            raise ConfigError(key, "unknown key")
    cfg = RunConfig(command=command)
    for key in PARAM_DEFAULTS:
        if key in raw:
            cfg.values[key] = raw[key]
    _check_values(cfg.values)

    thresholds = raw.get("thresholds", {})
    if not isinstance(thresholds, dict):
        raise ConfigError("thresholds", "must be an object")
    for key, value in thresholds.items():
        if key not in THRESHOLD_DEFAULTS:
            raise ConfigError(f"thresholds.{key}", "unknown key")
        if _number(f"thresholds.{key}", value) < 0:
            raise ConfigError(f"thresholds.{key}", "must be >= 0")
        cfg.thresholds[key] = float(value)

    if "workers" in raw:
        workers = raw["workers"]
    elif environ.get("MAGNOMECH_WORKERS"):
        workers = _parse_scalar(environ["MAGNOMECH_WORKERS"])
    else:
        workers = 1
    if not isinstance(workers, int) or isinstance(workers, bool) or workers < 1:
        raise ConfigError("workers", "must be an integer >= 1")
    cfg.workers = workers

    if "out" in raw:
        if not isinstance(raw["out"], str) or not raw["out"]:
            raise ConfigError("out", "must be a nonempty path")
        cfg.out = raw["out"]
    if raw.get("figure") is not None:
        if not isinstance(raw["figure"], str):
            raise ConfigError("figure", "must be a string")
        cfg.figure = raw["figure"]
    cfg.sweep = raw.get("sweep")

    # fail early on anything the command will need
    cfg.params()
    if command == "sweep":
        cfg.sweep_spec()
    if command == "reproduce" and cfg.figure is None:
        raise ConfigError("figure", "reproduce needs --figure")
    return cfg
