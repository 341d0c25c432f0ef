"""INI-style scenario configuration: parsing, defaults, and round-trip dump.

An empty (or absent) config reproduces the benchmark sinusoid scenario; any
key can be overridden.  Sections and keys are validated strictly so a typo
fails loudly with the offending name.
"""

from __future__ import annotations

import configparser
import math
from typing import Any, Optional

from .baselines import BaselineParams
from .guidance import GuidanceParams
from .paths import (
    CirclePath,
    LinePath,
    ReferencePath,
    SinusoidPath,
    load_polyline,
)
from .simulation import (
    SCENARIO_AMPLITUDE,
    SCENARIO_PERIOD,
    ScenarioConfig,
)
from .vehicle import AirspeedSpec, WindModel


class ConfigError(ValueError):
    """Malformed configuration; message names the offending file/section/key."""


# (type, default); type "opt_float" coerces blank to None.
DEFAULTS: dict[str, dict[str, tuple[str, Any]]] = {
    "path": {
        "kind": ("str", "sinusoid"),
        "amplitude": ("float", SCENARIO_AMPLITUDE),
        "period": ("float", SCENARIO_PERIOD),
        "s_min": ("opt_float", None),
        "s_max": ("opt_float", None),
        "x0": ("float", 0.0),
        "y0": ("float", 0.0),
        "heading": ("float", 0.0),
        "cx": ("float", 0.0),
        "cy": ("float", 0.0),
        "radius": ("float", 300.0),
        "file": ("str", ""),
    },
    "vehicle": {
        "airspeed": ("float", 15.0),
        "alpha": ("float", 1.65),
    },
    "guidance": {
        "chi_inf": ("float", 0.5 * math.pi),
        "k1": ("float", 0.01),
        "d_s": ("float", 10.0),
        "eta": ("float", 0.25 * math.pi),
        "n": ("int", 3),
        "m": ("int", 5),
        "sigma": ("float", 0.25 * math.pi),
        "epsilon": ("float", 0.05),
        "delta_hys": ("float", 0.05),
        "reaching": ("str", "sat"),
    },
    "baselines": {
        "vf_k": ("float", 0.02),
        "vf_beta": ("float", 0.5 * math.pi),
        "plos_k1": ("float", 15.0),
        "plos_k2": ("float", 0.1),
        "nlgl_l1": ("float", 110.0),
    },
    "sim": {
        "dt": ("float", 0.01),
        "max_time": ("float", 300.0),
        "integrator": ("str", "rk4"),
        "d0": ("float", 200.0),
        "s0": ("float", 0.0),
        "chi0": ("float", 1.8),
        "x_init": ("opt_float", None),
        "y_init": ("opt_float", None),
        "nlgl_d0": ("float", 80.0),
        "wind_x": ("float", 0.0),
        "wind_y": ("float", 0.0),
        "wind_sampled": ("bool", False),
        "d_threshold": ("float", 15.0),
        "align_threshold": ("float", 0.2),
        "dwell": ("float", 5.0),
        "stop_when_converged": ("bool", True),
        "kappa_max": ("float", 0.7 / 15.0),
    },
}

_BOOL_TRUE = {"1", "true", "yes", "on"}
_BOOL_FALSE = {"0", "false", "no", "off"}


def _coerce(kind: str, raw: str, where: str) -> Any:
    raw = raw.strip()
    try:
        if kind == "float":
            return float(raw)
        if kind == "int":
            return int(raw)
        if kind == "opt_float":
            return None if raw == "" else float(raw)
        if kind == "bool":
            low = raw.lower()
            if low in _BOOL_TRUE:
                return True
            if low in _BOOL_FALSE:
                return False
            raise ValueError(raw)
        return raw
    except ValueError:
        raise ConfigError(f"invalid value {raw!r} for {where}") from None


def default_settings() -> dict[str, dict[str, Any]]:
    return {
        section: {key: spec[1] for key, spec in keys.items()}
        for section, keys in DEFAULTS.items()
    }


def load_settings(path: Optional[str]) -> dict[str, dict[str, Any]]:
    """Parse a config file over the defaults; ``None`` returns pure defaults."""
    settings = default_settings()
    if path is None:
        return settings
    parser = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except configparser.Error as exc:
        raise ConfigError(f"could not parse config file {path}: {exc}") from None
    for section in parser.sections():
        if section not in DEFAULTS:
            raise ConfigError(f"unknown section [{section}] in {path}")
        for key, raw in parser.items(section):
            if key not in DEFAULTS[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}] of {path}")
            kind = DEFAULTS[section][key][0]
            settings[section][key] = _coerce(kind, raw, f"[{section}] {key}")
    return settings


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_settings(settings: dict[str, dict[str, Any]]) -> str:
    """Render settings as INI text that re-parses to an equivalent run."""
    lines: list[str] = []
    for section, keys in DEFAULTS.items():
        lines.append(f"[{section}]")
        for key in keys:
            lines.append(f"{key} = {_format_value(settings[section][key])}")
        lines.append("")
    return "\n".join(lines)


def build_path(settings: dict[str, dict[str, Any]]) -> ReferencePath:
    sec = settings["path"]
    kind = sec["kind"]
    try:
        if kind == "sinusoid":
            kwargs = {}
            if sec["s_min"] is not None:
                kwargs["s_min"] = sec["s_min"]
            if sec["s_max"] is not None:
                kwargs["s_max"] = sec["s_max"]
            return SinusoidPath(sec["amplitude"], sec["period"], **kwargs)
        if kind == "line":
            kwargs = {}
            if sec["s_min"] is not None:
                kwargs["s_min"] = sec["s_min"]
            if sec["s_max"] is not None:
                kwargs["s_max"] = sec["s_max"]
            return LinePath(sec["x0"], sec["y0"], sec["heading"], **kwargs)
        if kind == "circle":
            return CirclePath(sec["cx"], sec["cy"], sec["radius"])
        if kind == "polyline":
            if not sec["file"]:
                raise ConfigError("polyline path needs [path] file = <csv>")
            try:
                return load_polyline(sec["file"])
            except FileNotFoundError:
                raise ConfigError(f"polyline file not found: {sec['file']}") from None
    except (ValueError, ConfigError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid [path] parameters: {exc}") from None
    raise ConfigError(f"unknown path kind {kind!r}")


def build_scenario(
    settings: dict[str, dict[str, Any]], law: str = "switched"
) -> ScenarioConfig:
    """Assemble a ScenarioConfig for one guidance law from parsed settings."""
    g = settings["guidance"]
    v = settings["vehicle"]
    b = settings["baselines"]
    s = settings["sim"]
    try:
        guidance = GuidanceParams(
            chi_inf=g["chi_inf"],
            k1=g["k1"],
            d_s=g["d_s"],
            alpha=v["alpha"],
            eta=g["eta"],
            n=g["n"],
            m=g["m"],
            sigma=g["sigma"],
            epsilon=g["epsilon"],
            delta_hys=g["delta_hys"],
            reaching=g["reaching"],
        )
        baselines = BaselineParams(
            vf_k=b["vf_k"],
            vf_beta=b["vf_beta"],
            plos_k1=b["plos_k1"],
            plos_k2=b["plos_k2"],
            nlgl_l1=b["nlgl_l1"],
        )
        wind = None if s["wind_sampled"] else WindModel(s["wind_x"], s["wind_y"])
        return ScenarioConfig(
            path=build_path(settings),
            law=law,
            guidance=guidance,
            baselines=baselines,
            airspeed=AirspeedSpec(v["airspeed"]),
            wind=wind,
            d0=s["d0"],
            s0=s["s0"],
            chi0=s["chi0"],
            x_init=s["x_init"],
            y_init=s["y_init"],
            dt=s["dt"],
            max_time=s["max_time"],
            integrator=s["integrator"],
            d_threshold=s["d_threshold"],
            align_threshold=s["align_threshold"],
            dwell=s["dwell"],
            stop_when_converged=s["stop_when_converged"],
            nlgl_d0=s["nlgl_d0"],
            kappa_max=s["kappa_max"] if s["kappa_max"] > 0.0 else math.inf,
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None
