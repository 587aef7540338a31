"""Project configuration: INI file layered over the packaged defaults."""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .acoustics import PiezoCoupling
from .beam import BeamGeometry, LayerSpec, SectionModel
from .errors import ConfigError, DomainError
from .rectifier import RectifierStorage
from .spectrum import Window

__all__ = ["ProjectConfig", "load_config", "default_config_text"]

_SCHEMA = {
    "geometry": {"length": float, "width": float, "piezo_start": float, "piezo_length": float},
    "substrate": {"youngs_modulus": float, "density": float, "thickness": float},
    "piezo": {"youngs_modulus": float, "density": float, "thickness": float},
    "model": {
        "section_model": str,
        "damping_ratio": float,
        "mode_count": int,
        "placement_grid": int,
    },
    "coupling": {"d31": float, "capacitance": float, "leakage_resistance": float},
    "rectifier": {
        "diode_drop": float,
        "storage_capacitance": float,
        "load_resistance": float,
        "initial_storage_voltage": float,
        "steps_per_cycle": int,
        "cycles": float,
        "tail_fraction": float,
    },
    "analysis": {"band_low": float, "band_high": float, "segment_length": int, "window": str},
    "solver": {"root_tolerance": float},
    "output": {"directory": str},
}


@dataclass(frozen=True)
class ProjectConfig:
    geometry: BeamGeometry
    section_model: SectionModel
    damping_ratio: float
    mode_count: int
    placement_grid: int
    d31: float | None
    capacitance: float
    leakage_resistance: float
    rectifier: RectifierStorage
    initial_storage_voltage: float
    steps_per_cycle: int
    cycles: float
    tail_fraction: float
    band_low: float
    band_high: float
    segment_length: int
    window: Window
    root_tolerance: float
    output_dir: Path

    def coupling(self):
        """Piezo coupling; d31 must have been configured."""
        if self.d31 is None:
            raise ConfigError(
                "coupling.d31", "required for voltage output; set it in the config or pass --d31"
            )
        return PiezoCoupling(self.d31, self.capacitance, self.leakage_resistance)


def default_config_text():
    return resources.files(__package__).joinpath("default.ini").read_text()


def _parse(parser, section, key, kind):
    raw = parser.get(section, key).strip()
    field = f"{section}.{key}"
    if raw == "":
        return None
    try:
        if kind is int:
            value = int(raw)
        elif kind is float:
            value = float(raw)
        else:
            return raw
    except ValueError:
        raise ConfigError(field, f"expected {kind.__name__}, got {raw!r}") from None
    if kind is float and math.isnan(value):
        raise ConfigError(field, "value is NaN")
    return value


def load_config(path=None, overrides=None):
    """Read the packaged defaults, then `path` on top, then `overrides`.

    `overrides` maps "section.key" to a string. Unknown sections or keys are
    rejected by name.
    """
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.read_string(default_config_text(), source="<defaults>")
    if path is not None:
        path = Path(path)
        user = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
        try:
            user.read_string(text, source=str(path))
        except configparser.Error as exc:
            raise ConfigError("--config", f"{path} is not a valid INI file: {exc}") from None
        for section in user.sections():
            if section not in _SCHEMA:
                raise ConfigError(section, "unknown section")
            for key, value in user.items(section, raw=True):
                if key not in _SCHEMA[section]:
                    raise ConfigError(f"{section}.{key}", "unknown key")
                parser.set(section, key, value)
    for name, value in (overrides or {}).items():
        section, key = name.split(".", 1)
        parser.set(section, key, str(value))

    v = {
        (sec, key): _parse(parser, sec, key, kind)
        for sec, keys in _SCHEMA.items()
        for key, kind in keys.items()
    }
    for (sec, key), value in v.items():
        if value is None and (sec, key) != ("coupling", "d31"):
            raise ConfigError(f"{sec}.{key}", "missing value")

    def build(field, factory):
        try:
            return factory()
        except (DomainError, ValueError) as exc:
            raise ConfigError(field, str(exc)) from None

    substrate = build(
        "substrate",
        lambda: LayerSpec(
            v["substrate", "youngs_modulus"], v["substrate", "density"], v["substrate", "thickness"]
        ),
    )
    piezo = build(
        "piezo",
        lambda: LayerSpec(v["piezo", "youngs_modulus"], v["piezo", "density"], v["piezo", "thickness"]),
    )
    geometry = build(
        "geometry",
        lambda: BeamGeometry(
            v["geometry", "length"],
            v["geometry", "width"],
            substrate,
            piezo,
            v["geometry", "piezo_start"],
            v["geometry", "piezo_length"],
        ),
    )
    section_model = build("model.section_model", lambda: SectionModel(v["model", "section_model"]))
    window = build("analysis.window", lambda: Window(v["analysis", "window"]))
    rectifier = build(
        "rectifier",
        lambda: RectifierStorage(
            v["rectifier", "storage_capacitance"],
            v["rectifier", "load_resistance"],
            v["rectifier", "diode_drop"],
        ),
    )
    build(
        "coupling",
        lambda: PiezoCoupling(
            v["coupling", "d31"] or 0.0, v["coupling", "capacitance"], v["coupling", "leakage_resistance"]
        ),
    )

    checks = [
        ("model.damping_ratio", 0 < v["model", "damping_ratio"] < 1, "must lie in (0, 1)"),
        ("model.mode_count", v["model", "mode_count"] >= 1, "must be >= 1"),
        ("model.placement_grid", v["model", "placement_grid"] >= 2, "must be >= 2"),
        ("rectifier.steps_per_cycle", v["rectifier", "steps_per_cycle"] >= 200, "must be >= 200"),
        ("rectifier.cycles", v["rectifier", "cycles"] > 0, "must be > 0"),
        ("rectifier.tail_fraction", 0 < v["rectifier", "tail_fraction"] <= 1, "must lie in (0, 1]"),
        (
            "rectifier.initial_storage_voltage",
            v["rectifier", "initial_storage_voltage"] >= 0,
            "must be >= 0",
        ),
        ("analysis.band_low", v["analysis", "band_low"] >= 0, "must be >= 0"),
        (
            "analysis.band_high",
            v["analysis", "band_high"] > v["analysis", "band_low"],
            "must exceed band_low",
        ),
        (
            "analysis.segment_length",
            v["analysis", "segment_length"] >= 2
            and v["analysis", "segment_length"] & (v["analysis", "segment_length"] - 1) == 0,
            "must be a power of two",
        ),
        ("solver.root_tolerance", v["solver", "root_tolerance"] > 0, "must be > 0"),
    ]
    for field, ok, message in checks:
        if not ok:
            raise ConfigError(field, message)

    return ProjectConfig(
        geometry=geometry,
        section_model=section_model,
        damping_ratio=v["model", "damping_ratio"],
        mode_count=v["model", "mode_count"],
        placement_grid=v["model", "placement_grid"],
        d31=v["coupling", "d31"],
        capacitance=v["coupling", "capacitance"],
        leakage_resistance=v["coupling", "leakage_resistance"],
        rectifier=rectifier,
        initial_storage_voltage=v["rectifier", "initial_storage_voltage"],
        steps_per_cycle=v["rectifier", "steps_per_cycle"],
        cycles=v["rectifier", "cycles"],
        tail_fraction=v["rectifier", "tail_fraction"],
        band_low=v["analysis", "band_low"],
        band_high=v["analysis", "band_high"],
        segment_length=v["analysis", "segment_length"],
        window=window,
        root_tolerance=v["solver", "root_tolerance"],
        output_dir=Path(v["output", "directory"]),
    )
