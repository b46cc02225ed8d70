"""
Scenario and sweep configuration files (INI style).

    [scenario]
    preset = dispersive        ; optional, explicit keys override it
    n1 = 200
    omega2 = 0.3
    grid.t_max = 2000          ; units of 1/omega1
    grid.n_points = 2001
    outputs = energies, heats, works, balances
    roles = both

    [sweep]
    axis = gamma
    values = 1e-5, 2e-3

A file without any section header is read as a single [scenario] section.
"""

import configparser
import logging
import re
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np

from src.models.bipartite_model import ModelParams
from src.models.scenarios import SCENARIO_REGISTRY
from src.utils.errors import ConfigError, ParameterError
from src.utils.parameters import DEFAULT_N_POINTS, DEFAULT_T_MAX, OUTPUT_GROUPS, SUBSYSTEMS

logger = logging.getLogger(__name__)

SCENARIO_SECTION = "scenario"
SWEEP_SECTION = "sweep"

PARAM_FIELDS = tuple(f.name for f in fields(ModelParams))
INTEGER_FIELDS = ("n1", "n2", "seed")
GRID_KEYS = ("grid.t_max", "grid.n_points")
EXTRA_KEYS = ("preset", "outputs", "roles")
ROLE_CHOICES: Dict[str, Tuple[int, ...]] = {"1": (1,), "2": (2,), "both": SUBSYSTEMS}


@dataclass(frozen=True)
class ScenarioConfig:
    """One simulation run: model parameters, time grid and output selection."""

    params: ModelParams
    t_max: float = DEFAULT_T_MAX
    n_points: int = DEFAULT_N_POINTS
    outputs: Tuple[str, ...] = OUTPUT_GROUPS
    roles: Tuple[int, ...] = SUBSYSTEMS
    name: str = "scenario"
    preset: Optional[str] = None

    def __post_init__(self):
        if self.n_points < 3:
            raise ParameterError(f"grid.n_points must be at least 3, got {self.n_points}")
        if not np.isfinite(self.t_max) or self.t_max <= 0:
            raise ParameterError(f"grid.t_max must be positive, got {self.t_max}")

    def grid(self) -> np.ndarray:
        """Physical time grid; t_max is given in units of 1/omega1."""
        return np.linspace(0.0, self.t_max / self.params.omega1, self.n_points)

    def with_params(self, **changes) -> "ScenarioConfig":
        return replace(self, params=self.params.with_overrides(**changes))


@dataclass(frozen=True)
class SweepConfig:
    """A base scenario and one parameter axis."""

    base: ScenarioConfig
    axis: str
    values: Tuple[Union[int, float], ...]

    def points(self) -> Iterator[Tuple[Union[int, float], ScenarioConfig]]:
        """Yield (value, scenario) per axis value."""
        for value in self.values:
            scenario = replace(
                self.base.with_params(**{self.axis: value}),
                name=f"{self.base.name}_{self.axis}_{value:g}"
            )
            yield value, scenario


def _key_line(lines: List[str], section: str, key: str) -> Optional[int]:
    """1-based line of `key` inside `section`, if present."""
    current = SCENARIO_SECTION
    pattern = re.compile(rf"^\s*{re.escape(key)}\s*[=:]")
    for number, line in enumerate(lines, start=1):
        header = re.match(r"^\s*\[([^\]]+)\]", line)
        if header:
            current = header.group(1).strip().lower()
            continue
        if current == section and pattern.match(line):
            return number
    return None


class _ConfigReader:
    """Typed access to one INI file with line-aware diagnostics."""

    def __init__(self, text: str, source: str):
        self.source = source
        self.lines = text.splitlines()
        if not re.search(r"^\s*\[", text, flags=re.MULTILINE):
            text = f"[{SCENARIO_SECTION}]\n" + text
            offset = 1
        else:
            offset = 0
        parser = configparser.ConfigParser(
            inline_comment_prefixes=(";", "#"),
            interpolation=None
        )
        parser.optionxform = str.lower
        try:
            parser.read_string(text, source=source)
        except configparser.DuplicateOptionError as exc:
            raise ConfigError("duplicate key", source, exc.option, _shift(exc.lineno, offset)) from exc
        except configparser.DuplicateSectionError as exc:
            raise ConfigError(f"duplicate section [{exc.section}]", source, None,
                              _shift(exc.lineno, offset)) from exc
        except configparser.MissingSectionHeaderError as exc:
            raise ConfigError("missing section header", source, None, exc.lineno) from exc
        except configparser.ParsingError as exc:
            lineno = exc.errors[0][0] if exc.errors else None
            raise ConfigError("malformed line", source, None, _shift(lineno, offset)) from exc
        self.parser = parser

    def has_section(self, section: str) -> bool:
        return self.parser.has_section(section)

    def keys(self, section: str) -> List[str]:
        return list(self.parser[section].keys()) if self.has_section(section) else []

    def error(self, message: str, section: str, key: Optional[str] = None) -> ConfigError:
        line = _key_line(self.lines, section, key) if key else None
        return ConfigError(message, self.source, key, line)

    def raw(self, section: str, key: str) -> Optional[str]:
        if not self.has_section(section) or key not in self.parser[section]:
            return None
        return self.parser[section][key].strip()

    def number(self, section: str, key: str, integer: bool = False):
        raw = self.raw(section, key)
        if raw is None:
            return None
        try:
            value = float(raw)
        except ValueError:
            raise self.error(f"expected a number, got '{raw}'", section, key) from None
        if integer:
            if not value.is_integer():
                raise self.error(f"expected an integer, got '{raw}'", section, key)
            return int(value)
        return value


def _shift(lineno: Optional[int], offset: int) -> Optional[int]:
    return None if lineno is None else lineno - offset


def _parse_scenario(reader: _ConfigReader, name: str) -> ScenarioConfig:
    section = SCENARIO_SECTION
    if not reader.has_section(section):
        raise ConfigError(f"missing [{section}] section", reader.source)

    known = set(PARAM_FIELDS) | set(GRID_KEYS) | set(EXTRA_KEYS)
    for key in reader.keys(section):
        if key not in known:
            raise reader.error("unknown key", section, key)

    preset = reader.raw(section, "preset")
    values: Dict[str, Union[int, float]] = {}
    t_max = DEFAULT_T_MAX
    if preset:
        scenario = SCENARIO_REGISTRY.get(preset)
        if scenario is None:
            known_presets = ", ".join(sorted(SCENARIO_REGISTRY))
            raise reader.error(f"unknown preset '{preset}' (known: {known_presets})", section, "preset")
        values = {f: getattr(scenario.params, f) for f in PARAM_FIELDS}
        t_max = scenario.t_max

    for field_name in PARAM_FIELDS:
        value = reader.number(section, field_name, integer=field_name in INTEGER_FIELDS)
        if value is not None:
            values[field_name] = value

    missing = [f for f in PARAM_FIELDS if f not in values and f not in ("sigma", "seed")]
    if missing:
        raise ConfigError(f"missing keys: {', '.join(missing)}", reader.source, missing[0])

    try:
        params = ModelParams(**values)
    except ParameterError as exc:
        first_word = str(exc).split()[0]
        raise reader.error(str(exc), section, first_word if first_word in PARAM_FIELDS else None) from exc

    grid_t_max = reader.number(section, "grid.t_max")
    grid_n_points = reader.number(section, "grid.n_points", integer=True)
    if grid_t_max is not None:
        t_max = grid_t_max
    n_points = DEFAULT_N_POINTS if grid_n_points is None else grid_n_points

    outputs = OUTPUT_GROUPS
    raw_outputs = reader.raw(section, "outputs")
    if raw_outputs:
        outputs = tuple(item.strip() for item in raw_outputs.split(",") if item.strip())
        unknown = [item for item in outputs if item not in OUTPUT_GROUPS]
        if unknown:
            raise reader.error(
                f"unknown output group(s) {', '.join(unknown)} (known: {', '.join(OUTPUT_GROUPS)})",
                section, "outputs"
            )

    roles = SUBSYSTEMS
    raw_roles = reader.raw(section, "roles")
    if raw_roles:
        if raw_roles.lower() not in ROLE_CHOICES:
            raise reader.error(f"roles must be 1, 2 or both, got '{raw_roles}'", section, "roles")
        roles = ROLE_CHOICES[raw_roles.lower()]

    try:
        return ScenarioConfig(
            params=params,
            t_max=float(t_max),
            n_points=int(n_points),
            outputs=outputs,
            roles=roles,
            name=name,
            preset=preset or None
        )
    except ParameterError as exc:
        key = "grid.n_points" if "n_points" in str(exc) else "grid.t_max"
        raise reader.error(str(exc), section, key) from exc


def parse_config_text(text: str, source: str = "<string>", name: str = "scenario") -> ScenarioConfig:
    """Parse scenario configuration text."""
    return _parse_scenario(_ConfigReader(text, source), name)


def parse_sweep_text(text: str, source: str = "<string>", name: str = "sweep") -> SweepConfig:
    """Parse sweep configuration text."""
    reader = _ConfigReader(text, source)
    base = _parse_scenario(reader, name)
    if not reader.has_section(SWEEP_SECTION):
        raise ConfigError(f"missing [{SWEEP_SECTION}] section", source)

    axis = reader.raw(SWEEP_SECTION, "axis")
    if not axis:
        raise reader.error("sweep axis is required", SWEEP_SECTION, "axis")
    if axis not in PARAM_FIELDS:
        raise reader.error(
            f"unknown sweep axis '{axis}' (known: {', '.join(PARAM_FIELDS)})", SWEEP_SECTION, "axis"
        )
    raw_values = reader.raw(SWEEP_SECTION, "values") or ""
    items = [item.strip() for item in raw_values.split(",") if item.strip()]
    if not items:
        raise reader.error("sweep axis has no values", SWEEP_SECTION, "values")
    values = []
    for item in items:
        try:
            value = float(item)
        except ValueError:
            raise reader.error(f"expected a number, got '{item}'", SWEEP_SECTION, "values") from None
        if axis in INTEGER_FIELDS:
            if not value.is_integer():
                raise reader.error(f"expected an integer, got '{item}'", SWEEP_SECTION, "values")
            value = int(value)
        values.append(value)
    # validate every point up front
    for value in values:
        try:
            base.params.with_overrides(**{axis: value})
        except ParameterError as exc:
            raise reader.error(str(exc), SWEEP_SECTION, "values") from exc
    return SweepConfig(base=base, axis=axis, values=tuple(values))


def _read(path: Union[str, Path]) -> Tuple[str, Path]:
    path = Path(path)
    try:
        return path.read_text(encoding="utf-8"), path
    except OSError as exc:
        raise ConfigError(f"cannot read configuration: {exc.strerror}", str(path)) from exc


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    """Read a scenario configuration file."""
    text, path = _read(path)
    config = parse_config_text(text, source=str(path), name=path.stem)
    logger.debug("loaded scenario %s from %s", config.name, path)
    return config


def load_sweep_config(path: Union[str, Path]) -> SweepConfig:
    """Read a sweep configuration file."""
    text, path = _read(path)
    return parse_sweep_text(text, source=str(path), name=path.stem)
