"""Sweep configuration: a TOML document with ``params``, ``grid``, ``output`` and ``columns`` sections."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from importlib import resources

import tomli
import tomli_w

SCENARIOS = ("epr", "cluster-1d", "cluster-2d")
CONVENTIONS = ("physical", "paper-linear")
FORMATS = ("csv", "svg")

EPR_DEFAULTS = {
    "r1": 1.0,
    "r2": 1.0,
    "r3": 4.6,
    "r4": 4.6,
    "alpha": [0.0, 0.0],
    "beta": [1.0, 5.0],
    "theta_deg": 1.5,
    "phi_deg": 90.0,
    "lo_scale": 1.0,
}
CLUSTER_DEFAULTS = {
    "r": 1.0,
    "r_prime": 3.0,
    "alpha": [0.0, 0.0, 2.0, 0.0],
    "beta": [1.0, 2.0, 0.0, 0.0],
    "theta_deg": 1.5,
    "lo_scale": 1.0,
}
GRID_DEFAULTS = {"start": 0.0, "stop": 0.95, "step": 0.01}
GRID_2D_DEFAULTS = {"modes": [1, 2], "fixed_eta": [0.5, 0.5, 0.5, 0.5]}


class ConfigError(ValueError):
    pass


@dataclass
class GridSpec:
    start: float = 0.0
    stop: float = 0.95
    step: float = 0.01
    modes: list | None = None
    fixed_eta: list | None = None


@dataclass
class OutputSpec:
    name: str = "sweep"
    format: str = "csv"
    log_sigma: bool = False


@dataclass
class ColumnSpec:
    with_opa: bool = True
    without_opa: bool = True
    snl: bool = True
    as_printed: bool = True

    def enabled(self) -> tuple[str, ...]:
        names = {"with_opa": "with-opa", "without_opa": "without-opa", "snl": "snl", "as_printed": "as-printed"}
        return tuple(v for k, v in names.items() if getattr(self, k))


@dataclass
class SweepConfig:
    scenario: str
    convention: str = "physical"
    params: dict = field(default_factory=dict)
    grid: GridSpec = field(default_factory=GridSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    columns: ColumnSpec = field(default_factory=ColumnSpec)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grid"] = {k: v for k, v in d["grid"].items() if v is not None}
        return d


def _reject_unknown(section: str, data: dict, allowed) -> None:
    extra = sorted(set(data) - set(allowed))
    if extra:
        where = f"[{section}]" if section else "top level"
        raise ConfigError(f"unknown key(s) at {where}: {', '.join(extra)}")


def _number(section, key, value, lo=None, hi=None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError(f"{section}.{key} must be finite, got {value}")
    if lo is not None and value < lo:
        raise ConfigError(f"{section}.{key}={value} is below the lower bound {lo}")
    if hi is not None and value > hi:
        raise ConfigError(f"{section}.{key}={value} is above the upper bound {hi}")
    return value


def _vector(section, key, value, length, lo=None, hi=None) -> list:
    if not isinstance(value, list) or len(value) != length:
        raise ConfigError(f"{section}.{key} must be a list of {length} numbers, got {value!r}")
    return [_number(section, f"{key}[{i}]", v, lo, hi) for i, v in enumerate(value)]


def _bool(section, key, value) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"{section}.{key} must be true or false, got {value!r}")
    return value


def _params(scenario: str, data: dict) -> dict:
    defaults = EPR_DEFAULTS if scenario == "epr" else CLUSTER_DEFAULTS
    _reject_unknown("params", data, defaults)
    merged = {**defaults, **data}
    out = {}
    n = 2 if scenario == "epr" else 4
    for key, value in merged.items():
        if key in ("alpha", "beta"):
            out[key] = _vector("params", key, value, n)
        elif key == "lo_scale":
            out[key] = _number("params", key, value, lo=1e-300)
        else:
            out[key] = _number("params", key, value)
    return out


def _grid(scenario: str, data: dict) -> GridSpec:
    allowed = dict(GRID_DEFAULTS, **(GRID_2D_DEFAULTS if scenario == "cluster-2d" else {}))
    _reject_unknown("grid", data, allowed)
    merged = {**allowed, **data}
    start = _number("grid", "start", merged["start"], 0.0, 1.0)
    stop = _number("grid", "stop", merged["stop"], 0.0, 1.0)
    step = _number("grid", "step", merged["step"])
    if step <= 0:
        raise ConfigError(f"grid.step must be positive, got {step}")
    if stop < start:
        raise ConfigError(f"grid.stop={stop} is below grid.start={start}")
    spec = GridSpec(start, stop, step)
    if scenario == "cluster-2d":
        modes = merged["modes"]
        if (
            not isinstance(modes, list)
            or len(modes) != 2
            or not all(isinstance(m, int) and not isinstance(m, bool) and 1 <= m <= 4 for m in modes)
            or modes[0] == modes[1]
        ):
            raise ConfigError(f"grid.modes must be two distinct mode numbers in 1..4, got {modes!r}")
        spec.modes = list(modes)
        spec.fixed_eta = _vector("grid", "fixed_eta", merged["fixed_eta"], 4, 0.0, 1.0)
    return spec


def _output(data: dict) -> OutputSpec:
    _reject_unknown("output", data, OutputSpec.__dataclass_fields__)
    spec = OutputSpec(**{**asdict(OutputSpec()), **data})
    if not isinstance(spec.name, str) or not spec.name or "/" in spec.name:
        raise ConfigError(f"output.name must be a plain file stem, got {spec.name!r}")
    if spec.format not in FORMATS:
        raise ConfigError(f"output.format must be one of {FORMATS}, got {spec.format!r}")
    _bool("output", "log_sigma", spec.log_sigma)
    return spec


def _columns(data: dict) -> ColumnSpec:
    _reject_unknown("columns", data, ColumnSpec.__dataclass_fields__)
    for k, v in data.items():
        _bool("columns", k, v)
    spec = ColumnSpec(**data)
    if not any(asdict(spec).values()):
        raise ConfigError("at least one column must be enabled")
    return spec


def from_dict(data: dict) -> SweepConfig:
    _reject_unknown("", data, ("scenario", "convention", "params", "grid", "output", "columns"))
    scenario = data.get("scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"scenario must be one of {SCENARIOS}, got {scenario!r}")
    convention = data.get("convention", "physical")
    if convention not in CONVENTIONS:
        raise ConfigError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    sections = {}
    for name in ("params", "grid", "output", "columns"):
        value = data.get(name, {})
        if not isinstance(value, dict):
            raise ConfigError(f"[{name}] must be a table")
        sections[name] = value
    return SweepConfig(
        scenario=scenario,
        convention=convention,
        params=_params(scenario, sections["params"]),
        grid=_grid(scenario, sections["grid"]),
        output=_output(sections["output"]),
        columns=_columns(sections["columns"]),
    )


def read_toml(text: str) -> dict:
    """Parse TOML text; syntax errors name the offending line and column."""
    try:
        return tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"parse error: {exc}") from exc


def parse_config(text: str) -> SweepConfig:
    return from_dict(read_toml(text))


def dump_config(config: SweepConfig) -> str:
    return tomli_w.dumps(config.to_dict())


def load_config(path) -> SweepConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


# -- presets ---------------------------------------------------------------------

PRESET_ALIASES = {"fig4": "fig4a"}


def preset_names() -> list[str]:
    files = resources.files("opa_metrology").joinpath("presets").iterdir()
    return sorted(f.name[: -len(".toml")] for f in files if f.name.endswith(".toml"))


def preset_text(name: str) -> str:
    name = PRESET_ALIASES.get(name, name)
    if name not in preset_names():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return resources.files("opa_metrology").joinpath("presets", f"{name}.toml").read_text("utf-8")


def load_preset(name: str) -> SweepConfig:
    return parse_config(preset_text(name))
