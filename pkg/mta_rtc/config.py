"""Loading and validation of YAML system descriptions."""

__author__ = """mta_rtc developers"""
__contact__ = "mta-rtc@users.noreply.github.com"
__copyright__ = "Copyright 2026 mta_rtc developers"
__license__ = "BSD - see LICENSE file in top-level package directory"
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Tuple, TypedDict, Union

import yaml

from .curves import INF, Bound, Curve, CurveError, as_bound, validate
from .engine import DEFAULT_STATE_BUDGET
from .mta import Mode, Mta, Transition, TransitionKind, validate_mta

log = logging.getLogger(__name__)

THIS_DIR = os.path.dirname(__file__)
DATA_DIR = os.path.join(THIS_DIR, "data")
SCHEMA_FILEPATH = os.path.join(DATA_DIR, "config_schema.yaml")

DEFAULT_HORIZON = 40
DEFAULT_MAX_BACKLOG = 16
DEFAULT_ORACLE_HORIZON = 20
DEFAULT_ORACLE_MAX_EVENTS = 6
DEFAULT_OUTPUT_DIR = "results"

TBound = Union[int, str, None]


class TCurve(TypedDict):
    lower: List[TBound]
    upper: List[TBound]


class TTransition(TypedDict, total=False):
    kind: str
    target: str
    channel: str


class TMode(TypedDict, total=False):
    name: str
    service: Optional[TCurve]
    buf_low: TBound
    buf_high: TBound
    dwell_min: int
    dwell_max: TBound
    transitions: List[TTransition]


class TEngine(TypedDict, total=False):
    state_budget: int
    horizon: int
    max_backlog: int
    jobs: int


class TOracle(TypedDict, total=False):
    horizon: int
    max_events: int


class TSystemDescription(TypedDict, total=False):
    n: int
    arrival: TCurve
    modes: List[TMode]
    initial: str
    initial_backlog: int
    channels: Optional[Dict[str, Optional[TCurve]]]
    granularities: List[int]
    engine: TEngine
    oracle: TOracle
    output_dir: str


class ConfigError(Exception):
    """Error with a system description, ``field`` names the offending entry"""

    def __init__(self, message: str, field: str = "") -> None:
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


@dataclass(frozen=True)
class EngineOptions:
    state_budget: int = DEFAULT_STATE_BUDGET
    horizon: int = DEFAULT_HORIZON
    max_backlog: int = DEFAULT_MAX_BACKLOG
    jobs: int = 1


@dataclass(frozen=True)
class OracleOptions:
    horizon: int = DEFAULT_ORACLE_HORIZON
    max_events: int = DEFAULT_ORACLE_MAX_EVENTS


@dataclass(frozen=True)
class SystemDescription:
    n: int
    arrival: Curve
    mta: Mta
    granularities: Tuple[int, ...]
    channels: Mapping[str, Optional[Curve]] = field(default_factory=dict)
    engine: EngineOptions = EngineOptions()
    oracle: OracleOptions = OracleOptions()
    output_dir: str = DEFAULT_OUTPUT_DIR


def load_schema(schema_filepath: str = SCHEMA_FILEPATH) -> Dict[str, dict]:
    with open(schema_filepath) as schema_file:
        return yaml.safe_load(schema_file)


# Schema checking


def _join(pattern: str, key: str) -> str:
    return f"{pattern}.{key}" if pattern else key


def _is_bound(value: Any) -> bool:
    if isinstance(value, bool):
        return False
    return isinstance(value, int) or value in ("inf", "-inf")


_TYPE_CHECKS = {
    "int": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "str": lambda v: isinstance(v, str),
    "mapping": lambda v: isinstance(v, dict),
    "list": lambda v: isinstance(v, list),
    "bound": _is_bound,
    "bounds": lambda v: isinstance(v, list)
    and all(item is None or _is_bound(item) for item in v),
}


def _check_node(value: Any, pattern: str, path: str, schema: Dict[str, dict]) -> None:
    rule = schema.get(pattern, {"type": "mapping"})
    if value is None:
        if not rule.get("nullable", False):
            raise ConfigError("must not be null", path)
        return

    if not _TYPE_CHECKS[rule["type"]](value):
        raise ConfigError(f"expecting {rule['type']}, got {value!r}", path)

    if "choices" in rule and value not in rule["choices"]:
        raise ConfigError(f"expecting one of {rule['choices']}, got {value!r}", path)

    if rule["type"] == "list":
        for i, item in enumerate(value):
            _check_node(item, f"{pattern}[]", f"{path}[{i}]", schema)

    elif rule["type"] == "mapping":
        for key, child in value.items():
            child_pattern = _join(pattern, str(key))
            if child_pattern not in schema:
                child_pattern = _join(pattern, "*")
            if child_pattern not in schema:
                raise ConfigError("unknown field", _join(path, str(key)))
            _check_node(child, child_pattern, _join(path, str(key)), schema)

        prefix = _join(pattern, "")
        for key_pattern, key_rule in schema.items():
            key = key_pattern[len(prefix) :]
            if (
                key_pattern.startswith(prefix)
                and key
                and not any(c in key for c in ".[*")
                and key_rule.get("required", False)
                and key not in value
            ):
                raise ConfigError("required field missing", _join(path, key))


def check_schema(settings: Any, schema: Optional[Dict[str, dict]] = None) -> None:
    """Raise ConfigError naming the first field that does not match the schema"""
    if schema is None:
        schema = load_schema()
    if not isinstance(settings, dict):
        raise ConfigError("expecting a mapping at top level")
    _check_node(settings, "", "", schema)


# Building the description


def _curve(curve_d: TCurve, path: str) -> Curve:
    try:
        c = Curve(curve_d["lower"], curve_d["upper"])
    except CurveError as exc:
        raise ConfigError(str(exc), path)

    violation = validate(c)
    if violation is not None:
        raise ConfigError(f"k={violation}", path)
    if c.n < 1:
        raise ConfigError("curve has no points", path)
    return c


def _bound(value: TBound, default: Bound) -> Bound:
    return default if value is None else as_bound(value)


def _mode(mode_d: TMode, path: str) -> Mode:
    service_d = mode_d.get("service")
    transitions = tuple(
        Transition(TransitionKind(t["kind"]), t["target"], t.get("channel"))
        for t in mode_d.get("transitions", [])
    )
    return Mode(
        name=mode_d["name"],
        service=None if service_d is None else _curve(service_d, f"{path}.service"),
        buf_low=_bound(mode_d.get("buf_low"), -INF),
        buf_high=_bound(mode_d.get("buf_high"), INF),
        dwell_min=mode_d.get("dwell_min", 0),
        dwell_max=_bound(mode_d.get("dwell_max"), INF),
        transitions=transitions,
    )


def check_granularities(desc: SystemDescription) -> None:
    seen = set()
    for i, g in enumerate(desc.granularities):
        path = f"granularities[{i}]"
        if g in seen:
            raise ConfigError(f"duplicate granularity {g}", path)
        seen.add(g)

        if not 1 <= g <= desc.n:
            raise ConfigError(f"granularity {g} outside [1, n={desc.n}]", path)

        if g > desc.arrival.n:
            raise ConfigError(
                f"granularity {g} exceeds the arrival curve length", path
            )

        for mode in desc.mta.modes:
            if mode.service is not None and g > mode.service.n:
                raise ConfigError(
                    f"granularity {g} exceeds the service curve length "
                    f"of mode {mode.name!r}",
                    path,
                )


def parse(settings: TSystemDescription) -> SystemDescription:
    """Build and validate a system description from its parsed YAML"""
    check_schema(settings)

    channels = {
        name: None if curve_d is None else _curve(curve_d, f"channels.{name}")
        for name, curve_d in (settings.get("channels") or {}).items()
    }
    modes = tuple(
        _mode(mode_d, f"modes[{i}]") for i, mode_d in enumerate(settings["modes"])
    )
    m = Mta(
        modes=modes,
        initial=settings["initial"],
        initial_backlog=settings.get("initial_backlog", 0),
        channels=tuple(channels),
    )
    violation = validate_mta(m)
    if violation is not None:
        raise ConfigError(violation.message, str(violation.index))

    desc = SystemDescription(
        n=settings["n"],
        arrival=_curve(settings["arrival"], "arrival"),
        mta=m,
        granularities=tuple(settings["granularities"]),
        channels=channels,
        engine=EngineOptions(**settings.get("engine", {})),
        oracle=OracleOptions(**settings.get("oracle", {})),
        output_dir=settings.get("output_dir", DEFAULT_OUTPUT_DIR),
    )

    if desc.n < 1:
        raise ConfigError("must be >= 1", "n")
    check_granularities(desc)

    for key in ("state_budget", "horizon", "max_backlog", "jobs"):
        if getattr(desc.engine, key) < (0 if key == "horizon" else 1):
            raise ConfigError("out of range", f"engine.{key}")

    return desc


def parse_config_file(config_filepath: str) -> SystemDescription:
    """Read a system description from a YAML file"""
    log.info("Reading system description %r", config_filepath)
    try:
        with open(config_filepath) as config_file:
            settings = yaml.safe_load(config_file)
    except OSError as exc:
        raise ConfigError(f"Cannot read system description: {exc}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"Malformed YAML: {exc}")

    return parse(settings)
