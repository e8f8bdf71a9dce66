# -*- coding: utf-8 -*-

"""
Run configuration.

Precedence, lowest first: defaults, JSON config file, HD_OUTPUT_DIR, command line flags, --set key=value.
Relative paths in the config file are resolved against the file's directory, all others against the
working directory.
"""

import dataclasses
import datetime
import json
from collections.abc import Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

from hawkdove.core import InputError, is_falsey, startup_environment
from hawkdove.core.logger import module_logger
from hawkdove.core.security import canonical_hash

mlogger = module_logger(__name__)

DEFAULT_SEEDS = (5768, 78516, 944601)
DEFAULT_MATURITIES = ("3m", "1y", "10y")
DEFAULT_OUTPUT_DIR = "hawkdove-out"

PATH_KEYS = ("raw_text_dir", "labels", "lexicon", "cpi", "ppi", "treasury", "prices")
DATE_KEYS = ("temporal_boundary", "backtest_start", "backtest_end")
CHOICES = {
    "tie_rule": ("neutral", "first-match"),
    "align_mode": ("next", "same-month"),
    "short_convention": ("per-signal", "per-position"),
}
PANEL_IDS = ("A1", "B1", "A2", "B2", "C")
# Not part of the config hash: they do not change any output value.
UNHASHED_KEYS = ("output_dir", "timestamp")


class ConfigError(InputError):
    """
    Invalid or inconsistent configuration.
    """


@dataclass(frozen=True)
class RunConfig:
    corpora: dict[str, Path] = field(default_factory=dict)
    raw_text_dir: Optional[Path] = None
    labels: Optional[Path] = None
    lexicon: Optional[Path] = None
    seeds: tuple[int, ...] = DEFAULT_SEEDS
    tie_rule: str = "neutral"
    apply_negation: bool = True
    align_mode: str = "next"
    validity_panels: Optional[tuple[str, ...]] = None
    short_convention: str = "per-signal"
    temporal_boundary: Optional[datetime.date] = None
    cpi: Optional[Path] = None
    ppi: Optional[Path] = None
    treasury: Optional[Path] = None
    prices: Optional[Path] = None
    backtest_start: Optional[datetime.date] = None
    backtest_end: Optional[datetime.date] = None
    maturities: tuple[str, ...] = DEFAULT_MATURITIES
    title_filter: bool = True
    use_split: bool = False
    output_dir: Path = Path(DEFAULT_OUTPUT_DIR)
    timestamp: bool = False
    sign_key: Optional[str] = None
    stddev_ddof: int = 0
    max_yield_lag_days: int = 5

    @classmethod
    def keys(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any], base_dir: Optional[Path] = None) -> "RunConfig":
        unknown = set(data) - set(cls.keys())
        if unknown:
            raise ConfigError("Unknown config keys: %s" % ", ".join(sorted(unknown)))
        base_dir = base_dir or Path.cwd()
        values = {}
        for key, value in data.items():
            values[key] = _convert(key, value, base_dir)
        config = cls(**values)
        config.validate()
        return config

    def validate(self):
        for key in PATH_KEYS:
            p = getattr(self, key)
            if p is not None and not p.exists():
                raise ConfigError("Config %s: path does not exist: %s" % (key, p))
        for kind, p in self.corpora.items():
            if not p.exists():
                raise ConfigError("Config corpora.%s: path does not exist: %s" % (kind, p))
        if not self.seeds:
            raise ConfigError("Config seeds: at least one seed is required")
        if self.stddev_ddof < 0 or self.max_yield_lag_days < 0:
            raise ConfigError("Config stddev_ddof and max_yield_lag_days must not be negative")
        if self.backtest_start and self.backtest_end and self.backtest_start > self.backtest_end:
            raise ConfigError("Config backtest_start %s is after backtest_end %s"
                              % (self.backtest_start, self.backtest_end))

    def require(self, key: str, command: str):
        """Raises ConfigError unless the setting a command depends on is present."""
        value = getattr(self, key)
        if value is None or value == {}:
            raise ConfigError("Command '%s' needs config '%s'" % (command, key))
        return value

    def to_dict(self) -> dict:
        d = {}
        for key in self.keys():
            value = getattr(self, key)
            if isinstance(value, Path):
                value = value.as_posix()
            elif isinstance(value, datetime.date):
                value = value.isoformat()
            elif isinstance(value, tuple):
                value = list(value)
            elif isinstance(value, dict):
                value = {k: v.as_posix() for k, v in sorted(value.items())}
            d[key] = value
        return d

    @property
    def digest(self) -> str:
        d = self.to_dict()
        for key in UNHASHED_KEYS:
            d.pop(key)
        return canonical_hash(d)


def _path(key: str, value: Any, base_dir: Path) -> Optional[Path]:
    if value in (None, ""):
        return None
    if not isinstance(value, (str, Path)):
        raise ConfigError("Config %s: expected a path, got %r" % (key, value))
    p = Path(value).expanduser()
    return p if p.is_absolute() else base_dir / p


def _date(key: str, value: Any) -> Optional[datetime.date]:
    if value in (None, ""):
        return None
    if isinstance(value, datetime.date):
        return value
    try:
        return datetime.date.fromisoformat(str(value))
    except ValueError:
        raise ConfigError("Config %s: expected YYYY-MM-DD, got %r" % (key, value)) from None


def _str_list(key: str, value: Any) -> tuple[str, ...]:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    if not isinstance(value, (list, tuple)):
        raise ConfigError("Config %s: expected a list, got %r" % (key, value))
    return tuple(str(v).strip() for v in value)


def _int(key: str, value: Any) -> int:
    if isinstance(value, bool):
        raise ConfigError("Config %s: expected an integer, got %r" % (key, value))
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ConfigError("Config %s: expected an integer, got %r" % (key, value)) from None


def _convert(key: str, value: Any, base_dir: Path) -> Any:
    if key in PATH_KEYS:
        return _path(key, value, base_dir)
    if key in DATE_KEYS:
        return _date(key, value)
    if key in CHOICES:
        if value not in CHOICES[key]:
            raise ConfigError("Config %s: %r is not one of %s" % (key, value, ", ".join(CHOICES[key])))
        return value
    if key == "corpora":
        if not isinstance(value, Mapping):
            raise ConfigError("Config corpora: expected an object mapping document kind to a sentence CSV")
        return {str(k): _path(f"corpora.{k}", v, base_dir) for k, v in value.items()}
    if key == "output_dir":
        return _path(key, value, base_dir) or Path(DEFAULT_OUTPUT_DIR)
    if key == "seeds":
        return tuple(_int(key, v) for v in _str_list(key, value))
    if key == "validity_panels":
        panels = tuple(p.upper() for p in _str_list(key, value))
        bad = [p for p in panels if p not in PANEL_IDS]
        if bad:
            raise ConfigError("Config validity_panels: unknown panel(s) %s" % ", ".join(bad))
        return panels
    if key == "maturities":
        return _str_list(key, value)
    if key in ("title_filter", "use_split", "timestamp", "apply_negation"):
        return value if isinstance(value, bool) else not is_falsey(value)
    if key in ("stddev_ddof", "max_yield_lag_days"):
        return _int(key, value)
    if key == "sign_key":
        return str(value) if value else None
    return value


def _setting_value(raw: Optional[str]) -> Any:
    """--set values are JSON where they parse as JSON, plain strings otherwise."""
    if raw is None:
        return True
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def read_config_file(path: Union[str, Path]) -> dict:
    path = Path(path)
    try:
        with path.open("rt", encoding="utf8") as fp:
            data = json.load(fp)
    except FileNotFoundError:
        raise ConfigError("Config file does not exist: %s" % path) from None
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError("Cannot read config file %s: %s" % (path, e)) from e
    if not isinstance(data, Mapping):
        raise ConfigError("Config file %s must hold a JSON object" % path)
    return dict(data)


def load_config(path: Optional[Union[str, Path]] = None, flags: Optional[Mapping[str, Any]] = None,
                settings: Optional[Mapping[str, Optional[str]]] = None,
                env: Optional[Mapping[str, str]] = None) -> RunConfig:
    """
    Builds the effective RunConfig. flags are already typed values from the command line (None means not
    given), settings the raw --set pairs.
    """
    env = startup_environment if env is None else env
    data: dict[str, Any] = {}
    base_dir = Path.cwd()
    if path is not None:
        data = read_config_file(path)
        base_dir = Path(path).resolve().parent

    # Values added below are relative to the working directory, not the config file.
    cwd_data = {}
    if env.get("OUTPUT_DIR"):
        cwd_data["output_dir"] = env["OUTPUT_DIR"]
    for key, value in (flags or {}).items():
        if value is not None:
            cwd_data[key] = value
    for key, raw in (settings or {}).items():
        cwd_data[key] = _setting_value(raw)

    file_part = {k: v for k, v in data.items() if k not in cwd_data}
    unknown = (set(file_part) | set(cwd_data)) - set(RunConfig.keys())
    if unknown:
        raise ConfigError("Unknown config keys: %s" % ", ".join(sorted(unknown)))

    values = {k: _convert(k, v, base_dir) for k, v in file_part.items()}
    values.update({k: _convert(k, v, Path.cwd()) for k, v in cwd_data.items()})

    if values.get("timestamp") and not is_falsey(env.get("NO_TIMESTAMP")):
        mlogger.info("HD_NO_TIMESTAMP set, timestamps disabled")
        values["timestamp"] = False

    config = RunConfig(**values)
    config.validate()
    mlogger.debug("Effective config %s: %s", config.digest[:12], config.to_dict())
    return config


if __name__ == "__main__":
    print(json.dumps(RunConfig().to_dict(), indent=2))
