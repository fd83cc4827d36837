"""Session configuration files.

A config file is INI-style with up to three sections, each holding fields of
the matching dataclass::

    [memory]
    fast_bandwidth_bytes_per_s = 51.2e9
    per_migration_delay_ns = 300

    [scheduler]
    kind = predictive

    [policy]
    patience = 2

Unknown sections or keys are rejected by name.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace

from hmtune.errors import InvalidParameterError, ParseError
from hmtune.memsim import HybridMemoryConfig
from hmtune.scheduler import SchedulerSpec
from hmtune.tuner import StoppingPolicy

_SECTIONS = {
    "memory": HybridMemoryConfig,
    "scheduler": SchedulerSpec,
    "policy": StoppingPolicy,
}


@dataclass(frozen=True)
class SessionConfig:
    memory: HybridMemoryConfig = field(default_factory=HybridMemoryConfig)
    scheduler: SchedulerSpec = field(default_factory=SchedulerSpec)
    policy: StoppingPolicy = field(default_factory=StoppingPolicy)


def _coerce(cls, key: str, text: str):
    """Turn a config string into the type of ``cls.key``'s default."""
    default = next(f for f in fields(cls) if f.name == key).default
    text = text.strip()
    if text.lower() in ("none", ""):
        return None
    if isinstance(default, str):  # str-valued enums
        return text
    if isinstance(default, int) and not isinstance(default, bool) or key in ("max_trials", "patience"):
        try:
            return int(text)
        except ValueError:
            raise InvalidParameterError(f"{key}: expected an integer, got {text!r}") from None
    try:
        return float(text)
    except ValueError:
        raise InvalidParameterError(f"{key}: expected a number, got {text!r}") from None


def parse_overrides(cls, items, base=None):
    """Apply ``(key, value)`` string pairs on top of ``base`` (or the defaults)."""
    known = {f.name for f in fields(cls)}
    values = {}
    for key, text in items:
        key = key.strip().replace("-", "_")
        if key not in known:
            raise InvalidParameterError(f"unknown config key {key!r} for {cls.__name__}; "
                                        f"known keys: {', '.join(sorted(known))}")
        values[key] = _coerce(cls, key, text)
    return replace(base if base is not None else cls(), **values)


def load_config(path) -> SessionConfig:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ParseError(str(exc).splitlines()[0], None, path) from None
    parts = {}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise InvalidParameterError(f"unknown config section [{section}]; "
                                        f"expected one of {sorted(_SECTIONS)}")
        parts[section] = parse_overrides(_SECTIONS[section], parser.items(section))
    return SessionConfig(**parts)
