"""Flat ``name = value`` configuration files.

One assignment per line. ``#`` starts a comment, blank lines are skipped,
and dashes in names are read as underscores so a file can use either the
flag spelling or the key spelling. Values stay strings here; the command
line layer converts them with the same parsers it uses for flags.
"""

from __future__ import annotations

from pathlib import Path

__all__ = ["ConfigError", "parse_config", "load_config", "parse_bool", "parse_float_list"]


class ConfigError(ValueError):
    """A malformed config line or an invalid parameter value."""


def _key(name: str) -> str:
    return name.strip().replace("-", "_")


def parse_config(text: str, source: str = "<config>") -> dict:
    """``{name: raw_value}`` from config text; errors carry ``source:line``."""
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'name = value', got {raw.strip()!r}")
        name, value = line.split("=", 1)
        key = _key(name)
        if not key.isidentifier():
            raise ConfigError(f"{source}:{lineno}: invalid parameter name {name.strip()!r}")
        value = value.strip()
        if value == "":
            raise ConfigError(f"{source}:{lineno}: parameter {key!r} has no value")
        if key in out:
            raise ConfigError(f"{source}:{lineno}: parameter {key!r} is set twice")
        out[key] = value
    return out


def load_config(path) -> dict:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {str(p)!r}: {exc.strerror}") from None
    return parse_config(text, str(p))


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def parse_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    low = str(text).strip().lower()
    if low in _TRUE:
        return True
    if low in _FALSE:
        return False
    raise ValueError(f"expected a boolean (true/false), got {text!r}")


def parse_float_list(text) -> tuple:
    """Comma-separated floats, e.g. ``1, 5, 10``."""
    if isinstance(text, (tuple, list)):
        return tuple(float(x) for x in text)
    parts = [s.strip() for s in str(text).split(",") if s.strip()]
    if not parts:
        raise ValueError(f"expected a comma-separated list of numbers, got {text!r}")
    return tuple(float(s) for s in parts)
