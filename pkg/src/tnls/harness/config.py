"""Flat key=value experiment configuration.

The on-disk format is UTF-8 text, one ``key = value`` pair per line,
``#`` starting a comment, blank lines ignored.  Lists are comma
separated.  Values stay strings until a typed getter is called, so a
config can carry keys its experiment does not use.
"""

import os
from typing import Optional

__all__ = ["ConfigError", "ExperimentConfig", "parse_overrides"]

_REQUIRED = object()


class ConfigError(ValueError):
    """A missing file, malformed line, or value outside its contract."""


def _parse_text(text: str, source: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"{source}:{lineno}: empty key")
        values[key] = val.strip()
    return values


class ExperimentConfig:
    """Typed access to a flat string-to-string mapping."""

    def __init__(self, values: Optional[dict] = None, source: str = "<memory>"):
        self.values: dict = dict(values or {})
        self.source = source

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        if not os.path.isfile(path):
            raise ConfigError(f"config file not found: {path}")
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        return cls(_parse_text(text, str(path)), source=str(path))

    @classmethod
    def from_text(cls, text: str, source: str = "<text>") -> "ExperimentConfig":
        return cls(_parse_text(text, source), source=source)

    def apply_overrides(self, pairs) -> None:
        """Apply ``key=value`` strings on top of the file values."""
        for pair in pairs:
            if "=" not in pair:
                raise ConfigError(f"override must look like key=value, got {pair!r}")
            key, _, val = pair.partition("=")
            if not key.strip():
                raise ConfigError(f"override with empty key: {pair!r}")
            self.values[key.strip()] = val.strip()

    def echo(self) -> dict:
        """The full mapping, sorted, as stored (all strings)."""
        return {k: self.values[k] for k in sorted(self.values)}

    # typed getters ----------------------------------------------------

    def _raw(self, key: str, default):
        if key in self.values:
            return self.values[key]
        if default is _REQUIRED:
            raise ConfigError(f"{self.source}: missing required key {key!r}")
        return None

    def get_str(self, key: str, default=_REQUIRED) -> str:
        raw = self._raw(key, default)
        return default if raw is None else raw  # type: ignore[return-value]

    def get_int(self, key: str, default=_REQUIRED) -> int:
        raw = self._raw(key, default)
        if raw is None:
            return default  # type: ignore[return-value]
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{self.source}: key {key!r} is not an integer: {raw!r}")

    def get_float(self, key: str, default=_REQUIRED) -> float:
        raw = self._raw(key, default)
        if raw is None:
            return default  # type: ignore[return-value]
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"{self.source}: key {key!r} is not a number: {raw!r}")

    def get_bool(self, key: str, default=_REQUIRED) -> bool:
        raw = self._raw(key, default)
        if raw is None:
            return default  # type: ignore[return-value]
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{self.source}: key {key!r} is not a boolean: {raw!r}")

    def _split(self, key: str, default):
        raw = self._raw(key, default)
        if raw is None:
            return None
        if raw == "":
            return []
        return [part.strip() for part in raw.split(",")]

    def get_int_list(self, key: str, default=_REQUIRED) -> list:
        parts = self._split(key, default)
        if parts is None:
            return list(default)  # type: ignore[arg-type]
        try:
            return [int(p) for p in parts]
        except ValueError:
            raise ConfigError(f"{self.source}: key {key!r} is not an integer list")

    def get_float_list(self, key: str, default=_REQUIRED) -> list:
        parts = self._split(key, default)
        if parts is None:
            return list(default)  # type: ignore[arg-type]
        try:
            return [float(p) for p in parts]
        except ValueError:
            raise ConfigError(f"{self.source}: key {key!r} is not a number list")

    def get_str_list(self, key: str, default=_REQUIRED) -> list:
        parts = self._split(key, default)
        if parts is None:
            return list(default)  # type: ignore[arg-type]
        return parts

    def require_seed(self) -> int:
        """The u64 PRNG seed, mandatory whenever an experiment draws
        random data."""
        seed = self.get_int("seed")
        if not 0 <= seed < 2**64:
            raise ConfigError(f"{self.source}: seed must be a u64, got {seed}")
        return seed


def parse_overrides(pairs) -> dict:
    """Validate a list of key=value strings into a dict (order kept)."""
    cfg = ExperimentConfig()
    cfg.apply_overrides(pairs)
    return cfg.values
