"""Run defaults, overridable from the environment and then from the CLI."""
import os
from dataclasses import dataclass, fields, replace

from biquant.errors import ConfigError

ENV_PREFIX = "BIQUANT_"


@dataclass(frozen=True)
class Settings:
    samples: int = 8
    seed: int = 0
    box: int = 20
    workers: int = 1
    log_level: str = "WARNING"

    @classmethod
    def from_env(cls, environ=None):
        """
        Build settings from ``BIQUANT_*`` variables

        Args:
            environ: Mapping to read instead of ``os.environ``

        Returns:
            Settings with every variable present applied over the defaults
        """
        environ = os.environ if environ is None else environ
        overrides = {}
        for field in fields(cls):
            raw = environ.get(ENV_PREFIX + field.name.upper())
            if raw is None:
                continue
            if field.type in (int, "int"):
                try:
                    overrides[field.name] = int(raw)
                except ValueError:
                    raise ConfigError(f"{ENV_PREFIX}{field.name.upper()} must be an integer, got {raw!r}")
            else:
                overrides[field.name] = raw
        return cls().updated(**overrides)

    def updated(self, **changes):
        """Return a copy with the given non-None values replaced and validated"""
        changes = {k: v for k, v in changes.items() if v is not None}
        result = replace(self, **changes)
        if result.samples < 1:
            raise ConfigError("samples must be at least 1")
        if result.box < 1:
            raise ConfigError("box must be at least 1")
        if result.workers < 1:
            raise ConfigError("workers must be at least 1")
        if result.log_level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ConfigError(f"unknown log level {result.log_level!r}")
        return result
