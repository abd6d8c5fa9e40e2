"""INI-style run configuration.

Example::

    [run]
    seed = 7
    workers = 4

    [saliency]
    radii = 1, 2, 4, 8, 16
    threshold_fraction = 0.5

    [augment]
    placement = random
    part = both
    n_ops = 2
    magnitude = 15

    [embedding]
    kind = saliency
    bins = 16

    [metrics]
    alpha = 0.5
    beta = 0.5

Command-line flags override file values; ``FAIRLENS_SEED`` is consulted when
neither provides a seed.
"""
from __future__ import annotations

import configparser
import os
from typing import Any, Callable, Optional

from fairlens.errors import ConfigError

KNOWN = {
    "run": {"seed", "workers"},
    "saliency": {"radii", "threshold_fraction"},
    "augment": {"placement", "part", "n_ops", "magnitude"},
    "embedding": {"kind", "bins"},
    "metrics": {"alpha", "beta"},
}

SEED_ENV = "FAIRLENS_SEED"


def parse_radii(text: str) -> tuple:
    try:
        radii = tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError:
        raise ConfigError(f"radii must be comma-separated integers, got {text!r}") from None
    if not radii:
        raise ConfigError("radii must not be empty")
    return radii


class RunConfig:
    def __init__(self, sections: Optional[dict] = None):
        self.sections = sections or {}

    @classmethod
    def load(cls, path) -> "RunConfig":
        parser = configparser.ConfigParser()
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"bad config {path}: {exc}") from exc
        sections = {}
        for name in parser.sections():
            if name not in KNOWN:
                raise ConfigError(f"{path}: unknown section [{name}]")
            unknown = set(parser[name]) - KNOWN[name]
            if unknown:
                raise ConfigError(f"{path}: unknown keys in [{name}]: {sorted(unknown)}")
            sections[name] = dict(parser[name])
        return cls(sections)

    def get(self, flag_value: Any, section: str, key: str, convert: Callable, default: Any):
        """Flag value if given, else the file value, else ``default``."""
        if flag_value is not None:
            return flag_value
        raw = self.sections.get(section, {}).get(key)
        if raw is None:
            return default
        try:
            return convert(raw)
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"[{section}] {key}: {exc}") from None

    def seed(self, flag_value: Optional[int], required: bool = True) -> Optional[int]:
        seed = self.get(flag_value, "run", "seed", int, None)
        if seed is None and os.environ.get(SEED_ENV):
            try:
                seed = int(os.environ[SEED_ENV])
            except ValueError:
                raise ConfigError(f"{SEED_ENV} must be an integer") from None
        if seed is None and required:
            raise ConfigError(f"a master seed is required (--seed, [run] seed or {SEED_ENV})")
        return seed
