"""Run configuration: defaults, flat key-value files, and overrides."""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .classifier import DEFAULT_BETA, GLOBAL, LOCAL
from .errors import PhonoseqError
from .extraction import ExtractionConfig
from .model import DEFAULT_EPSILON


class ConfigError(PhonoseqError, ValueError):
    pass


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _bool(text):
    t = text.strip().lower()
    if t in _TRUE:
        return True
    if t in _FALSE:
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


@dataclass(frozen=True)
class RunConfig:
    alpha: float = 4.0
    max_p: int = 3
    min_count_per_speaker: float = 50.0
    sentences_per_speaker: int = 100
    max_sequences_per_language: int = 30
    overlap: bool = True
    beta: float = DEFAULT_BETA
    epsilon: float = DEFAULT_EPSILON
    mode: str = GLOBAL
    include_prior: bool = True
    seed: int = 1

    def __post_init__(self):
        if self.mode not in (GLOBAL, LOCAL, "both"):
            raise ConfigError(f"mode must be global, local or both, got {self.mode!r}")
        if self.beta < 1:
            raise ConfigError(f"beta must be >= 1, got {self.beta}")
        if self.epsilon < 0:
            raise ConfigError(f"epsilon must be >= 0, got {self.epsilon}")
        try:
            self.extraction()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def extraction(self) -> ExtractionConfig:
        return ExtractionConfig(
            alpha=self.alpha,
            max_p=self.max_p,
            min_count_per_speaker=self.min_count_per_speaker,
            sentences_per_speaker=self.sentences_per_speaker,
            max_sequences_per_language=self.max_sequences_per_language,
            overlap=self.overlap,
        )

    def updated(self, **values) -> "RunConfig":
        values = {k: v for k, v in values.items() if v is not None}
        return replace(self, **values)


_TYPES = {f.name: f.type for f in fields(RunConfig)}
_CASTS = {"float": float, "int": int, "bool": _bool, "str": str}


def coerce(key: str, text: str):
    key = key.strip().replace("-", "_")
    if key not in _TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    try:
        return key, _CASTS[_TYPES[key]](text.strip())
    except ValueError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def parse_config(text: str, base: RunConfig | None = None) -> RunConfig:
    """``key = value`` lines, ``#`` comments. Keys may use ``-`` or ``_``."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        k, v = line.split("=", 1)
        k, v = coerce(k, v)
        values[k] = v
    return (base or RunConfig()).updated(**values)


def load_config(path, base: RunConfig | None = None) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read(), base)
