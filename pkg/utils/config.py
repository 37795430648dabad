# utils/config.py
import os
from dataclasses import dataclass, replace
from fractions import Fraction

from dotenv import load_dotenv

from utils.errors import ConfigError

# 1. Setup
load_dotenv()

OUTPUT_FORMATS = ("json", "csv", "human")


def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError as err:
        raise ConfigError(f"{name} must be an integer, got {raw!r}") from err


@dataclass(frozen=True)
class Config:
    """Budgets and output settings; every budget must be positive."""

    prec_start: int = 64
    prec_max: int = 4096
    max_iters: int = 1_000_000
    max_level: int = 12
    memory_points: int = 200_000
    grid_points: int = 4096
    denom_cap: int = 1 << 20
    output_format: str = "json"
    seed: int = 0
    workers: int = 4
    delta: Fraction = Fraction(1, 16)
    shift_epsilon: Fraction = Fraction(1, 16)

    def __post_init__(self):
        for name in ("prec_start", "prec_max", "max_iters", "max_level",
                     "memory_points", "grid_points", "denom_cap", "workers"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if self.prec_start > self.prec_max:
            raise ConfigError("prec_start exceeds prec_max")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigError(f"output format must be one of {OUTPUT_FORMATS}")
        if not (0 < self.delta < 1) or self.shift_epsilon <= 0:
            raise ConfigError("delta must lie in (0, 1) and epsilon must be positive")

    def precisions(self):
        """The precision ladder: start, doubled until the cap."""
        bits = self.prec_start
        while bits <= self.prec_max:
            yield bits
            bits *= 2

    def with_overrides(self, **overrides) -> "Config":
        clean = {k: v for k, v in overrides.items() if v is not None}
        return replace(self, **clean)


def load_config() -> Config:
    return Config(
        prec_start=_env_int("PERIODIC_PREC_START", 64),
        prec_max=_env_int("PERIODIC_PREC_MAX", 4096),
        max_iters=_env_int("PERIODIC_MAX_ITERS", 1_000_000),
        max_level=_env_int("PERIODIC_MAX_LEVEL", 12),
        memory_points=_env_int("PERIODIC_MEMORY_POINTS", 200_000),
        grid_points=_env_int("PERIODIC_GRID_POINTS", 4096),
        output_format=os.getenv("PERIODIC_FORMAT", "json").strip().lower(),
        seed=_env_int("PERIODIC_SEED", 0),
        workers=_env_int("PERIODIC_WORKERS", 4),
    )


DEFAULT_CONFIG = Config()
