# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""Run configuration and persisted settings."""

import json
import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Optional

from rich.console import Console

from .error_handling import ConfigurationError

console = Console(stderr=True)

HOME_ENV = "FANO_CONGRUENCE_HOME"
THREADS_ENV = "FANO_CONGRUENCE_THREADS"

_TOLERANCES = (
    "rank_tol",
    "dedup_radius",
    "root_cluster",
    "membership_tol",
    "newton_tol",
    "convergence_floor",
)
_COUNTS = ("starts", "max_newton_iterations", "slices", "seeds", "threads")


@dataclass(frozen=True)
class RunConfig:
    """Numeric knobs shared by every pipeline."""

    seed: int = 0
    starts: int = 4000
    rank_tol: float = 1e-9
    dedup_radius: float = 1e-6
    root_cluster: float = 1e-6
    membership_tol: float = 1e-8
    newton_tol: float = 1e-12
    max_newton_iterations: int = 60
    convergence_floor: float = 0.01
    slices: int = 3
    seeds: int = 3
    threads: int = 1
    strict_cusp: bool = False

    def validate(self) -> "RunConfig":
        """Reject non-positive tolerances and counts."""
        for name in _TOLERANCES:
            value = getattr(self, name)
            if not value > 0:
                raise ConfigurationError(f"{name} must be positive, got {value}")
        for name in _COUNTS:
            value = getattr(self, name)
            if int(value) < 1:
                raise ConfigurationError(f"{name} must be at least 1, got {value}")
        return self

    def with_overrides(self, **overrides: Any) -> "RunConfig":
        """Return a copy with the non-None overrides applied."""
        known = {f.name for f in fields(self)}
        changes = {}
        for key, value in overrides.items():
            if value is None:
                continue
            if key not in known:
                raise ConfigurationError(f"Unknown configuration key: {key}")
            changes[key] = value
        return replace(self, **changes).validate()

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _coerce(key: str, raw: Any) -> Any:
    """Coerce a raw setting to the field type of RunConfig."""
    field_types = {f.name: f.type for f in fields(RunConfig)}
    if key not in field_types:
        raise ConfigurationError(f"Unknown configuration key: {key}")
    kind = field_types[key]
    try:
        if kind in (bool, "bool"):
            if isinstance(raw, str):
                return raw.strip().lower() in ("1", "true", "yes", "on")
            return bool(raw)
        if kind in (int, "int"):
            return int(raw)
        return float(raw)
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"Invalid value for {key}: {raw!r}") from e


class ConfigManager:
    """Manage persisted configuration for fano-congruence runs."""

    def __init__(self, config_dir: Optional[Path] = None):
        """Initialize configuration manager."""
        if config_dir is None:
            home = os.environ.get(HOME_ENV)
            config_dir = Path(home) if home else Path.home() / ".fano-congruence"
        self.config_dir = config_dir
        self.config_file = self.config_dir / "config.json"

    def load_config(self) -> Dict[str, Any]:
        """Load configuration overrides from file."""
        if self.config_file.exists():
            try:
                with open(self.config_file, "r") as f:
                    result: Dict[str, Any] = json.load(f)
                    return result
            except (OSError, json.JSONDecodeError) as e:
                console.print(f"[yellow]Could not load config: {e}[/yellow]")

        return {}

    def save_config(self, config: Dict[str, Any]) -> None:
        """Save configuration overrides to file."""
        for key, value in config.items():
            _coerce(key, value)
        self.config_dir.mkdir(parents=True, exist_ok=True)
        with open(self.config_file, "w") as f:
            json.dump(config, f, indent=2, sort_keys=True)
        console.print("[green]✓ Configuration saved[/green]")

    def set_value(self, key: str, raw: str) -> None:
        """Persist a single key=value override."""
        config = self.load_config()
        config[key] = _coerce(key, raw)
        RunConfig().with_overrides(**config)
        self.save_config(config)

    def reset(self) -> None:
        """Remove all persisted overrides."""
        if self.config_file.exists():
            self.config_file.unlink()
        console.print("[green]✓ Configuration reset to defaults[/green]")

    def run_config(self, **overrides: Any) -> RunConfig:
        """Resolve defaults, file, environment and explicit overrides."""
        stored = {key: _coerce(key, value) for key, value in self.load_config().items()}
        env_threads = os.environ.get(THREADS_ENV)
        if env_threads:
            stored["threads"] = _coerce("threads", env_threads)
        return RunConfig().with_overrides(**stored).with_overrides(**overrides)
