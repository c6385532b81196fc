"""Numeric settings and config-file helpers."""

from __future__ import annotations

import json
import shutil
import tempfile

from collections.abc import Callable, Mapping
from dataclasses import asdict, dataclass, fields
from functools import lru_cache
from pathlib import Path
from typing import Any

import yaml

from group_kstab.errors import ValidationError

__all__ = [
    "CONFIG_PARSE_ERRORS",
    "ProblemValidationError",
    "Settings",
    "dump_config_file",
    "get_user_config_path",
    "load_config_file",
    "write_file_atomic",
]

_CONFIG_FILE_NAME = ".group-kstab.yaml"


class ProblemValidationError(ValidationError):
    """Raised for malformed problem files and unknown settings keys."""

    module = "cli"


def get_user_config_path() -> Path:
    """Get the user settings path (~/.group-kstab.yaml)."""
    return Path.home() / _CONFIG_FILE_NAME


CONFIG_PARSE_ERRORS = (
    json.JSONDecodeError,
    yaml.YAMLError,
    OSError,
    ValueError,
)


def load_config_file(path: Path, config_format: str | None = None) -> dict[str, Any]:
    """Load a JSON or YAML file; the format defaults to the file suffix.

    Raises:
        ValueError: If the format is unsupported or the top level is not a mapping
        OSError, json.JSONDecodeError, yaml.YAMLError: on read or parse errors
    """
    config_format = config_format or _format_of(path)
    with open(path) as f:
        if config_format == "json":
            result = json.load(f)
        elif config_format == "yaml":
            result = yaml.safe_load(f) or {}
        else:
            raise ValueError(f"Unsupported config format: {config_format}")
    if not isinstance(result, dict):
        raise ValueError(f"{path} does not contain a mapping")
    return result


def _format_of(path: Path) -> str:
    return "yaml" if path.suffix in (".yaml", ".yml") else "json"


def write_file_atomic(path: Path, write_fn: Callable[[Any], None]) -> None:
    """Write a file atomically via tempfile + rename."""
    fd, temp_path = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with open(fd, "w") as f:
            write_fn(f)
        if path.exists():
            shutil.copymode(path, temp_path)
        shutil.move(temp_path, path)
    except Exception:
        Path(temp_path).unlink(missing_ok=True)
        raise


def dump_config_file(
    path: Path, data: Mapping[str, Any], config_format: str | None = None
) -> None:
    """Write JSON or YAML deterministically (sorted keys, trailing newline)."""
    config_format = config_format or _format_of(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if config_format == "json":

        def write_json(f: Any) -> None:
            json.dump(data, f, indent=2, sort_keys=True, ensure_ascii=False)
            f.write("\n")

        write_file_atomic(path, write_json)
    elif config_format == "yaml":
        write_file_atomic(
            path,
            lambda f: yaml.safe_dump(
                dict(data), f, default_flow_style=False, sort_keys=True
            ),
        )
    else:
        raise ValueError(f"Unsupported config format: {config_format}")


@dataclass(frozen=True)
class Settings:
    """Numeric defaults for every analysis stage.

    Merge order (lowest to highest priority):
    1. Built-in defaults below
    2. ~/.group-kstab.yaml
    3. The ``options`` block of the problem file
    4. Explicit CLI flags
    """

    quad_order: int = 8
    soliton_tol: float = 1e-12
    newton_max_iter: int = 60
    weyl_group_cap: int = 10**6
    wall_margin: float = 1e-6
    chamber_violation_bound: float = 0.01
    facet_grading: int = 3
    threads: int = 1
    minimize_degree: int = 2
    minimize_tol: float = 1e-6
    minimize_max_iter: int = 40
    barrier_weight: float = 1e-3

    @classmethod
    def load(cls) -> Settings:
        """Defaults merged with ~/.group-kstab.yaml, cached per process."""
        return cls._load_cached()

    @classmethod
    @lru_cache(maxsize=1)
    def _load_cached(cls) -> Settings:
        path = get_user_config_path()
        if not path.exists():
            return cls()
        try:
            data = load_config_file(path, "yaml")
        except CONFIG_PARSE_ERRORS as e:
            raise ProblemValidationError(f"Cannot read {path}: {e}") from e
        return cls().merged(data, source=str(path))

    def merged(self, overrides: Mapping[str, Any], source: str = "options") -> Settings:
        """A copy with ``overrides`` applied; None values are ignored.

        Raises:
            ProblemValidationError: For unknown keys or values of the wrong type
        """
        known = {f.name: f for f in fields(self)}
        unknown = sorted(set(overrides) - set(known))
        if unknown:
            raise ProblemValidationError(
                f"Unknown settings in {source}: {', '.join(unknown)}",
                keys=unknown,
            )
        cleaned = {k: v for k, v in overrides.items() if v is not None}
        values = {**asdict(self), **cleaned}
        for name, value in cleaned.items():
            default = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ProblemValidationError(
                    f"Setting {name!r} in {source} must be a number", key=name
                )
            if isinstance(default, int) and not isinstance(value, int):
                raise ProblemValidationError(
                    f"Setting {name!r} in {source} must be an integer", key=name
                )
            if value <= 0:
                raise ProblemValidationError(
                    f"Setting {name!r} in {source} must be positive", key=name
                )
            values[name] = type(default)(value)
        return Settings(**values)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)
