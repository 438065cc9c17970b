from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import Any, TypeVar

import orjson
import yaml
from pydantic import BaseModel, ValidationError

from magic_selftest.config.schema import DeviceDescriptor, RunConfig

ModelT = TypeVar("ModelT", bound=BaseModel)


@dataclass(frozen=True, slots=True)
class ConfigLoadError(Exception):
    message: str

    def __str__(self) -> str:  # pragma: no cover
        return self.message


def load_config(path: str | Path) -> RunConfig:
    config_path = Path(path)
    data = _read_document(config_path)
    return validate_config(data, source=str(config_path))


def load_device_descriptor(path: str | Path) -> DeviceDescriptor:
    descriptor_path = Path(path)
    data = _read_document(descriptor_path)
    return _validate(DeviceDescriptor, data, source=str(descriptor_path))


def validate_config(data: Any, *, source: str = "<memory>") -> RunConfig:
    return _validate(RunConfig, data, source=source)


def merge_run_config(file_config: RunConfig | None, overrides: Mapping[str, Any]) -> RunConfig:
    """Apply command-line overrides on top of a file config (or the defaults).

    Keys may be dotted (``noise.theta``); ``None`` values mean "flag not given".
    """
    data: dict[str, Any] = (
        file_config.model_dump(exclude_unset=True) if file_config is not None else {}
    )
    for key, value in overrides.items():
        if value is None:
            continue
        target = data
        *parents, leaf = key.split(".")
        for part in parents:
            target = target.setdefault(part, {})
        target[leaf] = value
    return validate_config(data, source="<flags>")


def _validate(model: type[ModelT], data: Any, *, source: str) -> ModelT:
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise ConfigLoadError(format_validation_error(exc, source=source)) from exc


def _read_document(path: Path) -> Any:
    if not path.exists():
        raise ConfigLoadError(f"Config file not found: {path}")
    raw_text = path.read_text(encoding="utf-8")
    return _parse_config_text(raw_text, path)


def _parse_config_text(raw_text: str, path: Path) -> Any:
    suffix = path.suffix.lower()

    if suffix in {".yml", ".yaml"}:
        try:
            parsed = yaml.safe_load(raw_text)
        except yaml.YAMLError as exc:
            raise ConfigLoadError(f"YAML parse error in {path}: {exc}") from exc
        if parsed is None:
            raise ConfigLoadError(f"Empty YAML document: {path}")
        return parsed

    if suffix == ".json":
        try:
            return orjson.loads(raw_text)
        except orjson.JSONDecodeError as exc:
            raise ConfigLoadError(f"JSON parse error in {path}: {exc}") from exc

    raise ConfigLoadError(f"Unsupported config format '{path.suffix}'. Use .yml/.yaml or .json.")


def format_validation_error(error: ValidationError, *, source: str) -> str:
    lines: list[str] = [f"Config validation failed: {source}"]
    for item in error.errors():
        location = ".".join(str(part) for part in item.get("loc", ()))
        message = item.get("msg", "invalid value")
        error_type = item.get("type", "validation_error")
        lines.append(f" - {location}: {message} ({error_type})")
    return "\n".join(lines)
