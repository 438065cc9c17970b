from __future__ import annotations

from magic_selftest.config.loader import (
    ConfigLoadError,
    format_validation_error,
    load_config,
    load_device_descriptor,
    merge_run_config,
    validate_config,
)
from magic_selftest.config.schema import (
    DeviceDescriptor,
    MixConfig,
    NoiseConfig,
    OutputConfig,
    RunConfig,
    WireConfig,
)
from magic_selftest.config.settings import OUTPUT_DIR_ENV, Settings, default_output_dir

__all__ = [
    "OUTPUT_DIR_ENV",
    "ConfigLoadError",
    "DeviceDescriptor",
    "MixConfig",
    "NoiseConfig",
    "OutputConfig",
    "RunConfig",
    "Settings",
    "WireConfig",
    "default_output_dir",
    "format_validation_error",
    "load_config",
    "load_device_descriptor",
    "merge_run_config",
    "validate_config",
]
