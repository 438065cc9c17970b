from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

OUTPUT_DIR_ENV = "MAGIC_SELFTEST_OUTPUT_DIR"


@dataclass(frozen=True, slots=True)
class Settings:
    log_level: str
    output_dir: Path

    @classmethod
    def from_env(cls) -> Settings:
        return cls(
            log_level=os.getenv("LOG_LEVEL", "info"),
            output_dir=default_output_dir(),
        )


def default_output_dir() -> Path:
    value = os.getenv(OUTPUT_DIR_ENV)
    return Path(value) if value else Path.cwd()
