from __future__ import annotations

from pathlib import Path

import pytest

from magic_selftest.config import OUTPUT_DIR_ENV


@pytest.fixture
def output_dir(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> Path:
    """Default output directory for commands run without --out-dir."""
    target = tmp_path / "runs"
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(target))
    return target
