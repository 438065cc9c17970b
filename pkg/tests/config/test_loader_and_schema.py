from __future__ import annotations

from pathlib import Path
from typing import Any

import pytest
import yaml

from magic_selftest.config import (
    OUTPUT_DIR_ENV,
    ConfigLoadError,
    MixConfig,
    NoiseConfig,
    RunConfig,
    Settings,
    load_config,
    load_device_descriptor,
    merge_run_config,
    validate_config,
)
from magic_selftest.errors import ContractError
from magic_selftest.quantum import NoiseKind

CONF = Path(__file__).resolve().parents[2] / "conf"


def minimal_valid_config() -> dict[str, Any]:
    return {
        "n": 7,
        "rounds": 500,
        "device": "noisy",
        "seed": 4,
        "noise": {"kind": "y-rotation", "theta": 0.2},
        "mix": {"game": 2.0, "local": 1.0, "pair": 1.0},
    }


def test_validate_config_ok() -> None:
    config = validate_config(minimal_valid_config())
    assert isinstance(config, RunConfig)
    assert config.n == 7
    assert config.noise.to_model().kind is NoiseKind.Y_ROTATION
    assert config.mix.weights(7) == {0: 0.5, 1: 0.25, 2: 0.25}
    assert config.wire.port == 7811


def test_defaults() -> None:
    config = validate_config({})
    assert config.n == 3
    assert config.device == "honest"
    assert config.alpha == 0.01
    assert config.output.transcript == "transcript.jsonl"


def test_rejects_unknown_top_level_keys() -> None:
    data = minimal_valid_config()
    data["address_pools"] = {}
    with pytest.raises(ConfigLoadError) as exc:
        validate_config(data, source="unit")
    text = str(exc.value)
    assert text.startswith("Config validation failed: unit")
    assert "address_pools" in text
    assert "extra_forbidden" in text


@pytest.mark.parametrize("n", [1, 2, 4, 5, 9])
def test_rejects_unsupported_sizes(n: int) -> None:
    with pytest.raises(ConfigLoadError) as exc:
        validate_config({"n": n})
    assert "n must be 3 or n = 3 (mod 4)" in str(exc.value)


@pytest.mark.parametrize(
    ("data", "needle"),
    [
        ({"n": 3, "mix": {"pair": 1.0}}, "need n > 3"),
        ({"n": 15, "device": "honest"}, "dense cap"),
        ({"n": 7, "device": "noisy"}, "needs a noise section"),
        ({"n": 3, "device": "padded"}, "padded needs n > 3"),
        ({"n": 7, "device": "standard-square"}, "n = 3 only"),
        ({"n": 3, "device": "custom"}, "needs a descriptor"),
        ({"noise": {"kind": "y-rotation"}}, "noise.theta is required"),
        ({"noise": {"kind": "per-pair-angles"}}, "must be non-empty"),
        ({"noise": {"kind": "none", "theta": 0.3}}, "takes no angles"),
        ({"alpha": 1.5}, "alpha"),
        ({"rounds": 0}, "rounds"),
    ],
)
def test_rejects_inconsistent_runs(data: dict[str, Any], needle: str) -> None:
    with pytest.raises(ConfigLoadError) as exc:
        validate_config(data)
    assert needle in str(exc.value)


def test_padded_device_is_allowed_beyond_the_dense_cap() -> None:
    config = validate_config({"n": 19, "device": "padded"})
    assert config.n == 19


def test_mix_weights_default_pair_by_size() -> None:
    mix = MixConfig()
    assert mix.weights(3) == {0: 0.5, 1: 0.5}
    weights = mix.weights(7)
    assert set(weights) == {0, 1, 2}
    assert weights[2] == pytest.approx(1 / 3)

    with pytest.raises(ContractError):
        MixConfig(game=0.0, local=0.0, pair=0.0).weights(7)


def test_noise_config_models() -> None:
    assert NoiseConfig().to_model().is_trivial
    per_pair = NoiseConfig(kind="per-pair-angles", angles=[0.1, 0.2]).to_model()
    assert per_pair.kind is NoiseKind.PER_PAIR
    assert per_pair.angles == (0.1, 0.2)


def test_load_shipped_configs() -> None:
    honest = load_config(CONF / "simulate-honest.yml")
    assert honest.n == 3
    assert honest.seed == 7
    assert honest.mix.weights(3) == {0: 0.5, 1: 0.5}

    noisy = load_config(CONF / "simulate-noisy.yml")
    assert noisy.n == 7
    assert noisy.device == "noisy"
    assert noisy.noise.theta == 0.1
    assert noisy.workers == 4


def test_load_json_config(tmp_path: Path) -> None:
    path = tmp_path / "run.json"
    path.write_text('{"n": 11, "device": "padded", "rounds": 20}', encoding="utf-8")
    config = load_config(path)
    assert config.n == 11
    assert config.rounds == 20


@pytest.mark.parametrize(
    ("name", "text", "needle"),
    [
        ("broken.yml", "n: [3\n", "YAML parse error"),
        ("empty.yaml", "", "Empty YAML document"),
        ("broken.json", "{n: 3", "JSON parse error"),
        ("run.toml", "n = 3\n", "Unsupported config format '.toml'"),
    ],
)
def test_load_config_file_errors(tmp_path: Path, name: str, text: str, needle: str) -> None:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    with pytest.raises(ConfigLoadError) as exc:
        load_config(path)
    assert needle in str(exc.value)


def test_load_config_missing_file(tmp_path: Path) -> None:
    with pytest.raises(ConfigLoadError) as exc:
        load_config(tmp_path / "nope.yml")
    assert "Config file not found" in str(exc.value)


def test_merge_overrides_file_values() -> None:
    base = validate_config(minimal_valid_config())
    merged = merge_run_config(
        base, {"rounds": 50, "seed": None, "noise.theta": 0.3, "output.out_dir": "runs"}
    )
    assert merged.rounds == 50
    assert merged.seed == 4
    assert merged.noise.theta == 0.3
    assert merged.noise.kind == "y-rotation"
    assert merged.output.out_dir == Path("runs")


def test_merge_without_file_starts_from_defaults() -> None:
    merged = merge_run_config(None, {"n": 7, "device": None, "mix.pair": 0.5})
    assert merged.n == 7
    assert merged.device == "honest"
    assert merged.mix.pair == 0.5

    with pytest.raises(ConfigLoadError) as exc:
        merge_run_config(None, {"n": 5})
    assert "<flags>" in str(exc.value)


def test_load_shipped_device_descriptor() -> None:
    descriptor = load_device_descriptor(CONF / "custom-device.yml")
    assert descriptor.n == 3
    assert descriptor.pairs == 3
    assert descriptor.alice.root[2] == ["YII", "IYI", "IIY"]
    assert descriptor.bob.pair.root == {}


@pytest.mark.parametrize(
    ("changes", "needle"),
    [
        ({"alice": {1: ["XQI"]}}, "input 1"),
        ({"alice": {4: ["XII"]}}, "alice inputs must be within 1..3"),
        ({"bob": {"game": {5: ["XII"]}}}, "bob.game inputs must be within 1..3"),
        ({"bob": {"game": {1: ["XII"]}, "pair": {1: ["XXI"]}}}, "only valid for n > 3"),
    ],
)
def test_device_descriptor_validation(
    tmp_path: Path, changes: dict[str, Any], needle: str
) -> None:
    data: dict[str, Any] = {
        "n": 3,
        "pairs": 3,
        "alice": {1: ["XII"]},
        "bob": {"game": {1: ["IXX"]}},
    }
    data.update(changes)
    path = tmp_path / "device.yml"
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    with pytest.raises(ConfigLoadError) as exc:
        load_device_descriptor(path)
    assert needle in str(exc.value)


def test_settings_from_env(monkeypatch: pytest.MonkeyPatch, tmp_path: Path) -> None:
    monkeypatch.setenv("LOG_LEVEL", "debug")
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    settings = Settings.from_env()
    assert settings.log_level == "debug"
    assert settings.output_dir == tmp_path

    monkeypatch.delenv(OUTPUT_DIR_ENV)
    monkeypatch.delenv("LOG_LEVEL")
    settings = Settings.from_env()
    assert settings.log_level == "info"
    assert settings.output_dir == Path.cwd()
