from __future__ import annotations

from pathlib import Path
from typing import Literal, TypeAlias

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    RootModel,
    ValidationError,
    field_validator,
    model_validator,
)

from magic_selftest.errors import ContractError
from magic_selftest.pauli import parse
from magic_selftest.quantum.state import MAX_DENSE_PAIRS, NoiseKind, NoiseModel

DeviceChoice: TypeAlias = Literal["honest", "noisy", "padded", "standard-square", "custom"]

# ---------------------------------------------------------------------------
# Round mix and noise
# ---------------------------------------------------------------------------


class MixConfig(BaseModel):
    """Relative weights of game (c=0), local-check (c=1) and pair-check (c=2) rounds."""

    model_config = ConfigDict(extra="forbid")

    game: float = Field(default=1.0, ge=0.0)
    local: float = Field(default=1.0, ge=0.0)
    pair: float | None = Field(
        default=None,
        ge=0.0,
        description="Pair-check weight; unset means 1 for n > 3 and 0 for n = 3.",
    )

    def weights(self, n: int) -> dict[int, float]:
        pair = self.pair if self.pair is not None else (0.0 if n == 3 else 1.0)
        raw = {0: self.game, 1: self.local, 2: pair}
        total = sum(raw.values())
        if total <= 0.0:
            raise ContractError("Round mix has no positive weight")
        return {c: w / total for c, w in raw.items() if w > 0.0}


class NoiseConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["none", "y-rotation", "per-pair-angles"] = "none"
    theta: float | None = Field(default=None, description="Angle for kind y-rotation (radians).")
    angles: list[float] = Field(default_factory=list, description="Angles for per-pair-angles.")

    @model_validator(mode="after")
    def _check_kind(self) -> NoiseConfig:
        if self.kind == "y-rotation" and self.theta is None:
            raise ValueError("noise.theta is required for kind y-rotation.")
        if self.kind == "per-pair-angles" and not self.angles:
            raise ValueError("noise.angles must be non-empty for kind per-pair-angles.")
        if self.kind == "none" and (self.theta or any(self.angles)):
            raise ValueError("noise kind none takes no angles.")
        return self

    def to_model(self) -> NoiseModel:
        if self.kind == "y-rotation":
            assert self.theta is not None
            return NoiseModel(NoiseKind.Y_ROTATION, (self.theta,))
        if self.kind == "per-pair-angles":
            return NoiseModel(NoiseKind.PER_PAIR, tuple(self.angles))
        return NoiseModel.none()


# ---------------------------------------------------------------------------
# Outputs and wire endpoints
# ---------------------------------------------------------------------------


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    out_dir: Path | None = Field(
        default=None, description="Output directory; defaults to env MAGIC_SELFTEST_OUTPUT_DIR."
    )
    transcript: str = "transcript.jsonl"
    report: str = "report.jsonl"
    bounds: str = "bounds.jsonl"
    ledger: str = "ledger.jsonl"


class WireConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    host: str = "127.0.0.1"
    port: int = Field(default=7811, ge=0, le=65535)
    state_host: str = "127.0.0.1"
    state_port: int = Field(default=7812, ge=0, le=65535)
    timeout: float = Field(default=5.0, gt=0.0, description="Seconds to wait for an answer.")
    retries: int = Field(default=5, ge=0)
    retry_delay: float = Field(default=0.2, ge=0.0)


# ---------------------------------------------------------------------------
# Run config
# ---------------------------------------------------------------------------


def check_protocol_size(n: int) -> int:
    if n != 3 and (n < 3 or n % 4 != 3):
        raise ValueError(f"n must be 3 or n = 3 (mod 4), got {n}.")
    return n


class RunConfig(BaseModel):
    """Root configuration for simulate and the wire commands."""

    model_config = ConfigDict(extra="forbid")

    n: int = 3
    rounds: int = Field(default=10_000, ge=1)
    mix: MixConfig = Field(default_factory=MixConfig)
    noise: NoiseConfig = Field(default_factory=NoiseConfig)
    device: DeviceChoice = "honest"
    descriptor: Path | None = Field(default=None, description="Device descriptor for custom.")
    seed: int = Field(default=0, ge=0)
    alpha: float = Field(default=0.01, gt=0.0, lt=1.0, description="1 - confidence level.")
    workers: int = Field(default=1, ge=1)
    output: OutputConfig = Field(default_factory=OutputConfig)
    wire: WireConfig = Field(default_factory=WireConfig)

    @field_validator("n")
    @classmethod
    def _validate_n(cls, value: int) -> int:
        return check_protocol_size(value)

    @model_validator(mode="after")
    def _check_device(self) -> RunConfig:
        if self.n == 3 and self.mix.pair:
            raise ValueError("pair-check rounds (c=2) need n > 3.")
        if self.device in {"honest", "noisy"} and self.n > MAX_DENSE_PAIRS:
            raise ValueError(f"{self.device} device uses n pairs; dense cap is {MAX_DENSE_PAIRS}.")
        if self.device == "noisy" and self.noise.kind == "none":
            raise ValueError("device noisy needs a noise section.")
        if self.device == "padded" and self.n == 3:
            raise ValueError("device padded needs n > 3.")
        if self.device == "standard-square" and self.n != 3:
            raise ValueError("device standard-square runs at n = 3 only.")
        if self.device == "custom" and self.descriptor is None:
            raise ValueError("device custom needs a descriptor path.")
        return self


# ---------------------------------------------------------------------------
# Device descriptors
# ---------------------------------------------------------------------------

ObservableList: TypeAlias = list[str]


def _check_pauli_texts(values: dict[int, ObservableList]) -> dict[int, ObservableList]:
    for key, texts in values.items():
        for text in texts:
            try:
                parse(text)
            except ContractError as exc:
                raise ValueError(f"input {key}: {exc}") from exc
    return values


class InputSets(RootModel[dict[int, ObservableList]]):
    """Mapping: input -> observables in Pauli text syntax."""

    @field_validator("root")
    @classmethod
    def _parse_all(cls, value: dict[int, ObservableList]) -> dict[int, ObservableList]:
        return _check_pauli_texts(value)


class BobSets(BaseModel):
    model_config = ConfigDict(extra="forbid")

    game: InputSets
    local: InputSets = Field(default_factory=lambda: InputSets({}))
    pair: InputSets = Field(default_factory=lambda: InputSets({}))


class DeviceDescriptor(BaseModel):
    """Custom Pauli device: observable lists per input on ``pairs`` local qubits."""

    model_config = ConfigDict(extra="forbid")

    n: int = Field(description="Protocol size (Alice's answer length).")
    pairs: int = Field(ge=1, le=MAX_DENSE_PAIRS)
    noise: NoiseConfig = Field(default_factory=NoiseConfig)
    alice: InputSets
    bob: BobSets

    @field_validator("n")
    @classmethod
    def _validate_n(cls, value: int) -> int:
        return check_protocol_size(value)

    @model_validator(mode="after")
    def _check_inputs(self) -> DeviceDescriptor:
        if not set(self.alice.root) <= {1, 2, 3}:
            raise ValueError(f"alice inputs must be within 1..3, got {sorted(self.alice.root)}.")
        for name in ("game", "local", "pair"):
            keys = set(getattr(self.bob, name).root)
            if not keys <= set(range(1, self.n + 1)):
                raise ValueError(f"bob.{name} inputs must be within 1..{self.n}.")
        if self.n == 3 and self.bob.pair.root:
            raise ValueError("bob.pair is only valid for n > 3.")
        return self


__all__ = [
    "BobSets",
    "DeviceChoice",
    "DeviceDescriptor",
    "InputSets",
    "MixConfig",
    "NoiseConfig",
    "OutputConfig",
    "RunConfig",
    "ValidationError",
    "WireConfig",
    "check_protocol_size",
]
