from __future__ import annotations

from collections import Counter
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from magic_selftest.errors import ContractError
from magic_selftest.storage import LineRecordWriter, make_header, read_line_records


@dataclass(frozen=True, slots=True)
class RoundRecord:
    round_id: int
    c: int
    x: int
    y: int
    a: tuple[int, ...]
    b: tuple[int, ...]
    accept: bool
    sub: Mapping[str, bool] = field(default_factory=dict)
    voided: bool = False
    malformed: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "round": self.round_id,
            "c": self.c,
            "x": self.x,
            "y": self.y,
            "a": list(self.a),
            "b": list(self.b),
            "accept": self.accept,
            "sub": dict(self.sub),
            "voided": self.voided,
            "malformed": self.malformed,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> RoundRecord:
        try:
            return cls(
                round_id=int(data["round"]),
                c=int(data["c"]),
                x=int(data["x"]),
                y=int(data["y"]),
                a=tuple(int(v) for v in data["a"]),
                b=tuple(int(v) for v in data["b"]),
                accept=bool(data["accept"]),
                sub={str(k): bool(v) for k, v in data.get("sub", {}).items()},
                voided=bool(data.get("voided", False)),
                malformed=bool(data.get("malformed", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ContractError(f"Invalid round record {dict(data)}: {exc}") from exc

    @classmethod
    def void(cls, round_id: int, c: int, x: int, y: int) -> RoundRecord:
        return cls(round_id, c, x, y, (), (), accept=False, voided=True)


@dataclass(frozen=True, slots=True)
class Transcript:
    n: int
    seed: int
    records: tuple[RoundRecord, ...]

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[RoundRecord]:
        return iter(self.records)

    def counted(self) -> list[RoundRecord]:
        return [r for r in self.records if not r.voided]

    def rounds_by_type(self) -> dict[int, int]:
        return dict(sorted(Counter(r.c for r in self.counted()).items()))

    def accept_rate(self, c: int) -> float | None:
        rounds = [r for r in self.counted() if r.c == c]
        if not rounds:
            return None
        return sum(r.accept for r in rounds) / len(rounds)

    def accept_stats(self) -> dict[int, tuple[int, int]]:
        """(accepted, counted) per round type."""
        stats: dict[int, tuple[int, int]] = {}
        for r in self.counted():
            ok, total = stats.get(r.c, (0, 0))
            stats[r.c] = (ok + int(r.accept), total + 1)
        return dict(sorted(stats.items()))


def write_transcript(
    path: Path, transcript: Transcript, *, command: str = "transcript", **header: Any
) -> Path:
    meta = make_header(command, seed=transcript.seed, n=transcript.n, **header)
    with LineRecordWriter(path, meta) as writer:
        for record in transcript.records:
            writer.write(record.to_dict())
    return path


def read_transcript(path: str | Path) -> Transcript:
    header, rows = read_line_records(path)
    records = tuple(RoundRecord.from_dict(row) for row in rows)
    return Transcript(n=int(header["n"]), seed=int(header.get("seed") or 0), records=records)
