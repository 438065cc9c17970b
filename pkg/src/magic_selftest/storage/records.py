from __future__ import annotations

import logging
import math
from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from types import TracebackType
from typing import IO, Any

import orjson

from magic_selftest import __version__
from magic_selftest.errors import ContractError

logger = logging.getLogger(__name__)

SIGNIFICANT_DIGITS = 12
HEADER_KIND = "header"
_DUMP_OPTIONS = orjson.OPT_SERIALIZE_NUMPY


def round_significant(value: float, digits: int = SIGNIFICANT_DIGITS) -> float:
    if not math.isfinite(value) or value == 0.0:
        return value
    return float(f"{value:.{digits}g}")


def _jsonable(value: Any) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        return round_significant(value)
    if isinstance(value, Mapping):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, Path):
        return str(value)
    return value


def encode_record(record: Mapping[str, Any]) -> bytes:
    return orjson.dumps(_jsonable(record), option=_DUMP_OPTIONS) + b"\n"


def make_header(
    command: str, *, seed: int | None = None, n: int | None = None, **extra: Any
) -> dict[str, Any]:
    header: dict[str, Any] = {"kind": HEADER_KIND, "command": command, "version": __version__}
    header["seed"] = seed
    header["n"] = n
    header.update(extra)
    return header


@dataclass(slots=True)
class LineRecordWriter:
    """
    Writes one orjson object per line.

    - the header goes first, only when the file is empty
    - every record is flushed, so long runs stream
    - floats are rounded to 12 significant digits
    """

    path: Path
    header: Mapping[str, Any]
    append: bool = False
    _handle: IO[bytes] | None = field(default=None, init=False, repr=False)
    written: int = field(default=0, init=False)

    def open(self) -> LineRecordWriter:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fresh = not self.append or not self.path.exists() or self.path.stat().st_size == 0
        self._handle = self.path.open("ab" if self.append else "wb")
        if fresh:
            self._emit(self.header)
        return self

    def write(self, record: Mapping[str, Any]) -> None:
        self._emit(record)
        self.written += 1

    def close(self) -> None:
        if self._handle is not None:
            self._handle.close()
            self._handle = None
            logger.debug("Wrote %d records to %s", self.written, self.path)

    def _emit(self, record: Mapping[str, Any]) -> None:
        if self._handle is None:
            raise ContractError(f"Writer for {self.path} is not open")
        self._handle.write(encode_record(record))
        self._handle.flush()

    def __enter__(self) -> LineRecordWriter:
        return self.open()

    def __exit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        tb: TracebackType | None,
    ) -> None:
        self.close()


def write_line_records(
    path: Path, header: Mapping[str, Any], records: list[Mapping[str, Any]]
) -> Path:
    with LineRecordWriter(path, header) as writer:
        for record in records:
            writer.write(record)
    return path


def iter_line_records(path: str | Path) -> Iterator[dict[str, Any]]:
    with Path(path).open("rb") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                yield orjson.loads(line)
            except orjson.JSONDecodeError as exc:
                raise ContractError(f"{path}:{lineno}: invalid record: {exc}") from exc


def read_line_records(path: str | Path) -> tuple[dict[str, Any], list[dict[str, Any]]]:
    """Return (header, records); a missing header is an error."""
    records = list(iter_line_records(path))
    if not records or records[0].get("kind") != HEADER_KIND:
        raise ContractError(f"{path}: first line is not a header record")
    return records[0], records[1:]
