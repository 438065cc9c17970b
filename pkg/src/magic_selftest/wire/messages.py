"""Wire messages, discriminated by ``kind``.

Alice's question carries only ``x``; ``c`` and ``y`` exist on Bob's question alone.
The ``measure``/``outcome`` pair is spoken between a prover and the state-owner service.
"""

from __future__ import annotations

from typing import Annotated, Literal, TypeAlias

import orjson
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from magic_selftest.errors import ProtocolViolation

WIRE_VERSION = "v1"

Role: TypeAlias = Literal["A", "B"]


class _Message(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True, frozen=True)


class Hello(_Message):
    kind: Literal["hello"] = "hello"
    version: str = WIRE_VERSION
    role: Role
    n: int = Field(ge=1)


class QuestionAlice(_Message):
    kind: Literal["question-alice"] = "question-alice"
    round_id: int = Field(alias="round-id", ge=0)
    x: int


class QuestionBob(_Message):
    kind: Literal["question-bob"] = "question-bob"
    round_id: int = Field(alias="round-id", ge=0)
    c: int
    y: int


class Answer(_Message):
    kind: Literal["answer"] = "answer"
    round_id: int = Field(alias="round-id", ge=0)
    bits: list[int]


class RoundResult(_Message):
    kind: Literal["round-result"] = "round-result"
    round_id: int = Field(alias="round-id", ge=0)
    accept: bool


class EndSession(_Message):
    kind: Literal["end-session"] = "end-session"
    reason: str = "complete"


class Measure(_Message):
    kind: Literal["measure"] = "measure"
    round_id: int = Field(alias="round-id", ge=0)
    role: Role
    observables: list[str]


class Outcome(_Message):
    kind: Literal["outcome"] = "outcome"
    round_id: int = Field(alias="round-id", ge=0)
    bits: list[int]


WireMessage: TypeAlias = Annotated[
    Hello | QuestionAlice | QuestionBob | Answer | RoundResult | EndSession | Measure | Outcome,
    Field(discriminator="kind"),
]

_ADAPTER: TypeAdapter[WireMessage] = TypeAdapter(WireMessage)


def dump_message(message: _Message) -> bytes:
    return orjson.dumps(message.model_dump(by_alias=True))


def parse_message(payload: bytes) -> WireMessage:
    try:
        data = orjson.loads(payload)
    except orjson.JSONDecodeError as exc:
        raise ProtocolViolation(f"Frame is not a JSON object: {exc}") from exc
    try:
        return _ADAPTER.validate_python(data)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in e.get('loc', ()))}: {e.get('msg')}" for e in exc.errors()
        )
        raise ProtocolViolation(f"Invalid message: {problems}") from exc
