from __future__ import annotations

import asyncio
import logging
from dataclasses import asdict, dataclass

from magic_selftest.errors import ContractError, ProtocolViolation
from magic_selftest.quantum import Observable
from magic_selftest.strategies import DeviceModel
from magic_selftest.wire.messages import (
    Answer,
    EndSession,
    Hello,
    QuestionAlice,
    QuestionBob,
    Role,
    RoundResult,
)
from magic_selftest.wire.state_service import EntanglementService, RoundAbandoned
from magic_selftest.wire.transport import Endpoint

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class ProverStats:
    role: Role
    questions: int = 0
    answered: int = 0
    skipped: int = 0
    accepted: int = 0
    rejected: int = 0
    end_reason: str | None = None

    @property
    def completed(self) -> bool:
        return self.end_reason == "complete"

    def to_dict(self) -> dict[str, object]:
        return {"kind": "prover-stats", **asdict(self)}


def assigned_observables(
    device: DeviceModel, role: Role, question: QuestionAlice | QuestionBob
) -> tuple[Observable, ...]:
    """The reflection set the device measures for this question."""
    try:
        if role == "A":
            if not isinstance(question, QuestionAlice):
                raise ProtocolViolation(f"Alice prover received {question.kind}")
            return device.alice_assign(question.x)
        if not isinstance(question, QuestionBob):
            raise ProtocolViolation(f"Bob prover received {question.kind}")
        return device.bob_assign(question.c, question.y)
    except ContractError as exc:
        raise ProtocolViolation(f"{role} prover cannot answer: {exc}") from exc


async def prover_loop(
    device: DeviceModel,
    role: Role,
    endpoint: Endpoint,
    service: EntanglementService,
    *,
    timeout: float = 5.0,
) -> ProverStats:
    """Answer questions until the referee ends the session.

    Each answer is the role's share of one joint sample drawn by ``service``.
    """
    await endpoint.send(Hello(role=role, n=device.n))
    stats = ProverStats(role=role)
    while True:
        message = await endpoint.receive()
        if isinstance(message, EndSession):
            stats.end_reason = message.reason
            break
        if isinstance(message, RoundResult):
            if message.accept:
                stats.accepted += 1
            else:
                stats.rejected += 1
            continue

        if not isinstance(message, QuestionAlice | QuestionBob):
            raise ProtocolViolation(f"{role} prover received unexpected {message.kind}")
        observables = assigned_observables(device, role, message)
        round_id = message.round_id
        stats.questions += 1
        try:
            bits = await asyncio.wait_for(service.measure(role, round_id, observables), timeout)
        except (TimeoutError, RoundAbandoned) as exc:
            stats.skipped += 1
            logger.warning("%s skipped round %d: %s", role, round_id, str(exc) or "timeout")
            continue
        await endpoint.send(Answer(round_id=round_id, bits=bits))
        stats.answered += 1

    logger.info(
        "%s prover done (%s): %d answered, %d skipped, %d accepted",
        role,
        stats.end_reason,
        stats.answered,
        stats.skipped,
        stats.accepted,
    )
    return stats
