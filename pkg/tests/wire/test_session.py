from __future__ import annotations

import asyncio
from collections.abc import Callable

import pytest

from magic_selftest.errors import ContractError, ProtocolViolation, SessionAborted
from magic_selftest.protocol import RoundMix, run_protocol
from magic_selftest.quantum import NoiseModel
from magic_selftest.strategies import honest_device
from magic_selftest.wire import (
    Answer,
    EndSession,
    Hello,
    MemoryEndpoint,
    QuestionAlice,
    QuestionBob,
    Role,
    RoundResult,
    assigned_observables,
    memory_pipe,
    referee_serve,
    run_memory_session,
)

Responder = Callable[[QuestionAlice | QuestionBob], list[int] | None]


class FakeProver:
    """Scripted prover: answers each question with ``respond(question)``; None means silence."""

    def __init__(self, endpoint: MemoryEndpoint, role: Role, n: int, respond: Responder) -> None:
        self.endpoint = endpoint
        self.role = role
        self.n = n
        self.respond = respond
        self.end_reason: str | None = None
        self.results: list[bool] = []

    async def run(self, *, close_after: int | None = None) -> None:
        await self.endpoint.send(Hello(role=self.role, n=self.n))
        questions = 0
        while True:
            message = await self.endpoint.receive()
            if isinstance(message, EndSession):
                self.end_reason = message.reason
                return
            if isinstance(message, RoundResult):
                self.results.append(message.accept)
                continue
            assert isinstance(message, QuestionAlice | QuestionBob)
            questions += 1
            if close_after is not None and questions > close_after:
                await self.endpoint.close()
                return
            bits = self.respond(message)
            if bits is not None:
                await self.endpoint.send(Answer(round_id=message.round_id, bits=bits))


def _pipes() -> tuple[list[MemoryEndpoint], list[MemoryEndpoint]]:
    ref_a, prov_a = memory_pipe()
    ref_b, prov_b = memory_pipe()
    return [ref_a, ref_b], [prov_a, prov_b]


@pytest.mark.parametrize(
    ("n", "noise"),
    [(3, None), (3, NoiseModel.y_rotation(0.4)), (7, None)],
)
def test_memory_session_matches_in_process_run(n: int, noise: NoiseModel | None) -> None:
    device = honest_device(n, noise)
    mix = RoundMix.uniform(n)

    result = asyncio.run(run_memory_session(device, 40, mix, seed=21))
    expected = run_protocol(device, 40, mix, seed=21)

    assert result.transcript.records == expected.records
    for stats in (result.alice, result.bob):
        assert stats.completed
        assert stats.questions == stats.answered == 40
        assert stats.accepted + stats.rejected == 40


def test_malformed_answers_are_recorded_as_losses() -> None:
    async def run() -> None:
        referee_side, prover_side = _pipes()
        alice = FakeProver(prover_side[0], "A", 3, lambda q: [1, 1, 1])
        bob = FakeProver(prover_side[1], "B", 3, lambda q: [1])
        transcript, _, _ = await asyncio.gather(
            referee_serve(3, RoundMix.uniform(3), 10, referee_side, seed=5),
            alice.run(),
            bob.run(),
        )
        assert len(transcript) == 10
        assert all(r.malformed and not r.accept for r in transcript)
        assert alice.results == [False] * 10
        assert alice.end_reason == "complete"

    asyncio.run(run())


def test_silent_prover_voids_the_round() -> None:
    async def run() -> None:
        referee_side, prover_side = _pipes()

        def bob_answers(q: QuestionAlice | QuestionBob) -> list[int] | None:
            return None if q.round_id == 0 else [1, 1, -1]

        alice = FakeProver(prover_side[0], "A", 3, lambda q: [1, 1, 1])
        bob = FakeProver(prover_side[1], "B", 3, bob_answers)
        transcript, _, _ = await asyncio.gather(
            referee_serve(3, RoundMix({0: 1.0}), 4, referee_side, seed=2, timeout=0.1),
            alice.run(),
            bob.run(),
        )
        voided = [r.round_id for r in transcript if r.voided]
        assert voided == [0]
        assert len(transcript.counted()) == 3

    asyncio.run(run())


def test_role_conflict_aborts_the_session() -> None:
    async def run() -> None:
        referee_side, prover_side = _pipes()
        first = FakeProver(prover_side[0], "A", 3, lambda q: [1, 1, 1])
        second = FakeProver(prover_side[1], "A", 3, lambda q: [1, 1, 1])
        provers = asyncio.gather(first.run(), second.run())
        with pytest.raises(SessionAborted) as exc:
            await referee_serve(3, RoundMix.uniform(3), 5, referee_side, seed=1)
        assert "Role conflict: both provers claim A" in str(exc.value)
        await provers
        assert first.end_reason is not None
        assert first.end_reason.startswith("aborted:")

    asyncio.run(run())


def test_size_mismatch_aborts_the_session() -> None:
    async def run() -> None:
        referee_side, prover_side = _pipes()
        alice = FakeProver(prover_side[0], "A", 7, lambda q: [1] * 7)
        bob = FakeProver(prover_side[1], "B", 3, lambda q: [1, 1, -1])
        provers = asyncio.gather(alice.run(), bob.run())
        with pytest.raises(SessionAborted) as exc:
            await referee_serve(3, RoundMix.uniform(3), 5, referee_side, seed=1)
        assert "declared n=7" in str(exc.value)
        await provers

    asyncio.run(run())


def test_disconnect_mid_session_aborts() -> None:
    async def run() -> None:
        referee_side, prover_side = _pipes()
        alice = FakeProver(prover_side[0], "A", 3, lambda q: [1, 1, 1])
        bob = FakeProver(prover_side[1], "B", 3, lambda q: [1, 1, -1])
        provers = asyncio.gather(alice.run(), bob.run(close_after=2))
        with pytest.raises(SessionAborted) as exc:
            await referee_serve(3, RoundMix({0: 1.0}), 5, referee_side, seed=3)
        assert str(exc.value).startswith("round 2:")
        await provers
        assert alice.end_reason is not None
        assert alice.end_reason.startswith("aborted:")

    asyncio.run(run())


def test_referee_argument_checks() -> None:
    async def run() -> None:
        referee_side, _ = _pipes()
        with pytest.raises(ContractError):
            await referee_serve(3, RoundMix.uniform(3), 0, referee_side, seed=1)
        with pytest.raises(ContractError) as exc:
            await referee_serve(3, RoundMix.uniform(3), 5, referee_side[:1], seed=1)
        assert "exactly two provers" in str(exc.value)
        with pytest.raises(ContractError):
            await referee_serve(3, RoundMix({2: 1.0}), 5, referee_side, seed=1)

    asyncio.run(run())


def test_assigned_observables_enforce_roles() -> None:
    device = honest_device(3)
    assert assigned_observables(device, "A", QuestionAlice(round_id=0, x=2)) == (
        device.alice_assign(2)
    )
    with pytest.raises(ProtocolViolation) as exc:
        assigned_observables(device, "A", QuestionBob(round_id=0, c=0, y=1))
    assert "Alice prover received question-bob" in str(exc.value)
    with pytest.raises(ProtocolViolation):
        assigned_observables(device, "B", QuestionAlice(round_id=0, x=1))
    with pytest.raises(ProtocolViolation) as exc:
        assigned_observables(device, "B", QuestionBob(round_id=0, c=2, y=1))
    assert "cannot answer" in str(exc.value)
