from __future__ import annotations

import asyncio
import contextlib
import logging
from collections.abc import Sequence

from magic_selftest.errors import ContractError, ProtocolViolation, SessionAborted
from magic_selftest.protocol import (
    RoundMix,
    RoundRecord,
    Transcript,
    input_rng,
    judge,
    sample_inputs,
)
from magic_selftest.wire.codecs import EndpointClosed
from magic_selftest.wire.messages import (
    WIRE_VERSION,
    Answer,
    EndSession,
    Hello,
    QuestionAlice,
    QuestionBob,
    Role,
    RoundResult,
    WireMessage,
)
from magic_selftest.wire.transport import Endpoint, StreamEndpoint

logger = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 5.0


class _Mailbox:
    """Buffers everything one prover sends so both answers can be awaited independently."""

    def __init__(self, role: Role, endpoint: Endpoint) -> None:
        self.role = role
        self.endpoint = endpoint
        self._queue: asyncio.Queue[WireMessage | Exception] = asyncio.Queue()
        self._task: asyncio.Task[None] | None = None

    def start(self) -> None:
        self._task = asyncio.create_task(self._pump())

    async def stop(self) -> None:
        if self._task is not None:
            self._task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await self._task

    async def _pump(self) -> None:
        while True:
            try:
                message = await self.endpoint.receive()
            except (EndpointClosed, ProtocolViolation) as exc:
                await self._queue.put(exc)
                return
            await self._queue.put(message)

    async def answer_for(self, round_id: int) -> list[int]:
        while True:
            item = await self._queue.get()
            if isinstance(item, Exception):
                raise item
            if not isinstance(item, Answer):
                raise ProtocolViolation(f"{self.role} sent {item.kind} during round {round_id}")
            if item.round_id < round_id:
                logger.debug("Stale answer from %s for round %d", self.role, item.round_id)
                continue
            if item.round_id > round_id:
                raise ProtocolViolation(
                    f"{self.role} answered round {item.round_id} during round {round_id}"
                )
            return item.bits


async def _handshake(
    endpoints: Sequence[Endpoint], n: int, timeout: float
) -> dict[Role, Endpoint]:
    try:
        async with asyncio.timeout(timeout):
            hellos = [await endpoint.receive() for endpoint in endpoints]
    except TimeoutError as exc:
        raise SessionAborted(f"No hello within {timeout:.1f}s") from exc
    except (EndpointClosed, ProtocolViolation) as exc:
        raise SessionAborted(f"Handshake failed: {exc}") from exc

    roles: dict[Role, Endpoint] = {}
    for endpoint, hello in zip(endpoints, hellos, strict=True):
        if not isinstance(hello, Hello):
            raise SessionAborted(f"Expected hello, got {hello.kind}")
        if hello.version != WIRE_VERSION:
            raise SessionAborted(f"Unsupported wire version {hello.version!r}")
        if hello.n != n:
            raise SessionAborted(f"Prover {hello.role} declared n={hello.n}, session runs n={n}")
        if hello.role in roles:
            raise SessionAborted(f"Role conflict: both provers claim {hello.role}")
        roles[hello.role] = endpoint
    return roles


async def _end_all(endpoints: Sequence[Endpoint], reason: str) -> None:
    for endpoint in endpoints:
        with contextlib.suppress(EndpointClosed, ConnectionError):
            await endpoint.send(EndSession(reason=reason))


async def _play_round(
    n: int,
    mix: RoundMix,
    seed: int,
    round_id: int,
    boxes: dict[Role, _Mailbox],
    timeout: float,
) -> RoundRecord:
    c, x, y = sample_inputs(n, mix, input_rng(seed, round_id))
    alice, bob = boxes["A"], boxes["B"]
    await alice.endpoint.send(QuestionAlice(round_id=round_id, x=x))
    await bob.endpoint.send(QuestionBob(round_id=round_id, c=c, y=y))

    try:
        async with asyncio.timeout(timeout):
            a = await alice.answer_for(round_id)
            b = await bob.answer_for(round_id)
    except TimeoutError:
        logger.warning("Round %d voided: no answer within %.1fs", round_id, timeout)
        record = RoundRecord.void(round_id, c, x, y)
    else:
        record = judge(n, round_id, c, x, y, a, b)

    result = RoundResult(round_id=round_id, accept=record.accept)
    await alice.endpoint.send(result)
    await bob.endpoint.send(result)
    logger.debug("Round %d c=%d x=%d y=%d accept=%s", round_id, c, x, y, record.accept)
    return record


async def referee_serve(
    n: int,
    mix: RoundMix,
    rounds: int,
    endpoints: Sequence[Endpoint],
    seed: int,
    *,
    timeout: float = DEFAULT_TIMEOUT,
) -> Transcript:
    """Lockstep referee over two prover endpoints; inputs follow the in-process seed stream."""
    if rounds < 1:
        raise ContractError(f"rounds must be >= 1, got {rounds}")
    if len(endpoints) != 2:
        raise ContractError(f"A session needs exactly two provers, got {len(endpoints)}")
    mix.check(n)

    try:
        by_role = await _handshake(endpoints, n, timeout)
    except SessionAborted as exc:
        logger.error("Session aborted during handshake: %s", exc)
        await _end_all(endpoints, f"aborted: {exc}")
        raise

    boxes = {role: _Mailbox(role, endpoint) for role, endpoint in by_role.items()}
    for box in boxes.values():
        box.start()
    logger.info("Referee session started (n=%d, rounds=%d, seed=%d)", n, rounds, seed)

    records: list[RoundRecord] = []
    try:
        for round_id in range(rounds):
            records.append(await _play_round(n, mix, seed, round_id, boxes, timeout))
    except (EndpointClosed, ProtocolViolation) as exc:
        logger.error("Session aborted in round %d: %s", len(records), exc)
        await _end_all(endpoints, f"aborted: {exc}")
        raise SessionAborted(f"round {len(records)}: {exc}") from exc
    finally:
        for box in boxes.values():
            await box.stop()

    await _end_all(endpoints, "complete")
    transcript = Transcript(n=n, seed=seed, records=tuple(records))
    logger.info(
        "Referee session complete after %d rounds; accepted/counted per type: %s",
        len(transcript),
        transcript.accept_stats(),
    )
    return transcript


class ProverListener:
    """Accepts prover connections for one referee session."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0) -> None:
        self._host = host
        self._port = port
        self._server: asyncio.Server | None = None
        self._arrivals: asyncio.Queue[StreamEndpoint] = asyncio.Queue()

    async def start(self) -> None:
        self._server = await asyncio.start_server(self._on_connect, self._host, self._port)
        logger.info("Referee listening on %s:%d", self._host, self.port)

    @property
    def port(self) -> int:
        if self._server is None or not self._server.sockets:
            raise RuntimeError("listener is not started")
        return int(self._server.sockets[0].getsockname()[1])

    async def _on_connect(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        endpoint = StreamEndpoint(reader, writer)
        logger.info("Prover connected from %s", endpoint.peer)
        await self._arrivals.put(endpoint)

    async def accept(self, count: int = 2) -> list[StreamEndpoint]:
        return [await self._arrivals.get() for _ in range(count)]

    async def aclose(self) -> None:
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
