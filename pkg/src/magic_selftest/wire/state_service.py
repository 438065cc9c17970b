"""State-owner service: the only holder of the shared state in multi-process runs.

Each prover sends its own role-tagged measurement request. Once both requests for a
round are in, one joint sample is drawn from the round's device stream and each role
receives only its own bits.
"""

from __future__ import annotations

import asyncio
import contextlib
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Protocol

from magic_selftest.errors import (
    ContractError,
    DimensionError,
    ProtocolViolation,
    SelftestError,
)
from magic_selftest.pauli import PauliString, parse
from magic_selftest.protocol import device_rng
from magic_selftest.quantum import JointSampler, Observable, SharedState
from magic_selftest.strategies import DeviceModel
from magic_selftest.wire.codecs import EndpointClosed
from magic_selftest.wire.messages import (
    WIRE_VERSION,
    EndSession,
    Hello,
    Measure,
    Outcome,
    Role,
    WireMessage,
)
from magic_selftest.wire.transport import Endpoint, StreamEndpoint, connect_with_retries

logger = logging.getLogger(__name__)


class RoundAbandoned(SelftestError):
    """The round ended before both roles asked to measure."""


class EntanglementService(Protocol):
    async def measure(
        self, role: Role, round_id: int, observables: Sequence[Observable]
    ) -> list[int]: ...


_Request = tuple[tuple[Observable, ...], "asyncio.Future[list[int]]"]


class LocalEntanglementService:
    def __init__(self, state: SharedState, seed: int) -> None:
        self._sampler = JointSampler(state)
        self._seed = seed
        self._pending: dict[int, dict[Role, _Request]] = {}
        self.samples = 0

    @classmethod
    def for_device(cls, device: DeviceModel, seed: int) -> LocalEntanglementService:
        return cls(device.shared_state(), seed)

    @property
    def pairs(self) -> int:
        return self._sampler.state.n

    async def measure(
        self, role: Role, round_id: int, observables: Sequence[Observable]
    ) -> list[int]:
        for obs in observables:
            if obs.n != self.pairs:
                raise DimensionError(f"{obs} acts on {obs.n} qubits, service holds {self.pairs}")
        self._abandon_before(round_id)

        slot = self._pending.setdefault(round_id, {})
        if role in slot:
            raise ProtocolViolation(f"Round {round_id}: second measure request from {role}")
        future: asyncio.Future[list[int]] = asyncio.get_running_loop().create_future()
        slot[role] = (tuple(observables), future)
        if len(slot) == 2:
            del self._pending[round_id]
            self._resolve(round_id, slot)
        return await future

    def _abandon_before(self, round_id: int) -> None:
        # Lockstep referee: a request for round r means every earlier round is over.
        for stale in [r for r in self._pending if r < round_id]:
            for _, future in self._pending.pop(stale).values():
                if not future.done():
                    future.set_exception(RoundAbandoned(f"round {stale} was abandoned"))
            logger.debug("Dropped pending measurement for round %d", stale)

    def _resolve(self, round_id: int, slot: dict[Role, _Request]) -> None:
        alice, alice_future = slot["A"]
        bob, bob_future = slot["B"]
        try:
            a, b = self._sampler.sample(alice, bob, device_rng(self._seed, round_id))
        except SelftestError as exc:
            for future in (alice_future, bob_future):
                if not future.done():
                    future.set_exception(exc)
            return
        self.samples += 1
        if not alice_future.done():
            alice_future.set_result(a)
        if not bob_future.done():
            bob_future.set_result(b)


# ---------------------------------------------------------------------------
# Socket variant
# ---------------------------------------------------------------------------


def _to_text(observables: Sequence[Observable]) -> list[str]:
    out: list[str] = []
    for obs in observables:
        if not isinstance(obs, PauliString):
            raise ContractError("Only Pauli observables can be sent to a remote state service")
        out.append(str(obs))
    return out


@dataclass(slots=True)
class StateServerConfig:
    host: str = "127.0.0.1"
    port: int = 7812
    max_concurrent: int = 64


class StateServer:
    """Serves ``measure`` requests from prover connections against one local service."""

    def __init__(self, service: LocalEntanglementService, *, semaphore: asyncio.Semaphore) -> None:
        self._service = service
        self._semaphore = semaphore
        self._server: asyncio.Server | None = None
        self._tasks: set[asyncio.Task[None]] = set()
        self._endpoints: set[StreamEndpoint] = set()
        self._roles: set[Role] = set()

    def bind(self, server: asyncio.Server) -> None:
        self._server = server

    @property
    def port(self) -> int:
        if self._server is None or not self._server.sockets:
            raise RuntimeError("state server is not listening")
        return int(self._server.sockets[0].getsockname()[1])

    async def handle_connection(
        self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter
    ) -> None:
        endpoint = StreamEndpoint(reader, writer)
        self._endpoints.add(endpoint)
        role: Role | None = None
        try:
            role = await self._handshake(endpoint)
            while True:
                message = await endpoint.receive()
                if isinstance(message, EndSession):
                    break
                if not isinstance(message, Measure) or message.role != role:
                    raise ProtocolViolation(f"{role} prover sent unexpected {message.kind}")
                task = asyncio.create_task(self._answer(endpoint, role, message))
                self._tasks.add(task)
                task.add_done_callback(self._tasks.discard)
        except EndpointClosed:
            logger.info("Prover %s disconnected from state service", role or endpoint.peer)
        except ProtocolViolation as exc:
            logger.warning("Closing state connection %s: %s", endpoint.peer, exc)
        finally:
            if role is not None:
                self._roles.discard(role)
            self._endpoints.discard(endpoint)
            await endpoint.close()

    async def _handshake(self, endpoint: StreamEndpoint) -> Role:
        hello = await endpoint.receive()
        if not isinstance(hello, Hello):
            raise ProtocolViolation(f"Expected hello, got {hello.kind}")
        if hello.version != WIRE_VERSION:
            raise ProtocolViolation(f"Unsupported wire version {hello.version!r}")
        if hello.role in self._roles:
            raise ProtocolViolation(f"Role {hello.role} is already connected")
        self._roles.add(hello.role)
        logger.info("Prover %s attached to state service from %s", hello.role, endpoint.peer)
        return hello.role

    async def _answer(self, endpoint: StreamEndpoint, role: Role, request: Measure) -> None:
        async with self._semaphore:
            bits: list[int] = []
            try:
                observables = [parse(text) for text in request.observables]
                bits = await self._service.measure(role, request.round_id, observables)
            except RoundAbandoned:
                logger.debug("Round %d abandoned before %s could measure", request.round_id, role)
            except SelftestError as exc:
                logger.warning("Round %d: %s measure failed: %s", request.round_id, role, exc)
            try:
                await endpoint.send(Outcome(round_id=request.round_id, bits=bits))
            except EndpointClosed:
                logger.debug("Outcome for round %d not delivered to %s", request.round_id, role)

    async def aclose(self) -> None:
        if self._server is not None:
            self._server.close()
        for endpoint in list(self._endpoints):
            await endpoint.close()
        if self._server is not None:
            await self._server.wait_closed()
        # a measure whose partner never arrives would wait forever
        for task in self._tasks:
            task.cancel()
        if self._tasks:
            await asyncio.gather(*self._tasks, return_exceptions=True)


async def start_state_server(
    service: LocalEntanglementService, *, config: StateServerConfig
) -> StateServer:
    handler = StateServer(service, semaphore=asyncio.Semaphore(config.max_concurrent))
    server = await asyncio.start_server(handler.handle_connection, config.host, config.port)
    handler.bind(server)
    logger.info("State service listening on %s:%d", config.host, handler.port)
    return handler


class RemoteEntanglementService:
    """Client side of the state service for one prover role.

    A read interrupted by a caller's timeout keeps running and is picked up by the next
    ``measure``, so the stream never loses its place inside a frame.
    """

    def __init__(self, endpoint: Endpoint, role: Role) -> None:
        self._endpoint = endpoint
        self._role = role
        self._read: asyncio.Task[WireMessage] | None = None

    @classmethod
    async def connect(
        cls,
        host: str,
        port: int,
        *,
        role: Role,
        n: int,
        retries: int = 0,
        retry_delay: float = 0.2,
    ) -> RemoteEntanglementService:
        endpoint = await connect_with_retries(host, port, retries=retries, retry_delay=retry_delay)
        await endpoint.send(Hello(role=role, n=n))
        return cls(endpoint, role)

    async def measure(
        self, role: Role, round_id: int, observables: Sequence[Observable]
    ) -> list[int]:
        if role != self._role:
            raise ProtocolViolation(f"Service handle for {self._role} asked to measure as {role}")
        await self._endpoint.send(
            Measure(round_id=round_id, role=role, observables=_to_text(observables))
        )
        while True:
            reply = await self._next_reply()
            if not isinstance(reply, Outcome):
                raise ProtocolViolation(f"State service sent unexpected {reply.kind}")
            if reply.round_id < round_id:
                continue
            if reply.round_id > round_id:
                raise ProtocolViolation(
                    f"Outcome for round {reply.round_id} while waiting for {round_id}"
                )
            if not reply.bits and observables:
                raise RoundAbandoned(f"round {round_id} has no outcome")
            return reply.bits

    async def _next_reply(self) -> WireMessage:
        if self._read is None:
            self._read = asyncio.create_task(self._endpoint.receive())
        try:
            reply = await asyncio.shield(self._read)
        except Exception:
            self._read = None
            raise
        self._read = None
        return reply

    async def close(self) -> None:
        if self._read is not None:
            self._read.cancel()
            with contextlib.suppress(asyncio.CancelledError, SelftestError, ConnectionError):
                await self._read
            self._read = None
        with contextlib.suppress(EndpointClosed):
            await self._endpoint.send(EndSession(reason="prover done"))
        await self._endpoint.close()
