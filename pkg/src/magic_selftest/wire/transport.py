from __future__ import annotations

import asyncio
import contextlib
import logging
from typing import Protocol

from magic_selftest.wire.codecs import EndpointClosed, decode_frame, encode_frame, read_frame
from magic_selftest.wire.messages import WireMessage

logger = logging.getLogger(__name__)


class Endpoint(Protocol):
    """One side of a framed, ordered message channel."""

    async def send(self, message: WireMessage) -> None: ...

    async def receive(self) -> WireMessage: ...

    async def close(self) -> None: ...


class StreamEndpoint:
    def __init__(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter) -> None:
        self._reader = reader
        self._writer = writer
        self._send_lock = asyncio.Lock()

    @property
    def peer(self) -> str:
        return str(self._writer.get_extra_info("peername"))

    async def send(self, message: WireMessage) -> None:
        frame = encode_frame(message)
        async with self._send_lock:
            if self._writer.is_closing():
                raise EndpointClosed(f"connection to {self.peer} is closed")
            self._writer.write(frame)
            try:
                await self._writer.drain()
            except ConnectionError as exc:
                raise EndpointClosed(str(exc)) from exc

    async def receive(self) -> WireMessage:
        try:
            return await read_frame(self._reader)
        except ConnectionResetError as exc:
            raise EndpointClosed(str(exc)) from exc

    async def close(self) -> None:
        if self._writer.is_closing():
            return
        self._writer.close()
        with contextlib.suppress(ConnectionError):
            await self._writer.wait_closed()


_CLOSED = b""


class MemoryEndpoint:
    """In-process endpoint; frames still pass through the codec."""

    def __init__(self, inbox: asyncio.Queue[bytes], outbox: asyncio.Queue[bytes]) -> None:
        self._inbox = inbox
        self._outbox = outbox
        self._closed = False

    async def send(self, message: WireMessage) -> None:
        if self._closed:
            raise EndpointClosed("memory endpoint is closed")
        await self._outbox.put(encode_frame(message))

    async def receive(self) -> WireMessage:
        if self._closed:
            raise EndpointClosed("memory endpoint is closed")
        frame = await self._inbox.get()
        if frame == _CLOSED:
            self._closed = True
            raise EndpointClosed("peer closed the memory pipe")
        return decode_frame(frame)

    async def send_raw(self, frame: bytes) -> None:
        await self._outbox.put(frame)

    async def close(self) -> None:
        if not self._closed:
            self._closed = True
            await self._outbox.put(_CLOSED)


def memory_pipe() -> tuple[MemoryEndpoint, MemoryEndpoint]:
    left: asyncio.Queue[bytes] = asyncio.Queue()
    right: asyncio.Queue[bytes] = asyncio.Queue()
    return MemoryEndpoint(left, right), MemoryEndpoint(right, left)


async def open_endpoint(host: str, port: int) -> StreamEndpoint:
    reader, writer = await asyncio.open_connection(host, port)
    return StreamEndpoint(reader, writer)


async def connect_with_retries(
    host: str, port: int, *, retries: int, retry_delay: float
) -> StreamEndpoint:
    """Open a stream endpoint, trying ``retries + 1`` times in total."""
    last: OSError | None = None
    for attempt in range(retries + 1):
        try:
            return await open_endpoint(host, port)
        except OSError as exc:
            last = exc
            logger.warning(
                "Connect to %s:%d failed (attempt %d/%d): %s",
                host,
                port,
                attempt + 1,
                retries + 1,
                exc,
            )
            if attempt < retries:
                await asyncio.sleep(retry_delay)
    raise ConnectionError(
        f"Could not connect to {host}:{port} after {retries + 1} attempts"
    ) from last
