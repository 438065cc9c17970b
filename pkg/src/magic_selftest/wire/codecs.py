from __future__ import annotations

import asyncio
import struct

from magic_selftest.errors import ProtocolViolation
from magic_selftest.wire.messages import WireMessage, dump_message, parse_message

_LENGTH = struct.Struct(">I")
MAX_FRAME_BYTES = 1 << 20


class EndpointClosed(ConnectionError):
    """The peer closed the connection between frames."""


def encode_frame(message: WireMessage) -> bytes:
    payload = dump_message(message)
    if len(payload) > MAX_FRAME_BYTES:
        raise ProtocolViolation(f"Frame of {len(payload)} bytes exceeds {MAX_FRAME_BYTES}")
    return _LENGTH.pack(len(payload)) + payload


def decode_frame(frame: bytes) -> WireMessage:
    """Inverse of encode_frame for one complete frame."""
    if len(frame) < _LENGTH.size:
        raise ProtocolViolation("Frame shorter than its length prefix")
    (length,) = _LENGTH.unpack_from(frame)
    if length != len(frame) - _LENGTH.size:
        raise ProtocolViolation(f"Length prefix {length} != payload {len(frame) - _LENGTH.size}")
    return parse_message(frame[_LENGTH.size :])


async def read_frame(reader: asyncio.StreamReader) -> WireMessage:
    try:
        head = await reader.readexactly(_LENGTH.size)
    except asyncio.IncompleteReadError as exc:
        if not exc.partial:
            raise EndpointClosed("peer closed the stream") from exc
        raise ProtocolViolation("Stream ended inside a length prefix") from exc
    (length,) = _LENGTH.unpack(head)
    if length > MAX_FRAME_BYTES:
        raise ProtocolViolation(f"Announced frame of {length} bytes exceeds {MAX_FRAME_BYTES}")
    try:
        payload = await reader.readexactly(length)
    except asyncio.IncompleteReadError as exc:
        raise ProtocolViolation("Stream ended inside a frame") from exc
    return parse_message(payload)
