from __future__ import annotations

from magic_selftest.wire.codecs import (
    MAX_FRAME_BYTES,
    EndpointClosed,
    decode_frame,
    encode_frame,
    read_frame,
)
from magic_selftest.wire.messages import (
    WIRE_VERSION,
    Answer,
    EndSession,
    Hello,
    Measure,
    Outcome,
    QuestionAlice,
    QuestionBob,
    Role,
    RoundResult,
    WireMessage,
    dump_message,
    parse_message,
)
from magic_selftest.wire.prover import ProverStats, assigned_observables, prover_loop
from magic_selftest.wire.referee import DEFAULT_TIMEOUT, ProverListener, referee_serve
from magic_selftest.wire.session import SessionResult, run_memory_session
from magic_selftest.wire.state_service import (
    EntanglementService,
    LocalEntanglementService,
    RemoteEntanglementService,
    RoundAbandoned,
    StateServer,
    StateServerConfig,
    start_state_server,
)
from magic_selftest.wire.transport import (
    Endpoint,
    MemoryEndpoint,
    StreamEndpoint,
    connect_with_retries,
    memory_pipe,
    open_endpoint,
)

__all__ = [
    "DEFAULT_TIMEOUT",
    "MAX_FRAME_BYTES",
    "WIRE_VERSION",
    "Answer",
    "EndSession",
    "Endpoint",
    "EndpointClosed",
    "EntanglementService",
    "Hello",
    "LocalEntanglementService",
    "Measure",
    "MemoryEndpoint",
    "Outcome",
    "ProverListener",
    "ProverStats",
    "QuestionAlice",
    "QuestionBob",
    "RemoteEntanglementService",
    "Role",
    "RoundAbandoned",
    "RoundResult",
    "SessionResult",
    "StateServer",
    "StateServerConfig",
    "StreamEndpoint",
    "WireMessage",
    "assigned_observables",
    "connect_with_retries",
    "decode_frame",
    "dump_message",
    "encode_frame",
    "memory_pipe",
    "open_endpoint",
    "parse_message",
    "prover_loop",
    "read_frame",
    "referee_serve",
    "run_memory_session",
    "start_state_server",
]
