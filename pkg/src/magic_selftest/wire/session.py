from __future__ import annotations

import asyncio
from dataclasses import dataclass

from magic_selftest.protocol import RoundMix, Transcript
from magic_selftest.strategies import DeviceModel
from magic_selftest.wire.prover import ProverStats, prover_loop
from magic_selftest.wire.referee import DEFAULT_TIMEOUT, referee_serve
from magic_selftest.wire.state_service import LocalEntanglementService
from magic_selftest.wire.transport import memory_pipe


@dataclass(frozen=True, slots=True)
class SessionResult:
    transcript: Transcript
    alice: ProverStats
    bob: ProverStats


async def run_memory_session(
    device: DeviceModel,
    rounds: int,
    mix: RoundMix,
    seed: int,
    *,
    timeout: float = DEFAULT_TIMEOUT,
) -> SessionResult:
    """Referee, both provers and the state service in one event loop, over memory pipes."""
    service = LocalEntanglementService.for_device(device, seed)
    referee_a, prover_a = memory_pipe()
    referee_b, prover_b = memory_pipe()

    async with asyncio.TaskGroup() as group:
        alice = group.create_task(prover_loop(device, "A", prover_a, service, timeout=timeout))
        bob = group.create_task(prover_loop(device, "B", prover_b, service, timeout=timeout))
        referee = group.create_task(
            referee_serve(device.n, mix, rounds, [referee_a, referee_b], seed, timeout=timeout)
        )
    return SessionResult(referee.result(), alice.result(), bob.result())
