from __future__ import annotations

import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from magic_selftest.errors import ContractError
from magic_selftest.protocol.inputs import RoundMix, device_rng, input_rng, sample_inputs
from magic_selftest.protocol.predicates import check_inputs, evaluate_round
from magic_selftest.protocol.records import RoundRecord, Transcript
from magic_selftest.quantum import JointSampler
from magic_selftest.strategies import DeviceModel

logger = logging.getLogger(__name__)


def make_sampler(device: DeviceModel) -> JointSampler:
    return JointSampler(device.shared_state())


def judge(
    n: int, round_id: int, c: int, x: int, y: int, a: Sequence[int], b: Sequence[int]
) -> RoundRecord:
    """Referee-side evaluation shared by the in-process and wire paths."""
    verdict = evaluate_round(n, c, x, y, a, b)
    if verdict.malformed:
        logger.warning(
            "Round %d: malformed answer (c=%d, |a|=%d, |b|=%d)", round_id, c, len(a), len(b)
        )
    return RoundRecord(
        round_id=round_id,
        c=c,
        x=x,
        y=y,
        a=tuple(int(v) for v in a),
        b=tuple(int(v) for v in b),
        accept=verdict.accept,
        sub=verdict.sub,
        malformed=verdict.malformed,
    )


def run_round(
    device: DeviceModel,
    c: int,
    x: int,
    y: int,
    rng: np.random.Generator,
    *,
    round_id: int = 0,
    sampler: JointSampler | None = None,
) -> RoundRecord:
    """One round: Alice sees x only, Bob sees (c, y); outcomes are sampled jointly."""
    check_inputs(device.n, c, x, y)
    sampler = sampler or make_sampler(device)
    a, b = sampler.sample(device.alice_assign(x), device.bob_assign(c, y), rng)
    record = judge(device.n, round_id, c, x, y, a, b)
    logger.debug("Round %d c=%d x=%d y=%d accept=%s", round_id, c, x, y, record.accept)
    return record


def check_mix(device: DeviceModel, mix: RoundMix) -> None:
    mix.check(device.n)
    missing = [c for c in mix.types if c not in device.round_types]
    if missing:
        raise ContractError(f"{device.kind} device has no Bob sets for round types {missing}")


def run_protocol(
    device: DeviceModel,
    rounds: int,
    mix: RoundMix,
    seed: int,
    *,
    workers: int = 1,
) -> Transcript:
    """Run ``rounds`` rounds; round r draws inputs and outcomes from streams keyed by (seed, r)."""
    if rounds < 1:
        raise ContractError(f"rounds must be >= 1, got {rounds}")
    check_mix(device, mix)
    sampler = make_sampler(device)

    def one(round_id: int) -> RoundRecord:
        c, x, y = sample_inputs(device.n, mix, input_rng(seed, round_id))
        return run_round(
            device, c, x, y, device_rng(seed, round_id), round_id=round_id, sampler=sampler
        )

    logger.info(
        "Running %d rounds on %s device (n=%d, seed=%d, workers=%d)",
        rounds,
        device.kind,
        device.n,
        seed,
        workers,
    )
    if workers <= 1:
        records = [one(r) for r in range(rounds)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, range(rounds), chunksize=256))

    transcript = Transcript(n=device.n, seed=seed, records=tuple(records))
    logger.info("Accept counts per round type: %s", transcript.accept_stats())
    return transcript


def exact_acceptance(
    device: DeviceModel,
    c: int,
    x: int,
    y: int,
    *,
    sampler: JointSampler | None = None,
) -> float:
    """Acceptance probability of one input triple, summed over the exact outcome law."""
    check_inputs(device.n, c, x, y)
    sampler = sampler or make_sampler(device)
    alice = device.alice_assign(x)
    dist = sampler.distribution(alice, device.bob_assign(c, y))
    split = len(alice)
    total = 0.0
    for bits, prob in dist.items():
        if evaluate_round(device.n, c, x, y, bits[:split], bits[split:]).accept:
            total += prob
    return total


def exact_acceptance_by_type(device: DeviceModel, c: int) -> float:
    """Average exact acceptance of round type c under uniform x and y."""
    xs = (1, 2, 3) if c == 0 else (1, 3)
    sampler = make_sampler(device)
    values = [
        exact_acceptance(device, c, x, y, sampler=sampler)
        for x in xs
        for y in range(1, device.n + 1)
    ]
    return float(np.mean(values))
