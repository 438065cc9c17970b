from __future__ import annotations

import asyncio
import math
from pathlib import Path

import numpy as np
import pytest

from magic_selftest.cli import EXIT_OK, main
from magic_selftest.ledger import noisy_honest_device, verify_grid
from magic_selftest.pauli import PauliString
from magic_selftest.protocol import (
    RoundMix,
    estimate_epsilons,
    exact_correlations,
    exact_epsilons,
    run_protocol,
)
from magic_selftest.quantum import (
    NoiseModel,
    alice_operator,
    bell_expectation,
    bob_operator,
    expectation,
    prepare,
)
from magic_selftest.storage import read_line_records
from magic_selftest.strategies import honest_device, padded_adversary, standard_square_device
from magic_selftest.wire import run_memory_session

pytestmark = pytest.mark.slow


@pytest.mark.parametrize("n", [3, 7])
def test_honest_devices_never_lose(n: int) -> None:
    device = honest_device(n)
    for label, value in exact_correlations(device).items():
        assert value == pytest.approx(1.0, abs=1e-12), label
    transcript = run_protocol(device, 10_000, RoundMix.uniform(n), seed=n, workers=4)
    assert all(r.accept for r in transcript.records)


def test_analytic_engine_matches_dense_at_seven_pairs() -> None:
    noise = NoiseModel.y_rotation(0.3)
    state = prepare(7, noise)
    rng = np.random.default_rng(7)
    for _ in range(200):
        p_a = PauliString("".join(rng.choice(list("IXYZ"), size=7)))
        q_b = PauliString("".join(rng.choice(list("IXYZ"), size=7)))
        dense = expectation(alice_operator(p_a, 7) @ bob_operator(q_b, 7), state).real
        assert bell_expectation(7, p_a, q_b, noise) == pytest.approx(dense, abs=1e-12)


def test_standard_square_fails_local_checks() -> None:
    device = standard_square_device()
    games = run_protocol(device, 5_000, RoundMix({0: 1.0}), seed=1)
    assert all(r.accept for r in games.records)

    checks = run_protocol(device, 100_000, RoundMix({1: 1.0}), seed=2, workers=4)
    worst = estimate_epsilons(checks).families[1].worst
    assert worst is not None
    assert worst.epsilon - worst.half_width > 0.0


def test_padded_adversary_fails_the_checks_but_wins_games() -> None:
    device = padded_adversary(7)
    games = run_protocol(device, 5_000, RoundMix({0: 1.0}), seed=1)
    assert all(r.accept for r in games.records)

    exact = exact_epsilons(device)
    c = 2 if exact.eps2 >= exact.eps1 else 1
    checks = run_protocol(device, 100_000, RoundMix({c: 1.0}), seed=2, workers=4)
    worst = estimate_epsilons(checks).families[c].worst
    assert worst is not None
    assert worst.epsilon - worst.half_width > 0.0


def test_estimator_interval_covers_the_exact_deficit() -> None:
    theta = 0.1
    device = noisy_honest_device(3, theta)
    exact = 1 - math.cos(theta)
    covered = 0
    for seed in range(100):
        transcript = run_protocol(device, 5_000, RoundMix({1: 1.0}), seed=seed)
        family = estimate_epsilons(transcript).families[1]
        worst = family.worst
        assert worst is not None
        if abs(worst.epsilon - exact) <= worst.half_width:
            covered += 1
    assert covered >= 99


def test_wire_session_matches_in_process_run() -> None:
    device = honest_device(3, NoiseModel.y_rotation(0.2))
    mix = RoundMix.uniform(3)
    expected = run_protocol(device, 10_000, mix, seed=5)
    result = asyncio.run(run_memory_session(device, 10_000, mix, 5))
    assert result.transcript.accept_stats() == expected.accept_stats()
    assert result.transcript == expected


@pytest.mark.parametrize("n", [3, 7])
def test_ledger_holds_over_the_theta_grid(n: int) -> None:
    reports = verify_grid(n, [0.0, 0.05, 0.1, 0.2, 0.5], workers=4)
    for report in reports:
        assert report.passed, report.table()
    for entry in reports[0].entries:
        if entry.lhs is not None:
            assert entry.lhs == pytest.approx(0.0, abs=1e-9), entry.name


def test_noisy_rectangle_estimates_bracket_the_exact_deficits() -> None:
    theta = 0.1
    device = noisy_honest_device(7, theta)
    transcript = run_protocol(device, 6000, RoundMix.uniform(7), seed=11, workers=4)
    report = estimate_epsilons(transcript)
    exact = exact_epsilons(device)

    assert exact.eps1 == pytest.approx(1 - math.cos(theta))
    for c in (0, 1, 2):
        family = report.families[c]
        assert family.upper is not None
        assert family.epsilon is not None
        assert exact.get(c) <= family.upper
        widest = max(m.half_width for m in family.members)
        assert family.epsilon <= exact.get(c) + widest


def test_ledger_holds_on_the_eleven_column_rectangle() -> None:
    (report,) = verify_grid(11, [0.1], workers=2)
    assert report.passed
    assert report.verified


def test_cli_pipeline_from_simulation_to_bounds(tmp_path: Path) -> None:
    sim = [
        "simulate",
        "--config",
        str(Path(__file__).resolve().parents[2] / "conf" / "simulate-noisy.yml"),
        "--rounds",
        "4000",
        "--out-dir",
        str(tmp_path),
    ]
    assert main(sim) == EXIT_OK
    report = tmp_path / "report.jsonl"
    assert main(["bounds", "--from-report", str(report), "--out-dir", str(tmp_path)]) == EXIT_OK

    header, rows = read_line_records(tmp_path / "bounds.jsonl")
    assert header["n"] == 7
    assert rows[0]["kind"] == "bound-report"
    assert rows[0]["delta"] > 0.0
