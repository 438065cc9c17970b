from __future__ import annotations

import math

import numpy as np
import pytest

from magic_selftest.errors import ContractError, ResourceLimitError
from magic_selftest.ledger import (
    chain_order,
    device_epsilons,
    ledger_verify,
    noisy_honest_device,
    select_instances,
    verify_grid,
)
from magic_selftest.strategies import honest_device, padded_adversary


def test_chain_order_is_a_permutation() -> None:
    sigma = chain_order(1, 7, 7)
    assert sigma == (1, 6, 5, 4, 2, 3, 7)
    for n in (7, 11):
        for i in range(1, n + 1):
            for v in range(1, n + 1):
                if i == v:
                    continue
                order = chain_order(i, v, n)
                assert sorted(order) == list(range(1, n + 1))
                assert order[0] == i
                assert order[-1] == v


def test_chain_order_rejects_bad_arguments() -> None:
    with pytest.raises(ContractError):
        chain_order(1, 1, 7)
    with pytest.raises(ContractError):
        chain_order(1, 2, 5)


def test_select_instances_spreads_evenly() -> None:
    items = [(i,) for i in range(10)]
    assert select_instances(items, None) == items
    assert select_instances(items, 20) == items
    picked = select_instances(items, 3)
    assert len(picked) == 3
    assert picked[0] == (0,)
    assert picked[-1] == (9,)
    with pytest.raises(ContractError):
        select_instances(items, 0)


def test_device_epsilons_under_rotation() -> None:
    theta = 0.3
    eps0, eps1, eps2 = device_epsilons(noisy_honest_device(7, theta))
    assert eps0 == pytest.approx(1 - math.cos(theta) ** 6)
    assert eps1 == pytest.approx(1 - math.cos(theta))
    assert eps2 == pytest.approx(1 - math.cos(theta) ** 2)


def test_square_ledger_passes_for_the_ideal_device() -> None:
    report = ledger_verify(honest_device(3))
    assert report.verified
    assert report.passed
    assert report.theta == 0.0
    for entry in report.entries:
        assert entry.lhs == pytest.approx(0.0, abs=1e-9)
        assert entry.instances > 0


@pytest.mark.parametrize("theta", [0.05, 0.2])
def test_square_ledger_passes_under_noise(theta: float) -> None:
    report = ledger_verify(noisy_honest_device(3, theta))
    assert report.passed
    assert report.theta == theta
    # the correlation entries are tight for rotated Bell pairs
    entry = report.entry("correlation_x")
    assert entry.lhs == pytest.approx(entry.rhs)


def test_rectangle_ledger_passes_on_a_spread_of_instances() -> None:
    report = ledger_verify(noisy_honest_device(7, 0.1), max_instances=4, workers=2)
    assert report.passed
    assert all(0 < e.instances <= 4 for e in report.entries)
    assert report.entry("chain_cancelled").verified


def test_injected_fault_is_detected() -> None:
    report = ledger_verify(noisy_honest_device(3, 0.2), inject_fault="correlation_x")
    assert not report.passed
    assert [e.name for e in report.failures] == ["correlation_x"]
    assert report.summary()["pass"] is False


def test_ledger_rejects_unsuitable_devices() -> None:
    with pytest.raises(ContractError) as exc:
        ledger_verify(padded_adversary(7))
    assert "honest-like" in str(exc.value)
    with pytest.raises(ResourceLimitError):
        ledger_verify(honest_device(15))


def test_verify_grid_keeps_theta_order() -> None:
    reports = verify_grid(3, [0.2, 0.0])
    assert [r.theta for r in reports] == [0.2, 0.0]
    assert all(r.passed for r in reports)


def test_report_rendering() -> None:
    report = ledger_verify(honest_device(3))
    rows = report.records()
    assert rows[0]["kind"] == "bound-report"
    assert rows[0]["pass"] is True
    assert {row["kind"] for row in rows[1:]} == {"bound"}
    lines = report.table()
    assert lines[0].startswith("n=3 eps0=0")
    assert any(line.startswith("delta=") for line in lines)
    assert lines[-1].startswith("note: ")


@pytest.mark.parametrize(("n", "limit"), [(3, None), (7, 2)])
def test_margins_shrink_like_the_square_root_of_eps(n: int, limit: int | None) -> None:
    thetas = np.geomspace(1e-3, 1e-1, 4)
    reports = [
        ledger_verify(noisy_honest_device(n, float(theta)), max_instances=limit)
        for theta in thetas
    ]
    log_eps = np.log([report.eps1 for report in reports])

    for name in ("correlation_x", "correlation_z"):
        for report in reports:
            assert report.entry(name).margin == pytest.approx(0.0, abs=1e-9)

    shrinking = []
    for name in reports[0].names():
        entries = [report.entry(name) for report in reports]
        margins = [e.margin for e in entries]
        assert all(m is not None and m >= -1e-9 for m in margins), name
        if all(m is not None and m >= 0.05 * e.rhs for m, e in zip(margins, entries, strict=True)):
            slope = np.polyfit(log_eps, np.log(np.array(margins, dtype=float)), 1)[0]
            assert slope == pytest.approx(0.5, abs=0.05), name
            shrinking.append(name)
    # entries whose left-hand side vanishes for Pauli devices
    assert {"bob_commutation_xx", "alice_anticommutation"} <= set(shrinking)
