from __future__ import annotations

from magic_selftest.ledger.formulas import (
    CatalogItem,
    Robustness,
    bound_catalog,
    catalog_items,
    delta_coefficient,
    final_robustness,
    loglog_slope,
    ratio_table,
    scaling_ratio,
    state_estimate_bound,
)
from magic_selftest.ledger.observables import UnknownObservables, word
from magic_selftest.ledger.report import (
    PASS_TOLERANCE,
    SCALING_NOTE,
    BoundEntry,
    BoundReport,
    Coefficients,
)
from magic_selftest.ledger.verify import (
    chain_order,
    device_epsilons,
    ledger_verify,
    noisy_honest_device,
    select_instances,
    verify_grid,
)

__all__ = [
    "PASS_TOLERANCE",
    "SCALING_NOTE",
    "BoundEntry",
    "BoundReport",
    "CatalogItem",
    "Coefficients",
    "Robustness",
    "UnknownObservables",
    "bound_catalog",
    "catalog_items",
    "chain_order",
    "delta_coefficient",
    "device_epsilons",
    "final_robustness",
    "ledger_verify",
    "loglog_slope",
    "noisy_honest_device",
    "ratio_table",
    "scaling_ratio",
    "select_instances",
    "state_estimate_bound",
    "verify_grid",
    "word",
]
