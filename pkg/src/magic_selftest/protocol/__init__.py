from __future__ import annotations

from magic_selftest.protocol.correlations import (
    FAMILY_NAMES,
    ExactEpsilons,
    exact_correlations,
    exact_epsilons,
    product_rule_correlations,
)
from magic_selftest.protocol.estimation import (
    DEFAULT_ALPHA,
    EpsilonReport,
    FamilyEstimate,
    MemberEstimate,
    estimate_epsilons,
    hoeffding_half_width,
    report_from_summary,
)
from magic_selftest.protocol.inputs import (
    RoundInputs,
    RoundMix,
    allowed_round_types,
    device_rng,
    input_rng,
    sample_inputs,
)
from magic_selftest.protocol.predicates import (
    Member,
    RoundVerdict,
    evaluate_round,
    family_members,
    round_members,
)
from magic_selftest.protocol.records import (
    RoundRecord,
    Transcript,
    read_transcript,
    write_transcript,
)
from magic_selftest.protocol.runner import (
    exact_acceptance,
    exact_acceptance_by_type,
    judge,
    make_sampler,
    run_protocol,
    run_round,
)

__all__ = [
    "DEFAULT_ALPHA",
    "FAMILY_NAMES",
    "EpsilonReport",
    "ExactEpsilons",
    "FamilyEstimate",
    "Member",
    "MemberEstimate",
    "RoundInputs",
    "RoundMix",
    "RoundRecord",
    "RoundVerdict",
    "Transcript",
    "allowed_round_types",
    "device_rng",
    "estimate_epsilons",
    "evaluate_round",
    "exact_acceptance",
    "exact_acceptance_by_type",
    "exact_correlations",
    "exact_epsilons",
    "family_members",
    "hoeffding_half_width",
    "input_rng",
    "judge",
    "make_sampler",
    "product_rule_correlations",
    "read_transcript",
    "report_from_summary",
    "round_members",
    "run_protocol",
    "run_round",
    "sample_inputs",
    "write_transcript",
]
