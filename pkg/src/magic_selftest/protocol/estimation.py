from __future__ import annotations

import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Any

from magic_selftest.errors import ContractError
from magic_selftest.protocol.correlations import FAMILY_NAMES
from magic_selftest.protocol.inputs import ROUND_NAMES
from magic_selftest.protocol.records import Transcript

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.01


def hoeffding_half_width(trials: int, alpha: float = DEFAULT_ALPHA) -> float:
    """Half-width of a (1 - alpha) interval for a mean of [-1, 1] samples."""
    if trials <= 0:
        return math.inf
    if not 0.0 < alpha < 1.0:
        raise ContractError(f"alpha must be in (0, 1), got {alpha}")
    return 2.0 * math.sqrt(math.log(2.0 / alpha) / (2.0 * trials))


@dataclass(frozen=True, slots=True)
class MemberEstimate:
    label: str
    family: int
    trials: int
    accepts: int
    half_width: float

    @property
    def rate(self) -> float:
        return self.accepts / self.trials

    @property
    def correlation(self) -> float:
        return 2.0 * self.rate - 1.0

    @property
    def epsilon(self) -> float:
        return min(2.0, max(0.0, 1.0 - self.correlation))

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "trials": self.trials,
            "accepts": self.accepts,
            "rate": self.rate,
            "correlation": self.correlation,
            "epsilon": self.epsilon,
            "half_width": self.half_width,
        }


@dataclass(frozen=True, slots=True)
class FamilyEstimate:
    family: int
    rounds: int
    members: tuple[MemberEstimate, ...]

    @property
    def name(self) -> str:
        return FAMILY_NAMES[self.family]

    @property
    def estimated(self) -> bool:
        return bool(self.members)

    @property
    def worst(self) -> MemberEstimate | None:
        if not self.members:
            return None
        return max(self.members, key=lambda m: (m.epsilon, m.label))

    @property
    def epsilon(self) -> float | None:
        worst = self.worst
        return None if worst is None else worst.epsilon

    @property
    def upper(self) -> float | None:
        """Largest member epsilon plus its half-width, capped at 2."""
        if not self.members:
            return None
        return min(2.0, max(m.epsilon + m.half_width for m in self.members))

    def to_dict(self) -> dict[str, Any]:
        worst = self.worst
        return {
            "family": self.name,
            "c": self.family,
            "rounds": self.rounds,
            "estimated": self.estimated,
            "epsilon": self.epsilon,
            "upper": self.upper,
            "worst": None if worst is None else worst.label,
            "half_width": None if worst is None else worst.half_width,
        }


@dataclass(frozen=True, slots=True)
class EpsilonReport:
    n: int
    alpha: float
    voided: int
    malformed: int
    families: dict[int, FamilyEstimate]

    def epsilon(self, c: int) -> float | None:
        family = self.families.get(c)
        return None if family is None else family.epsilon

    def upper(self, c: int) -> float | None:
        family = self.families.get(c)
        return None if family is None else family.upper

    @property
    def eps0(self) -> float | None:
        return self.epsilon(0)

    @property
    def eps1(self) -> float | None:
        return self.epsilon(1)

    @property
    def eps2(self) -> float | None:
        return self.epsilon(2)

    def summary(self) -> dict[str, Any]:
        return {
            "kind": "epsilon-report",
            "n": self.n,
            "alpha": self.alpha,
            "voided": self.voided,
            "malformed": self.malformed,
            **{FAMILY_NAMES[c]: self.epsilon(c) for c in FAMILY_NAMES},
            **{f"{FAMILY_NAMES[c]}_upper": self.upper(c) for c in FAMILY_NAMES},
        }

    def records(self) -> list[dict[str, Any]]:
        """Summary first, then one record per family and one per member."""
        rows: list[dict[str, Any]] = [self.summary()]
        for family in self.families.values():
            rows.append({"kind": "family", **family.to_dict()})
            rows.extend({"kind": "member", **m.to_dict()} for m in family.members)
        return rows


def estimate_epsilons(transcript: Transcript, *, alpha: float = DEFAULT_ALPHA) -> EpsilonReport:
    """Per-member accept rates and the worst deficit per correlation family.

    Voided rounds are skipped; malformed rounds carry all-false members and count as
    failures. Each member of a multi-member round gets its own Bernoulli sample.
    """
    trials: dict[str, int] = defaultdict(int)
    accepts: dict[str, int] = defaultdict(int)
    family_of: dict[str, int] = {}
    rounds: dict[int, int] = defaultdict(int)
    voided = malformed = 0

    for record in transcript.records:
        if record.voided:
            voided += 1
            continue
        malformed += int(record.malformed)
        rounds[record.c] += 1
        for label, ok in record.sub.items():
            trials[label] += 1
            accepts[label] += int(ok)
            family_of[label] = record.c

    families: dict[int, FamilyEstimate] = {}
    for c in FAMILY_NAMES:
        labels = sorted(lbl for lbl, fam in family_of.items() if fam == c)
        members = tuple(
            MemberEstimate(
                label, c, trials[label], accepts[label], hoeffding_half_width(trials[label], alpha)
            )
            for label in labels
        )
        if rounds.get(c):
            families[c] = FamilyEstimate(c, rounds[c], members)
        else:
            logger.info(
                "No %s rounds in transcript; %s not estimated", ROUND_NAMES[c], FAMILY_NAMES[c]
            )

    report = EpsilonReport(transcript.n, alpha, voided, malformed, families)
    logger.info(
        "Estimated eps0=%s eps1=%s eps2=%s (voided=%d, malformed=%d)",
        report.eps0,
        report.eps1,
        report.eps2,
        voided,
        malformed,
    )
    return report


def report_from_summary(summary: dict[str, Any]) -> dict[int, float]:
    """Upper confidence ends per family from a stored report summary, 0 where absent."""
    if summary.get("kind") != "epsilon-report":
        raise ContractError("Not an epsilon report summary record")
    out: dict[int, float] = {}
    for c, name in FAMILY_NAMES.items():
        value = summary.get(f"{name}_upper")
        out[c] = float(value) if value is not None else 0.0
    return out
