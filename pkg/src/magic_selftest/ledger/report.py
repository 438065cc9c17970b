from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

PASS_TOLERANCE = 1e-9

SCALING_NOTE = (
    "delta bounds the state-dependent (anti)commutation errors consumed by the isometry "
    "step, which yields robustness O(n^{3/2} * delta); the constant inside that O(.) is "
    "not known, so no absolute robustness figure is reported"
)

PAIR_WORDING_NOTE = (
    "the n=3 pair anticommutation relation is worded as a statement about Bob's game-round "
    "observables while its inequality bounds Alice's paired X and Z observables; the "
    "ledger evaluates the inequality as written"
)


@dataclass(frozen=True, slots=True)
class Coefficients:
    """RHS = s0*sqrt(2 eps0) + s1*sqrt(2 eps1) + s2*sqrt(2 eps2)."""

    s0: float = 0.0
    s1: float = 0.0
    s2: float = 0.0

    def negated(self) -> Coefficients:
        return Coefficients(-self.s0, -self.s1, -self.s2)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.s0, self.s1, self.s2)


@dataclass(frozen=True, slots=True)
class BoundEntry:
    name: str
    coefficients: Coefficients
    rhs: float
    headline: bool = False
    lhs: float | None = None
    instance: tuple[int, ...] | None = None
    instances: int = 0

    @property
    def verified(self) -> bool:
        return self.lhs is not None

    @property
    def margin(self) -> float | None:
        return None if self.lhs is None else self.rhs - self.lhs

    @property
    def passed(self) -> bool | None:
        margin = self.margin
        return None if margin is None else margin >= -PASS_TOLERANCE

    def with_measurement(
        self, lhs: float, instance: tuple[int, ...] | None, instances: int
    ) -> BoundEntry:
        return replace(self, lhs=lhs, instance=instance, instances=instances)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "bound",
            "name": self.name,
            "headline": self.headline,
            "coefficients": list(self.coefficients.as_tuple()),
            "rhs": self.rhs,
            "lhs": self.lhs,
            "margin": self.margin,
            "pass": self.passed,
            "instance": None if self.instance is None else list(self.instance),
            "instances": self.instances,
        }


@dataclass(frozen=True, slots=True)
class BoundReport:
    n: int
    eps0: float
    eps1: float
    eps2: float
    entries: tuple[BoundEntry, ...]
    theta: float | None = None
    notes: tuple[str, ...] = field(default=(SCALING_NOTE,))

    @property
    def delta(self) -> float:
        """Largest headline bound: the input of the isometry step."""
        return max((e.rhs for e in self.entries if e.headline), default=0.0)

    @property
    def verified(self) -> bool:
        return any(e.verified for e in self.entries)

    @property
    def failures(self) -> tuple[BoundEntry, ...]:
        return tuple(e for e in self.entries if e.passed is False)

    @property
    def passed(self) -> bool:
        return not self.failures

    def entry(self, name: str) -> BoundEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def names(self) -> list[str]:
        return [e.name for e in self.entries]

    def summary(self) -> dict[str, Any]:
        return {
            "kind": "bound-report",
            "n": self.n,
            "eps0": self.eps0,
            "eps1": self.eps1,
            "eps2": self.eps2,
            "theta": self.theta,
            "delta": self.delta,
            "verified": self.verified,
            "pass": self.passed if self.verified else None,
            "notes": list(self.notes),
        }

    def records(self) -> list[dict[str, Any]]:
        return [self.summary(), *(e.to_dict() for e in self.entries)]

    def table(self) -> list[str]:
        head = f"n={self.n} eps0={self.eps0:.6g} eps1={self.eps1:.6g} eps2={self.eps2:.6g}"
        if self.theta is not None:
            head += f" theta={self.theta:.6g}"
        lines = [head, f"{'entry':<30} {'lhs':>14} {'rhs':>14} {'margin':>14}  status"]
        for e in self.entries:
            lhs = "-" if e.lhs is None else f"{e.lhs:.6e}"
            margin = "-" if e.margin is None else f"{e.margin:.6e}"
            status = "-" if e.passed is None else ("ok" if e.passed else "FAIL")
            lines.append(f"{e.name:<30} {lhs:>14} {e.rhs:>14.6e} {margin:>14}  {status}")
        lines.append(f"delta={self.delta:.12g}")
        lines.extend(f"note: {note}" for note in self.notes)
        return lines
