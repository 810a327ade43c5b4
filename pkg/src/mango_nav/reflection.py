"""Classify finished attempts and map statuses to bandit rewards.

Completed attempts are judged adequate/inadequate, budget-exhausted ones
feasible/infeasible. Adapters must return a JSON object (or dict) shaped
{status, reason[, output, source]} with the status strings exactly
lowercase; anything else counts as malformed and is retried once before the
conservative infeasible fallback kicks in.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Protocol

from .errors import AdapterFailure
from .navigation import NavigationOutcome, Trajectory
from .ranking import Query

ADEQUATE = "adequate"
INADEQUATE = "inadequate"
FEASIBLE = "feasible"
INFEASIBLE = "infeasible"

_COMPLETED_STATUSES = (ADEQUATE, INADEQUATE)
_EXHAUSTED_STATUSES = (FEASIBLE, INFEASIBLE)


@dataclass(frozen=True)
class ReflectionVerdict:
    status: str
    reason: str
    output: str | None = None
    source: str | None = None

    def __post_init__(self):
        if self.status in _COMPLETED_STATUSES:
            if self.output is None or self.source is None:
                raise ValueError(f"{self.status} verdict requires output and source")
        elif self.status in _EXHAUSTED_STATUSES:
            if self.output is not None or self.source is not None:
                raise ValueError(f"{self.status} verdict carries no output/source")
        else:
            raise ValueError(f"unknown reflection status {self.status!r}")

    def to_dict(self) -> dict:
        out: dict = {"status": self.status, "reason": self.reason}
        if self.output is not None:
            out["output"] = self.output
        if self.source is not None:
            out["source"] = self.source
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ReflectionVerdict":
        return cls(status=data["status"], reason=data["reason"],
                   output=data.get("output"), source=data.get("source"))


@dataclass(frozen=True)
class RewardDecision:
    terminate: bool
    answer: str | None = None
    source: str | None = None
    reward: int | None = None
    exhaust: bool = False

    def __post_init__(self):
        if self.exhaust and self.reward != 0:
            raise ValueError("exhaust is only valid with reward 0")


class ReflectorAdapter(Protocol):
    def judge_completed(self, query: Query, trajectory: Trajectory,
                        output: str) -> dict | str:
        """Wire contract: {status: adequate|inadequate, reason, output, source}."""
        ...

    def judge_exhausted(self, query: Query, trajectory: Trajectory) -> dict | str:
        """Wire contract: {status: feasible|infeasible, reason}."""
        ...


def _parse_verdict(raw, outcome: NavigationOutcome) -> ReflectionVerdict:
    if isinstance(raw, str):
        raw = json.loads(raw)
    if not isinstance(raw, dict):
        raise ValueError("reflector response is not an object")
    status = raw.get("status")
    reason = raw.get("reason")
    if not isinstance(reason, str):
        raise ValueError("reflector response missing reason")
    allowed = _COMPLETED_STATUSES if outcome.completed else _EXHAUSTED_STATUSES
    if status not in allowed:
        raise ValueError(f"status {status!r} not in {allowed}")
    if status in _COMPLETED_STATUSES:
        return ReflectionVerdict(
            status=status, reason=reason,
            output=raw.get("output", outcome.result),
            source=raw.get("source", outcome.source))
    return ReflectionVerdict(status=status, reason=reason)


def reflect(query: Query, trajectory: Trajectory, outcome: NavigationOutcome,
            reflector: ReflectorAdapter) -> ReflectionVerdict:
    """Route to the right judgment family; one retry, then conservative
    infeasible so a broken reflector frees budget for other arms."""
    for _ in range(2):
        try:
            if outcome.completed:
                raw = reflector.judge_completed(query, trajectory, outcome.result or "")
            else:
                raw = reflector.judge_exhausted(query, trajectory)
            return _parse_verdict(raw, outcome)
        except (AdapterFailure, ValueError, KeyError, TypeError,
                json.JSONDecodeError):
            continue
    return ReflectionVerdict(status=INFEASIBLE, reason="reflector-failure")


def decide_reward(verdict: ReflectionVerdict) -> RewardDecision:
    """Status table: adequate terminates; inadequate and feasible earn r=1;
    infeasible earns r=0 and exhausts the arm."""
    if verdict.status == ADEQUATE:
        return RewardDecision(terminate=True, answer=verdict.output,
                              source=verdict.source)
    if verdict.status == INADEQUATE:
        return RewardDecision(terminate=False, reward=1, exhaust=False)
    if verdict.status == FEASIBLE:
        return RewardDecision(terminate=False, reward=1, exhaust=False)
    if verdict.status == INFEASIBLE:
        return RewardDecision(terminate=False, reward=0, exhaust=True)
    raise ValueError(f"unknown status {verdict.status!r}")  # unreachable
