"""One budgeted navigation attempt: drive an agent against a browser env.

A trajectory records (Action, Observation) pairs: step 0 is the initial
visit of the start URL (the env reset), every later step is one
agent-decided action and the observation env.apply returned. The budget b
caps recorded steps, counting the reset as one action. Environment or
agent failures fold into a BudgetExhausted outcome whose final step carries
an error observation, so the reflection path can mark the arm infeasible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Protocol

from .errors import EnvironmentFailure
from .ranking import Query

if TYPE_CHECKING:
    from .memory import EpisodeRecord

OBSERVATION_CHAR_LIMIT = 20_000

ACTION_KINDS = ("visit", "click", "type", "scroll", "back", "finish")

COMPLETED = "completed"
BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass(frozen=True)
class NavigationConfig:
    budget: int = 10

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")


@dataclass(frozen=True)
class Action:
    kind: str
    target: str | None = None
    argument: str | None = None
    result: str | None = None
    source: str | None = None

    def __post_init__(self):
        if self.kind not in ACTION_KINDS:
            raise ValueError(f"unknown action kind {self.kind!r}")
        if self.kind == "finish" and (self.result is None or self.source is None):
            raise ValueError("finish requires result and source")
        if self.kind == "visit" and not self.target:
            raise ValueError("visit requires a URL target")

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        for key in ("target", "argument", "result", "source"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Action":
        return cls(kind=data["kind"], target=data.get("target"),
                   argument=data.get("argument"), result=data.get("result"),
                   source=data.get("source"))


@dataclass
class Observation:
    url: str
    content: str = ""
    interactables: list[dict] = field(default_factory=list)
    error: str | None = None

    def to_dict(self) -> dict:
        out: dict = {"url": self.url, "content": self.content,
                     "interactables": list(self.interactables)}
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass
class Trajectory:
    start_url: str
    steps: list[tuple[Action, Observation]] = field(default_factory=list)

    def actions(self) -> list[Action]:
        return [a for a, _ in self.steps]

    def final_observation(self) -> Observation | None:
        return self.steps[-1][1] if self.steps else None


@dataclass(frozen=True)
class NavigationOutcome:
    status: str  # COMPLETED | BUDGET_EXHAUSTED
    result: str | None = None
    source: str | None = None

    @property
    def completed(self) -> bool:
        return self.status == COMPLETED


class AgentAdapter(Protocol):
    def decide(self, query: Query, start_url: str, memory_context: "list[EpisodeRecord]",
               trajectory: Trajectory, observation: Observation) -> Action:
        ...


class BrowserEnv(Protocol):
    def reset(self, url: str) -> Observation:
        """Load the start URL; raises EnvironmentFailure if it is dead."""
        ...

    def apply(self, action: Action) -> Observation:
        ...


def _truncated(obs: Observation) -> Observation:
    if len(obs.content) <= OBSERVATION_CHAR_LIMIT:
        return obs
    return Observation(url=obs.url, content=obs.content[:OBSERVATION_CHAR_LIMIT],
                       interactables=obs.interactables, error=obs.error)


def navigate(query: Query, start_url: str, memory_context: "list[EpisodeRecord]",
             agent: AgentAdapter, env: BrowserEnv,
             config: NavigationConfig) -> tuple[Trajectory, NavigationOutcome]:
    """Run one attempt from start_url under the action budget.

    memory_context is passed verbatim to every decide call. Returns the full
    trajectory plus Completed(result, source) when the agent emitted finish,
    else BudgetExhausted.
    """
    trajectory = Trajectory(start_url=start_url)
    try:
        obs = _truncated(env.reset(start_url))
    except EnvironmentFailure as exc:
        trajectory.steps.append((
            Action(kind="visit", target=start_url),
            Observation(url=start_url, error=f"environment-failure: {exc}"),
        ))
        return trajectory, NavigationOutcome(status=BUDGET_EXHAUSTED)
    trajectory.steps.append((Action(kind="visit", target=start_url), obs))

    while len(trajectory.steps) < config.budget:
        try:
            action = agent.decide(query, start_url, memory_context, trajectory, obs)
        except Exception as exc:
            trajectory.steps.append((
                Action(kind="visit", target=obs.url or start_url),
                Observation(url=obs.url or start_url,
                            error=f"agent-failure: {exc}"),
            ))
            return trajectory, NavigationOutcome(status=BUDGET_EXHAUSTED)
        obs = _truncated(env.apply(action))
        trajectory.steps.append((action, obs))
        if action.kind == "finish":
            return trajectory, NavigationOutcome(
                status=COMPLETED, result=action.result, source=action.source)
    return trajectory, NavigationOutcome(status=BUDGET_EXHAUSTED)
