"""Scripted agent and reflector oracles over synthetic sites.

The agent is greedy-lexical: finish when the golden answer is on screen,
otherwise click the unvisited link whose anchor shares the most tokens with
the query, skipping any action that would replay a prior episode from
memory (first-divergence avoidance). The reflector is a ground-truth
oracle: adequate means the output contains the golden answer, feasible
means a target is within `horizon` hops of where the attempt ended.
"""

from __future__ import annotations

from ..memory import EpisodeRecord
from ..navigation import Action, Observation, Trajectory
from ..ranking import Query, tokenize
from .sites import SyntheticSite


class ScriptedLexicalAgent:
    def __init__(self, site: SyntheticSite):
        self.site = site

    def decide(self, query: Query, start_url: str,
               memory_context: list[EpisodeRecord], trajectory: Trajectory,
               observation: Observation) -> Action:
        if observation.error is not None:
            return Action(kind="back")
        if self.site.golden_answer in observation.content:
            return Action(kind="finish", result=self.site.golden_answer,
                          source=observation.url)

        qtokens = set(tokenize(query.text))
        visited = {obs.url for _, obs in trajectory.steps}
        so_far = tuple((a.kind, a.target) for a in trajectory.actions())
        blocked = set()
        for episode in memory_context:
            sig = episode.action_signature()
            if len(sig) > len(so_far) and sig[:len(so_far)] == so_far:
                blocked.add(sig[len(so_far)])

        candidates = []
        for idx, item in enumerate(observation.interactables):
            if item["url"] in visited:
                continue
            overlap = len(set(tokenize(item["text"])) & qtokens)
            candidates.append((-overlap, idx, item["ref"]))
        candidates.sort()
        if not candidates:
            return Action(kind="back")
        for _, _, ref in candidates:
            if ("click", ref) not in blocked:
                return Action(kind="click", target=ref)
        # every option would repeat a failed branch; take the best anyway
        return Action(kind="click", target=candidates[0][2])


class ScriptedReflector:
    def __init__(self, site: SyntheticSite, horizon: int):
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        self.site = site
        self.horizon = horizon

    def judge_completed(self, query: Query, trajectory: Trajectory,
                        output: str) -> dict:
        final = trajectory.final_observation()
        source = final.url if final is not None else self.site.root_url
        if self.site.golden_answer in (output or ""):
            return {"status": "adequate", "reason": "output contains the golden answer",
                    "output": output, "source": source}
        return {"status": "inadequate", "reason": "output lacks the golden answer",
                "output": output, "source": source}

    def judge_exhausted(self, query: Query, trajectory: Trajectory) -> dict:
        final = trajectory.final_observation()
        if final is None or final.error is not None:
            return {"status": "infeasible", "reason": "attempt ended in an error"}
        hops = self.site.min_hops_to_target(final.url, cap=self.horizon)
        if hops is not None and hops <= self.horizon:
            return {"status": "feasible",
                    "reason": f"target within {hops} hops of final page"}
        return {"status": "infeasible",
                "reason": f"no target within {self.horizon} hops of final page"}
