"""The main loop: structure analysis, then iterate select/navigate/reflect.

One run: crawl + rank + keyword search build the candidate set once; the
bandit then allocates at most T navigation attempts across the arms,
feeding reflection verdicts back as rewards, storing every non-terminal
attempt in episodic memory, and appending every observable step to an
event trace that replays bit-for-bit under the same config and fixtures.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .bandit import BanditConfig, init_arms
from .crawler import CrawlConfig, PageFetcher, crawl
from .errors import AllArmsExhausted, SearchUnavailable
from .memory import EpisodeRecord, MemoryStore
from .navigation import AgentAdapter, BrowserEnv, NavigationConfig, navigate
from .ranking import (
    KeywordAdapter,
    Query,
    RankingConfig,
    build_index,
    generate_search_keywords,
    rank_candidates,
)
from .reflection import INADEQUATE, ReflectorAdapter, decide_reward, reflect
from .search import CandidateSet, SearchClient, build_candidate_set, site_search

ANSWERED = "answered"
UNANSWERED = "unanswered"


@dataclass
class AdapterBundle:
    agent: AgentAdapter
    reflector: ReflectorAdapter
    keyworder: KeywordAdapter
    fetcher: PageFetcher
    env: BrowserEnv
    search: SearchClient | None = None  # None disables search augmentation


@dataclass
class RunConfig:
    query: Query
    root_url: str
    adapters: AdapterBundle
    max_iterations: int = 10
    search_top_k: int = 10
    navigation: NavigationConfig = field(default_factory=NavigationConfig)
    crawl: CrawlConfig | None = None  # defaults to CrawlConfig(root_url)
    ranking: RankingConfig = field(default_factory=RankingConfig)
    bandit: BanditConfig = field(default_factory=BanditConfig)

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.crawl is None:
            self.crawl = CrawlConfig(root_url=self.root_url)


@dataclass
class RunEvent:
    kind: str
    payload: dict

    def to_line(self) -> str:
        return json.dumps({"kind": self.kind, "payload": self.payload},
                          ensure_ascii=False, separators=(",", ":"))


@dataclass
class RunResult:
    status: str
    answer: str | None
    source: str | None
    iterations_used: int
    total_actions: int
    best_partial: str | None
    arm_snapshots: list[dict]
    events: list[RunEvent]

    @property
    def answered(self) -> bool:
        return self.status == ANSWERED

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "answer": self.answer,
            "source": self.source,
            "iterations_used": self.iterations_used,
            "total_actions": self.total_actions,
            "best_partial": self.best_partial,
        }


def analyze_structure(config: RunConfig, trace: list[RunEvent] | None = None,
                      ) -> CandidateSet:
    """Crawl, rank top-k, search-augment, merge. Emits crawl-done and
    candidates-built events into `trace`. Search failure degrades to
    crawl-only candidates; a dead root propagates RootUnreachable."""
    events = trace if trace is not None else []
    adapters = config.adapters
    crawl_result = crawl(config.crawl, adapters.fetcher)
    events.append(RunEvent("crawl-done", {
        "root_domain": crawl_result.root_domain,
        "pages": len(crawl_result.pages),
        "skipped": len(crawl_result.skipped),
    }))

    index = build_index(crawl_result)
    crawl_top = rank_candidates(crawl_result, config.query, config.ranking)

    keywords = ""
    search_urls: list[str] = []
    search_used = False
    if adapters.search is not None:
        keywords = generate_search_keywords(config.query, adapters.keyworder)
        try:
            search_urls = site_search(keywords, crawl_result.root_domain,
                                      adapters.search, k=config.search_top_k)
            search_used = True
        except SearchUnavailable:
            search_urls = []

    candidates = build_candidate_set(
        crawl_top, search_urls, crawl_result, config.query, adapters.fetcher,
        config.ranking, stats=index.stats)
    events.append(RunEvent("candidates-built", {
        "keywords": keywords,
        "search_used": search_used,
        "count": len(candidates.arms_input),
        "arms": candidates.to_dicts(),
    }))
    return candidates


def run(config: RunConfig, memory: MemoryStore | None = None,
        candidates: CandidateSet | None = None) -> RunResult:
    """Execute one full task run; see the module docstring for the loop.

    `candidates` overrides structure analysis (used by ablation policies);
    `memory` defaults to a fresh in-memory store.
    """
    events: list[RunEvent] = []
    if memory is None:
        memory = MemoryStore()
    if candidates is None:
        candidates = analyze_structure(config, events)

    state = init_arms(candidates, config.bandit)
    snapshots = [state.snapshot()]
    adapters = config.adapters

    answer: str | None = None
    source: str | None = None
    best_partial: str | None = None
    status = UNANSWERED
    end_reason = "iteration-cap"
    iterations_used = 0
    total_actions = 0

    for iteration in range(1, config.max_iterations + 1):
        try:
            draw = state.select_arm()
        except AllArmsExhausted:
            end_reason = "all-arms-exhausted"
            break
        iterations_used = iteration
        events.append(RunEvent("arm-selected", {
            "iteration": iteration,
            "url": draw.url,
            "theta": draw.theta_samples,
        }))

        context = memory.retrieve(draw.url)
        trajectory, outcome = navigate(
            config.query, draw.url, context, adapters.agent, adapters.env,
            config.navigation)
        total_actions += len(trajectory.steps)
        final_obs = trajectory.final_observation()
        events.append(RunEvent("navigation-done", {
            "url": draw.url,
            "steps": len(trajectory.steps),
            "status": outcome.status,
            "final_url": final_obs.url if final_obs else draw.url,
        }))

        verdict = reflect(config.query, trajectory, outcome, adapters.reflector)
        events.append(RunEvent("reflection-done", {
            "url": draw.url,
            "status": verdict.status,
            "reason": verdict.reason,
        }))

        decision = decide_reward(verdict)
        if decision.terminate:
            status = ANSWERED
            answer = decision.answer
            source = decision.source
            end_reason = "adequate"
            break

        state.update(draw.url, decision.reward)
        if decision.exhaust:
            state.exhaust_arm(draw.url)
        snapshots.append(state.snapshot())
        arm = state.arms[draw.url]
        events.append(RunEvent("bandit-updated", {
            "url": draw.url,
            "reward": decision.reward,
            "exhausted": decision.exhaust,
            "alpha": arm.alpha,
            "beta": arm.beta,
        }))

        memory.store(EpisodeRecord.from_attempt(
            draw.url, iteration, trajectory, verdict.output, verdict))
        if verdict.status == INADEQUATE and verdict.output:
            best_partial = verdict.output

    events.append(RunEvent("terminated", {
        "status": status,
        "reason": end_reason,
        "answer": answer,
        "source": source,
        "iterations_used": iterations_used,
        "total_actions": total_actions,
    }))
    return RunResult(
        status=status, answer=answer, source=source,
        iterations_used=iterations_used, total_actions=total_actions,
        best_partial=best_partial, arm_snapshots=snapshots, events=events)
