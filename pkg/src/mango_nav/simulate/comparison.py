"""Policy comparison harness: paired runs of the full engine vs ablations.

Policies: "mango" (the full pipeline), "random" (candidates sampled
uniformly from the crawl, size-matched to mango's set), "google_only"
(candidates solely from search), "greedy" (descending initial BM25 order,
no posterior updates), and "no_memory" (retrieval always empty). Every
policy sees the identical site and per-task seed, so outcome differences
are attributable to the policy alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .._kernels import Rng
from ..bandit import BanditConfig
from ..crawler import crawl
from ..errors import MangoNavError, SearchUnavailable
from ..memory import EpisodeRecord, MemoryStore
from ..navigation import NavigationConfig, navigate
from ..orchestrator import (
    ANSWERED,
    UNANSWERED,
    AdapterBundle,
    RunConfig,
    RunResult,
    analyze_structure,
    run,
)
from ..ranking import (
    Query,
    ScoredUrl,
    StopwordKeyworder,
    bm25_score,
    build_index,
    document_tokens,
    generate_search_keywords,
    normalize_scores,
    rank_candidates,
)
from ..reflection import decide_reward, reflect
from ..search import CandidateSet, build_candidate_set, site_search
from .agents import ScriptedLexicalAgent, ScriptedReflector
from .sites import (
    SimBrowserEnv,
    SimFetcher,
    SimSearchClient,
    SyntheticSite,
    generate_site,
)

POLICY_NAMES = ("mango", "random", "google_only", "greedy", "no_memory")


@dataclass(frozen=True)
class PolicySpec:
    name: str

    def __post_init__(self):
        if self.name not in POLICY_NAMES:
            raise ValueError(f"unknown policy {self.name!r}")


class NullMemory(MemoryStore):
    """The no-memory ablation: nothing is stored, retrieval is empty."""

    def store(self, record: EpisodeRecord) -> None:
        return

    def retrieve(self, url: str) -> list[EpisodeRecord]:
        return []


@dataclass
class TaskOutcome:
    task_seed: int
    policy: str
    seed: int
    answered: bool
    actions: int
    iterations: int
    error: str | None = None

    def to_dict(self) -> dict:
        out = {"task_seed": self.task_seed, "policy": self.policy,
               "seed": self.seed, "answered": self.answered,
               "actions": self.actions, "iterations": self.iterations}
        if self.error is not None:
            out["error"] = self.error
        return out


@dataclass
class ComparisonReport:
    policies: list[str]
    task_count: int
    seeds: list[int]
    success_rate: dict[str, float]
    mean_actions: dict[str, float]
    p_vs_mango: dict[str, float] = field(default_factory=dict)
    outcomes: list[TaskOutcome] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "policies": self.policies,
            "task_count": self.task_count,
            "seeds": self.seeds,
            "success_rate": self.success_rate,
            "mean_actions": self.mean_actions,
            "p_vs_mango": self.p_vs_mango,
            "outcomes": [o.to_dict() for o in self.outcomes],
        }

    def to_text_table(self) -> str:
        lines = [f"{'policy':<12} {'SR':>7} {'mean AC':>8} {'p vs mango':>11}"]
        for name in self.policies:
            p = self.p_vs_mango.get(name)
            p_str = f"{p:.4f}" if p is not None else "-"
            lines.append(f"{name:<12} {self.success_rate[name]:>7.3f} "
                         f"{self.mean_actions[name]:>8.2f} {p_str:>11}")
        return "\n".join(lines)


def paired_exact_p(a_wins: list[bool], b_wins: list[bool]) -> float:
    """One-sided exact sign test on discordant pairs (H1: a beats b)."""
    if len(a_wins) != len(b_wins):
        raise ValueError("paired outcome lists must have equal length")
    n01 = sum(1 for a, b in zip(a_wins, b_wins) if a and not b)
    n10 = sum(1 for a, b in zip(a_wins, b_wins) if b and not a)
    n = n01 + n10
    if n == 0:
        return 1.0
    return sum(math.comb(n, k) for k in range(n01, n + 1)) / 2.0 ** n


def task_config(site: SyntheticSite, seed: int,
                use_search: bool = True) -> RunConfig:
    nav = NavigationConfig()
    adapters = AdapterBundle(
        agent=ScriptedLexicalAgent(site),
        reflector=ScriptedReflector(site, horizon=nav.budget),
        keyworder=StopwordKeyworder(),
        fetcher=SimFetcher(site),
        env=SimBrowserEnv(site),
        search=SimSearchClient(site) if use_search else None,
    )
    return RunConfig(
        query=Query(site.query_text),
        root_url=site.root_url,
        adapters=adapters,
        navigation=nav,
        bandit=BanditConfig(kappa=3.0, rng_seed=seed),
    )


def _sample_without_replacement(rng: Rng, items: list, k: int) -> list:
    pool = list(items)
    out = []
    for _ in range(min(k, len(pool))):
        # unbiased bounded draw by rejection on the top bits
        n = len(pool)
        bits = max(1, n - 1).bit_length()
        while True:
            draw = rng.next_u64() >> (64 - bits)
            if draw < n:
                break
        out.append(pool.pop(draw))
    return out


def _random_candidates(config: RunConfig, seed: int) -> CandidateSet:
    """Uniform sample from the crawled pages, size-matched to the candidate
    set the full pipeline would build on this site."""
    crawl_result = crawl(config.crawl, config.adapters.fetcher)
    index = build_index(crawl_result)
    crawl_top = rank_candidates(crawl_result, config.query, config.ranking)
    search_urls: list[str] = []
    if config.adapters.search is not None:
        keywords = generate_search_keywords(config.query, config.adapters.keyworder)
        try:
            search_urls = site_search(keywords, crawl_result.root_domain,
                                      config.adapters.search, k=config.search_top_k)
        except SearchUnavailable:
            search_urls = []
    reference = build_candidate_set(crawl_top, search_urls, crawl_result,
                                    config.query, config.adapters.fetcher,
                                    config.ranking, stats=index.stats)
    size = len(reference.arms_input)

    rng = Rng(seed ^ 0xD1CE5EED)
    chosen = _sample_without_replacement(rng, list(crawl_result.pages), size)
    lams = {}
    for url in chosen:
        page = crawl_result.pages[url]
        lams[url] = bm25_score(config.query,
                               document_tokens(page.content, page.url),
                               index.stats, config.ranking)
    rhos = normalize_scores(lams, config.ranking.epsilon)
    order = sorted(lams, key=lambda u: (-lams[u], u))
    arms = [ScoredUrl(url=u, lam=lams[u], rho=rhos[u], provenance="crawl")
            for u in order]
    root = min(crawl_result.pages.values(), key=lambda p: p.fetch_order).url
    return CandidateSet(arms_input=arms, query=config.query, root_url=root)


def _google_only_candidates(config: RunConfig) -> CandidateSet:
    crawl_result = crawl(config.crawl, config.adapters.fetcher)
    index = build_index(crawl_result)
    keywords = generate_search_keywords(config.query, config.adapters.keyworder)
    search_urls = site_search(keywords, crawl_result.root_domain,
                              config.adapters.search, k=config.search_top_k)
    return build_candidate_set([], search_urls, crawl_result, config.query,
                               config.adapters.fetcher, config.ranking,
                               stats=index.stats)


def _run_greedy(config: RunConfig) -> RunResult:
    """Descending initial-lambda visitation, no posterior updates; memory
    and reflection-driven termination still apply."""
    candidates = analyze_structure(config)
    order = [s.url for s in candidates.arms_input]
    memory = MemoryStore()
    total_actions = 0
    iterations_used = 0
    for iteration in range(1, config.max_iterations + 1):
        url = order[(iteration - 1) % len(order)]
        iterations_used = iteration
        context = memory.retrieve(url)
        trajectory, outcome = navigate(config.query, url, context,
                                       config.adapters.agent,
                                       config.adapters.env, config.navigation)
        total_actions += len(trajectory.steps)
        verdict = reflect(config.query, trajectory, outcome,
                          config.adapters.reflector)
        decision = decide_reward(verdict)
        if decision.terminate:
            return RunResult(status=ANSWERED, answer=decision.answer,
                             source=decision.source,
                             iterations_used=iterations_used,
                             total_actions=total_actions, best_partial=None,
                             arm_snapshots=[], events=[])
        memory.store(EpisodeRecord.from_attempt(url, iteration, trajectory,
                                                verdict.output, verdict))
    return RunResult(status=UNANSWERED, answer=None, source=None,
                     iterations_used=iterations_used,
                     total_actions=total_actions, best_partial=None,
                     arm_snapshots=[], events=[])


def run_policy(policy: PolicySpec, site: SyntheticSite, seed: int) -> RunResult:
    config = task_config(site, seed)
    if policy.name == "mango":
        return run(config)
    if policy.name == "no_memory":
        return run(config, memory=NullMemory())
    if policy.name == "random":
        return run(config, candidates=_random_candidates(config, seed))
    if policy.name == "google_only":
        return run(config, candidates=_google_only_candidates(config))
    if policy.name == "greedy":
        return _run_greedy(config)
    raise ValueError(f"unknown policy {policy.name!r}")


def run_comparison(policies: list[PolicySpec], tasks: list[SyntheticSite],
                   seeds: list[int]) -> ComparisonReport:
    """Paired evaluation: every policy runs every (task, seed) pair.

    Per-run fatal errors become failed outcomes; the batch never aborts.
    """
    if not policies or not tasks or not seeds:
        raise ValueError("policies, tasks and seeds must be non-empty")
    if len(seeds) != len(tasks):
        raise ValueError("need exactly one seed per task (paired design)")
    if len({p.name for p in policies}) != len(policies):
        raise ValueError("duplicate policies would corrupt the pairing")

    outcomes: list[TaskOutcome] = []
    wins: dict[str, list[bool]] = {p.name: [] for p in policies}
    actions: dict[str, list[int]] = {p.name: [] for p in policies}
    for site, seed in zip(tasks, seeds):
        for policy in policies:
            try:
                result = run_policy(policy, site, seed)
                outcome = TaskOutcome(
                    task_seed=site.seed, policy=policy.name, seed=seed,
                    answered=result.answered, actions=result.total_actions,
                    iterations=result.iterations_used)
            except MangoNavError as exc:
                outcome = TaskOutcome(task_seed=site.seed, policy=policy.name,
                                      seed=seed, answered=False, actions=0,
                                      iterations=0, error=str(exc))
            outcomes.append(outcome)
            wins[policy.name].append(outcome.answered)
            actions[policy.name].append(outcome.actions)

    names = [p.name for p in policies]
    sr = {n: sum(wins[n]) / len(wins[n]) for n in names}
    mean_ac = {n: sum(actions[n]) / len(actions[n]) for n in names}
    p_vs = {}
    if "mango" in names:
        for n in names:
            if n != "mango":
                p_vs[n] = paired_exact_p(wins["mango"], wins[n])
    return ComparisonReport(policies=names, task_count=len(tasks), seeds=seeds,
                            success_rate=sr, mean_actions=mean_ac,
                            p_vs_mango=p_vs, outcomes=outcomes)


def standard_batch(n_tasks: int = 200, base_seed: int = 9000,
                   ) -> tuple[list[SyntheticSite], list[int]]:
    """The fixed 200-task batch: branching 2-4, depth 3-6, density 0.2/0.5,
    one environment seed per task."""
    tasks = []
    seeds = []
    for i in range(n_tasks):
        branching = 2 + i % 3
        depth = 3 + (i // 3) % 4
        density = 0.2 if i % 2 == 0 else 0.5
        targets = 1 + i % 2
        site_seed = base_seed + i * 7919
        tasks.append(generate_site(site_seed, branching, depth,
                                   targets=targets,
                                   distractor_density=density))
        seeds.append(base_seed * 31 + i)
    return tasks, seeds
