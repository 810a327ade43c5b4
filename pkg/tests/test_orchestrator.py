import json

import pytest

from mango_nav.errors import SearchUnavailable
from mango_nav.navigation import Action
from mango_nav.orchestrator import (
    ANSWERED,
    UNANSWERED,
    RunConfig,
    analyze_structure,
    run,
)
from mango_nav.ranking import RankingConfig
from mango_nav.simulate import (
    ScriptedReflector,
    generate_site,
    task_config,
)


def scripted_config(site, seed=42, use_search=True, **overrides):
    config = task_config(site, seed, use_search=use_search)
    for key, value in overrides.items():
        setattr(config, key, value)
    return config


def event_kinds(result):
    return [e.kind for e in result.events]


def test_immediate_success_run():
    # density 0 and a shallow site: the top arm leads straight to the answer
    site = generate_site(11, branching=2, depth=2, distractor_density=0.0)
    result = run(scripted_config(site))
    assert result.status == ANSWERED
    assert result.iterations_used == 1
    assert site.golden_answer in result.answer
    kinds = event_kinds(result)
    assert kinds[0] == "crawl-done"
    assert kinds[1] == "candidates-built"
    assert kinds[2] == "arm-selected"
    assert kinds.count("terminated") == 1
    assert kinds[-1] == "terminated"


def test_all_arms_infeasible_exhausts_then_stops():
    site = generate_site(12, branching=2, depth=3)

    class AlwaysInfeasible:
        def judge_completed(self, query, trajectory, output):
            return {"status": "inadequate", "reason": "r",
                    "output": output, "source": "https://x.example"}

        def judge_exhausted(self, query, trajectory):
            return {"status": "infeasible", "reason": "dead"}

    class Wanderer:
        def decide(self, query, start_url, memory_context, trajectory, observation):
            return Action(kind="scroll")

    config = scripted_config(site, use_search=False,
                             ranking=RankingConfig(top_k=5))
    config.adapters.reflector = AlwaysInfeasible()
    config.adapters.agent = Wanderer()
    result = run(config)
    n_arms = len(result.arm_snapshots[0]["arms"])
    assert n_arms == 5
    assert result.status == UNANSWERED
    assert result.iterations_used == n_arms  # one attempt per arm, then stop
    updates = [e for e in result.events if e.kind == "bandit-updated"]
    assert len(updates) == n_arms
    assert all(e.payload["exhausted"] for e in updates)
    assert result.events[-1].payload["reason"] == "all-arms-exhausted"


def test_trace_replay_bit_identical():
    site = generate_site(13, branching=3, depth=4, distractor_density=0.5)
    lines_a = [e.to_line() for e in run(scripted_config(site, seed=5)).events]
    lines_b = [e.to_line() for e in run(scripted_config(site, seed=5)).events]
    assert lines_a == lines_b
    lines_c = [e.to_line() for e in run(scripted_config(site, seed=6)).events]
    assert lines_a != lines_c  # the seed matters


def test_revisits_receive_nonempty_memory_context():
    site = generate_site(21, branching=3, depth=4, distractor_density=0.5)
    config = scripted_config(site, seed=3)
    seen: list[tuple[str, int]] = []
    inner = config.adapters.agent

    class Spy:
        def decide(self, query, start_url, memory_context, trajectory, observation):
            if not trajectory.steps or len(trajectory.steps) == 1:
                seen.append((start_url, len(memory_context)))
            return inner.decide(query, start_url, memory_context, trajectory,
                                observation)

    config.adapters.agent = Spy()
    run(config)
    visits: dict[str, int] = {}
    for url, ctx_len in seen:
        visits[url] = visits.get(url, 0) + 1
        if visits[url] > 1:
            assert ctx_len > 0, f"revisit of {url} had empty memory context"


def test_total_actions_bounded_by_t_times_b():
    for seed in range(6):
        site = generate_site(500 + seed, branching=3, depth=4,
                             distractor_density=0.5)
        config = scripted_config(site, seed=seed)
        result = run(config)
        cap = config.max_iterations * config.navigation.budget
        assert result.total_actions <= cap


def test_analyze_structure_crawl_only():
    site = generate_site(31, branching=3, depth=3)
    config = scripted_config(site, use_search=False)
    candidates = analyze_structure(config)
    assert 1 <= len(candidates.arms_input) <= 10
    assert all(s.provenance == "crawl" for s in candidates.arms_input)


def test_analyze_structure_small_site_fewer_than_topk():
    site = generate_site(32, branching=1, depth=2)  # 3 pages
    config = scripted_config(site, use_search=False)
    candidates = analyze_structure(config)
    assert len(candidates.arms_input) == 3


def test_analyze_structure_with_fixture_search_overlap():
    site = generate_site(33, branching=3, depth=4)
    config = scripted_config(site, use_search=False)
    crawl_only = analyze_structure(config)
    top10 = [s.url for s in crawl_only.arms_input]

    class FixedSearch:
        """8 fresh URLs plus 2 overlapping the crawl top-10."""

        def __init__(self, site, overlaps):
            self.site = site
            self.overlaps = overlaps

        def search(self, keywords, site_domain, k):
            fresh = [u for u in self.site.pages
                     if u not in top10][:8]
            return self.overlaps + fresh

    config2 = scripted_config(site)
    config2.adapters.search = FixedSearch(site, top10[:2])
    merged = analyze_structure(config2)
    assert len(merged.arms_input) == 18
    overlap_arms = [s for s in merged.arms_input if s.url in top10[:2]]
    assert all(s.provenance == "crawl" for s in overlap_arms)


def test_search_failure_degrades_to_crawl_only():
    site = generate_site(34, branching=3, depth=3)

    class DownSearch:
        def search(self, keywords, site_domain, k):
            raise SearchUnavailable("down")

    config = scripted_config(site)
    config.adapters.search = DownSearch()
    events = []
    degraded = analyze_structure(config, events)
    crawl_only = analyze_structure(scripted_config(site, use_search=False))
    assert [s.url for s in degraded.arms_input] == \
        [s.url for s in crawl_only.arms_input]
    built = next(e for e in events if e.kind == "candidates-built")
    assert built.payload["search_used"] is False


def test_best_partial_from_inadequate():
    site = generate_site(35, branching=2, depth=2, distractor_density=0.0)

    class PickyReflector(ScriptedReflector):
        def judge_completed(self, query, trajectory, output):
            final = trajectory.final_observation()
            return {"status": "inadequate", "reason": "not enough",
                    "output": output, "source": final.url if final else ""}

    config = scripted_config(site)
    config.adapters.reflector = PickyReflector(site, horizon=10)
    result = run(config)
    assert result.status == UNANSWERED
    assert result.best_partial is not None
    assert site.golden_answer in result.best_partial


def test_reward_parity_between_reflection_and_bandit():
    # consecutive snapshots differ by exactly (r, 1-r) on the updated arm
    site = generate_site(38, branching=3, depth=4, distractor_density=0.5)
    result = run(scripted_config(site, seed=2))
    updates = [e for e in result.events if e.kind == "bandit-updated"]
    assert updates
    for i, event in enumerate(updates):
        before = {a["url"]: a for a in result.arm_snapshots[i]["arms"]}
        after = {a["url"]: a for a in result.arm_snapshots[i + 1]["arms"]}
        url, reward = event.payload["url"], event.payload["reward"]
        assert after[url]["alpha"] - before[url]["alpha"] == pytest.approx(reward, abs=1e-9)
        assert after[url]["beta"] - before[url]["beta"] == pytest.approx(1 - reward, abs=1e-9)
        for other in before:
            if other != url:
                assert before[other]["alpha"] == after[other]["alpha"]
                assert before[other]["beta"] == after[other]["beta"]


def test_snapshots_track_updates():
    site = generate_site(36, branching=3, depth=4, distractor_density=0.5)
    result = run(scripted_config(site, seed=9))
    updates = sum(1 for e in result.events if e.kind == "bandit-updated")
    assert len(result.arm_snapshots) == updates + 1  # initial + per update
    assert json.dumps(result.arm_snapshots[0])  # serializable


def test_run_config_validation():
    site = generate_site(37, branching=2, depth=2)
    base = task_config(site, 1)
    with pytest.raises(ValueError):
        RunConfig(query=base.query, root_url=base.root_url,
                  adapters=base.adapters, max_iterations=0)
