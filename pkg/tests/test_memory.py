import random

import pytest

from mango_nav.errors import PersistenceFailure
from mango_nav.memory import EpisodeRecord, MemoryStore, ObservationDigest
from mango_nav.navigation import Action, Observation, Trajectory
from mango_nav.reflection import ReflectionVerdict


def make_trajectory(url="https://a.com", n=3, content="some page text"):
    steps = [(Action(kind="visit", target=url), Observation(url=url, content=content))]
    for i in range(n - 1):
        steps.append((Action(kind="click", target=f"{url}/l{i}"),
                      Observation(url=f"{url}/l{i}", content=f"{content} {i}")))
    return Trajectory(start_url=url, steps=steps)


def make_record(url="https://a.com", iteration=1, status="feasible", **kw):
    if status in ("adequate", "inadequate"):
        verdict = ReflectionVerdict(status, "r", output="out", source=url)
    else:
        verdict = ReflectionVerdict(status, "r")
    return EpisodeRecord.from_attempt(url, iteration, make_trajectory(url, **kw),
                                      final_output=None, reflection=verdict)


def test_first_and_second_record_append_in_order():
    store = MemoryStore()
    store.store(make_record(iteration=1))
    assert len(store.retrieve("https://a.com")) == 1
    store.store(make_record(iteration=4))
    got = store.retrieve("https://a.com")
    assert [r.iteration for r in got] == [1, 4]


def test_iterations_strictly_increasing():
    store = MemoryStore()
    store.store(make_record(iteration=2))
    with pytest.raises(ValueError):
        store.store(make_record(iteration=2))


def test_unseen_url_returns_empty():
    assert MemoryStore().retrieve("https://nowhere.example") == []


def test_retrieve_returns_copy():
    store = MemoryStore()
    store.store(make_record(iteration=1))
    got = store.retrieve("https://a.com")
    got.clear()
    assert len(store.retrieve("https://a.com")) == 1


def test_roundtrip_identity_on_random_fixtures(tmp_path):
    rng = random.Random(7)
    path = tmp_path / "memory.jsonl"
    store = MemoryStore(path=path)
    urls = [f"https://a.com/u{i}" for i in range(4)]
    iteration = 0
    for _ in range(12):
        iteration += 1
        url = rng.choice(urls)
        status = rng.choice(["adequate", "inadequate", "feasible", "infeasible"])
        n = rng.randint(1, 6)
        content = "w" * rng.randint(0, 9000)  # some payloads exceed 4 KB
        if store.episodes.get(url):
            iteration = max(iteration, store.episodes[url][-1].iteration + 1)
        store.store(make_record(url=url, iteration=iteration, status=status,
                                n=n, content=content))
    reloaded = MemoryStore.load(path)
    assert reloaded.episodes == store.episodes


def test_large_observations_digested():
    big = "z" * 10_000
    record = make_record(content=big)
    digest = record.trajectory[0].observation_digest
    assert digest.truncated
    assert len(digest.prefix) == 4096
    assert digest.sha256 == ObservationDigest.of(big).sha256
    small = make_record(content="tiny")
    assert not small.trajectory[0].observation_digest.truncated


def test_actions_used_matches_trajectory():
    record = make_record(n=5)
    assert record.actions_used == 5
    assert len(record.trajectory) == 5


def test_retrieval_after_reload_preserves_order(tmp_path):
    path = tmp_path / "memory.jsonl"
    store = MemoryStore(path=path)
    for it in (1, 3, 9):
        store.store(make_record(iteration=it))
    reloaded = MemoryStore.load(path)
    assert [r.iteration for r in reloaded.retrieve("https://a.com")] == [1, 3, 9]


def test_store_is_append_only_on_disk(tmp_path):
    path = tmp_path / "memory.jsonl"
    store = MemoryStore(path=path)
    store.store(make_record(iteration=1))
    first = path.read_text()
    store.store(make_record(iteration=2))
    assert path.read_text().startswith(first)


def test_persistence_failure_is_fatal(tmp_path):
    store = MemoryStore(path=tmp_path)  # a directory: open() for append fails
    with pytest.raises(PersistenceFailure):
        store.store(make_record(iteration=1))
    assert store.retrieve("https://a.com") == []


def test_load_missing_file_gives_empty_store(tmp_path):
    store = MemoryStore.load(tmp_path / "absent.jsonl")
    assert store.episodes == {}


def test_action_signature():
    record = make_record(n=3)
    sig = record.action_signature()
    assert sig[0] == ("visit", "https://a.com")
    assert len(sig) == 3
