"""Episodic memory: append-only per-URL episode store with JSONL persistence.

Records are digested at store time — each trajectory step keeps its action
plus an observation digest (sha256 over the full payload and at most a 4 KB
prefix) — so serialize/deserialize is the identity on the store and revisit
context stays bounded. Lists per URL are chronological and immutable once
written.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import PersistenceFailure
from .navigation import Action, Trajectory
from .reflection import ReflectionVerdict

OBSERVATION_PREFIX_LIMIT = 4096


@dataclass(frozen=True)
class ObservationDigest:
    sha256: str
    prefix: str
    truncated: bool

    @classmethod
    def of(cls, payload: str) -> "ObservationDigest":
        return cls(
            sha256=hashlib.sha256(payload.encode("utf-8")).hexdigest(),
            prefix=payload[:OBSERVATION_PREFIX_LIMIT],
            truncated=len(payload) > OBSERVATION_PREFIX_LIMIT,
        )

    def to_dict(self) -> dict:
        return {"sha256": self.sha256, "prefix": self.prefix,
                "truncated": self.truncated}

    @classmethod
    def from_dict(cls, data: dict) -> "ObservationDigest":
        return cls(sha256=data["sha256"], prefix=data["prefix"],
                   truncated=data["truncated"])


@dataclass(frozen=True)
class StoredStep:
    action: Action
    observation_digest: ObservationDigest

    def to_dict(self) -> dict:
        return {"action": self.action.to_dict(),
                "observation_digest": self.observation_digest.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> "StoredStep":
        return cls(action=Action.from_dict(data["action"]),
                   observation_digest=ObservationDigest.from_dict(
                       data["observation_digest"]))


@dataclass(frozen=True)
class EpisodeRecord:
    url: str
    iteration: int
    trajectory: tuple[StoredStep, ...]
    final_output: str | None
    reflection: ReflectionVerdict
    actions_used: int

    @classmethod
    def from_attempt(cls, url: str, iteration: int, trajectory: Trajectory,
                     final_output: str | None,
                     reflection: ReflectionVerdict) -> "EpisodeRecord":
        steps = []
        for action, obs in trajectory.steps:
            payload = obs.content if obs.error is None else f"error: {obs.error}"
            steps.append(StoredStep(action=action,
                                    observation_digest=ObservationDigest.of(payload)))
        return cls(url=url, iteration=iteration, trajectory=tuple(steps),
                   final_output=final_output, reflection=reflection,
                   actions_used=len(trajectory.steps))

    def action_signature(self) -> tuple:
        """Hashable (kind, target) sequence, used for repeat avoidance."""
        return tuple((s.action.kind, s.action.target) for s in self.trajectory)

    def to_dict(self) -> dict:
        return {
            "url": self.url,
            "iteration": self.iteration,
            "actions_used": self.actions_used,
            "trajectory": [s.to_dict() for s in self.trajectory],
            "final_output": self.final_output,
            "reflection": self.reflection.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EpisodeRecord":
        return cls(
            url=data["url"],
            iteration=data["iteration"],
            trajectory=tuple(StoredStep.from_dict(s) for s in data["trajectory"]),
            final_output=data["final_output"],
            reflection=ReflectionVerdict.from_dict(data["reflection"]),
            actions_used=data["actions_used"],
        )


@dataclass
class MemoryStore:
    """Per-URL chronological episode lists; optionally file-backed.

    With a path set, every store() appends one JSON line and flushes before
    returning; an OS error raises PersistenceFailure and is fatal for the
    run. With path=None the store is purely in-memory (simulation batches).
    """

    path: Path | None = None
    episodes: dict[str, list[EpisodeRecord]] = field(default_factory=dict)

    def store(self, record: EpisodeRecord) -> None:
        existing = self.episodes.setdefault(record.url, [])
        if existing and record.iteration <= existing[-1].iteration:
            raise ValueError("episode iterations must be strictly increasing")
        if self.path is not None:
            line = json.dumps(record.to_dict(), ensure_ascii=False,
                              separators=(",", ":"))
            try:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(line + "\n")
                    fh.flush()
            except OSError as exc:
                raise PersistenceFailure(str(exc)) from exc
        existing.append(record)

    def retrieve(self, url: str) -> list[EpisodeRecord]:
        return list(self.episodes.get(url, ()))

    @classmethod
    def load(cls, path: Path) -> "MemoryStore":
        store = cls(path=Path(path))
        try:
            text = Path(path).read_text(encoding="utf-8")
        except FileNotFoundError:
            return store
        except OSError as exc:
            raise PersistenceFailure(str(exc)) from exc
        for line in text.splitlines():
            if not line.strip():
                continue
            record = EpisodeRecord.from_dict(json.loads(line))
            store.episodes.setdefault(record.url, []).append(record)
        return store
