"""Finite-lifetime Beta-Bernoulli Thompson Sampling over candidate URLs.

Priors come from normalized BM25 relevance: alpha = 1 + kappa * rho,
beta = 1 + kappa * (1 - rho). Selection samples theta ~ Beta(alpha, beta)
for every Active arm in stable insertion order and picks the maximum; a
reward of 1 increments alpha, 0 increments beta; arms marked exhausted are
permanently excluded from sampling. All draws come from the seeded portable
generator so traces replay bit-for-bit.
"""

from __future__ import annotations

from dataclasses import dataclass

from ._kernels import Rng
from .errors import (
    AllArmsExhausted,
    ArmAlreadyExhausted,
    EmptyCandidates,
    UnknownArm,
)
from .search import CandidateSet

ACTIVE = "active"
EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class BanditConfig:
    kappa: float = 3.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be >= 0")


@dataclass
class CandidateArm:
    url: str
    alpha: float
    beta: float
    status: str = ACTIVE
    pulls: int = 0
    rho: float = 0.0
    provenance: str = "crawl"

    def to_dict(self) -> dict:
        return {"url": self.url, "alpha": self.alpha, "beta": self.beta,
                "status": self.status, "pulls": self.pulls, "rho": self.rho,
                "provenance": self.provenance}


@dataclass
class SelectionDraw:
    url: str
    theta_samples: dict[str, float]


@dataclass
class BanditState:
    arms: dict[str, CandidateArm]
    rng: Rng
    step: int = 0

    def active_urls(self) -> list[str]:
        return [u for u, a in self.arms.items() if a.status == ACTIVE]

    def select_arm(self) -> SelectionDraw:
        """Thompson draw over Active arms; ties break by insertion order."""
        theta: dict[str, float] = {}
        best_url = None
        best_theta = 0.0
        for url, arm in self.arms.items():
            if arm.status != ACTIVE:
                continue
            sample = self.rng.beta(arm.alpha, arm.beta)
            theta[url] = sample
            if best_url is None or sample > best_theta:
                best_url = url
                best_theta = sample
        if best_url is None:
            raise AllArmsExhausted("no active arms to select")
        self.step += 1
        return SelectionDraw(url=best_url, theta_samples=theta)

    def update(self, url: str, reward: int) -> None:
        if reward not in (0, 1):
            raise ValueError("reward must be 0 or 1")
        arm = self._get(url)
        if arm.status == EXHAUSTED:
            raise ArmAlreadyExhausted(url)
        arm.alpha += reward
        arm.beta += 1 - reward
        arm.pulls += 1

    def exhaust_arm(self, url: str) -> None:
        """Idempotent; the arm never returns to the active set."""
        self._get(url).status = EXHAUSTED

    def snapshot(self) -> dict:
        return {"step": self.step,
                "arms": [a.to_dict() for a in self.arms.values()]}

    def _get(self, url: str) -> CandidateArm:
        arm = self.arms.get(url)
        if arm is None:
            raise UnknownArm(url)
        return arm


def init_arms(candidates: CandidateSet, config: BanditConfig) -> BanditState:
    """alpha = 1 + kappa*rho, beta = 1 + kappa*(1 - rho), all arms Active."""
    if not candidates.arms_input:
        raise EmptyCandidates("candidate set is empty")
    arms: dict[str, CandidateArm] = {}
    for s in candidates.arms_input:
        arms[s.url] = CandidateArm(
            url=s.url,
            alpha=1.0 + config.kappa * s.rho,
            beta=1.0 + config.kappa * (1.0 - s.rho),
            status=ACTIVE,
            pulls=0,
            rho=s.rho,
            provenance=s.provenance,
        )
    return BanditState(arms=arms, rng=Rng(config.rng_seed), step=0)
