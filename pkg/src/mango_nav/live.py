"""Live adapters: real HTTP fetching, a search endpoint, LLM-backed agents.

Everything here is selected only by explicit CLI flags; the default stack
is scripted and fully offline. The LLM adapters speak an OpenAI-compatible
chat-completions endpoint configured via MANGO_NAV_LLM_BASE_URL,
MANGO_NAV_LLM_API_KEY and MANGO_NAV_LLM_MODEL. The live "browser" is a
text-mode environment over the page fetcher: good for documentation-style
sites, no JavaScript rendering.
"""

from __future__ import annotations

import json
import os
import time
from html.parser import HTMLParser
from urllib import robotparser
from urllib.parse import urlsplit

import requests

from .crawler import FetchedPage, extract_text
from .errors import (
    AdapterFailure,
    ConfigError,
    EnvironmentFailure,
    FetchError,
    SearchUnavailable,
)
from .memory import EpisodeRecord
from .navigation import Action, Observation, Trajectory
from .prompts import (
    KEYWORD_PROMPT,
    NAVIGATION_PROMPT,
    REFLECT_COMPLETED_PROMPT,
    REFLECT_EXHAUSTED_PROMPT,
)
from .ranking import Query
from .urls import canonicalize_url

USER_AGENT = "mango-nav/0.1 (+https://example.invalid)"


class _LinkCollector(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.hrefs: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag == "a":
            for name, value in attrs:
                if name == "href" and value:
                    self.hrefs.append(value)


class LiveFetcher:
    """requests-backed fetcher honoring robots.txt and a fixed delay."""

    def __init__(self, timeout: float = 10.0, delay: float = 0.0,
                 honor_robots: bool = True):
        self.timeout = timeout
        self.delay = delay
        self.honor_robots = honor_robots
        self.session = requests.Session()
        self.session.headers["User-Agent"] = USER_AGENT
        self._robots: dict[str, robotparser.RobotFileParser] = {}
        self._last_request = 0.0

    def _allowed(self, url: str) -> bool:
        if not self.honor_robots:
            return True
        parts = urlsplit(url)
        origin = f"{parts.scheme}://{parts.netloc}"
        parser = self._robots.get(origin)
        if parser is None:
            parser = robotparser.RobotFileParser(origin + "/robots.txt")
            try:
                parser.read()
            except OSError:
                parser.allow_all = True
            self._robots[origin] = parser
        return parser.can_fetch(USER_AGENT, url)

    def fetch(self, url: str) -> FetchedPage:
        if not self._allowed(url):
            raise FetchError(f"disallowed by robots.txt: {url}")
        wait = self.delay - (time.monotonic() - self._last_request)
        if wait > 0:
            time.sleep(wait)
        try:
            response = self.session.get(url, timeout=self.timeout)
            self._last_request = time.monotonic()
            response.raise_for_status()
        except requests.RequestException as exc:
            raise FetchError(str(exc)) from exc
        content_type = response.headers.get("content-type", "")
        body = response.text
        collector = _LinkCollector()
        try:
            collector.feed(body)
        except Exception:
            pass
        return FetchedPage(content_type=content_type, body=body,
                           links=collector.hrefs)


class HttpSearchClient:
    """GET endpoint returning a JSON array of result URLs in rank order."""

    def __init__(self, endpoint: str, timeout: float = 10.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def search(self, keywords: str, site_domain: str, k: int) -> list[str]:
        try:
            response = requests.get(
                self.endpoint,
                params={"q": keywords, "site": site_domain, "k": k},
                timeout=self.timeout,
            )
            response.raise_for_status()
            data = response.json()
        except (requests.RequestException, ValueError) as exc:
            raise SearchUnavailable(str(exc)) from exc
        if not isinstance(data, list):
            raise SearchUnavailable("search endpoint did not return a list")
        return [str(u) for u in data]


class FetcherBrowserEnv:
    """Text-mode browser over a PageFetcher: pages are extracted text, links
    are the interactables. No forms, no JavaScript."""

    def __init__(self, fetcher):
        self.fetcher = fetcher
        self.current: str | None = None
        self.history: list[str] = []
        self._cache: dict[str, FetchedPage] = {}

    def _load(self, url: str) -> FetchedPage:
        if url not in self._cache:
            self._cache[url] = self.fetcher.fetch(url)
        return self._cache[url]

    def _observe(self, url: str) -> Observation:
        page = self._load(url)
        links = []
        for i, href in enumerate(page.links):
            try:
                links.append({"ref": f"link{i}", "text": href,
                              "url": canonicalize_url(href, url)})
            except Exception:
                continue
        return Observation(url=url, content=extract_text(page.body),
                           interactables=links)

    def reset(self, url: str) -> Observation:
        try:
            obs = self._observe(url)
        except FetchError as exc:
            raise EnvironmentFailure(str(exc)) from exc
        self.current = url
        self.history = []
        return obs

    def apply(self, action: Action) -> Observation:
        target = None
        if action.kind == "click":
            page = self._load(self.current)
            for i, href in enumerate(page.links):
                if f"link{i}" == action.target or href == action.target:
                    target = canonicalize_url(href, self.current)
                    break
            if target is None:
                return Observation(url=self.current,
                                   error=f"no such element: {action.target}")
        elif action.kind == "visit":
            target = action.target
        elif action.kind == "back":
            if self.history:
                self.current = self.history.pop()
            return self._observe(self.current)
        else:
            return self._observe(self.current)
        try:
            obs = self._observe(target)
        except FetchError as exc:
            return Observation(url=target, error=str(exc))
        self.history.append(self.current)
        self.current = target
        return obs


class LlmClient:
    """Minimal OpenAI-compatible chat-completions client."""

    def __init__(self, base_url: str | None = None, api_key: str | None = None,
                 model: str | None = None, timeout: float = 120.0):
        self.base_url = base_url or os.environ.get("MANGO_NAV_LLM_BASE_URL")
        self.api_key = api_key or os.environ.get("MANGO_NAV_LLM_API_KEY", "")
        self.model = model or os.environ.get("MANGO_NAV_LLM_MODEL")
        self.timeout = timeout
        if not self.base_url or not self.model:
            raise ConfigError(
                "live LLM adapters need MANGO_NAV_LLM_BASE_URL and "
                "MANGO_NAV_LLM_MODEL")

    def complete(self, system: str, user: str) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = requests.post(
                self.base_url.rstrip("/") + "/chat/completions",
                headers=headers,
                json={"model": self.model,
                      "messages": [{"role": "system", "content": system},
                                   {"role": "user", "content": user}]},
                timeout=self.timeout,
            )
            response.raise_for_status()
            data = response.json()
            return data["choices"][0]["message"]["content"]
        except (requests.RequestException, ValueError, KeyError, IndexError) as exc:
            raise AdapterFailure(str(exc)) from exc


def _render_trajectory(trajectory: Trajectory, limit: int = 1500) -> str:
    lines = []
    for action, obs in trajectory.steps:
        lines.append(f"action: {json.dumps(action.to_dict(), ensure_ascii=False)}")
        snippet = obs.error if obs.error else obs.content[:limit]
        lines.append(f"observation [{obs.url}]: {snippet}")
    return "\n".join(lines)


def _render_memory(episodes: list[EpisodeRecord]) -> str:
    if not episodes:
        return "none"
    parts = []
    for ep in episodes:
        actions = [s.action.to_dict() for s in ep.trajectory]
        parts.append(json.dumps({
            "iteration": ep.iteration,
            "actions": actions,
            "reflection": ep.reflection.to_dict(),
        }, ensure_ascii=False))
    return "\n".join(parts)


class LlmKeyworder:
    def __init__(self, client: LlmClient):
        self.client = client

    def generate(self, prompt: str, query: str) -> str:
        return self.client.complete(prompt or KEYWORD_PROMPT, query).strip()


class LlmReflector:
    def __init__(self, client: LlmClient):
        self.client = client

    def judge_completed(self, query: Query, trajectory: Trajectory,
                        output: str) -> str:
        user = (f"User Query: {query.text}\n\nFinal output: {output}\n\n"
                f"Trajectory:\n{_render_trajectory(trajectory)}")
        return self.client.complete(REFLECT_COMPLETED_PROMPT, user)

    def judge_exhausted(self, query: Query, trajectory: Trajectory) -> str:
        user = (f"User Query: {query.text}\n\n"
                f"Trajectory:\n{_render_trajectory(trajectory)}")
        return self.client.complete(REFLECT_EXHAUSTED_PROMPT, user)


class LlmAgent:
    """Navigation agent over chat completions; expects one JSON action per
    turn, e.g. {"kind": "click", "target": "link3"}."""

    def __init__(self, client: LlmClient):
        self.client = client

    def decide(self, query: Query, start_url: str,
               memory_context: list[EpisodeRecord], trajectory: Trajectory,
               observation: Observation) -> Action:
        system = NAVIGATION_PROMPT.format(user_query=query.text,
                                          root_url=start_url)
        system += (
            "\nRespond with exactly one JSON object for the next action: "
            '{"kind": "visit|click|type|scroll|back|finish", "target": ..., '
            '"argument": ..., "result": ..., "source": ...}.')
        interactables = json.dumps(observation.interactables[:100],
                                   ensure_ascii=False)
        user = (f"Previous attempts on this URL:\n{_render_memory(memory_context)}\n\n"
                f"Trajectory so far:\n{_render_trajectory(trajectory)}\n\n"
                f"Current page [{observation.url}]:\n{observation.content[:6000]}\n\n"
                f"Interactables: {interactables}")
        raw = self.client.complete(system, user)
        start = raw.find("{")
        end = raw.rfind("}")
        if start == -1 or end <= start:
            raise AdapterFailure(f"no JSON action in response: {raw[:200]}")
        data = json.loads(raw[start:end + 1])
        return Action.from_dict(data)
