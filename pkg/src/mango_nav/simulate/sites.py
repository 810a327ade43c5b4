"""Deterministic synthetic websites for end-to-end tests and ablation runs.

A site is a complete b-ary tree of pages. A few deep pages are targets and
carry the golden answer; pages on a root-to-target path carry topic words
whose density grows toward the target, so BM25 relevance correlates with
graph distance. Distractor pages and misleading link anchors (controlled by
distractor_density) inject noise: a trap anchor shares the topic token of
the true path but leads into an answerless subtree, which is what makes
memory-guided revisits pay off.

The same site object backs every adapter a run needs: fetcher, browser env,
and search client.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..crawler import FetchedPage
from ..errors import EnvironmentFailure, FetchError
from ..navigation import Action, Observation
from ..ranking import tokenize

GENERAL_VOCAB = [
    "overview", "department", "archive", "resources", "update", "schedule",
    "contact", "bulletin", "notice", "library", "catalog", "seminar",
    "campus", "program", "faculty", "journal", "press", "event", "lecture",
    "portal", "service", "office", "center", "network", "studio", "forum",
    "report", "digest", "gallery", "workshop", "course", "module", "branch",
    "division", "committee", "agenda", "minutes", "handbook", "directory",
    "profile", "summary", "review", "chapter", "section", "appendix",
    "glossary", "index", "roster",
]

TOPIC_WORDS = [
    "quantum", "fellowship", "robotics", "aurora", "heritage", "orchid",
    "glacier", "meridian", "falcon", "harbor", "lattice", "monsoon",
    "obsidian", "pavilion", "quasar", "saffron", "tundra", "vertex",
    "willow", "zephyr", "basalt", "cobalt", "dynamo", "ember",
]

# topic-token multiplicity by distance-to-target down the subtree; hubs a
# couple of hops above a target read as most relevant, the target page
# itself is a sparse leaf (the answer is not lexically aligned with the
# query, it has to be navigated to)
_TOPIC_MASS = (1, 2, 8, 6, 4, 3, 2)


@dataclass
class SitePage:
    url: str
    content: str
    links: list[tuple[str, str]] = field(default_factory=list)  # (text, href)


@dataclass
class SyntheticSite:
    seed: int
    branching: int
    depth: int
    distractor_density: float
    root_url: str
    query_text: str
    golden_answer: str
    target_urls: set[str]
    pages: dict[str, SitePage]

    def to_fixture(self) -> dict:
        return {"pages": [
            {"url": p.url, "content": p.content,
             "links": [{"text": t, "href": h} for t, h in p.links],
             "forms": []}
            for p in self.pages.values()
        ]}

    @classmethod
    def from_fixture(cls, data: dict, **meta) -> "SyntheticSite":
        pages = {}
        for row in data["pages"]:
            pages[row["url"]] = SitePage(
                url=row["url"], content=row["content"],
                links=[(l["text"], l["href"]) for l in row["links"]])
        root = data["pages"][0]["url"]
        defaults = dict(seed=0, branching=0, depth=0, distractor_density=0.0,
                        root_url=root, query_text="", golden_answer="",
                        target_urls=set())
        defaults.update(meta)
        return cls(pages=pages, **defaults)

    def min_hops_to_target(self, url: str, cap: int | None = None) -> int | None:
        """Directed BFS distance from url to the nearest target, or None."""
        if url not in self.pages:
            return None
        frontier = [url]
        seen = {url}
        dist = 0
        while frontier:
            if cap is not None and dist > cap:
                return None
            for u in frontier:
                if u in self.target_urls:
                    return dist
            nxt = []
            for u in frontier:
                for _, href in self.pages[u].links:
                    if href not in seen and href in self.pages:
                        seen.add(href)
                        nxt.append(href)
            frontier = nxt
            dist += 1
        return None


def generate_site(seed: int, branching: int, depth: int, targets: int = 1,
                  distractor_density: float = 0.2) -> SyntheticSite:
    """Deterministic site from the seed; same arguments, same site."""
    if branching < 1 or depth < 1:
        raise ValueError("branching and depth must be >= 1")
    rng = random.Random(seed)
    topic = rng.sample(TOPIC_WORDS, 3)
    golden = f"zq{seed & 0xFFFFFFFF:08x}"
    root_url = f"https://site{seed & 0xFFFF:04x}.example"
    query_text = "what is the {} {} {}".format(*topic)

    def url_of(path: tuple) -> str:
        if not path:
            return root_url
        return root_url + "/s" + "/".join(str(i) for i in path)

    levels: list[list[tuple]] = [[()]]
    for _ in range(depth):
        levels.append([p + (i,) for p in levels[-1] for i in range(branching)])
    all_nodes = [p for level in levels for p in level]

    deep_pool = [p for p in all_nodes if len(p) >= max(1, depth - 1)]
    target_paths = rng.sample(deep_pool, min(targets, len(deep_pool)))
    target_set = set(target_paths)

    # distance from a node down its own subtree to the nearest target
    dist_down: dict[tuple, int] = {}
    for t in target_paths:
        for k in range(len(t) + 1):
            anc = t[:k]
            d = len(t) - k
            if anc not in dist_down or d < dist_down[anc]:
                dist_down[anc] = d

    pages: dict[str, SitePage] = {}
    for node in all_nodes:
        filler = rng.choices(GENERAL_VOCAB, k=12)
        d = dist_down.get(node)
        if d is not None:
            mass = _TOPIC_MASS[min(d, len(_TOPIC_MASS) - 1)]
        elif rng.random() < distractor_density:
            mass = rng.choice([1, 2])
        else:
            mass = 0
        words = filler + [topic[i % 3] for i in range(mass)]
        if node in target_set:
            words.append(f"reference value {golden}")
        pages[url_of(node)] = SitePage(url=url_of(node),
                                       content=" ".join(words))

    for node in all_nodes:
        if len(node) == depth:
            continue
        children = [node + (i,) for i in range(branching)]
        off_path = [c for c in children if c not in dist_down]
        rng.shuffle(off_path)

        def anchor(topical: bool) -> str:
            if topical:
                return f"{topic[len(node) % 3]} {rng.choice(GENERAL_VOCAB)}"
            return "{} {}".format(*rng.sample(GENERAL_VOCAB, 2))

        # on-path hubs near a target get a trap: a topical anchor into an
        # answerless subtree, placed before the true link so a first,
        # memoryless descent falls for it
        trap = None
        node_dist = dist_down.get(node)
        if off_path and node_dist is not None and node_dist >= 1:
            p_trap = (min(1.0, 2.0 * distractor_density)
                      if node_dist <= 3 else distractor_density)
            if rng.random() < p_trap:
                trap = off_path.pop(0)

        rest = []
        for child in children:
            if trap is not None and child == trap:
                continue
            if child in dist_down:
                rest.append((anchor(True), url_of(child)))
            else:
                rest.append((anchor(rng.random() < distractor_density),
                             url_of(child)))
        rng.shuffle(rest)
        links = ([(anchor(True), url_of(trap))] if trap is not None else []) + rest
        pages[url_of(node)].links = links

    return SyntheticSite(
        seed=seed, branching=branching, depth=depth,
        distractor_density=distractor_density, root_url=root_url,
        query_text=query_text, golden_answer=golden,
        target_urls={url_of(p) for p in target_paths}, pages=pages)


class SimFetcher:
    """PageFetcher over a site fixture; plain-text bodies."""

    def __init__(self, site: SyntheticSite):
        self.site = site

    def fetch(self, url: str) -> FetchedPage:
        page = self.site.pages.get(url)
        if page is None:
            raise FetchError(url)
        return FetchedPage(content_type="text/html", body=page.content,
                           links=[href for _, href in page.links])


class SimBrowserEnv:
    """Simulated browser over a site fixture.

    Observations expose one interactable per link: {ref, text, url}; click
    targets are refs resolved against the current page. back pops the visit
    history; type/scroll/finish leave the page unchanged.
    """

    def __init__(self, site: SyntheticSite):
        self.site = site
        self.current: str | None = None
        self.history: list[str] = []

    def reset(self, url: str) -> Observation:
        if url not in self.site.pages:
            raise EnvironmentFailure(f"no such page: {url}")
        self.current = url
        self.history = []
        return self._observe()

    def apply(self, action: Action) -> Observation:
        if action.kind == "click":
            page = self.site.pages[self.current]
            resolved = None
            for i, (_, href) in enumerate(page.links):
                if f"link{i}" == action.target or href == action.target:
                    resolved = href
                    break
            if resolved is None:
                return Observation(url=self.current,
                                   error=f"no such element: {action.target}")
            if resolved not in self.site.pages:
                return Observation(url=resolved, error="broken link")
            self.history.append(self.current)
            self.current = resolved
        elif action.kind == "visit":
            if action.target not in self.site.pages:
                return Observation(url=action.target, error="unreachable")
            self.history.append(self.current)
            self.current = action.target
        elif action.kind == "back":
            if self.history:
                self.current = self.history.pop()
        return self._observe()

    def _observe(self) -> Observation:
        page = self.site.pages[self.current]
        return Observation(
            url=page.url,
            content=page.content,
            interactables=[{"ref": f"link{i}", "text": text, "url": href}
                           for i, (text, href) in enumerate(page.links)],
        )


class SimSearchClient:
    """Full-index keyword search over the site (the crawl may be capped,
    search is not — that is the point of augmentation)."""

    def __init__(self, site: SyntheticSite):
        self.site = site

    def search(self, keywords: str, site_domain: str, k: int) -> list[str]:
        terms = set(tokenize(keywords))
        scored = []
        for url, page in self.site.pages.items():
            toks = tokenize(page.content)
            overlap = sum(toks.count(t) for t in terms)
            if overlap:
                scored.append((-overlap, url))
        scored.sort()
        return [url for _, url in scored[:k]]
