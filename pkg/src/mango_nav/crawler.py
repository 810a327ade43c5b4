"""Bounded breadth-first crawling over an injected page fetcher.

The crawl is best-effort: fetch errors are recorded and never retried, and
only a dead root is fatal. Fetching within one depth level may be
parallelized by a fetcher adapter as long as the observable ordering
(fetch_order, BFS prefix property) matches this sequential reference
behavior.
"""

from __future__ import annotations

import json
import re
from collections import deque
from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import Protocol

from .errors import FetchError, InvalidUrl, RootUnreachable
from .urls import canonicalize_url, registrable_domain

MAX_CONTENT_CHARS = 50_000

# non-navigational asset extensions; anything here is skipped as non-html
NON_HTML_EXTENSIONS = frozenset({
    "png", "jpg", "jpeg", "gif", "svg", "webp", "ico", "css", "js", "pdf",
    "zip", "gz", "tar", "mp4", "mp3", "woff", "woff2", "ttf",
})

_HTML_HINT_RE = re.compile(r"<\s*(?:!doctype|html|head|body|div|p|a|h[1-6]|ul|table)\b", re.I)


@dataclass(frozen=True)
class CrawlConfig:
    root_url: str
    max_pages: int = 1000
    same_domain_only: bool = True
    exclude_non_html: bool = True
    per_page_fetch_timeout: float = 10.0
    max_depth: int | None = None

    def __post_init__(self):
        if self.max_pages < 1:
            raise ValueError("max_pages must be >= 1")
        canonicalize_url(self.root_url)  # raises InvalidUrl if unusable


@dataclass
class CrawledPage:
    url: str
    depth: int
    content: str
    outlinks: list[str]
    fetch_order: int

    def to_dict(self) -> dict:
        return {
            "url": self.url,
            "depth": self.depth,
            "fetch_order": self.fetch_order,
            "content": self.content,
            "outlinks": list(self.outlinks),
        }


@dataclass
class CrawlResult:
    pages: dict[str, CrawledPage]
    skipped: dict[str, str]
    root_domain: str

    def to_dict(self) -> dict:
        ordered = sorted(self.pages.values(), key=lambda p: p.fetch_order)
        return {
            "root_domain": self.root_domain,
            "pages": [p.to_dict() for p in ordered],
            "skipped": [{"url": u, "reason": r} for u, r in self.skipped.items()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "CrawlResult":
        pages = {}
        for row in sorted(data["pages"], key=lambda r: r["fetch_order"]):
            pages[row["url"]] = CrawledPage(
                url=row["url"], depth=row["depth"], content=row["content"],
                outlinks=list(row["outlinks"]), fetch_order=row["fetch_order"])
        skipped = {row["url"]: row["reason"] for row in data["skipped"]}
        return cls(pages=pages, skipped=skipped, root_domain=data["root_domain"])

    @classmethod
    def from_json(cls, text: str) -> "CrawlResult":
        return cls.from_dict(json.loads(text))


@dataclass
class FetchedPage:
    """What a fetcher returns: content type, body text, raw outlink hrefs."""
    content_type: str
    body: str
    links: list[str] = field(default_factory=list)


class PageFetcher(Protocol):
    def fetch(self, url: str) -> FetchedPage:
        """Return the page, or raise FetchError."""
        ...


class _TextExtractor(HTMLParser):
    _SKIP = {"script", "style", "noscript"}

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.chunks: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in self._SKIP:
            self._skip_depth += 1

    def handle_endtag(self, tag):
        if tag in self._SKIP and self._skip_depth:
            self._skip_depth -= 1

    def handle_data(self, data):
        if not self._skip_depth:
            self.chunks.append(data)


def extract_text(body: str) -> str:
    """Plain text for ranking: tags stripped, whitespace collapsed, capped."""
    if _HTML_HINT_RE.search(body):
        parser = _TextExtractor()
        parser.feed(body)
        body = " ".join(parser.chunks)
    return " ".join(body.split())[:MAX_CONTENT_CHARS]


def _path_extension(url: str) -> str:
    path = url.split("?", 1)[0].split("//", 1)[-1]
    last = path.rsplit("/", 1)[-1]
    if "." not in last:
        return ""
    return last.rsplit(".", 1)[-1].lower()


def should_visit(url: str, root_domain: str, config: CrawlConfig) -> tuple[bool, str | None]:
    """Filter decision for a canonical URL: (True, None) or (False, reason)."""
    if config.same_domain_only and registrable_domain(url) != root_domain:
        return False, "external-domain"
    if config.exclude_non_html and _path_extension(url) in NON_HTML_EXTENSIONS:
        return False, "non-html"
    return True, None


def _is_html_content_type(content_type: str) -> bool:
    ct = content_type.split(";", 1)[0].strip().lower()
    return ct in ("", "text/html", "application/xhtml+xml", "text/plain")


def crawl(config: CrawlConfig, fetcher: PageFetcher) -> CrawlResult:
    """Strict-BFS crawl from the root; stops at max_pages or empty frontier.

    All depth-d pages are fetched before any depth-(d+1) page, in first
    discovery order within a level. Each URL is fetched at most once; a URL
    reached via two parents keeps the smaller depth. Fetch errors are
    recorded in `skipped` and never retried; only a dead root raises.
    """
    root = canonicalize_url(config.root_url)
    root_domain = registrable_domain(root)
    pages: dict[str, CrawledPage] = {}
    skipped: dict[str, str] = {}
    queue: deque[tuple[str, int]] = deque([(root, 0)])
    enqueued = {root}
    fetch_order = 0

    while queue:
        url, depth = queue.popleft()
        if len(pages) >= config.max_pages:
            skipped[url] = "over-limit"
            continue
        try:
            fetched = fetcher.fetch(url)
        except FetchError as exc:
            if not pages and url == root:
                raise RootUnreachable(f"root fetch failed: {exc}") from exc
            skipped[url] = "fetch-error"
            continue
        if config.exclude_non_html and not _is_html_content_type(fetched.content_type):
            skipped[url] = "non-html"
            continue

        outlinks: list[str] = []
        seen_links = set()
        for href in fetched.links:
            try:
                link = canonicalize_url(href, url)
            except InvalidUrl:
                continue
            if link not in seen_links:
                seen_links.add(link)
                outlinks.append(link)

        pages[url] = CrawledPage(
            url=url, depth=depth, content=extract_text(fetched.body),
            outlinks=outlinks, fetch_order=fetch_order)
        fetch_order += 1

        if config.max_depth is not None and depth >= config.max_depth:
            continue
        for link in outlinks:
            if link in enqueued or link in skipped:
                continue
            ok, reason = should_visit(link, root_domain, config)
            if not ok:
                skipped[link] = reason
                continue
            enqueued.add(link)
            queue.append((link, depth + 1))

    return CrawlResult(pages=pages, skipped=skipped, root_domain=root_domain)
