"""Site-restricted search augmentation and candidate-set assembly.

Search results are merged with crawl-derived candidates into the final arm
set: URLs the crawl already scored reuse that score, unseen URLs are fetched
once and scored against the frozen corpus statistics (never rebuilt), and
every lambda is then re-normalized jointly so exactly one arm sits at
rho = 0 unless all scores are equal.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from statistics import median
from typing import Protocol

from .crawler import NON_HTML_EXTENSIONS, CrawlResult, PageFetcher, extract_text
from .crawler import _path_extension
from .errors import EmptyCandidates, EmptyCorpus, FetchError, InvalidUrl
from .ranking import (
    CorpusStats,
    Query,
    RankingConfig,
    ScoredUrl,
    bm25_score,
    build_index,
    document_tokens,
    normalize_scores,
)
from .urls import canonicalize_url

log = logging.getLogger(__name__)


class SearchClient(Protocol):
    def search(self, keywords: str, site_domain: str, k: int) -> list[str]:
        """Absolute result URLs in rank order; raises SearchUnavailable."""
        ...


@dataclass
class CandidateSet:
    arms_input: list[ScoredUrl]
    query: Query
    root_url: str

    def to_dicts(self) -> list[dict]:
        return [s.to_dict() for s in self.arms_input]


def site_search(keywords: str, domain: str, client: SearchClient,
                k: int = 10) -> list[str]:
    """Domain-restricted search: canonicalized, deduplicated, non-HTML
    assets dropped, at most k results in rank order."""
    if not keywords.strip():
        raise ValueError("keywords must be non-empty")
    raw = client.search(keywords, domain, k)
    out: list[str] = []
    seen: set[str] = set()
    for href in raw:
        try:
            url = canonicalize_url(href)
        except InvalidUrl:
            continue
        if url in seen or _path_extension(url) in NON_HTML_EXTENSIONS:
            continue
        seen.add(url)
        out.append(url)
        if len(out) == k:
            break
    return out


def _score_new_url(url: str, query: Query, stats: CorpusStats,
                   fetcher: PageFetcher, config: RankingConfig,
                   fallback: float) -> float:
    try:
        fetched = fetcher.fetch(url)
    except FetchError:
        log.debug("search url %s unfetchable; lambda set to crawl median %.6g",
                  url, fallback)
        return fallback
    doc = document_tokens(extract_text(fetched.body), url)
    return bm25_score(query, doc, stats, config)


def build_candidate_set(crawl_top: list[ScoredUrl], search_urls: list[str],
                        crawl: CrawlResult, query: Query, fetcher: PageFetcher,
                        config: RankingConfig,
                        stats: CorpusStats | None = None) -> CandidateSet:
    """Merge crawl and search candidates; joint re-normalization of rho.

    Duplicates keep provenance "crawl". Order: lambda descending, ties
    crawl-before-search, then lexicographic URL.
    """
    if not crawl_top and not search_urls:
        raise EmptyCandidates("no candidates from crawl or search")
    if not crawl.pages:
        raise EmptyCorpus("cannot score candidates without a crawl corpus")
    if stats is None:
        stats = build_index(crawl).stats

    lams: dict[str, float] = {}
    provenance: dict[str, str] = {}
    for s in crawl_top:
        lams[s.url] = s.lam
        provenance[s.url] = "crawl"

    crawl_lams = [s.lam for s in crawl_top]
    fallback = median(crawl_lams) if crawl_lams else 0.0
    for url in search_urls:
        if url in lams:
            continue  # overlap keeps crawl provenance and score
        if url in crawl.pages:
            page = crawl.pages[url]
            lam = bm25_score(query, document_tokens(page.content, page.url),
                             stats, config)
        else:
            lam = _score_new_url(url, query, stats, fetcher, config, fallback)
        lams[url] = lam
        provenance[url] = "search"

    rhos = normalize_scores(lams, config.epsilon)
    order = sorted(lams, key=lambda u: (-lams[u], provenance[u] != "crawl", u))
    arms = [ScoredUrl(url=u, lam=lams[u], rho=rhos[u], provenance=provenance[u])
            for u in order]

    root_url = min(crawl.pages.values(), key=lambda p: p.fetch_order).url
    return CandidateSet(arms_input=arms, query=query, root_url=root_url)
