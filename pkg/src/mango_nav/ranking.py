"""BM25 scoring of crawled pages, score normalization, and keyword generation.

Documents are the extracted page content with the page's URL tokens
appended, so near-duplicate pages that differ only in their URL stay
distinguishable. The corpus-wide scoring path runs on the compiled kernels;
`bm25_score` is the single-document contract function used for late-scored
search results and for oracle tests. Duplicate query tokens contribute once
per occurrence.
"""

from __future__ import annotations

import math
import re
from array import array
from dataclasses import dataclass
from typing import Protocol

from ._kernels import bm25_scores as _kernel_bm25
from .crawler import CrawlResult
from .errors import EmptyCorpus
from .prompts import KEYWORD_PROMPT

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)

# fixed 120-word English stopword list for the fallback keyworder
STOPWORDS = frozenset("""
a about above after again against all am an and any are as at be because
been before being below between both but by can cannot could did do does
doing down during each few for from further had has have having he her here
hers him his how i if in into is it its itself just me more most my no nor
not now of off on once only or other our out over own same she should so
some such than that the their theirs them then there these they this those
through to too under until up very was we were what when where which while
who whom why will with would you your yours yourself
""".split())


@dataclass(frozen=True)
class Query:
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("query text must be non-empty")

    def tokens(self) -> list[str]:
        return tokenize(self.text)


@dataclass(frozen=True)
class RankingConfig:
    k1: float = 1.2
    b: float = 0.75
    epsilon: float = 1e-9
    top_k: int = 10

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.top_k < 1:
            raise ValueError("top_k must be >= 1")


@dataclass
class ScoredUrl:
    url: str
    lam: float
    rho: float
    provenance: str  # "crawl" | "search"

    def to_dict(self) -> dict:
        return {"url": self.url, "lambda": self.lam, "rho": self.rho,
                "provenance": self.provenance}


@dataclass
class CorpusStats:
    doc_count: int
    avg_doc_len: float
    doc_freq: dict[str, int]


class KeywordAdapter(Protocol):
    def generate(self, prompt: str, query: str) -> str:
        """Turn a user query into space-separated search keywords."""
        ...


def tokenize(text: str) -> list[str]:
    """Lowercase and split on any non-alphanumeric character."""
    return _TOKEN_RE.findall(text.lower())


def document_tokens(content: str, url: str) -> list[str]:
    return tokenize(content) + tokenize(url)


class CorpusIndex:
    """Tokenized crawl corpus in CSR form, ready for the scoring kernel."""

    def __init__(self, urls: list[str], token_lists: list[list[str]]):
        if not urls:
            raise EmptyCorpus("no documents to index")
        self.urls = urls
        self._tokens = dict(zip(urls, token_lists))
        self._vocab: dict[str, int] = {}
        indptr = [0]
        term_ids: list[int] = []
        term_counts: list[int] = []
        doc_lens: list[float] = []
        df: dict[int, int] = {}
        for tokens in token_lists:
            counts: dict[int, int] = {}
            for tok in tokens:
                tid = self._vocab.setdefault(tok, len(self._vocab))
                counts[tid] = counts.get(tid, 0) + 1
            for tid in sorted(counts):
                term_ids.append(tid)
                term_counts.append(counts[tid])
                df[tid] = df.get(tid, 0) + 1
            indptr.append(len(term_ids))
            doc_lens.append(float(len(tokens)))
        self._indptr = array("q", indptr)
        self._term_ids = array("q", term_ids)
        self._term_counts = array("q", term_counts)
        self._doc_lens = array("d", doc_lens)
        n = len(urls)
        self.avgdl = sum(doc_lens) / n
        self._idf = array("d", [0.0] * len(self._vocab))
        for tid, f in df.items():
            self._idf[tid] = math.log((n - f + 0.5) / (f + 0.5) + 1.0)
        self.stats = CorpusStats(
            doc_count=n,
            avg_doc_len=self.avgdl,
            doc_freq={tok: df[tid] for tok, tid in self._vocab.items()},
        )

    def doc_tokens(self, url: str) -> list[str]:
        return self._tokens[url]

    def score_all(self, query: Query, config: RankingConfig) -> dict[str, float]:
        """BM25 score of every document against the query (kernel path)."""
        qids = array("q", [self._vocab[t] for t in query.tokens()
                           if t in self._vocab])
        scores = _kernel_bm25(qids, self._indptr, self._term_ids,
                              self._term_counts, self._doc_lens, self._idf,
                              self.avgdl, config.k1, config.b)
        return dict(zip(self.urls, scores))


def build_index(crawl: CrawlResult) -> CorpusIndex:
    ordered = sorted(crawl.pages.values(), key=lambda p: p.fetch_order)
    return CorpusIndex(
        urls=[p.url for p in ordered],
        token_lists=[document_tokens(p.content, p.url) for p in ordered],
    )


def bm25_score(query: Query, doc: list[str], stats: CorpusStats,
               config: RankingConfig) -> float:
    """Okapi BM25 with the non-negative IDF variant ln((N-df+0.5)/(df+0.5)+1).

    Query terms missing from the corpus contribute 0, so scores are always
    non-negative and the min-max normalization stays well-behaved.
    """
    if stats.doc_count == 0:
        raise EmptyCorpus("corpus has no documents")
    counts: dict[str, int] = {}
    for tok in doc:
        counts[tok] = counts.get(tok, 0) + 1
    dl = float(len(doc))
    norm = config.k1 * (1.0 - config.b + config.b * dl / stats.avg_doc_len)
    score = 0.0
    for term in query.tokens():
        df = stats.doc_freq.get(term)
        if not df:
            continue
        c = float(counts.get(term, 0))
        if c == 0.0:
            continue
        idf = math.log((stats.doc_count - df + 0.5) / (df + 0.5) + 1.0)
        score += idf * (c * (config.k1 + 1.0)) / (c + norm)
    return score


def normalize_scores(scores: dict[str, float], epsilon: float) -> dict[str, float]:
    """rho_u = (lambda_u - min) / (max - min + epsilon); all-equal maps to 0."""
    if not scores:
        raise EmptyCorpus("no scores to normalize")
    lo = min(scores.values())
    hi = max(scores.values())
    denom = hi - lo + epsilon
    return {u: (lam - lo) / denom for u, lam in scores.items()}


def rank_candidates(crawl: CrawlResult, query: Query,
                    config: RankingConfig) -> list[ScoredUrl]:
    """Top-k pages by BM25, ties broken by fetch order.

    rho is computed over the full scored corpus before truncation, so the
    top-k values reflect corpus-wide min/max.
    """
    if not crawl.pages:
        raise EmptyCorpus("crawl produced no pages")
    index = build_index(crawl)
    lams = index.score_all(query, config)
    rhos = normalize_scores(lams, config.epsilon)
    fetch_order = {u: p.fetch_order for u, p in crawl.pages.items()}
    ordered = sorted(lams, key=lambda u: (-lams[u], fetch_order[u]))
    return [ScoredUrl(url=u, lam=lams[u], rho=rhos[u], provenance="crawl")
            for u in ordered[:config.top_k]]


class StopwordKeyworder:
    """Deterministic fallback: query tokens minus stopwords, order kept.

    Never fails; if every token is a stopword the full token list is
    returned instead of an empty string.
    """

    def generate(self, prompt: str, query: str) -> str:
        tokens = tokenize(query)
        kept = [t for t in tokens if t not in STOPWORDS]
        return " ".join(kept if kept else tokens)


def generate_search_keywords(query: Query, keyworder: KeywordAdapter) -> str:
    return keyworder.generate(KEYWORD_PROMPT, query.text)
