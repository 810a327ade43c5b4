#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Times the two hot paths (Beta sampling for arm selection, BM25 corpus
scoring) on both backends and checks the outputs are bit-identical while
doing so. Usage: python benchmarks/bench_kernels.py [--draws N] [--docs N]
"""

import argparse
import math
import random
import time
from array import array

from mango_nav._kernels import _pure

try:
    from mango_nav._kernels import _core
except ImportError:
    _core = None


def bench_beta(impl, draws):
    rng = impl.Rng(42)
    start = time.perf_counter()
    total = 0.0
    for _ in range(draws):
        total += rng.beta(4.0, 1.0)
        total += rng.beta(1.0, 4.0)
    elapsed = time.perf_counter() - start
    return elapsed, total


def make_corpus(n_docs, vocab=5000, seed=7):
    rng = random.Random(seed)
    indptr = [0]
    term_ids = []
    term_counts = []
    doc_lens = []
    df = [0] * vocab
    for _ in range(n_docs):
        n_terms = rng.randint(40, 400)
        terms = sorted(rng.sample(range(vocab), n_terms))
        total = 0
        for t in terms:
            c = rng.randint(1, 5)
            term_ids.append(t)
            term_counts.append(c)
            df[t] += 1
            total += c
        indptr.append(len(term_ids))
        doc_lens.append(float(total))
    avgdl = sum(doc_lens) / n_docs
    idf = array("d", [math.log((n_docs - f + 0.5) / (f + 0.5) + 1.0)
                      if f else 0.0 for f in df])
    return (array("q", indptr), array("q", term_ids), array("q", term_counts),
            array("d", doc_lens), idf, avgdl)


def bench_bm25(impl, corpus, queries):
    indptr, term_ids, term_counts, doc_lens, idf, avgdl = corpus
    start = time.perf_counter()
    sink = 0.0
    out = None
    for q in queries:
        out = impl.bm25_scores(q, indptr, term_ids, term_counts, doc_lens,
                               idf, avgdl, 1.2, 0.75)
        sink += out[0]
    return time.perf_counter() - start, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--draws", type=int, default=100_000)
    parser.add_argument("--docs", type=int, default=1000)
    parser.add_argument("--queries", type=int, default=200)
    args = parser.parse_args()

    backends = [("pure", _pure)]
    if _core is not None:
        backends.append(("compiled", _core))
    else:
        print("note: compiled kernel not built, timing pure only")

    print(f"beta sampling: {2 * args.draws} draws")
    beta_times = {}
    beta_sums = {}
    for name, impl in backends:
        elapsed, total = bench_beta(impl, args.draws)
        beta_times[name] = elapsed
        beta_sums[name] = total
        rate = 2 * args.draws / elapsed
        print(f"  {name:<9} {elapsed:8.3f}s  ({rate:,.0f} draws/s)")
    if len(backends) == 2:
        assert beta_sums["pure"] == beta_sums["compiled"], "backends diverged"
        print(f"  speedup   {beta_times['pure'] / beta_times['compiled']:.1f}x"
              "  (outputs bit-identical)")

    rng = random.Random(3)
    corpus = make_corpus(args.docs)
    queries = [array("q", [rng.randrange(5000) for _ in range(5)])
               for _ in range(args.queries)]
    print(f"bm25 scoring: {args.docs} docs x {args.queries} queries")
    bm_times = {}
    bm_out = {}
    for name, impl in backends:
        elapsed, out = bench_bm25(impl, corpus, queries)
        bm_times[name] = elapsed
        bm_out[name] = out
        rate = args.docs * args.queries / elapsed
        print(f"  {name:<9} {elapsed:8.3f}s  ({rate:,.0f} doc-scores/s)")
    if len(backends) == 2:
        assert bm_out["pure"] == bm_out["compiled"], "backends diverged"
        print(f"  speedup   {bm_times['pure'] / bm_times['compiled']:.1f}x"
              "  (outputs bit-identical)")


if __name__ == "__main__":
    main()
