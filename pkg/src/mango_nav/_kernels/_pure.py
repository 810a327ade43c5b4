"""Pure-Python implementations of the numeric kernels.

This module is the reference implementation and the import-time fallback
when the compiled extension (`_core`) is unavailable. Both backends must
produce bit-identical results; `tests/test_kernels.py` enforces that.

The generator is xoshiro256++ (Blackman & Vigna) seeded via splitmix64.
Normal deviates use the Marsaglia polar method without caching the second
deviate, gamma deviates use Marsaglia & Tsang (2000) with the standard
shape<1 boost, and beta deviates use the two-gamma construction
x/(x+y). Keeping the algorithms fixed and documented is what makes run
traces replayable regardless of backend.
"""

from __future__ import annotations

from bisect import bisect_left
from math import log, sqrt

BACKEND = "pure"

_MASK64 = (1 << 64) - 1
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31), state


class Rng:
    """Seedable xoshiro256++ stream with normal/gamma/beta sampling."""

    __slots__ = ("_s0", "_s1", "_s2", "_s3")

    def __init__(self, seed: int):
        state = seed & _MASK64
        self._s0, state = _splitmix64(state)
        self._s1, state = _splitmix64(state)
        self._s2, state = _splitmix64(state)
        self._s3, state = _splitmix64(state)
        if self._s0 == self._s1 == self._s2 == self._s3 == 0:
            self._s0 = 1  # all-zero state is the one fixed point

    def getstate(self) -> tuple[int, int, int, int]:
        return (self._s0, self._s1, self._s2, self._s3)

    def setstate(self, state) -> None:
        s0, s1, s2, s3 = (int(x) & _MASK64 for x in state)
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s0, self._s1, self._s2, self._s3
        tmp = (s0 + s3) & _MASK64
        result = (((tmp << 23) | (tmp >> 41)) + s0) & _MASK64
        t = (s1 << 17) & _MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK64
        self._s0, self._s1, self._s2, self._s3 = s0, s1, s2, s3
        return result

    def random(self) -> float:
        """Uniform double in [0, 1) with 53 bits of precision."""
        return (self.next_u64() >> 11) * _INV_2_53

    def normal(self) -> float:
        # Marsaglia polar; the second deviate is discarded so the state
        # stays a plain 4-word tuple.
        while True:
            u = 2.0 * self.random() - 1.0
            v = 2.0 * self.random() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                return u * sqrt(-2.0 * log(s) / s)

    def gamma(self, shape: float) -> float:
        if shape <= 0.0:
            raise ValueError("gamma shape must be positive")
        if shape < 1.0:
            # boost: G(a) = G(a+1) * U^(1/a); temporaries pin the draw order
            g = self.gamma(shape + 1.0)
            u = self.random()
            return g * pow(u, 1.0 / shape)
        d = shape - 1.0 / 3.0
        c = 1.0 / sqrt(9.0 * d)
        while True:
            x = self.normal()
            v = 1.0 + c * x
            if v <= 0.0:
                continue
            v = v * v * v
            u = self.random()
            x2 = x * x
            if u < 1.0 - 0.0331 * x2 * x2:
                return d * v
            if u == 0.0:
                return d * v  # log(0) = -inf would accept anyway
            if log(u) < 0.5 * x2 + d * (1.0 - v + log(v)):
                return d * v

    def beta(self, a: float, b: float) -> float:
        if a <= 0.0 or b <= 0.0:
            raise ValueError("gamma shape must be positive")
        x = self.gamma(a)
        y = self.gamma(b)
        total = x + y
        if total == 0.0:
            return 0.5
        return x / total


def bm25_scores(query_ids, indptr, term_ids, term_counts, doc_lens, idf,
                avgdl: float, k1: float, b: float):
    """Score every document of a CSR-encoded corpus against a token-id query.

    `term_ids` must be sorted within each document slice. Duplicate query
    ids contribute once per occurrence.
    """
    ndocs = len(indptr) - 1
    k1p1 = k1 + 1.0
    scores = [0.0] * ndocs
    for d in range(ndocs):
        lo = indptr[d]
        hi = indptr[d + 1]
        norm = k1 * (1.0 - b + b * doc_lens[d] / avgdl)
        s = 0.0
        for q in query_ids:
            pos = bisect_left(term_ids, q, lo, hi)
            if pos < hi and term_ids[pos] == q:
                c = float(term_counts[pos])
                s += idf[q] * (c * k1p1) / (c + norm)
        scores[d] = s
    return scores
