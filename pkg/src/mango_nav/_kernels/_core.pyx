# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of `_pure`. Same algorithms, same draw order, bit-identical
output; see `_pure` for the algorithm notes. Statement-level temporaries are
deliberate: C leaves operand evaluation order unspecified, and both backends
must consume the uniform stream in exactly the same order."""

from libc.math cimport log, sqrt, pow

BACKEND = "compiled"

cdef double _INV_2_53 = 1.0 / 9007199254740992.0


cdef inline unsigned long long _rotl(unsigned long long x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef class Rng:
    cdef unsigned long long s0, s1, s2, s3

    def __init__(self, seed):
        cdef unsigned long long state = seed & 0xFFFFFFFFFFFFFFFF
        self.s0 = _splitmix64_step(&state)
        self.s1 = _splitmix64_step(&state)
        self.s2 = _splitmix64_step(&state)
        self.s3 = _splitmix64_step(&state)
        if self.s0 == 0 and self.s1 == 0 and self.s2 == 0 and self.s3 == 0:
            self.s0 = 1

    def getstate(self):
        return (self.s0, self.s1, self.s2, self.s3)

    def setstate(self, state):
        self.s0 = state[0] & 0xFFFFFFFFFFFFFFFF
        self.s1 = state[1] & 0xFFFFFFFFFFFFFFFF
        self.s2 = state[2] & 0xFFFFFFFFFFFFFFFF
        self.s3 = state[3] & 0xFFFFFFFFFFFFFFFF

    cdef unsigned long long _next(self) nogil:
        cdef unsigned long long tmp = self.s0 + self.s3
        cdef unsigned long long result = _rotl(tmp, 23) + self.s0
        cdef unsigned long long t = self.s1 << 17
        self.s2 ^= self.s0
        self.s3 ^= self.s1
        self.s1 ^= self.s2
        self.s0 ^= self.s3
        self.s2 ^= t
        self.s3 = _rotl(self.s3, 45)
        return result

    def next_u64(self):
        return self._next()

    cdef double _random(self) nogil:
        return <double>(self._next() >> 11) * _INV_2_53

    def random(self):
        return self._random()

    cdef double _normal(self) nogil:
        cdef double u, v, s
        while True:
            u = 2.0 * self._random() - 1.0
            v = 2.0 * self._random() - 1.0
            s = u * u + v * v
            if 0.0 < s < 1.0:
                return u * sqrt(-2.0 * log(s) / s)

    def normal(self):
        return self._normal()

    cdef double _gamma(self, double shape):
        cdef double d, c, x, v, u, x2, g
        if shape < 1.0:
            g = self._gamma(shape + 1.0)
            u = self._random()
            return g * pow(u, 1.0 / shape)
        d = shape - 1.0 / 3.0
        c = 1.0 / sqrt(9.0 * d)
        while True:
            x = self._normal()
            v = 1.0 + c * x
            if v <= 0.0:
                continue
            v = v * v * v
            u = self._random()
            x2 = x * x
            if u < 1.0 - 0.0331 * x2 * x2:
                return d * v
            if u == 0.0:
                return d * v
            if log(u) < 0.5 * x2 + d * (1.0 - v + log(v)):
                return d * v

    def gamma(self, double shape):
        if shape <= 0.0:
            raise ValueError("gamma shape must be positive")
        return self._gamma(shape)

    cdef double _beta(self, double a, double b):
        cdef double x = self._gamma(a)
        cdef double y = self._gamma(b)
        cdef double total = x + y
        if total == 0.0:
            return 0.5
        return x / total

    def beta(self, double a, double b):
        if a <= 0.0 or b <= 0.0:
            raise ValueError("gamma shape must be positive")
        return self._beta(a, b)


cdef unsigned long long _splitmix64_step(unsigned long long *state) nogil:
    state[0] += <unsigned long long>0x9E3779B97F4A7C15
    cdef unsigned long long z = state[0]
    z = (z ^ (z >> 30)) * <unsigned long long>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <unsigned long long>0x94D049BB133111EB
    return z ^ (z >> 31)


def bm25_scores(const long long[::1] query_ids, const long long[::1] indptr,
                const long long[::1] term_ids, const long long[::1] term_counts,
                const double[::1] doc_lens, const double[::1] idf,
                double avgdl, double k1, double b):
    cdef Py_ssize_t ndocs = indptr.shape[0] - 1
    cdef Py_ssize_t nq = query_ids.shape[0]
    cdef Py_ssize_t d, i, lo, hi, mid, left, right
    cdef long long q
    cdef double norm, s, c
    cdef double k1p1 = k1 + 1.0
    scores = [0.0] * ndocs
    for d in range(ndocs):
        lo = indptr[d]
        hi = indptr[d + 1]
        norm = k1 * (1.0 - b + b * doc_lens[d] / avgdl)
        s = 0.0
        for i in range(nq):
            q = query_ids[i]
            left = lo
            right = hi
            while left < right:
                mid = (left + right) >> 1
                if term_ids[mid] < q:
                    left = mid + 1
                else:
                    right = mid
            if left < hi and term_ids[left] == q:
                c = <double>term_counts[left]
                s += idf[q] * (c * k1p1) / (c + norm)
        scores[d] = s
    return scores
