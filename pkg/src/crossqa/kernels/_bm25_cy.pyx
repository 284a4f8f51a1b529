# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled BM25 accumulation kernel.

Mirrors crossqa.kernels.fallback.accumulate_scores; the expression order is
kept identical so both kernels produce bit-identical floats.
"""


def accumulate_scores(double[::1] scores, const int[::1] doc_ids,
                      const int[::1] tfs, const double[::1] norms,
                      double idf, double k1):
    cdef Py_ssize_t i, n = doc_ids.shape[0]
    cdef double k1p1 = k1 + 1.0
    cdef double tf
    cdef Py_ssize_t d
    for i in range(n):
        d = doc_ids[i]
        tf = tfs[i]
        scores[d] += (idf * (tf * k1p1)) / (tf + norms[d])
