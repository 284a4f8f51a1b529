#!/usr/bin/env python3
"""Benchmark the BM25 scoring kernels: compiled extension vs pure Python.

Builds a synthetic corpus with a Zipf-ish vocabulary, then times full
search() passes (accumulation over postings dominates) with each kernel.

    python3 benchmarks/bench_bm25.py [--docs 20000] [--queries 200]
"""

import argparse
import random
import statistics
import time

import numpy as np

from crossqa.kernels import available_kernels, get_kernel
from crossqa.retrieval import Bm25Params, Index


def synthetic_index(n_docs, vocab_size, rng):
    vocab = [f"w{i}" for i in range(vocab_size)]
    weights = [1.0 / (r + 1) for r in range(vocab_size)]
    postings = {}
    doc_lens = []
    for d in range(n_docs):
        length = rng.randint(40, 200)
        doc_lens.append(length)
        counts = {}
        for t in rng.choices(vocab, weights=weights, k=length):
            counts[t] = counts.get(t, 0) + 1
        for t, tf in counts.items():
            postings.setdefault(t, []).append((d, tf))
    terms = sorted(postings)
    offsets = np.zeros(len(terms) + 1, dtype=np.int64)
    total = sum(len(postings[t]) for t in terms)
    doc_ids = np.zeros(total, dtype=np.int32)
    tfs = np.zeros(total, dtype=np.int32)
    pos = 0
    for i, t in enumerate(terms):
        for d, tf in postings[t]:
            doc_ids[pos] = d
            tfs[pos] = tf
            pos += 1
        offsets[i + 1] = pos
    return Index(lang="en", params=Bm25Params(),
                 doc_lens=np.asarray(doc_lens, dtype=np.int32),
                 titles=[f"doc {i}" for i in range(n_docs)], terms=terms,
                 offsets=offsets, doc_ids=doc_ids, tfs=tfs), vocab, weights


def run_queries(index, queries, kernel):
    t0 = time.perf_counter()
    sink = 0.0
    for terms in queries:
        scores = np.zeros(index.n_docs, dtype=np.float64)
        for term in terms:
            plist = index.postings(term)
            if plist is None:
                continue
            ids, tfs = plist
            kernel(scores, ids, tfs, index._norms, index.idf(term),
                   index.params.k1)
        top = np.argsort(-scores, kind="stable")[:100]
        sink += float(scores[top[0]])
    return time.perf_counter() - t0, sink


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--docs", type=int, default=20_000)
    parser.add_argument("--vocab", type=int, default=30_000)
    parser.add_argument("--queries", type=int, default=200)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    rng = random.Random(7)
    print(f"building synthetic index: {args.docs} docs, "
          f"{args.vocab} vocab ...")
    index, vocab, weights = synthetic_index(args.docs, args.vocab, rng)
    print(f"postings entries: {len(index.doc_ids):,}")
    queries = [rng.choices(vocab[:2000], weights=weights[:2000],
                           k=rng.randint(3, 8))
               for _ in range(args.queries)]

    results = {}
    checksums = set()
    for name in available_kernels():
        kernel = get_kernel(name)
        run_queries(index, queries[:10], kernel)  # warmup
        times = []
        for _ in range(args.repeats):
            dt, sink = run_queries(index, queries, kernel)
            times.append(dt)
            checksums.add(round(sink, 6))
        best = min(times)
        results[name] = best
        print(f"{name:>8}: best {best * 1000:8.1f} ms total, "
              f"{best / args.queries * 1e3:6.2f} ms/query, "
              f"median {statistics.median(times) * 1000:8.1f} ms")
    if len(checksums) != 1:
        raise SystemExit(f"kernels disagree: {checksums}")
    if "cython" in results and "python" in results:
        print(f"speedup (python/cython): "
              f"{results['python'] / results['cython']:.2f}x")


if __name__ == "__main__":
    main()
