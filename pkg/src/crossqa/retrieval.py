"""Per-language BM25 inverted index: build, persist, search, and the
document-level Hit@N retrieval metric.

Scoring is Robertson-Okapi BM25 with the non-negative IDF variant:

    score(q, D) = sum over query term instances t of
        IDF(t) * f(t,D) * (k1 + 1) / (f(t,D) + k1 * (1 - b + b*|D|/avgdl))
    IDF(t) = ln((N - n_t + 0.5) / (n_t + 0.5) + 1)

Documents are scored on title and body concatenated (title tokens count
once), so titles are retrievable for the title-match Hit@N protocol.
Ranking ties break by ascending doc_id for cross-platform reproducibility.

The index file is a versioned little-endian binary; see INDEX_FORMAT.md.
Rebuilding from the same store is byte-identical.
"""

import io
import logging
import math
import struct
from dataclasses import dataclass

import numpy as np

from . import kernels
from .tokenization import tokenize

logger = logging.getLogger(__name__)

INDEX_MAGIC = b"CQIX"
INDEX_VERSION = 1

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75
DEFAULT_TOP_N = 100


class RetrievalError(Exception):
    pass


@dataclass(frozen=True)
class Bm25Params:
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B

    def __post_init__(self):
        if not self.k1 > 0:
            raise ValueError(f"k1 must be > 0, got {self.k1}")
        if not 0.0 <= self.b <= 1.0:
            raise ValueError(f"b must be in [0,1], got {self.b}")


@dataclass(frozen=True)
class ScoredDoc:
    doc_id: int
    title: str
    score: float


class Index:
    """Immutable in-memory BM25 index for one language.

    postings are CSR-style: terms (sorted) index into offsets, which slice
    the doc_ids/tfs arrays. doc_ids within a term are ascending.
    """

    def __init__(self, lang, params, doc_lens, titles, terms, offsets,
                 doc_ids, tfs):
        self.lang = lang
        self.params = params
        self.doc_lens = doc_lens
        self.titles = titles
        self.terms = terms
        self.vocab = {t: i for i, t in enumerate(terms)}
        self.offsets = offsets
        self.doc_ids = doc_ids
        self.tfs = tfs
        self.n_docs = len(doc_lens)
        self.avgdl = float(doc_lens.sum()) / self.n_docs
        # per-doc length normalization, hoisted out of the scoring loop
        self._norms = params.k1 * (1.0 - params.b
                                   + params.b * doc_lens / self.avgdl)

    def idf(self, term):
        slot = self.vocab.get(term)
        n_t = 0 if slot is None else int(self.offsets[slot + 1]
                                         - self.offsets[slot])
        n = self.n_docs
        return math.log((n - n_t + 0.5) / (n_t + 0.5) + 1.0)

    def postings(self, term):
        slot = self.vocab.get(term)
        if slot is None:
            return None
        lo, hi = self.offsets[slot], self.offsets[slot + 1]
        return self.doc_ids[lo:hi], self.tfs[lo:hi]


def build_index(store, lang, params=None):
    """Build the BM25 index for one language of a document store."""
    params = params or Bm25Params()
    postings = {}
    doc_lens = []
    titles = []
    for doc in store.iter_documents(lang):
        tokens = tokenize(doc.title) + tokenize(doc.body)
        doc_lens.append(len(tokens))
        titles.append(doc.title)
        counts = {}
        for t in tokens:
            counts[t] = counts.get(t, 0) + 1
        for t, tf in counts.items():
            postings.setdefault(t, []).append((doc.doc_id, tf))
    if not doc_lens:
        raise RetrievalError(f"nothing to index: store for {lang!r} is empty")

    terms = sorted(postings)
    offsets = np.zeros(len(terms) + 1, dtype=np.int64)
    total = sum(len(postings[t]) for t in terms)
    doc_ids = np.zeros(total, dtype=np.int32)
    tfs = np.zeros(total, dtype=np.int32)
    pos = 0
    for i, t in enumerate(terms):
        plist = postings[t]  # doc order == ingestion order, already ascending
        for d, tf in plist:
            doc_ids[pos] = d
            tfs[pos] = tf
            pos += 1
        offsets[i + 1] = pos
    return Index(lang=lang, params=params,
                 doc_lens=np.asarray(doc_lens, dtype=np.int32),
                 titles=titles, terms=terms, offsets=offsets,
                 doc_ids=doc_ids, tfs=tfs)


def bm25_score(index, query_terms, doc_id):
    """Score one document against tokenized query terms.

    Additive over query term instances; terms absent from the document
    contribute 0. Raises on unknown doc_id.
    """
    if not 0 <= doc_id < index.n_docs:
        raise RetrievalError(f"unknown doc_id {doc_id}")
    k1 = index.params.k1
    norm = index._norms[doc_id]
    score = 0.0
    for term in query_terms:
        plist = index.postings(term)
        if plist is None:
            continue
        ids, tfs = plist
        i = int(np.searchsorted(ids, doc_id))
        if i >= len(ids) or ids[i] != doc_id:
            continue
        tf = float(tfs[i])
        score += (index.idf(term) * (tf * (k1 + 1.0))) / (tf + norm)
    return score


def search(index, query, n=DEFAULT_TOP_N):
    """Rank documents for a query string; top n, ties by ascending doc_id.

    All documents participate (non-matching ones score 0.0), which keeps the
    full ranking identical to brute-force application of the formula.
    """
    if n <= 0:
        raise RetrievalError(f"n must be positive, got {n}")
    scores = np.zeros(index.n_docs, dtype=np.float64)
    for term in tokenize(query, index.lang):
        plist = index.postings(term)
        if plist is None:
            continue
        ids, tfs = plist
        kernels.accumulate_scores(scores, ids, tfs, index._norms,
                                  index.idf(term), index.params.k1)
    order = np.argsort(-scores, kind="stable")[:n]
    return [ScoredDoc(doc_id=int(d), title=index.titles[d],
                      score=float(scores[d])) for d in order]


def hit_at_n(results, golds, n, missing_gold="error"):
    """Fraction of questions whose gold title is among their top-n titles.

    results -- per-question ranked title lists
    golds   -- per-question gold document title (may be None)
    missing_gold -- "error" (default) or "skip" to exclude and count
    """
    if n <= 0:
        raise RetrievalError(f"n must be positive, got {n}")
    if len(results) != len(golds):
        raise RetrievalError("results and golds must align")
    hits = 0
    judged = 0
    skipped = 0
    for titles, gold in zip(results, golds):
        if gold is None or not gold.strip():
            if missing_gold == "skip":
                skipped += 1
                continue
            raise RetrievalError("question missing gold title")
        judged += 1
        want = gold.strip()
        if any(t.strip() == want for t in titles[:n]):
            hits += 1
    if skipped:
        logger.warning("hit_at_n: excluded %d questions without a gold "
                       "title", skipped)
    if judged == 0:
        raise RetrievalError("no questions with a gold title")
    return hits / judged


# -- persistence ----------------------------------------------------------

def save_index(index, path):
    buf = io.BytesIO()
    buf.write(INDEX_MAGIC)
    buf.write(struct.pack("<I", INDEX_VERSION))
    lang_b = index.lang.encode("utf-8")
    buf.write(struct.pack("<H", len(lang_b)))
    buf.write(lang_b)
    buf.write(struct.pack("<dd", index.params.k1, index.params.b))
    buf.write(struct.pack("<I", index.n_docs))
    buf.write(index.doc_lens.astype("<u4").tobytes())
    for title in index.titles:
        tb = title.encode("utf-8")
        buf.write(struct.pack("<I", len(tb)))
        buf.write(tb)
    buf.write(struct.pack("<I", len(index.terms)))
    for term in index.terms:
        tb = term.encode("utf-8")
        buf.write(struct.pack("<H", len(tb)))
        buf.write(tb)
    buf.write(index.offsets.astype("<u8").tobytes())
    buf.write(index.doc_ids.astype("<u4").tobytes())
    buf.write(index.tfs.astype("<u4").tobytes())
    with open(path, "wb") as f:
        f.write(buf.getvalue())


def load_index(path):
    data = open(path, "rb").read()
    if data[:4] != INDEX_MAGIC:
        raise RetrievalError(f"not an index file: {path}")
    pos = 4
    (version,) = struct.unpack_from("<I", data, pos)
    pos += 4
    if version != INDEX_VERSION:
        raise RetrievalError(f"unsupported index version {version}")
    (lang_len,) = struct.unpack_from("<H", data, pos)
    pos += 2
    lang = data[pos:pos + lang_len].decode("utf-8")
    pos += lang_len
    k1, b = struct.unpack_from("<dd", data, pos)
    pos += 16
    (n_docs,) = struct.unpack_from("<I", data, pos)
    pos += 4
    doc_lens = np.frombuffer(data, dtype="<u4", count=n_docs,
                             offset=pos).astype(np.int32)
    pos += 4 * n_docs
    titles = []
    for _ in range(n_docs):
        (tlen,) = struct.unpack_from("<I", data, pos)
        pos += 4
        titles.append(data[pos:pos + tlen].decode("utf-8"))
        pos += tlen
    (n_terms,) = struct.unpack_from("<I", data, pos)
    pos += 4
    terms = []
    for _ in range(n_terms):
        (tlen,) = struct.unpack_from("<H", data, pos)
        pos += 2
        terms.append(data[pos:pos + tlen].decode("utf-8"))
        pos += tlen
    offsets = np.frombuffer(data, dtype="<u8", count=n_terms + 1,
                            offset=pos).astype(np.int64)
    pos += 8 * (n_terms + 1)
    total = int(offsets[-1])
    doc_ids = np.frombuffer(data, dtype="<u4", count=total,
                            offset=pos).astype(np.int32)
    pos += 4 * total
    tfs = np.frombuffer(data, dtype="<u4", count=total,
                        offset=pos).astype(np.int32)
    return Index(lang=lang, params=Bm25Params(k1=k1, b=b), doc_lens=doc_lens,
                 titles=titles, terms=terms, offsets=offsets,
                 doc_ids=doc_ids, tfs=tfs)
