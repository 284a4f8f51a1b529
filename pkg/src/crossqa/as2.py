"""Answer sentence selection: dataset construction from span-annotated
questions, plus candidate ranking with a pluggable scorer.

The neural ranker lives behind the remote wire protocol; the deterministic
lexical baseline keeps the pipeline testable without one.
"""

import dataclasses
import json
import re
from dataclasses import dataclass, field

from . import backends
from .segmentation import Candidate, split_sentences
from .tokenization import tokenize

LEXICAL_BASELINE = "lexical-baseline"
REMOTE = "remote"


class As2Error(Exception):
    pass


@dataclass(frozen=True)
class ScorerHandle:
    kind: str = LEXICAL_BASELINE
    endpoint: str | None = None

    def __post_init__(self):
        if self.kind not in (LEXICAL_BASELINE, REMOTE):
            raise ValueError(f"unknown scorer kind {self.kind!r}")
        if self.kind == REMOTE and not self.endpoint:
            raise ValueError("remote scorer requires an endpoint")


@dataclass(frozen=True)
class LabeledPair:
    q_id: str
    question: str
    candidate: Candidate
    label: int


@dataclass
class BuildReport:
    n_questions: int = 0
    n_kept: int = 0
    n_pairs: int = 0
    n_positive_pairs: int = 0
    dropped_no_positive: list = field(default_factory=list)
    dropped_unresolved_doc: list = field(default_factory=list)


def _normalize_ws(text):
    return re.sub(r"\s+", " ", text).strip()


def build_as2_dataset(questions, store):
    """Label every sentence of each question's gold document.

    Sentences overlapping the gold span (by character range when offsets
    resolve, by whitespace-normalized containment otherwise) are positive;
    the rest of the document is negative.  Questions yielding no positive
    sentence are dropped and counted, never emitted, so every emitted q_id
    has at least one positive pair.
    """
    pairs = []
    report = BuildReport(n_questions=len(questions))
    for q in questions:
        if not q.has_span() or not (q.gold_span_text or "").strip():
            raise As2Error(f"question {q.q_id!r} has an empty gold span")
        if q.gold_doc_title is None:
            report.dropped_unresolved_doc.append(q.q_id)
            continue
        doc_id = store.doc_id_by_title(q.lang, q.gold_doc_title)
        if doc_id is None:
            report.dropped_unresolved_doc.append(q.q_id)
            continue
        doc = store.get(q.lang, doc_id)
        sentences = split_sentences(doc.body, q.lang)

        span = None
        if (q.gold_span_resolved and q.gold_passage is not None
                and q.gold_span_start is not None):
            pos = doc.body.find(q.gold_passage)
            if pos >= 0:
                span = (pos + q.gold_span_start, pos + q.gold_span_end)
        span_text = _normalize_ws(q.gold_span_text)

        q_pairs = []
        n_pos = 0
        for sent in sentences:
            if span is not None:
                positive = sent.start < span[1] and span[0] < sent.end
            else:
                positive = span_text in _normalize_ws(sent.text)
            label = 1 if positive else 0
            n_pos += label
            q_pairs.append(LabeledPair(
                q_id=q.q_id, question=q.text, label=label,
                candidate=Candidate(text=sent.text, lang=q.lang,
                                    doc_id=doc_id,
                                    sent_index=sent.sent_index)))
        if n_pos == 0:
            report.dropped_no_positive.append(q.q_id)
            continue
        report.n_kept += 1
        report.n_positive_pairs += n_pos
        pairs.extend(q_pairs)
    report.n_pairs = len(pairs)
    return pairs, report


def write_as2_dataset(pairs, path):
    """Emit labeled pairs as JSON-lines in build order."""
    with open(path, "w", encoding="utf-8") as f:
        for p in pairs:
            f.write(json.dumps({
                "q_id": p.q_id,
                "question": p.question,
                "candidate_text": p.candidate.text,
                "lang": p.candidate.lang,
                "doc_id": p.candidate.doc_id,
                "sent_index": p.candidate.sent_index,
                "label": p.label,
            }, ensure_ascii=False, sort_keys=True) + "\n")


def lexical_score(question, candidate, q_lang="en", c_lang="en"):
    """Unique-token question coverage: |T(q) ∩ T(c)| / |T(q)|.

    Normalizing by question tokens keeps long candidates unpenalized.
    0.0 when the question has no tokens.
    """
    q_tokens = set(tokenize(question, q_lang))
    if not q_tokens:
        return 0.0
    c_tokens = set(tokenize(candidate, c_lang))
    return len(q_tokens & c_tokens) / len(q_tokens)


def rank_candidates(question, pool, scorer, backend=None):
    """Score and sort a monolingual candidate pool, best first.

    Ties break by (doc_id, sent_index) ascending.  The lexical baseline is
    fully deterministic; remote scorer failures are re-raised with the
    question id attached.
    """
    pool = list(pool)
    if not pool:
        return []
    langs = {c.lang for c in pool}
    if len(langs) > 1:
        raise As2Error(f"candidate pool must be monolingual, got {langs}")

    if scorer.kind == LEXICAL_BASELINE:
        scores = [lexical_score(question.text, c.text, question.lang, c.lang)
                  for c in pool]
    else:
        own_backend = None
        if backend is None:
            cfg = backends.BackendConfig(role="score",
                                         endpoint=scorer.endpoint)
            backend = own_backend = backends.Backend(cfg)
        try:
            scores = backend.score(question.text, [c.text for c in pool])
        except backends.WireError as exc:
            raise As2Error(
                f"remote scoring failed for question {question.q_id!r}: "
                f"{exc}") from exc
        finally:
            if own_backend is not None:
                own_backend.close()

    scored = [dataclasses.replace(c, score=s) for c, s in zip(pool, scores)]
    scored.sort(key=lambda c: (-c.score, c.doc_id, c.sent_index))
    return scored
