"""Evaluation metrics: vote-based accuracy, Fleiss' kappa, BLEU, ROUGE-L
and Spearman rank correlation.

All functions are pure and deterministic.  Metric tokenization is
whitespace-split after NFKC + casefold for space-delimited languages and
character-level for Japanese (answer lengths there are measured in
characters).
"""

import math
import unicodedata
from collections import Counter
from dataclasses import dataclass

BLEU_MAX_ORDER = 4
SENTENCE_BLEU_FLOOR = 0.1


class MetricError(Exception):
    pass


@dataclass(frozen=True)
class VoteRecord:
    item_id: str
    votes: tuple

    def __post_init__(self):
        if not self.votes:
            raise ValueError(f"item {self.item_id!r}: votes must be non-empty")
        if any(v not in (0, 1) for v in self.votes):
            raise ValueError(f"item {self.item_id!r}: votes must be 0/1")


@dataclass(frozen=True)
class MetricReport:
    accuracy: float
    kappa: float | None = None
    bleu: float | None = None
    rouge_l_f: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError("accuracy out of [0,1]")
        if self.kappa is not None and not -1.0 <= self.kappa <= 1.0:
            raise ValueError("kappa out of [-1,1]")
        if self.bleu is not None and not 0.0 <= self.bleu <= 100.0:
            raise ValueError("bleu out of [0,100]")
        if self.rouge_l_f is not None and not 0.0 <= self.rouge_l_f <= 1.0:
            raise ValueError("rouge_l_f out of [0,1]")


def metric_tokens(text, lang):
    """Tokens for BLEU/ROUGE: chars for Japanese, whitespace words else."""
    normalized = unicodedata.normalize("NFKC", text).casefold()
    if lang == "ja":
        return [c for c in normalized if not c.isspace()]
    return normalized.split()


# -- vote accuracy ----------------------------------------------------------

def vote_accuracy(records):
    """Micro-averaged accuracy: sum of positive votes over all votes."""
    if not records:
        raise MetricError("no vote records")
    positive = sum(sum(r.votes) for r in records)
    total = sum(len(r.votes) for r in records)
    return positive / total


# -- Fleiss' kappa -----------------------------------------------------------

def fleiss_kappa(records):
    """Chance-corrected agreement for binary votes with a fixed rater count.

    Returns 1.0 by convention when expected agreement is already perfect
    (every vote in a single category).
    """
    if len(records) < 2:
        raise MetricError("fleiss_kappa needs at least 2 items")
    n = len(records[0].votes)
    if n < 2:
        raise MetricError("fleiss_kappa needs at least 2 raters")
    if any(len(r.votes) != n for r in records):
        raise MetricError("fleiss_kappa requires the same number of raters "
                          "for every item")
    n_items = len(records)
    agree_sum = 0.0
    pos_total = 0
    for r in records:
        pos = sum(r.votes)
        neg = n - pos
        agree_sum += (pos * pos + neg * neg - n) / (n * (n - 1))
        pos_total += pos
    p_bar = agree_sum / n_items
    p_pos = pos_total / (n_items * n)
    p_e = p_pos ** 2 + (1 - p_pos) ** 2
    if p_e == 1.0:
        return 1.0
    return (p_bar - p_e) / (1 - p_e)


# -- ROUGE-L ------------------------------------------------------------------

@dataclass(frozen=True)
class RougeL:
    precision: float
    recall: float
    f: float


def _lcs_length(a, b):
    if not a or not b:
        return 0
    if len(b) > len(a):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        curr = [0]
        for j, y in enumerate(b, start=1):
            if x == y:
                curr.append(prev[j - 1] + 1)
            else:
                curr.append(max(prev[j], curr[j - 1]))
        prev = curr
    return prev[-1]


def rouge_l(hypothesis, reference, lang="en", beta=1.0):
    """LCS-based ROUGE-L precision/recall/F; all zeros on empty input."""
    hyp = metric_tokens(hypothesis, lang)
    ref = metric_tokens(reference, lang)
    if not hyp or not ref:
        return RougeL(0.0, 0.0, 0.0)
    lcs = _lcs_length(hyp, ref)
    p = lcs / len(hyp)
    r = lcs / len(ref)
    if p == 0.0 or r == 0.0:
        return RougeL(p, r, 0.0)
    f = (1 + beta * beta) * p * r / (r + beta * beta * p)
    return RougeL(p, r, f)


# -- BLEU -----------------------------------------------------------------------

def _ngram_counts(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _pair_stats(hyp, ref):
    """Per-order (clipped matches, total hyp ngrams) plus token lengths."""
    stats = []
    for n in range(1, BLEU_MAX_ORDER + 1):
        hyp_ngrams = _ngram_counts(hyp, n)
        ref_ngrams = _ngram_counts(ref, n)
        match = sum(min(c, ref_ngrams[g]) for g, c in hyp_ngrams.items())
        total = max(len(hyp) - n + 1, 0)
        stats.append((match, total))
    return stats


def _brevity_penalty(hyp_len, ref_len):
    if hyp_len == 0:
        return 0.0
    if hyp_len >= ref_len:
        return 1.0
    return math.exp(1.0 - ref_len / hyp_len)


def sentence_bleu(hypothesis, reference, lang="en",
                  floor=SENTENCE_BLEU_FLOOR):
    """Smoothed single-pair BLEU: zero n-gram match counts are floored to
    ``floor`` before dividing; orders the hypothesis is too short for are
    skipped."""
    hyp = metric_tokens(hypothesis, lang)
    ref = metric_tokens(reference, lang)
    log_sum = 0.0
    orders = 0
    for match, total in _pair_stats(hyp, ref):
        if total == 0:
            continue
        orders += 1
        log_sum += math.log((match if match > 0 else floor) / total)
    if orders == 0:
        return 0.0
    bp = _brevity_penalty(len(hyp), len(ref))
    return 100.0 * bp * math.exp(log_sum / orders)


def corpus_bleu(hypotheses, references, lang="en"):
    """Unsmoothed corpus BLEU over aligned hypothesis/reference lists."""
    if len(hypotheses) != len(references):
        raise MetricError("hypotheses and references must align")
    if not hypotheses:
        raise MetricError("empty input")
    matches = [0] * BLEU_MAX_ORDER
    totals = [0] * BLEU_MAX_ORDER
    hyp_len = 0
    ref_len = 0
    for h, r in zip(hypotheses, references):
        hyp = metric_tokens(h, lang)
        ref = metric_tokens(r, lang)
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n, (match, total) in enumerate(_pair_stats(hyp, ref)):
            matches[n] += match
            totals[n] += total
    log_sum = 0.0
    for match, total in zip(matches, totals):
        if match == 0 or total == 0:
            return 0.0
        log_sum += math.log(match / total)
    bp = _brevity_penalty(hyp_len, ref_len)
    return 100.0 * bp * math.exp(log_sum / BLEU_MAX_ORDER)


def bleu(hypotheses, references, lang="en", mode="corpus"):
    """BLEU in [0,100]; corpus mode is unsmoothed, sentence mode averages
    floor-smoothed per-pair scores."""
    if mode == "corpus":
        return corpus_bleu(hypotheses, references, lang)
    if mode == "sentence":
        if len(hypotheses) != len(references):
            raise MetricError("hypotheses and references must align")
        if not hypotheses:
            raise MetricError("empty input")
        scores = [sentence_bleu(h, r, lang)
                  for h, r in zip(hypotheses, references)]
        return sum(scores) / len(scores)
    raise MetricError(f"unknown BLEU mode {mode!r}")


# -- Spearman ---------------------------------------------------------------

def _average_ranks(values):
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1  # average of 1-based positions i+1..j+1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def spearman(xs, ys):
    """Spearman rank correlation with average ranks for ties."""
    if len(xs) != len(ys):
        raise MetricError("xs and ys must align")
    if len(xs) < 2:
        raise MetricError("need at least 2 points")
    if len(set(xs)) == 1 or len(set(ys)) == 1:
        raise MetricError("spearman undefined for a constant list")
    rx = _average_ranks(xs)
    ry = _average_ranks(ys)
    mx = sum(rx) / len(rx)
    my = sum(ry) / len(ry)
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    return cov / math.sqrt(vx * vy)
