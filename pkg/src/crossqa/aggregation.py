"""Building the multilingual candidate set fed to the generator.

Three policies: the monolingual top-k (default 5), the global cross-lingual
top-k (default 10), and the per-language quota (default 2 per language,
giving 2x5=10 over five pools).  Scores from different languages are
compared raw by default (a shared scorer scale is assumed); per-pool
max-normalization can be switched on via the policy.  The final ordering is
score-descending with a deterministic tie rule so the generator prompt is
reproducible.
"""

import dataclasses
from dataclasses import dataclass

MONO_TOP_K = "mono-top-k"
CROSS_TOP_K = "cross-top-k"
CROSS_TOP_PER_LANG = "cross-top-per-lang"

_DEFAULT_K = {MONO_TOP_K: 5, CROSS_TOP_K: 10}


class AggregationError(Exception):
    pass


@dataclass(frozen=True)
class AggregationPolicy:
    kind: str
    k: int | None = None
    per_lang: int = 2
    normalize_per_lang: bool = False  # divide by each pool's max score

    def __post_init__(self):
        if self.kind not in (MONO_TOP_K, CROSS_TOP_K, CROSS_TOP_PER_LANG):
            raise ValueError(f"unknown aggregation policy {self.kind!r}")
        if self.kind == CROSS_TOP_PER_LANG:
            if self.per_lang <= 0:
                raise ValueError("per_lang must be positive")
        else:
            k = self.k if self.k is not None else _DEFAULT_K[self.kind]
            if k <= 0:
                raise ValueError("k must be positive")
            object.__setattr__(self, "k", k)


def mono_top_k(k=5):
    return AggregationPolicy(kind=MONO_TOP_K, k=k)


def cross_top_k(k=10):
    return AggregationPolicy(kind=CROSS_TOP_K, k=k)


def cross_top_per_lang(per_lang=2):
    return AggregationPolicy(kind=CROSS_TOP_PER_LANG, per_lang=per_lang)


@dataclass(frozen=True)
class MultilingualCandidateSet:
    question_lang: str
    candidates: tuple
    policy: AggregationPolicy

    def __len__(self):
        return len(self.candidates)


def _sort_key(c):
    return (-c.score, c.lang, c.doc_id, c.sent_index)


def aggregate(pools, policy, question_lang):
    """Merge per-language ranked pools into one candidate set.

    Each pool must be sorted descending by score.  Pools shorter than the
    requested quota contribute what they have; there is no padding.  The
    result is independent of the pools' mapping iteration order.
    """
    if not pools:
        raise AggregationError("no candidate pools given")
    for lang, pool in pools.items():
        for c in pool:
            if c.score is None:
                raise AggregationError(
                    f"unscored candidate in pool {lang!r}")

    if policy.normalize_per_lang:
        normalized = {}
        for lang, pool in pools.items():
            top = max((c.score for c in pool), default=0.0)
            if top > 0:
                pool = [dataclasses.replace(c, score=c.score / top)
                        for c in pool]
            normalized[lang] = pool
        pools = normalized

    if policy.kind == MONO_TOP_K:
        if len(pools) != 1:
            raise AggregationError(
                f"mono policy requires exactly one pool, got {len(pools)}")
        (pool,) = pools.values()
        selected = list(pool[:policy.k])
    elif policy.kind == CROSS_TOP_K:
        merged = [c for pool in pools.values() for c in pool]
        merged.sort(key=_sort_key)
        selected = merged[:policy.k]
    else:
        selected = [c for pool in pools.values()
                    for c in pool[:policy.per_lang]]

    selected.sort(key=_sort_key)
    return MultilingualCandidateSet(question_lang=question_lang,
                                    candidates=tuple(selected),
                                    policy=policy)
