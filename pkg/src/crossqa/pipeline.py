"""End-to-end orchestration: translate, retrieve, rank, aggregate, generate.

Each question fans out per language (concurrently when configured); results
are merged in the fixed configured language order before aggregation so
concurrency never affects output.  Languages whose translation, retrieval or
scoring fails are dropped from the candidate set with a warning recorded in
the trace; the question fails only if every language fails or the generator
call fails.  Every answer leaves a persisted AnswerTrace for audit.
"""

import hashlib
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__, aggregation, backends, generation, retrieval
from .as2 import ScorerHandle, rank_candidates
from .corpus import DocumentStore, Question
from .segmentation import extract_candidates
from .tokenization import DEFAULT_LANGUAGES

logger = logging.getLogger(__name__)

MONO = "mono"
CROSS = "cross"


class PipelineError(Exception):
    pass


class GenerationFailed(PipelineError):
    """Generator backend failure; fatal for the question."""

    def __init__(self, q_id, trace_id, cause):
        super().__init__(f"generation failed for question {q_id!r}: {cause}")
        self.q_id = q_id
        self.trace_id = trace_id
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    languages: tuple
    setting: str
    store_dir: str
    index_dir: str
    trace_dir: str
    generate_backend: backends.BackendConfig
    translate_backend: backends.BackendConfig | None = None
    score_backend: backends.BackendConfig | None = None
    scorer: ScorerHandle = field(default_factory=ScorerHandle)
    policy: aggregation.AggregationPolicy = field(
        default_factory=aggregation.cross_top_per_lang)
    retrieval_n: int = retrieval.DEFAULT_TOP_N
    prompt_budget: int = generation.DEFAULT_PROMPT_BUDGET
    prompt_prefix: str = generation.PROMPT_PREFIX
    prompt_separator: str = generation.SEPARATOR
    max_new_chars: int = backends.DEFAULT_MAX_NEW_CHARS
    workers: int = 1

    def __post_init__(self):
        if self.setting not in (MONO, CROSS):
            raise ValueError(f"unknown setting {self.setting!r}")
        if self.setting == CROSS and len(self.languages) < 2:
            raise ValueError("cross setting requires at least 2 languages")
        if not self.languages:
            raise ValueError("no languages configured")
        if self.setting == CROSS and self.translate_backend is None:
            raise ValueError("cross setting requires a translate backend")

    def semantic_hash(self):
        """Hash of answer-affecting configuration (execution knobs like
        worker count and local paths excluded)."""
        payload = {
            "languages": list(self.languages),
            "setting": self.setting,
            "scorer": [self.scorer.kind, self.scorer.endpoint],
            "policy": [self.policy.kind, self.policy.k, self.policy.per_lang,
                       self.policy.normalize_per_lang],
            "retrieval_n": self.retrieval_n,
            "prompt_budget": self.prompt_budget,
            "prompt_prefix": self.prompt_prefix,
            "prompt_separator": self.prompt_separator,
            "max_new_chars": self.max_new_chars,
        }
        blob = json.dumps(payload, sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass
class LanguageTrace:
    lang: str
    query: str | None = None
    translated: bool = False
    docs: list = field(default_factory=list)
    candidates: list = field(default_factory=list)
    error: str | None = None
    ranked: list = field(default_factory=list, repr=False)  # not serialized


@dataclass
class AnswerTrace:
    trace_id: str
    q_id: str
    question: str
    lang: str
    setting: str
    policy: dict
    languages: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    m: list = field(default_factory=list)
    prompt: str | None = None
    prompt_truncated: bool = False
    answer: dict | None = None
    error: str | None = None
    timings: dict = field(default_factory=dict)
    backend_ids: dict = field(default_factory=dict)
    engine_version: str = __version__

    def to_dict(self):
        return {
            "trace_id": self.trace_id,
            "q_id": self.q_id,
            "question": self.question,
            "lang": self.lang,
            "setting": self.setting,
            "policy": self.policy,
            "languages": [{
                "lang": lt.lang,
                "query": lt.query,
                "translated": lt.translated,
                "docs": lt.docs,
                "candidates": lt.candidates,
                "error": lt.error,
            } for lt in self.languages],
            "warnings": self.warnings,
            "m": self.m,
            "prompt": self.prompt,
            "prompt_truncated": self.prompt_truncated,
            "answer": self.answer,
            "error": self.error,
            "timings": self.timings,
            "backend_ids": self.backend_ids,
            "engine_version": self.engine_version,
        }


def _candidate_dict(c):
    return {"text": c.text, "lang": c.lang, "doc_id": c.doc_id,
            "sent_index": c.sent_index, "score": c.score}


@dataclass
class BatchReport:
    n_questions: int = 0
    n_ok: int = 0
    n_failed: int = 0
    failures: dict = field(default_factory=dict)
    mean_timings: dict = field(default_factory=dict)


class QaEngine:
    """Loaded stores, indices and backend clients for answering questions."""

    def __init__(self, cfg, *, clock=time.perf_counter, transports=None,
                 sleep=time.sleep):
        self.cfg = cfg
        self._clock = clock
        self.store = DocumentStore(cfg.store_dir, languages=cfg.languages)
        self.indices = {}
        for lang in cfg.languages:
            path = Path(cfg.index_dir) / f"{lang}.idx"
            if not path.exists():
                raise PipelineError(f"missing index for {lang!r}: {path}")
            self.indices[lang] = retrieval.load_index(path)
        transports = transports or {}

        def make(role, bcfg):
            if bcfg is None:
                return None
            return backends.Backend(bcfg, transport=transports.get(role),
                                    sleep=sleep)

        self.translate_backend = make("translate", cfg.translate_backend)
        score_cfg = cfg.score_backend
        if score_cfg is None and cfg.scorer.kind == "remote":
            score_cfg = backends.BackendConfig(role="score",
                                               endpoint=cfg.scorer.endpoint)
        self.score_backend = make("score", score_cfg)
        self.generate_backend = make("generate", cfg.generate_backend)

    def close(self):
        for b in (self.translate_backend, self.score_backend,
                  self.generate_backend):
            if b is not None:
                b.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    # -- single question ----------------------------------------------------

    def trace_id_for(self, q_id):
        blob = f"{q_id}|{self.cfg.semantic_hash()}"
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]

    def answer_question(self, question, *, setting=None, policy=None,
                        trace_dir=None):
        cfg = self.cfg
        setting = setting or cfg.setting
        policy = policy or cfg.policy
        if setting == MONO:
            # mono: the only effective language is the question's own
            if question.lang not in cfg.languages:
                raise PipelineError(
                    f"unknown language {question.lang!r}; configured: "
                    f"{list(cfg.languages)}")
            langs = [question.lang]
        else:
            langs = list(cfg.languages)
            if len(langs) < 2:
                raise PipelineError("cross setting requires >= 2 languages")

        trace = AnswerTrace(
            trace_id=self.trace_id_for(question.q_id),
            q_id=question.q_id, question=question.text, lang=question.lang,
            setting=setting,
            policy={"kind": policy.kind, "k": policy.k,
                    "per_lang": policy.per_lang},
            backend_ids={
                role: b.cfg.endpoint for role, b in [
                    ("translate", self.translate_backend),
                    ("score", self.score_backend),
                    ("generate", self.generate_backend)] if b is not None},
        )

        t0 = self._clock()
        if len(langs) == 1 or cfg.workers <= 1:
            lang_traces = [self._process_language(question, lang)
                           for lang in langs]
        else:
            with ThreadPoolExecutor(
                    max_workers=min(cfg.workers, len(langs))) as pool:
                lang_traces = list(pool.map(
                    lambda lang: self._process_language(question, lang),
                    langs))
        trace.timings["retrieve_rank"] = self._clock() - t0
        trace.languages = lang_traces  # merged in fixed cfg order

        pools = {}
        for lt in lang_traces:
            if lt.error is not None:
                trace.warnings.append(f"{lt.lang}: {lt.error}")
                logger.warning("question %s: dropping language %s (%s)",
                               question.q_id, lt.lang, lt.error)
            else:
                pools[lt.lang] = lt.ranked
        if not pools:
            trace.error = ("all languages failed: "
                           + "; ".join(trace.warnings))
            self._persist(trace, trace_dir)
            raise PipelineError(
                f"question {question.q_id!r}: {trace.error}")

        t1 = self._clock()
        m = aggregation.aggregate(pools, policy, question.lang)
        trace.m = [_candidate_dict(c) for c in m.candidates]
        prompt = generation.assemble_prompt(
            question.text, m, budget=cfg.prompt_budget,
            prefix=cfg.prompt_prefix, separator=cfg.prompt_separator)
        trace.prompt = prompt.text
        trace.prompt_truncated = prompt.truncated
        trace.timings["aggregate_prompt"] = self._clock() - t1

        t2 = self._clock()
        try:
            answer = generation.generate_answer(
                question, m, self.generate_backend,
                max_new_chars=cfg.max_new_chars)
        except backends.WireError as exc:
            trace.error = f"generate: {exc}"
            self._persist(trace, trace_dir)
            raise GenerationFailed(question.q_id, trace.trace_id, exc) from exc
        trace.timings["generate"] = self._clock() - t2
        trace.answer = {"text": answer.text, "lang": answer.lang,
                        "closed_book": answer.closed_book}
        self._persist(trace, trace_dir)
        return trace

    def _process_language(self, question, lang):
        lt = LanguageTrace(lang=lang)
        if lang == question.lang:
            query = question.text
        else:
            try:
                query = self.translate_backend.translate(
                    question.text, question.lang, lang)
                lt.translated = True
            except backends.WireError as exc:
                lt.error = f"translate: {exc}"
                return lt
        lt.query = query
        try:
            hits = retrieval.search(self.indices[lang], query,
                                    self.cfg.retrieval_n)
            docs = [self.store.get(lang, h.doc_id) for h in hits]
            pool = extract_candidates(docs, lang)
        except Exception as exc:
            lt.error = f"retrieve: {exc}"
            return lt
        try:
            ranked = rank_candidates(
                Question(q_id=question.q_id, text=query, lang=lang),
                pool, self.cfg.scorer, backend=self.score_backend)
        except Exception as exc:
            lt.error = f"rank: {exc}"
            return lt
        lt.docs = [[h.doc_id, h.score] for h in hits]
        lt.candidates = [_candidate_dict(c) for c in ranked]
        lt.ranked = ranked
        return lt

    def _persist(self, trace, trace_dir=None):
        root = Path(trace_dir if trace_dir is not None else
                    self.cfg.trace_dir)
        root.mkdir(parents=True, exist_ok=True)
        path = root / f"{trace.trace_id}.json"
        blob = json.dumps(trace.to_dict(), ensure_ascii=False,
                          sort_keys=True, indent=1)
        path.write_text(blob + "\n", encoding="utf-8")

    # -- batches -------------------------------------------------------------

    def run_batch(self, questions, out_dir):
        """Answer every question, one trace file each plus a summary.

        Per-question failures are recorded and the batch continues; output
        order always equals input order.
        """
        out = Path(out_dir)
        trace_dir = out / "traces"
        out.mkdir(parents=True, exist_ok=True)
        report = BatchReport(n_questions=len(questions))

        def run_one(q):
            try:
                trace = self.answer_question(q, trace_dir=trace_dir)
                return {"q_id": q.q_id, "status": "ok",
                        "trace_id": trace.trace_id,
                        "answer": trace.answer["text"]}, trace.timings
            except Exception as exc:
                trace_id = getattr(exc, "trace_id", None)
                return {"q_id": q.q_id, "status": "failed",
                        "trace_id": trace_id, "error": str(exc)}, None

        if self.cfg.workers <= 1:
            outcomes = [run_one(q) for q in questions]
        else:
            with ThreadPoolExecutor(max_workers=self.cfg.workers) as pool:
                outcomes = list(pool.map(run_one, questions))

        stage_sums = {}
        stage_counts = {}
        with open(out / "summary.jsonl", "w", encoding="utf-8") as f:
            for row, timings in outcomes:
                if row["status"] == "ok":
                    report.n_ok += 1
                    for stage, dt in timings.items():
                        stage_sums[stage] = stage_sums.get(stage, 0.0) + dt
                        stage_counts[stage] = stage_counts.get(stage, 0) + 1
                else:
                    report.n_failed += 1
                    report.failures[row["q_id"]] = row["error"]
                f.write(json.dumps(row, ensure_ascii=False, sort_keys=True)
                        + "\n")
        report.mean_timings = {s: stage_sums[s] / stage_counts[s]
                               for s in stage_sums}
        return report


# -- config files -------------------------------------------------------------

def _backend_from_dict(role, obj):
    if obj is None:
        endpoint = os.environ.get(backends.ENV_URLS[role])
        if not endpoint:
            return None
        return backends.BackendConfig(role=role, endpoint=endpoint)
    kwargs = {k: obj[k] for k in ("timeout", "max_retries", "max_in_flight")
              if k in obj}
    endpoint = os.environ.get(backends.ENV_URLS[role], obj.get("endpoint"))
    if not endpoint:
        raise ValueError(f"backend {role!r}: no endpoint configured")
    return backends.BackendConfig(role=role, endpoint=endpoint, **kwargs)


def load_config(path):
    """Load a pipeline config from a JSON file (see README for the keys).

    Backend endpoints honor the CROSSQA_TRANSLATE_URL / CROSSQA_SCORE_URL /
    CROSSQA_GENERATE_URL environment overrides.
    """
    obj = json.loads(Path(path).read_text(encoding="utf-8"))
    policy_obj = obj.get("policy", {})
    kind_alias = {"mono": aggregation.MONO_TOP_K,
                  "top-k": aggregation.CROSS_TOP_K,
                  "top-per-lang": aggregation.CROSS_TOP_PER_LANG}
    kind = policy_obj.get("kind", "top-per-lang")
    policy = aggregation.AggregationPolicy(
        kind=kind_alias.get(kind, kind),
        k=policy_obj.get("k"),
        per_lang=policy_obj.get("per_lang", 2),
        normalize_per_lang=policy_obj.get("normalize_per_lang", False))
    scorer_obj = obj.get("scorer", {})
    scorer = ScorerHandle(kind=scorer_obj.get("kind", "lexical-baseline"),
                          endpoint=scorer_obj.get("endpoint"))
    bk = obj.get("backends", {})
    gen = _backend_from_dict("generate", bk.get("generate"))
    if gen is None:
        raise ValueError("a generate backend is required")
    return PipelineConfig(
        languages=tuple(obj.get("languages", DEFAULT_LANGUAGES)),
        setting=obj.get("setting", MONO),
        store_dir=obj["store_dir"],
        index_dir=obj["index_dir"],
        trace_dir=obj.get("trace_dir", "traces"),
        generate_backend=gen,
        translate_backend=_backend_from_dict("translate",
                                             bk.get("translate")),
        score_backend=_backend_from_dict("score", bk.get("score")),
        scorer=scorer,
        policy=policy,
        retrieval_n=obj.get("retrieval_n", retrieval.DEFAULT_TOP_N),
        prompt_budget=obj.get("prompt_budget",
                              generation.DEFAULT_PROMPT_BUDGET),
        max_new_chars=obj.get("max_new_chars",
                              backends.DEFAULT_MAX_NEW_CHARS),
        workers=obj.get("workers", 1),
    )
