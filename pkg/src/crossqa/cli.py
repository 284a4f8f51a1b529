"""Command-line interface.

One subcommand per pipeline stage plus the end-to-end commands; every
command reads/writes UTF-8 JSON-lines so stages can be chained with files.
"""

import json
import sys
from pathlib import Path

import click

from . import aggregation as agg
from . import backends, conformance, evaluation, pipeline, retrieval
from .as2 import ScorerHandle, build_as2_dataset, rank_candidates, \
    write_as2_dataset
from .corpus import DocumentStore, Question, load_questions
from .segmentation import Candidate, split_sentences
from .tokenization import DEFAULT_LANGUAGES

_POLICY_ALIASES = {"mono": agg.MONO_TOP_K, "top-k": agg.CROSS_TOP_K,
                   "top-per-lang": agg.CROSS_TOP_PER_LANG}


def _jdump(obj):
    return json.dumps(obj, ensure_ascii=False, sort_keys=True)


@click.group()
def main():
    """Cross-lingual retrieval-based generative QA engine."""


@main.command()
@click.option("--lang", required=True)
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True))
@click.option("--store", "store_dir", required=True, type=click.Path())
@click.option("--skip-errors", is_flag=True, default=False)
@click.option("--languages", default=",".join(DEFAULT_LANGUAGES),
              show_default=True, help="configured language set")
def ingest(lang, input_path, store_dir, skip_errors, languages):
    """Ingest a WikiExtractor-style JSON-lines corpus into a store."""
    store = DocumentStore(store_dir, languages=languages.split(","))
    stats = store.ingest(input_path, lang, skip_errors=skip_errors)
    click.echo(_jdump({"lang": stats.lang, "n_docs": stats.n_docs,
                       "n_tokens": stats.n_tokens,
                       "avg_doc_len": stats.avg_doc_len}))


@main.command()
@click.option("--lang", required=True)
@click.option("--store", "store_dir", required=True,
              type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--k1", default=retrieval.DEFAULT_K1, show_default=True)
@click.option("--b", default=retrieval.DEFAULT_B, show_default=True)
@click.option("--languages", default=",".join(DEFAULT_LANGUAGES))
def index(lang, store_dir, out_path, k1, b, languages):
    """Build and persist the BM25 index for one language."""
    store = DocumentStore(store_dir, languages=languages.split(","))
    idx = retrieval.build_index(store, lang,
                                retrieval.Bm25Params(k1=k1, b=b))
    retrieval.save_index(idx, out_path)
    click.echo(_jdump({"lang": lang, "n_docs": idx.n_docs,
                       "n_terms": len(idx.terms), "avgdl": idx.avgdl,
                       "out": str(out_path)}))


@main.command()
@click.option("--index", "index_path", required=True,
              type=click.Path(exists=True))
@click.option("--query", required=True)
@click.option("--n", default=retrieval.DEFAULT_TOP_N, show_default=True)
def search(index_path, query, n):
    """Search an index; emits JSON-lines of scored documents."""
    idx = retrieval.load_index(index_path)
    for hit in retrieval.search(idx, query, n):
        click.echo(_jdump({"doc_id": hit.doc_id, "title": hit.title,
                           "score": hit.score}))


@main.command("eval-retrieval")
@click.option("--index", "index_path", required=True,
              type=click.Path(exists=True))
@click.option("--questions", "questions_path", required=True,
              type=click.Path(exists=True))
@click.option("--n", default=retrieval.DEFAULT_TOP_N, show_default=True)
@click.option("--skip-missing-gold", is_flag=True, default=False)
def eval_retrieval(index_path, questions_path, n, skip_missing_gold):
    """Hit@N of the retriever over a gold-titled question file."""
    idx = retrieval.load_index(index_path)
    questions = load_questions(questions_path)
    results = []
    golds = []
    for q in questions:
        hits = retrieval.search(idx, q.text, n)
        results.append([h.title for h in hits])
        golds.append(q.gold_doc_title)
    value = retrieval.hit_at_n(
        results, golds, n,
        missing_gold="skip" if skip_missing_gold else "error")
    click.echo(_jdump({"n": n, "hit_at_n": value,
                       "n_questions": len(questions)}))


@main.command()
@click.option("--lang", required=True)
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True))
@click.option("--config-dir", default=None, type=click.Path(),
              help="directory with abbrev_<lang>.txt guard lists")
def segment(lang, input_path, config_dir):
    """Split a text file into sentences (debug aid)."""
    text = Path(input_path).read_text(encoding="utf-8")
    for s in split_sentences(text, lang, config_dir=config_dir):
        click.echo(_jdump({"text": s.text, "start": s.start, "end": s.end,
                           "sent_index": s.sent_index}))


@main.command("build-as2")
@click.option("--questions", "questions_path", required=True,
              type=click.Path(exists=True))
@click.option("--store", "store_dir", required=True,
              type=click.Path(exists=True))
@click.option("--out", "out_path", required=True, type=click.Path())
@click.option("--languages", default=",".join(DEFAULT_LANGUAGES))
def build_as2(questions_path, store_dir, out_path, languages):
    """Build a labeled AS2 dataset from span-annotated questions."""
    store = DocumentStore(store_dir, languages=languages.split(","))
    questions = load_questions(questions_path,
                               languages=languages.split(","))
    pairs, report = build_as2_dataset(questions, store)
    write_as2_dataset(pairs, out_path)
    click.echo(_jdump({
        "n_questions": report.n_questions, "n_kept": report.n_kept,
        "n_pairs": report.n_pairs,
        "n_positive_pairs": report.n_positive_pairs,
        "dropped_no_positive": report.dropped_no_positive,
        "dropped_unresolved_doc": report.dropped_unresolved_doc,
    }))


@main.command()
@click.option("--scorer", "scorer_kind",
              type=click.Choice(["lexical", "remote"]), default="lexical")
@click.option("--endpoint", default=None)
@click.option("--question", required=True)
@click.option("--lang", default="en", show_default=True,
              help="question language")
@click.option("--pool", "pool_path", required=True,
              type=click.Path(exists=True),
              help="JSON-lines of candidates {text, lang, doc_id, sent_index}")
def rank(scorer_kind, endpoint, question, lang, pool_path):
    """Rank a candidate pool against a question."""
    pool = []
    for line in Path(pool_path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        pool.append(Candidate(text=obj["text"], lang=obj["lang"],
                              doc_id=int(obj["doc_id"]),
                              sent_index=int(obj["sent_index"])))
    handle = ScorerHandle(
        kind="lexical-baseline" if scorer_kind == "lexical" else "remote",
        endpoint=endpoint)
    ranked = rank_candidates(Question(q_id="cli", text=question, lang=lang),
                             pool, handle)
    for c in ranked:
        click.echo(_jdump({"text": c.text, "lang": c.lang,
                           "doc_id": c.doc_id, "sent_index": c.sent_index,
                           "score": c.score}))


@main.command()
@click.option("--policy", "policy_kind",
              type=click.Choice(["mono", "top-k", "top-per-lang"]),
              required=True)
@click.option("--k", default=None, type=int)
@click.option("--per-lang", default=2, show_default=True)
@click.option("--pools", "pools_dir", required=True,
              type=click.Path(exists=True, file_okay=False),
              help="directory of <lang>.jsonl ranked candidate pools")
@click.option("--question-lang", default="en", show_default=True)
def aggregate(policy_kind, k, per_lang, pools_dir, question_lang):
    """Merge per-language ranked pools into the generator candidate set."""
    policy = agg.AggregationPolicy(kind=_POLICY_ALIASES[policy_kind], k=k,
                                   per_lang=per_lang)
    pools = {}
    for path in sorted(Path(pools_dir).glob("*.jsonl")):
        lang = path.stem
        pool = []
        for line in path.read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            pool.append(Candidate(text=obj["text"], lang=obj["lang"],
                                  doc_id=int(obj["doc_id"]),
                                  sent_index=int(obj["sent_index"]),
                                  score=float(obj["score"])))
        pools[lang] = pool
    m = agg.aggregate(pools, policy, question_lang)
    for c in m.candidates:
        click.echo(_jdump({"text": c.text, "lang": c.lang,
                           "doc_id": c.doc_id, "sent_index": c.sent_index,
                           "score": c.score}))


@main.command()
@click.option("--question", required=True)
@click.option("--lang", required=True)
@click.option("--candidates", "candidates_path", required=True,
              type=click.Path(exists=True),
              help="JSON-lines of scored candidates across languages")
@click.option("--policy", "policy_kind",
              type=click.Choice(["mono", "top-k", "top-per-lang"]),
              default="top-per-lang", show_default=True)
@click.option("--k", default=None, type=int)
@click.option("--per-lang", default=2, show_default=True)
@click.option("--endpoint", default=None,
              help="generate backend URL (or CROSSQA_GENERATE_URL)")
@click.option("--budget", default=None, type=int,
              help="prompt character budget")
def generate(question, lang, candidates_path, policy_kind, k, per_lang,
             endpoint, budget):
    """Aggregate scored candidates and generate an answer."""
    from . import generation
    pools = {}
    for line in Path(candidates_path).read_text(
            encoding="utf-8").splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        c = Candidate(text=obj["text"], lang=obj["lang"],
                      doc_id=int(obj["doc_id"]),
                      sent_index=int(obj["sent_index"]),
                      score=float(obj["score"]))
        pools.setdefault(c.lang, []).append(c)
    for pool in pools.values():
        pool.sort(key=lambda c: (-c.score, c.doc_id, c.sent_index))
    policy = agg.AggregationPolicy(kind=_POLICY_ALIASES[policy_kind], k=k,
                                   per_lang=per_lang)
    m = agg.aggregate(pools, policy, lang)
    prompt = generation.assemble_prompt(
        question, m, budget=budget or generation.DEFAULT_PROMPT_BUDGET)
    cfg = backends.config_from_env("generate", endpoint)
    q = Question(q_id="cli", text=question, lang=lang)
    with backends.Backend(cfg) as backend:
        answer = generation.generate_answer(q, m, backend)
    click.echo(_jdump({"answer": answer.text,
                       "closed_book": answer.closed_book,
                       "prompt": prompt.text,
                       "prompt_truncated": prompt.truncated}))


@main.command()
@click.option("--metric", required=True,
              type=click.Choice(["accuracy", "kappa", "bleu", "rouge",
                                 "spearman"]))
@click.option("--input", "input_path", required=True,
              type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["corpus", "sentence"]),
              default="corpus", show_default=True, help="BLEU mode")
def evaluate(metric, input_path, mode):
    """Compute a metric over a JSON-lines input file.

    accuracy/kappa read {item_id, votes: [0|1]}; bleu/rouge read
    {item_id, hypothesis, reference, lang}; spearman reads {item_id, x, y}.
    """
    rows = []
    for line in Path(input_path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            rows.append(json.loads(line))
    if metric in ("accuracy", "kappa"):
        records = [evaluation.VoteRecord(item_id=str(r["item_id"]),
                                         votes=tuple(r["votes"]))
                   for r in rows]
        if metric == "accuracy":
            click.echo(_jdump({"accuracy": evaluation.vote_accuracy(records)}))
        else:
            click.echo(_jdump({"kappa": evaluation.fleiss_kappa(records)}))
    elif metric == "bleu":
        langs = {r.get("lang", "en") for r in rows}
        if len(langs) != 1:
            raise click.ClickException("bleu needs a single-language file")
        value = evaluation.bleu([r["hypothesis"] for r in rows],
                                [r["reference"] for r in rows],
                                lang=langs.pop(), mode=mode)
        click.echo(_jdump({"bleu": value, "mode": mode}))
    elif metric == "rouge":
        scores = [evaluation.rouge_l(r["hypothesis"], r["reference"],
                                     r.get("lang", "en")) for r in rows]
        mean_f = sum(s.f for s in scores) / len(scores) if scores else 0.0
        click.echo(_jdump({"rouge_l_f": mean_f, "n": len(scores)}))
    else:
        value = evaluation.spearman([float(r["x"]) for r in rows],
                                    [float(r["y"]) for r in rows])
        click.echo(_jdump({"spearman": value}))


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.option("--question", required=True)
@click.option("--lang", required=True)
def answer(config_path, question, lang):
    """Answer one question with the configured pipeline."""
    cfg = pipeline.load_config(config_path)
    q = Question(q_id="cli", text=question, lang=lang)
    with pipeline.QaEngine(cfg) as engine:
        trace = engine.answer_question(q)
    click.echo(_jdump({"answer": trace.answer["text"],
                       "closed_book": trace.answer["closed_book"],
                       "trace_id": trace.trace_id}))


@main.command("run-batch")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.option("--questions", "questions_path", required=True,
              type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
def run_batch(config_path, questions_path, out_dir):
    """Answer a question file; one trace per question plus a summary.

    Exit codes: 0 all answered, 1 per-question failures, 2 fatal.
    """
    try:
        cfg = pipeline.load_config(config_path)
        questions = load_questions(questions_path, languages=cfg.languages)
        with pipeline.QaEngine(cfg) as engine:
            report = engine.run_batch(questions, out_dir)
    except Exception as exc:
        click.echo(f"fatal: {exc}", err=True)
        sys.exit(2)
    click.echo(_jdump({"n_questions": report.n_questions,
                       "n_ok": report.n_ok, "n_failed": report.n_failed,
                       "failures": report.failures,
                       "mean_timings": report.mean_timings}))
    if report.n_failed:
        sys.exit(1)


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True))
@click.option("--bind", default="127.0.0.1:8600", show_default=True)
def serve(config_path, bind):
    """Serve the HTTP answer API."""
    import threading

    import uvicorn

    from .service import create_app

    cfg = pipeline.load_config(config_path)
    app = create_app(engine=None)

    def load():
        app.state.engine = pipeline.QaEngine(cfg)

    threading.Thread(target=load, daemon=True).start()
    host, _, port = bind.partition(":")
    uvicorn.run(app, host=host, port=int(port or 8600), log_level="info")


@main.command("check-backend")
@click.option("--url", required=True, help="backend server base URL")
@click.option("--protocol-only", is_flag=True, default=False,
              help="skip reference-stub semantics checks")
def check_backend(url, protocol_only):
    """Run the wire-protocol conformance kit against a server."""
    report = conformance.run_conformance(url, semantics=not protocol_only)
    for c in report.checks:
        status = "ok" if c.ok else "FAIL"
        click.echo(f"{status:4} {c.name}" + (f"  {c.detail}" if c.detail
                                             else ""))
    if not report.ok:
        sys.exit(1)


if __name__ == "__main__":
    main()
