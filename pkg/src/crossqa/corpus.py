"""On-disk document store and question loading.

Corpora arrive as WikiExtractor-style JSON-lines ({"title", "text"}, one
object per line).  Each language is persisted as an append-only record file
with a version header plus a binary offset index, so ingest is reproducible
byte-for-byte and reads can seek straight to a document.
"""

import json
import logging
import struct
from dataclasses import dataclass
from pathlib import Path

from .tokenization import DEFAULT_LANGUAGES, tokenize

logger = logging.getLogger(__name__)

STORE_FORMAT = "crossqa-store"
STORE_VERSION = 1
_OFFSETS_MAGIC = b"CQOF"


class CorpusError(Exception):
    """Base error for corpus ingest and access."""


class MalformedRecordError(CorpusError):
    pass


class UnknownLanguageError(CorpusError):
    pass


class UnknownDocumentError(CorpusError):
    pass


class QuestionFormatError(CorpusError):
    pass


@dataclass(frozen=True)
class Document:
    doc_id: int
    title: str
    body: str
    lang: str


@dataclass(frozen=True)
class CorpusStats:
    lang: str
    n_docs: int
    n_tokens: int
    avg_doc_len: float


@dataclass(frozen=True)
class Question:
    """One query, optionally carrying gold annotations and a reference answer.

    ``gold_span_start``/``gold_span_end`` are character offsets into
    ``gold_passage``.  A span given as raw text is resolved to offsets by
    first exact match at load time; when unresolvable the raw text is kept
    and ``gold_span_resolved`` stays False.
    """

    q_id: str
    text: str
    lang: str
    gold_doc_title: str | None = None
    gold_passage: str | None = None
    gold_span_start: int | None = None
    gold_span_end: int | None = None
    gold_span_text: str | None = None
    gold_span_resolved: bool = False
    reference_answer: str | None = None

    def has_span(self):
        return self.gold_span_resolved or self.gold_span_text is not None


def doc_token_count(title, body):
    """Token count of the scoring field (title + body, title counted once)."""
    return len(tokenize(title)) + len(tokenize(body))


def _dump_record(obj):
    return json.dumps(obj, ensure_ascii=False, sort_keys=True,
                      separators=(",", ":"))


class DocumentStore:
    """Per-language document stores under one root directory.

    Ingest is single-writer per language; after ingest the files are
    immutable and safe for concurrent readers.
    """

    def __init__(self, root, languages=DEFAULT_LANGUAGES):
        self.root = Path(root)
        self.languages = tuple(languages)
        self._offsets = {}
        self._title_maps = {}

    # -- paths ------------------------------------------------------------

    def _records_path(self, lang):
        return self.root / f"{lang}.records"

    def _offsets_path(self, lang):
        return self.root / f"{lang}.offsets"

    def _stats_path(self, lang):
        return self.root / f"{lang}.stats.json"

    def has_language(self, lang):
        return self._records_path(lang).exists()

    def _check_lang(self, lang):
        if lang not in self.languages:
            raise UnknownLanguageError(
                f"language {lang!r} not in configured set {self.languages}")

    # -- ingest -----------------------------------------------------------

    def ingest(self, path, lang, skip_errors=False):
        """Ingest one corpus file (or a directory of them) for a language.

        Replaces any existing store for that language.  Returns CorpusStats.
        Malformed records are fatal unless skip_errors is set; records with
        an empty title are always skipped and counted.
        """
        self._check_lang(lang)
        path = Path(path)
        if path.is_dir():
            inputs = sorted(p for p in path.iterdir() if p.is_file())
        elif path.is_file():
            inputs = [path]
        else:
            raise CorpusError(f"unreadable corpus path: {path}")
        if not inputs:
            raise CorpusError(f"no corpus files under {path}")

        self.root.mkdir(parents=True, exist_ok=True)
        self._offsets.pop(lang, None)
        self._title_maps.pop(lang, None)

        n_docs = 0
        n_tokens = 0
        skipped_empty_title = 0
        skipped_malformed = 0
        offsets = []

        with open(self._records_path(lang), "w", encoding="utf-8",
                  newline="\n") as out:
            header = _dump_record({"format": STORE_FORMAT,
                                   "version": STORE_VERSION, "lang": lang})
            out.write(header + "\n")
            pos = len((header + "\n").encode("utf-8"))
            for src in inputs:
                for line_no, raw in enumerate(
                        src.open("r", encoding="utf-8"), start=1):
                    if not raw.strip():
                        continue
                    try:
                        title, body = self._parse_record(raw)
                    except MalformedRecordError as exc:
                        msg = f"{src}:{line_no}: {exc}"
                        if skip_errors:
                            skipped_malformed += 1
                            logger.warning("skipping malformed record %s", msg)
                            continue
                        raise MalformedRecordError(msg) from None
                    if not title.strip():
                        skipped_empty_title += 1
                        logger.warning("skipping record with empty title %s:%d",
                                       src, line_no)
                        continue
                    record = _dump_record({"doc_id": n_docs, "title": title,
                                           "body": body})
                    offsets.append(pos)
                    out.write(record + "\n")
                    pos += len((record + "\n").encode("utf-8"))
                    n_tokens += doc_token_count(title, body)
                    n_docs += 1

        self._write_offsets(lang, offsets)
        stats = CorpusStats(lang=lang, n_docs=n_docs, n_tokens=n_tokens,
                            avg_doc_len=n_tokens / n_docs if n_docs else 0.0)
        self._stats_path(lang).write_text(json.dumps({
            "lang": lang,
            "n_docs": stats.n_docs,
            "n_tokens": stats.n_tokens,
            "avg_doc_len": stats.avg_doc_len,
            "skipped_empty_title": skipped_empty_title,
            "skipped_malformed": skipped_malformed,
        }, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return stats

    @staticmethod
    def _parse_record(raw):
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise MalformedRecordError(f"invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise MalformedRecordError("record is not an object")
        title = obj.get("title")
        body = obj.get("text")
        if not isinstance(title, str) or not isinstance(body, str):
            raise MalformedRecordError('missing "title" or "text" field')
        return title, body

    def _write_offsets(self, lang, offsets):
        with open(self._offsets_path(lang), "wb") as f:
            f.write(_OFFSETS_MAGIC)
            f.write(struct.pack("<II", STORE_VERSION, len(offsets)))
            f.write(struct.pack(f"<{len(offsets)}Q", *offsets))

    def _load_offsets(self, lang):
        if lang in self._offsets:
            return self._offsets[lang]
        self._check_lang(lang)
        path = self._offsets_path(lang)
        if not path.exists():
            raise UnknownLanguageError(f"no store for language {lang!r} "
                                       f"under {self.root}")
        data = path.read_bytes()
        if data[:4] != _OFFSETS_MAGIC:
            raise CorpusError(f"bad offsets file {path}")
        version, n = struct.unpack_from("<II", data, 4)
        if version != STORE_VERSION:
            raise CorpusError(f"unsupported store version {version}")
        offsets = struct.unpack_from(f"<{n}Q", data, 12)
        self._offsets[lang] = offsets
        return offsets

    # -- reads ------------------------------------------------------------

    def n_docs(self, lang):
        return len(self._load_offsets(lang))

    def get(self, lang, doc_id):
        offsets = self._load_offsets(lang)
        if not 0 <= doc_id < len(offsets):
            raise UnknownDocumentError(
                f"doc_id {doc_id} not in store {lang!r} "
                f"(0..{len(offsets) - 1})")
        with open(self._records_path(lang), "rb") as f:
            f.seek(offsets[doc_id])
            raw = f.readline().decode("utf-8")
        obj = json.loads(raw)
        return Document(doc_id=obj["doc_id"], title=obj["title"],
                        body=obj["body"], lang=lang)

    def iter_documents(self, lang):
        n = self.n_docs(lang)
        with open(self._records_path(lang), "r", encoding="utf-8") as f:
            f.readline()  # header
            for _ in range(n):
                obj = json.loads(f.readline())
                yield Document(doc_id=obj["doc_id"], title=obj["title"],
                               body=obj["body"], lang=lang)

    def stats(self, lang):
        self._check_lang(lang)
        path = self._stats_path(lang)
        if not path.exists():
            raise UnknownLanguageError(f"no stats for language {lang!r}")
        obj = json.loads(path.read_text(encoding="utf-8"))
        return CorpusStats(lang=obj["lang"], n_docs=obj["n_docs"],
                           n_tokens=obj["n_tokens"],
                           avg_doc_len=obj["avg_doc_len"])

    def doc_id_by_title(self, lang, title):
        """Exact title lookup (whitespace-trimmed); None when absent."""
        if lang not in self._title_maps:
            table = {}
            for doc in self.iter_documents(lang):
                table.setdefault(doc.title.strip(), doc.doc_id)
            self._title_maps[lang] = table
        return self._title_maps[lang].get(title.strip())


def load_questions(path, languages=DEFAULT_LANGUAGES):
    """Load a JSON-lines question file, in file order."""
    path = Path(path)
    if not path.is_file():
        raise CorpusError(f"unreadable question file: {path}")
    questions = []
    with path.open("r", encoding="utf-8") as f:
        for line_no, raw in enumerate(f, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise QuestionFormatError(
                    f"{path}:{line_no}: invalid JSON ({exc.msg})") from None
            questions.append(_parse_question(obj, line_no, path, languages))
    return questions


def _parse_question(obj, line_no, path, languages):
    if not isinstance(obj, dict):
        raise QuestionFormatError(f"{path}:{line_no}: record is not an object")
    try:
        q_id, text, lang = str(obj["q_id"]), obj["text"], obj["lang"]
    except KeyError as exc:
        raise QuestionFormatError(
            f"{path}:{line_no}: missing field {exc}") from None
    if not isinstance(text, str) or not text.strip():
        raise QuestionFormatError(f"question {q_id!r}: empty text")
    if lang not in languages:
        raise QuestionFormatError(
            f"question {q_id!r}: language {lang!r} not in {tuple(languages)}")

    passage = obj.get("gold_passage")
    span = obj.get("gold_span")
    start = end = span_text = None
    resolved = False
    if isinstance(span, dict):
        try:
            start, end = int(span["start"]), int(span["end"])
        except (KeyError, TypeError, ValueError):
            raise QuestionFormatError(
                f"question {q_id!r}: gold_span object needs integer "
                "start/end") from None
        if passage is None:
            raise QuestionFormatError(
                f"question {q_id!r}: span offsets without gold_passage")
        if not 0 <= start < end <= len(passage):
            raise QuestionFormatError(
                f"question {q_id!r}: span offsets [{start},{end}) out of "
                f"range for passage of length {len(passage)}")
        span_text = passage[start:end]
        resolved = True
    elif isinstance(span, str):
        span_text = span
        if passage is not None:
            pos = passage.find(span)
            if pos >= 0:
                start, end = pos, pos + len(span)
                resolved = True
        if not resolved:
            logger.warning("question %s: gold span text not found in passage; "
                           "kept unresolved", q_id)
    elif span is not None:
        raise QuestionFormatError(
            f"question {q_id!r}: gold_span must be an object or a string")

    return Question(
        q_id=q_id, text=text, lang=lang,
        gold_doc_title=obj.get("gold_doc_title"),
        gold_passage=passage,
        gold_span_start=start, gold_span_end=end,
        gold_span_text=span_text, gold_span_resolved=resolved,
        reference_answer=obj.get("reference_answer"),
    )
