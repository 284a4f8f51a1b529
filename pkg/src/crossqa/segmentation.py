"""Language-aware rule-based sentence splitting with character offsets.

Splits on terminal punctuation per script: Latin/Cyrillic use ``. ! ?`` with
an abbreviation guard, Arabic adds ``؟`` and ``۔``, Bengali adds the danda
``।``, Japanese splits on ``。？！``.  A blank line always splits.  ASCII
terminals only split before whitespace (protects decimals and URLs);
non-ASCII terminals split unconditionally.  Offsets index into the original,
unnormalized source so spans stay anchored.
"""

import unicodedata
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

MAX_SENTENCE_CHARS = 2000

_ASCII_TERMINALS = ".!?"
_EXTRA_TERMINALS = {
    "ar": "؟۔",   # ؟ ۔
    "bn": "।",         # ।
}
_JA_TERMINALS = "。？！"  # 。？！

# built-in guard lists; extensible via plain-text config files
_BUILTIN_ABBREVIATIONS = {
    "en": frozenset({"mr", "mrs", "dr", "prof", "etc", "e.g", "i.e"}),
    "ru": frozenset({"г", "ул", "им"}),
}


@dataclass(frozen=True)
class Sentence:
    text: str
    start: int
    end: int
    sent_index: int


@dataclass(frozen=True)
class Candidate:
    """One answer-candidate sentence with its provenance."""

    text: str
    lang: str
    doc_id: int
    sent_index: int
    score: float | None = None

    def identity(self):
        return (self.lang, self.doc_id, self.sent_index)


def load_abbreviations(lang, config_dir=None):
    """Abbreviation guard list for a language.

    Built-in defaults are merged with an optional ``abbrev_<lang>.txt``
    (one entry per line, '#' comments) from config_dir.
    """
    entries = set(_BUILTIN_ABBREVIATIONS.get(lang, ()))
    candidates = []
    pkg_config = resources.files("crossqa").joinpath("config")
    candidates.append(pkg_config.joinpath(f"abbrev_{lang}.txt"))
    if config_dir is not None:
        candidates.append(Path(config_dir) / f"abbrev_{lang}.txt")
    for path in candidates:
        try:
            text = path.read_text(encoding="utf-8")
        except (FileNotFoundError, OSError):
            continue
        for line in text.splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                entries.add(line.casefold().rstrip("."))
    return frozenset(entries)


def _terminals(lang):
    if lang == "ja":
        return _JA_TERMINALS
    return _ASCII_TERMINALS + _EXTRA_TERMINALS.get(lang, "")


def _is_word_char(ch):
    return unicodedata.category(ch)[0] in ("L", "M", "N")


def _abbrev_before(text, dot_pos):
    """Token (letters/digits/dots) immediately before a period, casefolded."""
    k = dot_pos
    while k > 0 and (_is_word_char(text[k - 1]) or text[k - 1] == "."):
        k -= 1
    return text[k:dot_pos].casefold()


def split_sentences(text, lang, abbreviations=None, config_dir=None,
                    max_len=MAX_SENTENCE_CHARS):
    """Split text into Sentences; deterministic, empty input gives []."""
    if abbreviations is None:
        abbreviations = load_abbreviations(lang, config_dir)
    terminals = _terminals(lang)
    sentences = []
    spans = []

    def emit(s, e):
        # tighten to non-whitespace bounds; drop empty segments
        while s < e and text[s].isspace():
            s += 1
        while e > s and text[e - 1].isspace():
            e -= 1
        if s < e:
            spans.append((s, e))

    n = len(text)
    i = 0
    start = None
    while i < n:
        ch = text[i]
        if start is None:
            if ch.isspace():
                i += 1
                continue
            start = i
            continue

        if ch == "\n":
            # paragraph break: newline, optional intra-line space, newline
            k = i + 1
            while k < n and text[k].isspace() and text[k] != "\n":
                k += 1
            if k < n and text[k] == "\n":
                emit(start, i)
                start = None
                i = k + 1
                continue

        if ch in terminals:
            j = i
            non_ascii = False
            while j < n and text[j] in terminals:
                non_ascii = non_ascii or text[j] not in _ASCII_TERMINALS
                j += 1
            splits = True
            if not non_ascii:
                if j < n and not text[j].isspace():
                    splits = False  # mid-token period (3.14, URLs)
                elif j - i == 1 and ch == ".":
                    if _abbrev_before(text, i) in abbreviations:
                        splits = False
            if splits:
                emit(start, j)
                start = None
            i = j
            continue

        if i - start >= max_len:
            # malformed run with no terminal: hard-split at last whitespace
            w = i
            while w > start and not text[w - 1].isspace():
                w -= 1
            cut = w if w > start else i
            emit(start, cut)
            start = None
            i = cut
            continue

        i += 1

    if start is not None:
        emit(start, n)

    for idx, (s, e) in enumerate(spans):
        sentences.append(Sentence(text=text[s:e], start=s, end=e,
                                  sent_index=idx))
    return sentences


def extract_candidates(docs, lang, **split_kwargs):
    """All sentences of documents given in retrieval-rank order.

    Output is ordered by (retrieval rank, sent_index); scores are unset.
    """
    pool = []
    for doc in docs:
        for sent in split_sentences(doc.body, lang, **split_kwargs):
            pool.append(Candidate(text=sent.text, lang=lang,
                                  doc_id=doc.doc_id,
                                  sent_index=sent.sent_index))
    return pool
