"""Deterministic multilingual tokenizer used by indexing, search and the
lexical candidate scorer.

Normalization is NFKC + casefold.  Runs of word characters (Unicode letters,
marks and digits; marks matter for Arabic and Bengali) become tokens; runs of
CJK characters (Han, Hiragana, Katakana) are instead expanded into character
bigrams, with a lone character kept as a unigram.  Segmentation into runs is
script-driven, so mixed-script text tokenizes the same way regardless of the
language tag; the ``lang`` argument is kept for per-language extensions.
"""

import unicodedata

DEFAULT_LANGUAGES = ("ar", "bn", "en", "ja", "ru")

# Scripts tokenized as character bigrams. Ranges, not properties, so the
# reference-server implementation can mirror them exactly.
_CJK_RANGES = (
    (0x3040, 0x309F),    # hiragana
    (0x30A0, 0x30FF),    # katakana
    (0x3400, 0x4DBF),    # han extension A
    (0x4E00, 0x9FFF),    # han
    (0xF900, 0xFAFF),    # han compatibility
    (0x20000, 0x2A6DF),  # han extension B
)


def _is_cjk(ch):
    cp = ord(ch)
    for lo, hi in _CJK_RANGES:
        if lo <= cp <= hi:
            return True
    return False


def _is_word(ch):
    return unicodedata.category(ch)[0] in ("L", "M", "N")


def tokenize(text, lang="en"):
    """Split text into normalized tokens.

    Deterministic and pure; empty input yields an empty list.
    """
    del lang  # script-driven; reserved for per-language rules
    normalized = unicodedata.normalize("NFKC", text).casefold()
    tokens = []
    word_start = None
    cjk_run = []

    def flush_word(end):
        nonlocal word_start
        if word_start is not None:
            tokens.append(normalized[word_start:end])
            word_start = None

    def flush_cjk():
        if not cjk_run:
            return
        if len(cjk_run) == 1:
            tokens.append(cjk_run[0])
        else:
            for i in range(len(cjk_run) - 1):
                tokens.append(cjk_run[i] + cjk_run[i + 1])
        cjk_run.clear()

    for i, ch in enumerate(normalized):
        if _is_cjk(ch):
            flush_word(i)
            cjk_run.append(ch)
        elif _is_word(ch):
            flush_cjk()
            if word_start is None:
                word_start = i
        else:
            flush_word(i)
            flush_cjk()
    flush_word(len(normalized))
    flush_cjk()
    return tokens
