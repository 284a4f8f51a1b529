import string

from hypothesis import given
from hypothesis import strategies as st

from crossqa.tokenization import tokenize


def test_casefold_and_punctuation_strip():
    assert tokenize("The Cat, sat.", "en") == ["the", "cat", "sat"]


def test_japanese_four_char_bigrams():
    # hand-enumerated bigrams of a 4-char run
    assert tokenize("ねこかわ", "ja") == ["ねこ", "こか", "かわ"]


def test_single_cjk_char_is_unigram():
    assert tokenize("山", "ja") == ["山"]


def test_empty_input():
    assert tokenize("", "ru") == []


def test_whitespace_only():
    assert tokenize("   \n\t ", "en") == []


def test_mixed_script_runs():
    assert tokenize("日本語abc", "ja") == ["日本", "本語", "abc"]


def test_nfkc_normalization_applies():
    assert tokenize("ＢＭ２５", "en") == tokenize("bm25", "en")


def test_combining_marks_stay_inside_tokens():
    # Bengali vowel signs are Mn/Mc; splitting on them would shred words
    assert tokenize("বাংলা ভাষা", "bn") == ["বাংলা", "ভাষা"]


def test_arabic_words():
    assert tokenize("ما هي عاصمة مصر؟", "ar") == ["ما", "هي", "عاصمة", "مصر"]


_SPACE_DELIMITED = st.text(
    alphabet=string.ascii_letters + string.digits + " .,!?;:-'\"()"
    + "абвгдежзиклмнопрстуфхцчшщэюяАБВГДЕЖЗИК",
    max_size=80)


@given(_SPACE_DELIMITED)
def test_idempotence_for_space_delimited(text):
    tokens = tokenize(text, "en")
    assert tokenize(" ".join(tokens), "en") == tokens


@given(_SPACE_DELIMITED)
def test_tokens_never_empty(text):
    assert all(t for t in tokenize(text, "en"))
