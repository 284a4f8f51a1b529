import json
from pathlib import Path

import pytest

from crossqa.corpus import DocumentStore, load_questions
from crossqa.retrieval import build_index, save_index

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "data"
MINICORPUS = DATA / "minicorpus"
LANGS = ("ar", "bn", "en", "ja", "ru")


@pytest.fixture(scope="session")
def mini_store(tmp_path_factory):
    root = tmp_path_factory.mktemp("store")
    store = DocumentStore(root, languages=LANGS)
    for lang in LANGS:
        store.ingest(MINICORPUS / f"{lang}.jsonl", lang)
    return store


@pytest.fixture(scope="session")
def mini_indices(mini_store):
    return {lang: build_index(mini_store, lang) for lang in LANGS}


@pytest.fixture(scope="session")
def mini_index_dir(mini_indices, tmp_path_factory):
    root = tmp_path_factory.mktemp("indices")
    for lang, idx in mini_indices.items():
        save_index(idx, root / f"{lang}.idx")
    return root


@pytest.fixture(scope="session")
def mini_questions():
    return load_questions(MINICORPUS / "questions.jsonl")


@pytest.fixture(scope="session")
def expected_answers():
    return json.loads(
        (MINICORPUS / "expected_answers.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def parity_pairs():
    rows = []
    for line in (DATA / "parity_pairs.jsonl").read_text(
            encoding="utf-8").splitlines():
        if line.strip():
            rows.append(json.loads(line))
    return rows
