"""Wire-protocol conformance kit for backend servers.

Drives the three routes of a live server and checks, at the byte level of
the JSON protocol, that field names, types, alignment and error statuses
match the contract.  The reference-semantics checks additionally pin the
deterministic stub behaviors (echo translation, lexical scoring, extractive
generation), which is what makes Unicode round-trips observable.
"""

from dataclasses import dataclass

import httpx

from .as2 import lexical_score

ECHO_PREFIX_OPEN = "⟪"   # ⟪
ECHO_PREFIX_CLOSE = "⟫"  # ⟫

UNICODE_FIXTURES = [
    {"text": "ما هي عاصمة مصر؟", "lang": "ar"},
    {"text": "বাংলা ভাষার প্রথম ব্যাকরণ কে রচনা করেন?", "lang": "bn"},
    {"text": "ストーンズリバーの戦いによる戦死者は何人", "lang": "ja"},
    {"text": "Когда закончилась Английская революция?", "lang": "ru"},
    {"text": "What do pallid sturgeons eat?", "lang": "en"},
]


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ""


@dataclass
class ConformanceReport:
    checks: list

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.ok]


class _Checker:
    def __init__(self, base_url, timeout=10.0):
        self.base = base_url.rstrip("/")
        self.client = httpx.Client(timeout=timeout)
        self.results = []

    def close(self):
        self.client.close()

    def check(self, name, ok, detail=""):
        self.results.append(CheckResult(name=name, ok=bool(ok),
                                        detail="" if ok else detail))

    def post(self, path, payload):
        return self.client.post(self.base + path, json=payload)


def run_conformance(base_url, semantics=True, timeout=10.0):
    """Run all checks against a server; returns a ConformanceReport."""
    c = _Checker(base_url, timeout=timeout)
    try:
        _check_translate(c, semantics)
        _check_score(c, semantics)
        _check_generate(c, semantics)
        _check_errors(c)
    finally:
        c.close()
    return ConformanceReport(checks=c.results)


def _check_translate(c, semantics):
    for fx in UNICODE_FIXTURES:
        tgt = "en" if fx["lang"] != "en" else "ja"
        resp = c.post("/translate", {"text": fx["text"],
                                     "source_lang": fx["lang"],
                                     "target_lang": tgt})
        name = f"translate/{fx['lang']}"
        if resp.status_code != 200:
            c.check(name, False, f"status {resp.status_code}")
            continue
        body = resp.json()
        translation = body.get("translation")
        if not isinstance(translation, str) or not translation:
            c.check(name, False, f"bad translation field: {body!r}")
            continue
        if semantics:
            # unmapped echo must round-trip the input bytes verbatim
            want = f"{ECHO_PREFIX_OPEN}{tgt}{ECHO_PREFIX_CLOSE} {fx['text']}"
            c.check(name, translation == want,
                    f"expected {want!r}, got {translation!r}")
        else:
            c.check(name, True)


def _check_score(c, semantics):
    for fx in UNICODE_FIXTURES:
        cands = [fx["text"], fx["text"] + " extra", "zzz unrelated zzz"]
        resp = c.post("/score", {"question": fx["text"],
                                 "candidates": cands})
        name = f"score/{fx['lang']}"
        if resp.status_code != 200:
            c.check(name, False, f"status {resp.status_code}")
            continue
        scores = resp.json().get("scores")
        if (not isinstance(scores, list) or len(scores) != len(cands)
                or not all(isinstance(s, (int, float))
                           and not isinstance(s, bool) for s in scores)):
            c.check(name, False, f"bad scores field: {scores!r}")
            continue
        if semantics:
            want = [lexical_score(fx["text"], t, fx["lang"], fx["lang"])
                    for t in cands]
            close = all(abs(a - b) <= 1e-9 for a, b in zip(scores, want))
            c.check(name, close, f"expected {want}, got {scores}")
        else:
            c.check(name, True)


def _check_generate(c, semantics):
    fx = UNICODE_FIXTURES[0]
    cands = [{"text": f["text"], "lang": f["lang"]}
             for f in UNICODE_FIXTURES]
    resp = c.post("/generate", {"question": fx["text"], "candidates": cands,
                                "target_lang": fx["lang"],
                                "max_new_chars": 100})
    if resp.status_code != 200:
        c.check("generate/candidates", False, f"status {resp.status_code}")
    else:
        answer = resp.json().get("answer")
        if not isinstance(answer, str) or not answer:
            c.check("generate/candidates", False, f"bad answer: {answer!r}")
        elif semantics:
            c.check("generate/candidates", answer == cands[0]["text"],
                    f"extractive stub must return first candidate, "
                    f"got {answer!r}")
        else:
            c.check("generate/candidates", True)

    resp = c.post("/generate", {"question": fx["text"], "candidates": [],
                                "target_lang": fx["lang"],
                                "max_new_chars": 100})
    if resp.status_code != 200:
        c.check("generate/closed-book", False, f"status {resp.status_code}")
    else:
        answer = resp.json().get("answer")
        if semantics:
            c.check("generate/closed-book", answer == "NO-CONTEXT",
                    f"expected NO-CONTEXT fallback, got {answer!r}")
        else:
            c.check("generate/closed-book",
                    isinstance(answer, str) and bool(answer),
                    f"bad answer: {answer!r}")


def _check_errors(c):
    # malformed bodies must yield 4xx protocol errors, never 5xx or 200
    bad = [
        ("/translate", {"text": "x"}),
        ("/score", {"question": "x"}),
        ("/score", {"question": "x", "candidates": "not-a-list"}),
        ("/generate", {"candidates": []}),
    ]
    for path, payload in bad:
        resp = c.post(path, payload)
        c.check(f"error{path}", 400 <= resp.status_code < 500,
                f"expected 4xx for malformed body, got {resp.status_code}")
