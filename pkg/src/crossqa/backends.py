"""Wire-protocol clients for the three remote model roles.

Every backend speaks the same protocol: HTTP POST with UTF-8 JSON bodies.

    /translate  {text, source_lang, target_lang}            -> {translation}
    /score      {question, candidates: [text]}              -> {scores: [number]}
    /generate   {question, candidates: [{text, lang}],
                 target_lang, max_new_chars}                -> {answer}

Status 200 is success.  4xx is a protocol error and is never retried; 5xx,
timeouts and transport failures are retried with exponential backoff
(base 250 ms, factor 2, seeded jitter <= 20%) up to max_retries extra
attempts.  Clients are shareable across threads and bound concurrent calls
with a permit semaphore.
"""

import math
import os
import random
import threading
import time
from dataclasses import dataclass

import httpx

ROLES = ("translate", "score", "generate")
ENV_URLS = {
    "translate": "CROSSQA_TRANSLATE_URL",
    "score": "CROSSQA_SCORE_URL",
    "generate": "CROSSQA_GENERATE_URL",
}

BACKOFF_BASE = 0.25
BACKOFF_FACTOR = 2.0
BACKOFF_JITTER = 0.2
DEFAULT_MAX_NEW_CHARS = 100


class WireError(Exception):
    """A failed backend call: kind is one of timeout, transport, protocol,
    remote-failure."""

    def __init__(self, kind, detail):
        super().__init__(f"{kind}: {detail}")
        self.kind = kind
        self.detail = detail

    @property
    def retryable(self):
        return self.kind in ("timeout", "transport", "remote-failure")


@dataclass(frozen=True)
class BackendConfig:
    role: str
    endpoint: str
    timeout: float = 30.0
    max_retries: int = 2
    max_in_flight: int = 8

    def __post_init__(self):
        if self.role not in ROLES:
            raise ValueError(f"unknown backend role {self.role!r}")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")


def config_from_env(role, endpoint=None, **kwargs):
    """BackendConfig with the endpoint overridable via CROSSQA_*_URL."""
    resolved = os.environ.get(ENV_URLS[role], endpoint)
    if not resolved:
        raise ValueError(f"no endpoint configured for role {role!r}")
    return BackendConfig(role=role, endpoint=resolved, **kwargs)


class Backend:
    """One remote model endpoint with retries and bounded concurrency."""

    def __init__(self, cfg, *, transport=None, sleep=time.sleep,
                 jitter_seed=0):
        self.cfg = cfg
        self._client = httpx.Client(transport=transport,
                                    timeout=cfg.timeout)
        self._permits = threading.BoundedSemaphore(cfg.max_in_flight)
        self._sleep = sleep
        self._rng = random.Random(jitter_seed)
        self._rng_lock = threading.Lock()

    def close(self):
        self._client.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()

    def _backoff(self, attempt):
        with self._rng_lock:
            jitter = self._rng.uniform(0.0, BACKOFF_JITTER)
        return BACKOFF_BASE * (BACKOFF_FACTOR ** (attempt - 1)) * (1 + jitter)

    def _post(self, path, payload):
        url = self.cfg.endpoint.rstrip("/") + path
        last_error = None
        for attempt in range(self.cfg.max_retries + 1):
            if attempt:
                self._sleep(self._backoff(attempt))
            with self._permits:
                try:
                    resp = self._client.post(url, json=payload)
                except httpx.TimeoutException as exc:
                    last_error = WireError("timeout", str(exc))
                    continue
                except httpx.HTTPError as exc:
                    last_error = WireError("transport", str(exc))
                    continue
            if resp.status_code == 200:
                try:
                    body = resp.json()
                except ValueError:
                    raise WireError("protocol",
                                    f"{path}: response is not JSON") from None
                if not isinstance(body, dict):
                    raise WireError("protocol",
                                    f"{path}: response is not an object")
                return body
            if 400 <= resp.status_code < 500:
                raise WireError("protocol",
                                f"{path}: status {resp.status_code}")
            if resp.status_code >= 500:
                last_error = WireError("remote-failure",
                                       f"{path}: status {resp.status_code}")
                continue
            raise WireError("protocol",
                            f"{path}: unexpected status {resp.status_code}")
        raise last_error

    # -- role calls --------------------------------------------------------

    def translate(self, text, src, tgt):
        """Translate text; identity translation short-circuits locally."""
        if src == tgt:
            return text
        body = self._post("/translate", {"text": text, "source_lang": src,
                                         "target_lang": tgt})
        translation = body.get("translation")
        if not isinstance(translation, str) or not translation:
            raise WireError("protocol", "/translate: empty translation")
        return translation

    def score(self, question, candidates):
        """Score candidates against a question; order-aligned."""
        if not candidates:
            raise ValueError("score requires at least one candidate")
        body = self._post("/score", {"question": question,
                                     "candidates": list(candidates)})
        scores = body.get("scores")
        if not isinstance(scores, list) or len(scores) != len(candidates):
            got = len(scores) if isinstance(scores, list) else "none"
            raise WireError("protocol",
                            f"/score: expected {len(candidates)} scores, "
                            f"got {got}")
        out = []
        for s in scores:
            if not isinstance(s, (int, float)) or isinstance(s, bool) \
                    or not math.isfinite(s):
                raise WireError("protocol", f"/score: bad score {s!r}")
            out.append(float(s))
        return out

    def generate(self, question, candidates, target_lang,
                 max_new_chars=DEFAULT_MAX_NEW_CHARS):
        """Generate an answer; empty candidates means closed-book mode."""
        body = self._post("/generate", {
            "question": question,
            "candidates": [{"text": c["text"], "lang": c["lang"]}
                           for c in candidates],
            "target_lang": target_lang,
            "max_new_chars": max_new_chars,
        })
        answer = body.get("answer")
        if not isinstance(answer, str) or not answer:
            raise WireError("protocol", "/generate: empty answer")
        return answer


# -- one-shot convenience wrappers ------------------------------------------

def translate(text, src, tgt, cfg, **kwargs):
    if src == tgt:
        return text
    with Backend(cfg, **kwargs) as b:
        return b.translate(text, src, tgt)


def score_remote(question, candidates, cfg, **kwargs):
    with Backend(cfg, **kwargs) as b:
        return b.score(question, candidates)


def generate_remote(question, candidates, target_lang, cfg,
                    max_new_chars=DEFAULT_MAX_NEW_CHARS, **kwargs):
    with Backend(cfg, **kwargs) as b:
        return b.generate(question, candidates, target_lang, max_new_chars)
