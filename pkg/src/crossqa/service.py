"""HTTP answer service wrapping a QaEngine.

POST /answer {question, lang, setting?, policy?} answers one question and
returns the candidate provenance plus the persisted trace id.  Returns 400
on malformed bodies or unknown languages, 502 when a backend fails, and 503
while the engine is still loading.
"""

import hashlib
import json
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import aggregation, backends
from .corpus import Question
from .pipeline import GenerationFailed, PipelineError


class PolicyBody(BaseModel):
    kind: str
    k: int | None = None
    per_lang: int = 2


class AnswerBody(BaseModel):
    question: str
    lang: str
    setting: str | None = None
    policy: PolicyBody | None = None


_KIND_ALIASES = {"mono": aggregation.MONO_TOP_K,
                 "top-k": aggregation.CROSS_TOP_K,
                 "top-per-lang": aggregation.CROSS_TOP_PER_LANG}


def create_app(engine=None):
    """Build the service; pass engine=None to model the loading state."""
    app = FastAPI(title="crossqa answer service")
    app.state.engine = engine

    @app.exception_handler(RequestValidationError)
    async def _bad_body(request: Request, exc):
        return JSONResponse(status_code=400,
                            content={"detail": str(exc.errors())})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/answer")
    def answer(body: AnswerBody):
        engine = app.state.engine
        if engine is None:
            return JSONResponse(status_code=503,
                                content={"detail": "indices loading"})
        if body.lang not in engine.cfg.languages:
            return JSONResponse(
                status_code=400,
                content={"detail": f"unknown language {body.lang!r}; "
                         f"supported: {list(engine.cfg.languages)}"})
        if body.setting is not None and body.setting not in ("mono", "cross"):
            return JSONResponse(
                status_code=400,
                content={"detail": f"unknown setting {body.setting!r}"})
        policy = None
        if body.policy is not None:
            kind = _KIND_ALIASES.get(body.policy.kind, body.policy.kind)
            try:
                policy = aggregation.AggregationPolicy(
                    kind=kind, k=body.policy.k, per_lang=body.policy.per_lang)
            except ValueError as exc:
                return JSONResponse(status_code=400,
                                    content={"detail": str(exc)})
        digest = hashlib.sha256(
            f"{body.lang}|{body.question}".encode("utf-8")).hexdigest()[:12]
        question = Question(q_id=f"svc-{digest}", text=body.question,
                            lang=body.lang)
        try:
            trace = engine.answer_question(question, setting=body.setting,
                                           policy=policy)
        except GenerationFailed as exc:
            return JSONResponse(status_code=502,
                                content={"detail": str(exc),
                                         "trace_id": exc.trace_id})
        except backends.WireError as exc:
            return JSONResponse(status_code=502,
                                content={"detail": str(exc)})
        except PipelineError as exc:
            return JSONResponse(status_code=502,
                                content={"detail": str(exc)})
        return {
            "answer": trace.answer["text"],
            "closed_book": trace.answer["closed_book"],
            "candidates": [{"text": c["text"], "lang": c["lang"],
                            "score": c["score"]} for c in trace.m],
            "trace_id": trace.trace_id,
        }

    @app.get("/trace/{trace_id}")
    def get_trace(trace_id: str):
        engine = app.state.engine
        if engine is None:
            return JSONResponse(status_code=503,
                                content={"detail": "indices loading"})
        path = Path(engine.cfg.trace_dir) / f"{trace_id}.json"
        if not path.is_file():
            return JSONResponse(status_code=404,
                                content={"detail": "unknown trace"})
        return json.loads(path.read_text(encoding="utf-8"))

    return app
