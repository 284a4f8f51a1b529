"""In-process HTTP mock implementing the backend wire protocol with the
deterministic reference behaviors (echo translation, lexical scoring,
extractive generation), plus scriptable failures for error-path tests."""

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from crossqa.as2 import lexical_score

ECHO_OPEN = "⟪"
ECHO_CLOSE = "⟫"


def reference_translate(text, target_lang, mapping=None):
    if mapping and text in mapping:
        return mapping[text]
    return f"{ECHO_OPEN}{target_lang}{ECHO_CLOSE} {text}"


def reference_score(question, candidates):
    return [lexical_score(question, c) for c in candidates]


def reference_generate(candidates):
    if not candidates:
        return "NO-CONTEXT"
    return candidates[0]["text"]


class MockBackendServer:
    """Threaded HTTP server with reference behaviors and failure scripting."""

    def __init__(self, translate_map=None):
        self.translate_map = translate_map or {}
        self.requests = []
        self._fail_scripts = {}
        self._lock = threading.Lock()
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                raw = self.rfile.read(length)
                try:
                    body = json.loads(raw.decode("utf-8"))
                except ValueError:
                    self._reply(400, {"error": "invalid JSON"})
                    return
                with outer._lock:
                    outer.requests.append((self.path, body))
                    script = outer._fail_scripts.get(self.path)
                    if script:
                        status = script.pop(0)
                        if not script:
                            del outer._fail_scripts[self.path]
                        if status is not None:
                            self._reply(status,
                                        {"error": f"scripted {status}"})
                            return
                try:
                    result = outer._handle(self.path, body)
                except KeyError as exc:
                    self._reply(400, {"error": f"missing field {exc}"})
                    return
                if result is None:
                    self._reply(404, {"error": "unknown route"})
                    return
                status, payload = result
                self._reply(status, payload)

            def _reply(self, status, payload):
                blob = json.dumps(payload, ensure_ascii=False).encode("utf-8")
                self.send_response(status)
                self.send_header("Content-Type",
                                 "application/json; charset=utf-8")
                self.send_header("Content-Length", str(len(blob)))
                self.end_headers()
                self.wfile.write(blob)

        self._server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever,
                                        daemon=True)

    def _handle(self, path, body):
        if path == "/translate":
            text, tgt = body["text"], body["target_lang"]
            body["source_lang"]
            if not isinstance(text, str):
                return 400, {"error": "text must be a string"}
            return 200, {"translation": reference_translate(
                text, tgt, self.translate_map)}
        if path == "/score":
            cands = body["candidates"]
            question = body["question"]
            if not isinstance(cands, list):
                return 400, {"error": "candidates must be a list"}
            return 200, {"scores": reference_score(question, cands)}
        if path == "/generate":
            cands = body["candidates"]
            body["question"], body["target_lang"]
            if not isinstance(cands, list):
                return 400, {"error": "candidates must be a list"}
            return 200, {"answer": reference_generate(cands)}
        return None

    # -- scripting -----------------------------------------------------------

    def fail_next(self, path, statuses):
        """Overrides the next len(statuses) calls to path; None passes
        through to the reference behavior."""
        with self._lock:
            self._fail_scripts[path] = list(statuses)

    @property
    def url(self):
        host, port = self._server.server_address
        return f"http://{host}:{port}"

    def start(self):
        self._thread.start()
        return self

    def stop(self):
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()
