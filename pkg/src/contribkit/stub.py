"""A small in-process HTTP service speaking the remote embed/summarize protocol.

It exists for contract tests and demos: embeddings are baseline hashed vectors
(or fixed vectors supplied by the caller) and summaries are the first N
words of the input. Run standalone with ``python -m contribkit.stub``.
"""

from __future__ import annotations

import argparse
import json
import threading
from contextlib import contextmanager
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Iterator

from .embedding import EmbedderConfig, embed_text_baseline
from .textproc import tokenize


def hashed_vector(text: str, dim: int) -> list[float]:
    stats = tokenize(text)
    if not stats:
        return [0.0] * dim
    return embed_text_baseline(stats, EmbedderConfig(dim=dim)).tolist()


class StubState:
    def __init__(
        self,
        embed_fn: Callable[[str, int], list[float]] = hashed_vector,
        summary_words: int = 10,
        status: int = 200,
        summarize_response: Callable[[dict], dict] | None = None,
    ):
        self.embed_fn = embed_fn
        self.summary_words = summary_words
        self.status = status
        # replaces the normal /v1/summarize body, for protocol-error tests
        self.summarize_response = summarize_response
        self.requests: list[tuple[str, dict]] = []
        self.lock = threading.Lock()


def _handler(state: StubState):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args) -> None:  # keep test output quiet
            pass

        def _send(self, status: int, body: dict) -> None:
            data = json.dumps(body).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def do_POST(self) -> None:
            length = int(self.headers.get("Content-Length", 0))
            try:
                payload = json.loads(self.rfile.read(length) or b"{}")
            except json.JSONDecodeError:
                self._send(400, {"error": "bad json"})
                return
            with state.lock:
                state.requests.append((self.path, payload))
            if state.status != 200:
                self._send(state.status, {"error": "stub configured to fail"})
                return
            if self.path == "/v1/embed":
                dim = int(payload.get("dim_hint", 768))
                vectors = [state.embed_fn(t, dim) for t in payload.get("texts", [])]
                self._send(200, {"vectors": vectors, "dim": len(vectors[0]) if vectors else dim})
            elif self.path == "/v1/summarize" and state.summarize_response is not None:
                self._send(200, state.summarize_response(payload))
            elif self.path == "/v1/summarize":
                words = str(payload.get("text", "")).split()
                self._send(200, {"summary": " ".join(words[: state.summary_words])})
            else:
                self._send(404, {"error": "unknown route"})

    return Handler


@contextmanager
def serve_stub(state: StubState | None = None, host: str = "127.0.0.1", port: int = 0) -> Iterator[tuple[str, StubState]]:
    """Serve in a background thread; yields ``(base_url, state)``."""
    state = state or StubState()
    server = ThreadingHTTPServer((host, port), _handler(state))
    thread = threading.Thread(target=server.serve_forever, kwargs={"poll_interval": 0.05}, daemon=True)
    thread.start()
    try:
        yield f"http://{host}:{server.server_address[1]}", state
    finally:
        server.shutdown()
        server.server_close()
        thread.join()


def main() -> None:
    ap = argparse.ArgumentParser(description="stub embed/summarize service")
    ap.add_argument("--host", default="127.0.0.1")
    ap.add_argument("--port", type=int, default=8765)
    ap.add_argument("--summary-words", type=int, default=10)
    args = ap.parse_args()
    server = ThreadingHTTPServer((args.host, args.port), _handler(StubState(summary_words=args.summary_words)))
    print(f"stub service on http://{args.host}:{args.port}")
    server.serve_forever()


if __name__ == "__main__":
    main()
