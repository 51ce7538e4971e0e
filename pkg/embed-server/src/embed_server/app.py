"""FastAPI application implementing the embedding wire protocol.

POST /embed   {"texts": [str, ...], "normalize": true}
              -> 200 {"model": str, "dim": int, "embeddings": [[float, ...], ...]}
GET  /health  -> 200 {"status": "ok", "model": str, "dim": int}

All non-200 responses carry {"error": str}: 400 for bad requests, 503 while
the model is still loading.  The model loads once; requests hold no state.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

MAX_TEXT_BYTES = 8192


class EmbedRequest(BaseModel):
    texts: list[str]
    normalize: bool = True


@dataclass
class ServerState:
    max_batch: int = 256
    encoder: object | None = None
    load_error: str | None = None
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def ready(self) -> bool:
        return self.encoder is not None


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"error": message})


def create_app(state: ServerState) -> FastAPI:
    app = FastAPI(title="embed-server")

    @app.exception_handler(RequestValidationError)
    async def validation_handler(request: Request, exc: RequestValidationError):
        return _error(400, f"invalid request body: {exc.errors()}")

    @app.get("/health")
    def health():
        if state.load_error:
            return _error(503, f"model failed to load: {state.load_error}")
        if not state.ready:
            return _error(503, "model is loading")
        return {
            "status": "ok",
            "model": state.encoder.model_name,
            "dim": state.encoder.dim,
        }

    @app.post("/embed")
    def embed(request: EmbedRequest):
        if state.load_error:
            return _error(503, f"model failed to load: {state.load_error}")
        if not state.ready:
            return _error(503, "model is loading")
        texts = request.texts
        if len(texts) == 0:
            return _error(400, "empty batch")
        if len(texts) > state.max_batch:
            return _error(400, f"batch of {len(texts)} exceeds max_batch {state.max_batch}")
        for i, text in enumerate(texts):
            if len(text.encode("utf-8")) > MAX_TEXT_BYTES:
                return _error(400, f"text {i} exceeds {MAX_TEXT_BYTES} bytes")
        if not request.normalize:
            return _error(400, "this server only returns normalized embeddings")
        with state.lock:  # inference serialized; no per-request state
            vectors = state.encoder.encode(texts)
        return {
            "model": state.encoder.model_name,
            "dim": state.encoder.dim,
            "embeddings": [[float(v) for v in row] for row in vectors],
        }

    return app
