"""Server entry point: load the model in the background, serve the protocol."""

from __future__ import annotations

import argparse
import sys
import threading

import uvicorn

from .app import ServerState, create_app
from .encoders import DEFAULT_MODEL, STUB_MODEL_NAME, load_encoder


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-server", description="Sentence-embedding HTTP service"
    )
    parser.add_argument(
        "--model",
        default=DEFAULT_MODEL,
        help=f"sentence-transformers model name, or '{STUB_MODEL_NAME}' for the "
        "deterministic test encoder",
    )
    parser.add_argument("--host", default="127.0.0.1", help="bind address (localhost by default)")
    parser.add_argument("--port", type=int, default=8801)
    parser.add_argument("--max-batch", type=int, default=256, help="max texts per request")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    state = ServerState(max_batch=args.max_batch)

    def load():
        try:
            state.encoder = load_encoder(args.model)
        except Exception as exc:  # surfaced as 503 with the reason
            state.load_error = f"{type(exc).__name__}: {exc}"

    threading.Thread(target=load, daemon=True).start()
    app = create_app(state)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
