"""HTTP service exposing a sentence-embedding model behind a fixed JSON protocol."""

from .app import ServerState, create_app
from .encoders import DEFAULT_MODEL, STUB_MODEL_NAME, SbertEncoder, StubEncoder, load_encoder

__all__ = [
    "DEFAULT_MODEL",
    "STUB_MODEL_NAME",
    "SbertEncoder",
    "ServerState",
    "StubEncoder",
    "create_app",
    "load_encoder",
]
