"""Sentence encoders served over the wire protocol.

``SbertEncoder`` wraps a sentence-transformers model (all-mpnet-base-v2 by
default).  ``StubEncoder`` is a deterministic hash-based stand-in with the
same interface, for protocol tests and CI machines without model weights; it
carries no semantic meaning and must be requested explicitly.
"""

from __future__ import annotations

import hashlib

import numpy as np

DEFAULT_MODEL = "sentence-transformers/all-mpnet-base-v2"
STUB_MODEL_NAME = "stub-sha256"


class StubEncoder:
    """Deterministic unit-norm vectors derived from SHA-256 of the text."""

    def __init__(self, dim: int = 768):
        self.dim = dim
        self.model_name = STUB_MODEL_NAME

    def encode(self, texts: list[str]) -> np.ndarray:
        out = np.empty((len(texts), self.dim), dtype=np.float32)
        for i, text in enumerate(texts):
            vals = []
            counter = 0
            while len(vals) < self.dim:
                digest = hashlib.sha256(f"{counter}|{text}".encode("utf-8")).digest()
                vals.extend(b / 127.5 - 1.0 for b in digest)
                counter += 1
            vec = np.asarray(vals[: self.dim], dtype=np.float32)
            out[i] = vec / np.linalg.norm(vec)
        return out


class SbertEncoder:
    """sentence-transformers model with mean pooling and L2 normalization
    (the model card defaults)."""

    def __init__(self, model_name: str = DEFAULT_MODEL, device: str = "cpu"):
        from sentence_transformers import SentenceTransformer

        self.model_name = model_name
        self._model = SentenceTransformer(model_name, device=device)
        self.dim = int(self._model.get_sentence_embedding_dimension())

    def encode(self, texts: list[str]) -> np.ndarray:
        vecs = self._model.encode(
            texts,
            convert_to_numpy=True,
            normalize_embeddings=True,
            show_progress_bar=False,
        )
        return np.asarray(vecs, dtype=np.float32)


def load_encoder(model_name: str):
    if model_name == STUB_MODEL_NAME:
        return StubEncoder()
    return SbertEncoder(model_name)
