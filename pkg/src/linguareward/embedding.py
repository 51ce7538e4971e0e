"""Sentence-embedding backends, cosine similarity, and an LRU cache.

Embeddings are plain float64 numpy vectors with L2 norm 1; that normalized
form is the canonical representation everywhere in this package.  Three
interchangeable backends are provided:

* ``hash``: FNV-1a over character trigrams.  Bit-exact and dependency-free;
  carries no semantic meaning and exists for plumbing/determinism tests.
* ``numeric_oracle``: embeds the numbers appearing in a sentence so that
  similarity to a goal sentence decays smoothly with numeric discrepancy.
  Makes end-to-end training runs deterministic without a model service.
* ``remote``: HTTP client for a sentence-embedding service (see
  ``RemoteEmbedder`` for the wire protocol).

Backends never fall back to one another: a failing remote service aborts the
run rather than silently switching to a local surrogate, which would corrupt
any experiment built on the results.
"""

from __future__ import annotations

import re
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
import requests

BACKENDS = ("hash", "numeric_oracle", "remote")

_MASK64 = 0xFFFFFFFFFFFFFFFF
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3

_NUMBER_RE = re.compile(r"[+-]?\d+(?:\.\d+)?")


class TransportError(RuntimeError):
    """Remote embedding service unreachable after all retries."""


class ProtocolError(RuntimeError):
    """Remote embedding service answered with a malformed or mismatched response."""


@dataclass(frozen=True)
class EmbedderSpec:
    """Configuration for one embedding backend.

    ``cache_capacity`` is the number of sentences kept in an LRU cache in
    front of the backend; 0 disables caching.
    """

    backend: str
    dim: int = 768
    remote_url: str | None = None
    cache_capacity: int = 0

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValueError(f"unknown backend {self.backend!r}; expected one of {BACKENDS}")
        if self.dim <= 0:
            raise ValueError("dim must be positive")
        if self.backend == "hash" and self.dim < 8:
            raise ValueError("hash backend requires dim >= 8")
        if self.backend == "numeric_oracle" and self.dim < 9:
            raise ValueError("numeric_oracle backend requires dim >= 9")
        if self.backend == "remote" and not self.remote_url:
            raise ValueError("remote backend requires remote_url")
        if self.cache_capacity < 0:
            raise ValueError("cache_capacity must be >= 0")


class EmbeddingCache:
    """LRU sentence -> vector cache.

    Hits return the vector object originally stored (bit-identical); stored
    arrays are marked read-only so callers cannot corrupt cached entries.
    Lookups may run concurrently; mutations are serialized by a lock.
    """

    def __init__(self, capacity: int):
        if capacity < 0:
            raise ValueError("capacity must be >= 0")
        self.capacity = capacity
        self.hits = 0
        self.misses = 0
        self._entries: OrderedDict[str, np.ndarray] = OrderedDict()
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def get(self, text: str) -> np.ndarray | None:
        with self._lock:
            vec = self._entries.get(text)
            if vec is None:
                self.misses += 1
                return None
            self._entries.move_to_end(text)
            self.hits += 1
            return vec

    def put(self, text: str, vec: np.ndarray) -> None:
        if self.capacity == 0:
            return
        stored = np.array(vec, dtype=np.float64, copy=True)
        stored.flags.writeable = False
        with self._lock:
            self._entries[text] = stored
            self._entries.move_to_end(text)
            while len(self._entries) > self.capacity:
                self._entries.popitem(last=False)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity of two unit vectors (their dot product), in [-1, 1]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.clip(np.dot(a, b), -1.0, 1.0))


def _fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def embed_hash(text: str, dim: int) -> np.ndarray:
    """Deterministic trigram-hashing embedding.

    Lowercase the text, hash every character 3-gram with 64-bit FNV-1a, and
    add +/-1 (sign taken from the hash's top bit) into slot ``h mod dim``;
    L2-normalize.  Text with no trigrams maps to the unit vector along slot 0.
    """
    if dim < 8:
        raise ValueError("dim must be >= 8")
    if not text:
        raise ValueError("text must be non-empty")
    lowered = text.lower()
    acc = np.zeros(dim, dtype=np.float64)
    for i in range(len(lowered) - 2):
        h = _fnv1a64(lowered[i : i + 3].encode("utf-8"))
        acc[h % dim] += 1.0 if (h >> 63) == 0 else -1.0
    norm = float(np.linalg.norm(acc))
    if norm == 0.0:
        acc[0] = 1.0
        return acc
    return acc / norm


def embed_numeric_oracle(text: str, dim: int) -> np.ndarray:
    """Embedding of the numeric content of a sentence.

    Parses the decimal numbers in the text in order (sign included), keeps
    the first 8, squashes each as v/(1+|v|), and normalizes
    [2.0, v'1..v'8, 0, ...] padded to ``dim``.  Identical numeric content
    yields identical vectors regardless of the surrounding prose; cosine
    against a goal sentence is a smooth function of the numeric discrepancy.
    """
    if dim < 9:
        raise ValueError("dim must be >= 9")
    if not text:
        raise ValueError("text must be non-empty")
    vec = np.zeros(dim, dtype=np.float64)
    vec[0] = 2.0
    for i, match in enumerate(_NUMBER_RE.findall(text)[:8]):
        v = float(match)
        vec[1 + i] = v / (1.0 + abs(v))
    return vec / float(np.linalg.norm(vec))


class HashEmbedder:
    def __init__(self, dim: int = 768):
        if dim < 8:
            raise ValueError("dim must be >= 8")
        self.dim = dim

    def embed(self, texts: list[str]) -> list[np.ndarray]:
        return [embed_hash(t, self.dim) for t in texts]


class NumericOracleEmbedder:
    def __init__(self, dim: int = 768):
        if dim < 9:
            raise ValueError("dim must be >= 9")
        self.dim = dim

    def embed(self, texts: list[str]) -> list[np.ndarray]:
        return [embed_numeric_oracle(t, self.dim) for t in texts]


class RemoteEmbedder:
    """Client for an embedding service.

    Wire protocol: POST ``{url}/embed`` with ``{"texts": [...], "normalize":
    true}`` returning ``{"model": str, "dim": int, "embeddings": [[...], ...]}``;
    GET ``{url}/health`` returning ``{"status": "ok", "model": str, "dim":
    int}``.  Non-200 responses carry ``{"error": str}``.

    Transport failures are retried ``retries`` times with exponential backoff
    before raising; there is deliberately no fallback to a local backend.
    Results always come back in input order, re-normalized to the canonical
    unit-norm form (the service serializes floats, so norms can be off by
    ~1e-6 on the wire).
    """

    def __init__(
        self,
        url: str,
        dim: int | None = None,
        max_batch: int = 256,
        retries: int = 3,
        backoff_s: float = 0.1,
        timeout_s: float = 30.0,
        session: requests.Session | None = None,
    ):
        self.url = url.rstrip("/")
        self.dim = dim
        self.max_batch = max_batch
        self.retries = retries
        self.backoff_s = backoff_s
        self.timeout_s = timeout_s
        self._session = session or requests.Session()
        self.model: str | None = None

    def health(self) -> dict:
        resp = self._request("GET", f"{self.url}/health")
        return resp

    def embed(self, texts: list[str]) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for start in range(0, len(texts), self.max_batch):
            chunk = texts[start : start + self.max_batch]
            body = self._request(
                "POST", f"{self.url}/embed", json={"texts": chunk, "normalize": True}
            )
            self._check_payload(body, len(chunk))
            for row in body["embeddings"]:
                vec = np.asarray(row, dtype=np.float64)
                out.append(vec / float(np.linalg.norm(vec)))
        return out

    def _check_payload(self, body: dict, n_texts: int) -> None:
        embeddings = body.get("embeddings")
        if not isinstance(embeddings, list) or len(embeddings) != n_texts:
            raise ProtocolError(
                f"expected {n_texts} embeddings, got "
                f"{len(embeddings) if isinstance(embeddings, list) else type(embeddings).__name__}"
            )
        dim = body.get("dim")
        if self.dim is None:
            self.dim = int(dim)
        elif dim != self.dim:
            raise ProtocolError(f"service reports dim {dim}, client configured for {self.dim}")
        for row in embeddings:
            if len(row) != self.dim:
                raise ProtocolError(f"embedding of length {len(row)} != dim {self.dim}")
        self.model = body.get("model")

    def _request(self, method: str, url: str, json: dict | None = None) -> dict:
        last_exc: Exception | None = None
        for attempt in range(self.retries + 1):
            if attempt > 0:
                time.sleep(self.backoff_s * 2 ** (attempt - 1))
            try:
                resp = self._session.request(method, url, json=json, timeout=self.timeout_s)
            except requests.RequestException as exc:
                last_exc = exc
                continue
            if resp.status_code == 200:
                try:
                    return resp.json()
                except ValueError as exc:
                    raise ProtocolError(f"non-JSON response from {url}: {exc}") from exc
            if resp.status_code in (502, 503, 504):
                last_exc = TransportError(f"{url} answered {resp.status_code}")
                continue
            try:
                detail = resp.json().get("error", resp.text)
            except ValueError:
                detail = resp.text
            raise ProtocolError(f"{url} answered {resp.status_code}: {detail}")
        raise TransportError(
            f"{url} unreachable after {self.retries + 1} attempts: {last_exc}"
        ) from last_exc


class CachedEmbedder:
    """LRU cache in front of any embedder; transparent to results."""

    def __init__(self, inner, capacity: int):
        self.inner = inner
        self.cache = EmbeddingCache(capacity)

    @property
    def dim(self) -> int:
        return self.inner.dim

    def embed(self, texts: list[str]) -> list[np.ndarray]:
        results: list[np.ndarray | None] = [self.cache.get(t) for t in texts]
        missing = [i for i, r in enumerate(results) if r is None]
        if missing:
            computed = self.inner.embed([texts[i] for i in missing])
            for i, vec in zip(missing, computed):
                self.cache.put(texts[i], vec)
                results[i] = vec
        return results  # type: ignore[return-value]


def make_embedder(spec: EmbedderSpec):
    """Construct the embedder described by ``spec`` (with cache if requested)."""
    if spec.backend == "hash":
        inner = HashEmbedder(spec.dim)
    elif spec.backend == "numeric_oracle":
        inner = NumericOracleEmbedder(spec.dim)
    else:
        inner = RemoteEmbedder(spec.remote_url, dim=spec.dim)
    if spec.cache_capacity > 0:
        return CachedEmbedder(inner, spec.cache_capacity)
    return inner


def embed(texts: list[str], spec: EmbedderSpec) -> list[np.ndarray]:
    """Embed a batch of sentences with a freshly constructed backend.

    Output order matches input order; identical inputs give identical vectors
    (per backend and, for the remote backend, per model version).
    """
    for t in texts:
        if not t:
            raise ValueError("texts must be non-empty")
    return make_embedder(spec).embed(texts)
