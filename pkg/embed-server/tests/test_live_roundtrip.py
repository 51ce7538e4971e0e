"""Protocol conformance over real HTTP: the core toolkit's remote client
against a live server instance (stub encoder, so no model download needed)."""

import threading
import time

import numpy as np
import pytest
import uvicorn

from embed_server.app import ServerState, create_app
from embed_server.encoders import StubEncoder

from linguareward.embedding import RemoteEmbedder


@pytest.fixture(scope="module")
def live_server():
    state = ServerState(max_batch=256, encoder=StubEncoder(dim=768))
    app = create_app(state)
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 15
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.05)
    host, port = server.servers[0].sockets[0].getsockname()[:2]
    yield f"http://{host}:{port}"
    server.should_exit = True
    thread.join(timeout=10)


class TestLiveRoundTrip:
    def test_health_over_http(self, live_server):
        client = RemoteEmbedder(live_server)
        health = client.health()
        assert health["status"] == "ok"
        assert health["dim"] == 768

    def test_thousand_sentence_round_trip(self, live_server):
        # order preservation and unit norms across chunked batches
        client = RemoteEmbedder(live_server, max_batch=128)
        texts = [f"The state is at step {i} with value {i / 7:.2f}." for i in range(1000)]
        vecs = client.embed(texts)
        assert len(vecs) == 1000
        encoder = StubEncoder(dim=768)
        check_idx = list(range(0, 1000, 97)) + [999]
        for i in check_idx:
            assert abs(float(np.linalg.norm(vecs[i])) - 1.0) <= 1e-5
            want = encoder.encode([texts[i]])[0].astype(np.float64)
            want /= np.linalg.norm(want)
            assert float(np.max(np.abs(vecs[i] - want))) < 1e-6

    def test_client_reports_model(self, live_server):
        client = RemoteEmbedder(live_server)
        client.embed(["ping"])
        assert client.model == "stub-sha256"
        assert client.dim == 768
