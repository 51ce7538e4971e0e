"""In-process HTTP server speaking the embedding wire protocol (hash backend).

Shared by client tests and the acceptance suite so the remote path can be
exercised without any model service.
"""

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

from linguareward.embedding import embed_hash


class ProtocolHandler(BaseHTTPRequestHandler):
    dim = 32
    fail_first_n = 0
    failures = {"count": 0}

    def log_message(self, *args):
        pass

    def do_GET(self):
        if self.path == "/health":
            self._send(200, {"status": "ok", "model": "test-hash", "dim": self.dim})
        else:
            self._send(404, {"error": "not found"})

    def do_POST(self):
        if self.path != "/embed":
            self._send(404, {"error": "not found"})
            return
        if self.failures["count"] < self.fail_first_n:
            self.failures["count"] += 1
            self._send(503, {"error": "warming up"})
            return
        length = int(self.headers["Content-Length"])
        body = json.loads(self.rfile.read(length))
        texts = body["texts"]
        if not texts:
            self._send(400, {"error": "empty batch"})
            return
        embeddings = [embed_hash(t, self.dim).tolist() for t in texts]
        self._send(200, {"model": "test-hash", "dim": self.dim, "embeddings": embeddings})

    def _send(self, status, payload):
        data = json.dumps(payload).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)


def start_server(dim=32, fail_first_n=0):
    """Returns (url, handler_class, shutdown_callable)."""
    handler = type(
        "Handler", (ProtocolHandler,), {"failures": {"count": 0}, "dim": dim, "fail_first_n": fail_first_n}
    )
    server = HTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()

    def shutdown():
        server.shutdown()
        thread.join(timeout=5)

    return f"http://127.0.0.1:{server.server_port}", handler, shutdown
