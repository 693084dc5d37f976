"""HTTP and pipe transports.

Both carry the same one-object-per-request envelopes.  The HTTP transport
accepts concurrent connections but funnels every envelope through a lock,
so the session only ever sees one request at a time.
"""

from __future__ import annotations

import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import IO

from .errors import SplError
from .protocol import Session, dumps

log = logging.getLogger("splkit.server")


class SessionHTTPServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, address: tuple[str, int], session: Session):
        super().__init__(address, _Handler)
        self.session = session
        self.session_lock = threading.Lock()


class _Handler(BaseHTTPRequestHandler):
    server: SessionHTTPServer

    def _respond(self, status: int, payload) -> None:
        body = dumps(payload).encode("utf-8")
        self.send_response(status)
        self._cors()
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _cors(self) -> None:
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def do_OPTIONS(self) -> None:
        self.send_response(204)
        self._cors()
        self.end_headers()

    def do_POST(self) -> None:
        if self.path != "/rpc":
            self._respond(404, {"ok": False, "error": "NotFound", "message": self.path})
            return
        length = int(self.headers.get("Content-Length", "0"))
        body = self.rfile.read(length)
        try:
            envelope = json.loads(body.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as err:
            self._respond(
                400,
                {"method": None, "ok": False, "error": "SchemaError", "message": f"bad JSON: {err}"},
            )
            return
        with self.server.session_lock:
            response = self.server.session.dispatch(envelope)
        self._respond(200, response)

    def do_GET(self) -> None:
        if self.path != "/model":
            self._respond(404, {"ok": False, "error": "NotFound", "message": self.path})
            return
        with self.server.session_lock:
            try:
                payload = self.server.session.feature_model_payload()
            except SplError as err:
                payload = {
                    "method": "featureModel",
                    "ok": False,
                    "error": type(err).__name__,
                    "message": str(err),
                }
        self._respond(200, payload)

    def log_message(self, fmt, *args):  # route through logging, not stderr
        log.debug("%s %s", self.address_string(), fmt % args)


def make_http_server(session: Session, host: str = "127.0.0.1", port: int = 0) -> SessionHTTPServer:
    return SessionHTTPServer((host, port), session)


def run_pipe(session: Session, stdin: IO[str], stdout: IO[str]) -> None:
    """Newline-delimited JSON loop: one request per line, one response per line."""
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            envelope = json.loads(line)
        except json.JSONDecodeError as err:
            response = {"method": None, "ok": False, "error": "SchemaError", "message": f"bad JSON: {err}"}
        else:
            response = session.dispatch(envelope)
        stdout.write(dumps(response) + "\n")
        stdout.flush()
