"""Operator console API: HTTP/JSON plus a server-sent event stream.

Endpoints (all JSON unless noted):

    GET    /devices                     fleet list with online flags
    GET    /alerts[?state=confirmed]    alerts, newest first
    GET    /alerts/{id}                 one alert
    GET    /alerts/{id}/clip            the stored clip (image/gif)
    POST   /alerts/{id}/dismiss         operator override; 409 when terminal
    PATCH  /devices/{id}/config         full config; 422 with field errors
    GET    /events                      SSE: alert / alert_state / device

Static console files are served from ``static_dir`` at / when configured.
Every request takes the service lock; SSE subscribers receive events the
service emits while they hold a queue, so a new alert reaches the browser
within one event cycle.
"""

from __future__ import annotations

import json
import mimetypes
import queue
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlparse

from edgeguard.core.alerts import IllegalTransition
from edgeguard.core.types import DeviceConfig
from edgeguard.cloud.service import CloudService, UnknownDevice, alert_to_json

_SSE_EVENT_NAMES = {
    "alert_received": "alert",
    "alert_state": "alert_state",
    "device_registered": "device",
    "config_updated": "device",
    "config_delivered": "device",
}


class ConsoleServer:
    def __init__(self, service: CloudService, lock: threading.Lock,
                 host: str = "127.0.0.1", port: int = 0, static_dir=None):
        self.service = service
        self.lock = lock
        self.static_dir = Path(static_dir) if static_dir else None
        self._subscribers = []
        self._subscribers_lock = threading.Lock()
        service.observers.append(self._fanout)
        handler = _make_handler(self)
        self.httpd = ThreadingHTTPServer((host, port), handler)
        self.httpd.daemon_threads = True
        self._thread = None

    @property
    def port(self) -> int:
        return self.httpd.server_address[1]

    def start(self) -> None:
        self._thread = threading.Thread(target=self.httpd.serve_forever, daemon=True)
        self._thread.start()

    def stop(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()

    def _fanout(self, kind: str, data: dict) -> None:
        name = _SSE_EVENT_NAMES.get(kind)
        if name is None:
            return
        with self._subscribers_lock:
            for q in list(self._subscribers):
                q.put((name, data))

    def subscribe(self) -> "queue.Queue":
        q = queue.Queue()
        with self._subscribers_lock:
            self._subscribers.append(q)
        return q

    def unsubscribe(self, q) -> None:
        with self._subscribers_lock:
            if q in self._subscribers:
                self._subscribers.remove(q)


def _make_handler(console: ConsoleServer):
    service = console.service
    lock = console.lock

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet the default stderr chatter
            pass

        # -- helpers -------------------------------------------------------

        def _json(self, status: int, obj) -> None:
            body = json.dumps(obj, sort_keys=True).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _bytes(self, status: int, body: bytes, content_type: str) -> None:
            self.send_response(status)
            self.send_header("Content-Type", content_type)
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _read_body(self):
            length = int(self.headers.get("Content-Length", 0))
            raw = self.rfile.read(length) if length else b""
            try:
                return json.loads(raw.decode("utf-8")) if raw else {}
            except (UnicodeDecodeError, json.JSONDecodeError):
                return None

        # -- routing -------------------------------------------------------

        def do_GET(self):
            url = urlparse(self.path)
            parts = [p for p in url.path.split("/") if p]
            if url.path == "/events":
                return self._serve_events()
            if parts == ["devices"]:
                with lock:
                    now = service.clock.now
                    devices = [d.to_json(now) for d in service.devices.values()]
                return self._json(200, {"devices": devices})
            if parts == ["alerts"]:
                wanted = parse_qs(url.query).get("state", [None])[0]
                with lock:
                    alerts = [
                        alert_to_json(a)
                        for a in service.alerts.values()
                        if wanted is None or str(a.state) == wanted
                    ]
                alerts.sort(key=lambda a: a["created_at"], reverse=True)
                return self._json(200, {"alerts": alerts})
            if len(parts) == 2 and parts[0] == "alerts":
                with lock:
                    alert = service.alerts.get(parts[1])
                    if alert is None:
                        return self._json(404, {"error": "no such alert"})
                    return self._json(200, alert_to_json(alert))
            if len(parts) == 3 and parts[0] == "alerts" and parts[2] == "clip":
                with lock:
                    if parts[1] not in service.alerts or parts[1] not in service.clips:
                        return self._json(404, {"error": "no such clip"})
                    blob = service.clips.get(parts[1])
                return self._bytes(200, blob, "image/gif")
            return self._serve_static(url.path)

        def do_POST(self):
            parts = [p for p in self.path.split("/") if p]
            if len(parts) == 3 and parts[0] == "alerts" and parts[2] == "dismiss":
                with lock:
                    if parts[1] not in service.alerts:
                        return self._json(404, {"error": "no such alert"})
                    try:
                        alert = service.dismiss(parts[1], actor="console")
                    except IllegalTransition as exc:
                        return self._json(409, {"error": str(exc)})
                    return self._json(200, alert_to_json(alert))
            return self._json(404, {"error": "no such route"})

        def do_PATCH(self):
            parts = [p for p in self.path.split("/") if p]
            if len(parts) == 3 and parts[0] == "devices" and parts[2] == "config":
                body = self._read_body()
                if body is None:
                    return self._json(400, {"error": "body must be JSON"})
                try:
                    config = DeviceConfig.from_json(body)
                except (KeyError, TypeError, ValueError) as exc:
                    return self._json(400, {"error": "bad config: %s" % exc})
                with lock:
                    try:
                        result = service.update_config(parts[1], config)
                    except UnknownDevice:
                        return self._json(404, {"error": "no such device"})
                if not result["ok"]:
                    return self._json(422, {"errors": result["errors"]})
                return self._json(200, result)
            return self._json(404, {"error": "no such route"})

        # -- SSE -----------------------------------------------------------

        def _serve_events(self):
            self.send_response(200)
            self.send_header("Content-Type", "text/event-stream")
            self.send_header("Cache-Control", "no-cache")
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            q = console.subscribe()
            try:
                self.wfile.write(b": connected\n\n")
                self.wfile.flush()
                while True:
                    try:
                        name, data = q.get(timeout=15)
                    except queue.Empty:
                        self.wfile.write(b": keepalive\n\n")
                        self.wfile.flush()
                        continue
                    payload = json.dumps(data, sort_keys=True)
                    chunk = "event: %s\ndata: %s\n\n" % (name, payload)
                    self.wfile.write(chunk.encode("utf-8"))
                    self.wfile.flush()
            except (BrokenPipeError, ConnectionResetError):
                pass
            finally:
                console.unsubscribe(q)

        # -- static files ----------------------------------------------------

        def _serve_static(self, path: str):
            if console.static_dir is None:
                return self._json(404, {"error": "no such route"})
            rel = path.lstrip("/") or "index.html"
            target = (console.static_dir / rel).resolve()
            if not str(target).startswith(str(console.static_dir.resolve())) or not target.is_file():
                return self._json(404, {"error": "no such file"})
            content_type = mimetypes.guess_type(str(target))[0] or "application/octet-stream"
            return self._bytes(200, target.read_bytes(), content_type)

    return Handler
