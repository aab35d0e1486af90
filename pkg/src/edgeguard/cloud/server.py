"""Live mode: real sockets, wall-clock pacing, same service core.

Devices connect to the device port and speak the framed protocol; the
console API (and static console files) are served on the console port.
The service still runs on a virtual clock, but a pump thread advances it
to wall time every 20 ms, so simulation and live mode share every code
path. All state mutation is serialized through one lock (the "single
writer" the service's concurrency contract requires).
"""

from __future__ import annotations

import socketserver
import threading
import time

from edgeguard.cloud.console import ConsoleServer
from edgeguard.cloud.notify import LogNotifier, WebhookNotifier
from edgeguard.cloud.service import CloudService, NetworkVerifier, StubVerifier
from edgeguard.core.clock import VirtualClock
from edgeguard.verifier.network import NetworkSpec, default_arch
from edgeguard.verifier.resample import ResampleConfig
from edgeguard.verifier.weights import load_weights
from edgeguard.wire import ProtocolError, StreamDecoder, encode


class LiveCloud:
    def __init__(self, device_port=0, console_port=0, verifier=None,
                 notifier=None, static_dir=None, host="127.0.0.1",
                 verify_latency_ms=250):
        self.lock = threading.Lock()
        self.clock = VirtualClock()
        self._connections = {}
        self._connections_lock = threading.Lock()
        self.service = CloudService(
            self.clock,
            verifier or StubVerifier(0.9),
            notifier or LogNotifier(),
            self._send_to_device,
            verify_latency_ms=verify_latency_ms,
        )
        self.console = ConsoleServer(self.service, self.lock, host=host,
                                     port=console_port, static_dir=static_dir)
        self.devices = _DeviceServer((host, device_port), self)
        self._stop = threading.Event()
        self._pump = threading.Thread(target=self._pump_clock, daemon=True)
        self._device_thread = threading.Thread(
            target=self.devices.serve_forever, daemon=True)
        self._t0 = None

    @property
    def device_port(self) -> int:
        return self.devices.server_address[1]

    @property
    def console_port(self) -> int:
        return self.console.port

    def start(self) -> None:
        self._t0 = time.monotonic()
        self._pump.start()
        self._device_thread.start()
        self.console.start()

    def stop(self) -> None:
        self._stop.set()
        self.devices.shutdown()
        self.devices.server_close()
        self.console.stop()

    def _pump_clock(self) -> None:
        while not self._stop.is_set():
            target = int((time.monotonic() - self._t0) * 1000)
            with self.lock:
                self.clock.run_until(target)
            self._stop.wait(0.02)

    def _send_to_device(self, device_id: str, msg) -> None:
        with self._connections_lock:
            wfile = self._connections.get(device_id)
        if wfile is None:
            return
        try:
            wfile.write(encode(msg))
            wfile.flush()
        except (OSError, ValueError):  # connection gone mid-write
            pass

    def attach(self, device_id: str, wfile) -> None:
        with self._connections_lock:
            self._connections[device_id] = wfile

    def detach(self, device_id: str, wfile) -> None:
        with self._connections_lock:
            if self._connections.get(device_id) is wfile:
                del self._connections[device_id]


class _DeviceServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True

    def __init__(self, addr, cloud: LiveCloud):
        self.cloud = cloud
        super().__init__(addr, _DeviceConnection)


class _DeviceConnection(socketserver.StreamRequestHandler):
    def handle(self):
        cloud: LiveCloud = self.server.cloud
        decoder = StreamDecoder()
        device_id = None
        while True:
            chunk = self.request.recv(65536)
            if not chunk:
                break
            try:
                messages = decoder.feed(chunk)
            except ProtocolError as exc:
                with cloud.lock:
                    cloud.service.log.append(
                        cloud.clock.now, "protocol_fault",
                        {"device_id": device_id or "?", "reason": str(exc)})
                break  # framing is unrecoverable on this connection
            for msg in messages:
                if device_id is None:
                    device_id = msg.device_id
                    cloud.attach(device_id, self.wfile)
                with cloud.lock:
                    cloud.service.handle_message(msg)
        if device_id is not None:
            cloud.detach(device_id, self.wfile)


def build_verifier(weights=None, arch=None, stub_score=None,
                   resample=ResampleConfig(15, 2)):
    if stub_score is not None:
        return StubVerifier(stub_score)
    if weights is None:
        return StubVerifier(0.9)
    spec = NetworkSpec.load(arch) if arch else default_arch()
    return NetworkVerifier(spec, load_weights(weights), resample)


def serve(device_port=7700, console_port=7780, weights=None, arch=None,
          stub_score=None, static_dir=None, webhook_url=None) -> None:
    notifier = WebhookNotifier(webhook_url) if webhook_url else LogNotifier()
    cloud = LiveCloud(
        device_port=device_port,
        console_port=console_port,
        verifier=build_verifier(weights, arch, stub_score),
        notifier=notifier,
        static_dir=static_dir,
    )
    cloud.start()
    print("device port  : %d" % cloud.device_port)
    print("console port : %d (http://127.0.0.1:%d/)" % (cloud.console_port, cloud.console_port))
    try:
        while True:
            time.sleep(1)
    except KeyboardInterrupt:
        pass
    finally:
        cloud.stop()
