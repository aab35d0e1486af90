import http.client
import json
import socket
import threading
import time

import pytest

from edgeguard.cloud.server import LiveCloud
from edgeguard.cloud.service import StubVerifier
from edgeguard.wire import Message, MessageType, StreamDecoder, encode, encode_gif
from edgeguard.core.types import DeviceConfig

from conftest import pattern_frame


@pytest.fixture
def cloud():
    cloud = LiveCloud(verifier=StubVerifier(0.9), verify_latency_ms=50)
    cloud.start()
    yield cloud
    cloud.stop()


def api(cloud, method, path, body=None):
    conn = http.client.HTTPConnection("127.0.0.1", cloud.console_port, timeout=5)
    payload = json.dumps(body).encode() if body is not None else None
    headers = {"Content-Type": "application/json"} if payload else {}
    conn.request(method, path, body=payload, headers=headers)
    response = conn.getresponse()
    raw = response.read()
    conn.close()
    content_type = response.getheader("Content-Type", "")
    parsed = json.loads(raw) if content_type.startswith("application/json") else raw
    return response.status, parsed


class DeviceClient:
    """Minimal protocol client speaking to the live device port."""

    def __init__(self, cloud, device_id="cam-live", fps=15.0):
        self.sock = socket.create_connection(("127.0.0.1", cloud.device_port), timeout=5)
        self.device_id = device_id
        self.fps = fps
        self.decoder = StreamDecoder()
        self.inbox = []
        self._count = 0

    def _msg_id(self):
        self._count += 1
        return "%s-%d" % (self.device_id, self._count)

    def send(self, mtype, payload=b"", meta=None):
        msg = Message(mtype, self._msg_id(), self.device_id,
                      int(time.time() * 1000), payload=payload, meta=meta or {})
        self.sock.sendall(encode(msg))
        return msg

    def recv_until(self, predicate, timeout=5.0):
        deadline = time.monotonic() + timeout
        while time.monotonic() < deadline:
            for msg in self.inbox:
                if predicate(msg):
                    return msg
            self.sock.settimeout(deadline - time.monotonic())
            try:
                chunk = self.sock.recv(65536)
            except socket.timeout:
                break
            if not chunk:
                break
            self.inbox.extend(self.decoder.feed(chunk))
        for msg in self.inbox:
            if predicate(msg):
                return msg
        raise AssertionError("no matching message; inbox=%r" % [m.type for m in self.inbox])

    def close(self):
        self.sock.close()


def register(client):
    client.send(MessageType.REGISTER,
                meta={"fps": client.fps, "config": DeviceConfig().to_json()})
    client.recv_until(lambda m: m.type is MessageType.REGISTER_ACK)


def upload_alert(client, seq=42):
    blob = encode_gif([pattern_frame(16, 12, seq=i) for i in range(30)])
    msg = client.send(
        MessageType.ALERT, payload=blob,
        meta={"trigger_class": "gun", "momentum": 1.2, "captured_at": 0,
              "trigger_seq": seq, "fps": client.fps})
    client.recv_until(lambda m: m.type is MessageType.ACK and m.meta["ack_of"] == msg.msg_id)
    return msg


class TestDevicePort:
    def test_register_alert_verdict_flow(self, cloud):
        client = DeviceClient(cloud)
        try:
            register(client)
            upload_alert(client)
            verdict = client.recv_until(lambda m: m.type is MessageType.VERDICT)
            assert verdict.meta["verdict"] == "confirmed"
            assert verdict.meta["score"] == 0.9
        finally:
            client.close()

    def test_alert_without_registration_errors(self, cloud):
        client = DeviceClient(cloud, device_id="ghost")
        try:
            blob = encode_gif([pattern_frame(8, 6, seq=i) for i in range(30)])
            client.send(MessageType.ALERT, payload=blob,
                        meta={"trigger_class": "gun", "trigger_seq": 1, "fps": 15.0})
            error = client.recv_until(lambda m: m.type is MessageType.ERROR)
            assert error.meta["code"] == "unknown_device"
        finally:
            client.close()


class TestConsoleApi:
    def test_devices_listing(self, cloud):
        client = DeviceClient(cloud)
        try:
            register(client)
            status, body = api(cloud, "GET", "/devices")
            assert status == 200
            assert [d["device_id"] for d in body["devices"]] == ["cam-live"]
            assert body["devices"][0]["online"] is True
        finally:
            client.close()

    def test_alert_listing_and_clip(self, cloud):
        client = DeviceClient(cloud)
        try:
            register(client)
            upload_alert(client)
            client.recv_until(lambda m: m.type is MessageType.VERDICT)
            status, body = api(cloud, "GET", "/alerts")
            assert status == 200 and len(body["alerts"]) == 1
            alert = body["alerts"][0]
            assert alert["state"] in ("confirmed", "notified")
            status, single = api(cloud, "GET", "/alerts/%s" % alert["alert_id"])
            assert status == 200 and single["alert_id"] == alert["alert_id"]
            status, clip = api(cloud, "GET", "/alerts/%s/clip" % alert["alert_id"])
            assert status == 200 and clip[:6] == b"GIF89a"
            status, filtered = api(cloud, "GET", "/alerts?state=rejected")
            assert status == 200 and filtered["alerts"] == []
        finally:
            client.close()

    def test_dismiss_conflict_on_terminal(self, cloud):
        client = DeviceClient(cloud)
        try:
            register(client)
            upload_alert(client)
            client.recv_until(lambda m: m.type is MessageType.VERDICT)
            deadline = time.monotonic() + 5
            while time.monotonic() < deadline:
                status, body = api(cloud, "GET", "/alerts")
                if body["alerts"] and body["alerts"][0]["state"] == "notified":
                    break
                time.sleep(0.02)
            alert_id = body["alerts"][0]["alert_id"]
            status, body = api(cloud, "POST", "/alerts/%s/dismiss" % alert_id)
            assert status == 409
            status, body = api(cloud, "POST", "/alerts/missing/dismiss")
            assert status == 404
        finally:
            client.close()

    def test_dismiss_pending_alert(self, cloud):
        slow = LiveCloud(verifier=StubVerifier(0.9), verify_latency_ms=10_000)
        slow.start()
        client = DeviceClient(slow)
        try:
            register(client)
            upload_alert(client)
            status, body = api(slow, "GET", "/alerts")
            alert_id = body["alerts"][0]["alert_id"]
            status, dismissed = api(slow, "POST", "/alerts/%s/dismiss" % alert_id)
            assert status == 200 and dismissed["state"] == "dismissed"
        finally:
            client.close()
            slow.stop()

    def test_config_patch_validation_and_push(self, cloud):
        client = DeviceClient(cloud)
        try:
            register(client)
            good = DeviceConfig().to_json()
            good["thresholds"]["gun"] = 1.2
            status, body = api(cloud, "PATCH", "/devices/cam-live/config", body=good)
            assert status == 200 and body["version"] == 2
            push = client.recv_until(lambda m: m.type is MessageType.CONFIG_UPDATE)
            assert json.loads(push.payload)["thresholds"]["gun"] == 1.2

            bad = DeviceConfig().to_json()
            bad["k"] = 1.5
            status, body = api(cloud, "PATCH", "/devices/cam-live/config", body=bad)
            assert status == 422
            assert "k out of (0,1)" in body["errors"]

            status, _ = api(cloud, "PATCH", "/devices/missing/config", body=good)
            assert status == 404
        finally:
            client.close()

    def test_unknown_route_404(self, cloud):
        status, body = api(cloud, "GET", "/nope")
        assert status == 404


class TestSse:
    def test_alert_event_streams_to_subscriber(self, cloud):
        conn = http.client.HTTPConnection("127.0.0.1", cloud.console_port, timeout=10)
        conn.request("GET", "/events")
        response = conn.getresponse()
        assert response.getheader("Content-Type").startswith("text/event-stream")

        received = {}
        ready = threading.Event()

        def reader():
            event_name = None
            while True:
                line = response.fp.readline()
                if not line:
                    return
                line = line.decode().rstrip("\n")
                if line.startswith("event: "):
                    event_name = line[len("event: "):]
                elif line.startswith("data: ") and event_name == "alert":
                    received["alert"] = json.loads(line[len("data: "):])
                    ready.set()
                    return

        thread = threading.Thread(target=reader, daemon=True)
        thread.start()
        time.sleep(0.1)  # let the subscription land before the alert fires

        client = DeviceClient(cloud)
        try:
            register(client)
            upload_alert(client, seq=77)
            assert ready.wait(timeout=5), "alert event never arrived on the SSE stream"
            assert received["alert"]["trigger_seq"] == 77
        finally:
            client.close()
            conn.close()
