"""Framed application protocol between devices and the cloud.

Wire format, transport-agnostic:

    [u32 big-endian header length][header JSON, UTF-8][payload bytes]

The header is a single JSON object with keys emitted in lexicographic
order and compact separators, so encodings are byte-stable:

    {"device_id": ..., "meta": {...}, "msg_id": ..., "payload_len": N,
     "sent_at": ..., "type": ...}

``meta`` carries per-type extras (e.g. trigger info on ALERT, the verdict
on VERDICT, the acked id on ACK) and is omitted when empty. ALERT is the
only type with a binary payload (the GIF clip) besides CONFIG_UPDATE
(device config JSON); all others are payload-free.

Unacknowledged ALERTs are retried on RETRY_DELAYS_MS: exponential backoff
from 500 ms doubling to an 8 s cap, at most six retries after the first
send. The cloud deduplicates by (device_id, msg_id).
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, List, Optional

MAX_PAYLOAD = 64 * 1024 * 1024
_HEADER_LEN = struct.Struct(">I")

RETRY_DELAYS_MS = (500, 1000, 2000, 4000, 8000, 8000)


class ProtocolError(Exception):
    pass


class OversizePayload(ProtocolError):
    pass


class Truncated(ProtocolError):
    pass


class BadJson(ProtocolError):
    pass


class LengthMismatch(ProtocolError):
    pass


class UnknownType(ProtocolError):
    pass


class MessageType(Enum):
    REGISTER = "REGISTER"
    REGISTER_ACK = "REGISTER_ACK"
    HEARTBEAT = "HEARTBEAT"
    ALERT = "ALERT"
    VERDICT = "VERDICT"
    CONFIG_UPDATE = "CONFIG_UPDATE"
    ACK = "ACK"
    ERROR = "ERROR"


@dataclass(frozen=True)
class Message:
    type: MessageType
    msg_id: str
    device_id: str
    sent_at: int
    payload: bytes = b""
    meta: dict = field(default_factory=dict)


def encode(msg: Message) -> bytes:
    if len(msg.payload) > MAX_PAYLOAD:
        raise OversizePayload("payload of %d bytes exceeds %d" % (len(msg.payload), MAX_PAYLOAD))
    header = {
        "device_id": msg.device_id,
        "msg_id": msg.msg_id,
        "payload_len": len(msg.payload),
        "sent_at": msg.sent_at,
        "type": msg.type.value,
    }
    if msg.meta:
        header["meta"] = msg.meta
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return _HEADER_LEN.pack(len(header_bytes)) + header_bytes + msg.payload


def _parse_header(header_bytes: bytes) -> dict:
    try:
        header = json.loads(header_bytes.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise BadJson("header is not valid JSON: %s" % exc) from exc
    if not isinstance(header, dict):
        raise BadJson("header must be a JSON object, got %s" % type(header).__name__)
    for key, kinds in (
        ("type", str),
        ("msg_id", str),
        ("device_id", str),
        ("sent_at", int),
        ("payload_len", int),
    ):
        if key not in header:
            raise BadJson("header missing %r" % key)
        if not isinstance(header[key], kinds) or isinstance(header[key], bool):
            raise BadJson("header field %r has wrong type" % key)
    meta = header.get("meta", {})
    if not isinstance(meta, dict):
        raise BadJson("meta must be an object")
    if header["payload_len"] < 0 or header["payload_len"] > MAX_PAYLOAD:
        raise LengthMismatch("declared payload_len %d out of range" % header["payload_len"])
    return header


def _to_message(header: dict, payload: bytes) -> Message:
    try:
        mtype = MessageType(header["type"])
    except ValueError:
        raise UnknownType("unknown message type %r" % header["type"]) from None
    return Message(
        type=mtype,
        msg_id=header["msg_id"],
        device_id=header["device_id"],
        sent_at=header["sent_at"],
        payload=payload,
        meta=header.get("meta", {}),
    )


def decode(data: bytes) -> Message:
    """Strictly parse exactly one message; trailing bytes are an error."""
    if len(data) < 4:
        raise Truncated("need 4 header-length bytes, have %d" % len(data))
    (header_len,) = _HEADER_LEN.unpack_from(data)
    if 4 + header_len > len(data):
        raise Truncated("header of %d bytes exceeds buffer" % header_len)
    header = _parse_header(data[4 : 4 + header_len])
    rest = data[4 + header_len :]
    if len(rest) < header["payload_len"]:
        raise Truncated(
            "payload needs %d bytes, have %d" % (header["payload_len"], len(rest))
        )
    if len(rest) > header["payload_len"]:
        raise LengthMismatch(
            "%d trailing bytes after payload" % (len(rest) - header["payload_len"])
        )
    return _to_message(header, rest)


class StreamDecoder:
    """Incremental reader: feed arbitrary chunks, get complete messages.

    Reconstructs the same message sequence whether fed one byte at a time
    or whole buffers. Errors are sticky: a malformed header poisons the
    stream since resynchronization is impossible.
    """

    def __init__(self):
        self._buf = bytearray()
        self._header: Optional[dict] = None
        self._header_len: Optional[int] = None

    def feed(self, chunk: bytes) -> List[Message]:
        self._buf.extend(chunk)
        out = []
        while True:
            msg = self._try_extract()
            if msg is None:
                return out
            out.append(msg)

    def _try_extract(self) -> Optional[Message]:
        if self._header_len is None:
            if len(self._buf) < 4:
                return None
            (self._header_len,) = _HEADER_LEN.unpack_from(bytes(self._buf[:4]))
        if self._header is None:
            if len(self._buf) < 4 + self._header_len:
                return None
            self._header = _parse_header(bytes(self._buf[4 : 4 + self._header_len]))
        total = 4 + self._header_len + self._header["payload_len"]
        if len(self._buf) < total:
            return None
        payload = bytes(self._buf[4 + self._header_len : total])
        msg = _to_message(self._header, payload)
        del self._buf[:total]
        self._header = None
        self._header_len = None
        return msg


def iter_messages(data: bytes) -> Iterator[Message]:
    """Parse a buffer holding zero or more back-to-back messages."""
    decoder = StreamDecoder()
    for msg in decoder.feed(data):
        yield msg
    if decoder._buf:
        raise Truncated("%d leftover bytes at end of stream" % len(decoder._buf))
