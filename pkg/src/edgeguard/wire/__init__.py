from edgeguard.wire.envelope import (
    MAX_PAYLOAD,
    RETRY_DELAYS_MS,
    BadJson,
    LengthMismatch,
    Message,
    MessageType,
    OversizePayload,
    ProtocolError,
    StreamDecoder,
    Truncated,
    UnknownType,
    decode,
    encode,
)
from edgeguard.wire.gifcodec import DimensionMismatch, Malformed, decode_gif, encode_gif

__all__ = [
    "MAX_PAYLOAD",
    "RETRY_DELAYS_MS",
    "BadJson",
    "LengthMismatch",
    "Message",
    "MessageType",
    "OversizePayload",
    "ProtocolError",
    "StreamDecoder",
    "Truncated",
    "UnknownType",
    "decode",
    "encode",
    "DimensionMismatch",
    "Malformed",
    "decode_gif",
    "encode_gif",
]
