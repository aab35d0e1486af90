"""Animated GIF89a codec for grayscale clips.

The encoder writes one image block per frame over a 256-entry grayscale
palette whose index i maps to color (i,i,i), so pixel intensities survive
the palette round trip exactly. Output carries a NETSCAPE2.0 loop
extension and plain LZW-compressed image data that standard viewers
decode. The companion decoder reads anything this encoder produces (and
acts as its test oracle).

LZW follows the GIF conventions: codes packed least-significant-bit
first, initial code width min_code_size + 1, width grows when the next
free code would no longer fit, table capped at 4096 entries with an
explicit clear-and-reset when full.
"""

from __future__ import annotations

import struct
from typing import List, Tuple

from edgeguard.core.types import Frame

_GCE_LABEL = 0xF9
_EXT_INTRODUCER = 0x21
_IMAGE_SEPARATOR = 0x2C
_TRAILER = 0x3B
_MIN_CODE_SIZE = 8  # 256-entry palette
_MAX_CODE = 1 << 12


class DimensionMismatch(Exception):
    pass


class Malformed(Exception):
    pass


def _lzw_compress(data: bytes, min_code_size: int = _MIN_CODE_SIZE) -> bytes:
    clear = 1 << min_code_size
    eoi = clear + 1
    width = min_code_size + 1
    next_code = eoi + 1
    table = {}
    out = bytearray()
    acc = 0
    nbits = 0

    def emit(code: int, w: int) -> None:
        nonlocal acc, nbits
        acc |= code << nbits
        nbits += w
        while nbits >= 8:
            out.append(acc & 0xFF)
            acc >>= 8
            nbits -= 8

    emit(clear, width)
    prefix = -1
    for byte in data:
        if prefix < 0:
            prefix = byte
            continue
        key = (prefix << 8) | byte
        code = table.get(key)
        if code is not None:
            prefix = code
            continue
        emit(prefix, width)
        if next_code < _MAX_CODE:
            table[key] = next_code
            next_code += 1
            # widen once the just-assigned code no longer fits
            if next_code == (1 << width) + 1 and width < 12:
                width += 1
        else:
            emit(clear, width)
            table = {}
            next_code = eoi + 1
            width = min_code_size + 1
        prefix = byte
    if prefix >= 0:
        emit(prefix, width)
    emit(eoi, width)
    if nbits:
        out.append(acc & 0xFF)
    return bytes(out)


def _lzw_decompress(data: bytes, min_code_size: int = _MIN_CODE_SIZE) -> bytes:
    clear = 1 << min_code_size
    eoi = clear + 1
    width = min_code_size + 1
    next_code = eoi + 1
    # entries as (previous code, final byte); -1 terminates the chain
    table: List[Tuple[int, int]] = [(-1, i) for i in range(clear)] + [(-1, -1), (-1, -1)]
    out = bytearray()
    acc = 0
    nbits = 0
    pos = 0
    prev = -1
    scratch = bytearray()

    while True:
        while nbits < width:
            if pos >= len(data):
                raise Malformed("LZW stream ended without end-of-information")
            acc |= data[pos] << nbits
            nbits += 8
            pos += 1
        code = acc & ((1 << width) - 1)
        acc >>= width
        nbits -= width

        if code == clear:
            table = table[: eoi + 1]
            next_code = eoi + 1
            width = min_code_size + 1
            prev = -1
            continue
        if code == eoi:
            return bytes(out)
        if code > next_code or (code == next_code and prev < 0):
            raise Malformed("LZW code %d out of range" % code)

        if prev >= 0 and next_code < _MAX_CODE:
            # suffix byte is the first byte of this code's expansion
            walk = prev if code == next_code else code
            while table[walk][0] != -1:
                walk = table[walk][0]
            table.append((prev, table[walk][1]))
            next_code += 1
            if next_code == (1 << width) and width < 12:
                width += 1

        scratch.clear()
        walk = code
        while walk != -1:
            prev_code, byte = table[walk]
            scratch.append(byte)
            walk = prev_code
        scratch.reverse()
        out.extend(scratch)
        prev = code


def _grayscale_palette() -> bytes:
    return bytes(v for i in range(256) for v in (i, i, i))


def _sub_blocks(data: bytes) -> bytes:
    out = bytearray()
    for start in range(0, len(data), 255):
        chunk = data[start : start + 255]
        out.append(len(chunk))
        out.extend(chunk)
    out.append(0)
    return bytes(out)


def encode_gif(frames, delay_cs: int = 7, loop: int = 0) -> bytes:
    """Encode same-sized grayscale frames as an animated GIF89a.

    delay_cs is the per-frame delay in centiseconds; loop 0 repeats
    forever.
    """
    frames = list(frames)
    if not frames:
        raise DimensionMismatch("no frames to encode")
    width, height = frames[0].width, frames[0].height
    for f in frames:
        if (f.width, f.height) != (width, height):
            raise DimensionMismatch(
                "frame %dx%d differs from first frame %dx%d"
                % (f.width, f.height, width, height)
            )

    out = bytearray()
    out += b"GIF89a"
    # logical screen descriptor: GCT present, 8 bits/channel, 256 entries
    out += struct.pack("<HHBBB", width, height, 0xF7, 0, 0)
    out += _grayscale_palette()
    # NETSCAPE2.0 looping extension
    out += bytes([_EXT_INTRODUCER, 0xFF, 11]) + b"NETSCAPE2.0"
    out += bytes([3, 1]) + struct.pack("<H", loop) + bytes([0])
    for f in frames:
        out += bytes([_EXT_INTRODUCER, _GCE_LABEL, 4, 0])
        out += struct.pack("<H", delay_cs)
        out += bytes([0, 0])  # no transparency; block terminator
        out += bytes([_IMAGE_SEPARATOR])
        out += struct.pack("<HHHH", 0, 0, width, height)
        out += bytes([0])  # no local color table, not interlaced
        out += bytes([_MIN_CODE_SIZE])
        out += _sub_blocks(_lzw_compress(f.pixels))
    out.append(_TRAILER)
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def read(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise Malformed("truncated stream at byte %d" % self.pos)
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    def u8(self) -> int:
        return self.read(1)[0]

    def u16(self) -> int:
        return struct.unpack("<H", self.read(2))[0]

    def sub_blocks(self) -> bytes:
        out = bytearray()
        size = self.u8()
        while size:
            out += self.read(size)
            size = self.u8()
        return bytes(out)


def decode_gif(data: bytes) -> List[Frame]:
    """Decode an animated grayscale GIF back into frames.

    Pixel values come from the red channel of the palette, which for
    this system's GIFs is the original intensity. Frames get sequential
    seq numbers and timestamps derived from the encoded delays.
    """
    r = _Reader(data)
    if r.read(6) not in (b"GIF89a", b"GIF87a"):
        raise Malformed("bad GIF signature")
    width = r.u16()
    height = r.u16()
    packed = r.u8()
    r.read(2)  # background color index, aspect ratio
    gct = b""
    if packed & 0x80:
        gct = r.read(3 * (2 << (packed & 0x07)))

    frames: List[Frame] = []
    delay_cs = 0
    t_ms = 0
    while True:
        block = r.u8()
        if block == _TRAILER:
            break
        if block == _EXT_INTRODUCER:
            label = r.u8()
            if label == _GCE_LABEL:
                size = r.u8()
                if size != 4:
                    raise Malformed("graphic control block of size %d" % size)
                r.u8()
                delay_cs = r.u16()
                r.u8()
                if r.u8() != 0:
                    raise Malformed("unterminated graphic control block")
            else:
                r.sub_blocks()  # application/comment/text: skip
        elif block == _IMAGE_SEPARATOR:
            left, top = r.u16(), r.u16()
            img_w, img_h = r.u16(), r.u16()
            img_packed = r.u8()
            if (left, top) != (0, 0) or (img_w, img_h) != (width, height):
                raise Malformed("image block does not cover the full screen")
            if img_packed & 0x40:
                raise Malformed("interlaced images unsupported")
            palette = gct
            if img_packed & 0x80:
                palette = r.read(3 * (2 << (img_packed & 0x07)))
            if not palette:
                raise Malformed("image block without a color table")
            min_code = r.u8()
            if not 2 <= min_code <= 8:
                raise Malformed("LZW minimum code size %d" % min_code)
            indices = _lzw_decompress(r.sub_blocks(), min_code)
            if len(indices) != width * height:
                raise Malformed(
                    "decoded %d pixels for a %dx%d image" % (len(indices), width, height)
                )
            gray = bytes(palette[3 * i] for i in indices)
            frames.append(
                Frame(width=width, height=height, pixels=gray, timestamp=t_ms, seq=len(frames))
            )
            t_ms += delay_cs * 10 if delay_cs else 10
        else:
            raise Malformed("unknown block 0x%02X" % block)
    if r.pos != len(r.data):
        raise Malformed("%d trailing bytes after trailer" % (len(r.data) - r.pos))
    if not frames:
        raise Malformed("no image blocks")
    return frames
