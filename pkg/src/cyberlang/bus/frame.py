"""Length-prefixed wire frames.

Layout (big-endian)::

    0      4        5          6            10
    | CYBL | version | msg_type | payload_len | payload (UTF-8) ...

Header fields are checked as soon as their bytes arrive, so a bad magic,
version or type is rejected before the payload is buffered.
"""

from __future__ import annotations

import struct
from enum import IntEnum
from typing import NamedTuple, Union

from ..errors import BadMagic, FrameError, OversizePayload, UnknownMessageType, UnsupportedVersion

MAGIC = b"CYBL"
VERSION = 1
HEADER = struct.Struct(">4sBBI")
HEADER_SIZE = HEADER.size  # 10
MAX_PAYLOAD = 16 * 1024 * 1024


class MsgType(IntEnum):
    STATEMENT = 0x01
    DELIVERY = 0x02
    CONTEXT_UPDATE = 0x03
    AMBIGUITY_REPORT = 0x10
    EXPLICITATION_REQUEST = 0x11
    EXPLICITATION_RESPONSE = 0x12
    META_MARKER = 0x13
    PROPOSAL = 0x14
    ACCEPT = 0x15
    REJECT = 0x16
    ERROR = 0x7F


_KNOWN = frozenset(int(t) for t in MsgType)


class Frame(NamedTuple):
    msg_type: int
    payload: str


class _NeedMore:
    __slots__ = ()

    def __repr__(self):
        return "NEED_MORE"

    def __bool__(self):
        return False


NEED_MORE = _NeedMore()


def encode_frame(msg_type: int, payload: Union[str, bytes]) -> bytes:
    if int(msg_type) not in _KNOWN:
        raise UnknownMessageType(f"unknown message type 0x{int(msg_type):02x}")
    if isinstance(payload, str):
        body = payload.encode("utf-8")
    else:
        body = bytes(payload)
        try:
            body.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FrameError(f"payload is not UTF-8: {exc}") from None
    if len(body) > MAX_PAYLOAD:
        raise OversizePayload(f"payload of {len(body)} bytes exceeds {MAX_PAYLOAD}")
    return HEADER.pack(MAGIC, VERSION, int(msg_type), len(body)) + body


def _check_header(buf) -> Union[int, _NeedMore]:
    """Validate whatever header bytes are present; payload length once all ten are in."""
    n = len(buf)
    head = bytes(buf[:4])
    if head != MAGIC[:len(head)]:
        raise BadMagic(f"bad magic {head!r}")
    if n >= 5 and buf[4] != VERSION:
        raise UnsupportedVersion(f"unsupported frame version {buf[4]}")
    if n >= 6 and buf[5] not in _KNOWN:
        raise UnknownMessageType(f"unknown message type 0x{buf[5]:02x}")
    if n < HEADER_SIZE:
        return NEED_MORE
    length = int.from_bytes(buf[6:10], "big")
    if length > MAX_PAYLOAD:
        raise OversizePayload(f"declared payload of {length} bytes exceeds {MAX_PAYLOAD}")
    return length


def split_frame(buf) -> Union[tuple[Frame, int], _NeedMore]:
    """First complete frame in ``buf`` and the number of bytes it used."""
    length = _check_header(buf)
    if length is NEED_MORE:
        return NEED_MORE
    end = HEADER_SIZE + length
    if len(buf) < end:
        return NEED_MORE
    try:
        text = bytes(buf[HEADER_SIZE:end]).decode("utf-8")
    except UnicodeDecodeError as exc:
        raise FrameError(f"payload is not UTF-8: {exc}") from None
    return Frame(buf[5], text), end


def decode_frame(data) -> Union[Frame, _NeedMore]:
    """Decode exactly one frame; truncated input yields ``NEED_MORE``."""
    got = split_frame(data)
    if got is NEED_MORE:
        return NEED_MORE
    frame, used = got
    if used != len(data):
        raise FrameError(f"{len(data) - used} trailing bytes after frame")
    return frame


class FrameDecoder:
    """Incremental decoder for a byte stream."""

    def __init__(self):
        self._buf = bytearray()

    def feed(self, data: bytes) -> list[Frame]:
        self._buf.extend(data)
        frames = []
        while True:
            got = split_frame(self._buf)
            if got is NEED_MORE:
                return frames
            frame, used = got
            del self._buf[:used]
            frames.append(frame)

    @property
    def buffered(self) -> int:
        return len(self._buf)
