"""TCP front end for a broker.

Requests and replies are frames:

* ``STATEMENT`` ``{"publisher": id, "statement": fdsg-text}`` is answered by
  one ``DELIVERY`` frame holding the delivery report, or ``ERROR``.
* ``CONTEXT_UPDATE`` (context file JSON) replaces the broker context and is
  acknowledged with a ``CONTEXT_UPDATE`` frame ``{"ok": true, "timestamp": n}``.

Requests from all connections pass through one lock, so the broker sees a
single total order of events.
"""

from __future__ import annotations

import asyncio
import json
import logging
import signal
from typing import Optional

from ..canonical import canonical_json
from ..errors import CyberlangError, FrameError, IoFailure, ParseError
from ..fdsg.parser import parse
from ..semantics.context import ContextSnapshot
from .broker import Broker
from .frame import Frame, FrameDecoder, MsgType, encode_frame

log = logging.getLogger("cyberlang.server")


def parse_addr(addr: str) -> tuple[str, int]:
    host, sep, port = addr.rpartition(":")
    if not sep or not port.isdigit():
        raise ValueError(f"address must look like host:port, got {addr!r}")
    return host or "127.0.0.1", int(port)


def _error(code: str, message: str) -> bytes:
    return encode_frame(MsgType.ERROR, canonical_json({"error": code, "message": message}))


class BrokerServer:
    def __init__(self, broker: Broker, corpus_path: Optional[str] = None):
        self.broker = broker
        self.corpus_path = corpus_path
        self._lock = asyncio.Lock()
        self._server: Optional[asyncio.base_events.Server] = None
        self._tick = 0

    def handle_frame(self, frame: Frame) -> bytes:
        try:
            if frame.msg_type == MsgType.STATEMENT:
                req = json.loads(frame.payload)
                stmt = parse(req["statement"], ids=self.broker.ids)
                self._tick += 1
                report = self.broker.publish(req["publisher"], stmt, tick=self._tick)
                if self.corpus_path:
                    with open(self.corpus_path, "a", encoding="utf-8", newline="\n") as fh:
                        fh.write(report.record.to_line() + "\n")
                return encode_frame(MsgType.DELIVERY, canonical_json(report.to_dict()))
            if frame.msg_type == MsgType.CONTEXT_UPDATE:
                ctx = ContextSnapshot.from_dict(json.loads(frame.payload))
                self.broker.update_context(ctx)
                return encode_frame(MsgType.CONTEXT_UPDATE, canonical_json({"ok": True, "timestamp": ctx.timestamp}))
            return _error("UnsupportedRequest", f"message type 0x{frame.msg_type:02x} is not a request")
        except ParseError as exc:
            return _error(exc.code, "; ".join(map(str, exc.diagnostics)))
        except CyberlangError as exc:
            return _error(exc.code, str(exc))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            return _error("BadRequest", str(exc))

    async def _client(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        peer = writer.get_extra_info("peername")
        log.info("connection from %s", peer)
        decoder = FrameDecoder()
        try:
            while data := await reader.read(65536):
                try:
                    frames = decoder.feed(data)
                except FrameError as exc:
                    writer.write(_error(exc.code, str(exc)))
                    await writer.drain()
                    break
                for frame in frames:
                    async with self._lock:
                        reply = self.handle_frame(frame)
                    writer.write(reply)
                    await writer.drain()
        except ConnectionError:
            pass
        finally:
            writer.close()
            log.info("connection from %s closed", peer)

    async def start(self, host: str, port: int):
        try:
            self._server = await asyncio.start_server(self._client, host, port)
        except OSError as exc:
            raise IoFailure(f"cannot listen on {host}:{port}: {exc}") from None
        sock = self._server.sockets[0].getsockname()
        log.info("listening on %s:%s", sock[0], sock[1])
        return sock

    async def serve_until_stopped(self, host: str, port: int, ready=None):
        await self.start(host, port)
        stop = asyncio.Event()
        loop = asyncio.get_running_loop()
        for sig in (signal.SIGINT, signal.SIGTERM):
            try:
                loop.add_signal_handler(sig, stop.set)
            except (NotImplementedError, RuntimeError):
                pass
        if ready is not None:
            ready(self)
        self._stop = stop
        await stop.wait()
        await self.close()

    def request_stop(self):
        if getattr(self, "_stop", None) is not None:
            self._stop.set()

    async def close(self):
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
            self._server = None
            log.info("server stopped")


async def send_request(host: str, port: int, msg_type: int, payload: str) -> Frame:
    """Open a connection, send one frame and wait for the single reply."""
    reader, writer = await asyncio.open_connection(host, port)
    try:
        writer.write(encode_frame(msg_type, payload))
        await writer.drain()
        decoder = FrameDecoder()
        while True:
            data = await reader.read(65536)
            if not data:
                raise ConnectionError("server closed the connection before replying")
            frames = decoder.feed(data)
            if frames:
                return frames[0]
    finally:
        writer.close()
