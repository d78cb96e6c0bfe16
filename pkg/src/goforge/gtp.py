"""GTP (Go Text Protocol) client for gameplay engines.

Only the subset needed to run games is in contract: protocol_version, name,
boardsize, komi, clear_board, play, genmove, quit.  The channel is strictly
serialized: one command, then its full response, never interleaved.
"""

from __future__ import annotations

from typing import Optional, Union

from .board import Color, Move, Point
from .analysis import format_vertex, parse_vertex
from .transport import EngineError, ProtocolError

DEFAULT_GENMOVE_TIMEOUT = 300.0


class GtpFailureError(EngineError):
    """The engine answered a command with a '?' failure response."""


class Resignation:
    """Distinguished genmove outcome for an engine that resigns."""

    def __repr__(self):
        return "RESIGN"


RESIGN = Resignation()

_COLOR_WORDS = {Color.BLACK: "black", Color.WHITE: "white"}


class GtpClient:
    """Synchronous GTP session over a line transport."""

    def __init__(self, transport, *, board_size: int = 19,
                 timeout: float = DEFAULT_GENMOVE_TIMEOUT):
        self._transport = transport
        self.board_size = board_size
        self.timeout = timeout

    def command(self, text: str) -> str:
        """Send one command and return the '=' payload.

        Every command in the supported subset answers with a single response
        line (blank terminator lines are skipped).  Raises GtpFailureError
        with the engine's message on '?' responses and ProtocolError on
        anything that is not a GTP response.
        """
        self._transport.send_line(text)
        while True:
            payload = self._transport.recv_line(self.timeout).strip()
            if payload:
                break
        if payload.startswith("="):
            return payload[1:].lstrip()
        if payload.startswith("?"):
            raise GtpFailureError(payload[1:].strip())
        raise ProtocolError("response has neither '=' nor '?' status", raw_line=payload)

    # -- the supported subset ------------------------------------------------

    def protocol_version(self) -> str:
        return self.command("protocol_version")

    def name(self) -> str:
        return self.command("name")

    def boardsize(self, size: int):
        self.command(f"boardsize {size}")
        self.board_size = size

    def komi(self, value: float):
        self.command(f"komi {value}")

    def clear_board(self):
        self.command("clear_board")

    def play(self, move: Move):
        vertex = format_vertex(move.point, self.board_size)
        self.command(f"play {_COLOR_WORDS[move.color]} {vertex}")

    def genmove(self, color: Color) -> Union[Move, Resignation]:
        """Ask the engine for a move; 'resign' surfaces as RESIGN."""
        reply = self.command(f"genmove {_COLOR_WORDS[color]}").strip()
        if reply.lower() == "resign":
            return RESIGN
        try:
            point = parse_vertex(reply, self.board_size)
        except Exception:
            raise ProtocolError(f"unparseable genmove vertex {reply!r}", raw_line=reply) from None
        return Move(color, point)

    def quit(self):
        try:
            self.command("quit")
        finally:
            self._transport.close()

    def close(self):
        self._transport.close()
