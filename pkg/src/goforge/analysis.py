"""JSON-lines analysis protocol client.

One request and one response per line, correlated by id, so sessions may
pipeline a bounded number of requests.  Wire schema (the tested contract;
adapters may translate a real engine's native schema into this one):

    request:  {"id": str, "moves": [["X"|"O", coord], ...],
               "boardSize": int, "komi": number, "maxCandidates": int}
    response: {"id": str, "toPlay": "X"|"O",
               "moveInfos": [{"move": coord, "winrate": number, "pv": [coord]}]}
    rejection: {"id": str, "error": str}

Winrates travel as fractions in [0,1] from the perspective of the side to
move; "pass" is the pass coordinate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from .board import Color, Point, format_coord, parse_coord
from .records import GameRecord
from .transport import (
    EngineError,
    EngineTimeoutError,
    IllegalPositionRejectedError,
    ProtocolError,
)

DEFAULT_ANALYSIS_TIMEOUT = 60.0
MAX_CANDIDATES = 10


@dataclass(frozen=True)
class Candidate:
    """One engine suggestion: the move, its winrate for the side to move,
    the projected continuation, and its 1-based rank."""

    move: Optional[Point]  # None = pass
    winrate: float
    pv: Tuple[Optional[Point], ...] = ()
    rank: int = 1

    def coord(self, size: int = 19) -> str:
        return "pass" if self.move is None else format_coord(self.move, size)


@dataclass(frozen=True)
class CandidateList:
    """Ranked engine candidates; rank 1 holds the best winrate."""

    to_play: Color
    candidates: Tuple[Candidate, ...]

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("candidate list must not be empty")
        for i, cand in enumerate(self.candidates, start=1):
            if cand.rank != i:
                raise ValueError(f"candidate {i} has rank {cand.rank}; ranks must be 1..K")
            if not 0.0 <= cand.winrate <= 1.0:
                raise ValueError(f"winrate {cand.winrate} outside [0,1]")
            if i > 1 and cand.winrate > self.candidates[i - 2].winrate:
                raise ValueError("winrates must be non-increasing in rank")

    @property
    def best_winrate(self) -> float:
        return self.candidates[0].winrate

    @property
    def best(self) -> Candidate:
        return self.candidates[0]

    @classmethod
    def from_raw(cls, to_play: Color, raw: Sequence[Tuple[Optional[Point], float, Sequence]]):
        """Build from possibly unsorted (move, winrate, pv) triples: winrates
        are clamped into [0,1], sorted non-increasing (stable, so reported
        order breaks ties), and ranks assigned 1..K."""
        clamped = [
            (move, min(1.0, max(0.0, float(winrate))), tuple(pv)) for move, winrate, pv in raw
        ]
        ordered = sorted(clamped, key=lambda item: -item[1])
        return cls(
            to_play,
            tuple(
                Candidate(move, winrate, pv, rank)
                for rank, (move, winrate, pv) in enumerate(ordered, start=1)
            ),
        )


def parse_vertex(text: str, size: int) -> Optional[Point]:
    """Coordinate text or "pass" (case-insensitive) to a Point-or-None."""
    if text.strip().lower() == "pass":
        return None
    return parse_coord(text.strip(), size)


def format_vertex(point: Optional[Point], size: int) -> str:
    return "pass" if point is None else format_coord(point, size)


def encode_request(request_id: str, position: GameRecord, top_k: int) -> str:
    moves = [
        [m.color.value, format_vertex(m.point, position.size)] for m in position.moves
    ]
    return json.dumps(
        {
            "id": request_id,
            "moves": moves,
            "boardSize": position.size,
            "komi": position.komi,
            "maxCandidates": top_k,
        }
    )


def decode_response(line: str, size: int):
    """Parse one response line into (id, CandidateList).

    Raises ProtocolError carrying the raw line on any malformation, and
    IllegalPositionRejectedError for an engine-reported rejection.
    """
    try:
        obj = json.loads(line)
    except json.JSONDecodeError:
        raise ProtocolError("response is not valid JSON", raw_line=line) from None
    if not isinstance(obj, dict) or not isinstance(obj.get("id"), str):
        raise ProtocolError("response lacks a string id", raw_line=line)
    if "error" in obj:
        raise IllegalPositionRejectedError(str(obj["error"]))
    try:
        to_play = Color(obj["toPlay"])
        raw = [
            (parse_vertex(info["move"], size), info["winrate"],
             [parse_vertex(v, size) for v in info.get("pv", [])])
            for info in obj["moveInfos"]
        ]
        if not raw:
            raise ValueError("empty moveInfos")
        candidates = CandidateList.from_raw(to_play, raw)
    except (KeyError, TypeError, ValueError) as err:
        raise ProtocolError(f"malformed response: {err}", raw_line=line) from None
    return obj["id"], candidates


class AnalysisSession:
    """Owns one analysis engine over a line transport.

    Requests are correlated by id; ``analyze_many`` keeps at most
    ``max_in_flight`` requests unanswered at any instant.  Responses with
    unknown or duplicate ids are rejected with ProtocolError, never
    mis-attributed.
    """

    def __init__(self, transport, *, timeout: float = DEFAULT_ANALYSIS_TIMEOUT,
                 max_in_flight: int = 8):
        if max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        self._transport = transport
        self.timeout = timeout
        self.max_in_flight = max_in_flight
        self._counter = 0

    def _next_id(self) -> str:
        self._counter += 1
        return f"q{self._counter}"

    def analyze(self, position: GameRecord, top_k: int = MAX_CANDIDATES) -> CandidateList:
        """Analyze one position, returning ranked candidates."""
        return self.analyze_many([position], top_k)[0]

    def analyze_many(self, positions: Sequence[GameRecord], top_k: int = MAX_CANDIDATES):
        """Analyze positions with bounded pipelining, preserving input order."""
        if not 1 <= top_k <= MAX_CANDIDATES:
            raise ValueError(f"top_k must be in 1..{MAX_CANDIDATES}")
        positions = list(positions)
        results: List[Optional[CandidateList]] = [None] * len(positions)
        pending = {}
        next_to_send = 0
        completed = 0
        while completed < len(positions):
            while next_to_send < len(positions) and len(pending) < self.max_in_flight:
                request_id = self._next_id()
                position = positions[next_to_send]
                self._transport.send_line(encode_request(request_id, position, top_k))
                pending[request_id] = (next_to_send, position.size)
                next_to_send += 1
            line = self._transport.recv_line(self.timeout)
            # Decode with the board size of any pending request (sizes agree
            # within one session); id routing below is authoritative.
            size = next(iter(pending.values()))[1] if pending else 19
            response_id, candidates = decode_response(line, size)
            if response_id not in pending:
                raise ProtocolError(
                    f"response id {response_id!r} is unknown or already answered",
                    raw_line=line,
                )
            index, _ = pending.pop(response_id)
            results[index] = candidates
            completed += 1
        return results

    def close(self):
        self._transport.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False
