"""Deterministic in-process mock engines for tests and desk-scale runs.

The analysis mock answers the JSON protocol with candidates derived purely
from (seed, position), so identical queries always get identical answers.
Fault schedules inject protocol failures at chosen call indices.  The GTP
mocks play through a policy over a real internal board; the epsilon-greedy
family shares one heuristic scoring table so a smaller epsilon means a
strictly greedier, stronger player.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from .board import (
    ARENA_RULES,
    Board,
    Color,
    GoError,
    LegalityConfig,
    Move,
    Point,
    parse_coord,
)
from .analysis import CandidateList, format_vertex
from .records import GameRecord
from .reward import quantize_winrate
from .transport import InProcessTransport

# Fault kinds for the analysis mock schedule.
DROP = "drop"          # no reply: the session times out
GARBLE = "garble"      # reply is not valid JSON
DELAY = "delay"        # reply held back until the next request (reorders)
WRONG_ID = "wrong_id"  # reply carries an id that was never issued
DUPLICATE = "duplicate"  # reply delivered twice

FAULT_KINDS = (DROP, GARBLE, DELAY, WRONG_ID, DUPLICATE)


def _position_rng(seed: int, moves_key: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}|{moves_key}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


class MockAnalysisEngine:
    """Seeded lookup-style analysis engine behind the JSON wire protocol.

    Candidates for a position are a deterministic function of (seed, moves):
    legal moves are sampled and given non-increasing winrates quantized to
    the template's printed precision, so synthesized responses round-trip
    exactly.  ``faults`` maps 0-based request indices to a fault kind.
    """

    def __init__(self, seed: int = 0, *, max_candidates: int = 10,
                 pv_plies: int = 9, faults: Optional[Dict[int, str]] = None):
        self.seed = seed
        self.max_candidates = max_candidates
        self.pv_plies = pv_plies
        self.faults = dict(faults or {})
        self.calls = 0
        self._held: List[str] = []

    def transport(self) -> InProcessTransport:
        return self._transport_for(self._handle)

    def _transport_for(self, handler) -> InProcessTransport:
        return InProcessTransport(handler)

    def candidates_for(self, position: GameRecord, top_k: int = 10) -> CandidateList:
        """The exact CandidateList the mock will return for this position
        (the test oracle for response attribution)."""
        moves_key = json.dumps(
            [[m.color.value, format_vertex(m.point, position.size)] for m in position.moves]
        )
        raw = self._raw_candidates(moves_key, position.size, top_k)
        to_play = Color.to_move(len(position.moves))
        return CandidateList.from_raw(
            to_play,
            [(move, winrate, pv) for move, winrate, pv in raw],
        )

    def _raw_candidates(self, moves_key: str, size: int, top_k: int):
        rng = _position_rng(self.seed, moves_key)
        board = Board(size)
        color = Color.BLACK
        for pair in json.loads(moves_key):
            letter, vertex = pair
            move_color = Color(letter)
            point = None
            if vertex != "pass":
                from .board import parse_coord

                point = parse_coord(vertex, size)
            board, _ = board.apply_move(Move(move_color, point))
            color = move_color.opponent
        legal = sorted(board.legal_moves(color))
        if not legal:
            return [(None, quantize_winrate(0.5), (None,))]
        k = min(top_k, self.max_candidates, len(legal))
        chosen = rng.sample(legal, k)
        winrates = sorted(
            (quantize_winrate(0.2 + 0.6 * rng.random()) for _ in range(k)), reverse=True
        )
        empties = [p for p in legal if p not in chosen] or legal
        out = []
        for move, winrate in zip(chosen, winrates):
            tail = rng.sample(empties, min(self.pv_plies - 1, len(empties)))
            out.append((move, winrate, tuple([move] + tail)))
        return out

    def _handle(self, line: str) -> List[str]:
        index = self.calls
        self.calls += 1
        request = json.loads(line)
        moves_key = json.dumps(request["moves"])
        size = request["boardSize"]
        top_k = request["maxCandidates"]
        raw = self._raw_candidates(moves_key, size, top_k)
        to_play = Color.to_move(len(request["moves"]))
        response = json.dumps(
            {
                "id": request["id"],
                "toPlay": to_play.value,
                "moveInfos": [
                    {
                        "move": format_vertex(move, size),
                        "winrate": winrate,
                        "pv": [format_vertex(p, size) for p in pv],
                    }
                    for move, winrate, pv in raw
                ],
            }
        )
        replies, self._held = list(self._held), []
        fault = self.faults.get(index)
        if fault == DROP:
            return replies
        if fault == GARBLE:
            replies.append('{"id": broken json!')
            return replies
        if fault == DELAY:
            self._held.append(response)
            return replies
        if fault == WRONG_ID:
            replies.append(response.replace(request["id"], f"bogus{index}", 1))
            return replies
        if fault == DUPLICATE:
            replies.extend([response, response])
            return replies
        replies.append(response)
        return replies


# -- GTP mocks ----------------------------------------------------------------


def heuristic_score(board: Board, point: Point, color: Color) -> float:
    """Shared move-scoring table for the mock bot family.

    Rewards captures and liberties, punishes self-atari, and prefers the
    center.  Deliberately crude: it only needs to order the epsilon family.
    """
    captured, liberties = board.placement_effect(point, color)
    center = (board.size - 1) / 2.0
    centrality = -(abs(point.col - center) + abs(point.row - center))
    score = 40.0 * captured + 4.0 * min(liberties, 4) + 0.5 * centrality
    if liberties == 1:
        score -= 30.0
    return score


class GtpBot:
    """Move policy interface for MockGtpEngine."""

    def choose(self, board: Board, color: Color, rules: LegalityConfig, move_number: int):
        """Return a Point, None for pass, or the string "resign"."""
        raise NotImplementedError


class PassBot(GtpBot):
    """Always passes."""

    def choose(self, board, color, rules, move_number):
        return None


class FirstLegalBot(GtpBot):
    """Plays the first legal point in GTP scan order (A19, B19, ... T1)."""

    def choose(self, board, color, rules, move_number):
        for row in range(board.size - 1, -1, -1):
            for col in range(board.size):
                p = Point(col, row)
                if board.stone_at(p) == 0 and board.is_legal(p, color, rules):
                    return p
        return None


class ResignAtBot(GtpBot):
    """Wraps another bot but resigns once the game reaches a move number."""

    def __init__(self, resign_at: int, inner: Optional[GtpBot] = None):
        self.resign_at = resign_at
        self.inner = inner or FirstLegalBot()

    def choose(self, board, color, rules, move_number):
        if move_number >= self.resign_at:
            return "resign"
        return self.inner.choose(board, color, rules, move_number)


class EpsilonGreedyBot(GtpBot):
    """Greedy over heuristic_score with probability 1-epsilon, else uniform.

    All members of the family share the same scoring table, so strength is
    monotone in epsilon: lower epsilon, stronger play.
    """

    def __init__(self, epsilon: float, seed: int = 0):
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError("epsilon must be in [0,1]")
        self.epsilon = epsilon
        self._rng = random.Random(seed)

    def choose(self, board, color, rules, move_number):
        legal = sorted(board.legal_moves(color, rules))
        if not legal:
            return None
        if self._rng.random() < self.epsilon:
            return self._rng.choice(legal)
        best = max(legal, key=lambda p: (heuristic_score(board, p, color), -p.row, p.col))
        # Pass rather than fill when nothing scores above a trivial floor
        # late in the game; keeps mock games from grinding to max length.
        return best


class MockGtpEngine:
    """A GTP engine living in-process: a board, a policy, and the protocol."""

    def __init__(self, bot: GtpBot, *, board_size: int = 19,
                 rules: LegalityConfig = ARENA_RULES, name: str = "mock"):
        self.bot = bot
        self.rules = rules
        self.name = name
        self._size = board_size
        self._komi = 7.5
        self._board = Board(board_size)
        self._move_number = 0

    def transport(self) -> InProcessTransport:
        return InProcessTransport(self._handle)

    def _reset(self):
        self._board = Board(self._size)
        self._move_number = 0

    def _handle(self, line: str) -> List[str]:
        parts = line.strip().split()
        if not parts:
            return ["? empty command"]
        cmd, args = parts[0], parts[1:]
        try:
            return [self._dispatch(cmd, args)]
        except GoError as err:
            return [f"? illegal move: {err}"]
        except Exception as err:  # malformed arguments and the like
            return [f"? {err}"]

    def _dispatch(self, cmd: str, args: List[str]) -> str:
        if cmd == "protocol_version":
            return "= 2"
        if cmd == "name":
            return f"= {self.name}"
        if cmd == "boardsize":
            self._size = int(args[0])
            self._reset()
            return "="
        if cmd == "komi":
            self._komi = float(args[0])
            return "="
        if cmd == "clear_board":
            self._reset()
            return "="
        if cmd == "play":
            move = self._parse_move(args)
            self._board, _ = self._board.apply_move(move, self.rules)
            self._move_number += 1
            return "="
        if cmd == "genmove":
            color = self._parse_color(args[0])
            choice = self.bot.choose(self._board, color, self.rules, self._move_number)
            if choice == "resign":
                return "= resign"
            move = Move(color, choice)
            self._board, _ = self._board.apply_move(move, self.rules)
            self._move_number += 1
            return f"= {format_vertex(choice, self._size)}"
        if cmd == "quit":
            return "="
        return f"? unknown command {cmd}"

    def _parse_color(self, word: str) -> Color:
        w = word.lower()
        if w in ("b", "black"):
            return Color.BLACK
        if w in ("w", "white"):
            return Color.WHITE
        raise ValueError(f"bad color {word!r}")

    def _parse_move(self, args: List[str]) -> Move:
        from .board import parse_coord

        color = self._parse_color(args[0])
        vertex = args[1]
        if vertex.lower() == "pass":
            return Move.pass_(color)
        return Move.place(color, parse_coord(vertex, self._size))
