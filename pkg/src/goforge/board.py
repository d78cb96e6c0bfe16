"""Go rules engine: coordinates, move application with capture resolution,
legality, replay, 2-D rendering, and Tromp-Taylor area scoring.

The board keeps stone groups and their liberty sets incrementally, so group
liberty counts are available without re-scanning; tests cross-check them
against an independent flood-fill oracle.  Boards are immutable after
construction: ``apply_move`` returns a fresh board and never mutates its
receiver.

Coordinate convention: columns are letters A..T skipping I (left to right),
rows are numbers 1..size (bottom to top).  Black is written "X" and moves
first, White is written "O".
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple, Optional

COLUMN_LETTERS = "ABCDEFGHJKLMNOPQRSTUVWXYZ"  # 'I' skipped by convention
MAX_BOARD_SIZE = 25


class GoError(Exception):
    """Base class for rules-engine errors."""


class InvalidCoordinateError(GoError, ValueError):
    """Coordinate text or point does not name an intersection on the board."""


class IllegalMoveError(GoError, ValueError):
    """A move that the rules reject.  ``move_index`` is set by replay()."""

    move_index: Optional[int] = None


class OccupiedPointError(IllegalMoveError):
    """Placement target already holds a stone."""


class SuicideError(IllegalMoveError):
    """Placement would leave the mover's own group without liberties."""


class KoError(IllegalMoveError):
    """Immediate single-stone recapture forbidden by the simple-ko rule."""


class SuperkoError(IllegalMoveError):
    """Move would recreate a previous whole-board position."""


class Color(Enum):
    """Stone color; the value is the move-list letter."""

    BLACK = "X"
    WHITE = "O"

    @property
    def opponent(self) -> "Color":
        return Color.WHITE if self is Color.BLACK else Color.BLACK

    @property
    def sign(self) -> int:
        """+1 for Black, -1 for White (the 2-D rendering encoding)."""
        return 1 if self is Color.BLACK else -1

    @classmethod
    def from_letter(cls, letter: str) -> "Color":
        try:
            return cls(letter)
        except ValueError:
            raise ValueError(f"color letter must be 'X' or 'O', got {letter!r}") from None

    @classmethod
    def to_move(cls, move_number: int) -> "Color":
        """Side to move after ``move_number`` alternating moves (Black opens)."""
        return cls.BLACK if move_number % 2 == 0 else cls.WHITE


class Point(NamedTuple):
    """Zero-based intersection index: col 0 = column A, row 0 = board row 1."""

    col: int
    row: int


@dataclass(frozen=True)
class Move:
    """A colored action: placement on a point, or a pass (point is None)."""

    color: Color
    point: Optional[Point] = None

    @property
    def is_pass(self) -> bool:
        return self.point is None

    @classmethod
    def place(cls, color: Color, point: Point) -> "Move":
        return cls(color, point)

    @classmethod
    def pass_(cls, color: Color) -> "Move":
        return cls(color, None)


@dataclass(frozen=True)
class LegalityConfig:
    """Which repetition rules apply.  Simple ko is always enforced; positional
    superko is optional because external records may follow rulesets without
    it."""

    superko: bool = False


REPLAY_RULES = LegalityConfig(superko=False)
ARENA_RULES = LegalityConfig(superko=True)


@dataclass(frozen=True)
class CaptureReport:
    """Stones removed by one move.  ``self_capture_rejected`` marks a probe
    that was refused as suicide (apply_move raises instead of returning it)."""

    removed: frozenset = frozenset()
    self_capture_rejected: bool = False


def parse_coord(text: str, size: int = 19) -> Point:
    """Parse a coordinate like "Q16" into a Point.

    Column letters run A..T skipping I; numbers run 1..size bottom-up.
    Raises InvalidCoordinateError for the letter I, out-of-range letters or
    numbers, and malformed text.
    """
    if not isinstance(text, str) or len(text) < 2:
        raise InvalidCoordinateError(f"malformed coordinate {text!r}")
    letter, digits = text[0].upper(), text[1:]
    if letter == "I":
        raise InvalidCoordinateError("column letter 'I' is skipped by convention")
    col = COLUMN_LETTERS.find(letter)
    if col < 0 or col >= size:
        raise InvalidCoordinateError(f"column {letter!r} out of range for size {size}")
    if not digits.isdigit():
        raise InvalidCoordinateError(f"malformed coordinate {text!r}")
    number = int(digits)
    if not 1 <= number <= size:
        raise InvalidCoordinateError(f"row {number} out of range for size {size}")
    return Point(col, number - 1)


def format_coord(point: Point, size: int = 19) -> str:
    """Inverse of parse_coord; round-trips exactly."""
    if not (0 <= point.col < size and 0 <= point.row < size):
        raise InvalidCoordinateError(f"point {point} out of range for size {size}")
    return f"{COLUMN_LETTERS[point.col]}{point.row + 1}"


# Zobrist tables are per-size and deterministic; the fingerprint scheme is an
# internal detail with no serialization contract.
_ZOBRIST_CACHE: dict = {}


def _zobrist(size: int) -> dict:
    table = _ZOBRIST_CACHE.get(size)
    if table is None:
        rng = random.Random(0x60B0A2D ^ size)
        table = {
            color: [rng.getrandbits(64) for _ in range(size * size)]
            for color in Color
        }
        _ZOBRIST_CACHE[size] = table
    return table


@dataclass(frozen=True)
class _Group:
    """An immutable chain of same-colored stones with its liberty set.
    Never mutated: board updates replace groups wholesale."""

    color: Color
    stones: frozenset
    liberties: frozenset


class Board:
    """Immutable Go board with incremental group/liberty tracking.

    ``grid`` values: 0 empty, +1 black, -1 white (indexable by Point via
    ``stone_at``).  ``captures`` counts prisoners taken *by* each color.
    """

    __slots__ = (
        "size",
        "_grid",
        "_group_ids",
        "_groups",
        "simple_ko",
        "_ko_banned",
        "captures",
        "position_hash",
        "position_hashes",
        "_next_gid",
    )

    def __init__(self, size: int = 19):
        if not 2 <= size <= MAX_BOARD_SIZE:
            raise ValueError(f"board size must be in 2..{MAX_BOARD_SIZE}, got {size}")
        self.size = size
        self._grid = [0] * (size * size)
        self._group_ids = [0] * (size * size)
        self._groups: dict = {}
        self.simple_ko: Optional[Point] = None
        self._ko_banned: Optional[Color] = None
        self.captures = {Color.BLACK: 0, Color.WHITE: 0}
        self.position_hash = 0
        self.position_hashes = {0}
        self._next_gid = 1

    # -- low-level helpers ------------------------------------------------

    def _index(self, point: Point) -> int:
        return point.row * self.size + point.col

    def in_bounds(self, point: Point) -> bool:
        return 0 <= point.col < self.size and 0 <= point.row < self.size

    def stone_at(self, point: Point) -> int:
        """0 empty, +1 black, -1 white."""
        return self._grid[self._index(point)]

    def neighbors(self, point: Point) -> Iterable[Point]:
        col, row, size = point.col, point.row, self.size
        if col > 0:
            yield Point(col - 1, row)
        if col + 1 < size:
            yield Point(col + 1, row)
        if row > 0:
            yield Point(col, row - 1)
        if row + 1 < size:
            yield Point(col, row + 1)

    def group_at(self, point: Point) -> Optional[_Group]:
        gid = self._group_ids[self._index(point)]
        return self._groups.get(gid) if gid else None

    def groups(self) -> Iterable[_Group]:
        """All stone groups currently on the board."""
        return self._groups.values()

    def stone_count(self) -> int:
        return sum(1 for v in self._grid if v)

    def _clone(self) -> "Board":
        other = Board.__new__(Board)
        other.size = self.size
        other._grid = self._grid.copy()
        other._group_ids = self._group_ids.copy()
        other._groups = self._groups.copy()
        other.simple_ko = self.simple_ko
        other._ko_banned = self._ko_banned
        other.captures = self.captures.copy()
        other.position_hash = self.position_hash
        other.position_hashes = self.position_hashes.copy()
        other._next_gid = self._next_gid
        return other

    # -- placement analysis ------------------------------------------------

    def _resolve_placement(self, point: Point, color: Color):
        """Work out what placing ``color`` at empty ``point`` would do.

        Returns (captured_gids, captured_points, new_group_liberties,
        merged_friend_gids).  Pure: inspects but never mutates state.
        """
        friend_gids = set()
        enemy_gids = set()
        liberties = set()
        for nb in self.neighbors(point):
            value = self._grid[self._index(nb)]
            if value == 0:
                liberties.add(nb)
            else:
                gid = self._group_ids[self._index(nb)]
                if value == color.sign:
                    friend_gids.add(gid)
                else:
                    enemy_gids.add(gid)

        captured_gids = {
            gid for gid in enemy_gids if self._groups[gid].liberties == {point}
        }
        captured_points = set()
        for gid in captured_gids:
            captured_points |= self._groups[gid].stones

        for gid in friend_gids:
            liberties |= self._groups[gid].liberties
        liberties.discard(point)
        # Vacated enemy stones adjacent to the merged chain become liberties.
        if captured_points:
            merged_stones = {point}
            for gid in friend_gids:
                merged_stones |= self._groups[gid].stones
            for cap in captured_points:
                if any(nb in merged_stones for nb in self.neighbors(cap)):
                    liberties.add(cap)

        return captured_gids, captured_points, liberties, friend_gids

    def _hash_after(self, point: Point, color: Color, captured_points) -> int:
        table = _zobrist(self.size)
        h = self.position_hash ^ table[color][self._index(point)]
        enemy = color.opponent
        for cap in captured_points:
            h ^= table[enemy][self._index(cap)]
        return h

    def _check_placement(self, point: Point, color: Color, rules: LegalityConfig):
        """Raise the matching IllegalMoveError if the placement is illegal;
        otherwise return the _resolve_placement tuple plus the new hash."""
        if not self.in_bounds(point):
            raise InvalidCoordinateError(f"point {point} off the {self.size}x{self.size} board")
        if self._grid[self._index(point)] != 0:
            raise OccupiedPointError(f"{format_coord(point, self.size)} is occupied")
        if point == self.simple_ko and color == self._ko_banned:
            raise KoError(f"simple ko forbids immediate recapture at {format_coord(point, self.size)}")
        resolved = self._resolve_placement(point, color)
        captured_gids, captured_points, liberties, _ = resolved
        if not liberties:
            err = SuicideError(f"playing {format_coord(point, self.size)} would be suicide")
            err.report = CaptureReport(frozenset(), self_capture_rejected=True)
            raise err
        new_hash = self._hash_after(point, color, captured_points)
        if rules.superko and new_hash in self.position_hashes:
            raise SuperkoError(
                f"{format_coord(point, self.size)} would repeat a previous position"
            )
        return resolved, new_hash

    # -- public operations --------------------------------------------------

    def apply_move(self, move: Move, rules: LegalityConfig = REPLAY_RULES):
        """Apply one move, returning ``(new_board, capture_report)``.

        Opponent groups left without liberties are removed, capture counts
        updated, and the simple-ko point recorded when the move was a
        single-stone snapback.  Raises OccupiedPointError, SuicideError,
        KoError, or SuperkoError; the receiving board is never modified.
        """
        if move.is_pass:
            new = self._clone()
            new.simple_ko = None
            new._ko_banned = None
            return new, CaptureReport()

        point = move.point
        color = move.color
        (captured_gids, captured_points, liberties, friend_gids), new_hash = (
            self._check_placement(point, color, rules)
        )

        new = self._clone()
        idx = new._index(point)
        new._grid[idx] = color.sign

        merged_stones = {point}
        for gid in friend_gids:
            merged_stones |= new._groups.pop(gid).stones
        new_gid = new._next_gid
        new._next_gid += 1
        for stone in merged_stones:
            new._group_ids[new._index(stone)] = new_gid

        # Remove captured groups and credit their vacated points as
        # liberties to adjacent groups of the mover's color.
        for gid in captured_gids:
            del new._groups[gid]
        for cap in captured_points:
            cap_idx = new._index(cap)
            new._grid[cap_idx] = 0
            new._group_ids[cap_idx] = 0
        for cap in captured_points:
            for nb in new.neighbors(cap):
                nb_gid = new._group_ids[new._index(nb)]
                if nb_gid and nb_gid != new_gid:
                    old = new._groups[nb_gid]
                    new._groups[nb_gid] = _Group(
                        old.color, old.stones, old.liberties | {cap}
                    )

        new._groups[new_gid] = _Group(color, frozenset(merged_stones), frozenset(liberties))

        # Surviving enemy neighbors lose the placed point as a liberty.
        touched = set()
        for nb in new.neighbors(point):
            nb_gid = new._group_ids[new._index(nb)]
            if nb_gid and nb_gid != new_gid and nb_gid not in touched:
                touched.add(nb_gid)
                old = new._groups[nb_gid]
                new._groups[nb_gid] = _Group(old.color, old.stones, old.liberties - {point})

        new.captures[color] = new.captures[color] + len(captured_points)
        if len(captured_points) == 1 and len(merged_stones) == 1 and len(liberties) == 1:
            new.simple_ko = next(iter(captured_points))
            new._ko_banned = color.opponent
        else:
            new.simple_ko = None
            new._ko_banned = None
        new.position_hash = new_hash
        new.position_hashes.add(new_hash)
        return new, CaptureReport(frozenset(captured_points))

    def placement_effect(self, point: Point, color: Color):
        """Preview a placement without ko/superko judgement: returns
        ``(captured_stone_count, resulting_group_liberty_count)``.
        Raises OccupiedPointError when the point holds a stone."""
        if self._grid[self._index(point)] != 0:
            raise OccupiedPointError(f"{format_coord(point, self.size)} is occupied")
        _, captured_points, liberties, _ = self._resolve_placement(point, color)
        return len(captured_points), len(liberties)

    def is_legal(self, point: Point, color: Color, rules: LegalityConfig = REPLAY_RULES) -> bool:
        """True exactly when apply_move would accept the placement."""
        try:
            self._check_placement(point, color, rules)
        except GoError:
            return False
        return True

    def legal_moves(self, color: Color, rules: LegalityConfig = REPLAY_RULES) -> set:
        """All placements apply_move would accept for ``color`` (passes excluded)."""
        out = set()
        for row in range(self.size):
            for col in range(self.size):
                p = Point(col, row)
                if self._grid[self._index(p)] == 0 and self.is_legal(p, color, rules):
                    out.add(p)
        return out

    def render_2d(self) -> list:
        """Nested integer grid: row 0 is the top board row (row ``size``),
        column 0 is column A; 1 = black, -1 = white, 0 = empty."""
        return [
            [self._grid[row * self.size + col] for col in range(self.size)]
            for row in range(self.size - 1, -1, -1)
        ]

    def score_area(self, komi: float = 7.5) -> float:
        """Tromp-Taylor area score, positive when Black leads.

        Stones plus empty regions bordered by a single color; regions touching
        both colors (or nothing) count for neither.  No dead-stone marking.
        """
        size = self.size
        black = sum(1 for v in self._grid if v == 1)
        white = sum(1 for v in self._grid if v == -1)
        seen = [False] * (size * size)
        for start in range(size * size):
            if self._grid[start] != 0 or seen[start]:
                continue
            region = 0
            borders = set()
            stack = [start]
            seen[start] = True
            while stack:
                idx = stack.pop()
                region += 1
                p = Point(idx % size, idx // size)
                for nb in self.neighbors(p):
                    nb_idx = nb.row * size + nb.col
                    value = self._grid[nb_idx]
                    if value == 0:
                        if not seen[nb_idx]:
                            seen[nb_idx] = True
                            stack.append(nb_idx)
                    else:
                        borders.add(value)
            if borders == {1}:
                black += region
            elif borders == {-1}:
                white += region
        return black - white - komi


def replay(moves: Iterable[Move], size: int = 19, rules: LegalityConfig = REPLAY_RULES):
    """Fold apply_move over a move list from an empty board.

    Returns ``(final_board, capture_reports)``.  The first illegal move's
    error is re-raised with its 1-based index attached as ``move_index``.
    """
    board = Board(size)
    reports = []
    for i, move in enumerate(moves, start=1):
        try:
            board, report = board.apply_move(move, rules)
        except GoError as err:
            err.move_index = i
            err.args = (f"move {i}: {err.args[0]}",)
            raise
        reports.append(report)
    return board, reports


def render_move_list(moves, size: int = 19) -> list:
    """Replay a move list and return its 2-D rendering."""
    board, _ = replay(moves, size)
    return board.render_2d()
