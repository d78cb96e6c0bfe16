"""Game record parsing and serialization.

Three surfaces live here: the numbered move-list text grammar
(``1.X-Q16 2.O-D16 ...``), a pragmatic SGF subset (main line only), and
JSON-lines persistence for the four dataset record kinds.

The move-list token grammar is bit-exact: ``<n>.<C>-<coord>`` where n is the
1-based move index, C is X (black) or O (white), and coord is a column letter
A..T skipping I followed by a 1..2 digit row number.  Tokens are separated by
arbitrary whitespace on input and single spaces on output.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, List, Mapping, NamedTuple, Optional

from .board import (
    Color,
    GoError,
    InvalidCoordinateError,
    LegalityConfig,
    Move,
    Point,
    REPLAY_RULES,
    format_coord,
    parse_coord,
    replay,
)

MOVE_TOKEN_RE = re.compile(r"^([0-9]+)\.([XO])-([A-HJ-T][0-9]{1,2})$")


class RecordError(Exception):
    """Base class for record parsing/serialization errors."""


class MalformedTokenError(RecordError):
    """A move-list token does not match the grammar."""


class IndexGapError(RecordError):
    """Move-list indices are not consecutive from 1."""


class ColorOrderError(RecordError):
    """Colors do not strictly alternate starting with Black."""


class SgfSyntaxError(RecordError):
    """Input is not a parseable SGF game tree."""


class UnsupportedBoardSizeError(RecordError):
    """SGF declares a board larger than the engine supports."""


class UnsupportedFeatureError(RecordError):
    """SGF uses a feature outside the supported subset (e.g. setup stones)."""


class IllegalMoveInRecordError(RecordError):
    """A parsed record does not replay legally; ``move_index`` is 1-based."""

    def __init__(self, message: str, move_index: int):
        super().__init__(message)
        self.move_index = move_index


class SchemaError(RecordError):
    """A JSONL line violates its record schema; ``line_number`` is 1-based."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class GameResult:
    """Game outcome: winner (None for a draw/void), score margin when known,
    and whether the game ended by resignation."""

    winner: Optional[Color] = None
    margin: Optional[float] = None
    by_resignation: bool = False


@dataclass
class GameRecord:
    """An ordered move list plus metadata; the unit of ingestion.

    ``alternating`` is False for free-placement records (e.g. SGF handicap
    ingestion) where the strict Black/White alternation check is disabled.
    """

    moves: List[Move] = field(default_factory=list)
    size: int = 19
    komi: float = 7.5
    result: Optional[GameResult] = None
    black_player: Optional[str] = None
    white_player: Optional[str] = None
    source_id: str = ""
    alternating: bool = True

    def __len__(self) -> int:
        return len(self.moves)

    @property
    def to_play(self) -> Color:
        """Side to move after the recorded moves (alternating records)."""
        return Color.to_move(len(self.moves))

    def prefix(self, k: int) -> "GameRecord":
        """The record truncated to its first ``k`` moves."""
        if not 0 <= k <= len(self.moves):
            raise ValueError(f"prefix length {k} out of range 0..{len(self.moves)}")
        return GameRecord(
            moves=list(self.moves[:k]),
            size=self.size,
            komi=self.komi,
            result=None,
            black_player=self.black_player,
            white_player=self.white_player,
            source_id=self.source_id,
            alternating=self.alternating,
        )

    def replay(self, rules: LegalityConfig = REPLAY_RULES):
        """Replay through the rules engine; raises the first illegal move's
        error with its index attached."""
        return replay(self.moves, self.size, rules)


@dataclass(frozen=True)
class CommentaryPair:
    """A commented position: a prefix length into a source record plus the
    commentary text attached at that point."""

    record: GameRecord
    move_index: int
    comment: str

    def __post_init__(self):
        if not 0 <= self.move_index <= len(self.record.moves):
            raise ValueError(
                f"move_index {self.move_index} exceeds record length {len(self.record.moves)}"
            )


def parse_move_list(
    text: str, size: int = 19, enforce_alternation: bool = True
) -> GameRecord:
    """Parse numbered move-list text into a GameRecord.

    Indices must run 1..n consecutively and colors must alternate starting
    with X unless ``enforce_alternation`` is off.
    """
    moves: List[Move] = []
    for position, token in enumerate(text.split(), start=1):
        m = MOVE_TOKEN_RE.match(token)
        if not m:
            raise MalformedTokenError(f"token {position}: {token!r} does not match n.C-coord")
        index, letter, coord = int(m.group(1)), m.group(2), m.group(3)
        if index != position:
            raise IndexGapError(f"token {position}: expected index {position}, got {index}")
        color = Color.from_letter(letter)
        if enforce_alternation and color is not Color.to_move(position - 1):
            raise ColorOrderError(
                f"move {position}: {color.name.title()} out of turn "
                f"(Black moves first and colors alternate)"
            )
        moves.append(Move.place(color, parse_coord(coord, size)))
    return GameRecord(moves=moves, size=size, alternating=enforce_alternation)


def format_move_list(record: GameRecord) -> str:
    """Render a record as single-space separated move-list tokens.

    Round-trips with parse_move_list.  Passes have no token in this grammar
    and are rejected.
    """
    tokens = []
    for i, move in enumerate(record.moves, start=1):
        if move.is_pass:
            raise RecordError(f"move {i} is a pass; the move-list grammar has no pass token")
        tokens.append(f"{i}.{move.color.value}-{format_coord(move.point, record.size)}")
    return " ".join(tokens)


# -- SGF subset --------------------------------------------------------------


class SgfParse(NamedTuple):
    record: GameRecord
    dropped_variations: int
    setup_stones: int


_SGF_PROP_RE = re.compile(r"[A-Z]+")


def _sgf_tokenize(text: str):
    """Yield ('(', ')', ';') structure tokens and (ident, [values]) properties."""
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch in "();":
            yield ch, None
            i += 1
        elif ch.isspace():
            i += 1
        elif ch.isalpha():
            m = _SGF_PROP_RE.match(text, i)
            ident = m.group(0)
            i = m.end()
            values = []
            while i < n and (text[i] == "[" or text[i].isspace()):
                if text[i].isspace():
                    i += 1
                    continue
                j = i + 1
                buf = []
                while j < n:
                    if text[j] == "\\" and j + 1 < n:
                        buf.append(text[j + 1])
                        j += 2
                        continue
                    if text[j] == "]":
                        break
                    buf.append(text[j])
                    j += 1
                else:
                    raise SgfSyntaxError("unterminated property value")
                values.append("".join(buf))
                i = j + 1
            if not values:
                raise SgfSyntaxError(f"property {ident} has no value")
            yield ident, values
        else:
            raise SgfSyntaxError(f"unexpected character {ch!r} at offset {i}")


def _sgf_point(value: str, size: int) -> Optional[Point]:
    """SGF two-letter coordinate to Point; '' and 'tt' (on <=19) are passes."""
    if value == "" or (value == "tt" and size <= 19):
        return None
    if len(value) != 2 or not all("a" <= c <= "z" for c in value):
        raise SgfSyntaxError(f"bad SGF coordinate {value!r}")
    col = ord(value[0]) - ord("a")
    row_from_top = ord(value[1]) - ord("a")
    if col >= size or row_from_top >= size:
        raise SgfSyntaxError(f"SGF coordinate {value!r} outside size {size}")
    return Point(col, size - 1 - row_from_top)


def _parse_sgf_result(value: str) -> Optional[GameResult]:
    v = value.strip()
    if not v or v in ("0", "Draw", "Void", "?"):
        return GameResult() if v in ("0", "Draw") else None
    winner = {"B": Color.BLACK, "W": Color.WHITE}.get(v[0].upper())
    if winner is None or len(v) < 2 or v[1] != "+":
        return None
    rest = v[2:]
    if rest.upper() in ("R", "RESIGN"):
        return GameResult(winner, None, by_resignation=True)
    try:
        return GameResult(winner, float(rest))
    except ValueError:
        return GameResult(winner)


def parse_sgf_detailed(
    data, *, allow_setup_stones: bool = False, validate: bool = True
) -> SgfParse:
    """Parse an SGF game tree, keeping the main line only.

    Supports B, W, SZ, KM, RE, PB, PW.  Variations are dropped (counted in
    the result).  AB/AW setup stones are rejected unless
    ``allow_setup_stones``, in which case they become pseudo-moves at the
    front and alternation checking is disabled for the record.
    """
    text = data.decode("utf-8") if isinstance(data, (bytes, bytearray)) else data
    tokens = list(_sgf_tokenize(text))

    def parse_tree(pos: int):
        if pos >= len(tokens) or tokens[pos][0] != "(":
            raise SgfSyntaxError("expected '('")
        pos += 1
        nodes: List[dict] = []
        current: Optional[dict] = None
        children = []
        while pos < len(tokens):
            ident, values = tokens[pos]
            if ident == ";":
                current = {}
                nodes.append(current)
                pos += 1
            elif ident == "(":
                child, pos = parse_tree(pos)
                children.append(child)
            elif ident == ")":
                if not nodes and not children:
                    raise SgfSyntaxError("empty game tree")
                return (nodes, children), pos + 1
            else:
                if current is None:
                    raise SgfSyntaxError(f"property {ident} outside a node")
                current.setdefault(ident, []).extend(values)
                pos += 1
        raise SgfSyntaxError("unbalanced '(' in game tree")

    tree, end = parse_tree(0)
    if end != len(tokens):
        raise SgfSyntaxError("trailing content after game tree")

    # Main line: this tree's nodes, then the first child at every fork.
    dropped = 0
    main_nodes: List[dict] = []
    nodes, children = tree
    while True:
        main_nodes.extend(nodes)
        if not children:
            break
        dropped += len(children) - 1
        nodes, children = children[0]

    if not main_nodes:
        raise SgfSyntaxError("SGF contains no nodes")

    root = main_nodes[0]
    size = 19
    if "SZ" in root:
        try:
            size = int(root["SZ"][0])
        except ValueError:
            raise SgfSyntaxError(f"bad SZ value {root['SZ'][0]!r}") from None
        if size > 25:
            raise UnsupportedBoardSizeError(f"board size {size} exceeds 25")
        if size < 2:
            raise SgfSyntaxError(f"board size {size} too small")
    komi = 7.5
    if "KM" in root:
        try:
            komi = float(root["KM"][0])
        except ValueError:
            raise SgfSyntaxError(f"bad KM value {root['KM'][0]!r}") from None

    moves: List[Move] = []
    setup = 0
    alternating = True
    for node in main_nodes:
        if "AB" in node or "AW" in node:
            if not allow_setup_stones:
                raise UnsupportedFeatureError(
                    "setup stones (AB/AW) rejected; pass allow_setup_stones=True "
                    "to ingest them as pseudo-moves"
                )
            alternating = False
            for value in node.get("AB", []):
                moves.append(Move.place(Color.BLACK, _sgf_point(value, size)))
                setup += 1
            for value in node.get("AW", []):
                moves.append(Move.place(Color.WHITE, _sgf_point(value, size)))
                setup += 1
        for ident, color in (("B", Color.BLACK), ("W", Color.WHITE)):
            if ident in node:
                point = _sgf_point(node[ident][0], size)
                moves.append(Move(color, point))

    record = GameRecord(
        moves=moves,
        size=size,
        komi=komi,
        result=_parse_sgf_result(root["RE"][0]) if "RE" in root else None,
        black_player=root.get("PB", [None])[0],
        white_player=root.get("PW", [None])[0],
        alternating=alternating,
    )
    if validate:
        try:
            record.replay()
        except GoError as err:
            raise IllegalMoveInRecordError(
                f"record does not replay: {err}", getattr(err, "move_index", 0)
            ) from err
    return SgfParse(record, dropped, setup)


def parse_sgf(data, **kwargs) -> GameRecord:
    """parse_sgf_detailed, returning just the GameRecord."""
    return parse_sgf_detailed(data, **kwargs).record


# -- JSONL persistence --------------------------------------------------------
#
# Field names are the wire contract.  Unknown fields are preserved on read
# and ignored; every line must parse independently.


def _expect(condition: bool, message: str):
    if not condition:
        raise ValueError(message)


def _check_movelist(value, name):
    _expect(isinstance(value, str), f"{name} must be a move-list string")
    if value:
        try:
            parse_move_list(value)
        except (RecordError, GoError) as err:
            raise ValueError(f"{name} is not a valid move list: {err}") from None


def _validate_annotated_position(obj: Mapping):
    _check_movelist(obj.get("moves"), "moves")
    _expect(obj.get("to_play") in ("X", "O"), 'to_play must be "X" or "O"')
    _expect(isinstance(obj.get("source_id"), str), "source_id must be a string")
    candidates = obj.get("candidates")
    _expect(isinstance(candidates, list) and candidates, "candidates must be a non-empty list")
    for i, cand in enumerate(candidates):
        _expect(isinstance(cand, dict), f"candidates[{i}] must be an object")
        _expect(isinstance(cand.get("move"), str), f"candidates[{i}].move must be a string")
        winrate = cand.get("winrate")
        _expect(
            isinstance(winrate, (int, float)) and 0.0 <= winrate <= 1.0,
            f"candidates[{i}].winrate must be a number in [0,1]",
        )
        pv = cand.get("pv")
        _expect(
            isinstance(pv, list) and all(isinstance(x, str) for x in pv),
            f"candidates[{i}].pv must be a list of strings",
        )
        rank = cand.get("rank")
        _expect(
            isinstance(rank, int) and rank >= 1, f"candidates[{i}].rank must be an integer >= 1"
        )


def _validate_bench_sample(obj: Mapping):
    _check_movelist(obj.get("moves"), "moves")
    candidates = obj.get("candidates")
    _expect(
        isinstance(candidates, list)
        and candidates
        and all(isinstance(x, str) for x in candidates),
        "candidates must be a non-empty list of coordinate strings",
    )
    _expect(isinstance(obj.get("bucket"), int), "bucket must be an integer")


def _validate_training_sample(obj: Mapping):
    _expect(isinstance(obj.get("query"), str), "query must be a string")
    _expect(isinstance(obj.get("response"), str), "response must be a string")
    _expect(
        obj.get("kind") in ("prediction", "commentary"),
        'kind must be "prediction" or "commentary"',
    )


def _validate_commentary_pair(obj: Mapping):
    _check_movelist(obj.get("moves"), "moves")
    _expect(
        isinstance(obj.get("move_index"), int) and obj["move_index"] >= 0,
        "move_index must be a non-negative integer",
    )
    _expect(isinstance(obj.get("comment"), str), "comment must be a string")


JSONL_VALIDATORS = {
    "annotated_positions": _validate_annotated_position,
    "training_samples": _validate_training_sample,
    "bench_samples": _validate_bench_sample,
    "commentary_pairs": _validate_commentary_pair,
}


def write_jsonl(records: Iterable[Mapping], path, kind: Optional[str] = None):
    """Write one JSON object per line, UTF-8, '\\n' separated.

    When ``kind`` names one of the dataset schemas, each record is validated
    before writing so no malformed file is ever produced.
    """
    validator = JSONL_VALIDATORS[kind] if kind else None
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for i, record in enumerate(records, start=1):
            if validator:
                try:
                    validator(record)
                except ValueError as err:
                    raise SchemaError(str(err), i) from None
            fh.write(json.dumps(record, ensure_ascii=False))
            fh.write("\n")
            count += 1
    return count


def read_jsonl(path, kind: Optional[str] = None) -> List[dict]:
    """Read a JSONL file back into dicts, validating against ``kind``'s
    schema when given.  Unknown fields are preserved untouched."""
    validator = JSONL_VALIDATORS[kind] if kind else None
    out = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as err:
                raise SchemaError(f"invalid JSON ({err.msg})", line_number) from None
            if not isinstance(obj, dict):
                raise SchemaError("line is not a JSON object", line_number)
            if validator:
                try:
                    validator(obj)
                except ValueError as err:
                    raise SchemaError(str(err), line_number) from None
            out.append(obj)
    return out
