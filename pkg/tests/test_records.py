"""Move-list grammar, SGF subset, and JSONL round-trip tests."""

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goforge.board import Color, Move, Point, parse_coord
from goforge.records import (
    ColorOrderError,
    CommentaryPair,
    GameRecord,
    IllegalMoveInRecordError,
    IndexGapError,
    MalformedTokenError,
    RecordError,
    SchemaError,
    SgfSyntaxError,
    UnsupportedBoardSizeError,
    UnsupportedFeatureError,
    format_move_list,
    parse_move_list,
    parse_sgf,
    parse_sgf_detailed,
    read_jsonl,
    write_jsonl,
)

from oracles import random_legal_record

APPENDIX_MOVES = (
    "1.X-D16 2.O-D4 3.X-Q4 4.O-Q16 5.X-O17 6.O-R14 "
    "7.X-C3 8.O-D3 9.X-C4 10.O-D5 11.X-B6 12.O-R6"
)


class TestMoveListGrammar:
    def test_fig4_excerpt(self):
        record = parse_move_list("1.X-Q16 2.O-D16")
        assert len(record) == 2
        assert record.moves[0] == Move.place(Color.BLACK, parse_coord("Q16"))
        assert record.moves[1] == Move.place(Color.WHITE, parse_coord("D16"))

    def test_appendix_record_roundtrip(self):
        record = parse_move_list(APPENDIX_MOVES)
        assert len(record) == 12
        assert format_move_list(record) == APPENDIX_MOVES

    def test_white_cannot_open(self):
        with pytest.raises(ColorOrderError):
            parse_move_list("1.O-Q16")

    def test_index_gap(self):
        with pytest.raises(IndexGapError):
            parse_move_list("1.X-Q16 3.O-D16")

    @pytest.mark.parametrize(
        "text",
        ["1.X_Q16", "1.B-Q16", "1.X-I5", "one.X-Q16", "1.X-Q160", "1.XQ16", "1 .X-Q16"],
    )
    def test_malformed_tokens(self, text):
        with pytest.raises(RecordError):
            parse_move_list(text)

    def test_whitespace_tolerant_input_single_space_output(self):
        record = parse_move_list("1.X-Q16\n\t 2.O-D16   3.X-D4")
        assert format_move_list(record) == "1.X-Q16 2.O-D16 3.X-D4"

    def test_empty_record_formats_empty(self):
        assert format_move_list(GameRecord()) == ""

    def test_single_move(self):
        assert format_move_list(parse_move_list("1.X-Q16")) == "1.X-Q16"

    def test_pass_not_representable(self):
        record = GameRecord(moves=[Move.pass_(Color.BLACK)])
        with pytest.raises(RecordError):
            format_move_list(record)

    def test_alternation_off_allows_repeats(self):
        record = parse_move_list("1.X-A1 2.X-B1", enforce_alternation=False)
        assert [m.color for m in record.moves] == [Color.BLACK, Color.BLACK]

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10_000))
    def test_roundtrip_random_legal_games(self, seed):
        moves = random_legal_record(9, 40, random.Random(seed))
        record = GameRecord(moves=moves, size=9)
        text = format_move_list(record)
        parsed = parse_move_list(text, size=9)
        assert parsed.moves == moves
        parsed.replay()  # every parsed record replays legally


class TestSgf:
    def test_single_move(self):
        record = parse_sgf("(;SZ[19];B[pd])")
        assert len(record) == 1
        assert record.moves[0] == Move.place(Color.BLACK, parse_coord("Q16"))

    def test_komi_only(self):
        record = parse_sgf("(;SZ[19]KM[7.5])")
        assert len(record) == 0
        assert record.komi == 7.5

    def test_pass_and_corner(self):
        record = parse_sgf("(;SZ[19];B[];W[aa])")
        assert record.moves[0].is_pass
        assert record.moves[1] == Move.place(Color.WHITE, parse_coord("A19"))

    def test_tt_pass_on_19(self):
        record = parse_sgf("(;SZ[19];B[tt])")
        assert record.moves[0].is_pass

    def test_metadata(self):
        record = parse_sgf("(;SZ[9]KM[6.5]PB[Lee]PW[Cho]RE[W+1.5];B[ee])")
        assert record.size == 9
        assert record.black_player == "Lee"
        assert record.white_player == "Cho"
        assert record.result.winner is Color.WHITE
        assert record.result.margin == 1.5

    def test_resignation_result(self):
        record = parse_sgf("(;SZ[19]RE[B+R])")
        assert record.result.winner is Color.BLACK
        assert record.result.by_resignation

    def test_main_line_only(self):
        parsed = parse_sgf_detailed("(;SZ[9];B[aa](;W[bb];B[cc])(;W[dd]))")
        assert parsed.dropped_variations == 1
        coords = [m.point for m in parsed.record.moves]
        assert coords == [Point(0, 8), Point(1, 7), Point(2, 6)]

    def test_board_size_limit(self):
        with pytest.raises(UnsupportedBoardSizeError):
            parse_sgf("(;SZ[26])")

    def test_setup_stones_rejected_by_default(self):
        with pytest.raises(UnsupportedFeatureError):
            parse_sgf("(;SZ[19]AB[dd][pp];W[qq])")

    def test_setup_stones_permissive(self):
        parsed = parse_sgf_detailed("(;SZ[19]AB[dd][pp];W[cc])", allow_setup_stones=True)
        assert parsed.setup_stones == 2
        assert not parsed.record.alternating
        assert [m.color for m in parsed.record.moves] == [
            Color.BLACK,
            Color.BLACK,
            Color.WHITE,
        ]

    def test_illegal_record_flagged_with_index(self):
        with pytest.raises(IllegalMoveInRecordError) as exc:
            parse_sgf("(;SZ[9];B[aa];W[aa])")
        assert exc.value.move_index == 2

    @pytest.mark.parametrize("bad", ["", "(", "(;SZ[19]", ";B[aa]", "(;B[a])", "(;B[zz]SZ[9])"])
    def test_syntax_errors(self, bad):
        with pytest.raises(RecordError):
            parse_sgf(bad)

    def test_escaped_brackets_in_values(self):
        record = parse_sgf(r"(;SZ[19]PB[Lee \] Sedol];B[pd])")
        assert record.black_player == "Lee ] Sedol"


SAMPLE_ANNOTATED = [
    {
        "moves": "1.X-Q16",
        "candidates": [
            {"move": "D4", "winrate": 0.523, "pv": ["D4", "Q3"], "rank": 1},
            {"move": "D16", "winrate": 0.51, "pv": ["D16"], "rank": 2},
        ],
        "to_play": "O",
        "source_id": "g1#1",
    },
    {
        "moves": "",
        "candidates": [{"move": "Q16", "winrate": 0.5, "pv": ["Q16"], "rank": 1}],
        "to_play": "X",
        "source_id": "g2#0",
    },
]


class TestJsonl:
    def test_empty_roundtrip(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        write_jsonl([], path, kind="annotated_positions")
        assert read_jsonl(path, kind="annotated_positions") == []

    def test_annotated_roundtrip(self, tmp_path):
        path = tmp_path / "ann.jsonl"
        write_jsonl(SAMPLE_ANNOTATED, path, kind="annotated_positions")
        assert read_jsonl(path, kind="annotated_positions") == SAMPLE_ANNOTATED

    def test_unknown_fields_preserved(self, tmp_path):
        path = tmp_path / "extra.jsonl"
        record = dict(SAMPLE_ANNOTATED[0], extra_field={"nested": [1, 2]})
        write_jsonl([record], path, kind="annotated_positions")
        assert read_jsonl(path, kind="annotated_positions")[0]["extra_field"] == {
            "nested": [1, 2]
        }

    def test_corrupt_middle_line_names_line_2(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        lines = [json.dumps(SAMPLE_ANNOTATED[0]), "{not json", json.dumps(SAMPLE_ANNOTATED[1])]
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(SchemaError) as exc:
            read_jsonl(path, kind="annotated_positions")
        assert exc.value.line_number == 2

    def test_schema_violation_names_line(self, tmp_path):
        path = tmp_path / "bad2.jsonl"
        bad = dict(SAMPLE_ANNOTATED[0], to_play="B")
        path.write_text(json.dumps(SAMPLE_ANNOTATED[1]) + "\n" + json.dumps(bad) + "\n")
        with pytest.raises(SchemaError) as exc:
            read_jsonl(path, kind="annotated_positions")
        assert exc.value.line_number == 2

    def test_training_and_bench_and_commentary_kinds(self, tmp_path):
        cases = {
            "training_samples": {"query": "q", "response": "r", "kind": "prediction"},
            "bench_samples": {"moves": "1.X-Q16", "candidates": ["D4"], "bucket": 0},
            "commentary_pairs": {"moves": "1.X-Q16", "move_index": 1, "comment": "solid"},
        }
        for kind, record in cases.items():
            path = tmp_path / f"{kind}.jsonl"
            write_jsonl([record], path, kind=kind)
            assert read_jsonl(path, kind=kind) == [record]

    def test_write_validates_too(self, tmp_path):
        with pytest.raises(SchemaError):
            write_jsonl(
                [{"query": "q", "response": "r", "kind": "other"}],
                tmp_path / "x.jsonl",
                kind="training_samples",
            )


class TestGameRecord:
    def test_prefix(self):
        record = parse_move_list(APPENDIX_MOVES)
        prefix = record.prefix(5)
        assert len(prefix) == 5
        assert prefix.to_play is Color.WHITE

    def test_prefix_bounds(self):
        with pytest.raises(ValueError):
            parse_move_list("1.X-Q16").prefix(2)

    def test_commentary_pair_bounds(self):
        record = parse_move_list("1.X-Q16 2.O-D16")
        CommentaryPair(record, 2, "fine")
        with pytest.raises(ValueError):
            CommentaryPair(record, 3, "too far")
