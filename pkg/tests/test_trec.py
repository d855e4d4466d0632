import json
from decimal import Decimal

import pytest

from irscales.errors import FormatError, InputError, UndefinedNormalizationError
from irscales.trec import (
    Qrels,
    format_qrels,
    format_run,
    load_samples,
    parse_qrels,
    parse_run,
    sort_topics,
)


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_single_line(tmp_path):
    run = parse_run(write(tmp_path, "a.run", "301 Q0 FBIS3-1 1 12.5 sysA\n"))
    assert run.name == "sysA"
    assert run.docs("301") == ["FBIS3-1"]
    assert run.entries["301"][0][1] == Decimal("12.5")


def test_order_by_score_then_doc_id(tmp_path):
    text = (
        "7 Q0 d9 1 3 s\n"
        "7 Q0 d2 2 5.0 s\n"
        "7 Q0 d5 3 5 s\n"
        "7 Q0 d1 4 0.1 s\n"
    )
    run = parse_run(write(tmp_path, "a.run", text))
    # given ranks are ignored, 5.0 and 5 tie exactly
    assert run.docs("7") == ["d2", "d5", "d9", "d1"]


def test_decimal_scores_avoid_float_ties(tmp_path):
    text = "1 Q0 a 1 0.30000000000000001 s\n1 Q0 b 2 0.3 s\n"
    assert parse_run(write(tmp_path, "a.run", text)).docs("1") == ["a", "b"]


@pytest.mark.parametrize(
    "line, fragment",
    [
        ("301 Q0 d1 1 12.5", "expected 6 fields"),
        ("301 Q1 d1 1 12.5 s", "Q0"),
        ("301 Q0 d1 one 12.5 s", "rank"),
        ("301 Q0 d1 1 high s", "score"),
        ("301 Q0 d1 1 NaN s", "not finite"),
    ],
)
def test_malformed_run_line_names_line(tmp_path, line, fragment):
    p = write(tmp_path, "a.run", "301 Q0 d0 1 1 s\n" + line + "\n")
    with pytest.raises(FormatError, match=fragment) as exc:
        parse_run(p)
    assert exc.value.line == 2
    assert ":2:" in str(exc.value)


def test_duplicate_doc(tmp_path):
    p = write(tmp_path, "a.run", "1 Q0 d 1 2 s\n1 Q0 d 2 1 s\n")
    with pytest.raises(FormatError, match="twice"):
        parse_run(p)


def test_run_name_falls_back_to_stem(tmp_path):
    run = parse_run(write(tmp_path, "mixed.run", "1 Q0 a 1 2 x\n1 Q0 b 2 1 y\n"))
    assert run.name == "mixed"
    assert parse_run(write(tmp_path, "b.run", "1 Q0 a 1 2 x\n"), name="given").name == "given"


def test_run_round_trip(tmp_path):
    text = "2 Q0 b 1 4 s\n2 Q0 a 2 4 s\n10 Q0 c 1 -1.5 s\n"
    run = parse_run(write(tmp_path, "a.run", text))
    again = parse_run(write(tmp_path, "b.run", format_run(run)))
    assert again == run


def test_qrels_recall_base(tmp_path):
    q = parse_qrels(write(tmp_path, "q", "301 0 a 1\n301 0 b 0\n301 0 c 2\n301 0 d 0\n302 0 e 0\n"))
    assert q.recall_base("301") == 2
    assert q.recall_base("302") == 0
    assert q.flagged == ["302"]
    assert q.g_max == 2
    assert q.grade("301", "zzz") == 0
    assert q.serp("301", ["c", "x", "a"], 5) == (2, 0, 1, 0, 0)
    assert q.context("301").recall_base == 2
    with pytest.raises(UndefinedNormalizationError):
        q.context("302")


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("301 0 d1 1\n301 0 d1 0\n", "duplicate"),
        ("301 0 d1 -1\n", "negative"),
        ("301 0 d1\n", "expected 4 fields"),
        ("301 Q0 d1 1\n", "second field"),
        ("301 0 d1 1.5\n", "integer"),
    ],
)
def test_qrels_errors(tmp_path, text, fragment):
    with pytest.raises(FormatError, match=fragment):
        parse_qrels(write(tmp_path, "q", text))


def test_qrels_round_trip(tmp_path):
    q = Qrels({"1": {"a": 1, "b": 0}, "2": {"c": 3}})
    assert parse_qrels(write(tmp_path, "q", format_qrels(q))) == q


def test_natural_topic_order():
    assert sort_topics(["10", "9", "b", "a2", "a10"]) == ["9", "10", "a10", "a2", "b"]


def test_load_samples(tmp_path):
    p = write(tmp_path, "s.json", json.dumps({"P": [2, 2, 4], "R": [1.5]}))
    assert load_samples(p) == {"P": [2.0, 2.0, 4.0], "R": [1.5]}
    with pytest.raises(InputError):
        load_samples(write(tmp_path, "bad.json", "[1, 2]"))
    with pytest.raises(InputError):
        load_samples(write(tmp_path, "bad2.json", '{"A": ["x"]}'))
    with pytest.raises(FormatError):
        load_samples(write(tmp_path, "bad3.json", "{"))
