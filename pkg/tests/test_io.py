import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from builders import M, instance, layout, problem
from storyline_extension import EubpInstance, InvalidInstanceError, InvalidProblemError, reduce, solve
from storyline_extension.generate import random_problem
from storyline_extension.io import (
    FormatError,
    detect_kind,
    parse_instance,
    parse_layout,
    parse_problem,
    serialize_instance,
    serialize_layout,
    serialize_problem,
)


def test_reduction_round_trip():
    p = reduce(EubpInstance((1, 1), 2, 1))
    text = serialize_problem(p)
    assert parse_problem(text) == p
    assert serialize_problem(parse_problem(text)) == text


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_random_round_trips(seed):
    p = random_problem(random.Random(seed))
    text = serialize_problem(p)
    assert parse_problem(text) == p
    inst_text = serialize_instance(p.full)
    assert parse_instance(inst_text) == p.full
    r = solve(p)
    if r.accepted:
        lay_text = serialize_layout(r.witness)
        assert parse_layout(lay_text) == r.witness
        assert serialize_layout(parse_layout(lay_text)) == lay_text


def test_canonical_form_sorts_everything():
    doc = {
        "chi": 0,
        "fixed_layout": [{"t": 1, "order": ["b", "a"]}],
        "fixed_characters": ["b", "a"],
        "instance": {
            "meetings": [{"members": ["b"], "begin": 1, "end": 1}, {"end": 1, "begin": 1, "members": ["a"]}],
            "characters": ["b", "a"],
        },
    }
    text = serialize_problem(parse_problem(json.dumps(doc)))
    out = json.loads(text)
    assert out["instance"]["characters"] == ["a", "b"]
    assert [m["members"] for m in out["instance"]["meetings"]] == [["a"], ["b"]]
    assert out["fixed_layout"] == [{"order": ["b", "a"], "t": 1}]
    assert list(out) == sorted(out)
    assert text.endswith("\n")


def instance_doc(meetings, characters):
    return json.dumps({"characters": characters, "meetings": meetings})


def test_meeting_time_order_code():
    text = instance_doc([{"members": ["a"], "begin": 3, "end": 1}], ["a"])
    with pytest.raises(InvalidInstanceError) as err:
        parse_instance(text)
    assert "MEETING_TIME_ORDER" in err.value.codes


def test_unknown_character_code():
    text = instance_doc([{"members": ["a", "zz"], "begin": 1, "end": 1}], ["a"])
    with pytest.raises(InvalidInstanceError) as err:
        parse_instance(text)
    assert "UNKNOWN_CHARACTER" in err.value.codes


def test_problem_semantic_codes():
    full = instance(M("ab", 1), M("a", 2), M("b", 2))
    text = serialize_problem(problem(full, 0, "ab", "ab", "ba"))
    with pytest.raises(InvalidProblemError) as err:
        parse_problem(text)
    assert err.value.codes == ["BUDGET_EXCEEDED"]
    assert parse_problem(text, validate=False).chi == 0


def test_syntax_error_reports_line_and_column():
    with pytest.raises(FormatError) as err:
        parse_instance('{\n  "characters": [\n    "a",\n  ]\n}')
    assert err.value.code == "SYNTAX"
    assert "line 4 column 3" in str(err.value)


def test_schema_errors():
    with pytest.raises(FormatError) as err:
        parse_instance('{"characters": ["a"]}')
    assert err.value.code == "SCHEMA"
    with pytest.raises(FormatError):
        parse_layout('[{"t": 0, "order": []}]')
    with pytest.raises(FormatError):
        parse_layout('[{"t": 1, "order": []}, {"t": 1, "order": []}]')
    with pytest.raises(FormatError):
        parse_instance('{"characters": ["a", "a"], "meetings": []}')


def test_detect_kind():
    p = reduce(EubpInstance((1, 1), 2, 1))
    assert detect_kind(serialize_problem(p)) == "problem"
    assert detect_kind(serialize_instance(p.full)) == "instance"
    assert detect_kind(serialize_layout(p.fixed_layout)) == "layout"
    with pytest.raises(FormatError):
        detect_kind('{"x": 1}')


def test_layout_gaps_become_empty_instants():
    assert parse_layout('[{"t": 2, "order": ["a"]}]') == layout("", "a")
