import json
import math

import pytest

from protosum.errors import ConfigError
from protosum.kb import (DEFAULT_TEMPLATES, Limits, default_quantifiers,
                         kb_from_dict, load_kb, parse_duration)

from conftest import ts

CARDIO_KB = {
    "variables": [
        {
            "name": "admittance",
            "attribute": "admittance",
            "values": [
                {"name": "emergency", "category": "emergency",
                 "text": "emergency admittance"},
                {"name": "ambulatory", "category": "ambulatory",
                 "text": "ambulatory admittance"},
            ],
        },
        {
            "name": "waiting time",
            "attribute": "wait_src_tgt",
            "roles": ["summarizer"],
            "values": [
                {"name": "short", "trapezoid": [0, 0, "1d", "3d"],
                 "text": "a short waiting time"},
                {"name": "normal", "trapezoid": ["1d", "3d", "10d", "15d"],
                 "text": "a normal waiting time"},
                {"name": "long", "trapezoid": ["10d", "15d", "inf", "inf"],
                 "text": "a long waiting time"},
            ],
        },
    ],
    "quantifiers": [
        {"name": "most", "trapezoid": [0.4, 0.6, 1, 1]},
        {"name": "several", "trapezoid": [0.05, 0.15, 0.35, 0.5]},
    ],
    "intervals": [
        {"name": "year 2020", "start": "2020-01-01", "end": "2021-01-01"},
    ],
    "derived_attributes": [
        {"name": "wait_src_tgt", "kind": "waiting_time",
         "source": "src", "target": "tgt"},
    ],
    "expected_values": [
        {"attribute": "wait_src_tgt",
         "text": "the waiting time between src and tgt is expected to be around 2 days",
         "value": {"name": "around 2 days", "trapezoid": ["1d", "2d", "2d", "3d"]}},
    ],
    "relation_vocab": {
        "after": {
            "values": [
                {"name": "immediately after", "trapezoid": [0, 0, "2m", "5m"]},
                {"name": "shortly after", "trapezoid": ["2m", "5m", "2h", "6h"]},
            ]
        }
    },
    "activity_phrases": {"tgt": "the follow-up"},
    "limits": {"min_truth": 0.7, "top_k": 5},
}


class TestDurations:
    def test_plain_numbers(self):
        assert parse_duration(90) == 90.0
        assert parse_duration(1.5) == 1.5

    def test_suffixes(self):
        assert parse_duration("45s") == 45.0
        assert parse_duration("2m") == 120.0
        assert parse_duration("3h") == 10800.0
        assert parse_duration("25d") == 25 * 86400.0

    def test_bare_string_is_seconds(self):
        assert parse_duration("60") == 60.0

    def test_negative_and_infinite(self):
        assert parse_duration("-5m") == -300.0
        assert parse_duration("inf") == math.inf
        assert parse_duration("-inf") == -math.inf

    def test_garbage_rejected(self):
        with pytest.raises(ConfigError):
            parse_duration("soon")
        with pytest.raises(ConfigError):
            parse_duration("5 fortnights")


class TestLoad:
    def test_full_document(self):
        kb = kb_from_dict(CARDIO_KB)
        assert [v.name for v in kb.variables] == ["admittance", "waiting time"]
        waiting = kb.variable("waiting time")
        assert waiting.roles == frozenset({"summarizer"})
        assert waiting.value("short").trapezoid.c == 86400.0
        assert kb.quantifier("most").shape.as_tuple() == (0.4, 0.6, 1.0, 1.0)
        assert kb.intervals[0].start == ts("2020-01-01 00:00")
        assert kb.limits.min_truth == 0.7
        assert kb.limits.top_k == 5
        assert kb.limits.relevance_alpha == 0.05  # default preserved
        assert kb.activity_phrase("tgt") == "the follow-up"
        assert kb.activity_phrase("src") == "src"

    def test_templates_default_and_override(self):
        kb = kb_from_dict(CARDIO_KB)
        assert kb.template("TEMPORAL_ATTR") == DEFAULT_TEMPLATES["TEMPORAL_ATTR"]
        custom = dict(CARDIO_KB)
        custom["templates"] = {"TEMPORAL_ATTR": "During {interval}: {quantifier} {summarizer}"}
        kb2 = kb_from_dict(custom)
        assert kb2.template("TEMPORAL_ATTR").startswith("During")

    def test_file_round_trip(self, tmp_path):
        path = tmp_path / "cardio.kb.json"
        path.write_text(json.dumps(CARDIO_KB))
        kb = load_kb(path)
        assert kb.quantifier("several").monotone == "unimodal"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_kb(tmp_path / "nope.json")

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError, match="not valid JSON"):
            load_kb(path)

    def test_after_vocab_must_be_non_negative(self):
        doc = {
            "quantifiers": [{"name": "most", "trapezoid": [0.4, 0.6, 1, 1]}],
            "relation_vocab": {
                "after": {"values": [{"name": "bad", "trapezoid": [-10, 0, 5, 10]}]}
            },
        }
        with pytest.raises(ConfigError, match="after"):
            kb_from_dict(doc)

    def test_before_vocab_must_be_non_positive(self):
        doc = {
            "quantifiers": [{"name": "most", "trapezoid": [0.4, 0.6, 1, 1]}],
            "relation_vocab": {
                "before": {"values": [{"name": "bad", "trapezoid": [0, 1, 2, 3]}]}
            },
        }
        with pytest.raises(ConfigError, match="before"):
            kb_from_dict(doc)

    def test_duplicate_names_rejected(self):
        doc = {
            "quantifiers": [
                {"name": "most", "trapezoid": [0.4, 0.6, 1, 1]},
                {"name": "most", "trapezoid": [0.5, 0.7, 1, 1]},
            ]
        }
        with pytest.raises(ConfigError, match="duplicate"):
            kb_from_dict(doc)

    def test_value_shape_required(self):
        doc = {"variables": [{"name": "v", "values": [{"name": "x"}]}]}
        with pytest.raises(ConfigError):
            kb_from_dict(doc)


class TestLimits:
    def test_defaults(self):
        limits = Limits()
        assert limits.min_truth == 0.6
        assert limits.dependency_min == 0.9
        assert limits.frequency_min == 5

    @pytest.mark.parametrize("kwargs", [
        {"min_truth": 1.5},
        {"min_truth": -0.1},
        {"top_k": 0},
        {"relevance_alpha": 0.0},
        {"relevance_alpha": 1.0},
        {"dependency_min": 1.0},
        {"frequency_min": 0},
    ])
    def test_ranges_enforced(self, kwargs):
        with pytest.raises(ConfigError):
            Limits(**kwargs)


def test_default_quantifiers_are_valid():
    names = [q.name for q in default_quantifiers()]
    assert "most" in names and "several" in names
    for q in default_quantifiers():
        assert 0.0 <= q.shape.a and q.shape.d <= 1.0
