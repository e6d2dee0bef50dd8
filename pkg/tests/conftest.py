import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make oracles importable

from protosum.event_log import (Case, ColumnMapping, Event, EventLog,
                                parse_event_log, parse_instant)
from protosum.fuzzy import (LinguisticValue, LinguisticVariable, Quantifier,
                            Trapezoid)
from protosum.protoforms import TimeInterval

TABLE2_CSV = """\
case_id,event_activity,case_sex,event_time
20629,consultation,Male,2013-06-04 09:00
20629,special-consultation,Male,2012-06-14 09:00
20634,echocardiogram,Female,2012-06-21 09:00
20634,consultation,Female,2012-06-21 10:00
21657,echocardiogram,Male,2012-10-25 09:00
21657,consultation,Male,2012-10-25 10:00
"""

TABLE2_MAPPING = ColumnMapping(case_attributes={"case_sex": "category"})


@pytest.fixture
def table2_log() -> EventLog:
    return parse_event_log(TABLE2_CSV, TABLE2_MAPPING)


@pytest.fixture
def most() -> Quantifier:
    return Quantifier("most", Trapezoid(0.4, 0.6, 1.0, 1.0))


def ts(text: str) -> float:
    return parse_instant(text)


def crisp_category(name: str, label: str | None = None, text: str | None = None) -> LinguisticValue:
    return LinguisticValue(name=name, category=label or name, text=text)


def make_case(case_id: str, activities: list[str], start: str = "2020-03-01 10:00",
              gap_s: float = 3600.0, attrs: dict | None = None,
              derived: dict | None = None) -> Case:
    t0 = ts(start)
    trace = tuple(
        Event(activity=a, timestamp=t0 + i * gap_s) for i, a in enumerate(activities)
    )
    return Case(case_id=case_id, trace=trace, attributes=attrs or {},
                derived_attributes=derived or {})


def make_log(cases, schema=None) -> EventLog:
    return EventLog.build(cases, schema)


def year_interval(year: int) -> TimeInterval:
    return TimeInterval(
        name=f"year {year}",
        start=ts(f"{year}-01-01 00:00"),
        end=ts(f"{year + 1}-01-01 00:00"),
    )


def random_log(rng: random.Random, max_cases: int = 50,
               activities: tuple[str, ...] = ("A", "B", "C", "D", "E", "F")
               ) -> EventLog:
    """Random log with a categorical and a numeric case attribute, traces of
    length 1..6 over up to six activities, starts spread over 2019-2021."""
    from protosum.event_log import SchemaEntry

    n_cases = rng.randint(1, max_cases)
    alphabet = activities[: rng.randint(2, len(activities))]
    base = ts("2019-01-01 00:00")
    span = ts("2022-01-01 00:00") - base
    cases = []
    for i in range(n_cases):
        length = rng.randint(1, 6)
        acts = [rng.choice(alphabet) for _ in range(length)]
        t0 = base + rng.random() * span
        trace = []
        t = t0
        for a in acts:
            trace.append(Event(activity=a, timestamp=t))
            t += rng.uniform(0, 7200)
        attrs = {
            "grp": rng.choice(["a", "b", "c"]),
            "score": rng.uniform(0.0, 100.0),
        }
        cases.append(Case(case_id=f"c{i:03d}", trace=tuple(trace), attributes=attrs))
    schema = {
        "grp": SchemaEntry(kind="category", scope="case"),
        "score": SchemaEntry(kind="numeric", scope="case"),
    }
    return EventLog.build(cases, schema)


GOLDEN_KB_DICT = {
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
        }
    ],
    "quantifiers": [
        {"name": "most", "trapezoid": [0.4, 0.6, 1, 1]},
        {"name": "several", "trapezoid": [0.05, 0.15, 0.35, 0.5]},
    ],
    "intervals": [
        {"name": "year 2020", "start": "2020-01-01", "end": "2021-01-01"},
    ],
    "relation_vocab": {
        "after": {
            "values": [
                {"name": "immediately after", "trapezoid": [0, 0, 10, 30]},
                {"name": "shortly after", "trapezoid": [10, 30, 600, 1200]},
            ]
        }
    },
    "activity_phrases": {
        "evaluation": "patient evaluation",
        "inclusion": "its inclusion",
    },
    "limits": {"min_truth": 0.6, "top_k": 10,
               "dependency_min": 0.5, "frequency_min": 5},
}


def golden_spec(case_count: int = 500, seed: int = 20):
    """Engineered scenario: every case runs inclusion -> evaluation exactly
    60 s apart inside 2020, with ~90% emergency admittance."""
    from protosum.event_log import SyntheticLogSpec

    return SyntheticLogSpec(
        trace_patterns=((("inclusion", "evaluation"), 1.0),),
        case_count=case_count,
        start_window=(ts("2020-01-05 00:00"), ts("2020-12-20 00:00")),
        inter_event_delay={("inclusion", "evaluation"): (60.0, 60.0)},
        attribute_generators={
            "admittance": {"categories": {"emergency": 9.0, "ambulatory": 1.0}}
        },
        rng_seed=seed,
    )


def score_variable() -> LinguisticVariable:
    return LinguisticVariable(
        name="score level",
        attribute="score",
        values=(
            LinguisticValue("low", trapezoid=Trapezoid(0.0, 0.0, 20.0, 40.0)),
            LinguisticValue("mid", trapezoid=Trapezoid(20.0, 40.0, 60.0, 80.0)),
            LinguisticValue("high", trapezoid=Trapezoid(60.0, 80.0, 100.0, 100.0)),
        ),
    )


def group_variable() -> LinguisticVariable:
    return LinguisticVariable(
        name="group",
        attribute="grp",
        values=(
            crisp_category("a"),
            crisp_category("b"),
            crisp_category("c"),
        ),
    )
