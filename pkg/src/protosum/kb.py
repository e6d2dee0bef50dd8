"""Knowledge base: the expert-supplied configuration driving summarization.

A single JSON document declares the linguistic variables, quantifiers, time
intervals, derived-attribute recipes, expected values, precedence vocabulary,
sentence templates and limits. Trapezoid bounds accept plain numbers or
duration strings with s/m/h/d suffixes; instants are ISO-8601.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .event_log import parse_iso_instant
from .fuzzy import LinguisticValue, LinguisticVariable, Quantifier, Trapezoid
from .mining import DerivedAttributeSpec
from .protoforms import (DEVIANCE, EXPECTATION_DEVIANCE, RELATION,
                         RELATION_QUALIFIED, TEMPORAL_ATTR,
                         TEMPORAL_ATTR_QUALIFIED, TYPE1, TYPE2, ExpectedValue,
                         TimeInterval)

_DURATION_RE = re.compile(r"^(-?\d+(?:\.\d+)?)\s*(s|m|h|d)?$")
_DURATION_UNITS = {"s": 1.0, "m": 60.0, "h": 3600.0, "d": 86400.0}

DEFAULT_TEMPLATES: dict[str, str] = {
    TYPE1: "{quantifier} patients had {summarizer}",
    TYPE2: "{quantifier} patients with {qualifier} had {summarizer}",
    TEMPORAL_ATTR: "In {interval}, {quantifier} patients had {summarizer}",
    TEMPORAL_ATTR_QUALIFIED:
        "In {interval}, {quantifier} patients with {qualifier} had {summarizer}",
    RELATION: "In {interval}, in {quantifier} cases, {relation}",
    RELATION_QUALIFIED:
        "In {interval}, in {quantifier} cases where patient had {qualifier}, {relation}",
    DEVIANCE:
        "In {interval}, {quantifier1} patients had {summarizer1}. "
        "However, {quantifier2} patients with {qualifier} had {summarizer2}",
    EXPECTATION_DEVIANCE:
        "In {interval}, {expected}. "
        "However, {quantifier} patients with {qualifier} had {summarizer}",
    "relation_phrase": "{target} takes place {relation} {source}",
}


def default_quantifiers() -> list[Quantifier]:
    """Editable starting set; no canonical numeric definitions exist, so
    these are conventions meant to be overridden per domain."""
    return [
        Quantifier("few", Trapezoid(0.0, 0.05, 0.1, 0.2)),
        Quantifier("several", Trapezoid(0.05, 0.15, 0.35, 0.5)),
        Quantifier("about half", Trapezoid(0.3, 0.45, 0.55, 0.7)),
        Quantifier("most", Trapezoid(0.4, 0.6, 1.0, 1.0)),
        Quantifier("all", Trapezoid(1.0, 1.0, 1.0, 1.0)),
    ]


def parse_duration(value) -> float:
    """Seconds from a number or a string like '90', '2m', '3h', '25d', 'inf'."""
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"cannot read duration from {value!r}")
    text = value.strip().lower()
    if text in ("inf", "+inf", "infinity"):
        return math.inf
    if text in ("-inf", "-infinity"):
        return -math.inf
    m = _DURATION_RE.match(text)
    if not m:
        raise ConfigError(f"cannot read duration from {value!r}")
    return float(m.group(1)) * _DURATION_UNITS[m.group(2) or "s"]


def _trapezoid(raw, where: str) -> Trapezoid:
    if not isinstance(raw, (list, tuple)) or len(raw) != 4:
        raise ConfigError(f"{where}: trapezoid must be a 4-element array")
    return Trapezoid(*(parse_duration(v) for v in raw))


def _value(raw: dict, where: str) -> LinguisticValue:
    name = raw.get("name")
    if not name:
        raise ConfigError(f"{where}: value needs a name")
    kwargs = {"name": name, "text": raw.get("text")}
    shapes = [k for k in ("trapezoid", "category", "interval") if k in raw]
    if len(shapes) != 1:
        raise ConfigError(f"{where}: value {name!r} needs exactly one of trapezoid/category/interval")
    kind = shapes[0]
    if kind == "trapezoid":
        kwargs["trapezoid"] = _trapezoid(raw["trapezoid"], f"{where}.{name}")
    elif kind == "category":
        kwargs["category"] = str(raw["category"])
    else:
        span = raw["interval"]
        if not isinstance(span, (list, tuple)) or len(span) != 2:
            raise ConfigError(f"{where}: value {name!r} interval must be [start, end)")
        kwargs["interval"] = (_instant(span[0]), _instant(span[1]))
    return LinguisticValue(**kwargs)


def _instant(raw) -> float:
    if isinstance(raw, (int, float)):
        return float(raw)
    try:
        return parse_iso_instant(str(raw))
    except ValueError:
        raise ConfigError(f"cannot read instant from {raw!r}") from None


def _variable(raw: dict, where: str) -> LinguisticVariable:
    name = raw.get("name")
    if not name:
        raise ConfigError(f"{where}: variable needs a name")
    values = tuple(_value(v, f"{where}.{name}") for v in raw.get("values", []))
    roles = frozenset(raw.get("roles", ["summarizer", "qualifier"]))
    return LinguisticVariable(
        name=name,
        attribute=raw.get("attribute", name),
        values=values,
        roles=roles,
    )


@dataclass(frozen=True)
class Limits:
    min_truth: float = 0.6
    top_k: int = 10
    relevance_alpha: float = 0.05
    dependency_min: float = 0.9
    frequency_min: int = 5

    def __post_init__(self):
        if not 0.0 <= self.min_truth <= 1.0:
            raise ConfigError(f"min_truth must be in [0,1], got {self.min_truth}")
        if self.top_k < 1:
            raise ConfigError(f"top_k must be >= 1, got {self.top_k}")
        if not 0.0 < self.relevance_alpha < 1.0:
            raise ConfigError(f"relevance_alpha must be in (0,1), got {self.relevance_alpha}")
        if not 0.0 <= self.dependency_min < 1.0:
            raise ConfigError(f"dependency_min must be in [0,1), got {self.dependency_min}")
        if self.frequency_min < 1:
            raise ConfigError(f"frequency_min must be >= 1, got {self.frequency_min}")


@dataclass
class KnowledgeBase:
    variables: list[LinguisticVariable] = field(default_factory=list)
    quantifiers: list[Quantifier] = field(default_factory=list)
    intervals: list[TimeInterval] = field(default_factory=list)
    derived_specs: list[DerivedAttributeSpec] = field(default_factory=list)
    expected_values: list[ExpectedValue] = field(default_factory=list)
    relation_vocab: dict[str, LinguisticVariable] = field(default_factory=dict)
    activity_phrases: dict[str, str] = field(default_factory=dict)
    templates: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_TEMPLATES))
    limits: Limits = field(default_factory=Limits)

    def __post_init__(self):
        for label, names in (
            ("variable", [v.name for v in self.variables]),
            ("quantifier", [q.name for q in self.quantifiers]),
            ("interval", [i.name for i in self.intervals]),
            ("derived attribute", [d.name for d in self.derived_specs]),
        ):
            dupes = {n for n in names if names.count(n) > 1}
            if dupes:
                raise ConfigError(f"duplicate {label} names: {sorted(dupes)}")
        for key, vocab in self.relation_vocab.items():
            if key not in ("after", "before"):
                raise ConfigError(f"relation vocab key must be 'after' or 'before', got {key!r}")
            for value in vocab.values:
                if value.trapezoid is None:
                    raise ConfigError(f"relation value {value.name!r} must be a trapezoid")
                t = value.trapezoid
                if key == "after" and t.a < 0:
                    raise ConfigError(
                        f"'after' value {value.name!r} must live on non-negative seconds"
                    )
                if key == "before" and t.d > 0:
                    raise ConfigError(
                        f"'before' value {value.name!r} must live on non-positive seconds"
                    )

    def variable(self, name: str) -> LinguisticVariable:
        for v in self.variables:
            if v.name == name:
                return v
        raise ConfigError(f"no variable named {name!r}")

    def quantifier(self, name: str) -> Quantifier:
        for q in self.quantifiers:
            if q.name == name:
                return q
        raise ConfigError(f"no quantifier named {name!r}")

    def template(self, family: str) -> str:
        try:
            return self.templates[family]
        except KeyError:
            raise ConfigError(f"no template for family {family!r}") from None

    def activity_phrase(self, activity: str) -> str:
        return self.activity_phrases.get(activity, activity)


def kb_from_dict(doc: dict) -> KnowledgeBase:
    if not isinstance(doc, dict):
        raise ConfigError("knowledge base document must be a JSON object")
    variables = [_variable(v, "variables") for v in doc.get("variables", [])]
    quantifiers = [
        Quantifier(
            name=q["name"],
            shape=_trapezoid(q["trapezoid"], f"quantifiers.{q.get('name')}"),
            monotone=q.get("monotone", ""),
        )
        for q in doc.get("quantifiers", [])
    ]
    intervals = [
        TimeInterval(name=i["name"], start=_instant(i["start"]), end=_instant(i["end"]))
        for i in doc.get("intervals", [])
    ]
    derived = [
        DerivedAttributeSpec(
            name=d["name"],
            kind=d["kind"],
            source=d.get("source"),
            target=d.get("target"),
            activity=d.get("activity"),
            aggregation=d.get("aggregation", "first"),
        )
        for d in doc.get("derived_attributes", [])
    ]
    expected = [
        ExpectedValue(
            attribute=e["attribute"],
            text=e["text"],
            value=_value(e["value"], "expected_values"),
        )
        for e in doc.get("expected_values", [])
    ]
    vocab = {
        key: _variable({"name": key, **raw}, "relation_vocab")
        for key, raw in doc.get("relation_vocab", {}).items()
    }
    templates = dict(DEFAULT_TEMPLATES)
    templates.update(doc.get("templates", {}))
    limits = Limits(**doc.get("limits", {}))
    try:
        return KnowledgeBase(
            variables=variables,
            quantifiers=quantifiers,
            intervals=intervals,
            derived_specs=derived,
            expected_values=expected,
            relation_vocab=vocab,
            activity_phrases=dict(doc.get("activity_phrases", {})),
            templates=templates,
            limits=limits,
        )
    except TypeError as exc:
        raise ConfigError(f"malformed knowledge base: {exc}") from None


def load_kb(path: str | Path) -> KnowledgeBase:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read knowledge base {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"knowledge base {path} is not valid JSON: {exc}") from None
    try:
        return kb_from_dict(doc)
    except KeyError as exc:
        raise ConfigError(f"knowledge base {path} is missing key {exc}") from None
