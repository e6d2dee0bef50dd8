"""Bound quantified statements over a log and their truth degrees.

Eight statement families are supported: plain and qualified quantified
statements, their time-interval variants, time-interval relation statements
(plain and qualified), and the two composite deviance forms. Truth follows
the sigma-count model: the quantifier's membership applied to a ratio of
fuzzy cardinalities, with minimum as the conjunction everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError, EvaluationError
from .event_log import Case, EventLog
from .fuzzy import (LinguisticValue, Quantifier, TruthDegree, quantifier_eval,
                    value_membership)
from .mining import CausalGraph, aggregate_durations, case_durations

TYPE1 = "TYPE1"
TYPE2 = "TYPE2"
TEMPORAL_ATTR = "TEMPORAL_ATTR"
TEMPORAL_ATTR_QUALIFIED = "TEMPORAL_ATTR_QUALIFIED"
RELATION = "RELATION"
RELATION_QUALIFIED = "RELATION_QUALIFIED"
DEVIANCE = "DEVIANCE"
EXPECTATION_DEVIANCE = "EXPECTATION_DEVIANCE"

FAMILIES = (
    TYPE1,
    TYPE2,
    TEMPORAL_ATTR,
    TEMPORAL_ATTR_QUALIFIED,
    RELATION,
    RELATION_QUALIFIED,
    DEVIANCE,
    EXPECTATION_DEVIANCE,
)


@dataclass(frozen=True)
class TimeInterval:
    """Named half-open window [start, end) in epoch seconds."""

    name: str
    start: float
    end: float

    def __post_init__(self):
        if not self.start < self.end:
            raise ConfigError(f"interval {self.name!r}: start must precede end")

    def contains_case(self, case: Case) -> bool:
        """A case belongs to the interval iff its first event starts in it."""
        return self.start <= case.start < self.end


@dataclass(frozen=True)
class AttributeProperty:
    """A linguistic value bound to one case attribute (raw or derived)."""

    attribute: str
    value: LinguisticValue
    variable: str = ""  # owning variable name, for display and grouping

    def display(self) -> str:
        if self.value.text:
            return self.value.text
        label = self.variable or self.attribute
        return f"{self.value.name} {label}"


@dataclass(frozen=True)
class RelationProperty:
    """A temporal precedence value over a pair of activities.

    The value's trapezoid lives on signed seconds: positive supports express
    "target after source" vocabulary, negative ones "target before source".
    """

    source: str
    target: str
    value: LinguisticValue
    variable: str = ""
    aggregation: str = "first"


@dataclass(frozen=True)
class ExpectedValue:
    """Expert-declared expectation for an attribute; reported, never scored."""

    attribute: str
    text: str
    value: LinguisticValue


def attribute_membership(case: Case, prop: AttributeProperty) -> TruthDegree:
    """Membership of the case's attribute value; absent attributes get 0."""
    x = case.attribute(prop.attribute)
    if x is None:
        return 0.0
    return value_membership(prop.value, x)


def interval_membership(case: Case, interval: TimeInterval) -> TruthDegree:
    return 1.0 if interval.contains_case(case) else 0.0


def _ratio_truth(q: Quantifier, numerator: float, denominator: float) -> TruthDegree:
    if denominator == 0.0:
        return 0.0
    return quantifier_eval(q, numerator / denominator)


def _require_cases(log: EventLog) -> None:
    if not log.cases:
        raise EvaluationError("cannot evaluate a statement over an empty log")


def truth_type1(log: EventLog, q: Quantifier, summarizer: AttributeProperty) -> TruthDegree:
    """Plain quantified statement: quantifier of the mean summarizer mass."""
    _require_cases(log)
    total = sum(attribute_membership(c, summarizer) for c in log.cases)
    return _ratio_truth(q, total, float(len(log.cases)))


def truth_type2(log: EventLog, q: Quantifier, qualifier: AttributeProperty,
                summarizer: AttributeProperty) -> TruthDegree:
    """Qualified statement: proportion of summarizer mass inside the
    qualifier's fuzzy subset; an empty subset yields truth 0 (vacuous)."""
    _require_cases(log)
    num = den = 0.0
    for case in log.cases:
        b = attribute_membership(case, qualifier)
        a = attribute_membership(case, summarizer)
        num += min(b, a)
        den += b
    return _ratio_truth(q, num, den)


def truth_temporal(log: EventLog, q: Quantifier, interval: TimeInterval,
                   summarizer: AttributeProperty) -> TruthDegree:
    """Interval-scoped statement; the interval acts as a crisp qualifier."""
    _require_cases(log)
    num = den = 0.0
    for case in log.cases:
        ti = interval_membership(case, interval)
        num += min(ti, attribute_membership(case, summarizer))
        den += ti
    return _ratio_truth(q, num, den)


def truth_temporal_qualified(log: EventLog, q: Quantifier, interval: TimeInterval,
                             qualifier: AttributeProperty,
                             summarizer: AttributeProperty) -> TruthDegree:
    """Interval- and qualifier-scoped statement: quantifier of
    sum(min(ti, p, c)) / sum(min(ti, c))."""
    _require_cases(log)
    num = den = 0.0
    for case in log.cases:
        ti = interval_membership(case, interval)
        c = attribute_membership(case, qualifier)
        p = attribute_membership(case, summarizer)
        num += min(ti, p, c)
        den += min(ti, c)
    return _ratio_truth(q, num, den)


def relation_memberships(log: EventLog, graph: CausalGraph,
                         relation: RelationProperty) -> dict[str, TruthDegree]:
    """Per-case membership of the relation value over the aggregated signed
    duration; cases without a bound occurrence get 0."""
    durations = case_durations(log, graph, relation.source, relation.target)
    out: dict[str, TruthDegree] = {}
    for case in log.cases:
        ds = durations.get(case.case_id)
        if not ds:
            out[case.case_id] = 0.0
        else:
            x = aggregate_durations(ds, relation.aggregation)
            out[case.case_id] = value_membership(relation.value, x)
    return out


def truth_relation(log: EventLog, graph: CausalGraph, q: Quantifier,
                   interval: TimeInterval, relation: RelationProperty) -> TruthDegree:
    """Relation statement: like the interval-scoped form with the summarizer
    replaced by the per-case relation membership."""
    _require_cases(log)
    mu_r = relation_memberships(log, graph, relation)
    num = den = 0.0
    for case in log.cases:
        ti = interval_membership(case, interval)
        num += min(ti, mu_r[case.case_id])
        den += ti
    return _ratio_truth(q, num, den)


def truth_relation_qualified(log: EventLog, graph: CausalGraph, q: Quantifier,
                             interval: TimeInterval, qualifier: AttributeProperty,
                             relation: RelationProperty) -> TruthDegree:
    _require_cases(log)
    mu_r = relation_memberships(log, graph, relation)
    num = den = 0.0
    for case in log.cases:
        ti = interval_membership(case, interval)
        c = attribute_membership(case, qualifier)
        num += min(ti, mu_r[case.case_id], c)
        den += min(ti, c)
    return _ratio_truth(q, num, den)


def truth_deviance(s1_truth: TruthDegree, s2_truth: TruthDegree) -> TruthDegree:
    """Composite of a general and a contrasting statement: the minimum."""
    return min(s1_truth, s2_truth)


def truth_expectation_deviance(s2_truth: TruthDegree) -> TruthDegree:
    """Expectation composites inherit the contrasting statement's truth; the
    expert-declared expectation is taken as maximally true."""
    return s2_truth


@dataclass
class ProtoformInstance:
    """A fully bound statement of one family plus its evaluation outcome.

    For deviance families the general part is (quantifier, summarizer) or
    `expected`, and the contrasting part is (quantifier2, qualifier,
    summarizer2). `support` is the relevant mass (the truth ratio's
    denominator); `vacuous` marks a zero denominator.
    """

    family: str
    quantifier: Quantifier | None = None
    quantifier2: Quantifier | None = None
    interval: TimeInterval | None = None
    qualifier: AttributeProperty | None = None
    summarizer: AttributeProperty | RelationProperty | None = None
    summarizer2: AttributeProperty | None = None
    expected: ExpectedValue | None = None
    truth: TruthDegree | None = None
    support: float = 0.0
    vacuous: bool = False
    relevant: bool = True

    _REQUIRED = {
        TYPE1: ("quantifier", "summarizer"),
        TYPE2: ("quantifier", "qualifier", "summarizer"),
        TEMPORAL_ATTR: ("quantifier", "interval", "summarizer"),
        TEMPORAL_ATTR_QUALIFIED: ("quantifier", "interval", "qualifier", "summarizer"),
        RELATION: ("quantifier", "interval", "summarizer"),
        RELATION_QUALIFIED: ("quantifier", "interval", "qualifier", "summarizer"),
        DEVIANCE: ("quantifier", "quantifier2", "interval", "qualifier",
                   "summarizer", "summarizer2"),
        EXPECTATION_DEVIANCE: ("quantifier2", "interval", "qualifier",
                               "summarizer2", "expected"),
    }

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown protoform family {self.family!r}")
        for slot in self._REQUIRED[self.family]:
            if getattr(self, slot) is None:
                raise ConfigError(f"{self.family} instance is missing {slot!r}")
        if self.family in (RELATION, RELATION_QUALIFIED):
            if not isinstance(self.summarizer, RelationProperty):
                raise ConfigError(f"{self.family} summarizer must be a relation property")
        elif self.summarizer is not None and not isinstance(self.summarizer, AttributeProperty):
            raise ConfigError(f"{self.family} summarizer must be an attribute property")

    def bindings(self) -> dict[str, str]:
        """Flat slot map identifying what the instance is bound to."""
        out: dict[str, str] = {"family": self.family}
        if self.interval is not None:
            out["interval"] = self.interval.name
        if self.quantifier is not None:
            out["quantifier"] = self.quantifier.name
        if self.quantifier2 is not None:
            out["quantifier2"] = self.quantifier2.name
        if self.qualifier is not None:
            out["qualifier"] = f"{self.qualifier.attribute}={self.qualifier.value.name}"
        if isinstance(self.summarizer, RelationProperty):
            rel = self.summarizer
            out["relation"] = f"{rel.source}->{rel.target}:{rel.value.name}"
        elif self.summarizer is not None:
            out["summarizer"] = f"{self.summarizer.attribute}={self.summarizer.value.name}"
        if self.summarizer2 is not None:
            out["summarizer2"] = f"{self.summarizer2.attribute}={self.summarizer2.value.name}"
        if self.expected is not None:
            out["expected"] = f"{self.expected.attribute}:{self.expected.value.name}"
        return out
