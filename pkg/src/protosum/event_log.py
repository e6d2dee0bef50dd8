"""Event log data model, delimited-text ingestion, validation and synthesis.

A log is a collection of cases; each case carries a timestamp-ordered trace
of events plus case-level attributes. Timestamps are stored as seconds since
the Unix epoch (UTC); attribute values are floats (numeric or instant kinds)
or strings (categories).
"""
from __future__ import annotations

import csv
import hashlib
import io
import random
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Iterable, Mapping

from .errors import ConfigError, LogValidationError, ParseError, ValidationReport
from .fuzzy import normalize_category

DEFAULT_TIMESTAMP_FORMAT = "%Y-%m-%d %H:%M"

AttributeValue = float | str

NUMERIC, CATEGORY, INSTANT = "numeric", "category", "instant"
KINDS = (NUMERIC, CATEGORY, INSTANT)


def parse_instant(text: str, fmt: str = DEFAULT_TIMESTAMP_FORMAT) -> float:
    """Parse a timestamp per the format pattern into epoch seconds (UTC)."""
    dt = datetime.strptime(text.strip(), fmt)
    return dt.replace(tzinfo=timezone.utc).timestamp()


def format_instant(ts: float, fmt: str = DEFAULT_TIMESTAMP_FORMAT) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime(fmt)


def parse_iso_instant(text: str) -> float:
    """ISO-8601 instant (naive treated as UTC) to epoch seconds."""
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


@dataclass(frozen=True)
class Event:
    activity: str
    timestamp: float
    attributes: Mapping[str, AttributeValue] = field(default_factory=dict)

    def __post_init__(self):
        if not self.activity:
            raise LogValidationError("event activity label must be non-empty")


@dataclass(frozen=True)
class Case:
    case_id: str
    trace: tuple[Event, ...]
    attributes: Mapping[str, AttributeValue] = field(default_factory=dict)
    derived_attributes: Mapping[str, AttributeValue] = field(default_factory=dict)

    def __post_init__(self):
        if not self.trace:
            raise LogValidationError(f"case {self.case_id!r} has an empty trace")

    @property
    def start(self) -> float:
        return self.trace[0].timestamp

    @property
    def end(self) -> float:
        return self.trace[-1].timestamp

    def attribute(self, name: str) -> AttributeValue | None:
        if name in self.attributes:
            return self.attributes[name]
        return self.derived_attributes.get(name)


@dataclass(frozen=True)
class SchemaEntry:
    kind: str  # numeric | category | instant
    scope: str  # case | event

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown attribute kind {self.kind!r}")
        if self.scope not in ("case", "event"):
            raise ConfigError(f"unknown attribute scope {self.scope!r}")


@dataclass(frozen=True)
class EventLog:
    cases: tuple[Case, ...]
    activity_alphabet: frozenset[str]
    attribute_schema: Mapping[str, SchemaEntry] = field(default_factory=dict)
    derived_schema: Mapping[str, SchemaEntry] = field(default_factory=dict)

    @classmethod
    def build(cls, cases: Iterable[Case], schema: Mapping[str, SchemaEntry] | None = None) -> "EventLog":
        cases = tuple(cases)
        seen: set[str] = set()
        for c in cases:
            if c.case_id in seen:
                raise LogValidationError(f"duplicate case id {c.case_id!r}")
            seen.add(c.case_id)
        alphabet = frozenset(e.activity for c in cases for e in c.trace)
        return cls(cases=cases, activity_alphabet=alphabet, attribute_schema=dict(schema or {}))

    def __len__(self) -> int:
        return len(self.cases)

    def case(self, case_id: str) -> Case:
        for c in self.cases:
            if c.case_id == case_id:
                return c
        raise KeyError(case_id)

    def schema_entry(self, name: str) -> SchemaEntry | None:
        if name in self.attribute_schema:
            return self.attribute_schema[name]
        return self.derived_schema.get(name)

    def digest(self) -> str:
        """Content hash over cases, traces and attributes (order-sensitive)."""
        h = hashlib.sha256()
        for c in self.cases:
            h.update(c.case_id.encode())
            for k in sorted(c.attributes):
                h.update(f"|{k}={c.attributes[k]!r}".encode())
            for e in c.trace:
                h.update(f"|{e.activity}@{e.timestamp!r}".encode())
                for k in sorted(e.attributes):
                    h.update(f",{k}={e.attributes[k]!r}".encode())
            h.update(b";")
        return h.hexdigest()


@dataclass(frozen=True)
class ColumnMapping:
    """Column-to-role assignment for delimited text logs.

    Every header column must be accounted for: the three designated roles,
    an attribute mapping (column name -> kind), or `ignored`.
    """

    case_column: str = "case_id"
    activity_column: str = "event_activity"
    timestamp_column: str = "event_time"
    timestamp_format: str = DEFAULT_TIMESTAMP_FORMAT
    case_attributes: Mapping[str, str] = field(default_factory=dict)
    event_attributes: Mapping[str, str] = field(default_factory=dict)
    ignored: frozenset[str] = frozenset()
    delimiter: str = ","

    def __post_init__(self):
        roles = (self.case_column, self.activity_column, self.timestamp_column)
        if len(set(roles)) != 3:
            raise ConfigError(f"case, activity and timestamp columns must be distinct, got {roles}")
        for col, kind in {**self.case_attributes, **self.event_attributes}.items():
            if kind not in KINDS:
                raise ConfigError(f"column {col!r}: unknown attribute kind {kind!r}")
        overlap = set(self.case_attributes) & set(self.event_attributes)
        if overlap:
            raise ConfigError(f"columns mapped both case- and event-level: {sorted(overlap)}")


def _convert(raw: str, kind: str, fmt: str) -> AttributeValue:
    """Lenient kind conversion: unconvertible values are kept as raw strings
    so that validate_log can report them instead of parsing aborting."""
    raw = raw.strip()
    if kind == NUMERIC:
        try:
            return float(raw)
        except ValueError:
            return raw
    if kind == INSTANT:
        try:
            return parse_instant(raw, fmt)
        except ValueError:
            return raw
    return normalize_category(raw)


def parse_event_log(source: str | io.TextIOBase, mapping: ColumnMapping | None = None) -> EventLog:
    """Parse delimited text (header row required) into an EventLog.

    Events are grouped by case id and traces sorted by timestamp; the sort is
    stable so equal timestamps keep input order. Case-level attribute columns
    must be constant within a case.
    """
    mapping = mapping or ColumnMapping()
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source, delimiter=mapping.delimiter)
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty input: header row required") from None
    header = [h.strip() for h in header]

    for role, col in (
        ("case id", mapping.case_column),
        ("activity", mapping.activity_column),
        ("timestamp", mapping.timestamp_column),
    ):
        if col not in header:
            raise ConfigError(f"{role} column {col!r} not in header {header}")
    known = {mapping.case_column, mapping.activity_column, mapping.timestamp_column}
    known |= set(mapping.case_attributes) | set(mapping.event_attributes) | set(mapping.ignored)
    unmapped = [c for c in header if c not in known]
    if unmapped:
        raise ConfigError(f"unmapped columns {unmapped}: map them as attributes or ignore them")

    idx = {col: header.index(col) for col in header}
    events_by_case: dict[str, list[Event]] = {}
    case_attrs: dict[str, dict[str, AttributeValue]] = {}

    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # blank line
        if len(row) != len(header):
            raise ParseError(
                f"expected {len(header)} fields, got {len(row)}", line=lineno
            )
        case_id = row[idx[mapping.case_column]].strip()
        if not case_id:
            raise ParseError("empty case id", line=lineno)
        activity = row[idx[mapping.activity_column]].strip()
        if not activity:
            raise ParseError("empty activity label", line=lineno)
        raw_ts = row[idx[mapping.timestamp_column]]
        try:
            ts = parse_instant(raw_ts, mapping.timestamp_format)
        except ValueError:
            raise ParseError(
                f"timestamp {raw_ts.strip()!r} does not match format "
                f"{mapping.timestamp_format!r}",
                line=lineno,
            ) from None

        ev_attrs: dict[str, AttributeValue] = {}
        for col, kind in mapping.event_attributes.items():
            raw = row[idx[col]]
            if raw.strip():
                ev_attrs[col] = _convert(raw, kind, mapping.timestamp_format)

        bucket = case_attrs.setdefault(case_id, {})
        for col, kind in mapping.case_attributes.items():
            raw = row[idx[col]]
            if not raw.strip():
                continue
            value = _convert(raw, kind, mapping.timestamp_format)
            if col in bucket and bucket[col] != value:
                raise LogValidationError(
                    f"case {case_id!r}: case-level attribute {col!r} takes "
                    f"conflicting values {bucket[col]!r} and {value!r}"
                )
            bucket[col] = value

        events_by_case.setdefault(case_id, []).append(
            Event(activity=activity, timestamp=ts, attributes=ev_attrs)
        )

    schema: dict[str, SchemaEntry] = {}
    for col, kind in mapping.case_attributes.items():
        schema[col] = SchemaEntry(kind=kind, scope="case")
    for col, kind in mapping.event_attributes.items():
        schema[col] = SchemaEntry(kind=kind, scope="event")

    cases = []
    for case_id, events in events_by_case.items():
        trace = tuple(sorted(events, key=lambda e: e.timestamp))
        cases.append(Case(case_id=case_id, trace=trace, attributes=case_attrs[case_id]))
    return EventLog.build(cases, schema)


def _format_value(value: AttributeValue, kind: str, fmt: str) -> str:
    if isinstance(value, str):
        return value
    if kind == INSTANT:
        return format_instant(value, fmt)
    if value == int(value) and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


def write_event_log(log: EventLog, mapping: ColumnMapping | None = None) -> str:
    """Serialize back to delimited text; re-parsing yields an equal log."""
    mapping = mapping or ColumnMapping()
    out = io.StringIO()
    writer = csv.writer(out, delimiter=mapping.delimiter, lineterminator="\n")
    case_cols = list(mapping.case_attributes)
    event_cols = list(mapping.event_attributes)
    header = [mapping.case_column, mapping.activity_column, mapping.timestamp_column]
    header += case_cols + event_cols
    writer.writerow(header)
    for case in log.cases:
        for event in case.trace:
            row = [
                case.case_id,
                event.activity,
                format_instant(event.timestamp, mapping.timestamp_format),
            ]
            for col in case_cols:
                value = case.attributes.get(col)
                row.append("" if value is None else _format_value(value, mapping.case_attributes[col], mapping.timestamp_format))
            for col in event_cols:
                value = event.attributes.get(col)
                row.append("" if value is None else _format_value(value, mapping.event_attributes[col], mapping.timestamp_format))
            writer.writerow(row)
    return out.getvalue()


def validate_log(log: EventLog) -> ValidationReport:
    """Structural findings: kind violations, schema misses, trace order."""
    report = ValidationReport()
    for case in log.cases:
        if not case.trace:
            report.add("error", case.case_id, "empty trace")
            continue
        last = case.trace[0].timestamp
        for event in case.trace[1:]:
            if event.timestamp < last:
                report.add("error", case.case_id, "trace is not sorted by timestamp")
                break
            last = event.timestamp

        seen: dict[str, set[AttributeValue]] = {}
        for name, value in case.attributes.items():
            seen.setdefault(name, set()).add(value)
            _check_kind(report, log, case.case_id, name, value, expect_scope="case")
        for event in case.trace:
            for name, value in event.attributes.items():
                entry = log.schema_entry(name)
                if entry is not None and entry.scope == "case":
                    seen.setdefault(name, set()).add(value)
                _check_kind(report, log, case.case_id, name, value, expect_scope="event")
        for name, values in seen.items():
            if len(values) > 1:
                report.add(
                    "error",
                    case.case_id,
                    f"case-level attribute {name!r} takes {len(values)} distinct values",
                )
    return report


def _check_kind(report: ValidationReport, log: EventLog, case_id: str,
                name: str, value: AttributeValue, expect_scope: str) -> None:
    entry = log.schema_entry(name)
    if entry is None:
        report.add("error", case_id, f"attribute {name!r} is not in the schema")
        return
    if entry.kind in (NUMERIC, INSTANT) and isinstance(value, str):
        report.add(
            "error",
            case_id,
            f"attribute {name!r} is declared {entry.kind} but holds {value!r}",
        )
    elif entry.kind == CATEGORY and not isinstance(value, str):
        report.add(
            "error",
            case_id,
            f"attribute {name!r} is declared category but holds {value!r}",
        )


@dataclass(frozen=True)
class SyntheticLogSpec:
    """Generator recipe for test logs: weighted trace patterns, per-arc
    uniform delays (seconds), per-attribute samplers, and a case start
    window. Fully deterministic for a given seed."""

    trace_patterns: tuple[tuple[tuple[str, ...], float], ...]
    case_count: int
    start_window: tuple[float, float]
    inter_event_delay: Mapping[tuple[str, str], tuple[float, float]] = field(default_factory=dict)
    default_delay: tuple[float, float] = (60.0, 3600.0)
    attribute_generators: Mapping[str, Mapping] = field(default_factory=dict)
    rng_seed: int = 0

    def __post_init__(self):
        if self.case_count < 1:
            raise ConfigError("case_count must be >= 1")
        if not self.trace_patterns:
            raise ConfigError("at least one trace pattern required")
        for pattern, weight in self.trace_patterns:
            if weight <= 0:
                raise ConfigError(f"pattern {pattern} has non-positive weight {weight}")
            if not pattern:
                raise ConfigError("empty trace pattern")
        if not self.start_window[0] <= self.start_window[1]:
            raise ConfigError("start_window start must not exceed end")
        for arc, (lo, hi) in self.inter_event_delay.items():
            if lo > hi:
                raise ConfigError(f"delay bounds inverted for arc {arc}")
        lo, hi = self.default_delay
        if lo > hi:
            raise ConfigError("default delay bounds inverted")


def generate_synthetic_log(spec: SyntheticLogSpec) -> EventLog:
    """Deterministic synthetic EventLog per the spec (seeded RNG)."""
    rng = random.Random(spec.rng_seed)
    patterns = [p for p, _ in spec.trace_patterns]
    weights = [w for _, w in spec.trace_patterns]

    schema: dict[str, SchemaEntry] = {}
    for name, gen in spec.attribute_generators.items():
        if "categories" in gen:
            schema[name] = SchemaEntry(kind=CATEGORY, scope="case")
        elif "low" in gen and "high" in gen:
            schema[name] = SchemaEntry(kind=NUMERIC, scope="case")
        else:
            raise ConfigError(
                f"attribute generator {name!r} needs 'categories' or 'low'/'high'"
            )

    cases = []
    for i in range(spec.case_count):
        pattern = rng.choices(patterns, weights=weights, k=1)[0]
        start = rng.uniform(*spec.start_window)
        ts = start
        events = [Event(activity=pattern[0], timestamp=ts)]
        for prev, act in zip(pattern, pattern[1:]):
            lo, hi = spec.inter_event_delay.get((prev, act), spec.default_delay)
            ts += rng.uniform(lo, hi)
            events.append(Event(activity=act, timestamp=ts))

        attrs: dict[str, AttributeValue] = {}
        for name, gen in spec.attribute_generators.items():
            if "categories" in gen:
                cats = list(gen["categories"].items())
                attrs[name] = rng.choices(
                    [c for c, _ in cats], weights=[w for _, w in cats], k=1
                )[0]
            else:
                attrs[name] = rng.uniform(gen["low"], gen["high"])

        cases.append(Case(case_id=f"case-{i:05d}", trace=tuple(events), attributes=attrs))
    return EventLog.build(cases, schema)


def with_derived(log: EventLog, derived: Mapping[str, Mapping[str, AttributeValue]],
                 derived_schema: Mapping[str, SchemaEntry]) -> EventLog:
    """New log whose cases carry the given derived attributes."""
    cases = tuple(
        replace(c, derived_attributes=dict(derived.get(c.case_id, {}))) for c in log.cases
    )
    return replace(log, cases=cases, derived_schema=dict(derived_schema))
