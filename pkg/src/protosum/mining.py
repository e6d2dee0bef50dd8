"""Causal structure discovery and timing extraction from event logs.

The directly-follows graph counts adjacent activity pairs over all traces; a
dependency measure thresholds it into a causal graph. Replay-style matching
then binds occurrences of a causally related pair inside each case, yielding
signed durations, and those durations feed the derived case attributes
(waiting times, trigger counts, throughput) that statements quantify over.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import ConfigError, UnknownActivityError
from .event_log import (CATEGORY, NUMERIC, Case, EventLog, SchemaEntry,
                        with_derived)


@dataclass(frozen=True)
class DirectlyFollowsGraph:
    counts: Mapping[tuple[str, str], int]
    activity_totals: Mapping[str, int]

    def count(self, x: str, y: str) -> int:
        return self.counts.get((x, y), 0)


def build_dfg(log: EventLog) -> DirectlyFollowsGraph:
    """Count the adjacent pairs (position i, i+1) across every trace."""
    counts: Counter[tuple[str, str]] = Counter()
    totals: Counter[str] = Counter()
    for case in log.cases:
        activities = [e.activity for e in case.trace]
        totals.update(activities)
        counts.update(zip(activities, activities[1:]))
    return DirectlyFollowsGraph(counts=dict(counts), activity_totals=dict(totals))


def dependency_score(dfg: DirectlyFollowsGraph, x: str, y: str) -> float:
    """Heuristic dependency of x on y in [-1, 1]; self-loops score
    |x>x| / (|x>x| + 1)."""
    if x == y:
        n = dfg.count(x, x)
        return n / (n + 1)
    fwd, rev = dfg.count(x, y), dfg.count(y, x)
    return (fwd - rev) / (fwd + rev + 1)


@dataclass(frozen=True)
class CausalGraph:
    arcs: Mapping[tuple[str, str], float]  # (source, target) -> dependency score
    dependency_min: float
    frequency_min: int

    def related(self, x: str, y: str) -> bool:
        return (x, y) in self.arcs or (y, x) in self.arcs

    def sorted_arcs(self) -> list[tuple[str, str]]:
        return sorted(self.arcs)


def discover_causal_graph(dfg: DirectlyFollowsGraph, dependency_min: float = 0.9,
                          frequency_min: int = 5) -> CausalGraph:
    """Keep arcs whose pair count and dependency score clear both thresholds."""
    if not 0.0 <= dependency_min < 1.0:
        raise ConfigError(f"dependency_min must be in [0, 1), got {dependency_min}")
    if frequency_min < 1:
        raise ConfigError(f"frequency_min must be >= 1, got {frequency_min}")
    arcs = {}
    for (x, y), n in dfg.counts.items():
        if n < frequency_min:
            continue
        score = dependency_score(dfg, x, y)
        if score >= dependency_min:
            arcs[(x, y)] = score
    return CausalGraph(arcs=arcs, dependency_min=dependency_min, frequency_min=frequency_min)


def causal_graph_dot(graph: CausalGraph, dfg: DirectlyFollowsGraph | None = None) -> str:
    """DOT rendering: nodes are activities, edges carry score (and count)."""
    nodes: set[str] = set()
    for src, tgt in graph.arcs:
        nodes.update((src, tgt))
    if dfg is not None:
        nodes.update(dfg.activity_totals)
    lines = ["digraph causal {"]
    for node in sorted(nodes):
        lines.append(f'  "{node}";')
    for src, tgt in graph.sorted_arcs():
        score = graph.arcs[(src, tgt)]
        label = f"{score:.3f}"
        if dfg is not None:
            label += f" ({dfg.count(src, tgt)})"
        lines.append(f'  "{src}" -> "{tgt}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class RelationSample:
    """One bound occurrence of a causally related activity pair in a case.

    signed_duration is target time minus source time, so it is positive when
    the queried source precedes the queried target.
    """

    case_id: str
    source_activity: str
    target_activity: str
    signed_duration: float


def _bind_pairs(case: Case, src: str, tgt: str) -> list[tuple[int, int]]:
    """Match each tgt occurrence to the nearest preceding unmatched src
    occurrence (trace positions). Unmatched targets yield nothing."""
    pairs = []
    used: set[int] = set()
    src_positions = [i for i, e in enumerate(case.trace) if e.activity == src]
    for j, e in enumerate(case.trace):
        if e.activity != tgt:
            continue
        candidate = None
        for i in src_positions:
            if i >= j:
                break
            if i not in used:
                candidate = i
        if candidate is not None:
            used.add(candidate)
            pairs.append((candidate, j))
    return pairs


def compute_relation_samples(log: EventLog, graph: CausalGraph,
                             source: str, target: str) -> list[RelationSample]:
    """Signed durations for every bound occurrence of the queried pair.

    Pairs with no causal arc in either direction produce no samples. When the
    arc runs opposite to the query, bindings still follow the arc and the
    sign flips with the query orientation.
    """
    for name in (source, target):
        if name not in log.activity_alphabet:
            raise UnknownActivityError(f"activity {name!r} not in the log alphabet")
    if (source, target) in graph.arcs:
        bind_src, bind_tgt = source, target
        flipped = False
    elif (target, source) in graph.arcs:
        bind_src, bind_tgt = target, source
        flipped = True
    else:
        return []

    samples = []
    for case in log.cases:
        for i, j in _bind_pairs(case, bind_src, bind_tgt):
            delta = case.trace[j].timestamp - case.trace[i].timestamp
            samples.append(RelationSample(
                case_id=case.case_id,
                source_activity=source,
                target_activity=target,
                signed_duration=-delta if flipped else delta,
            ))
    return samples


AGGREGATIONS = ("first", "mean", "max")


def aggregate_durations(durations: list[float], aggregation: str) -> float:
    if aggregation == "first":
        return durations[0]
    if aggregation == "mean":
        return sum(durations) / len(durations)
    if aggregation == "max":
        return max(durations)
    raise ConfigError(f"unknown aggregation {aggregation!r}")


def case_durations(log: EventLog, graph: CausalGraph, source: str,
                   target: str) -> dict[str, list[float]]:
    """Per-case signed durations for a pair, in trace binding order."""
    grouped: dict[str, list[float]] = {}
    for s in compute_relation_samples(log, graph, source, target):
        grouped.setdefault(s.case_id, []).append(s.signed_duration)
    return grouped


@dataclass(frozen=True)
class DerivedAttributeSpec:
    """Recipe for one feature computed from trace structure.

    kind: waiting_time | trigger_count | throughput_time | event_count |
    activity_occurred. waiting_time and trigger_count need source/target;
    activity_occurred needs activity.
    """

    name: str
    kind: str
    source: str | None = None
    target: str | None = None
    activity: str | None = None
    aggregation: str = "first"

    def __post_init__(self):
        if self.kind in ("waiting_time", "trigger_count"):
            if not (self.source and self.target):
                raise ConfigError(f"derived {self.name!r}: {self.kind} needs source and target")
        elif self.kind == "activity_occurred":
            if not self.activity:
                raise ConfigError(f"derived {self.name!r}: activity_occurred needs activity")
        elif self.kind not in ("throughput_time", "event_count"):
            raise ConfigError(f"derived {self.name!r}: unknown kind {self.kind!r}")
        if self.aggregation not in AGGREGATIONS:
            raise ConfigError(f"derived {self.name!r}: unknown aggregation {self.aggregation!r}")


def derive_case_attributes(log: EventLog, graph: CausalGraph,
                           specs: Iterable[DerivedAttributeSpec]) -> EventLog:
    """Fill every case's derived attributes per the specs.

    A waiting time is absent (not zero) for cases where the pair never
    bound; memberships over absent attributes evaluate to 0 downstream.
    """
    specs = list(specs)
    schema: dict[str, SchemaEntry] = {}
    for spec in specs:
        if spec.name in log.attribute_schema:
            raise ConfigError(f"derived {spec.name!r} collides with a raw attribute")
        for act in (spec.source, spec.target, spec.activity):
            if act is not None and act not in log.activity_alphabet:
                raise ConfigError(
                    f"derived {spec.name!r} references unknown activity {act!r}"
                )
        kind = CATEGORY if spec.kind == "activity_occurred" else NUMERIC
        schema[spec.name] = SchemaEntry(kind=kind, scope="case")

    pair_durations: dict[tuple[str, str], dict[str, list[float]]] = {}
    for spec in specs:
        if spec.kind in ("waiting_time", "trigger_count"):
            key = (spec.source, spec.target)
            if key not in pair_durations:
                pair_durations[key] = case_durations(log, graph, *key)

    derived: dict[str, dict[str, float | str]] = {c.case_id: {} for c in log.cases}
    for case in log.cases:
        row = derived[case.case_id]
        for spec in specs:
            if spec.kind == "waiting_time":
                durations = pair_durations[(spec.source, spec.target)].get(case.case_id)
                if durations:
                    row[spec.name] = aggregate_durations(durations, spec.aggregation)
            elif spec.kind == "trigger_count":
                durations = pair_durations[(spec.source, spec.target)].get(case.case_id)
                row[spec.name] = float(len(durations) if durations else 0)
            elif spec.kind == "throughput_time":
                row[spec.name] = case.end - case.start
            elif spec.kind == "event_count":
                row[spec.name] = float(len(case.trace))
            elif spec.kind == "activity_occurred":
                occurred = any(e.activity == spec.activity for e in case.trace)
                row[spec.name] = "yes" if occurred else "no"
    return with_derived(log, derived, schema)
