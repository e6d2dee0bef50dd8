"""Candidate enumeration, truth evaluation, filtering, ranking, realization.

The pipeline walks the space of bindable statements declared by the
knowledge base, scores each against the log, keeps the true / non-vacuous /
relevant ones, collapses near-duplicates, and renders the survivors into
English sentences with deterministic ordering.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Iterator

from .errors import ConfigError, ProtosumError
from .event_log import EventLog
from .fuzzy import LinguisticVariable, quantifier_eval, value_membership
from .kb import KnowledgeBase
from .mining import (CausalGraph, aggregate_durations, build_dfg, case_durations,
                     derive_case_attributes, discover_causal_graph)
from .protoforms import (DEVIANCE, EXPECTATION_DEVIANCE, FAMILIES, RELATION,
                         RELATION_QUALIFIED, TEMPORAL_ATTR,
                         TEMPORAL_ATTR_QUALIFIED, TYPE1, TYPE2,
                         AttributeProperty, ProtoformInstance,
                         RelationProperty, TimeInterval, truth_deviance,
                         truth_expectation_deviance)

logger = logging.getLogger(__name__)

EPOCH_ISO = "1970-01-01T00:00:00Z"


@dataclass(frozen=True)
class SubStatementStats:
    """Masses backing one sub-statement's truth ratio, plus the summarizer
    value it claims and (for subgroups) the modal value actually observed."""

    satisfying_mass: float
    relevant_mass: float
    claimed_value: str | None = None
    modal_value: str | None = None


def deviance_relevance(s1: SubStatementStats, s2: SubStatementStats, alpha: float) -> bool:
    """Is the contrasting subgroup statistically and semantically deviant?

    Two-sided two-proportion z-test (unpooled) on the rounded satisfaction
    counts of subgroup vs. general referential, gated by a support floor of
    5 and by the subgroup's modal value differing from the general claim.
    """
    if s2.relevant_mass < 5:
        return False
    n1, n2 = round(s1.relevant_mass), round(s2.relevant_mass)
    if n1 < 1 or n2 < 1:
        return False
    p1 = min(round(s1.satisfying_mass), n1) / n1
    p2 = min(round(s2.satisfying_mass), n2) / n2
    variance = p1 * (1.0 - p1) / n1 + p2 * (1.0 - p2) / n2
    if variance == 0.0:
        p_value = 1.0 if p1 == p2 else 0.0
    else:
        z = (p1 - p2) / math.sqrt(variance)
        p_value = math.erfc(abs(z) / math.sqrt(2.0))
    if p_value >= alpha:
        return False
    if s2.modal_value is not None and s2.modal_value == s1.claimed_value:
        return False
    return True


class Evaluator:
    """Scores instances against one (log, graph, kb) triple.

    Per-case membership vectors and sub-statement masses are cached so that
    composite families and large enumerations stay cheap; inputs are treated
    as read-only throughout.
    """

    def __init__(self, log: EventLog, graph: CausalGraph, kb: KnowledgeBase):
        self.log = log
        self.graph = graph
        self.kb = kb
        self._attr_vecs: dict[tuple, list[float]] = {}
        self._interval_vecs: dict[str, list[float]] = {}
        self._relation_vecs: dict[tuple, list[float]] = {}
        self._pair_durations: dict[tuple[str, str], dict[str, list[float]]] = {}
        self._masses: dict[tuple, tuple[float, float]] = {}
        self._modal: dict[tuple, str] = {}

    # membership vectors ---------------------------------------------------

    def attr_vector(self, prop: AttributeProperty) -> list[float]:
        key = (prop.attribute, prop.value.shape_key())
        vec = self._attr_vecs.get(key)
        if vec is None:
            if self.log.schema_entry(prop.attribute) is None:
                raise ConfigError(
                    f"attribute {prop.attribute!r} is neither a log column nor a derived attribute"
                )
            vec = []
            for case in self.log.cases:
                x = case.attribute(prop.attribute)
                vec.append(0.0 if x is None else value_membership(prop.value, x))
            self._attr_vecs[key] = vec
        return vec

    def interval_vector(self, interval: TimeInterval) -> list[float]:
        vec = self._interval_vecs.get(interval.name)
        if vec is None:
            vec = [1.0 if interval.contains_case(c) else 0.0 for c in self.log.cases]
            self._interval_vecs[interval.name] = vec
        return vec

    def relation_vector(self, rel: RelationProperty) -> list[float]:
        key = (rel.source, rel.target, rel.value.shape_key(), rel.aggregation)
        vec = self._relation_vecs.get(key)
        if vec is None:
            pair = (rel.source, rel.target)
            if pair not in self._pair_durations:
                self._pair_durations[pair] = case_durations(
                    self.log, self.graph, rel.source, rel.target
                )
            durations = self._pair_durations[pair]
            vec = []
            for case in self.log.cases:
                ds = durations.get(case.case_id)
                if not ds:
                    vec.append(0.0)
                else:
                    x = aggregate_durations(ds, rel.aggregation)
                    vec.append(value_membership(rel.value, x))
            self._relation_vecs[key] = vec
        return vec

    # sigma-count masses ---------------------------------------------------

    @staticmethod
    def _sum_min(*vecs: list[float]) -> float:
        return sum(map(min, *vecs)) if len(vecs) > 1 else sum(vecs[0])

    def plain_masses(self, summarizer_vec: list[float]) -> tuple[float, float]:
        return sum(summarizer_vec), float(len(self.log.cases))

    def qualified_masses(self, qualifier_vec, summarizer_vec) -> tuple[float, float]:
        return self._sum_min(qualifier_vec, summarizer_vec), sum(qualifier_vec)

    def temporal_masses(self, interval: TimeInterval, summarizer_key,
                        summarizer_vec) -> tuple[float, float]:
        key = ("t", interval.name, summarizer_key)
        if key not in self._masses:
            ti = self.interval_vector(interval)
            self._masses[key] = (self._sum_min(ti, summarizer_vec), sum(ti))
        return self._masses[key]

    def temporal_qualified_masses(self, interval, qualifier: AttributeProperty,
                                  summarizer_key, summarizer_vec) -> tuple[float, float]:
        qkey = (qualifier.attribute, qualifier.value.shape_key())
        key = ("tq", interval.name, qkey, summarizer_key)
        if key not in self._masses:
            ti = self.interval_vector(interval)
            c = self.attr_vector(qualifier)
            self._masses[key] = (
                self._sum_min(ti, c, summarizer_vec),
                self._sum_min(ti, c),
            )
        return self._masses[key]

    def subgroup_mass(self, interval: TimeInterval | None,
                      qualifier: AttributeProperty | None) -> float:
        """Crisp-or-fuzzy relevant mass of an (interval, qualifier) scope."""
        vecs = []
        if interval is not None:
            vecs.append(self.interval_vector(interval))
        if qualifier is not None:
            vecs.append(self.attr_vector(qualifier))
        if not vecs:
            return float(len(self.log.cases))
        return self._sum_min(*vecs)

    def modal_value(self, interval: TimeInterval, qualifier: AttributeProperty,
                    variable: LinguisticVariable) -> str:
        """Name of the variable's value with the largest mass in the subgroup."""
        qkey = (qualifier.attribute, qualifier.value.shape_key())
        key = (interval.name, qkey, variable.name)
        if key not in self._modal:
            ti = self.interval_vector(interval)
            c = self.attr_vector(qualifier)
            best_name, best_mass = variable.values[0].name, -1.0
            for value in variable.values:
                prop = AttributeProperty(variable.attribute, value, variable.name)
                mass = self._sum_min(ti, c, self.attr_vector(prop))
                if mass > best_mass:
                    best_name, best_mass = value.name, mass
            self._modal[key] = best_name
        return self._modal[key]

    # instance evaluation --------------------------------------------------

    def _summarizer_parts(self, summarizer) -> tuple[tuple, list[float]]:
        if isinstance(summarizer, RelationProperty):
            key = ("rel", summarizer.source, summarizer.target,
                   summarizer.value.shape_key(), summarizer.aggregation)
            return key, self.relation_vector(summarizer)
        key = ("attr", summarizer.attribute, summarizer.value.shape_key())
        return key, self.attr_vector(summarizer)

    def evaluate(self, inst: ProtoformInstance) -> ProtoformInstance:
        """Fill truth, support, vacuous and (deviance families) relevant."""
        alpha = self.kb.limits.relevance_alpha
        if inst.family == DEVIANCE:
            p1_key, p1_vec = self._summarizer_parts(inst.summarizer)
            num1, den1 = self.temporal_masses(inst.interval, p1_key, p1_vec)
            p2_key, p2_vec = self._summarizer_parts(inst.summarizer2)
            num2, den2 = self.temporal_qualified_masses(
                inst.interval, inst.qualifier, p2_key, p2_vec)
            t1 = self._ratio(inst.quantifier, num1, den1)
            t2 = self._ratio(inst.quantifier2, num2, den2)
            inst.truth = truth_deviance(t1, t2)
            inst.support = den2
            inst.vacuous = den1 == 0.0 or den2 == 0.0
            if not inst.vacuous:
                try:
                    variable = self.kb.variable(inst.summarizer.variable)
                except ConfigError:
                    variable = self._variable_over(inst.summarizer.attribute)
                if variable is None:
                    raise ConfigError(
                        f"no variable over attribute {inst.summarizer.attribute!r}"
                    )
                inst.relevant = deviance_relevance(
                    SubStatementStats(num1, den1, claimed_value=inst.summarizer.value.name),
                    SubStatementStats(
                        num2, den2,
                        modal_value=self.modal_value(inst.interval, inst.qualifier, variable),
                    ),
                    alpha,
                )
            else:
                inst.relevant = False
            return inst

        if inst.family == EXPECTATION_DEVIANCE:
            exp_prop = AttributeProperty(inst.expected.attribute, inst.expected.value)
            e_key, e_vec = self._summarizer_parts(exp_prop)
            num1, den1 = self.temporal_masses(inst.interval, e_key, e_vec)
            p2_key, p2_vec = self._summarizer_parts(inst.summarizer2)
            num2, den2 = self.temporal_qualified_masses(
                inst.interval, inst.qualifier, p2_key, p2_vec)
            t2 = self._ratio(inst.quantifier2, num2, den2)
            inst.truth = truth_expectation_deviance(t2)
            inst.support = den2
            inst.vacuous = den2 == 0.0
            if not inst.vacuous:
                modal = None
                variable = self._variable_over(inst.summarizer2.attribute)
                if variable is not None:
                    modal = self.modal_value(inst.interval, inst.qualifier, variable)
                inst.relevant = deviance_relevance(
                    SubStatementStats(num1, den1, claimed_value=inst.expected.value.name),
                    SubStatementStats(num2, den2, modal_value=modal),
                    alpha,
                )
            else:
                inst.relevant = False
            return inst

        s_key, s_vec = self._summarizer_parts(inst.summarizer)
        if inst.family == TYPE1:
            num, den = self.plain_masses(s_vec)
        elif inst.family == TYPE2:
            num, den = self.qualified_masses(self.attr_vector(inst.qualifier), s_vec)
        elif inst.family in (TEMPORAL_ATTR, RELATION):
            num, den = self.temporal_masses(inst.interval, s_key, s_vec)
        elif inst.family in (TEMPORAL_ATTR_QUALIFIED, RELATION_QUALIFIED):
            num, den = self.temporal_qualified_masses(
                inst.interval, inst.qualifier, s_key, s_vec)
        else:
            raise ConfigError(f"unknown family {inst.family!r}")
        inst.truth = self._ratio(inst.quantifier, num, den)
        inst.support = den
        inst.vacuous = den == 0.0
        return inst

    def _variable_over(self, attribute: str) -> LinguisticVariable | None:
        for v in self.kb.variables:
            if v.attribute == attribute:
                return v
        return None

    @staticmethod
    def _ratio(q, num: float, den: float) -> float:
        if den == 0.0:
            return 0.0
        return quantifier_eval(q, num / den)


def _role_variables(kb: KnowledgeBase, role: str) -> list[LinguisticVariable]:
    return [v for v in kb.variables if role in v.roles]


def _qualifier_bindings(kb: KnowledgeBase, exclude_attr: str | None = None
                        ) -> Iterator[AttributeProperty]:
    for var in _role_variables(kb, "qualifier"):
        if exclude_attr is not None and var.attribute == exclude_attr:
            continue
        for value in var.values:
            yield AttributeProperty(var.attribute, value, var.name)


def _summarizer_bindings(kb: KnowledgeBase, exclude_attr: str | None = None
                         ) -> Iterator[AttributeProperty]:
    for var in _role_variables(kb, "summarizer"):
        if exclude_attr is not None and var.attribute == exclude_attr:
            continue
        for value in var.values:
            yield AttributeProperty(var.attribute, value, var.name)


def _relation_bindings(kb: KnowledgeBase, graph: CausalGraph) -> Iterator[RelationProperty]:
    for src, tgt in graph.sorted_arcs():
        for vocab_key, (qsrc, qtgt) in (("after", (src, tgt)), ("before", (tgt, src))):
            vocab = kb.relation_vocab.get(vocab_key)
            if vocab is None:
                continue
            for value in vocab.values:
                yield RelationProperty(source=qsrc, target=qtgt, value=value,
                                       variable=vocab.name)


def enumerate_candidates(kb: KnowledgeBase, log: EventLog, graph: CausalGraph,
                         families: Iterable[str] | None = None,
                         prune_vacuous: bool = True,
                         evaluator: Evaluator | None = None
                         ) -> Iterator[ProtoformInstance]:
    """Yield every bindable instance of the requested families, in
    deterministic knowledge-base declaration order.

    With prune_vacuous, interval/qualifier scopes whose relevant mass is zero
    are skipped before the inner summarizer loops run.
    """
    if families is None:
        wanted = list(FAMILIES)
    else:
        requested = set(families)
        unknown = requested - set(FAMILIES)
        if unknown:
            raise ConfigError(f"unknown families: {sorted(unknown)}")
        wanted = [f for f in FAMILIES if f in requested]
    ev = evaluator or Evaluator(log, graph, kb)

    def scope_alive(interval: TimeInterval | None,
                    qualifier: AttributeProperty | None) -> bool:
        if not prune_vacuous:
            return True
        try:
            return ev.subgroup_mass(interval, qualifier) > 0.0
        except ProtosumError:
            return True  # let evaluation report the problem per candidate

    for family in wanted:
        if family == TYPE1:
            for q in kb.quantifiers:
                for summ in _summarizer_bindings(kb):
                    yield ProtoformInstance(family=family, quantifier=q, summarizer=summ)
        elif family == TYPE2:
            for q in kb.quantifiers:
                for qual in _qualifier_bindings(kb):
                    if not scope_alive(None, qual):
                        continue
                    for summ in _summarizer_bindings(kb, exclude_attr=qual.attribute):
                        yield ProtoformInstance(family=family, quantifier=q,
                                                qualifier=qual, summarizer=summ)
        elif family == TEMPORAL_ATTR:
            for interval in kb.intervals:
                if not scope_alive(interval, None):
                    continue
                for q in kb.quantifiers:
                    for summ in _summarizer_bindings(kb):
                        yield ProtoformInstance(family=family, quantifier=q,
                                                interval=interval, summarizer=summ)
        elif family == TEMPORAL_ATTR_QUALIFIED:
            for interval in kb.intervals:
                if not scope_alive(interval, None):
                    continue
                for q in kb.quantifiers:
                    for qual in _qualifier_bindings(kb):
                        if not scope_alive(interval, qual):
                            continue
                        for summ in _summarizer_bindings(kb, exclude_attr=qual.attribute):
                            yield ProtoformInstance(family=family, quantifier=q,
                                                    interval=interval, qualifier=qual,
                                                    summarizer=summ)
        elif family == RELATION:
            for interval in kb.intervals:
                if not scope_alive(interval, None):
                    continue
                for q in kb.quantifiers:
                    for rel in _relation_bindings(kb, graph):
                        yield ProtoformInstance(family=family, quantifier=q,
                                                interval=interval, summarizer=rel)
        elif family == RELATION_QUALIFIED:
            for interval in kb.intervals:
                if not scope_alive(interval, None):
                    continue
                for q in kb.quantifiers:
                    for qual in _qualifier_bindings(kb):
                        if not scope_alive(interval, qual):
                            continue
                        for rel in _relation_bindings(kb, graph):
                            yield ProtoformInstance(family=family, quantifier=q,
                                                    interval=interval, qualifier=qual,
                                                    summarizer=rel)
        elif family == DEVIANCE:
            for interval in kb.intervals:
                if not scope_alive(interval, None):
                    continue
                for q1 in kb.quantifiers:
                    for q2 in kb.quantifiers:
                        for qual in _qualifier_bindings(kb):
                            if not scope_alive(interval, qual):
                                continue
                            for var in _role_variables(kb, "summarizer"):
                                if var.attribute == qual.attribute or len(var.values) < 2:
                                    continue
                                for p1 in var.values:
                                    for p2 in var.values:
                                        if p2.name == p1.name:
                                            continue
                                        yield ProtoformInstance(
                                            family=family, quantifier=q1, quantifier2=q2,
                                            interval=interval, qualifier=qual,
                                            summarizer=AttributeProperty(var.attribute, p1, var.name),
                                            summarizer2=AttributeProperty(var.attribute, p2, var.name),
                                        )
        elif family == EXPECTATION_DEVIANCE:
            for interval in kb.intervals:
                if not scope_alive(interval, None):
                    continue
                for expected in kb.expected_values:
                    var = next((v for v in kb.variables
                                if v.attribute == expected.attribute), None)
                    if var is None:
                        continue
                    for q2 in kb.quantifiers:
                        for qual in _qualifier_bindings(kb, exclude_attr=expected.attribute):
                            if not scope_alive(interval, qual):
                                continue
                            for p2 in var.values:
                                yield ProtoformInstance(
                                    family=family, quantifier2=q2, interval=interval,
                                    qualifier=qual,
                                    summarizer2=AttributeProperty(var.attribute, p2, var.name),
                                    expected=expected,
                                )


def evaluate_and_filter(candidates: Iterable[ProtoformInstance], log: EventLog,
                        graph: CausalGraph, kb: KnowledgeBase,
                        include_rejected: bool = False,
                        evaluator: Evaluator | None = None) -> list[ProtoformInstance]:
    """Evaluate every candidate; keep those at or above min_truth that are
    neither vacuous nor (for deviance families) irrelevant. Evaluation errors
    are logged per candidate and never abort the batch."""
    ev = evaluator or Evaluator(log, graph, kb)
    kept = []
    for cand in candidates:
        try:
            ev.evaluate(cand)
        except ProtosumError as exc:
            logger.warning("skipping candidate %s: %s", cand.bindings(), exc)
            continue
        keep = (not cand.vacuous and cand.relevant
                and cand.truth >= kb.limits.min_truth)
        if keep or include_rejected:
            kept.append(cand)
    return kept


def realize(inst: ProtoformInstance, kb: KnowledgeBase) -> str:
    """Render the instance through its family template."""
    slots: dict[str, str] = {}
    if inst.interval is not None:
        slots["interval"] = inst.interval.name
    if inst.qualifier is not None:
        slots["qualifier"] = inst.qualifier.display()
    if isinstance(inst.summarizer, RelationProperty):
        rel = inst.summarizer
        slots["relation"] = kb.template("relation_phrase").format(
            source=kb.activity_phrase(rel.source),
            target=kb.activity_phrase(rel.target),
            relation=rel.value.text or rel.value.name,
        )
    elif inst.summarizer is not None:
        slots["summarizer"] = inst.summarizer.display()

    if inst.family == DEVIANCE:
        slots["quantifier1"] = inst.quantifier.name
        slots["quantifier2"] = inst.quantifier2.name
        slots["summarizer1"] = inst.summarizer.display()
        slots["summarizer2"] = inst.summarizer2.display()
    elif inst.family == EXPECTATION_DEVIANCE:
        slots["quantifier"] = inst.quantifier2.name
        slots["summarizer"] = inst.summarizer2.display()
        slots["expected"] = inst.expected.text
    else:
        slots["quantifier"] = inst.quantifier.name

    template = kb.template(inst.family)
    try:
        return template.format_map(slots)
    except KeyError as exc:
        raise ConfigError(
            f"template for {inst.family} references unknown slot {exc.args[0]!r}"
        ) from None


@dataclass(frozen=True)
class SummaryEntry:
    sentence: str
    family: str
    truth: float
    support: float
    vacuous: bool
    relevant: bool
    bindings: dict[str, str]


@dataclass(frozen=True)
class SummaryReport:
    generated_at: str
    log_digest: str
    entries: tuple[SummaryEntry, ...]


def _dedup_key(inst: ProtoformInstance) -> tuple:
    interval = inst.interval.name if inst.interval is not None else None
    qualifier = (
        (inst.qualifier.attribute, inst.qualifier.value.name)
        if inst.qualifier is not None else None
    )
    if isinstance(inst.summarizer, RelationProperty):
        rel = inst.summarizer
        subject = ("rel", rel.source, rel.target, rel.variable)
    elif inst.family == EXPECTATION_DEVIANCE:
        subject = ("exp", inst.expected.attribute, inst.expected.value.name)
    else:
        subject = ("attr", inst.summarizer.variable or inst.summarizer.attribute)
    return (inst.family, interval, qualifier, subject)


def rank_and_plan(instances: list[ProtoformInstance], kb: KnowledgeBase,
                  top_k: int | None = None) -> list[SummaryEntry]:
    """Total order (truth desc, support desc, sentence asc), then keep one
    sentence per (family, interval, qualifier, subject) and truncate."""
    rendered = [(realize(inst, kb), inst) for inst in instances]
    rendered.sort(key=lambda pair: (-pair[1].truth, -pair[1].support, pair[0]))
    seen: set[tuple] = set()
    entries: list[SummaryEntry] = []
    for sentence, inst in rendered:
        key = _dedup_key(inst)
        if key in seen:
            continue
        seen.add(key)
        entries.append(SummaryEntry(
            sentence=sentence,
            family=inst.family,
            truth=inst.truth,
            support=inst.support,
            vacuous=inst.vacuous,
            relevant=inst.relevant,
            bindings=inst.bindings(),
        ))
        if top_k is not None and len(entries) >= top_k:
            break
    return entries


def summarize(log: EventLog, kb: KnowledgeBase,
              families: Iterable[str] | None = None,
              include_rejected: bool = False,
              graph: CausalGraph | None = None,
              generated_at: str | None = None) -> SummaryReport:
    """Full pipeline: derive attributes, enumerate, evaluate, filter, rank,
    realize. Deterministic for identical inputs."""
    if not log.cases:
        raise ConfigError("cannot summarize an empty log")
    if not kb.quantifiers:
        raise ConfigError("knowledge base declares no quantifiers")
    if not (kb.variables or kb.relation_vocab):
        raise ConfigError("knowledge base declares no variables or relation vocabulary")

    digest = log.digest()
    if graph is None:
        dfg = build_dfg(log)
        graph = discover_causal_graph(
            dfg, kb.limits.dependency_min, kb.limits.frequency_min)
    log = derive_case_attributes(log, graph, kb.derived_specs)

    evaluator = Evaluator(log, graph, kb)
    candidates = enumerate_candidates(kb, log, graph, families, evaluator=evaluator)
    kept = evaluate_and_filter(candidates, log, graph, kb,
                               include_rejected=include_rejected, evaluator=evaluator)
    entries = rank_and_plan(kept, kb, top_k=kb.limits.top_k)
    if generated_at is None:
        generated_at = datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    return SummaryReport(
        generated_at=generated_at,
        log_digest=digest,
        entries=tuple(entries),
    )


def report_text(report: SummaryReport) -> str:
    lines = [f"[truth={e.truth:.2f}] {e.sentence}" for e in report.entries]
    return "\n".join(lines) + ("\n" if lines else "")


def report_json(report: SummaryReport) -> str:
    doc = {
        "generated_at": report.generated_at,
        "log_digest": report.log_digest,
        "entries": [
            {
                "sentence": e.sentence,
                "family": e.family,
                "truth": e.truth,
                "support": e.support,
                "vacuous": e.vacuous,
                "relevant": e.relevant,
                "bindings": e.bindings,
            }
            for e in report.entries
        ],
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
