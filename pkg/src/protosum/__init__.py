"""Linguistic summaries of process event logs.

Parses event logs, discovers the causal structure between activities, and
writes ranked natural-language sentences ("In year 2020, most patients had
emergency admittance") whose truth degrees come from fuzzy quantified
statements evaluated over the log.
"""
from .errors import (ConfigError, EvaluationError, Finding, LogValidationError,
                     ParseError, ProtosumError, UnknownActivityError,
                     ValidationReport)
from .event_log import (Case, ColumnMapping, Event, EventLog, SyntheticLogSpec,
                        generate_synthetic_log, parse_event_log, validate_log,
                        write_event_log)
from .fuzzy import (LinguisticValue, LinguisticVariable, Quantifier, Trapezoid,
                    TruthDegree, crisp_membership, membership, quantifier_eval,
                    t_norm_min, validate_partition, value_membership)
from .kb import KnowledgeBase, Limits, default_quantifiers, load_kb
from .mining import (CausalGraph, DerivedAttributeSpec, DirectlyFollowsGraph,
                     RelationSample, build_dfg, causal_graph_dot,
                     compute_relation_samples, dependency_score,
                     derive_case_attributes, discover_causal_graph)
from .protoforms import (DEVIANCE, EXPECTATION_DEVIANCE, FAMILIES, RELATION,
                         RELATION_QUALIFIED, TEMPORAL_ATTR,
                         TEMPORAL_ATTR_QUALIFIED, TYPE1, TYPE2,
                         AttributeProperty, ExpectedValue, ProtoformInstance,
                         RelationProperty, TimeInterval, truth_deviance,
                         truth_expectation_deviance, truth_relation,
                         truth_relation_qualified, truth_temporal,
                         truth_temporal_qualified, truth_type1, truth_type2)
from .summarize import (SummaryEntry, SummaryReport, deviance_relevance,
                        enumerate_candidates, evaluate_and_filter, realize,
                        report_json, report_text, summarize)

__version__ = "0.1.0"
