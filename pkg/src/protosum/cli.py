"""Command-line front door.

Subcommands: describe (full summarization report), discover (causal graph as
DOT), validate (log and knowledge-base findings), synth (synthetic log
generation). Exit codes: 0 success, 1 error-level validation findings,
2 usage/configuration/parse errors.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import ProtosumError
from .event_log import (ColumnMapping, EventLog, SyntheticLogSpec,
                        generate_synthetic_log, parse_event_log,
                        parse_iso_instant, validate_log, write_event_log)
from .fuzzy import validate_partition
from .kb import KnowledgeBase, load_kb
from .mining import build_dfg, causal_graph_dot, discover_causal_graph
from .protoforms import FAMILIES
from .summarize import EPOCH_ISO, report_json, report_text, summarize

KB_ENV_VAR = "PROTOFORM_KB"


@dataclass
class RunConfig:
    log_path: Path | None
    kb_path: Path | None
    mapping: ColumnMapping
    families: list[str] | None
    output_format: str
    output_path: Path | None
    figures_dir: Path | None
    reproducible: bool
    seed: int | None
    limit_overrides: dict


def _add_common(parser: argparse.ArgumentParser, *, log_required: bool = True) -> None:
    parser.add_argument("--log", required=log_required, help="event log CSV path")
    parser.add_argument("--kb", default=None,
                        help=f"knowledge base JSON path (default: ${KB_ENV_VAR})")
    parser.add_argument("--out", default=None, help="output path (default: stdout)")
    parser.add_argument("--case-col", default="case_id")
    parser.add_argument("--activity-col", default="event_activity")
    parser.add_argument("--time-col", default="event_time")
    parser.add_argument("--time-format", default="%Y-%m-%d %H:%M")
    parser.add_argument("--delimiter", default=",")
    parser.add_argument("--case-attr", action="append", default=[], metavar="COL[:KIND]",
                        help="map a column as a case attribute (kind: numeric|category|instant)")
    parser.add_argument("--event-attr", action="append", default=[], metavar="COL[:KIND]",
                        help="map a column as an event attribute")
    parser.add_argument("--ignore-col", action="append", default=[], metavar="COL")
    parser.add_argument("--dependency-min", type=float, default=None)
    parser.add_argument("--frequency-min", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="protosum",
        description="Linguistic summaries of process event logs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("describe", help="generate the ranked sentence report")
    _add_common(p)
    p.add_argument("--families", default=None,
                   help="comma-separated subset of " + ",".join(FAMILIES))
    p.add_argument("--format", choices=("text", "json", "both"), default="text")
    p.add_argument("--min-truth", type=float, default=None)
    p.add_argument("--top-k", type=int, default=None)
    p.add_argument("--reproducible", action="store_true",
                   help="zero the report timestamp for byte-identical runs")
    p.add_argument("--figures", default=None, metavar="DIR",
                   help="also render figures (truth ranking, memberships, causal graph)")
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("discover", help="emit the discovered causal graph as DOT")
    _add_common(p)
    p.add_argument("--figures", default=None, metavar="DIR")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("validate", help="report log and knowledge-base findings")
    _add_common(p, log_required=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("synth", help="generate a synthetic log CSV")
    p.add_argument("--spec", required=True, help="synthetic log spec JSON path")
    p.add_argument("--out", default=None)
    p.add_argument("--seed", type=int, default=None, help="override the spec's seed")
    p.set_defaults(func=cmd_synth)
    return parser


def _attr_mapping(entries: list[str], default_kind: str = "category") -> dict[str, str]:
    out = {}
    for entry in entries:
        col, _, kind = entry.partition(":")
        out[col] = kind or default_kind
    return out


def _auto_attr_columns(path: Path, mapping: ColumnMapping) -> ColumnMapping:
    """Map undeclared header columns automatically.

    Scope: a case_/event_ name prefix decides directly; otherwise a column
    that is constant within every case is treated as case-level. Kind:
    numeric when every non-empty value parses as a float, else category.
    --case-attr / --event-attr flags override all of this.
    """
    import csv

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh, delimiter=mapping.delimiter)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            return mapping
        known = {mapping.case_column, mapping.activity_column, mapping.timestamp_column}
        known |= set(mapping.case_attributes) | set(mapping.event_attributes) | set(mapping.ignored)
        missing = [c for c in header if c not in known]
        if not missing or mapping.case_column not in header:
            return mapping
        numeric = {c: True for c in missing}
        seen_value = {c: False for c in missing}
        constant = {c: True for c in missing}
        first_seen: dict[tuple[str, str], str] = {}
        idx = {c: header.index(c) for c in missing}
        case_idx = header.index(mapping.case_column)
        for row in reader:
            if len(row) != len(header):
                continue  # parse_event_log will report it with a line number
            case_id = row[case_idx].strip()
            for col in missing:
                raw = row[idx[col]].strip()
                if not raw:
                    continue
                seen_value[col] = True
                try:
                    float(raw)
                except ValueError:
                    numeric[col] = False
                prev = first_seen.setdefault((col, case_id), raw)
                if prev != raw:
                    constant[col] = False
    case_attrs = dict(mapping.case_attributes)
    event_attrs = dict(mapping.event_attributes)
    for col in missing:
        kind = "numeric" if (numeric[col] and seen_value[col]) else "category"
        if col.startswith("event_"):
            event_attrs[col] = kind
        elif col.startswith("case_") or constant[col]:
            case_attrs[col] = kind
        else:
            event_attrs[col] = kind
    return dataclasses.replace(
        mapping, case_attributes=case_attrs, event_attributes=event_attrs)


def _load_log(args) -> tuple[EventLog, ColumnMapping]:
    path = Path(args.log)
    if not path.exists():
        raise ProtosumError(f"log file not found: {path}")
    mapping = ColumnMapping(
        case_column=args.case_col,
        activity_column=args.activity_col,
        timestamp_column=args.time_col,
        timestamp_format=args.time_format,
        case_attributes=_attr_mapping(args.case_attr),
        event_attributes=_attr_mapping(args.event_attr),
        ignored=frozenset(args.ignore_col),
        delimiter=args.delimiter,
    )
    mapping = _auto_attr_columns(path, mapping)
    with open(path, newline="", encoding="utf-8") as fh:
        return parse_event_log(fh, mapping), mapping


def _load_kb(args) -> KnowledgeBase:
    kb_path = args.kb or os.environ.get(KB_ENV_VAR)
    if not kb_path:
        raise ProtosumError(
            f"no knowledge base: pass --kb or set ${KB_ENV_VAR}")
    path = Path(kb_path)
    if not path.exists():
        raise ProtosumError(f"knowledge base file not found: {path}")
    return load_kb(path)


def _apply_limit_overrides(kb: KnowledgeBase, args) -> KnowledgeBase:
    overrides = {}
    for field_name, arg_name in (
        ("min_truth", "min_truth"),
        ("top_k", "top_k"),
        ("dependency_min", "dependency_min"),
        ("frequency_min", "frequency_min"),
    ):
        value = getattr(args, arg_name, None)
        if value is not None:
            overrides[field_name] = value
    if overrides:
        kb.limits = dataclasses.replace(kb.limits, **overrides)
    return kb


def _emit(text: str, out: str | None, suffix: str | None = None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out)
    if suffix is not None:
        path = path.with_suffix(suffix)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def cmd_describe(args) -> int:
    kb = _apply_limit_overrides(_load_kb(args), args)
    log, _ = _load_log(args)
    families = args.families.split(",") if args.families else None

    dfg = build_dfg(log)
    graph = discover_causal_graph(
        dfg, kb.limits.dependency_min, kb.limits.frequency_min)
    report = summarize(
        log, kb, families=families, graph=graph,
        generated_at=EPOCH_ISO if args.reproducible else None,
    )

    if args.format == "text":
        _emit(report_text(report), args.out)
    elif args.format == "json":
        _emit(report_json(report), args.out)
    else:
        if args.out is None:
            sys.stdout.write(report_text(report))
            sys.stdout.write("\n")
            sys.stdout.write(report_json(report))
        else:
            _emit(report_text(report), args.out, suffix=".txt")
            _emit(report_json(report), args.out, suffix=".json")

    if args.figures:
        from .figures import save_report_figures

        save_report_figures(report, kb, graph, args.figures, dfg)
    return 0


def cmd_discover(args) -> int:
    log, _ = _load_log(args)
    if not log.cases:
        raise ProtosumError("log contains no cases")
    limits_defaults = (0.9, 5)
    if args.kb or os.environ.get(KB_ENV_VAR):
        kb = _load_kb(args)
        limits_defaults = (kb.limits.dependency_min, kb.limits.frequency_min)
    dependency_min = args.dependency_min if args.dependency_min is not None else limits_defaults[0]
    frequency_min = args.frequency_min if args.frequency_min is not None else limits_defaults[1]
    dfg = build_dfg(log)
    graph = discover_causal_graph(dfg, dependency_min, frequency_min)
    _emit(causal_graph_dot(graph, dfg), args.out)
    if args.figures:
        from .figures import plot_causal_graph

        out_dir = Path(args.figures)
        out_dir.mkdir(parents=True, exist_ok=True)
        plot_causal_graph(graph, out_dir / "causal_graph.png", dfg)
    return 0


def cmd_validate(args) -> int:
    findings = []
    if args.log:
        log, _ = _load_log(args)
        findings.extend(validate_log(log).findings)
    if args.kb or os.environ.get(KB_ENV_VAR):
        kb = _load_kb(args)
        for variable in kb.variables + list(kb.relation_vocab.values()):
            findings.extend(validate_partition(variable).findings)
    if not args.log and not (args.kb or os.environ.get(KB_ENV_VAR)):
        raise ProtosumError("nothing to validate: pass --log and/or --kb")
    for finding in findings:
        print(finding)
    print(f"{len(findings)} findings")
    return 1 if any(f.level == "error" for f in findings) else 0


def _synth_spec_from_json(doc: dict, seed_override: int | None) -> SyntheticLogSpec:
    def instant(v):
        return float(v) if isinstance(v, (int, float)) else parse_iso_instant(str(v))

    patterns = tuple(
        (tuple(p["activities"]), float(p.get("weight", 1.0)))
        for p in doc["trace_patterns"]
    )
    delays = {}
    for key, bounds in doc.get("inter_event_delay", {}).items():
        src, _, tgt = key.partition("->")
        delays[(src.strip(), tgt.strip())] = (float(bounds[0]), float(bounds[1]))
    window = doc["start_window"]
    spec = SyntheticLogSpec(
        trace_patterns=patterns,
        case_count=int(doc["case_count"]),
        start_window=(instant(window[0]), instant(window[1])),
        inter_event_delay=delays,
        default_delay=tuple(doc.get("default_delay", (60.0, 3600.0))),
        attribute_generators=doc.get("attributes", {}),
        rng_seed=int(doc.get("seed", 0)),
    )
    if seed_override is not None:
        spec = dataclasses.replace(spec, rng_seed=seed_override)
    return spec


def cmd_synth(args) -> int:
    path = Path(args.spec)
    if not path.exists():
        raise ProtosumError(f"spec file not found: {path}")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ProtosumError(f"spec {path} is not valid JSON: {exc}") from None
    try:
        spec = _synth_spec_from_json(doc, args.seed)
    except (KeyError, TypeError, ValueError) as exc:
        raise ProtosumError(f"malformed synth spec {path}: {exc}") from None
    log = generate_synthetic_log(spec)
    case_attrs = {
        name: ("category" if "categories" in gen else "numeric")
        for name, gen in spec.attribute_generators.items()
    }
    mapping = ColumnMapping(
        case_attributes=case_attrs,
        timestamp_format="%Y-%m-%d %H:%M:%S",
    )
    _emit(write_event_log(log, mapping), args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ProtosumError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
