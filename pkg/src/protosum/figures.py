"""Static matplotlib figures rendered next to a report.

Four plots ship with the describe path: truth ranking of the reported
sentences, membership curves of the knowledge-base variables and of the
quantifiers, and the discovered causal graph on a circular layout. All
figures are written to files (Agg backend) so reports can be generated
headless.
"""
from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .fuzzy import LinguisticVariable, Trapezoid  # noqa: E402
from .kb import KnowledgeBase  # noqa: E402
from .mining import CausalGraph, DirectlyFollowsGraph  # noqa: E402
from .summarize import SummaryReport  # noqa: E402


def _trapezoid_polyline(t: Trapezoid, lo: float, hi: float):
    """Piecewise-linear outline of the trapezoid clipped to [lo, hi]."""
    xs, ys = [lo], [1.0 if t.a == t.b and lo >= t.a else 0.0]
    for x, y in ((t.a, 0.0), (t.b, 1.0), (t.c, 1.0), (t.d, 0.0)):
        if math.isinf(x):
            x = hi if x > 0 else lo
        if lo <= x <= hi:
            xs.append(x)
            ys.append(y)
    xs.append(hi)
    ys.append(1.0 if math.isinf(t.d) or (t.c == t.d and hi <= t.c) else 0.0)
    return xs, ys


def _finite_bounds(variable: LinguisticVariable) -> tuple[float, float]:
    points = [
        p
        for v in variable.values
        if v.trapezoid is not None
        for p in v.trapezoid.as_tuple()
        if not math.isinf(p)
    ]
    if not points:
        return 0.0, 1.0
    lo, hi = min(points), max(points)
    pad = (hi - lo) * 0.1 or 1.0
    return lo - pad, hi + pad


def plot_variable(variable: LinguisticVariable, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 3))
    lo, hi = _finite_bounds(variable)
    for value in variable.values:
        if value.trapezoid is None:
            continue
        xs, ys = _trapezoid_polyline(value.trapezoid, lo, hi)
        ax.plot(xs, ys, label=value.name)
    ax.set_xlabel(variable.attribute)
    ax.set_ylabel("membership")
    ax.set_ylim(-0.05, 1.1)
    ax.set_title(variable.name)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_quantifiers(kb: KnowledgeBase, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 3))
    for q in kb.quantifiers:
        xs, ys = _trapezoid_polyline(q.shape, 0.0, 1.0)
        ax.plot(xs, ys, label=q.name)
    ax.set_xlabel("proportion")
    ax.set_ylabel("membership")
    ax.set_ylim(-0.05, 1.1)
    ax.set_title("quantifiers")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_truth_ranking(report: SummaryReport, path: Path, max_entries: int = 20) -> None:
    entries = list(report.entries)[:max_entries]
    fig, ax = plt.subplots(figsize=(8, max(2.0, 0.45 * len(entries) + 1)))
    if entries:
        labels = [
            e.sentence if len(e.sentence) <= 70 else e.sentence[:67] + "..."
            for e in entries
        ]
        ys = range(len(entries) - 1, -1, -1)
        ax.barh(list(ys), [e.truth for e in entries], color="#4878cf")
        ax.set_yticks(list(ys))
        ax.set_yticklabels(labels, fontsize=7)
    ax.set_xlim(0, 1.05)
    ax.set_xlabel("truth degree")
    ax.set_title("reported sentences by truth")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def plot_causal_graph(graph: CausalGraph, path: Path,
                      dfg: DirectlyFollowsGraph | None = None) -> None:
    nodes = sorted({a for arc in graph.arcs for a in arc})
    if dfg is not None:
        nodes = sorted(set(nodes) | set(dfg.activity_totals))
    fig, ax = plt.subplots(figsize=(6, 6))
    # deterministic circular layout
    pos = {}
    n = max(len(nodes), 1)
    for i, node in enumerate(nodes):
        angle = 2.0 * math.pi * i / n
        pos[node] = (math.cos(angle), math.sin(angle))
    for (src, tgt), score in sorted(graph.arcs.items()):
        x0, y0 = pos[src]
        x1, y1 = pos[tgt]
        if src == tgt:
            ax.annotate(f"{score:.2f}", xy=(x0, y0 + 0.14), fontsize=7,
                        ha="center", color="gray")
            continue
        ax.annotate(
            "", xy=(x1, y1), xytext=(x0, y0),
            arrowprops=dict(arrowstyle="-|>", color="gray", shrinkA=14, shrinkB=14),
        )
        ax.text((x0 + x1) / 2, (y0 + y1) / 2, f"{score:.2f}", fontsize=7, color="gray")
    for node, (x, y) in pos.items():
        ax.plot(x, y, "o", markersize=10, color="#4878cf")
        ax.text(x, y + 0.08, node, ha="center", fontsize=8)
    ax.set_xlim(-1.4, 1.4)
    ax.set_ylim(-1.4, 1.4)
    ax.set_aspect("equal")
    ax.axis("off")
    ax.set_title("causal graph")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_report_figures(report: SummaryReport, kb: KnowledgeBase,
                        graph: CausalGraph, out_dir: str | Path,
                        dfg: DirectlyFollowsGraph | None = None) -> list[Path]:
    """Render the full figure set into out_dir; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    path = out_dir / "truth_ranking.png"
    plot_truth_ranking(report, path)
    written.append(path)

    if kb.quantifiers:
        path = out_dir / "quantifiers.png"
        plot_quantifiers(kb, path)
        written.append(path)

    for variable in kb.variables + list(kb.relation_vocab.values()):
        if all(v.trapezoid is None for v in variable.values):
            continue
        safe = "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in variable.name)
        path = out_dir / f"memberships_{safe}.png"
        plot_variable(variable, path)
        written.append(path)

    path = out_dir / "causal_graph.png"
    plot_causal_graph(graph, path, dfg)
    written.append(path)
    return written
