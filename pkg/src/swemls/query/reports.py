"""Competency-question trend reports: systems counted per dimension value."""
from __future__ import annotations

from collections import Counter

from .. import vocab
from ..graph import Graph
from ..terms import IRI, Literal, Term

__all__ = ["DIMENSIONS", "trend_report", "format_report"]

# dimension -> (predicate, read from the paper node instead of the system)
DIMENSIONS: dict[str, tuple[IRI, bool]] = {
    "year": (vocab.YEAR, True),
    "pattern": (vocab.HAS_CORRESPONDING_PATTERN, False),
    "domain": (vocab.HAS_APPLICATION_DOMAIN, False),
    "task": (vocab.HAS_TASK, False),
    "maturity": (vocab.HAS_MATURITY, False),
    "training-type": (vocab.HAS_TRAINING_TYPE, False),
}


def _display(graph: Graph, term: Term) -> str:
    if isinstance(term, Literal):
        return term.lexical
    if isinstance(term, IRI):
        return vocab.local_name(term)
    return str(term)


def trend_report(graph: Graph, dimension: str) -> list[tuple[str, int]]:
    """Count systems per value of ``dimension``.

    A system with several values counts once for each; systems without a
    value are left out. Rows are ordered by count (descending), then value.
    """
    if dimension not in DIMENSIONS:
        raise ValueError(f"unknown dimension {dimension!r}; expected one of {', '.join(DIMENSIONS)}")
    predicate, via_paper = DIMENSIONS[dimension]
    counts: Counter[str] = Counter()
    for system in graph.subjects(vocab.TYPE, vocab.SYSTEM):
        holders = graph.subjects(vocab.REPORTS, system) if via_paper else [system]
        values = {_display(graph, v) for h in holders for v in graph.objects(h, predicate)}
        counts.update(values)
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def format_report(rows: list[tuple[str, int]], dimension: str) -> str:
    lines = [f"{dimension}\tsystems"] + [f"{value}\t{count}" for value, count in rows]
    return "\n".join(lines) + "\n"
