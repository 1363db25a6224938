"""Evaluation of parsed queries over a :class:`~swemls.graph.Graph`.

Solutions are plain dicts from variable name to term. Evaluation uses bag
semantics: nested groups, UNION branches and sub-selects are evaluated on
their own and joined with compatible-mapping joins, so a variable bound by
only one UNION branch may be unbound in a result row.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Optional

from .. import vocab
from ..graph import Graph
from ..terms import IRI, Literal, Term, sort_key
from .syntax import (
    Aggregate,
    GroupPattern,
    Query,
    SubSelect,
    TriplePattern,
    UnionPattern,
    Var,
    parse_query,
)

__all__ = ["BindingTable", "evaluate", "run_query", "term_text", "short_text"]

Solution = dict[str, Term]


def term_text(term: Optional[Term]) -> str:
    """String value of a term: IRI text, literal lexical form, bnode label."""
    if term is None:
        return ""
    if isinstance(term, IRI):
        return term.value
    if isinstance(term, Literal):
        return term.lexical
    return "_:" + term.label


def short_text(term: Optional[Term], separator: str = ",") -> str:
    """Human-oriented cell text: IRIs (also inside concatenated lists) by local name."""
    if term is None:
        return ""
    if isinstance(term, IRI):
        return vocab.local_name(term)
    text = term_text(term)
    if isinstance(term, Literal) and "://" in text:
        parts = text.split(separator)
        if all("://" in p and " " not in p for p in parts):
            return separator.join(vocab.local_name(p) for p in parts)
    return text


def _cell_key(term: Optional[Term]) -> tuple:
    return (0,) if term is None else (1,) + sort_key(term)


@dataclass
class BindingTable:
    """Result of a SELECT: ordered column names and rows of terms (``None`` = unbound)."""

    columns: list[str]
    rows: list[tuple[Optional[Term], ...]]

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[tuple]:
        return iter(self.rows)

    def column(self, name: str) -> list[Optional[Term]]:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def as_dicts(self) -> list[dict[str, Optional[Term]]]:
        return [dict(zip(self.columns, r)) for r in self.rows]

    def as_text(self, short: bool = False) -> list[tuple[str, ...]]:
        render = short_text if short else term_text
        return [tuple(render(c) for c in r) for r in self.rows]

    def to_tsv(self, short: bool = False) -> str:
        lines = ["\t".join(self.columns)]
        for row in self.as_text(short):
            lines.append("\t".join(c.replace("\t", " ").replace("\n", " ") for c in row))
        return "\n".join(lines) + "\n"


# -- evaluation ---------------------------------------------------------------


def _compatible(a: Solution, b: Solution) -> bool:
    if len(b) < len(a):
        a, b = b, a
    return all(b.get(k, v) == v for k, v in a.items())


def _join(left: list[Solution], right: list[Solution]) -> list[Solution]:
    if not left or not right:
        return []
    # Hash on the variables bound in every row of both sides; check the rest.
    always_l = set.intersection(*(set(m) for m in left))
    always_r = set.intersection(*(set(m) for m in right))
    keys = sorted(always_l & always_r)
    index: dict[tuple, list[Solution]] = {}
    for m in right:
        index.setdefault(tuple(m[k] for k in keys), []).append(m)
    out = []
    for m in left:
        for n in index.get(tuple(m[k] for k in keys), ()):
            if _compatible(m, n):
                merged = dict(m)
                merged.update(n)
                out.append(merged)
    return out


class _Evaluator:
    def __init__(self, graph: Graph):
        self.graph = graph
        self._fresh = itertools.count()

    def group(self, group: GroupPattern) -> list[Solution]:
        solutions: list[Solution] = [{}]
        for element in group.elements:
            if isinstance(element, TriplePattern):
                solutions = self._extend(solutions, element)
            elif isinstance(element, UnionPattern):
                branch_rows: list[Solution] = []
                for b in element.branches:
                    branch_rows.extend(self.group(b))
                solutions = _join(solutions, branch_rows)
            elif isinstance(element, SubSelect):
                solutions = _join(solutions, self.select(element.query))
            elif isinstance(element, GroupPattern):
                solutions = _join(solutions, self.group(element))
            else:  # pragma: no cover - parser never produces anything else
                raise TypeError(f"unknown pattern element {element!r}")
            if not solutions:
                return []
        return solutions

    def _extend(self, solutions: list[Solution], pattern: TriplePattern) -> list[Solution]:
        # A sequence path p1/.../pn is a chain of patterns through hidden variables.
        hops = len(pattern.path)
        nodes: list = [pattern.subject]
        nodes += [Var(f" path{next(self._fresh)}") for _ in range(hops - 1)]
        nodes.append(pattern.object)
        for i, predicate in enumerate(pattern.path):
            solutions = self._match_one(solutions, nodes[i], predicate, nodes[i + 1])
        if hops > 1:
            hidden = {n.name for n in nodes[1:-1]}
            solutions = [{k: v for k, v in m.items() if k not in hidden} for m in solutions]
        return solutions

    def _match_one(self, solutions, s, p, o) -> list[Solution]:
        out = []
        for m in solutions:
            s_term = m.get(s.name) if isinstance(s, Var) else s
            o_term = m.get(o.name) if isinstance(o, Var) else o
            if isinstance(s_term, Literal):
                continue
            for t in self.graph.match(s_term, p, o_term):
                n = m
                if isinstance(s, Var) and s_term is None:
                    n = dict(n)
                    n[s.name] = t.subject
                if isinstance(o, Var) and o_term is None:
                    if isinstance(s, Var) and s.name == o.name and t.subject != t.object:
                        continue
                    n = dict(n) if n is m else n
                    n[o.name] = t.object
                out.append(n)
        return out

    def select(self, query: Query) -> list[Solution]:
        rows = self.group(query.where)
        if query.group_by:
            return self._grouped(query, rows)
        if query.select_all:
            return [{k: v for k, v in m.items() if not k.startswith(" ")} for m in rows]
        names = [p.name for p in query.projection]
        return [{k: m[k] for k in names if k in m} for m in rows]

    def _grouped(self, query: Query, rows: list[Solution]) -> list[Solution]:
        keys = [g.name for g in query.group_by]
        groups: dict[tuple, list[Solution]] = {}
        for m in rows:
            groups.setdefault(tuple(m.get(k) for k in keys), []).append(m)
        out = []
        for key, members in groups.items():
            base = {k: v for k, v in zip(keys, key) if v is not None}
            result: Solution = {}
            for p in query.projection:
                if isinstance(p, Aggregate):
                    values = sorted(term_text(m[p.var.name]) for m in members if p.var.name in m)
                    result[p.alias.name] = Literal(p.separator.join(values))
                elif p.name in base:
                    result[p.name] = base[p.name]
            out.append(result)
        return out


def evaluate(query: Query, graph: Graph) -> BindingTable:
    """Evaluate a parsed query; rows are sorted by the projected columns."""
    solutions = _Evaluator(graph).select(query)
    columns = query.output_names()
    rows = [tuple(m.get(c) for c in columns) for m in solutions]
    rows.sort(key=lambda r: tuple(_cell_key(c) for c in r))
    return BindingTable(columns, rows)


def run_query(text: str, graph: Graph) -> BindingTable:
    """Parse and evaluate ``text`` against ``graph``."""
    return evaluate(parse_query(text), graph)
