"""Tabular system descriptions to SWeMLS instance graphs.

Input is UTF-8 TSV with a header row. A mapping config lists one rule per
line::

    column <TAB> rule-kind <TAB> predicate <TAB> handling

rule-kind is one of ``paper-field``, ``system-field``, ``step``, ``variable``
or ``compound-list``; handling is ``literal``, ``iri-from-controlled-term`` or
``split-list``. Multi-valued cells use a comma as separator.

Step columns are named ``ML1``, ``ML2``, ``KR1`` ... (kind and ordinal).
Variable columns are named ``<Kind>_<role><n>`` with Kind ``SW`` or ``Data``
and role ``source``, ``generated`` or ``final``, e.g. ``SW_source1``.
"""
from __future__ import annotations

import base64
import csv
import hashlib
import io
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from . import vocab
from .graph import Graph
from .patterns import CompileError, normalize_id
from .terms import IRI, Literal, Term, Triple

__all__ = [
    "ConfigError",
    "RowError",
    "Rule",
    "MappingConfig",
    "SystemRecord",
    "IngestResult",
    "load_config",
    "parse_config",
    "read_table",
    "write_table",
    "ingest_rows",
    "mint_system_iri",
    "controlled_term",
    "export_rows",
]

log = logging.getLogger(__name__)

RULE_KINDS = ("paper-field", "system-field", "step", "variable", "compound-list")
HANDLINGS = ("iri-from-controlled-term", "literal", "split-list")
MINT_POLICIES = ("hash-title-year",)

_STEP_COLUMN = re.compile(r"(ML|KR)([1-9]\d*)")
_VARIABLE_COLUMN = re.compile(r"(SW|Data)_(source|generated|final)([1-9]\d*)")
_ROLE_PREDICATE = {
    ("SW", "source"): vocab.HAS_SYMBOL_IO,
    ("Data", "source"): vocab.HAS_DATA_IO,
    ("SW", "generated"): vocab.HAS_INTERMEDIATE,
    ("Data", "generated"): vocab.HAS_INTERMEDIATE,
    ("SW", "final"): vocab.HAS_OUTPUT,
    ("Data", "final"): vocab.HAS_OUTPUT,
}
_COMPOUND_PREFIX = {"SW": "SW", "Data": "Data", "ML": "Model", "KR": "Model", None: "Compound"}


class ConfigError(ValueError):
    pass


class RowError(ValueError):
    def __init__(self, row: int, message: str):
        self.row = row
        super().__init__(f"row {row}: {message}")


@dataclass(frozen=True)
class Rule:
    column: str
    kind: str
    predicate: IRI
    handling: str


@dataclass(frozen=True)
class MappingConfig:
    rules: tuple[Rule, ...]
    mint_policy: str = "hash-title-year"

    @property
    def columns(self) -> list[str]:
        return [r.column for r in self.rules]

    def rule(self, column: str) -> Rule:
        for r in self.rules:
            if r.column == column:
                return r
        raise KeyError(column)


def _expand(name: str, lineno: int) -> IRI:
    if name.startswith("<") and name.endswith(">"):
        iri = IRI(name[1:-1])
    elif ":" in name:
        prefix, local = name.split(":", 1)
        namespaces = {**vocab.IMPLICIT_PREFIXES, **vocab.PREFIXES}
        if prefix not in namespaces:
            raise ConfigError(f"line {lineno}: unknown prefix {prefix!r}")
        iri = IRI(namespaces[prefix] + local)
    else:
        raise ConfigError(f"line {lineno}: predicate {name!r} is not a prefixed name or <IRI>")
    if iri not in vocab.all_terms():
        raise ConfigError(f"line {lineno}: unknown predicate {name}")
    return iri


def parse_config(text: str) -> MappingConfig:
    rules = []
    seen = set()
    policy = "hash-title-year"
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        cells = [c.strip() for c in line.split("\t")]
        if cells[0] == "@id-policy":
            if len(cells) != 2 or cells[1] not in MINT_POLICIES:
                raise ConfigError(f"line {lineno}: id policy must be one of {', '.join(MINT_POLICIES)}")
            policy = cells[1]
            continue
        if len(cells) != 4:
            raise ConfigError(f"line {lineno}: expected 4 tab-separated fields, found {len(cells)}")
        column, kind, predicate, handling = cells
        if column in seen:
            raise ConfigError(f"line {lineno}: duplicate column {column!r}")
        if kind not in RULE_KINDS:
            raise ConfigError(f"line {lineno}: unknown rule kind {kind!r}")
        if handling not in HANDLINGS:
            raise ConfigError(f"line {lineno}: unknown handling {handling!r}")
        pred = _expand(predicate, lineno)
        if kind == "step":
            m = _STEP_COLUMN.fullmatch(column)
            if not m:
                raise ConfigError(f"line {lineno}: step column {column!r} must be named like ML1 or KR2")
            if pred != vocab.STEP_PREDICATES[m.group(1)]:
                raise ConfigError(f"line {lineno}: {column} must use {vocab.STEP_PREDICATES[m.group(1)].value}")
        if kind == "variable":
            m = _VARIABLE_COLUMN.fullmatch(column)
            if not m:
                raise ConfigError(f"line {lineno}: variable column {column!r} must be named like SW_source1")
            expected = _ROLE_PREDICATE[(m.group(1), m.group(2))]
            if pred != expected:
                raise ConfigError(f"line {lineno}: {column} must use {expected.value}")
        seen.add(column)
        rules.append(Rule(column, kind, pred, handling))
    if not rules:
        raise ConfigError("no rules")
    return MappingConfig(tuple(rules), policy)


def load_config(path) -> MappingConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


# -- tables -------------------------------------------------------------------


def read_table(source) -> list[dict[str, str]]:
    """Read TSV rows from a path or an open text stream."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8", newline="") as fh:
            return read_table(fh)
    reader = csv.DictReader(source, delimiter="\t", quoting=csv.QUOTE_NONE)
    return [dict(row) for row in reader]


def write_table(rows: list[dict[str, str]], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, delimiter="\t", quoting=csv.QUOTE_NONE, lineterminator="\n", escapechar="\\")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: row.get(c, "") for c in columns})
    return buf.getvalue()


# -- terms and minting --------------------------------------------------------


def controlled_term(term_class: str, text: str) -> IRI:
    """``("Domain", "Medicine Health")`` -> ``res:Domain.Medicine_Health``."""
    text = text.strip()
    if term_class == "Pattern":
        return vocab.res(f"Pattern.{normalize_id(text)}")
    return vocab.res(f"{term_class}." + re.sub(r"[\s/]+", "_", text))


def _suffix(*parts: str) -> str:
    digest = hashlib.sha256("\n".join(parts).encode("utf-8")).digest()
    return base64.b32encode(digest).decode("ascii")[:8]


def mint_system_iri(record: "SystemRecord") -> IRI:
    """``res:System_`` plus 8 uppercase alphanumerics hashed from title and year."""
    if not record.title:
        raise ValueError("cannot mint an IRI for a record without a title")
    return vocab.res(f"System_{_suffix(record.title, str(record.year))}")


def _compound_iri(owner: IRI, kind: Optional[str], items: list[str]) -> IRI:
    digest = hashlib.sha256("\n".join([owner.value, str(kind), *sorted(items)]).encode("utf-8")).hexdigest()
    return vocab.res(f"{_COMPOUND_PREFIX[kind]}_{digest[:8]}")


def _split(cell: str) -> list[str]:
    return [item.strip() for item in cell.split(",") if item.strip()]


# -- records ------------------------------------------------------------------


@dataclass
class SystemRecord:
    title: str = ""
    year: Optional[int] = None
    pattern: str = ""
    paper_fields: list[tuple[Rule, str]] = field(default_factory=list)
    system_fields: list[tuple[Rule, str]] = field(default_factory=list)
    steps: list[tuple[str, int, list[str]]] = field(default_factory=list)  # (kind, ordinal, models)
    variables: list[tuple[str, str, int, list[str]]] = field(default_factory=list)  # (kind, role, n, terms)

    @classmethod
    def from_row(cls, row: dict[str, str], config: MappingConfig, rowno: int = 0) -> "SystemRecord":
        rec = cls()
        for rule in config.rules:
            cell = (row.get(rule.column) or "").strip()
            if not cell:
                continue
            if rule.kind == "paper-field":
                rec.paper_fields.append((rule, cell))
                if rule.predicate == vocab.TITLE:
                    rec.title = cell
                elif rule.predicate == vocab.YEAR:
                    if not re.fullmatch(r"\d{4}", cell):
                        raise RowError(rowno, f"year {cell!r} is not a four-digit integer")
                    rec.year = int(cell)
            elif rule.kind in ("system-field", "compound-list"):
                rec.system_fields.append((rule, cell))
                if rule.predicate == vocab.HAS_CORRESPONDING_PATTERN:
                    rec.pattern = cell
            elif rule.kind == "step":
                m = _STEP_COLUMN.fullmatch(rule.column)
                rec.steps.append((m.group(1), int(m.group(2)), _split(cell)))
            elif rule.kind == "variable":
                m = _VARIABLE_COLUMN.fullmatch(rule.column)
                rec.variables.append((m.group(1), m.group(2), int(m.group(3)), _split(cell)))
        rec.check(rowno)
        return rec

    def check(self, rowno: int = 0) -> None:
        if not self.title:
            raise RowError(rowno, "missing title")
        if self.year is None or not 1000 <= self.year <= 9999:
            raise RowError(rowno, "year must be a four-digit integer")
        if not self.pattern:
            raise RowError(rowno, "missing pattern id")
        try:
            normalize_id(self.pattern)
        except CompileError as exc:
            raise RowError(rowno, str(exc)) from None
        if not self.steps:
            raise RowError(rowno, "a system needs at least one step")


@dataclass
class IngestResult:
    graph: Graph
    errors: list[RowError] = field(default_factory=list)
    rows_read: int = 0

    @property
    def rows_ingested(self) -> int:
        return self.rows_read - len(self.errors)


class _Builder:
    def __init__(self, graph: Graph):
        self.g = graph

    def term(self, term_class: Optional[str], text: str) -> Term:
        if term_class is None:
            return Literal(text)
        iri = controlled_term(term_class, text)
        if term_class != "Pattern":
            self.g.insert(iri, vocab.LABEL, Literal(text))
        return iri

    def compound(self, owner: IRI, kind: Optional[str], term_class: Optional[str], items: list[str], element_type=None) -> IRI:
        node = _compound_iri(owner, kind, items)
        for item in items:
            element = self.term(term_class, item)
            self.g.insert(node, vocab.HAS_COMPOUND_ELEMENT, element)
            if element_type is not None and isinstance(element, IRI):
                self.g.insert(element, vocab.TYPE, element_type)
        return node

    def field(self, subject: IRI, rule: Rule, cell: str) -> None:
        term_class = vocab.TERM_CLASSES.get(rule.predicate)
        if rule.kind == "compound-list":
            self.g.insert(subject, rule.predicate, self.compound(subject, None, term_class, _split(cell)))
            return
        if rule.handling == "literal":
            self.g.insert(subject, rule.predicate, Literal(cell))
        elif rule.handling == "iri-from-controlled-term":
            if term_class is None:
                raise ConfigError(f"{rule.predicate.value} has no controlled vocabulary")
            self.g.insert(subject, rule.predicate, self.term(term_class, cell))
        else:
            for item in _split(cell):
                self.g.insert(subject, rule.predicate, self.term(term_class, item))


def record_triples(rec: SystemRecord) -> Graph:
    """Instance graph of one record: paper, system, steps and variables."""
    g = Graph()
    b = _Builder(g)
    system = mint_system_iri(rec)
    paper = vocab.res("Paper_" + system.value.rsplit("_", 1)[1])
    g.insert(paper, vocab.TYPE, vocab.PAPER)
    g.insert(system, vocab.TYPE, vocab.SYSTEM)
    g.insert(paper, vocab.REPORTS, system)
    for rule, cell in rec.paper_fields:
        b.field(paper, rule, cell)
    for rule, cell in rec.system_fields:
        b.field(system, rule, cell)
    for kind, ordinal, models in rec.steps:
        step = IRI(f"{system.value}.{kind}{ordinal}")
        g.insert(system, vocab.STEP_PREDICATES[kind], step)
        g.insert(step, vocab.TYPE, vocab.STEP_CLASSES[kind])
        g.insert(step, vocab.STEP_ORDINAL, Literal(str(ordinal), datatype=vocab.XSD + "integer"))
        model_class = vocab.TERM_CLASSES_BY_STEP[kind]
        if len(models) == 1:
            g.insert(step, vocab.COMPONENT_MODEL, b.term(model_class, models[0]))
        elif models:
            g.insert(step, vocab.COMPONENT_MODEL, b.compound(step, kind, model_class, models))
    for kind, role, _, items in rec.variables:
        if not items:
            continue
        term_class = vocab.TERM_CLASSES_BY_VARIABLE[kind]
        cls = vocab.VARIABLE_CLASSES[kind]
        if len(items) == 1:
            var = b.term(term_class, items[0])
        else:
            var = b.compound(system, kind, term_class, items, element_type=cls)
        g.insert(var, vocab.TYPE, cls)
        g.insert(system, _ROLE_PREDICATE[(kind, role)], var)
    return g


def ingest_rows(rows: Iterable[dict[str, str]], config: MappingConfig) -> IngestResult:
    """Build the instance graph for ``rows``; bad rows are reported, not fatal."""
    result = IngestResult(Graph())
    rows = list(rows)
    if rows:
        missing = [c for c in config.columns if c not in rows[0]]
        if missing:
            raise ConfigError(f"table lacks configured columns: {', '.join(missing)}")
    for rowno, row in enumerate(rows, start=2):
        result.rows_read += 1
        try:
            rec = SystemRecord.from_row(row, config, rowno)
            result.graph.add_all(record_triples(rec))
        except RowError as exc:
            result.errors.append(exc)
            log.warning("%s", exc)
    return result


# -- export -------------------------------------------------------------------


def _label(graph: Graph, term: Term) -> str:
    if isinstance(term, Literal):
        return term.lexical
    lab = graph.value(term, vocab.LABEL)
    if isinstance(lab, Literal):
        return lab.lexical
    return vocab.local_name(term)


def _cell(graph: Graph, term: Term) -> str:
    elements = graph.objects(term, vocab.HAS_COMPOUND_ELEMENT)
    if elements:
        return ",".join(sorted(_label(graph, e) for e in elements))
    return _label(graph, term)


def export_rows(graph: Graph, config: MappingConfig) -> list[dict[str, str]]:
    """Inverse of :func:`ingest_rows` for graphs it produced (order-normalized)."""
    rows = []
    for system in graph.subjects(vocab.TYPE, vocab.SYSTEM):
        papers = graph.subjects(vocab.REPORTS, system)
        paper = papers[0] if papers else None
        row = {}
        for rule in config.rules:
            subject = paper if rule.kind == "paper-field" else system
            if subject is None:
                continue
            if rule.kind in ("paper-field", "system-field", "compound-list"):
                values = graph.objects(subject, rule.predicate)
                if rule.kind == "compound-list":
                    row[rule.column] = ",".join(_cell(graph, v) for v in values)
                else:
                    row[rule.column] = ",".join(sorted(_label(graph, v) for v in values))
            elif rule.kind == "step":
                m = _STEP_COLUMN.fullmatch(rule.column)
                for step in graph.objects(system, rule.predicate):
                    if graph.value(step, vocab.STEP_ORDINAL) == Literal(m.group(2), datatype=vocab.XSD + "integer"):
                        model = graph.value(step, vocab.COMPONENT_MODEL)
                        row[rule.column] = _cell(graph, model) if model is not None else ""
        by_slot: dict[tuple[str, str], list[str]] = {}
        for pred, role in vocab.ROLE_PREDICATES.items():
            for var in graph.objects(system, pred):
                kind = "SW" if Triple(var, vocab.TYPE, vocab.SEMANTIC_WEB_RESOURCE) in graph else "Data"
                by_slot.setdefault((kind, role), []).append(_cell(graph, var))
        for (kind, role), cells in by_slot.items():
            for n, cell in enumerate(sorted(cells), start=1):
                row[f"{kind}_{role}{n}"] = cell
        rows.append(row)
    return rows
