"""Workflow templates compiled from boxology patterns, and the pattern library.

A template follows the T-3 layout: ``res:Pattern.<ID>`` typed
``opmw:WorkflowTemplate``, one step per processor (``res:Pattern.<ID>.ML1`` ...)
and one variable per artifact (``res:Pattern.<ID>.SW1``, ``...Data1``).

Numbering: steps are numbered left to right within their kind. Variables are
numbered within their kind with source variables (never generated by a step)
first, then generated ones, each in order of appearance. For T-3 this gives
the external data input ``Data1`` and the generated embedding ``Data2``.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import vocab
from .boxology import Artifact, Flow, Group, PatternAst, Processor, parse_pattern, render_notation
from .graph import Graph
from .terms import IRI, Literal, Triple
from .turtle import ParseError, load

__all__ = [
    "WorkflowTemplate",
    "TemplateVariable",
    "PatternLibrary",
    "CompileError",
    "TemplateError",
    "LibraryError",
    "PatternNotFound",
    "compile_template",
    "build_template",
    "template_from_graph",
    "load_library",
    "normalize_id",
    "pattern_iri",
]

log = logging.getLogger(__name__)

_ID_RE = re.compile(r"[A-Za-z0-9-]+")
_ARTIFACT_KIND = {"sym": "SW", "data": "Data"}


class CompileError(ValueError):
    pass


class TemplateError(ValueError):
    """A template graph breaks the well-formedness rules."""


class LibraryError(ValueError):
    pass


class PatternNotFound(KeyError):
    pass


def normalize_id(pattern_id: str) -> str:
    """``"T-3"`` -> ``"T3"``."""
    if not _ID_RE.fullmatch(pattern_id or "") or not pattern_id.strip("-"):
        raise CompileError(f"pattern id {pattern_id!r} must match [A-Za-z0-9-]+ with at least one letter or digit")
    return pattern_id.replace("-", "")


def pattern_iri(pattern_id: str) -> IRI:
    return vocab.res(f"Pattern.{normalize_id(pattern_id)}")


@dataclass(frozen=True)
class TemplateVariable:
    iri: IRI
    kind: str  # "SW" | "Data"
    generator: Optional[IRI] = None


@dataclass(frozen=True)
class WorkflowTemplate:
    id: str
    iri: IRI
    notation: Optional[str]
    steps: tuple[tuple[IRI, str], ...]
    variables: tuple[TemplateVariable, ...]
    uses: frozenset[tuple[IRI, IRI]] = field(default_factory=frozenset)
    precedes: frozenset[tuple[IRI, IRI]] = field(default_factory=frozenset)

    @property
    def generates(self) -> frozenset[tuple[IRI, IRI]]:
        """(variable, step) pairs, one per generated variable."""
        return frozenset((v.iri, v.generator) for v in self.variables if v.generator is not None)

    def step_kind(self, step: IRI) -> str:
        return dict(self.steps)[step]

    def variable(self, iri: IRI) -> TemplateVariable:
        for v in self.variables:
            if v.iri == iri:
                return v
        raise KeyError(iri)

    def role(self, var: TemplateVariable) -> str:
        """``source``, ``generated`` (consumed later) or ``final``."""
        if var.generator is None:
            return "source"
        if any(v == var.iri for _, v in self.uses):
            return "generated"
        return "final"

    def step_counts(self) -> dict[str, int]:
        counts = {"ML": 0, "KR": 0}
        for _, kind in self.steps:
            counts[kind] += 1
        return counts

    def variable_counts(self) -> dict[str, int]:
        counts = {"SW": 0, "Data": 0}
        for v in self.variables:
            counts[v.kind] += 1
        return counts

    def to_graph(self) -> Graph:
        g = Graph()
        g.insert(self.iri, vocab.TYPE, vocab.WORKFLOW_TEMPLATE)
        g.insert(self.iri, vocab.LABEL, Literal(self.id))
        if self.notation is not None:
            g.insert(self.iri, vocab.COMMENT, Literal(self.notation))
        for step, kind in self.steps:
            g.insert(step, vocab.TYPE, vocab.TEMPLATE_STEP_CLASSES[kind])
            g.insert(step, vocab.IS_STEP_OF_TEMPLATE, self.iri)
        for var in self.variables:
            g.insert(var.iri, vocab.TYPE, vocab.TEMPLATE_VARIABLE_CLASSES[var.kind])
            g.insert(var.iri, vocab.IS_VARIABLE_OF_TEMPLATE, self.iri)
            if var.generator is not None:
                g.insert(var.iri, vocab.IS_GENERATED_BY, var.generator)
        for step, var in self.uses:
            g.insert(step, vocab.USES, var)
        for later, earlier in self.precedes:
            g.insert(later, vocab.IS_PRECEDED_BY, earlier)
        return g

    def check(self) -> None:
        """Raise :class:`TemplateError` unless the template is well formed."""
        step_iris = {s for s, _ in self.steps}
        var_iris = {v.iri for v in self.variables}
        if len(step_iris) != len(self.steps) or len(var_iris) != len(self.variables):
            raise TemplateError(f"{self.id}: duplicate step or variable")
        if step_iris & var_iris:
            raise TemplateError(f"{self.id}: a node is both a step and a variable")
        for v in self.variables:
            if v.generator is not None and v.generator not in step_iris:
                raise TemplateError(f"{self.id}: {v.iri} is generated by a non-step {v.generator}")
        for s, v in self.uses:
            if s not in step_iris or v not in var_iris:
                raise TemplateError(f"{self.id}: uses edge {s} -> {v} leaves the template")
        for a, b in self.precedes:
            if a not in step_iris or b not in step_iris:
                raise TemplateError(f"{self.id}: precedence edge {a} -> {b} leaves the template")
        if _has_cycle(step_iris, self.precedes):
            raise TemplateError(f"{self.id}: precedence edges contain a cycle")


def _has_cycle(nodes, edges) -> bool:
    succ = {n: [] for n in nodes}
    for later, earlier in edges:
        succ[earlier].append(later)
    state = {}

    def visit(n):
        state[n] = 1
        for m in succ[n]:
            if state.get(m) == 1 or (m not in state and visit(m)):
                return True
        state[n] = 2
        return False

    return any(n not in state and visit(n) for n in sorted(nodes, key=lambda x: x.value))


# -- compilation --------------------------------------------------------------


class _Compiler:
    def __init__(self):
        self.steps: list[tuple[int, str]] = []  # (node id, kind)
        self.artifacts: list[tuple[int, str]] = []
        self.generator: dict[int, int] = {}
        self.uses: set[tuple[int, int]] = set()
        self.direct_precedes: set[tuple[int, int]] = set()
        self._next = 0

    def _new(self) -> int:
        self._next += 1
        return self._next

    def flow(self, flow: Flow, incoming: list[tuple[str, int]]) -> list[tuple[str, int]]:
        current = incoming
        for stage in flow.stages:
            current = self.stage(stage, current)
        return current

    def stage(self, stage, incoming: list[tuple[str, int]]) -> list[tuple[str, int]]:
        if isinstance(stage, Group):
            out = []
            for branch in stage.branches:
                out.extend(self.flow(branch, incoming))
            return out
        if isinstance(stage, Processor):
            node = self._new()
            self.steps.append((node, stage.kind))
            for tag, other in incoming:
                if tag == "artifact":
                    self.uses.add((node, other))
                    if other in self.generator:
                        self.direct_precedes.add((node, self.generator[other]))
                else:
                    self.direct_precedes.add((node, other))
            return [("step", node)]
        assert isinstance(stage, Artifact)
        node = self._new()
        self.artifacts.append((node, _ARTIFACT_KIND[stage.kind]))
        if incoming:
            if any(tag == "artifact" for tag, _ in incoming):
                raise CompileError("an artifact directly follows another artifact without a processor")
            if len(incoming) > 1:
                raise CompileError("an artifact cannot be generated by more than one processor")
            self.generator[node] = incoming[0][1]
        return [("artifact", node)]


def _transitive_reduction(edges: set[tuple[int, int]]) -> set[tuple[int, int]]:
    preds: dict[int, set[int]] = {}
    for later, earlier in edges:
        preds.setdefault(later, set()).add(earlier)

    def ancestors(n, seen):
        for p in preds.get(n, ()):
            if p not in seen:
                seen.add(p)
                ancestors(p, seen)
        return seen

    reduced = set()
    for later, earlier in edges:
        others = preds[later] - {earlier}
        if not any(earlier in ancestors(o, {o}) for o in others):
            reduced.add((later, earlier))
    return reduced


def build_template(pattern_id: str, ast: PatternAst) -> WorkflowTemplate:
    """Compile ``ast`` into a :class:`WorkflowTemplate`."""
    tid = normalize_id(pattern_id)
    if isinstance(ast.root.stages[-1], Group):
        raise CompileError("the pattern ends in a group with no stage to merge into")
    comp = _Compiler()
    comp.flow(ast.root, [])

    base = f"Pattern.{tid}"
    names: dict[int, IRI] = {}
    counters = {"ML": 0, "KR": 0}
    for node, kind in comp.steps:
        counters[kind] += 1
        names[node] = vocab.res(f"{base}.{kind}{counters[kind]}")
    var_counters = {"SW": 0, "Data": 0}
    ordered = [a for a in comp.artifacts if a[0] not in comp.generator] + [
        a for a in comp.artifacts if a[0] in comp.generator
    ]
    for node, kind in ordered:
        var_counters[kind] += 1
        names[node] = vocab.res(f"{base}.{kind}{var_counters[kind]}")

    variables = tuple(
        TemplateVariable(names[n], kind, names[comp.generator[n]] if n in comp.generator else None)
        for n, kind in sorted(comp.artifacts, key=lambda a: names[a[0]].value)
    )
    template = WorkflowTemplate(
        id=tid,
        iri=vocab.res(base),
        notation=render_notation(ast),
        steps=tuple((names[n], kind) for n, kind in comp.steps),
        variables=variables,
        uses=frozenset((names[s], names[v]) for s, v in comp.uses),
        precedes=frozenset((names[a], names[b]) for a, b in _transitive_reduction(comp.direct_precedes)),
    )
    template.check()
    return template


def compile_template(pattern_id: str, ast: PatternAst) -> Graph:
    """Compile ``ast`` into the template graph for ``pattern_id``."""
    return build_template(pattern_id, ast).to_graph()


def template_from_graph(graph: Graph, source: str = "<graph>") -> WorkflowTemplate:
    """Read the single workflow template contained in ``graph``."""
    roots = graph.subjects(vocab.TYPE, vocab.WORKFLOW_TEMPLATE)
    if len(roots) != 1:
        raise TemplateError(f"{source}: expected exactly one opmw:WorkflowTemplate, found {len(roots)}")
    root = roots[0]
    label = graph.value(root, vocab.LABEL)
    if not isinstance(label, Literal):
        raise TemplateError(f"{source}: template has no rdfs:label")
    comment = graph.value(root, vocab.COMMENT)
    steps = []
    for step in graph.subjects(vocab.IS_STEP_OF_TEMPLATE, root):
        kinds = [k for k, cls in vocab.TEMPLATE_STEP_CLASSES.items() if (Triple(step, vocab.TYPE, cls) in graph)]
        if len(kinds) != 1:
            raise TemplateError(f"{source}: step {step} needs exactly one ML/KR step type")
        steps.append((step, kinds[0]))
    steps.sort(key=_step_order)
    variables = []
    for var in graph.subjects(vocab.IS_VARIABLE_OF_TEMPLATE, root):
        kinds = [k for k, cls in vocab.TEMPLATE_VARIABLE_CLASSES.items() if Triple(var, vocab.TYPE, cls) in graph]
        if len(kinds) != 1:
            raise TemplateError(f"{source}: variable {var} needs exactly one SW/Data type")
        gens = graph.objects(var, vocab.IS_GENERATED_BY)
        if len(gens) > 1:
            raise TemplateError(f"{source}: variable {var} has {len(gens)} generators")
        variables.append(TemplateVariable(var, kinds[0], gens[0] if gens else None))
    step_iris = {s for s, _ in steps}
    uses = frozenset((t.subject, t.object) for t in graph.match(None, vocab.USES, None) if t.subject in step_iris)
    precedes = frozenset(
        (t.subject, t.object) for t in graph.match(None, vocab.IS_PRECEDED_BY, None) if t.subject in step_iris
    )
    template = WorkflowTemplate(
        id=label.lexical,
        iri=root,
        notation=comment.lexical if isinstance(comment, Literal) else None,
        steps=tuple(steps),
        variables=tuple(sorted(variables, key=lambda v: v.iri.value)),
        uses=uses,
        precedes=precedes,
    )
    try:
        template.check()
    except TemplateError as exc:
        raise TemplateError(f"{source}: {exc}") from None
    return template


def _step_order(step: tuple[IRI, str]):
    m = re.search(r"(\d+)$", step[0].value)
    return (step[1], int(m.group(1)) if m else 0, step[0].value)


# -- library ------------------------------------------------------------------


@dataclass
class PatternLibrary:
    templates: dict[str, WorkflowTemplate] = field(default_factory=dict)
    sources: dict[str, Path] = field(default_factory=dict)

    def lookup(self, pattern_id: str) -> WorkflowTemplate:
        key = pattern_id.replace("-", "")
        try:
            return self.templates[key]
        except KeyError:
            raise PatternNotFound(pattern_id) from None

    def by_iri(self, iri: IRI) -> WorkflowTemplate:
        for t in self.templates.values():
            if t.iri == iri:
                return t
        raise PatternNotFound(iri.value)

    def add(self, template: WorkflowTemplate, source: Optional[Path] = None) -> None:
        if template.id in self.templates:
            other = self.sources.get(template.id, "<memory>")
            raise LibraryError(f"duplicate pattern id {template.id!r} in {source} and {other}")
        self.templates[template.id] = template
        if source is not None:
            self.sources[template.id] = source

    def graph(self) -> Graph:
        g = Graph()
        for tid in sorted(self.templates):
            g.add_all(self.templates[tid].to_graph())
        return g

    def __len__(self):
        return len(self.templates)

    def __contains__(self, pattern_id):
        return pattern_id.replace("-", "") in self.templates

    def __iter__(self):
        return iter(sorted(self.templates))


def load_library(directory) -> PatternLibrary:
    """Load every ``.ttl`` template file in ``directory``."""
    directory = Path(directory)
    if not directory.is_dir():
        raise LibraryError(f"{directory} is not a directory")
    library = PatternLibrary()
    for path in sorted(directory.glob("*.ttl")):
        try:
            template = template_from_graph(load(path), source=str(path))
        except (ParseError, TemplateError) as exc:
            raise LibraryError(f"{path}: {exc}") from exc
        library.add(template, path)
        log.debug("loaded pattern %s from %s", template.id, path)
    return library


def compile_notation(pattern_id: str, notation: str) -> WorkflowTemplate:
    return build_template(pattern_id, parse_pattern(notation))
