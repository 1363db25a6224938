"""Validation of system descriptions and workflow enrichment.

A system instance is read from the graph as a small workflow: its steps
(``hasStepML``/``hasStepKR`` with optional ordinals), its variables (typed
``SemanticWebResource`` or ``DataResource`` and linked by a role predicate)
and, once enriched, the step/variable wiring (``componentInput``,
``componentOutput``, ``isPreceededBy``). Conformance to a pattern means a
kind- and role-preserving bijection onto the template exists that also maps
the instance wiring exactly onto the template's uses/generates/precedes edges.
"""
from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from typing import Optional

from . import vocab
from .graph import Graph
from .patterns import PatternLibrary, PatternNotFound, WorkflowTemplate
from .terms import IRI, Literal, Term, Triple, sort_key

__all__ = [
    "InstanceView",
    "TemplateMapping",
    "ConstraintSet",
    "Violation",
    "ValidationReport",
    "instance_view",
    "find_mapping",
    "derive_constraints",
    "validate",
    "enrich",
    "enrich_systems",
]

log = logging.getLogger(__name__)

VIOLATION = "violation"
WARNING = "warning"


@dataclass
class InstanceView:
    system: Term
    steps: dict[Term, tuple[str, Optional[int]]] = field(default_factory=dict)
    variables: dict[Term, tuple[Optional[str], str]] = field(default_factory=dict)
    inputs: set[tuple[Term, Term]] = field(default_factory=set)
    outputs: set[tuple[Term, Term]] = field(default_factory=set)
    precedes: set[tuple[Term, Term]] = field(default_factory=set)
    problems: list[str] = field(default_factory=list)

    @property
    def wired(self) -> bool:
        return bool(self.inputs or self.outputs or self.precedes)


def instance_view(graph: Graph, system: Term) -> InstanceView:
    """Collect the workflow of ``system`` from ``graph``."""
    view = InstanceView(system)
    for kind, pred in vocab.STEP_PREDICATES.items():
        for step in graph.objects(system, pred):
            if step in view.steps:
                view.problems.append(f"step {_show(step)} is listed as both ML and KR")
                continue
            ordinal = None
            lit = graph.value(step, vocab.STEP_ORDINAL)
            if isinstance(lit, Literal) and re.fullmatch(r"\d+", lit.lexical):
                ordinal = int(lit.lexical)
            view.steps[step] = (kind, ordinal)
    for pred, role in vocab.ROLE_PREDICATES.items():
        for var in graph.objects(system, pred):
            if var in view.variables:
                view.problems.append(f"variable {_show(var)} has more than one role")
                continue
            kinds = [k for k, cls in vocab.VARIABLE_CLASSES.items() if Triple(var, vocab.TYPE, cls) in graph]
            view.variables[var] = (kinds[0] if len(kinds) == 1 else None, role)
    for step in view.steps:
        for obj in graph.objects(step, vocab.COMPONENT_INPUT):
            view.inputs.add((step, obj))
        for obj in graph.objects(step, vocab.COMPONENT_OUTPUT):
            view.outputs.add((step, obj))
        for obj in graph.objects(step, vocab.IS_PRECEDED_BY):
            view.precedes.add((step, obj))
    return view


@dataclass(frozen=True)
class TemplateMapping:
    steps: dict
    variables: dict
    ambiguous: bool = False

    def step_for(self, template_step: IRI) -> Term:
        return {v: k for k, v in self.steps.items()}[template_step]

    def variable_for(self, template_var: IRI) -> Term:
        return {v: k for k, v in self.variables.items()}[template_var]


def _template_ordinals(template: WorkflowTemplate) -> dict[IRI, int]:
    seen = {"ML": 0, "KR": 0}
    out = {}
    for step, kind in template.steps:
        seen[kind] += 1
        out[step] = seen[kind]
    return out


def find_mapping(view: InstanceView, template: WorkflowTemplate, use_wiring: Optional[bool] = None) -> Optional[TemplateMapping]:
    """Map an instance onto ``template``, or return ``None`` when impossible.

    With ``use_wiring`` (default: whenever the instance carries wiring) the
    instance's wiring edges must be exactly the image of the template edges.
    Candidates are tried in ordinal then lexicographic order, so the first
    mapping found is deterministic; ``ambiguous`` is set if a second exists.
    """
    if use_wiring is None:
        use_wiring = view.wired
    if view.problems:
        return None
    if len(view.steps) != len(template.steps) or len(view.variables) != len(template.variables):
        return None

    t_ordinal = _template_ordinals(template)
    t_role = {v.iri: template.role(v) for v in template.variables}
    t_var_kind = {v.iri: v.kind for v in template.variables}
    t_step_kind = dict(template.steps)
    t_uses = template.uses
    t_gen = template.generates  # (var, step)
    t_prec = template.precedes

    inst_steps = sorted(view.steps, key=lambda s: (view.steps[s][1] is None, view.steps[s][1] or 0, sort_key(s)))
    inst_vars = sorted(view.variables, key=sort_key)
    t_steps_sorted = [s for s, _ in template.steps]
    t_vars_sorted = sorted(t_var_kind, key=lambda i: i.value)

    step_cands = {}
    for s in inst_steps:
        kind, ordinal = view.steps[s]
        step_cands[s] = [
            t for t in t_steps_sorted if t_step_kind[t] == kind and (ordinal is None or t_ordinal[t] == ordinal)
        ]
    var_cands = {}
    for v in inst_vars:
        kind, role = view.variables[v]
        var_cands[v] = [t for t in t_vars_sorted if t_var_kind[t] == kind and t_role[t] == role]

    if use_wiring:
        if any(v not in view.variables for _, v in view.inputs | view.outputs):
            return None
        if any(b not in view.steps for _, b in view.precedes):
            return None
        if (len(view.inputs), len(view.outputs), len(view.precedes)) != (len(t_uses), len(t_gen), len(t_prec)):
            return None

    step_map: dict = {}
    var_map: dict = {}
    used_t: set = set()
    found: list[tuple[dict, dict]] = []

    def precedes_ok() -> bool:
        return {(step_map[a], step_map[b]) for a, b in view.precedes} == t_prec

    def var_ok(v) -> bool:
        if not use_wiring:
            return True
        tv = var_map[v]
        for s in view.steps:
            ts = step_map[s]
            if ((s, v) in view.inputs) != ((ts, tv) in t_uses):
                return False
            if ((s, v) in view.outputs) != ((tv, ts) in t_gen):
                return False
        return True

    def assign_vars(i: int) -> bool:
        if i == len(inst_vars):
            found.append((dict(step_map), dict(var_map)))
            return len(found) >= 2
        v = inst_vars[i]
        for t in var_cands[v]:
            if t in used_t:
                continue
            var_map[v] = t
            used_t.add(t)
            if var_ok(v) and assign_vars(i + 1):
                return True
            used_t.discard(t)
            del var_map[v]
        return False

    def assign_steps(i: int) -> bool:
        if i == len(inst_steps):
            if use_wiring and not precedes_ok():
                return False
            return assign_vars(0)
        s = inst_steps[i]
        for t in step_cands[s]:
            if t in used_t:
                continue
            step_map[s] = t
            used_t.add(t)
            if assign_steps(i + 1):
                return True
            used_t.discard(t)
            del step_map[s]
        return False

    assign_steps(0)
    if not found:
        return None
    steps, variables = found[0]
    return TemplateMapping(steps, variables, ambiguous=len(found) > 1)


# -- constraints --------------------------------------------------------------


@dataclass(frozen=True)
class Rule:
    id: str
    severity: str
    description: str


GENERIC_RULES = (
    Rule("generic/task", VIOLATION, "system declares swemls:hasTask"),
    Rule("generic/domain", VIOLATION, "system declares swemls:hasApplicationDomain"),
    Rule("generic/pattern", VIOLATION, "system declares swemls:hasCorrespondingPattern"),
    Rule("generic/steps", VIOLATION, "system has at least one step"),
    Rule("generic/paper", VIOLATION, "a swemls:Paper reports the system"),
    Rule("generic/title", VIOLATION, "the reporting paper has a terms:title"),
    Rule("generic/year", VIOLATION, "the reporting paper has a four-digit swemls:year"),
    Rule("generic/maturity", WARNING, "system declares swemls:hasMaturity"),
    Rule("generic/training-type", WARNING, "system declares swemls:hasTrainingType"),
    Rule("documentation/infrastructure", WARNING, "system documents its infrastructure"),
    Rule("documentation/provenance", WARNING, "system documents provenance"),
    Rule("documentation/evaluation", WARNING, "system documents its evaluation"),
)

_SYSTEM_REQUIRED = {
    "generic/task": vocab.HAS_TASK,
    "generic/domain": vocab.HAS_APPLICATION_DOMAIN,
    "generic/pattern": vocab.HAS_CORRESPONDING_PATTERN,
    "generic/maturity": vocab.HAS_MATURITY,
    "generic/training-type": vocab.HAS_TRAINING_TYPE,
    "documentation/infrastructure": vocab.HAS_INFRASTRUCTURE_DOC,
    "documentation/provenance": vocab.HAS_PROVENANCE_DOC,
    "documentation/evaluation": vocab.HAS_EVALUATION_DOC,
}


@dataclass(frozen=True)
class ConstraintSet:
    """Rules a system claiming ``pattern_id`` must satisfy."""

    pattern_id: str
    pattern: IRI
    step_counts: tuple[tuple[str, int], ...]
    variable_counts: tuple[tuple[str, int], ...]
    template: WorkflowTemplate
    generic: tuple[Rule, ...] = GENERIC_RULES

    @property
    def rules(self) -> tuple[Rule, ...]:
        pid = self.pattern_id
        steps = ", ".join(f"{n} {k}" for k, n in self.step_counts if n)
        variables = ", ".join(f"{n} {k}" for k, n in self.variable_counts if n)
        return self.generic + (
            Rule(f"pattern-declared/{pid}", VIOLATION, f"system declares hasCorrespondingPattern {self.pattern.value}"),
            Rule(f"pattern-steps/{pid}", VIOLATION, f"steps: {steps}"),
            Rule(f"pattern-variables/{pid}", VIOLATION, f"variables: {variables}"),
            Rule(f"pattern-wiring/{pid}", VIOLATION, "a kind- and edge-preserving mapping onto the template exists"),
        )


def derive_constraints(template: WorkflowTemplate) -> ConstraintSet:
    return ConstraintSet(
        pattern_id=template.id,
        pattern=template.iri,
        step_counts=tuple(sorted(template.step_counts().items())),
        variable_counts=tuple(sorted(template.variable_counts().items())),
        template=template,
    )


# -- validation ---------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Violation:
    focus: str
    rule: str
    severity: str
    message: str

    def to_json(self) -> str:
        return json.dumps(
            {"focus": self.focus, "rule": self.rule, "severity": self.severity, "message": self.message},
            ensure_ascii=False,
        )


@dataclass
class ValidationReport:
    results: list[Violation] = field(default_factory=list)
    systems_checked: int = 0

    @property
    def conforms(self) -> bool:
        return not any(r.severity == VIOLATION for r in self.results)

    @property
    def violations(self) -> list[Violation]:
        return [r for r in self.results if r.severity == VIOLATION]

    @property
    def warnings(self) -> list[Violation]:
        return [r for r in self.results if r.severity == WARNING]

    def to_text(self) -> str:
        lines = [
            f"Conforms: {self.conforms}",
            f"Systems checked: {self.systems_checked}",
            f"Violations: {len(self.violations)}  Warnings: {len(self.warnings)}",
        ]
        for r in self.results:
            lines.append(f"[{r.severity}] {r.rule} on {r.focus}: {r.message}")
        return "\n".join(lines) + "\n"

    def to_jsonl(self) -> str:
        return "".join(r.to_json() + "\n" for r in self.results)


def _show(term: Term) -> str:
    return term.value if isinstance(term, IRI) else term.n3()


def _systems(graph: Graph) -> list[Term]:
    return graph.subjects(vocab.TYPE, vocab.SYSTEM)


def _generic_findings(graph: Graph, system: Term) -> list[Violation]:
    focus = _show(system)
    out = []
    for rule in GENERIC_RULES:
        pred = _SYSTEM_REQUIRED.get(rule.id)
        if pred is not None and not graph.objects(system, pred):
            out.append(Violation(focus, rule.id, rule.severity, f"missing {rule.description}"))
    if not any(graph.objects(system, p) for p in vocab.STEP_PREDICATES.values()):
        out.append(Violation(focus, "generic/steps", VIOLATION, "system has no steps"))
    papers = [p for p in graph.subjects(vocab.REPORTS, system) if Triple(p, vocab.TYPE, vocab.PAPER) in graph]
    if not papers:
        out.append(Violation(focus, "generic/paper", VIOLATION, "no swemls:Paper reports this system"))
    for paper in papers:
        if not graph.objects(paper, vocab.TITLE):
            out.append(Violation(focus, "generic/title", VIOLATION, f"paper {_show(paper)} has no title"))
        years = graph.objects(paper, vocab.YEAR)
        if not years:
            out.append(Violation(focus, "generic/year", VIOLATION, f"paper {_show(paper)} has no year"))
        elif not all(isinstance(y, Literal) and re.fullmatch(r"\d{4}", y.lexical) for y in years):
            out.append(Violation(focus, "generic/year", VIOLATION, f"paper {_show(paper)} has a malformed year"))
    return out


def _pattern_findings(graph: Graph, system: Term, library: PatternLibrary) -> list[Violation]:
    focus = _show(system)
    out = []
    for pattern in graph.objects(system, vocab.HAS_CORRESPONDING_PATTERN):
        try:
            template = library.by_iri(pattern) if isinstance(pattern, IRI) else None
        except PatternNotFound:
            template = None
        if template is None:
            out.append(Violation(focus, "unknown-pattern", VIOLATION, f"unknown pattern {_show(pattern)}"))
            continue
        out.extend(check_pattern(graph, system, derive_constraints(template)))
    return out


def check_pattern(graph: Graph, system: Term, constraints: ConstraintSet) -> list[Violation]:
    """Pattern-conformance findings of ``system`` against ``constraints``."""
    focus = _show(system)
    pid = constraints.pattern_id
    view = instance_view(graph, system)
    out = [Violation(focus, f"pattern-wiring/{pid}", VIOLATION, p) for p in view.problems]
    step_counts = {"ML": 0, "KR": 0}
    for kind, _ in view.steps.values():
        step_counts[kind] += 1
    if tuple(sorted(step_counts.items())) != constraints.step_counts:
        out.append(
            Violation(focus, f"pattern-steps/{pid}", VIOLATION, f"steps {step_counts} differ from template {dict(constraints.step_counts)}")
        )
    var_counts = {"SW": 0, "Data": 0}
    for kind, _ in view.variables.values():
        if kind is None:
            continue
        var_counts[kind] += 1
    untyped = [v for v, (k, _) in view.variables.items() if k is None]
    if untyped or tuple(sorted(var_counts.items())) != constraints.variable_counts:
        msg = f"variables {var_counts} differ from template {dict(constraints.variable_counts)}"
        if untyped:
            msg += f"; untyped: {', '.join(sorted(_show(v) for v in untyped))}"
        out.append(Violation(focus, f"pattern-variables/{pid}", VIOLATION, msg))
    if not view.wired:
        out.append(Violation(focus, f"pattern-wiring/{pid}", VIOLATION, "no component input/output wiring; run enrichment first"))
        return out
    mapping = find_mapping(view, constraints.template, use_wiring=True)
    if mapping is None:
        out.append(
            Violation(focus, f"pattern-wiring/{pid}", VIOLATION, f"workflow wiring does not match template {constraints.template.iri.value}")
        )
    elif mapping.ambiguous:
        out.append(Violation(focus, f"pattern-ambiguous/{pid}", WARNING, "more than one mapping onto the template; chose the first"))
    return out


def validate(graph: Graph, library: PatternLibrary) -> ValidationReport:
    """Check every ``swemls:System`` in ``graph`` against generic and pattern rules."""
    report = ValidationReport()
    for system in _systems(graph):
        report.systems_checked += 1
        report.results.extend(_generic_findings(graph, system))
        report.results.extend(_pattern_findings(graph, system, library))
    report.results.sort()
    return report


# -- enrichment ---------------------------------------------------------------


def wiring_triples(view: InstanceView, template: WorkflowTemplate, mapping: TemplateMapping) -> list[Triple]:
    steps = {t: i for i, t in mapping.steps.items()}
    variables = {t: i for i, t in mapping.variables.items()}
    out = []
    for step, var in template.uses:
        out.append(Triple(steps[step], vocab.COMPONENT_INPUT, variables[var]))
    for var, step in template.generates:
        out.append(Triple(steps[step], vocab.COMPONENT_OUTPUT, variables[var]))
    for later, earlier in template.precedes:
        out.append(Triple(steps[later], vocab.IS_PRECEDED_BY, steps[earlier]))
    return sorted(out, key=Triple.key)


def enrich_systems(graph: Graph, library: PatternLibrary) -> tuple[Graph, dict[str, str]]:
    """Enrich ``graph``; also return ``{system: reason}`` for skipped systems."""
    out = graph.copy()
    skipped = {}
    for system in _systems(graph):
        patterns = graph.objects(system, vocab.HAS_CORRESPONDING_PATTERN)
        if len(patterns) != 1:
            skipped[_show(system)] = f"expected one pattern, found {len(patterns)}"
            continue
        try:
            template = library.by_iri(patterns[0])
        except PatternNotFound:
            skipped[_show(system)] = f"unknown pattern {_show(patterns[0])}"
            continue
        view = instance_view(graph, system)
        mapping = find_mapping(view, template, use_wiring=True) if view.wired else None
        if mapping is None:
            mapping = find_mapping(view, template, use_wiring=False)
        if mapping is None:
            skipped[_show(system)] = f"no mapping onto {template.id}"
            continue
        out.add_all(wiring_triples(view, template, mapping))
    for system, reason in sorted(skipped.items()):
        log.warning("enrichment skipped for %s: %s", system, reason)
    return out, skipped


def enrich(graph: Graph, library: PatternLibrary) -> Graph:
    """Materialise component input/output and step precedence for every system."""
    return enrich_systems(graph, library)[0]


def systems(graph: Graph) -> list[Term]:
    return _systems(graph)
