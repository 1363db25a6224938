import random

import pytest

from oracles import brute_force_mappings, instance_from_template, mutate_instance, random_compilable_template
from swemls import vocab
from swemls.conformance import (
    derive_constraints,
    enrich,
    enrich_systems,
    find_mapping,
    instance_view,
    validate,
)
from swemls.datasets import default_library, fixture_path, mini_kg
from swemls.graph import Graph
from swemls.patterns import compile_notation
from swemls.query import run_query
from swemls.terms import Literal, Triple
from swemls.turtle import load, serialize

GARCIA = vocab.res("System_TGVVJBNX")


def t3(name):
    return vocab.res("Pattern.T3." + name)


@pytest.fixture(scope="module")
def garcia():
    return load(fixture_path("garcia.nt"))


def test_derive_constraints_t3(library):
    c = derive_constraints(library.lookup("T3"))
    assert dict(c.step_counts) == {"ML": 2, "KR": 0}
    assert dict(c.variable_counts) == {"SW": 2, "Data": 2}
    assert "pattern-wiring/T3" in {r.id for r in c.rules}
    assert derive_constraints(library.lookup("T3")) == c


def test_derive_constraints_single_step():
    t = compile_notation("S", "[sym -> ML -> sym]")
    c = derive_constraints(t)
    assert dict(c.step_counts) == {"ML": 1, "KR": 0}
    assert dict(c.variable_counts) == {"SW": 2, "Data": 0}
    assert sorted(t.role(v) for v in t.variables) == ["final", "source"]


def test_garcia_mapping(garcia, library):
    view = instance_view(garcia, GARCIA)
    m = find_mapping(view, library.lookup("T3"))
    assert m is not None and not m.ambiguous
    s = vocab.res
    assert m.steps == {s("System_TGVVJBNX.ML1"): t3("ML1"), s("System_TGVVJBNX.ML2"): t3("ML2")}
    assert m.variables == {
        s("Resource.Custom_KG"): t3("SW1"),
        s("Data.Vectorized_KG"): t3("Data2"),
        s("Data.External_Data"): t3("Data1"),
        s("Resource.Predicted_Links"): t3("SW2"),
    }


def test_garcia_steps_carry_models(garcia):
    assert garcia.value(vocab.res("System_TGVVJBNX.ML1"), vocab.COMPONENT_MODEL) == vocab.res("StatisticalModel.CNN")
    assert garcia.value(vocab.res("System_TGVVJBNX.ML2"), vocab.COMPONENT_MODEL) == vocab.res("StatisticalModel.Encoder")


def test_three_ml_steps_do_not_map(garcia, library):
    g = garcia.copy()
    extra = vocab.res("System_TGVVJBNX.ML3")
    g.insert(GARCIA, vocab.HAS_STEP_ML, extra)
    g.insert(extra, vocab.TYPE, vocab.PROCESSOR_ML)
    assert find_mapping(instance_view(g, GARCIA), library.lookup("T3")) is None
    report = validate(g, library)
    assert "pattern-steps/T3" in {v.rule for v in report.violations}


def test_garcia_conforms(garcia, library):
    report = validate(garcia, library)
    assert report.conforms and report.systems_checked == 1
    assert report.results == []


def test_broken_fixture(library):
    report = validate(load(fixture_path("garcia-broken.nt")), library)
    assert not report.conforms
    assert [(v.focus, v.rule) for v in report.violations] == [(GARCIA.value, "pattern-wiring/T3")]


def test_unwired_instance_needs_enrichment(garcia, library):
    bare = Graph(t for t in garcia if t.predicate not in vocab.WIRING_PREDICATES)
    report = validate(bare, library)
    assert {v.rule for v in report.violations} == {"pattern-wiring/T3"}
    assert validate(enrich(bare, library), library).conforms


def test_enrichment_adds_fig4_edges(garcia, library):
    bare = Graph(t for t in garcia if t.predicate not in vocab.WIRING_PREDICATES)
    added = set(enrich(bare, library)) - set(bare)
    s = vocab.res
    ml1, ml2 = s("System_TGVVJBNX.ML1"), s("System_TGVVJBNX.ML2")
    assert added == {
        Triple(ml1, vocab.COMPONENT_INPUT, s("Resource.Custom_KG")),
        Triple(ml1, vocab.COMPONENT_OUTPUT, s("Data.Vectorized_KG")),
        Triple(ml2, vocab.COMPONENT_INPUT, s("Data.Vectorized_KG")),
        Triple(ml2, vocab.COMPONENT_INPUT, s("Data.External_Data")),
        Triple(ml2, vocab.COMPONENT_OUTPUT, s("Resource.Predicted_Links")),
        Triple(ml2, vocab.IS_PRECEDED_BY, ml1),
    }


def test_enrichment_idempotent_and_deterministic(library):
    kg = mini_kg()
    again = enrich(kg, library)
    assert len(again) == len(kg)
    assert serialize(again) == serialize(enrich(mini_kg(), library))


def test_enrichment_only_adds_wiring(library):
    kg = mini_kg()
    bare = Graph(t for t in kg if t.predicate not in vocab.WIRING_PREDICATES)
    added = set(enrich(bare, library)) - set(bare)
    assert added and {t.predicate for t in added} <= vocab.WIRING_PREDICATES


def test_enrichment_skips_unknown_pattern(garcia, library):
    g = garcia.copy()
    g.remove(Triple(GARCIA, vocab.HAS_CORRESPONDING_PATTERN, vocab.res("Pattern.T3")))
    g.insert(GARCIA, vocab.HAS_CORRESPONDING_PATTERN, vocab.res("Pattern.Q9"))
    out, skipped = enrich_systems(g, library)
    assert set(out) == set(g) and GARCIA.value in skipped
    assert "unknown-pattern" in {v.rule for v in validate(g, library).violations}


def test_missing_fields_severities(garcia, library):
    g = Graph(t for t in garcia if t.predicate not in (vocab.HAS_TASK, vocab.HAS_MATURITY, vocab.YEAR))
    report = validate(g, library)
    rules = {(v.rule, v.severity) for v in report.results}
    assert ("generic/task", "violation") in rules
    assert ("generic/year", "violation") in rules
    assert ("generic/maturity", "warning") in rules


def test_malformed_year(garcia, library):
    g = Graph(t for t in garcia if t.predicate != vocab.YEAR)
    g.insert(vocab.res("Paper_TGVVJBNX"), vocab.YEAR, Literal("19"))
    assert "generic/year" in {v.rule for v in validate(g, library).violations}


def test_empty_graph_report(library):
    report = validate(Graph(), library)
    assert report.conforms and report.systems_checked == 0 and report.results == []


def test_report_formats(library):
    report = validate(load(fixture_path("garcia-broken.nt")), library)
    assert report.to_text().startswith("Conforms: False\n")
    line = report.to_jsonl().splitlines()[0]
    assert '"rule": "pattern-wiring/T3"' in line and '"severity": "violation"' in line


def test_mini_kg_conforms(library):
    report = validate(mini_kg(), library)
    assert report.conforms, report.to_text()
    assert report.systems_checked == 10


def test_enriched_kg_satisfies_component_input_pattern(library):
    kg = mini_kg()
    q = """
    SELECT ?ml ?sw WHERE {
      ?s a swemls:System ; swemls:hasStepML ?ml ; swemls:hasSymbolIO ?sw .
      ?ml swemls:componentInput ?sw .
    }"""
    got = {(r[0], r[1]) for r in run_query(q, kg)}
    for system in kg.subjects(vocab.TYPE, vocab.SYSTEM):
        template = library.by_iri(kg.value(system, vocab.HAS_CORRESPONDING_PATTERN))
        view = instance_view(kg, system)
        m = find_mapping(view, template)
        for step, tstep in m.steps.items():
            for v, tv in m.variables.items():
                if (tstep, tv) in template.uses and view.variables[v] == ("SW", "source"):
                    assert (step, v) in got


def _agree(view, template, use_wiring):
    found = find_mapping(view, template, use_wiring=use_wiring)
    brute = brute_force_mappings(view, template, use_wiring)
    if found is None:
        return not brute
    return (found.steps, found.variables) in brute and found.ambiguous == (len(brute) > 1)


def test_random_instances_agree_with_brute_force():
    rng = random.Random(3)
    for i in range(30):
        template = random_compilable_template(rng, max_steps=5)
        wired = i % 2 == 0
        inst = instance_from_template(template, rng, wired=wired)
        view = instance_view(inst.graph, inst.system)
        m = find_mapping(view, template)
        assert m is not None
        assert _agree(view, template, wired)
        if wired:
            # wiring pins the mapping to the one the instance was generated from, up to symmetry
            assert any(s == {v: k for k, v in inst.steps.items()} for s, _ in brute_force_mappings(view, template, True))


def test_mutations_rejected_by_both():
    rng = random.Random(4)
    for _ in range(30):
        template = random_compilable_template(rng, max_steps=5)
        inst = instance_from_template(template, rng, wired=rng.random() < 0.7)
        g, how = mutate_instance(inst, template, rng)
        view = instance_view(g, inst.system)
        assert find_mapping(view, template) is None, how
        assert not brute_force_mappings(view, template, view.wired), how


def test_missing_ordinals_resolved_lexicographically_and_flagged():
    t = compile_notation("P", "[{sym -> ML -> data / sym -> ML -> data} -> ML -> sym]")
    inst = instance_from_template(t, random.Random(0), wired=False, ordinals=False)
    m = find_mapping(instance_view(inst.graph, inst.system), t)
    assert m is not None and m.ambiguous
