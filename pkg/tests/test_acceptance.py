"""The ten primary acceptance criteria.

Each criterion runs under its stated time budget and prints one PASS/FAIL
line (collected into the pytest terminal summary; run this file directly
with ``python3 tests/test_acceptance.py`` for a plain listing).
"""
from __future__ import annotations

import random
import re
import sys
import time
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import (  # noqa: E402
    QueryGenerator,
    ReferenceEvaluator,
    ast_depth,
    brute_force_mappings,
    clique_gap,
    instance_from_template,
    isomorphic_modulo_renaming,
    mutate_instance,
    pca_eigh,
    random_ast,
    random_compilable_template,
    random_graph,
    random_rdf_graph,
    render_query,
    two_clique_graph,
)
from swemls import vocab  # noqa: E402
from swemls.boxology import parse_pattern, render_notation  # noqa: E402
from swemls.conformance import enrich, find_mapping, instance_view, validate  # noqa: E402
from swemls.datasets import (  # noqa: E402
    config_path,
    default_library,
    fixture_path,
    mini_kg,
    patterns_dir,
    query_path,
    resources_path,
)
from swemls.embed import EmbeddingSpace, RDF2VecTransformer, TrainConfig, generate_walks, project_2d, train  # noqa: E402
from swemls.graph import Graph  # noqa: E402
from swemls.ingest import ingest_rows, load_config, read_table  # noqa: E402
from swemls.patterns import compile_template  # noqa: E402
from swemls.query import run_query, trend_report  # noqa: E402
from swemls.terms import Triple  # noqa: E402
from swemls.turtle import load, parse, serialize  # noqa: E402

DATA = Path(__file__).parent / "data"
T3 = "[{sym -> ML -> data / data} -> ML -> sym]"
RESULTS: dict[int, tuple[bool, float, str]] = {}

# Rows exactly as printed in the two results tables (excerpts of the full KG).
MEDICAL_TABLE = [
    ("CCS", "Attention,GloVe,MLP,RNN", "Self-supervised",
     "GRAM: Graph-Based Attention Model for Healthcare Representation Learning", "2017"),
    ("UMLS", "ARM", "Self-supervised", "Guiding supervised learning by bio-ontologies in medical data analysis", "2018"),
    ("ICD", "Graph-based Attention Model,Knowledge Attention,Gated Recurrent Unit (GRU)", "Supervised",
     "KAME: Knowledge-based attention model for diagnosis prediction in healthcare", "2018"),
    ("DBpedia", "SVM", "Supervised", "Improving rare disease classification using imperfect knowledge graph", "2019"),
]
PATTERN_TABLE = [
    ("General", "KG_Completion", "F4", "...SW_cc6bef6e", "FB122", "Jointly embedding knowledge graphs ...", "2016"),
    ("General", "KG_Completion", "F2", "...SW_d5ee1a61", "FB_500K", "Probabilistic Belief Embedding ...", "2016"),
    ("General", "KG_Completion", "A1", "...SW_f27afb1c", "FB13,FB15k", "Learning Knowledge Embeddings by ...", "2017"),
    ("General", "KG_Completion", "A1", "FB15k", "", "Knowledge Graph Embedding via ...", "2018"),
    ("General", "Question_Answering", "F3", "...SW_1fb71cdc", "FB15k", "Representation Learning of ...", "2019"),
]
# Hand count of the years printed in both tables plus the Garcia system (2019).
YEAR_COUNTS = {"2016": 2, "2017": 2, "2018": 3, "2019": 3}


def _cell_matches(printed: str, got: str) -> bool:
    """Printed cells abbreviate opaque compound ids and long titles with '...'."""
    if printed.startswith("...SW_"):
        return re.fullmatch(r"SW_[0-9a-f]{8}", got) is not None
    if printed.endswith(" ...") and printed != got:
        return got.startswith(printed[:-4])
    return printed == got


def _sorted_items(cell: str) -> str:
    return ",".join(sorted(cell.split(",")))


def _timed(number: int, budget: float, description: str):
    def wrap(fn):
        def run():
            start = time.perf_counter()
            ok, detail = False, ""
            try:
                fn()
                elapsed = time.perf_counter() - start
                ok = elapsed < budget
                detail = "" if ok else f"runtime {elapsed:.2f}s exceeds {budget}s"
            except AssertionError as exc:
                elapsed = time.perf_counter() - start
                detail = str(exc).splitlines()[0] if str(exc) else "assertion failed"
            RESULTS[number] = (ok, elapsed, description + (f" -- {detail}" if detail else ""))
            line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s / {budget:g}s) {RESULTS[number][2]}"
            print(line)
            assert ok, line
        run.number = number
        run.__name__ = fn.__name__
        return run
    return wrap


@_timed(1, 1.0, "golden compile of T-3 is isomorphic to Listing 1")
def criterion_1():
    compiled = compile_template("T3", parse_pattern(T3))
    golden = parse((DATA / "listing1_t3.ttl").read_text(encoding="utf-8"))
    assert isomorphic_modulo_renaming(compiled, golden, vocab.RES + "Pattern.T3."), "not isomorphic"
    steps = compiled.match(None, vocab.IS_STEP_OF_TEMPLATE, vocab.res("Pattern.T3"))
    assert len(steps) == 2
    assert len(compiled.subjects(vocab.TYPE, vocab.TEMPLATE_ARTIFACT_SW)) == 2
    assert len(compiled.subjects(vocab.TYPE, vocab.TEMPLATE_ARTIFACT_DATA)) == 2
    for pred in (vocab.USES, vocab.IS_GENERATED_BY, vocab.IS_PRECEDED_BY):
        assert set(compiled.match(None, pred, None)) == set(golden.match(None, pred, None)), pred


@_timed(2, 5.0, "notation round trip on T-3 and 200 generated ASTs")
def criterion_2():
    ast = parse_pattern(T3)
    assert parse_pattern(render_notation(ast)) == ast and render_notation(ast) == T3
    rng = random.Random(2024)
    for i in range(200):
        a = random_ast(rng, depth=3)
        assert ast_depth(a) <= 3
        assert parse_pattern(render_notation(a)) == a, f"AST {i} does not round trip"


@_timed(3, 1.0, "Garcia row: ingest, enrich, validate; every wiring edge is load-bearing")
def criterion_3():
    library = default_library()
    g = ingest_rows(read_table(fixture_path("garcia.tsv")), load_config(config_path())).graph
    enriched = enrich(g, library)
    report = validate(enriched, library)
    assert report.conforms and report.systems_checked == 1, report.to_text()
    added = set(enriched) - set(g)
    s = vocab.res
    ml1, ml2 = s("System_TGVVJBNX.ML1"), s("System_TGVVJBNX.ML2")
    assert added == {
        Triple(ml1, vocab.COMPONENT_INPUT, s("Resource.Custom_KG")),
        Triple(ml1, vocab.COMPONENT_OUTPUT, s("Data.Vectorized_KG")),
        Triple(ml2, vocab.COMPONENT_INPUT, s("Data.Vectorized_KG")),
        Triple(ml2, vocab.COMPONENT_INPUT, s("Data.External_Data")),
        Triple(ml2, vocab.COMPONENT_OUTPUT, s("Resource.Predicted_Links")),
        Triple(ml2, vocab.IS_PRECEDED_BY, ml1),
    }, sorted(added, key=Triple.key)
    assert len(added) == 6
    for edge in sorted(added, key=Triple.key):
        broken = enriched.copy()
        broken.remove(edge)
        r = validate(broken, library)
        assert not r.conforms, f"removing {edge} still conforms"
        assert ("http://semantic-systems.net/swemls/System_TGVVJBNX", "pattern-wiring/T3") in {
            (v.focus, v.rule) for v in r.violations}


@_timed(4, 1.0, "Listing 2 over the mini-KG returns the 4 medical rows")
def criterion_4():
    kg = mini_kg()
    assert len(kg.subjects(vocab.TYPE, vocab.SYSTEM)) >= 10
    table = run_query(query_path("listing2").read_text(encoding="utf-8"), kg)
    got = sorted(table.as_text(short=True))
    expected = sorted((r[0], _sorted_items(r[1])) + r[2:] for r in MEDICAL_TABLE)
    assert got == expected, got
    assert ("CCS", "Attention,GloVe,MLP,RNN", "Self-supervised",
            "GRAM: Graph-Based Attention Model for Healthcare Representation Learning", "2017") in got


@_timed(5, 1.0, "Listing 3 over the mini-KG returns the 5 pattern rows")
def criterion_5():
    table = run_query(query_path("listing3").read_text(encoding="utf-8"), mini_kg())
    got = table.as_text(short=True)
    assert len(got) == len(PATTERN_TABLE), got
    remaining = list(got)
    for printed in PATTERN_TABLE:
        match = [r for r in remaining if all(_cell_matches(p, c) for p, c in zip(printed, r))]
        assert len(match) == 1, f"row {printed} matched {match}"
        remaining.remove(match[0])
    assert any(r[2] == "A1" and r[4] == "FB13,FB15k" and r[6] == "2017" for r in got)


@_timed(6, 30.0, "100 random queries agree with the reference evaluator")
def criterion_6():
    mismatches = 0
    for i in range(100):
        rng = random.Random(i)
        g = random_graph(rng, max_triples=500)
        assert len(g) <= 500
        q = QueryGenerator(rng).query()
        table = run_query(render_query(q, rng), g)
        cols, rows = ReferenceEvaluator(g).select(q)
        if table.columns != cols or Counter(table.rows) != Counter(rows):
            mismatches += 1
    assert mismatches == 0, f"{mismatches} mismatching queries"


@_timed(7, 30.0, "find_mapping agrees with brute force on 50 instances; 50 mutants rejected by both")
def criterion_7():
    rng = random.Random(77)
    for i in range(50):
        template = random_compilable_template(rng, max_steps=6)
        inst = instance_from_template(template, rng, wired=i % 2 == 0)
        view = instance_view(inst.graph, inst.system)
        found = find_mapping(view, template)
        brute = brute_force_mappings(view, template, view.wired)
        assert found is not None and brute, f"instance {i} not mapped"
        assert (found.steps, found.variables) in brute, f"instance {i}: mapping not among brute-force solutions"
        assert found.ambiguous == (len(brute) > 1), f"instance {i}: ambiguity flag"
    for i in range(50):
        template = random_compilable_template(rng, max_steps=6)
        inst = instance_from_template(template, rng, wired=rng.random() < 0.7)
        g, how = mutate_instance(inst, template, rng)
        view = instance_view(g, inst.system)
        assert find_mapping(view, template) is None, f"mutant {i} ({how}) accepted by find_mapping"
        assert not brute_force_mappings(view, template, view.wired), f"mutant {i} ({how}) accepted by brute force"


@_timed(8, 60.0, "embeddings: bit-identical reruns, clique separation in >=9/10 seeds, PCA matches eigh")
def criterion_8():
    kg = mini_kg()
    a = RDF2VecTransformer(seed=0).fit(kg).space_.to_text()
    b = RDF2VecTransformer(seed=0).fit(kg).space_.to_text()
    assert a == b, "dumps differ between runs"
    g, ca, cb = two_clique_graph()
    wins = 0
    for seed in range(10):
        space = train(generate_walks(g, seed=seed), TrainConfig(seed=seed))
        wins += clique_gap(space, ca, cb) > 0
    assert wins >= 9, f"intra > inter in only {wins}/10 seeds"
    rng = np.random.default_rng(8)
    X = rng.normal(size=(100, 16)) * np.linspace(4, 0.5, 16)
    coords = np.array([(x, y) for _, x, y in project_2d(EmbeddingSpace([f"e{i:03d}" for i in range(100)], X))])
    want = pca_eigh(X, 2)
    for axis in range(2):
        sign = np.sign(coords[:, axis] @ want[:, axis])
        assert np.max(np.abs(coords[:, axis] - sign * want[:, axis])) < 1e-6, f"PCA axis {axis} differs"


@_timed(9, 10.0, "Turtle and N-Triples round trip on all fixtures and 100 random graphs")
def criterion_9():
    files = sorted(patterns_dir().glob("*.ttl")) + [resources_path(), fixture_path("garcia.nt"),
                                                      fixture_path("garcia-broken.nt"), DATA / "listing1_t3.ttl"]
    graphs = [load(f) for f in files] + [mini_kg()] + [random_rdf_graph(random.Random(i)) for i in range(100)]
    mismatches = sum(parse(serialize(g, fmt), fmt) != g for g in graphs for fmt in ("turtle", "ntriples"))
    assert mismatches == 0, f"{mismatches} round-trip mismatches"


@_timed(10, 1.0, "per-year trend report equals the hand count")
def criterion_10():
    rows = trend_report(mini_kg(), "year")
    assert dict(rows) == YEAR_COUNTS, rows
    assert dict(rows)["2016"] == 2
    assert trend_report(Graph(), "year") == []


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{c.number}" for c in CRITERIA])
def test_primary_criterion(criterion):
    criterion()


def main() -> int:
    failed = 0
    for criterion in CRITERIA:
        try:
            criterion()
        except AssertionError:
            failed += 1
    print(f"{len(CRITERIA) - failed}/{len(CRITERIA)} criteria passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
