"""Regenerate the Garcia graph fixtures from data/fixtures/garcia.tsv.

garcia.nt is ingested and enriched; garcia-broken.nt lacks the wiring edge
that feeds the external data into the second ML step.
"""
from pathlib import Path

from swemls import vocab
from swemls.conformance import enrich
from swemls.datasets import config_path, default_library
from swemls.ingest import ingest_rows, load_config, read_table
from swemls.terms import Triple
from swemls.turtle import dump

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "swemls" / "data" / "fixtures"


def broken_edge(graph):
    """componentInput from the ML2 step to its Data source variable."""
    for t in graph.match(None, vocab.COMPONENT_INPUT, None):
        if t.subject.value.endswith(".ML2") and graph.value(t.object, vocab.TYPE) == vocab.DATA_RESOURCE:
            return t
    raise SystemExit("no ML2 data input edge found")


if __name__ == "__main__":
    result = ingest_rows(read_table(FIXTURES / "garcia.tsv"), load_config(config_path()))
    assert not result.errors, result.errors
    graph = enrich(result.graph, default_library())
    dump(graph, FIXTURES / "garcia.nt")
    broken = graph.copy()
    broken.remove(broken_edge(graph))
    dump(broken, FIXTURES / "garcia-broken.nt")
