import io
import re

import pytest

from swemls import vocab
from swemls.conformance import enrich, validate
from swemls.datasets import config_path, default_library, fixture_path, systems_table
from swemls.graph import Graph
from swemls.ingest import (
    ConfigError,
    SystemRecord,
    export_rows,
    ingest_rows,
    load_config,
    mint_system_iri,
    parse_config,
    read_table,
    write_table,
)
from swemls.terms import IRI, Literal
from swemls.turtle import load

GRAM = "GRAM: Graph-Based Attention Model for Healthcare Representation Learning"


@pytest.fixture(scope="module")
def config():
    return load_config(config_path())


@pytest.fixture(scope="module")
def rows():
    return read_table(systems_table())


def test_default_config_covers_competency_fields(config):
    predicates = {r.predicate for r in config.rules}
    for p in (vocab.TITLE, vocab.YEAR, vocab.HAS_TASK, vocab.HAS_APPLICATION_DOMAIN, vocab.HAS_MATURITY,
              vocab.HAS_TRAINING_TYPE, vocab.HAS_SYMBOL_USAGE, vocab.HAS_CORRESPONDING_PATTERN,
              vocab.HAS_STATISTICAL_MODEL, vocab.AUTHOR_COUNTRY, vocab.PUBLICATION_TYPE):
        assert p in predicates


def test_unknown_predicate_rejected():
    with pytest.raises(ConfigError, match="doesNotExist"):
        parse_config("title\tpaper-field\tswemls:doesNotExist\tliteral\n")


def test_empty_config_rejected():
    with pytest.raises(ConfigError, match="no rules"):
        parse_config("# nothing here\n\n")


def test_duplicate_column_rejected():
    text = "title\tpaper-field\tterms:title\tliteral\ntitle\tpaper-field\tterms:title\tliteral\n"
    with pytest.raises(ConfigError, match="duplicate column 'title'"):
        parse_config(text)


@pytest.mark.parametrize("line", [
    "title\tpaper-field\tterms:title",
    "title\tbogus-kind\tterms:title\tliteral",
    "title\tpaper-field\tterms:title\tbogus",
    "title\tpaper-field\tzz:title\tliteral",
    "ML1\tstep\tswemls:hasStepKR\tsplit-list",
    "Foo1\tstep\tswemls:hasStepML\tsplit-list",
    "SW_source1\tvariable\tswemls:hasDataIO\tsplit-list",
    "@id-policy\trandom",
])
def test_malformed_config_lines(line):
    with pytest.raises(ConfigError, match="line 1"):
        parse_config(line + "\n")


def test_garcia_row(config):
    result = ingest_rows(read_table(fixture_path("garcia.tsv")), config)
    assert result.errors == [] and result.rows_ingested == 1
    g = result.graph
    system = vocab.res("System_TGVVJBNX")
    expected = {
        vocab.HAS_TASK: "Task.Image_and_Video",
        vocab.HAS_APPLICATION_DOMAIN: "Domain.Human_Culture_and_Education",
        vocab.HAS_MATURITY: "Maturity.Low",
        vocab.HAS_TRAINING_TYPE: "TrainingType.Supervised",
        vocab.HAS_SYMBOL_USAGE: "SymbolUsage.Complex_Structure",
        vocab.HAS_CORRESPONDING_PATTERN: "Pattern.T3",
    }
    for pred, local in expected.items():
        assert g.value(system, pred) == vocab.res(local)
    assert g.value(vocab.res("Domain.Human_Culture_and_Education"), vocab.LABEL) == Literal("Human Culture and Education")
    paper = vocab.res("Paper_TGVVJBNX")
    assert g.value(paper, vocab.YEAR) == Literal("2019")
    assert g.value(paper, vocab.REPORTS) == system


def test_garcia_row_validates_after_enrich(config, library):
    g = ingest_rows(read_table(fixture_path("garcia.tsv")), config).graph
    assert validate(enrich(g, library), library).conforms
    assert set(enrich(g, library)) == set(load(fixture_path("garcia.nt")))


def test_gram_compound_has_four_members(config, rows):
    g = ingest_rows(rows, config).graph
    paper = g.subjects(vocab.TITLE, Literal(GRAM))[0]
    system = g.value(paper, vocab.REPORTS)
    step = IRI(system.value + ".ML1")
    compound = g.value(step, vocab.COMPONENT_MODEL)
    assert re.fullmatch(r".*/Model_[0-9a-f]{8}", compound.value)
    members = g.objects(compound, vocab.HAS_COMPOUND_ELEMENT)
    assert members == [vocab.res("StatisticalModel." + m) for m in ("Attention", "GloVe", "MLP", "RNN")]


def test_zero_rows(config):
    header = "\t".join(config.columns) + "\n"
    result = ingest_rows(read_table(io.StringIO(header)), config)
    assert len(result.graph) == 0 and result.errors == [] and result.rows_read == 0


def test_bad_rows_reported_others_kept(config, rows):
    bad_year = dict(rows[0], year="19x")
    no_steps = dict(rows[1], ML1="", ML2="", ML3="", KR1="", KR2="")
    no_title = dict(rows[2], title="")
    result = ingest_rows([bad_year, no_steps, no_title] + rows[3:], config)
    assert result.rows_read == len(rows)
    assert [e.row for e in result.errors] == [2, 3, 4]
    assert "four-digit" in str(result.errors[0]) and "step" in str(result.errors[1])
    assert len(result.graph.subjects(vocab.TYPE, vocab.SYSTEM)) == len(rows) - 3


def test_missing_columns(config):
    with pytest.raises(ConfigError, match="lacks configured columns"):
        ingest_rows([{"title": "x"}], config)


def test_mint_system_iri(config, rows):
    records = [SystemRecord.from_row(r, config) for r in rows]
    iris = [mint_system_iri(r) for r in records]
    assert all(re.fullmatch(re.escape(vocab.RES) + r"System_[A-Z0-9]{8}", i.value) for i in iris)
    assert len(set(iris)) == len(records)
    assert mint_system_iri(records[0]) == mint_system_iri(SystemRecord.from_row(rows[0], config))


def test_every_ingested_system_validates(config, rows, library):
    g = ingest_rows(rows, config).graph
    generic = [v for v in validate(g, library).violations if v.rule.startswith("generic/")]
    assert generic == []
    assert validate(enrich(g, library), library).conforms


def test_export_reingest_fixed_point(config, rows):
    g = ingest_rows(rows, config).graph
    exported = export_rows(g, config)
    table = write_table(exported, config.columns)
    again = ingest_rows(read_table(io.StringIO(table)), config)
    assert again.errors == []
    assert set(again.graph) == set(g)
