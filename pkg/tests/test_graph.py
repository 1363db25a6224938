import itertools
import random

import pytest
from hypothesis import given, strategies as st

from swemls import vocab
from swemls.graph import Graph
from swemls.terms import BNode, IRI, Literal, TermError, Triple, sort_key
from swemls.turtle import parse

EX = "http://example.org/"
T3 = vocab.res("Pattern.T3")


def test_iri_rejects_empty_and_whitespace():
    for bad in ("", "http://x y", "a\tb"):
        with pytest.raises(TermError):
            IRI(bad)


def test_literal_subject_rejected():
    with pytest.raises(TermError):
        Triple(Literal("x"), vocab.LABEL, Literal("y"))


def test_predicate_must_be_iri():
    with pytest.raises((TermError, TypeError)):
        Triple(IRI(EX + "s"), BNode("b"), Literal("y"))


def test_literal_datatype_and_language_exclusive():
    with pytest.raises(TermError):
        Literal("x", datatype=vocab.XSD + "string", language="en")


def test_insert_is_idempotent():
    g = Graph()
    t = Triple(T3, vocab.TYPE, vocab.WORKFLOW_TEMPLATE)
    g.add(t)
    g.add(t)
    assert len(g) == 1


def test_insert_then_match_template_type():
    g = Graph()
    g.insert(T3, vocab.TYPE, vocab.WORKFLOW_TEMPLATE)
    assert len(g.match(T3, vocab.TYPE, None)) == 1


def test_match_on_empty_graph():
    assert Graph().match() == []


def test_steps_of_listing1(listing1_text):
    g = parse(listing1_text)
    rows = g.match(None, vocab.IS_STEP_OF_TEMPLATE, T3)
    assert [t.subject for t in rows] == [vocab.res("Pattern.T3.ML1"), vocab.res("Pattern.T3.ML2")]


def test_remove_and_set_operations():
    a = Triple(IRI(EX + "a"), IRI(EX + "p"), Literal("1"))
    b = Triple(IRI(EX + "b"), IRI(EX + "p"), Literal("2"))
    g = Graph([a, b])
    g.remove(a)
    assert list(g) == [b] and not g.match(IRI(EX + "a"))
    assert set(Graph([a]) | Graph([b])) == {a, b}
    assert set(Graph([a, b]) - Graph([b])) == {a}


def test_sort_key_orders_kinds():
    terms = [Literal("a"), BNode("b"), IRI(EX + "c")]
    assert sorted(terms, key=sort_key) == [IRI(EX + "c"), BNode("b"), Literal("a")]


def test_vocabulary_namespaces():
    assert vocab.SWEMLS == "https://w3id.org/semsys/ns/swemls#"
    assert vocab.RES == "http://semantic-systems.net/swemls/"
    assert vocab.PPLAN == "http://purl.org/net/p-plan#"
    assert vocab.OPMW == "http://www.opmw.org/ontology/"
    assert vocab.IS_PRECEDED_BY.value.endswith("#isPreceededBy")


def test_local_name():
    assert vocab.local_name(vocab.res("Domain.Medicine_Health")) == "Medicine_Health"
    assert vocab.local_name(vocab.SYSTEM) == "System"


nodes = st.sampled_from([IRI(EX + f"n{i}") for i in range(6)] + [BNode(f"b{i}") for i in range(2)])
objects = st.one_of(nodes, st.sampled_from([Literal("x"), Literal("y", language="en"), Literal("1", datatype=vocab.XSD + "integer")]))
triples = st.builds(Triple, nodes, st.sampled_from([IRI(EX + "p"), IRI(EX + "q"), vocab.TYPE]), objects)


@given(st.lists(triples, max_size=40))
def test_match_equals_linear_scan(ts):
    g = Graph(ts)
    everything = list(set(ts))
    subjects = {t.subject for t in everything} | {None}
    predicates = {t.predicate for t in everything} | {None}
    objs = {t.object for t in everything} | {None}
    for s, p, o in itertools.islice(itertools.product(subjects, predicates, objs), 200):
        expected = sorted((t for t in everything if (s is None or t.subject == s) and (p is None or t.predicate == p)
                           and (o is None or t.object == o)), key=Triple.key)
        assert g.match(s, p, o) == expected
    assert g.count() == len(g) == len(everything)


def test_match_is_deterministic():
    rng = random.Random(1)
    ts = [Triple(IRI(EX + f"n{rng.randrange(9)}"), IRI(EX + "p"), Literal(str(rng.randrange(9)))) for _ in range(50)]
    shuffled = ts[:]
    rng.shuffle(shuffled)
    assert Graph(ts).match() == Graph(shuffled).match()
