"""Toolkit for a knowledge graph of Semantic Web + machine learning systems.

Modules: :mod:`terms`/:mod:`graph`/:mod:`turtle` (RDF core), :mod:`boxology`
and :mod:`patterns` (workflow pattern templates), :mod:`conformance`
(validation and enrichment), :mod:`ingest` (table to RDF), :mod:`query`
(SPARQL subset, trend reports), :mod:`embed` (RDF2vec-style embeddings).
"""
from .graph import Graph
from .terms import IRI, BNode, Literal, Triple
from .turtle import load, parse, serialize

__version__ = "0.1.0"

__all__ = ["Graph", "IRI", "BNode", "Literal", "Triple", "load", "parse", "serialize", "__version__"]
