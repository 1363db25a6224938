"""SPARQL-subset queries and trend reports over a SWeMLS graph."""
from .engine import BindingTable, evaluate, run_query, short_text, term_text
from .reports import DIMENSIONS, format_report, trend_report
from .syntax import (
    Aggregate,
    GroupPattern,
    Query,
    QuerySyntaxError,
    SubSelect,
    TriplePattern,
    UnionPattern,
    UnsupportedFeature,
    Var,
    parse_query,
)

__all__ = [
    "Aggregate",
    "BindingTable",
    "DIMENSIONS",
    "GroupPattern",
    "Query",
    "QuerySyntaxError",
    "SubSelect",
    "TriplePattern",
    "UnionPattern",
    "UnsupportedFeature",
    "Var",
    "evaluate",
    "format_report",
    "parse_query",
    "run_query",
    "short_text",
    "term_text",
    "trend_report",
]
