"""Files shipped with the package and the small demonstration KG built from them."""
from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from .conformance import enrich
from .graph import Graph
from .ingest import ingest_rows, load_config, read_table
from .patterns import PatternLibrary, load_library
from .turtle import load

_DATA = Path(__file__).resolve().parent / "data"

__all__ = [
    "data_path",
    "patterns_dir",
    "config_path",
    "systems_table",
    "resources_path",
    "query_path",
    "fixture_path",
    "default_library",
    "mini_kg",
]


def data_path(*parts: str) -> Path:
    return _DATA.joinpath(*parts)


def patterns_dir() -> Path:
    return data_path("patterns")


def config_path() -> Path:
    return data_path("config.tsv")


def systems_table() -> Path:
    return data_path("systems.tsv")


def resources_path() -> Path:
    return data_path("resources.ttl")


def query_path(name: str) -> Path:
    return data_path("queries", name if name.endswith(".rq") else name + ".rq")


def fixture_path(name: str) -> Path:
    return data_path("fixtures", name)


def default_library() -> PatternLibrary:
    return load_library(patterns_dir())


@lru_cache(maxsize=1)
def _mini_kg() -> Graph:
    result = ingest_rows(read_table(systems_table()), load_config(config_path()))
    if result.errors:
        raise RuntimeError(f"shipped systems table has bad rows: {result.errors}")
    return enrich(result.graph | load(resources_path()), default_library())


def mini_kg() -> Graph:
    """Shipped systems table, ingested, merged with resource labels, enriched.

    Returns a fresh copy on every call.
    """
    return _mini_kg().copy()
