"""Command-line entry point: ``swemls <subcommand> ...``.

Exit codes: 0 success, 1 validation failure, 2 usage or input error.
Data goes to stdout unless ``-o`` is given; diagnostics go to stderr.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import vocab
from .boxology import NotationError, parse_pattern
from .conformance import enrich_systems, validate
from .datasets import config_path, patterns_dir
from .embed import EmbeddingSpace, RDF2VecTransformer, neighbors, project_2d, token
from .graph import Graph
from .ingest import ConfigError, ingest_rows, load_config, read_table
from .patterns import CompileError, LibraryError, TemplateError, build_template, load_library
from .query import DIMENSIONS, QuerySyntaxError, format_report, run_query, trend_report
from .terms import IRI
from .turtle import ParseError, dump, load, serialize

PATTERNS_ENV = "SWEMLS_PATTERNS"

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _existing(path: str) -> Path:
    p = Path(path)
    if not p.exists():
        raise _UsageError(f"no such file or directory: {path}")
    return p


def _default_patterns() -> str:
    return os.environ.get(PATTERNS_ENV) or str(patterns_dir())


def _emit(text: str, output: Optional[str]) -> None:
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _write_graph(graph: Graph, output: Optional[str], fmt: Optional[str]) -> None:
    if output is None or output == "-":
        sys.stdout.write(serialize(graph, fmt or "ntriples"))
    else:
        dump(graph, output, fmt)


def _expand_entity(text: str) -> str:
    if text.startswith("<") and text.endswith(">"):
        return text[1:-1]
    prefix, sep, local = text.partition(":")
    if sep and prefix in vocab.PREFIXES and not local.startswith("//"):
        return vocab.PREFIXES[prefix] + local
    return text


def _typed_entities(args, space: EmbeddingSpace) -> Optional[list[str]]:
    if not args.type:
        return None
    if not args.graph:
        raise _UsageError("--type needs --graph")
    graph = load(_existing(args.graph))
    cls = IRI(_expand_entity(args.type))
    return sorted(t for t in (token(s) for s in graph.subjects(vocab.TYPE, cls)) if t in space)


# -- subcommands --------------------------------------------------------------


def _pattern_compile(args) -> int:
    template = build_template(args.id, parse_pattern(args.notation))
    _emit(serialize(template.to_graph(), "turtle"), args.output)
    return EXIT_OK


def _pattern_check(args) -> int:
    try:
        library = load_library(_existing(args.directory))
    except LibraryError as exc:
        print(f"invalid pattern library: {exc}", file=sys.stderr)
        return EXIT_INVALID
    failures = 0
    for pattern_id in library:
        template = library.lookup(pattern_id)
        try:
            template.check()
            print(f"ok\t{template.id}\t{template.notation or ''}")
        except TemplateError as exc:
            failures += 1
            print(f"error\t{template.id}\t{exc}")
    return EXIT_INVALID if failures else EXIT_OK


def _ingest(args) -> int:
    config = load_config(_existing(args.config))
    result = ingest_rows(read_table(_existing(args.table)), config)
    graph = result.graph
    for extra in args.terms or ():
        graph = graph | load(_existing(extra))
    _write_graph(graph, args.output, args.format)
    print(f"rows read: {result.rows_read}, ingested: {result.rows_ingested}, rejected: {len(result.errors)}",
          file=sys.stderr)
    for err in result.errors:
        print(f"  {err}", file=sys.stderr)
    return EXIT_INVALID if result.errors else EXIT_OK


def _enrich(args) -> int:
    graph = load(_existing(args.graph))
    library = load_library(_existing(args.patterns))
    enriched, skipped = enrich_systems(graph, library)
    _write_graph(enriched, args.output, args.format)
    print(f"added {len(enriched) - len(graph)} triples; skipped {len(skipped)} systems", file=sys.stderr)
    for system, reason in sorted(skipped.items()):
        print(f"  skipped {system}: {reason}", file=sys.stderr)
    return EXIT_OK


def _validate(args) -> int:
    graph = load(_existing(args.graph))
    library = load_library(_existing(args.patterns))
    report = validate(graph, library)
    fmt = args.report_format or ("jsonl" if args.report and args.report.endswith((".jsonl", ".json")) else "text")
    text = report.to_jsonl() if fmt == "jsonl" else report.to_text()
    _emit(text, args.report)
    if args.report:
        print(f"conforms: {report.conforms} ({len(report.violations)} violations, "
              f"{len(report.warnings)} warnings, {report.systems_checked} systems)", file=sys.stderr)
    return EXIT_OK if report.conforms else EXIT_INVALID


def _query(args) -> int:
    graph = load(_existing(args.graph))
    table = run_query(_existing(args.queryfile).read_text(encoding="utf-8"), graph)
    _emit(table.to_tsv(short=args.short), args.output)
    return EXIT_OK


def _report(args) -> int:
    graph = load(_existing(args.graph))
    _emit(format_report(trend_report(graph, args.by), args.by), args.output)
    return EXIT_OK


def _embed(args) -> int:
    graph = load(_existing(args.graph))
    model = RDF2VecTransformer(
        walks_per_entity=args.walks, depth=args.depth, dim=args.dim, window=args.window,
        negatives=args.negatives, epochs=args.epochs, learning_rate=args.lr, seed=args.seed, n_jobs=args.jobs,
    ).fit(graph)
    _emit(model.space_.to_text(), args.output)
    losses = ", ".join(f"{x:.4f}" for x in model.loss_curve_)
    print(f"embedded {len(model.space_)} tokens from {len(model.corpus_)} walks; epoch losses: {losses}",
          file=sys.stderr)
    return EXIT_OK


def _neighbors(args) -> int:
    space = EmbeddingSpace.load(_existing(args.space))
    entity = _expand_entity(args.entity)
    if entity not in space:
        raise _UsageError(f"entity not in embedding space: {args.entity}")
    rows = neighbors(space, entity, args.k, candidates=_typed_entities(args, space))
    _emit("".join(f"{name}\t{score:.6f}\n" for name, score in rows), args.output)
    return EXIT_OK


def _project(args) -> int:
    space = EmbeddingSpace.load(_existing(args.space))
    rows = project_2d(space, _typed_entities(args, space))
    _emit("entity\tx\ty\n" + "".join(f"{n}\t{x!r}\t{y!r}\n" for n, x, y in rows), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="swemls", description="Build, check, query and embed a SWeMLS knowledge graph.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    pattern = sub.add_parser("pattern", help="compile or check workflow pattern templates")
    psub = pattern.add_subparsers(dest="pattern_command", required=True, parser_class=_Parser)
    p = psub.add_parser("compile", help="compile a boxology notation to a Turtle template")
    p.add_argument("id")
    p.add_argument("notation")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_pattern_compile)
    p = psub.add_parser("check", help="load and check every template in a directory")
    p.add_argument("directory")
    p.set_defaults(func=_pattern_check)

    graph_formats = ["turtle", "ntriples"]

    p = sub.add_parser("ingest", help="convert a system table to RDF")
    p.add_argument("table")
    p.add_argument("--config", default=str(config_path()))
    p.add_argument("--terms", action="append", help="extra Turtle file (labels, hierarchy) to merge in")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=graph_formats)
    p.set_defaults(func=_ingest)

    p = sub.add_parser("enrich", help="add component wiring from the matching pattern templates")
    p.add_argument("graph")
    p.add_argument("--patterns", default=None)
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=graph_formats)
    p.set_defaults(func=_enrich)

    p = sub.add_parser("validate", help="check systems against generic rules and their patterns")
    p.add_argument("graph")
    p.add_argument("--patterns", default=None)
    p.add_argument("--report", help="write the report here instead of stdout")
    p.add_argument("--report-format", choices=["text", "jsonl"])
    p.set_defaults(func=_validate)

    p = sub.add_parser("query", help="run a SPARQL-subset query file, TSV output")
    p.add_argument("graph")
    p.add_argument("queryfile")
    p.add_argument("--short", action="store_true", help="show IRIs by local name")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_query)

    p = sub.add_parser("report", help="count systems per dimension value")
    p.add_argument("graph")
    p.add_argument("--by", required=True, choices=list(DIMENSIONS))
    p.add_argument("-o", "--output")
    p.set_defaults(func=_report)

    p = sub.add_parser("embed", help="train RDF2vec-style embeddings")
    p.add_argument("graph")
    p.add_argument("--walks", type=int, default=50, help="walks per entity")
    p.add_argument("--depth", type=int, default=4, help="hops per walk")
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--negatives", type=int, default=5)
    p.add_argument("--epochs", type=int, default=5)
    p.add_argument("--lr", type=float, default=0.025)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="parallel walk generation (same corpus)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_embed)

    for name, func, helptext in (("neighbors", _neighbors, "nearest entities by cosine"),
                                 ("project", _project, "2D PCA projection, TSV")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("space")
        if name == "neighbors":
            p.add_argument("entity", help="full IRI, <IRI> or prefixed name such as res:Resource.FB15k")
            p.add_argument("-k", type=int, default=10)
        p.add_argument("--graph", help="graph used to resolve --type")
        p.add_argument("--type", help="only consider entities of this rdf:type")
        p.add_argument("-o", "--output")
        p.set_defaults(func=func)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s %(message)s")
    if hasattr(args, "patterns") and args.patterns is None:
        args.patterns = _default_patterns()
    if getattr(args, "k", 1) < 1:
        print("swemls: error: -k must be at least 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (_UsageError, NotationError, CompileError, ParseError, ConfigError, LibraryError, TemplateError,
            QuerySyntaxError, ValueError, KeyError, OSError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"swemls: error: {message}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
