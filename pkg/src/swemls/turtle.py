"""Turtle (subset) and N-Triples reading and writing.

Supported Turtle: ``@prefix``/``PREFIX`` and ``@base``/``BASE`` directives, the
``a`` keyword, ``;`` predicate lists, ``,`` object lists, blank nodes
(``_:x``, ``[]`` and ``[ p o ]``), plain, typed and language-tagged literals,
numeric and boolean shorthands, ``#`` line comments and ``/* ... */`` block
comments. Collections are rejected.
"""
from __future__ import annotations

import re
from pathlib import Path
from dataclasses import dataclass
from typing import Optional

from . import vocab
from .graph import Graph
from .terms import IRI, BNode, Literal, Term, Triple, TermError

__all__ = ["ParseError", "parse", "serialize", "FORMATS"]

FORMATS = ("turtle", "ntriples")


class ParseError(ValueError):
    """Syntax error with a 1-based line/column position."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})" if line else message)


class UnknownPrefixError(ParseError):
    def __init__(self, prefix: str, line: int, column: int):
        self.prefix = prefix
        super().__init__(f"unknown prefix {prefix!r}", line, column)


_PN_LOCAL_ESC = r"\\[_~.\-!$&'()*+,;=/?#@%]"
_PN_CHARS = r"[\w\-\u00B7\u0300-\u036F\u203F-\u2040]"
_LOCAL = rf"(?:[\w:%]|{_PN_LOCAL_ESC})(?:(?:{_PN_CHARS}|[.:%]|{_PN_LOCAL_ESC})*(?:{_PN_CHARS}|[:%]|{_PN_LOCAL_ESC}))?"

_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+"),
    ("LCOMMENT", r"#[^\n]*"),
    ("BCOMMENT", r"/\*.*?\*/"),
    ("IRIREF", r"<[^<>\"{}|^`\\\x00-\x20]*(?:\\[uU][0-9A-Fa-f]+[^<>\"{}|^`\\\x00-\x20]*)*>"),
    ("LSTRING", r'"""(?:[^"\\]|\\.|"(?!""))*"""' + r"|'''(?:[^'\\]|\\.|'(?!''))*'''"),
    ("STRING", r'"(?:[^"\\\n\r]|\\.)*"' + r"|'(?:[^'\\\n\r]|\\.)*'"),
    ("LANGTAG", r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*"),
    ("DTYPE", r"\^\^"),
    ("BNODE", r"_:[A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?"),
    ("PNAME", rf"(?:[A-Za-z](?:[\w\-.]*[\w\-])?)?:(?:{_LOCAL})?"),
    ("DOUBLE", r"[+-]?(?:\d+\.\d*[eE][+-]?\d+|\.\d+[eE][+-]?\d+|\d+[eE][+-]?\d+)"),
    ("DECIMAL", r"[+-]?\d*\.\d+"),
    ("INTEGER", r"[+-]?\d+"),
    ("NAME", r"[A-Za-z][A-Za-z0-9_]*"),
    ("PUNCT", r"[.;,\[\]()]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKEN_SPEC), re.S)


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            if text.startswith("/*", pos):
                raise ParseError("unterminated block comment", line, pos - line_start + 1)
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("WS", "LCOMMENT", "BCOMMENT"):
            tokens.append(_Token(kind, value, line, pos - line_start + 1))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Token("EOF", "", line, pos - line_start + 1))
    return tokens


_ESCAPES = {"t": "\t", "n": "\n", "r": "\r", "b": "\b", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _unescape(body: str, tok: _Token) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        nxt = body[i + 1 : i + 2]
        if nxt in _ESCAPES:
            out.append(_ESCAPES[nxt])
            i += 2
        elif nxt in ("u", "U"):
            width = 4 if nxt == "u" else 8
            hexdigits = body[i + 2 : i + 2 + width]
            if len(hexdigits) != width or not re.fullmatch(r"[0-9A-Fa-f]+", hexdigits):
                raise ParseError("bad unicode escape", tok.line, tok.column)
            out.append(chr(int(hexdigits, 16)))
            i += 2 + width
        else:
            raise ParseError(f"bad escape sequence \\{nxt}", tok.line, tok.column)
    return "".join(out)


def _unescape_iri(body: str, tok: _Token) -> str:
    if "\\" not in body:
        return body
    return _unescape(body, tok)


class _TurtleParser:
    def __init__(self, text: str, ntriples: bool = False):
        self.tokens = _tokenize(text)
        self.i = 0
        self.ntriples = ntriples
        self.prefixes: dict[str, str] = {} if ntriples else dict(vocab.IMPLICIT_PREFIXES)
        self.declared: dict[str, str] = {}
        self.base: Optional[str] = None
        self.graph = Graph()
        self._bnode_count = 0
        self._bnode_labels: set[str] = set()

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def _advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def _error(self, message: str, tok: Optional[_Token] = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.column)

    def _expect(self, text: str) -> _Token:
        if self.tok.text != text or self.tok.kind not in ("PUNCT",):
            raise self._error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        return self._advance()

    def parse(self) -> Graph:
        while self.tok.kind != "EOF":
            self._statement()
        self.graph.prefixes = dict(vocab.PREFIXES)
        for prefix, ns in self.declared.items():
            if prefix not in self.graph.prefixes:
                self.graph.prefixes[prefix] = ns
        return self.graph

    def _statement(self):
        tok = self.tok
        if not self.ntriples:
            if tok.kind == "LANGTAG" and tok.text in ("@prefix", "@base"):
                self._advance()
                self._directive(tok.text[1:], sparql_style=False)
                return
            if tok.kind == "NAME" and tok.text.upper() in ("PREFIX", "BASE"):
                self._advance()
                self._directive(tok.text.lower(), sparql_style=True)
                return
        self._triples()
        self._expect(".")

    def _directive(self, kind: str, sparql_style: bool):
        if kind == "prefix":
            tok = self._advance()
            if tok.kind != "PNAME" or not tok.text.endswith(":") or tok.text.count(":") != 1:
                raise self._error("expected a prefix name such as 'ex:'", tok)
            prefix = tok.text[:-1]
            iri_tok = self._advance()
            if iri_tok.kind != "IRIREF":
                raise self._error("expected an IRI after the prefix name", iri_tok)
            ns = self._resolve(_unescape_iri(iri_tok.text[1:-1], iri_tok))
            self.prefixes[prefix] = ns
            self.declared[prefix] = ns
        else:
            iri_tok = self._advance()
            if iri_tok.kind != "IRIREF":
                raise self._error("expected an IRI after base", iri_tok)
            self.base = self._resolve(_unescape_iri(iri_tok.text[1:-1], iri_tok))
        if not sparql_style:
            self._expect(".")

    def _resolve(self, iri: str) -> str:
        if self.base and not re.match(r"[A-Za-z][A-Za-z0-9+.\-]*:", iri):
            if iri.startswith("#") or iri == "":
                return self.base.split("#", 1)[0] + iri
            return self.base.rsplit("/", 1)[0] + "/" + iri if not iri.startswith("/") else iri
        return iri

    def _triples(self):
        tok = self.tok
        if tok.kind == "PUNCT" and tok.text == "[":
            subject = self._blank_property_list()
            if self.tok.kind == "PUNCT" and self.tok.text == ".":
                return
        else:
            subject = self._subject()
        self._predicate_object_list(subject)

    def _subject(self) -> Term:
        tok = self.tok
        if tok.kind in ("IRIREF", "PNAME"):
            return self._iri()
        if tok.kind == "BNODE":
            self._advance()
            return self._bnode(tok.text[2:])
        if tok.kind in ("STRING", "LSTRING", "INTEGER", "DECIMAL", "DOUBLE") or tok.text in ("true", "false"):
            raise self._error("a literal cannot be a subject")
        if tok.kind == "PUNCT" and tok.text == "(":
            raise self._error("collections are not supported")
        raise self._error(f"expected a subject, found {tok.text or 'end of input'!r}")

    def _iri(self) -> IRI:
        tok = self._advance()
        try:
            if tok.kind == "IRIREF":
                return IRI(self._resolve(_unescape_iri(tok.text[1:-1], tok)))
            if tok.kind == "PNAME" and not self.ntriples:
                prefix, local = tok.text.split(":", 1)
                if prefix not in self.prefixes:
                    raise UnknownPrefixError(prefix, tok.line, tok.column)
                local = re.sub(r"\\(.)", r"\1", local)
                return IRI(self.prefixes[prefix] + local)
        except TermError as exc:
            raise self._error(str(exc), tok) from None
        raise self._error(f"expected an IRI, found {tok.text or 'end of input'!r}", tok)

    def _bnode(self, label: Optional[str] = None) -> BNode:
        if label is None:
            while True:
                self._bnode_count += 1
                label = f"genid{self._bnode_count}"
                if label not in self._bnode_labels:
                    break
        self._bnode_labels.add(label)
        return BNode(label)

    def _predicate_object_list(self, subject: Term):
        while True:
            predicate = self._verb()
            self._object_list(subject, predicate)
            if not (self.tok.kind == "PUNCT" and self.tok.text == ";"):
                return
            while self.tok.kind == "PUNCT" and self.tok.text == ";":
                self._advance()
            if self.tok.kind == "PUNCT" and self.tok.text in (".", "]"):
                return

    def _verb(self) -> IRI:
        tok = self.tok
        if tok.kind == "NAME" and tok.text == "a" and not self.ntriples:
            self._advance()
            return vocab.TYPE
        if tok.kind in ("IRIREF", "PNAME"):
            return self._iri()
        raise self._error(f"expected a predicate, found {tok.text or 'end of input'!r}")

    def _object_list(self, subject: Term, predicate: IRI):
        while True:
            obj = self._object()
            self.graph.add(Triple(subject, predicate, obj))
            if self.tok.kind == "PUNCT" and self.tok.text == ",":
                self._advance()
                continue
            return

    def _object(self) -> Term:
        tok = self.tok
        if tok.kind in ("IRIREF", "PNAME"):
            return self._iri()
        if tok.kind == "BNODE":
            self._advance()
            return self._bnode(tok.text[2:])
        if tok.kind == "PUNCT" and tok.text == "[" and not self.ntriples:
            return self._blank_property_list()
        if tok.kind == "PUNCT" and tok.text == "(":
            raise self._error("collections are not supported")
        return self._literal()

    def _blank_property_list(self) -> BNode:
        self._expect("[")
        node = self._bnode()
        if self.tok.kind == "PUNCT" and self.tok.text == "]":
            self._advance()
            return node
        self._predicate_object_list(node)
        self._expect("]")
        return node

    def _literal(self) -> Literal:
        tok = self._advance()
        try:
            if tok.kind in ("STRING", "LSTRING"):
                q = 3 if tok.kind == "LSTRING" else 1
                if self.ntriples and (q == 3 or tok.text[0] == "'"):
                    raise self._error("N-Triples literals must use double quotes", tok)
                lexical = _unescape(tok.text[q:-q], tok)
                if self.tok.kind == "LANGTAG":
                    lang = self._advance().text[1:]
                    return Literal(lexical, language=lang)
                if self.tok.kind == "DTYPE":
                    self._advance()
                    return Literal(lexical, datatype=self._iri().value)
                return Literal(lexical)
            if self.ntriples:
                raise self._error(f"expected an object term, found {tok.text or 'end of input'!r}", tok)
            if tok.kind == "INTEGER":
                return Literal(tok.text, datatype=vocab.XSD + "integer")
            if tok.kind == "DECIMAL":
                return Literal(tok.text, datatype=vocab.XSD + "decimal")
            if tok.kind == "DOUBLE":
                return Literal(tok.text, datatype=vocab.XSD + "double")
            if tok.kind == "NAME" and tok.text in ("true", "false"):
                return Literal(tok.text, datatype=vocab.XSD + "boolean")
        except TermError as exc:
            raise self._error(str(exc), tok) from None
        raise self._error(f"expected an object term, found {tok.text or 'end of input'!r}", tok)


def parse(text: str, format: str = "turtle") -> Graph:
    """Parse Turtle or N-Triples text into a :class:`Graph`."""
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {', '.join(FORMATS)}")
    if format == "ntriples":
        return _parse_ntriples(text)
    return _TurtleParser(text).parse()


def _parse_ntriples(text: str) -> Graph:
    graph = Graph()
    for lineno, line in enumerate(text.split("\n"), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parser = _TurtleParser(line, ntriples=True)
        for tok in parser.tokens:
            tok.line = lineno
        subject = parser._subject()
        predicate = parser._verb()
        obj = parser._object()
        parser._expect(".")
        if parser.tok.kind != "EOF":
            raise parser._error("trailing content after triple")
        try:
            graph.add(Triple(subject, predicate, obj))
        except TermError as exc:
            raise ParseError(str(exc), lineno, 1) from None
    return graph


_SAFE_LOCAL = re.compile(r"[A-Za-z0-9_](?:[A-Za-z0-9_\-.]*[A-Za-z0-9_\-])?")


def _compact(iri: IRI, prefixes: dict[str, str]) -> str:
    best = None
    for prefix, ns in prefixes.items():
        if iri.value.startswith(ns) and (best is None or len(ns) > len(best[1])):
            local = iri.value[len(ns):]
            if _SAFE_LOCAL.fullmatch(local):
                best = (prefix, ns)
    if best is None:
        return iri.n3()
    return f"{best[0]}:{iri.value[len(best[1]):]}"


def _turtle_term(term: Term, prefixes: dict[str, str]) -> str:
    if isinstance(term, IRI):
        return _compact(term, prefixes)
    if isinstance(term, Literal) and term.datatype:
        dt = _compact(IRI(term.datatype), prefixes)
        return '"' + Literal(term.lexical).n3()[1:-1] + '"^^' + dt
    return term.n3()


def serialize(graph: Graph, format: str = "turtle") -> str:
    """Render ``graph`` deterministically, sorted by subject, predicate, object."""
    if format not in FORMATS:
        raise ValueError(f"unknown format {format!r}; expected one of {', '.join(FORMATS)}")
    triples = graph.triples()
    if format == "ntriples":
        return "".join(t.n3() + "\n" for t in triples)

    prefixes = dict(vocab.PREFIXES)
    for prefix, ns in sorted(graph.prefixes.items()):
        prefixes.setdefault(prefix, ns)
    lines = [f"@prefix {p}: <{ns}> ." for p, ns in prefixes.items()]
    blocks = []
    current = None
    for t in triples:
        if current is None or current[0] != t.subject:
            current = (t.subject, [])
            blocks.append(current)
        current[1].append(t)
    for subject, ts in blocks:
        parts = []
        pred = None
        for t in ts:
            if t.predicate != pred:
                pred = t.predicate
                verb = "a" if pred == vocab.TYPE else _turtle_term(pred, prefixes)
                parts.append([verb, []])
            parts[-1][1].append(_turtle_term(t.object, prefixes))
        body = " ;\n    ".join(f"{verb} {', '.join(objs)}" for verb, objs in parts)
        lines.append("")
        lines.append(f"{_turtle_term(subject, prefixes)} {body} .")
    return "\n".join(lines) + "\n"


def load(path, format: Optional[str] = None) -> Graph:
    """Read a graph from ``path``; the format follows the extension if omitted."""
    path = Path(path)
    if format is None:
        format = "ntriples" if path.suffix == ".nt" else "turtle"
    return parse(path.read_text(encoding="utf-8"), format)


def dump(graph: Graph, path, format: Optional[str] = None) -> None:
    path = Path(path)
    if format is None:
        format = "ntriples" if path.suffix == ".nt" else "turtle"
    path.write_text(serialize(graph, format), encoding="utf-8")
