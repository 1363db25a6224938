"""Query AST and parser for the supported SPARQL subset.

Accepted: PREFIX/BASE, SELECT with variables or ``*``, WHERE groups of
triple patterns (``a``, ``;`` and ``,`` lists, sequence paths ``p1/p2``),
nested groups, UNION, and sub-SELECTs with GROUP BY and
``group_concat(?v; separator="s")``. Everything else is rejected with
:class:`UnsupportedFeature`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .. import vocab
from ..terms import IRI, Literal, Term, TermError

__all__ = [
    "Var",
    "TriplePattern",
    "GroupPattern",
    "UnionPattern",
    "SubSelect",
    "Aggregate",
    "Query",
    "QuerySyntaxError",
    "UnsupportedFeature",
    "parse_query",
]


class QuerySyntaxError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class UnsupportedFeature(QuerySyntaxError):
    def __init__(self, feature: str, line: int = 0, column: int = 0):
        self.feature = feature
        super().__init__(f"unsupported feature: {feature}", line, column)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return "?" + self.name


Node = Union[Var, Term]


@dataclass(frozen=True)
class TriplePattern:
    subject: Node
    path: tuple[IRI, ...]  # sequence path; length 1 for a plain predicate
    object: Node

    def variables(self) -> set[str]:
        return {t.name for t in (self.subject, self.object) if isinstance(t, Var)}


@dataclass
class GroupPattern:
    elements: list = field(default_factory=list)

    def variables(self) -> set[str]:
        out: set[str] = set()
        for e in self.elements:
            out |= e.variables()
        return out


@dataclass
class UnionPattern:
    branches: list[GroupPattern]

    def variables(self) -> set[str]:
        out: set[str] = set()
        for b in self.branches:
            out |= b.variables()
        return out


@dataclass(frozen=True)
class Aggregate:
    function: str  # only "group_concat"
    var: Var
    separator: str
    alias: Var


@dataclass
class Query:
    projection: list  # Var | Aggregate; empty with select_all
    where: GroupPattern
    group_by: list[Var] = field(default_factory=list)
    select_all: bool = False
    prefixes: dict[str, str] = field(default_factory=dict)

    def output_names(self) -> list[str]:
        if self.select_all:
            return sorted(self.where.variables())
        return [p.alias.name if isinstance(p, Aggregate) else p.name for p in self.projection]

    @property
    def subselects(self) -> list["SubSelect"]:
        found = []

        def walk(group):
            for e in group.elements:
                if isinstance(e, SubSelect):
                    found.append(e)
                    walk(e.query.where)
                elif isinstance(e, UnionPattern):
                    for b in e.branches:
                        walk(b)
                elif isinstance(e, GroupPattern):
                    walk(e)

        walk(self.where)
        return found

    @property
    def unions(self) -> list[UnionPattern]:
        found = []

        def walk(group):
            for e in group.elements:
                if isinstance(e, UnionPattern):
                    found.append(e)
                    for b in e.branches:
                        walk(b)
                elif isinstance(e, SubSelect):
                    walk(e.query.where)
                elif isinstance(e, GroupPattern):
                    walk(e)

        walk(self.where)
        return found


@dataclass
class SubSelect:
    query: Query

    def variables(self) -> set[str]:
        return set(self.query.output_names())


# -- lexer --------------------------------------------------------------------

UNSUPPORTED_KEYWORDS = {
    "FILTER", "OPTIONAL", "ORDER", "LIMIT", "OFFSET", "DISTINCT", "REDUCED", "MINUS", "BIND",
    "VALUES", "SERVICE", "GRAPH", "CONSTRUCT", "ASK", "DESCRIBE", "HAVING", "EXISTS", "NOT",
    "COUNT", "SUM", "MIN", "MAX", "AVG", "SAMPLE", "INSERT", "DELETE", "FROM", "NAMED", "LOAD",
    "CLEAR", "DROP", "CREATE", "WITH", "USING",
}

_LOCAL = r"(?:[\w:%]|\\[_~.\-!$&'()*+,;=/?#@%])(?:(?:[\w\-.:%]|\\[_~.\-!$&'()*+,;=/?#@%])*(?:[\w\-:%]|\\[_~.\-!$&'()*+,;=/?#@%]))?"
_TOKEN_SPEC = [
    ("WS", r"[ \t\r\n]+"),
    ("LCOMMENT", r"#[^\n]*"),
    ("BCOMMENT", r"/\*.*?\*/"),
    ("IRIREF", r"<[^<>\"{}|^`\\\x00-\x20]*>"),
    ("STRING", r'"(?:[^"\\\n\r]|\\.)*"' + r"|'(?:[^'\\\n\r]|\\.)*'"),
    ("VAR", r"[?$][A-Za-z_][A-Za-z0-9_]*"),
    ("LANGTAG", r"@[A-Za-z]+(?:-[A-Za-z0-9]+)*"),
    ("DTYPE", r"\^\^"),
    ("PNAME", rf"(?:[A-Za-z](?:[\w\-.]*[\w\-])?)?:(?:{_LOCAL})?"),
    ("NUMBER", r"[+-]?(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?"),
    ("NAME", r"[A-Za-z_][A-Za-z0-9_]*"),
    ("PUNCT", r"[{}().;,/=*|^+?!\[\]<>]"),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKEN_SPEC), re.S)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Tok]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QuerySyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind, value = m.lastgroup, m.group()
        if kind not in ("WS", "LCOMMENT", "BCOMMENT"):
            tokens.append(_Tok(kind, value, line, pos - line_start + 1))
        if "\n" in value:
            line += value.count("\n")
            line_start = pos + value.rindex("\n") + 1
        pos = m.end()
    tokens.append(_Tok("EOF", "", line, pos - line_start + 1))
    return tokens


_STRING_ESCAPES = {"t": "\t", "n": "\n", "r": "\r", "b": "\b", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _unquote(text: str) -> str:
    return re.sub(r"\\(.)", lambda m: _STRING_ESCAPES.get(m.group(1), m.group(1)), text[1:-1])


# -- parser -------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.prefixes: dict[str, str] = {**vocab.PREFIXES, **vocab.IMPLICIT_PREFIXES}
        self.base: Optional[str] = None

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def _next(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def _err(self, msg: str, tok: Optional[_Tok] = None) -> QuerySyntaxError:
        tok = tok or self.tok
        return QuerySyntaxError(msg, tok.line, tok.column)

    def _is_kw(self, word: str, tok: Optional[_Tok] = None) -> bool:
        tok = tok or self.tok
        return tok.kind == "NAME" and tok.text.upper() == word

    def _check_unsupported(self):
        tok = self.tok
        if tok.kind == "NAME" and tok.text.upper() in UNSUPPORTED_KEYWORDS:
            raise UnsupportedFeature(tok.text.upper(), tok.line, tok.column)

    def _punct(self, ch: str) -> bool:
        return self.tok.kind == "PUNCT" and self.tok.text == ch

    def _expect_punct(self, ch: str) -> _Tok:
        if not self._punct(ch):
            self._check_unsupported()
            raise self._err(f"expected {ch!r}, found {self.tok.text or 'end of input'!r}")
        return self._next()

    def _expect_kw(self, word: str) -> _Tok:
        if not self._is_kw(word):
            self._check_unsupported()
            raise self._err(f"expected {word}, found {self.tok.text or 'end of input'!r}")
        return self._next()

    def parse(self) -> Query:
        while self._is_kw("PREFIX") or self._is_kw("BASE"):
            kw = self._next().text.upper()
            if kw == "PREFIX":
                name = self._next()
                if name.kind != "PNAME" or not name.text.endswith(":") or name.text.count(":") != 1:
                    raise self._err("expected a prefix name", name)
                iri = self._next()
                if iri.kind != "IRIREF":
                    raise self._err("expected an IRI", iri)
                self.prefixes[name.text[:-1]] = iri.text[1:-1]
            else:
                iri = self._next()
                if iri.kind != "IRIREF":
                    raise self._err("expected an IRI", iri)
                self.base = iri.text[1:-1]
        self._check_unsupported()
        query = self._select(top_level=True)
        if self.tok.kind != "EOF":
            self._check_unsupported()
            raise self._err(f"unexpected {self.tok.text!r} after query")
        query.prefixes = dict(self.prefixes)
        return query

    def _select(self, top_level: bool) -> Query:
        start = self.tok
        self._expect_kw("SELECT")
        self._check_unsupported()
        projection: list = []
        select_all = False
        if self._punct("*"):
            self._next()
            select_all = True
        else:
            while True:
                if self.tok.kind == "VAR":
                    projection.append(Var(self._next().text[1:]))
                elif self._punct("("):
                    projection.append(self._aggregate())
                else:
                    break
            if not projection:
                self._check_unsupported()
                raise self._err("SELECT needs at least one variable")
        if self._is_kw("WHERE"):
            self._next()
        where = self._group()
        group_by = []
        if self._is_kw("GROUP"):
            self._next()
            self._expect_kw("BY")
            while self.tok.kind == "VAR":
                group_by.append(Var(self._next().text[1:]))
            if not group_by:
                raise self._err("GROUP BY needs at least one variable")
        self._check_unsupported()
        query = Query(projection, where, group_by, select_all)
        self._check_projection(query, top_level, start)
        return query

    def _check_projection(self, q: Query, top_level: bool, start):
        # Semantic errors are reported at the SELECT keyword of the offending query.
        def err(msg):
            return QuerySyntaxError(msg, start.line, start.column)

        in_where = q.where.variables()
        has_agg = any(isinstance(p, Aggregate) for p in q.projection)
        if has_agg and top_level:
            raise UnsupportedFeature("aggregate outside a grouped sub-select")
        if has_agg and not q.group_by:
            raise err("group_concat requires GROUP BY")
        if q.select_all and q.group_by:
            raise err("SELECT * cannot be combined with GROUP BY")
        names = []
        for p in q.projection:
            if isinstance(p, Aggregate):
                if p.var.name not in in_where:
                    raise err(f"aggregated variable ?{p.var.name} does not occur in WHERE")
                names.append(p.alias.name)
            else:
                if p.name not in in_where:
                    raise err(f"projected variable ?{p.name} does not occur in WHERE")
                if q.group_by and p not in q.group_by:
                    raise err(f"?{p.name} must appear in GROUP BY")
                names.append(p.name)
        for g in q.group_by:
            if g.name not in in_where:
                raise err(f"GROUP BY variable ?{g.name} does not occur in WHERE")
        if len(set(names)) != len(names):
            raise err("duplicate projected variable")

    def _aggregate(self) -> Aggregate:
        self._expect_punct("(")
        fn = self.tok
        if fn.kind != "NAME" or fn.text.upper() != "GROUP_CONCAT":
            if fn.kind == "NAME" and fn.text.upper() in UNSUPPORTED_KEYWORDS:
                raise UnsupportedFeature(fn.text.upper(), fn.line, fn.column)
            raise UnsupportedFeature(f"expression {fn.text!r} in SELECT", fn.line, fn.column)
        self._next()
        self._expect_punct("(")
        if self._is_kw("DISTINCT"):
            raise UnsupportedFeature("DISTINCT", self.tok.line, self.tok.column)
        if self.tok.kind != "VAR":
            raise self._err("group_concat takes a single variable")
        var = Var(self._next().text[1:])
        separator = " "
        if self._punct(";"):
            self._next()
            self._expect_kw("SEPARATOR")
            self._expect_punct("=")
            s = self._next()
            if s.kind != "STRING":
                raise self._err("separator must be a string", s)
            separator = _unquote(s.text)
        self._expect_punct(")")
        self._expect_kw("AS")
        if self.tok.kind != "VAR":
            raise self._err("expected a variable after AS")
        alias = Var(self._next().text[1:])
        self._expect_punct(")")
        return Aggregate("group_concat", var, separator, alias)

    def _group(self) -> GroupPattern:
        self._expect_punct("{")
        if self._is_kw("SELECT"):
            sub = self._select(top_level=False)
            self._expect_punct("}")
            return GroupPattern([SubSelect(sub)])
        group = GroupPattern()
        while not self._punct("}"):
            self._check_unsupported()
            if self.tok.kind == "EOF":
                raise self._err("unbalanced '{': missing '}'")
            if self._punct("{"):
                first = self._group()
                branches = [first]
                while self._is_kw("UNION"):
                    self._next()
                    branches.append(self._group())
                if len(branches) > 1:
                    group.elements.append(UnionPattern(branches))
                elif len(first.elements) == 1 and isinstance(first.elements[0], SubSelect):
                    group.elements.append(first.elements[0])
                else:
                    group.elements.append(first)
                if self._punct("."):
                    self._next()
                continue
            self._triples(group)
            if self._punct("."):
                self._next()
            elif not self._punct("}"):
                self._check_unsupported()
                raise self._err(f"expected '.' or '}}', found {self.tok.text or 'end of input'!r}")
        self._next()
        return group

    def _triples(self, group: GroupPattern):
        subject = self._node(position="subject")
        while True:
            path = self._path()
            while True:
                obj = self._node(position="object")
                group.elements.append(TriplePattern(subject, path, obj))
                if self._punct(","):
                    self._next()
                    continue
                break
            if self._punct(";"):
                while self._punct(";"):
                    self._next()
                if self._punct(".") or self._punct("}"):
                    return
                continue
            return

    def _path(self) -> tuple[IRI, ...]:
        steps = [self._verb()]
        while self._punct("/"):
            self._next()
            steps.append(self._verb())
        if self.tok.kind == "PUNCT" and self.tok.text in "|^*+?!":
            raise UnsupportedFeature(f"property path operator {self.tok.text!r}", self.tok.line, self.tok.column)
        return tuple(steps)

    def _verb(self) -> IRI:
        tok = self.tok
        if tok.kind == "NAME" and tok.text == "a":
            self._next()
            return vocab.TYPE
        if tok.kind == "VAR":
            raise UnsupportedFeature("variable in predicate position", tok.line, tok.column)
        if tok.kind == "PUNCT" and tok.text in "^!(":
            raise UnsupportedFeature(f"property path operator {tok.text!r}", tok.line, tok.column)
        if tok.kind in ("IRIREF", "PNAME"):
            return self._iri()
        self._check_unsupported()
        raise self._err(f"expected a predicate, found {tok.text or 'end of input'!r}")

    def _iri(self) -> IRI:
        tok = self._next()
        try:
            if tok.kind == "IRIREF":
                value = tok.text[1:-1]
                if self.base and not re.match(r"[A-Za-z][A-Za-z0-9+.\-]*:", value):
                    value = self.base + value
                return IRI(value)
            prefix, local = tok.text.split(":", 1)
            if prefix not in self.prefixes:
                raise QuerySyntaxError(f"unknown prefix {prefix!r}", tok.line, tok.column)
            return IRI(self.prefixes[prefix] + re.sub(r"\\(.)", r"\1", local))
        except TermError as exc:
            raise self._err(str(exc), tok) from None

    def _node(self, position: str) -> Node:
        tok = self.tok
        if tok.kind == "VAR":
            self._next()
            return Var(tok.text[1:])
        if tok.kind in ("IRIREF", "PNAME"):
            return self._iri()
        if tok.kind == "PUNCT" and tok.text in "[(":
            raise UnsupportedFeature("blank node or collection syntax", tok.line, tok.column)
        if position == "subject":
            self._check_unsupported()
            if tok.kind in ("STRING", "NUMBER"):
                raise self._err("a literal cannot be a subject")
            raise self._err(f"expected a subject, found {tok.text or 'end of input'!r}")
        if tok.kind == "STRING":
            self._next()
            lexical = _unquote(tok.text)
            if self.tok.kind == "LANGTAG":
                return Literal(lexical, language=self._next().text[1:])
            if self.tok.kind == "DTYPE":
                self._next()
                return Literal(lexical, datatype=self._iri().value)
            return Literal(lexical)
        if tok.kind == "NUMBER":
            self._next()
            if re.fullmatch(r"[+-]?\d+", tok.text):
                return Literal(tok.text, datatype=vocab.XSD + "integer")
            if "e" in tok.text.lower():
                return Literal(tok.text, datatype=vocab.XSD + "double")
            return Literal(tok.text, datatype=vocab.XSD + "decimal")
        if tok.kind == "NAME" and tok.text in ("true", "false"):
            self._next()
            return Literal(tok.text, datatype=vocab.XSD + "boolean")
        self._check_unsupported()
        raise self._err(f"expected an object, found {tok.text or 'end of input'!r}")


def parse_query(text: str) -> Query:
    """Parse query text into a :class:`Query`."""
    return _Parser(text).parse()
