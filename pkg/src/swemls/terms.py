"""RDF terms and triples."""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

__all__ = ["IRI", "Literal", "BNode", "Term", "Triple", "TermError", "sort_key"]

_WS = re.compile(r"\s")


class TermError(ValueError):
    """Raised for malformed terms or triples."""


@dataclass(frozen=True, order=True)
class IRI:
    value: str

    def __post_init__(self):
        if not self.value or _WS.search(self.value):
            raise TermError(f"invalid IRI {self.value!r}")

    def n3(self) -> str:
        return f"<{_escape_iri(self.value)}>"

    def __str__(self):
        return self.value


@dataclass(frozen=True, order=False)
class Literal:
    lexical: str
    datatype: Optional[str] = None
    language: Optional[str] = None

    def __post_init__(self):
        if isinstance(self.datatype, IRI):
            object.__setattr__(self, "datatype", self.datatype.value)
        if self.datatype is not None and self.language is not None:
            raise TermError("a literal cannot carry both a datatype and a language tag")
        if self.language is not None and not re.fullmatch(r"[A-Za-z]+(-[A-Za-z0-9]+)*", self.language):
            raise TermError(f"invalid language tag {self.language!r}")

    def n3(self) -> str:
        text = '"' + escape_string(self.lexical) + '"'
        if self.language:
            return f"{text}@{self.language}"
        if self.datatype:
            return f"{text}^^<{_escape_iri(self.datatype)}>"
        return text

    def __str__(self):
        return self.lexical


@dataclass(frozen=True, order=False)
class BNode:
    label: str

    def __post_init__(self):
        if not re.fullmatch(r"[A-Za-z0-9_][A-Za-z0-9_\-.]*", self.label) or self.label.endswith("."):
            raise TermError(f"invalid blank node label {self.label!r}")

    def n3(self) -> str:
        return f"_:{self.label}"

    def __str__(self):
        return self.n3()


Term = Union[IRI, Literal, BNode]

_KIND_ORDER = {IRI: 0, BNode: 1, Literal: 2}


def sort_key(term: Term) -> tuple:
    """Total order over terms: IRIs, then blank nodes, then literals."""
    if isinstance(term, Literal):
        return (2, term.lexical, term.datatype or "", term.language or "")
    if isinstance(term, IRI):
        return (0, term.value, "", "")
    return (1, term.label, "", "")


@dataclass(frozen=True)
class Triple:
    subject: Term
    predicate: IRI
    object: Term

    def __post_init__(self):
        if isinstance(self.subject, Literal):
            raise TermError(f"literal {self.subject.n3()} cannot be a subject")
        if not isinstance(self.subject, (IRI, BNode)):
            raise TermError(f"subject must be an IRI or blank node, got {self.subject!r}")
        if not isinstance(self.predicate, IRI):
            raise TermError(f"predicate must be an IRI, got {self.predicate!r}")
        if not isinstance(self.object, (IRI, BNode, Literal)):
            raise TermError(f"object must be a term, got {self.object!r}")

    def key(self) -> tuple:
        return (sort_key(self.subject), sort_key(self.predicate), sort_key(self.object))

    def __iter__(self):
        return iter((self.subject, self.predicate, self.object))

    def n3(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."


_STRING_ESCAPES = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\r": "\\r", "\t": "\\t", "\b": "\\b", "\f": "\\f"}


# Characters str.splitlines() treats as line ends; escaped so N-Triples stays one triple per line.
_LINE_BREAKS = "\x1c\x1d\x1e\x85\u2028\u2029"


def escape_string(text: str) -> str:
    out = []
    for ch in text:
        if ch in _STRING_ESCAPES:
            out.append(_STRING_ESCAPES[ch])
        elif ord(ch) < 0x20 or ord(ch) == 0x7F or ch in _LINE_BREAKS:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)


def _escape_iri(value: str) -> str:
    out = []
    for ch in value:
        if ch in '<>"{}|^`\\' or ord(ch) <= 0x20:
            out.append(f"\\u{ord(ch):04X}")
        else:
            out.append(ch)
    return "".join(out)
