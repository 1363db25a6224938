"""Boxology pattern notation: parsing and canonical rendering.

Grammar (whitespace is insignificant)::

    pattern := "[" flow "]"
    flow    := stage ("->" stage)*
    stage   := "sym" | "data" | "ML" | "KR" | "{" flow ("/" flow)+ "}"

A group ``{a / b}`` holds parallel branches whose final outputs jointly feed
the stage after the group.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

__all__ = [
    "Artifact",
    "Processor",
    "Group",
    "Flow",
    "PatternAst",
    "NotationError",
    "parse_pattern",
    "render_notation",
    "ARTIFACT_KINDS",
    "PROCESSOR_KINDS",
]

ARTIFACT_KINDS = ("sym", "data")
PROCESSOR_KINDS = ("ML", "KR")


class NotationError(ValueError):
    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


@dataclass(frozen=True)
class Artifact:
    kind: str

    def __post_init__(self):
        if self.kind not in ARTIFACT_KINDS:
            raise ValueError(f"artifact kind must be one of {ARTIFACT_KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class Processor:
    kind: str

    def __post_init__(self):
        if self.kind not in PROCESSOR_KINDS:
            raise ValueError(f"processor kind must be one of {PROCESSOR_KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class Group:
    branches: tuple["Flow", ...]

    def __post_init__(self):
        if len(self.branches) < 2:
            raise ValueError("a group needs at least two branches")


@dataclass(frozen=True)
class Flow:
    stages: tuple["Stage", ...]

    def __post_init__(self):
        if not self.stages:
            raise ValueError("a flow needs at least one stage")


Stage = Union[Artifact, Processor, Group]


@dataclass(frozen=True)
class PatternAst:
    root: Flow


_KEYWORDS = {"sym": Artifact("sym"), "data": Artifact("data"), "ML": Processor("ML"), "KR": Processor("KR")}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> PatternAst:
        if self._peek() != "[":
            raise NotationError("expected '['", self.pos)
        self.pos += 1
        flow = self._flow(closer="]")
        if self._peek() != "]":
            if self._peek() == "":
                raise NotationError("unbalanced bracket: missing ']'", self.pos)
            raise NotationError(f"unexpected {self._peek()!r}", self.pos)
        self.pos += 1
        if self._peek() != "":
            raise NotationError("trailing input after ']'", self.pos)
        return PatternAst(flow)

    def _flow(self, closer: str) -> Flow:
        stages = [self._stage(closer)]
        while self.text.startswith("->", self._skip_pos()):
            self.pos += 2
            stages.append(self._stage(closer))
        return Flow(tuple(stages))

    def _skip_pos(self) -> int:
        self._skip()
        return self.pos

    def _stage(self, closer: str) -> Stage:
        ch = self._peek()
        start = self.pos
        if ch == "{":
            self.pos += 1
            branches = [self._flow(closer="}")]
            while self._peek() == "/":
                self.pos += 1
                branches.append(self._flow(closer="}"))
            nxt = self._peek()
            if nxt != "}":
                if nxt in ("]", ""):
                    raise NotationError("unbalanced brace: missing '}'", self.pos)
                raise NotationError(f"unexpected {nxt!r} in group", self.pos)
            if len(branches) < 2:
                raise NotationError("a group needs at least two branches", start)
            self.pos += 1
            return Group(tuple(branches))
        if ch in ("/", "}", "]", "") or self.text.startswith("->", self.pos):
            if ch == "" and closer:
                raise NotationError(f"unbalanced {'brace' if closer == '}' else 'bracket'}: missing {closer!r}", self.pos)
            raise NotationError("empty branch or stage", self.pos)
        end = self.pos
        while end < len(self.text) and (self.text[end].isalnum() or self.text[end] == "_"):
            end += 1
        word = self.text[self.pos:end]
        if word not in _KEYWORDS:
            shown = word or self.text[self.pos]
            raise NotationError(f"unknown token {shown!r}", self.pos)
        self.pos = end
        return _KEYWORDS[word]


def parse_pattern(notation: str) -> PatternAst:
    """Parse a boxology notation string such as ``"[sym -> ML -> sym]"``."""
    if not isinstance(notation, str):
        raise TypeError("notation must be a string")
    return _Parser(notation).parse()


def _render_flow(flow: Flow) -> str:
    return " -> ".join(_render_stage(s) for s in flow.stages)


def _render_stage(stage: Stage) -> str:
    if isinstance(stage, Group):
        return "{" + " / ".join(_render_flow(b) for b in stage.branches) + "}"
    return stage.kind


def render_notation(ast: PatternAst) -> str:
    """Canonical text form of ``ast``; inverse of :func:`parse_pattern`."""
    return "[" + _render_flow(ast.root) + "]"
