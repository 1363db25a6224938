"""Indexed in-memory triple store."""
from __future__ import annotations

from collections import defaultdict
from typing import Iterable, Iterator, Optional

from .terms import IRI, Term, Triple, TermError, sort_key
from . import vocab

__all__ = ["Graph"]


class Graph:
    """A set of triples indexed by subject, predicate and object.

    ``match`` answers any wildcard combination from the indexes and returns
    triples in lexicographic order, so every consumer sees a stable order.
    """

    def __init__(self, triples: Iterable[Triple] = (), prefixes: Optional[dict[str, str]] = None):
        self._triples: set[Triple] = set()
        self._spo: dict[Term, dict[IRI, set[Term]]] = defaultdict(lambda: defaultdict(set))
        self._pos: dict[IRI, dict[Term, set[Term]]] = defaultdict(lambda: defaultdict(set))
        self._osp: dict[Term, dict[Term, set[IRI]]] = defaultdict(lambda: defaultdict(set))
        self.prefixes: dict[str, str] = dict(vocab.PREFIXES if prefixes is None else prefixes)
        for t in triples:
            self.add(t)

    def add(self, triple: Triple) -> "Graph":
        if not isinstance(triple, Triple):
            raise TermError(f"expected a Triple, got {triple!r}")
        if triple in self._triples:
            return self
        s, p, o = triple
        self._triples.add(triple)
        self._spo[s][p].add(o)
        self._pos[p][o].add(s)
        self._osp[o][s].add(p)
        return self

    def add_all(self, triples: Iterable[Triple]) -> "Graph":
        for t in triples:
            self.add(t)
        return self

    def insert(self, s: Term, p: IRI, o: Term) -> "Graph":
        return self.add(Triple(s, p, o))

    def remove(self, triple: Triple) -> "Graph":
        if triple not in self._triples:
            return self
        s, p, o = triple
        self._triples.discard(triple)
        self._spo[s][p].discard(o)
        self._pos[p][o].discard(s)
        self._osp[o][s].discard(p)
        return self

    def _iter_match(self, s, p, o) -> Iterator[Triple]:
        if s is not None:
            preds = self._spo.get(s)
            if not preds:
                return
            if p is not None:
                objs = preds.get(p, ())
                if o is not None:
                    if o in objs:
                        yield Triple(s, p, o)
                    return
                for obj in objs:
                    yield Triple(s, p, obj)
                return
            if o is not None:
                for pred in self._osp.get(o, {}).get(s, ()):
                    yield Triple(s, pred, o)
                return
            for pred, objs in preds.items():
                for obj in objs:
                    yield Triple(s, pred, obj)
            return
        if p is not None:
            by_obj = self._pos.get(p)
            if not by_obj:
                return
            if o is not None:
                for subj in by_obj.get(o, ()):
                    yield Triple(subj, p, o)
                return
            for obj, subjs in by_obj.items():
                for subj in subjs:
                    yield Triple(subj, p, obj)
            return
        if o is not None:
            for subj, preds in self._osp.get(o, {}).items():
                for pred in preds:
                    yield Triple(subj, pred, o)
            return
        yield from self._triples

    def match(self, s: Optional[Term] = None, p: Optional[IRI] = None, o: Optional[Term] = None) -> list[Triple]:
        """Triples consistent with the bound positions; ``None`` is a wildcard."""
        return sorted(self._iter_match(s, p, o), key=Triple.key)

    def objects(self, s: Term, p: IRI) -> list[Term]:
        return [t.object for t in self.match(s, p, None)]

    def subjects(self, p: IRI, o: Term) -> list[Term]:
        return [t.subject for t in self.match(None, p, o)]

    def value(self, s: Term, p: IRI) -> Optional[Term]:
        objs = self.objects(s, p)
        return objs[0] if objs else None

    def count(self, s=None, p=None, o=None) -> int:
        return sum(1 for _ in self._iter_match(s, p, o))

    def subject_terms(self) -> list[Term]:
        return sorted((s for s, preds in self._spo.items() if any(preds.values())), key=sort_key)

    def triples(self) -> list[Triple]:
        return sorted(self._triples, key=Triple.key)

    def copy(self) -> "Graph":
        g = Graph(prefixes=self.prefixes)
        g.add_all(self._triples)
        return g

    def __or__(self, other: "Graph") -> "Graph":
        g = self.copy()
        g.add_all(other)
        return g

    def __sub__(self, other: "Graph") -> "Graph":
        return Graph((t for t in self._triples if t not in other), prefixes=self.prefixes)

    def __contains__(self, triple) -> bool:
        return triple in self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.triples())

    def __len__(self) -> int:
        return len(self._triples)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples == other._triples

    def __repr__(self):
        return f"<Graph with {len(self)} triples>"
