"""Word splitting and greedy longest-match phrase lookup."""

from __future__ import annotations

import re
from typing import Generic, Hashable, Iterable, NamedTuple, TypeVar

V = TypeVar("V")

_WORD = re.compile(r"[^\s,;:!?()\[\]{}\"]+")
_STRIP = ".'"


def split_words(text: str) -> list[str]:
    """Case-folded words; surrounding periods and apostrophes are dropped."""
    out = []
    for raw in _WORD.findall(text):
        w = raw.strip(_STRIP)
        if w:
            out.append(w.casefold())
    return out


def phrase_key(name: str) -> tuple[str, ...]:
    return tuple(split_words(name))


class Span(NamedTuple):
    start: int
    stop: int
    words: tuple[str, ...]
    key: tuple[str, ...] | None  # None for an unmatched single word


class PhraseIndex(Generic[V]):
    """Maps multi-word phrases to values for longest-match scanning."""

    def __init__(self):
        self._table: dict[tuple[str, ...], list[V]] = {}
        self._longest = 0

    def add(self, phrase: str | tuple[str, ...], value: V) -> None:
        key = phrase_key(phrase) if isinstance(phrase, str) else tuple(phrase)
        if not key:
            return
        self._table.setdefault(key, []).append(value)
        self._longest = max(self._longest, len(key))

    def add_all(self, items: Iterable[tuple[str, V]]) -> None:
        for phrase, value in items:
            self.add(phrase, value)

    def get(self, key: tuple[str, ...]) -> list[V]:
        return list(self._table.get(key, ()))

    def __contains__(self, key: Hashable) -> bool:
        return key in self._table

    def scan(self, words: list[str]) -> list[Span]:
        """Left-to-right greedy scan preferring the longest matching phrase."""
        spans = []
        i = 0
        while i < len(words):
            for n in range(min(self._longest, len(words) - i), 0, -1):
                key = tuple(words[i : i + n])
                if key in self._table:
                    spans.append(Span(i, i + n, key, key))
                    i += n
                    break
            else:
                spans.append(Span(i, i + 1, (words[i],), None))
                i += 1
        return spans
