"""Tab-separated text formats for knowledge graphs and update deltas.

Entities file, one per line::

    id<TAB>name<TAB>category[<TAB>key=value;key=value]

Triples file::

    head_id<TAB>relation<TAB>tail_id

Lines starting with ``#`` and blank lines are skipped on read. Writing emits
entities and triples in insertion order, so a comment-free file survives a
read/write cycle byte for byte.

A delta file starts with ``SEQ <n>`` and then holds tagged rows: ``E`` rows
use the entities layout, ``T`` rows add a triple and ``-T`` rows remove one.
"""

from __future__ import annotations

import os
from typing import Iterator

from .exceptions import GraphFormatError
from .kg import Entity, KnowledgeGraph, Triple

_FORBIDDEN = ("\t", "\n", "\r")


def _rows(text: str) -> Iterator[tuple[int, list[str]]]:
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        yield lineno, line.split("\t")


def _parse_attrs(field: str, lineno: int) -> dict[str, str]:
    attrs = {}
    if not field:
        return attrs
    for item in field.split(";"):
        key, sep, value = item.partition("=")
        if not sep or not key:
            raise GraphFormatError(f"bad attribute {item!r}", lineno)
        attrs[key] = value
    return attrs


def _entity_from_fields(fields: list[str], lineno: int) -> Entity:
    if len(fields) not in (3, 4):
        raise GraphFormatError(f"expected 3 or 4 columns, got {len(fields)}", lineno)
    attrs = _parse_attrs(fields[3], lineno) if len(fields) == 4 else {}
    try:
        return Entity(fields[0], fields[1], fields[2], attrs)
    except ValueError as exc:
        raise GraphFormatError(str(exc), lineno) from None


def _triple_from_fields(fields: list[str], lineno: int) -> Triple:
    if len(fields) != 3:
        raise GraphFormatError(f"expected 3 columns, got {len(fields)}", lineno)
    try:
        return Triple(*fields)
    except ValueError as exc:
        raise GraphFormatError(str(exc), lineno) from None


def parse_entities(text: str) -> list[Entity]:
    return [_entity_from_fields(fields, n) for n, fields in _rows(text)]


def parse_triples(text: str) -> list[Triple]:
    return [_triple_from_fields(fields, n) for n, fields in _rows(text)]


def _check_field(value: str, what: str) -> str:
    if any(c in value for c in _FORBIDDEN):
        raise GraphFormatError(f"{what} {value!r} contains a tab or newline")
    return value


def format_entity(e: Entity) -> str:
    cols = [_check_field(e.id, "id"), _check_field(e.name, "name"), _check_field(e.category, "category")]
    if e.attrs:
        parts = []
        for k, v in e.attrs.items():
            if not k or any(c in k for c in "=;") or ";" in v:
                raise GraphFormatError(f"attribute {k!r}={v!r} cannot be serialized")
            parts.append(f"{_check_field(k, 'attr key')}={_check_field(v, 'attr value')}")
        cols.append(";".join(parts))
    return "\t".join(cols)


def format_triple(t: Triple) -> str:
    return "\t".join(_check_field(x, "triple field") for x in (t.head, t.relation, t.tail))


def format_entities(g: KnowledgeGraph) -> str:
    return "".join(format_entity(e) + "\n" for e in g.entities)


def format_triples(g: KnowledgeGraph) -> str:
    return "".join(format_triple(t) + "\n" for t in g.triples)


def graph_from_text(entities_text: str, triples_text: str, kind: str = "global") -> KnowledgeGraph:
    g = KnowledgeGraph(kind)
    for e in parse_entities(entities_text):
        g.add_entity(e)
    for t in parse_triples(triples_text):
        g.add_triple(t)
    return g


def read_graph(entities_path, triples_path, kind: str = "global") -> KnowledgeGraph:
    with open(entities_path, encoding="utf-8") as fh:
        ents = fh.read()
    with open(triples_path, encoding="utf-8") as fh:
        trips = fh.read()
    return graph_from_text(ents, trips, kind)


def write_graph(g: KnowledgeGraph, entities_path, triples_path) -> None:
    for path, text in ((entities_path, format_entities(g)), (triples_path, format_triples(g))):
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# -- update deltas -------------------------------------------------------


def parse_delta(text: str):
    from .knowledge import UpdateDelta

    rows = list(_rows(text))
    if not rows or len(rows[0][1]) != 1 or not rows[0][1][0].startswith("SEQ "):
        raise GraphFormatError("delta must start with a 'SEQ <n>' header", rows[0][0] if rows else 1)
    lineno, (header,) = rows[0]
    try:
        seq = int(header[4:].strip())
    except ValueError:
        raise GraphFormatError(f"bad sequence number in {header!r}", lineno) from None
    added_e, added_t, removed = [], [], []
    for lineno, fields in rows[1:]:
        tag, rest = fields[0], fields[1:]
        if tag == "E":
            added_e.append(_entity_from_fields(rest, lineno))
        elif tag == "T":
            added_t.append(_triple_from_fields(rest, lineno))
        elif tag == "-T":
            removed.append(_triple_from_fields(rest, lineno))
        else:
            raise GraphFormatError(f"unknown row tag {tag!r}", lineno)
    return UpdateDelta(seq, tuple(added_e), tuple(added_t), tuple(removed))


def format_delta(delta) -> str:
    lines = [f"SEQ {delta.sequence}"]
    lines += ["E\t" + format_entity(e) for e in delta.added_entities]
    lines += ["T\t" + format_triple(t) for t in delta.added_triples]
    lines += ["-T\t" + format_triple(t) for t in delta.removed_triples]
    return "".join(line + "\n" for line in lines)


def read_delta(path):
    with open(path, encoding="utf-8") as fh:
        return parse_delta(fh.read())
