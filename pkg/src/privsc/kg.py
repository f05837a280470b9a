"""Directed labeled multigraph storage and the graph algorithms built on it.

Triples keep their direction, but walks, paths and subgraph extraction treat
every edge as undirected with unit weight. Ties are always broken by
ascending entity id (plain string order) so that every result is
reproducible.
"""

from __future__ import annotations

import random
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .exceptions import (
    DanglingEndpoint,
    DisconnectedTerminals,
    DuplicateId,
    DuplicateTriple,
    MissingTriple,
    UnknownEntity,
)

KINDS = ("global", "personal", "fused", "private")

DEFAULT_WALKS_PER_SEED = 16
DEFAULT_WALK_LENGTH = 4
DEFAULT_MIN_VISITS = 2

# (direction, relation, neighbor category)
ContextSignature = Counter


@dataclass(frozen=True)
class Entity:
    id: str
    name: str
    category: str = "other"
    attrs: Mapping[str, str] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "id", str(self.id))
        object.__setattr__(self, "attrs", dict(self.attrs))
        if not self.id:
            raise ValueError("entity id must be non-empty")
        if not self.name:
            raise ValueError(f"entity {self.id!r} has an empty name")
        if not self.category:
            raise ValueError(f"entity {self.id!r} has an empty category")


@dataclass(frozen=True, order=True)
class Triple:
    head: str
    relation: str
    tail: str

    def __post_init__(self):
        object.__setattr__(self, "head", str(self.head))
        object.__setattr__(self, "tail", str(self.tail))
        if not self.relation:
            raise ValueError("relation label must be non-empty")


class KnowledgeGraph:
    """Entities plus labeled triples with referential integrity.

    Mutation happens through :meth:`add_entity`, :meth:`add_triple` and
    :meth:`remove_triple`; everything else is read-only. Insertion order is
    remembered so exports reproduce the input layout.

    A ``private`` graph may be given a ``parent``; every entity added to it
    must then already exist in the parent.
    """

    def __init__(self, kind: str = "global", parent: KnowledgeGraph | None = None):
        if kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")
        self.kind = kind
        self.parent = parent
        self._entities: dict[str, Entity] = {}
        self._triples: dict[Triple, None] = {}
        self._adj: dict[str, set[str]] = {}
        self._incident: dict[str, list[Triple]] = {}
        self._by_name: dict[str, list[str]] = {}

    # -- construction --------------------------------------------------

    def add_entity(self, entity: Entity) -> KnowledgeGraph:
        if entity.id in self._entities:
            raise DuplicateId(entity.id)
        if self.kind == "private" and self.parent is not None and entity.id not in self.parent:
            raise UnknownEntity(f"{entity.id!r} is not in the parent graph")
        self._entities[entity.id] = entity
        self._adj[entity.id] = set()
        self._incident[entity.id] = []
        self._by_name.setdefault(entity.name, []).append(entity.id)
        return self

    def add_triple(self, triple: Triple | tuple[str, str, str]) -> KnowledgeGraph:
        if not isinstance(triple, Triple):
            triple = Triple(*triple)
        for end in (triple.head, triple.tail):
            if end not in self._entities:
                raise DanglingEndpoint(f"{end!r} in {triple}")
        if triple in self._triples:
            raise DuplicateTriple(str(triple))
        self._triples[triple] = None
        self._adj[triple.head].add(triple.tail)
        self._adj[triple.tail].add(triple.head)
        self._incident[triple.head].append(triple)
        if triple.tail != triple.head:
            self._incident[triple.tail].append(triple)
        return self

    def remove_triple(self, triple: Triple | tuple[str, str, str]) -> KnowledgeGraph:
        if not isinstance(triple, Triple):
            triple = Triple(*triple)
        if triple not in self._triples:
            raise MissingTriple(str(triple))
        del self._triples[triple]
        for end in {triple.head, triple.tail}:
            self._incident[end].remove(triple)
        # another triple may still join the same pair
        h, t = triple.head, triple.tail
        if not any({x.head, x.tail} == {h, t} for x in self._incident[h]):
            self._adj[h].discard(t)
            self._adj[t].discard(h)
        return self

    # -- queries -------------------------------------------------------

    def __contains__(self, entity_id) -> bool:
        return entity_id in self._entities

    def __repr__(self) -> str:
        return (
            f"KnowledgeGraph(kind={self.kind!r}, entities={self.num_entities}, "
            f"triples={self.num_triples})"
        )

    @property
    def num_entities(self) -> int:
        return len(self._entities)

    @property
    def num_triples(self) -> int:
        return len(self._triples)

    @property
    def entities(self) -> tuple[Entity, ...]:
        return tuple(self._entities.values())

    @property
    def entity_ids(self) -> tuple[str, ...]:
        return tuple(self._entities)

    @property
    def triples(self) -> tuple[Triple, ...]:
        return tuple(self._triples)

    def has_triple(self, triple) -> bool:
        if not isinstance(triple, Triple):
            triple = Triple(*triple)
        return triple in self._triples

    def entity(self, entity_id: str) -> Entity:
        try:
            return self._entities[entity_id]
        except KeyError:
            raise UnknownEntity(entity_id) from None

    def ids_named(self, name: str) -> list[str]:
        """Ids of entities whose name is exactly ``name``, ascending."""
        return sorted(self._by_name.get(name, ()))

    def names(self) -> set[str]:
        return {name for name, ids in self._by_name.items() if ids}

    def relations(self) -> list[str]:
        return sorted({t.relation for t in self._triples})

    def adjacent(self, entity_id: str) -> list[str]:
        """Undirected neighbors, ascending id."""
        self._require(entity_id)
        return sorted(self._adj[entity_id] - {entity_id})

    def incident(self, entity_id: str) -> list[Triple]:
        self._require(entity_id)
        return sorted(self._incident[entity_id])

    def _require(self, entity_id):
        if entity_id not in self._entities:
            raise UnknownEntity(entity_id)

    # -- derived graphs ------------------------------------------------

    def copy(self, kind: str | None = None, parent: KnowledgeGraph | None = None) -> KnowledgeGraph:
        out = KnowledgeGraph(kind or self.kind, parent if parent is not None else self.parent)
        for e in self._entities.values():
            out.add_entity(e)
        for t in self._triples:
            out.add_triple(t)
        return out

    def induced_subgraph(
        self, ids: Iterable[str], kind: str = "private", parent: KnowledgeGraph | None = None
    ) -> KnowledgeGraph:
        """Subgraph on ``ids`` with every triple whose endpoints both survive.

        Entity and triple order follow this graph's insertion order.
        """
        keep = set(ids)
        for i in keep:
            self._require(i)
        out = KnowledgeGraph(kind, parent)
        for eid, e in self._entities.items():
            if eid in keep:
                out.add_entity(e)
        for t in self._triples:
            if t.head in keep and t.tail in keep:
                out.add_triple(t)
        return out

    def check_integrity(self) -> None:
        for t in self._triples:
            if t.head not in self._entities or t.tail not in self._entities:
                raise DanglingEndpoint(str(t))
        if self.kind == "private" and self.parent is not None:
            extra = set(self._entities) - set(self.parent.entity_ids)
            if extra:
                raise UnknownEntity(f"not in parent graph: {sorted(extra)}")


# -- traversal ---------------------------------------------------------


def bfs_distances(g: KnowledgeGraph, source: str, max_depth: int | None = None) -> dict[str, int]:
    """Undirected hop distance from ``source`` to everything it reaches."""
    g._require(source)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        if max_depth is not None and dist[u] >= max_depth:
            continue
        for v in g.adjacent(u):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def neighbors(g: KnowledgeGraph, entity_id: str, hops: int = 1) -> set[str]:
    if hops < 1:
        raise ValueError("hops must be >= 1")
    return set(bfs_distances(g, entity_id, max_depth=hops)) - {entity_id}


def connected_components(g: KnowledgeGraph, ids: Iterable[str] | None = None) -> list[set[str]]:
    """Components of the undirected graph, restricted to those touching ``ids``."""
    seen: set[str] = set()
    comps = []
    for start in sorted(g.entity_ids if ids is None else ids):
        if start in seen:
            continue
        comp = set(bfs_distances(g, start))
        seen |= comp
        comps.append(comp)
    return comps


def _lex_min_path(g: KnowledgeGraph, a: str, b: str, dist_to_b: dict[str, int]) -> list[str]:
    # Greedy smallest-id step along the BFS layers of b gives the
    # lexicographically smallest of all minimum-hop paths.
    path = [a]
    cur = a
    while cur != b:
        want = dist_to_b[cur] - 1
        cur = min(v for v in g.adjacent(cur) if dist_to_b.get(v) == want)
        path.append(cur)
    return path


def shortest_path(g: KnowledgeGraph, a: str, b: str) -> list[str] | None:
    """Minimum-hop undirected path from ``a`` to ``b`` inclusive, or None."""
    g._require(a)
    dist_b = bfs_distances(g, b)
    if a not in dist_b:
        return None
    return _lex_min_path(g, a, b, dist_b)


def random_walk_collect(
    g: KnowledgeGraph,
    seeds: Iterable[str],
    walks_per_seed: int = DEFAULT_WALKS_PER_SEED,
    walk_length: int = DEFAULT_WALK_LENGTH,
    min_visits: int = DEFAULT_MIN_VISITS,
    rng_seed: int = 0,
) -> set[str]:
    """Entities visited at least ``min_visits`` times by uniform random walks.

    Each seed (in ascending order) launches ``walks_per_seed`` walks of up to
    ``walk_length`` steps; a walk stops early at an isolated node. Start
    positions are not counted as visits, but the seeds are always returned.
    """
    seeds = sorted(set(seeds))
    if not seeds:
        raise ValueError("at least one seed is required")
    if walks_per_seed < 1 or walk_length < 1:
        raise ValueError("walks_per_seed and walk_length must be >= 1")
    for s in seeds:
        g._require(s)
    rng = random.Random(rng_seed)
    visits: Counter = Counter()
    for seed in seeds:
        for _ in range(walks_per_seed):
            cur = seed
            for _ in range(walk_length):
                nbrs = g.adjacent(cur)
                if not nbrs:
                    break
                cur = nbrs[rng.randrange(len(nbrs))]
                visits[cur] += 1
    return set(seeds) | {e for e, n in visits.items() if n >= min_visits}


# -- Steiner subgraph --------------------------------------------------


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[max(ra, rb)] = min(ra, rb)
        return True


def _kruskal(nodes, weighted_edges):
    uf = _UnionFind(nodes)
    return [(u, v) for _, u, v in sorted(weighted_edges) if uf.union(u, v)]


def steiner_tree_nodes(g: KnowledgeGraph, terminals: Iterable[str]) -> tuple[set[str], list[tuple[str, str]]]:
    """Node set and tree edges of the metric-closure Steiner heuristic.

    1. complete graph over the terminals weighted by hop distance
    2. its minimum spanning tree
    3. each tree edge expanded into its shortest path in ``g``
    4. a spanning tree of the expanded subgraph
    5. non-terminal leaves pruned until none remain

    The tree has at most twice the edges of an optimal Steiner tree.
    """
    terms = sorted(set(terminals))
    if not terms:
        raise ValueError("at least one terminal is required")
    for t in terms:
        g._require(t)
    comps = connected_components(g, terms)
    if len(comps) > 1:
        raise DisconnectedTerminals([c & set(terms) for c in comps])
    if len(terms) == 1:
        return {terms[0]}, []

    dist = {t: bfs_distances(g, t) for t in terms}
    closure = [(dist[a][b], a, b) for i, a in enumerate(terms) for b in terms[i + 1 :]]
    expanded: set[tuple[str, str]] = set()
    for a, b in _kruskal(terms, closure):
        path = _lex_min_path(g, a, b, dist[b])
        for u, v in zip(path, path[1:]):
            expanded.add((min(u, v), max(u, v)))

    nodes = {x for e in expanded for x in e}
    tree = _kruskal(nodes, [(1, u, v) for u, v in expanded])

    adj: dict[str, set[str]] = {n: set() for n in nodes}
    for u, v in tree:
        adj[u].add(v)
        adj[v].add(u)
    keep = set(terms)
    leaves = deque(sorted(n for n in nodes if len(adj[n]) <= 1 and n not in keep))
    while leaves:
        n = leaves.popleft()
        if n not in adj:
            continue
        for m in adj.pop(n):
            adj[m].discard(n)
            if len(adj[m]) <= 1 and m not in keep:
                leaves.append(m)
    edges = sorted({(min(u, v), max(u, v)) for u in adj for v in adj[u]})
    return set(adj), edges


def steiner_subgraph(g: KnowledgeGraph, terminals: Iterable[str]) -> KnowledgeGraph:
    """Approximate minimal connected subgraph of ``g`` spanning ``terminals``.

    Returns a ``private`` graph (parented to ``g``) holding the heuristic
    tree's nodes and every triple of ``g`` induced on them.
    """
    nodes, _ = steiner_tree_nodes(g, terminals)
    return g.induced_subgraph(nodes, kind="private", parent=g)


# -- local context -----------------------------------------------------


def context_signature(g: KnowledgeGraph, entity_id: str) -> ContextSignature:
    """Multiset of (direction, relation, neighbor category) around an entity."""
    sig: Counter = Counter()
    for t in g.incident(entity_id):
        if t.head == entity_id:
            sig["out", t.relation, g.entity(t.tail).category] += 1
        if t.tail == entity_id:
            sig["in", t.relation, g.entity(t.head).category] += 1
    return sig


def context_vector(g: KnowledgeGraph, entity_id: str) -> Counter:
    """Bag of (relation, neighbor category), direction ignored."""
    vec: Counter = Counter()
    for (_, rel, cat), n in context_signature(g, entity_id).items():
        vec[rel, cat] += n
    return vec


def multiset_jaccard(a: Counter, b: Counter) -> float:
    """Sum of minimum counts over sum of maximum counts; 1.0 when both are empty."""
    keys = set(a) | set(b)
    if not keys:
        return 1.0
    return sum(min(a[k], b[k]) for k in keys) / sum(max(a[k], b[k]) for k in keys)
