"""Knowledge management between one transmitter and one receiver.

Covers fusing the two personal graphs (salted-hash set intersection on
entity names, then context-based disambiguation), cutting a message-specific
private graph out of the fused one, gating access to it behind an HMAC
credential, and applying sequenced update deltas.
"""

from __future__ import annotations

import enum
import hashlib
import hmac
import os
from dataclasses import dataclass, field
from typing import Iterable

from .exceptions import AccessDenied, EmptySalt, NoEntitiesMatched, SequenceGap, UnknownEntity
from .kg import (
    DEFAULT_MIN_VISITS,
    DEFAULT_WALK_LENGTH,
    DEFAULT_WALKS_PER_SEED,
    Entity,
    KnowledgeGraph,
    Triple,
    context_signature,
    multiset_jaccard,
    random_walk_collect,
    steiner_subgraph,
)
from .text import PhraseIndex, split_words

DEFAULT_THETA = 0.5
QUERY_GENERAL = "query_general"
QUERY_PRIVATE = "query_private"
PERMISSIONS = frozenset({QUERY_GENERAL, QUERY_PRIVATE})


# -- private set intersection -------------------------------------------


def psi_digest(salt: bytes, name: str) -> str:
    return hashlib.sha256(salt + name.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class PsiTranscript:
    """What crosses the wire: each side's sorted digest list."""

    digests_a: tuple[str, ...]
    digests_b: tuple[str, ...]

    def serialize(self) -> bytes:
        lines = ["A"] + list(self.digests_a) + ["B"] + list(self.digests_b)
        return ("\n".join(lines) + "\n").encode("ascii")


def psi_exchange(names_a: Iterable[str], names_b: Iterable[str], salt: bytes) -> tuple[set[str], PsiTranscript]:
    """Salted-hash PSI; returns side A's view of the intersection and the transcript."""
    if not salt:
        raise EmptySalt("PSI salt must be non-empty")
    own = {psi_digest(salt, n): n for n in set(names_a)}
    theirs = {psi_digest(salt, n) for n in set(names_b)}
    transcript = PsiTranscript(tuple(sorted(own)), tuple(sorted(theirs)))
    return {own[d] for d in theirs & own.keys()}, transcript


def psi_intersect(names_a: Iterable[str], names_b: Iterable[str], salt: bytes) -> set[str]:
    return psi_exchange(names_a, names_b, salt)[0]


# -- alignment and disambiguation ---------------------------------------


class Decision(str, enum.Enum):
    MERGE = "merge"
    KEEP_SEPARATE = "keep_separate"


def same_name_matches(
    g_a: KnowledgeGraph, g_b: KnowledgeGraph, name: str, theta: float = DEFAULT_THETA
) -> list[tuple[str, str, float]]:
    """Pairs of same-named entities whose context signatures are similar enough.

    Every cross pair is scored; pairs are taken best score first (ties by
    ascending ids), each entity used at most once, and only scores at or
    above ``theta`` are kept.
    """
    ids_a, ids_b = g_a.ids_named(name), g_b.ids_named(name)
    if not ids_a or not ids_b:
        raise UnknownEntity(f"{name!r} is not present in both graphs")
    sig_a = {a: context_signature(g_a, a) for a in ids_a}
    sig_b = {b: context_signature(g_b, b) for b in ids_b}
    scored = sorted((-multiset_jaccard(sig_a[a], sig_b[b]), a, b) for a in ids_a for b in ids_b)
    used_a, used_b, out = set(), set(), []
    for neg, a, b in scored:
        if -neg < theta:
            break
        if a in used_a or b in used_b:
            continue
        used_a.add(a)
        used_b.add(b)
        out.append((a, b, -neg))
    return out


def disambiguate(
    g_a: KnowledgeGraph, g_b: KnowledgeGraph, shared_name: str, theta: float = DEFAULT_THETA
) -> Decision:
    if same_name_matches(g_a, g_b, shared_name, theta):
        return Decision.MERGE
    return Decision.KEEP_SEPARATE


def _free_id(candidate: str, used: set[str]) -> str:
    if candidate not in used:
        return candidate
    n = 1
    while f"{candidate}~rx{n}" in used:
        n += 1
    return f"{candidate}~rx{n}"


def fuse(
    personal_tx: KnowledgeGraph,
    personal_rx: KnowledgeGraph,
    salt: bytes,
    theta: float = DEFAULT_THETA,
) -> KnowledgeGraph:
    """Merge the two personal graphs into one ``fused`` graph.

    Names found by PSI are merged when their contexts agree. Transmitter ids
    are kept; merged receiver entities take the transmitter id, and other
    receiver ids are renamed (``<id>~rxN``) only on collision. Merged
    entities keep the transmitter's category, and attributes are unioned
    with transmitter values winning.
    """
    for g in (personal_tx, personal_rx):
        if g.kind != "personal":
            raise ValueError(f"fuse expects personal graphs, got kind={g.kind!r}")
    shared = psi_intersect(personal_tx.names(), personal_rx.names(), salt)
    rx_to_tx: dict[str, str] = {}
    for name in sorted(shared):
        for a, b, _ in same_name_matches(personal_tx, personal_rx, name, theta):
            rx_to_tx[b] = a

    merged_from = {a: b for b, a in rx_to_tx.items()}
    fused = KnowledgeGraph("fused")
    for eid in sorted(personal_tx.entity_ids):
        e = personal_tx.entity(eid)
        if eid in merged_from:
            attrs = dict(e.attrs)
            for k, v in personal_rx.entity(merged_from[eid]).attrs.items():
                attrs.setdefault(k, v)
            e = Entity(e.id, e.name, e.category, attrs)
        fused.add_entity(e)

    remap = dict(rx_to_tx)
    used = set(fused.entity_ids)
    for eid in sorted(personal_rx.entity_ids):
        if eid in remap:
            continue
        new = _free_id(eid, used)
        used.add(new)
        remap[eid] = new
        e = personal_rx.entity(eid)
        fused.add_entity(Entity(new, e.name, e.category, e.attrs))

    for t in sorted(personal_tx.triples):
        fused.add_triple(t)
    for t in sorted(personal_rx.triples):
        mapped = Triple(remap[t.head], t.relation, remap[t.tail])
        if not fused.has_triple(mapped):
            fused.add_triple(mapped)
    return fused


# -- private knowledge construction -------------------------------------


def analyze_message(msg: str, fused: KnowledgeGraph) -> set[str]:
    """Ids of fused entities named in ``msg`` (case-folded longest match)."""
    if fused.kind != "fused":
        raise ValueError(f"expected a fused graph, got kind={fused.kind!r}")
    index: PhraseIndex[str] = PhraseIndex()
    index.add_all((e.name, e.id) for e in fused.entities)
    found = set()
    for span in index.scan(split_words(msg)):
        if span.key is not None:
            found.update(index.get(span.key))
    return found


def construct_private_knowledge(
    fused: KnowledgeGraph,
    msg: str,
    walks_per_seed: int = DEFAULT_WALKS_PER_SEED,
    walk_length: int = DEFAULT_WALK_LENGTH,
    min_visits: int = DEFAULT_MIN_VISITS,
    rng_seed: int = 0,
) -> KnowledgeGraph:
    terminals = analyze_message(msg, fused)
    if not terminals:
        raise NoEntitiesMatched(f"no knowledge entity named in {msg!r}")
    collected = random_walk_collect(fused, terminals, walks_per_seed, walk_length, min_visits, rng_seed)
    return steiner_subgraph(fused, collected)


# -- access control ------------------------------------------------------


class SharedSecret:
    """256-bit key shared by transmitter and receiver.

    ``repr`` never shows the key material.
    """

    __slots__ = ("_key",)

    def __init__(self, key: bytes):
        if len(key) != 32:
            raise ValueError("shared secret must be 32 bytes")
        self._key = bytes(key)

    @classmethod
    def generate(cls) -> SharedSecret:
        return cls(os.urandom(32))

    @classmethod
    def derive(cls, *material) -> SharedSecret:
        h = hashlib.sha256(b"privsc/shared-secret")
        for m in material:
            h.update(repr(m).encode("utf-8"))
        return cls(h.digest())

    @property
    def key(self) -> bytes:
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, SharedSecret) and hmac.compare_digest(self._key, other._key)

    def __hash__(self):
        return hash(self._key)

    def __repr__(self) -> str:
        return "SharedSecret(<redacted>)"


def _credential_mac(key: SharedSecret, principal_id: str, nonce: bytes) -> bytes:
    return hmac.new(key.key, principal_id.encode("utf-8") + nonce, hashlib.sha256).digest()


@dataclass(frozen=True)
class AccessCredential:
    principal_id: str
    nonce: bytes
    tag: bytes
    permissions: frozenset = field(default_factory=lambda: frozenset({QUERY_GENERAL}))

    def __post_init__(self):
        object.__setattr__(self, "permissions", frozenset(self.permissions))
        unknown = self.permissions - PERMISSIONS
        if unknown:
            raise ValueError(f"unknown permissions {sorted(unknown)}")
        if ":" in self.principal_id:
            raise ValueError("principal id may not contain ':'")

    def verify(self, key: SharedSecret) -> bool:
        return hmac.compare_digest(self.tag, _credential_mac(key, self.principal_id, self.nonce))

    def to_string(self) -> str:
        return f"{self.principal_id}:{self.nonce.hex()}:{self.tag.hex()}"

    @classmethod
    def from_string(cls, text: str, permissions: Iterable[str] = (QUERY_GENERAL,)) -> AccessCredential:
        principal, nonce, tag = text.strip().split(":")
        return cls(principal, bytes.fromhex(nonce), bytes.fromhex(tag), frozenset(permissions))


def issue_credential(
    principal_id: str,
    key: SharedSecret,
    permissions: Iterable[str] = (QUERY_GENERAL, QUERY_PRIVATE),
    nonce: bytes | None = None,
) -> AccessCredential:
    nonce = os.urandom(16) if nonce is None else nonce
    return AccessCredential(principal_id, nonce, _credential_mac(key, principal_id, nonce), frozenset(permissions))


def distribute(private: KnowledgeGraph, cred: AccessCredential, key: SharedSecret) -> KnowledgeGraph:
    """Hand out a copy of ``private`` to a verified holder of ``query_private``."""
    if not cred.verify(key):
        raise AccessDenied(AccessDenied.BAD_TAG)
    if QUERY_PRIVATE not in cred.permissions:
        raise AccessDenied(AccessDenied.INSUFFICIENT_PERMISSION)
    return private.copy()


class PrivateKnowledgeStore:
    """Trusted store holding per-session private graphs behind ``distribute``."""

    def __init__(self, key: SharedSecret):
        self._key = key
        self._graphs: dict[str, KnowledgeGraph] = {}

    def put(self, session_id: str, graph: KnowledgeGraph) -> None:
        self._graphs[session_id] = graph

    def query(self, session_id: str, cred: AccessCredential) -> KnowledgeGraph:
        return distribute(self._graphs[session_id], cred, self._key)


# -- updates -------------------------------------------------------------


@dataclass(frozen=True)
class UpdateDelta:
    sequence: int
    added_entities: tuple[Entity, ...] = ()
    added_triples: tuple[Triple, ...] = ()
    removed_triples: tuple[Triple, ...] = ()


def apply_update(g: KnowledgeGraph, delta: UpdateDelta, expected_seq: int) -> KnowledgeGraph:
    """Return a new graph with ``delta`` applied; ``g`` itself is never touched."""
    if delta.sequence != expected_seq:
        raise SequenceGap(f"expected delta {expected_seq}, got {delta.sequence}")
    out = g.copy()
    for e in delta.added_entities:
        out.add_entity(e)
    for t in delta.added_triples:
        out.add_triple(t)
    for t in delta.removed_triples:
        out.remove_triple(t)
    return out


def apply_updates(g: KnowledgeGraph, deltas: Iterable[UpdateDelta], start_seq: int) -> tuple[KnowledgeGraph, int]:
    """Fold deltas in order; returns the graph and the next expected sequence."""
    seq = start_seq
    for d in deltas:
        g = apply_update(g, d, seq)
        seq += 1
    return g, seq
