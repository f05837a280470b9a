"""Token-level transceiver operations.

Encoder side: sensitivity screening over the private graph, longest-match
tokenization, overlay of sensitive tokens onto look-alike public ones, and
framing into fixed-width codewords. Decoder side: codeword lookup with
erasures, disaggregation into public tokens and private entities, inference
over the private graph, and erasure repair along short graph paths.
"""

from __future__ import annotations

import math
import struct
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .codebook import (
    ERASURE_ID,
    RESERVED,
    UNKNOWN_ID,
    Codebook,
    entity_symbol,
    phrase_symbol,
    relation_symbol,
    symbol_text,
)
from .exceptions import MisalignedFrame, UnknownEntity, UnknownToken
from .kg import KnowledgeGraph, context_vector, shortest_path
from .text import PhraseIndex, phrase_key, split_words

GLOBAL = "global"
PRIVATE = "private"
ERASED = "erasure"
PROVENANCES = (GLOBAL, PRIVATE, ERASED)

DEFAULT_TAU = 0.8
DEFAULT_HOPS = 1
DEFAULT_DEPTH = 2


@dataclass(frozen=True)
class Token:
    provenance: str
    id: int | None = None

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"bad provenance {self.provenance!r}")
        if self.provenance == ERASED:
            if self.id is not None:
                raise ValueError("erasure tokens carry no id")
        elif self.id is None or self.id < 0:
            raise ValueError(f"{self.provenance} token needs a non-negative id")

    def __str__(self) -> str:
        return "?" if self.provenance == ERASED else f"{self.provenance[0]}{self.id}"

    @classmethod
    def parse(cls, text: str) -> Token:
        if text == "?":
            return ERASURE_TOKEN
        prov = {"g": GLOBAL, "p": PRIVATE}.get(text[:1])
        if prov is None or not text[1:].isdigit():
            raise ValueError(f"bad token {text!r}")
        return cls(prov, int(text[1:]))


ERASURE_TOKEN = Token(ERASED)
UNKNOWN_TOKEN = Token(GLOBAL, UNKNOWN_ID)


@dataclass(frozen=True)
class TokenStream:
    tokens: tuple[Token, ...]
    message_id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[Token]:
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    def with_tokens(self, tokens: Iterable[Token]) -> TokenStream:
        return TokenStream(tuple(tokens), self.message_id)

    def erasures(self) -> list[int]:
        return [i for i, t in enumerate(self.tokens) if t.provenance == ERASED]

    def to_text(self) -> str:
        return " ".join(str(t) for t in self.tokens)

    @classmethod
    def from_text(cls, text: str, message_id: str = "") -> TokenStream:
        return cls(tuple(Token.parse(x) for x in text.split()), message_id)


class BitFrame:
    """On-air bit vector made of ``width``-bit codewords."""

    __slots__ = ("bits", "width")

    def __init__(self, bits, width: int):
        arr = np.array(bits, dtype=np.uint8).ravel()
        if arr.size and arr.max() > 1:
            raise ValueError("frame bits must be 0 or 1")
        if width < 1:
            raise ValueError("width must be >= 1")
        if arr.size % width:
            raise MisalignedFrame(f"{arr.size} bits is not a multiple of width {width}")
        arr.setflags(write=False)
        self.bits = arr
        self.width = width

    def __len__(self) -> int:
        return int(self.bits.size)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitFrame)
            and self.width == other.width
            and np.array_equal(self.bits, other.bits)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return f"BitFrame(n_bits={len(self)}, width={self.width})"

    @property
    def n_codewords(self) -> int:
        return len(self) // self.width

    def codewords(self) -> np.ndarray:
        weights = 1 << np.arange(self.width - 1, -1, -1, dtype=np.int64)
        return self.bits.reshape(-1, self.width).astype(np.int64) @ weights

    @classmethod
    def from_codewords(cls, codewords: Sequence[int], width: int) -> BitFrame:
        cw = np.asarray(codewords, dtype=np.int64).reshape(-1, 1)
        shifts = np.arange(width - 1, -1, -1, dtype=np.int64)
        return cls(((cw >> shifts) & 1).ravel(), width)

    def to_string(self) -> str:
        return "".join("1" if b else "0" for b in self.bits.tolist())

    @classmethod
    def from_string(cls, text: str, width: int) -> BitFrame:
        text = text.strip()
        if set(text) - {"0", "1"}:
            raise ValueError("frame text must contain only '0' and '1'")
        return cls(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0"), width)

    def to_bytes(self) -> bytes:
        """Wire format: ``>IH`` (bit count, width) header then packed bits."""
        return struct.pack(">IH", len(self), self.width) + np.packbits(self.bits).tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> BitFrame:
        n, width = struct.unpack(">IH", data[:6])
        bits = np.unpackbits(np.frombuffer(data[6:], dtype=np.uint8))[:n]
        if bits.size != n:
            raise ValueError("truncated frame")
        return cls(bits, width)


# -- sensitivity ---------------------------------------------------------

KEYWORD_CATEGORY = "keyword_category"
GRAPH_PROXIMITY = "graph_proximity"


class SensitivityEntry(NamedTuple):
    flagged: bool
    reason: str | None
    distance: int | None


@dataclass(frozen=True)
class SensitivityReport:
    entries: Mapping[str, SensitivityEntry]
    hops: int

    @property
    def flagged(self) -> frozenset:
        return frozenset(e for e, entry in self.entries.items() if entry.flagged)

    def is_sensitive(self, entity_id: str) -> bool:
        entry = self.entries.get(entity_id)
        return bool(entry and entry.flagged)


def recognize_sensitive(
    private_kg: KnowledgeGraph, sensitive_categories: Iterable[str], hops: int = DEFAULT_HOPS
) -> SensitivityReport:
    """Flag entities of a sensitive category and everything within ``hops`` of one."""
    if hops < 1:
        raise ValueError("hops must be >= 1")
    cats = set(sensitive_categories)
    sources = sorted(e.id for e in private_kg.entities if e.category in cats)
    dist = {s: 0 for s in sources}
    queue = deque(sources)
    while queue:
        u = queue.popleft()
        if dist[u] >= hops:
            continue
        for v in private_kg.adjacent(u):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    entries = {}
    for eid in sorted(private_kg.entity_ids):
        d = dist.get(eid)
        if d is None:
            entries[eid] = SensitivityEntry(False, None, None)
        else:
            entries[eid] = SensitivityEntry(True, KEYWORD_CATEGORY if d == 0 else GRAPH_PROXIMITY, d)
    return SensitivityReport(entries, hops)


# -- encoder -------------------------------------------------------------


def _private_token(private_cb: Codebook, entity_id: str) -> Token:
    return Token(PRIVATE, private_cb.id_of(entity_symbol(entity_id)))


def tokenize(
    msg: str,
    global_cb: Codebook,
    private_cb: Codebook,
    private_kg: KnowledgeGraph,
    sensitivity: SensitivityReport,
    message_id: str = "",
) -> TokenStream:
    """Longest-match tokenization over global phrases and private entity names.

    A span naming a flagged private entity becomes that entity's private
    token (smallest id first); otherwise a global phrase token if one
    exists, else the unknown-word token.
    """
    index: PhraseIndex[tuple[str, object]] = PhraseIndex()
    for gid, sym in enumerate(global_cb.symbols):
        if sym.startswith("e:"):
            index.add(tuple(sym[2:].split(" ")), (GLOBAL, gid))
    for e in private_kg.entities:
        index.add(e.name, (PRIVATE, e.id))

    tokens = []
    for span in index.scan(split_words(msg)):
        if span.key is None:
            tokens.append(UNKNOWN_TOKEN)
            continue
        cands = index.get(span.key)
        hidden = sorted(x for p, x in cands if p == PRIVATE and sensitivity.is_sensitive(x))
        public = sorted(x for p, x in cands if p == GLOBAL)
        if hidden:
            tokens.append(_private_token(private_cb, hidden[0]))
        elif public:
            tokens.append(Token(GLOBAL, public[0]))
        else:
            tokens.append(UNKNOWN_TOKEN)
    return TokenStream(tuple(tokens), message_id)


def cosine(a: Counter, b: Counter) -> float:
    if not a or not b:
        return 0.0
    if a == b:
        return 1.0
    dot = sum(a[k] * b[k] for k in a.keys() & b.keys())
    return dot / math.sqrt(sum(v * v for v in a.values()) * sum(v * v for v in b.values()))


def align_and_overlay(
    stream: TokenStream,
    global_kg: KnowledgeGraph,
    global_cb: Codebook,
    private_kg: KnowledgeGraph,
    private_cb: Codebook,
    sensitivity: SensitivityReport,
    tau: float = DEFAULT_TAU,
) -> TokenStream:
    """Swap global tokens for the most context-similar sensitive private token.

    Context vectors are bags of (relation, neighbor category); a swap needs
    cosine >= ``tau``. Ties go to the smallest private entity id.
    """
    targets = [(eid, context_vector(private_kg, eid)) for eid in sorted(sensitivity.flagged)]
    targets = [(eid, v) for eid, v in targets if eid in private_kg]
    if not targets:
        return stream
    by_symbol: dict[str, list[str]] = {}
    for e in global_kg.entities:
        if phrase_key(e.name):
            by_symbol.setdefault(phrase_symbol(e.name), []).append(e.id)

    cache: dict[int, Token | None] = {}
    out = []
    for tok in stream:
        if tok.provenance != GLOBAL or tok.id < len(RESERVED):
            out.append(tok)
            continue
        if tok.id not in cache:
            best = None
            for gid in sorted(by_symbol.get(global_cb.symbol(tok.id), ())):
                vec = context_vector(global_kg, gid)
                for eid, target in targets:
                    score = cosine(vec, target)
                    if score >= tau and (best is None or (-score, eid) < best):
                        best = (-score, eid)
            cache[tok.id] = None if best is None else _private_token(private_cb, best[1])
        out.append(cache[tok.id] or tok)
    return stream.with_tokens(out)


def encode_tokens(stream: TokenStream, global_cb: Codebook, private_cb: Codebook | None) -> BitFrame:
    """Concatenate codewords; erasure tokens use the reserved erasure codeword."""
    words = []
    for tok in stream:
        if tok.provenance == ERASED:
            words.append(global_cb.codeword(ERASURE_ID))
        elif tok.provenance == GLOBAL:
            words.append(global_cb.codeword(tok.id))
        else:
            if private_cb is None:
                raise UnknownToken(f"{tok} needs a private codebook")
            words.append(private_cb.codeword(tok.id))
    return BitFrame.from_codewords(words, global_cb.width)


# -- decoder -------------------------------------------------------------


def decode_tokens(
    frame: BitFrame | Sequence[int],
    global_cb: Codebook,
    private_cb: Codebook | None = None,
    message_id: str = "",
) -> TokenStream:
    """Look each chunk up privately first, then globally; misses become erasures."""
    if not isinstance(frame, BitFrame):
        frame = BitFrame(frame, global_cb.width)
    if frame.width != global_cb.width:
        raise MisalignedFrame(f"frame width {frame.width} != codebook width {global_cb.width}")
    tokens = []
    for cw in frame.codewords().tolist():
        pid = private_cb.lookup(cw) if private_cb is not None else None
        if pid is not None:
            tokens.append(Token(PRIVATE, pid))
            continue
        gid = global_cb.lookup(cw)
        if gid is None or gid == ERASURE_ID:
            tokens.append(ERASURE_TOKEN)
        else:
            tokens.append(Token(GLOBAL, gid))
    return TokenStream(tuple(tokens), message_id)


class Disaggregation(NamedTuple):
    public: tuple[tuple[int, Token], ...]
    sensitive: tuple[str, ...]
    erasures: tuple[int, ...]


def disaggregate(stream: TokenStream, private_kg: KnowledgeGraph, private_cb: Codebook | None) -> Disaggregation:
    """Split a received stream into public tokens, private entities and erasures.

    Private relation tokens (which only repair emits) count as public.
    """
    public, sensitive, erasures = [], [], []
    for pos, tok in enumerate(stream):
        if tok.provenance == ERASED:
            erasures.append(pos)
            continue
        if tok.provenance == PRIVATE:
            if private_cb is None:
                raise UnknownToken(f"{tok} needs a private codebook")
            sym = private_cb.symbol(tok.id)
            if sym.startswith("e:"):
                eid = sym[2:]
                if eid not in private_kg:
                    raise UnknownEntity(eid)
                if eid not in sensitive:
                    sensitive.append(eid)
                continue
        public.append((pos, tok))
    return Disaggregation(tuple(public), tuple(sensitive), tuple(erasures))


@dataclass(frozen=True)
class InferredFact:
    """A triple reached by expansion; identity ignores ``value`` and ``depth``.

    ``value`` carries the object's ``value`` attribute when it has one, so a
    credential node surfaces its literal (e.g. a password string).
    """

    subject: str
    relation: str
    object: str
    value: str | None = field(default=None, compare=False)
    depth: int = field(default=1, compare=False)

    def sort_key(self):
        return (self.depth, self.subject, self.relation, self.object)


def infer_semantics(
    entities: Iterable[str], private_kg: KnowledgeGraph, depth: int = DEFAULT_DEPTH
) -> tuple[InferredFact, ...]:
    """Breadth-first triple expansion from ``entities`` up to ``depth`` levels."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    start = sorted(set(entities))
    for e in start:
        if e not in private_kg:
            raise UnknownEntity(e)
    dist = {e: 0 for e in start}
    found: dict = {}
    frontier = start
    for level in range(1, depth + 1):
        nxt = set()
        for u in frontier:
            for t in private_kg.incident(u):
                if t not in found:
                    value = private_kg.entity(t.tail).attrs.get("value")
                    found[t] = InferredFact(t.head, t.relation, t.tail, value, level)
                for other in (t.head, t.tail):
                    if other not in dist:
                        dist[other] = level
                        nxt.add(other)
        frontier = sorted(nxt)
    return tuple(sorted(found.values(), key=InferredFact.sort_key))


def _resolve_entity(tok: Token, global_cb: Codebook, private_cb: Codebook | None, private_kg: KnowledgeGraph):
    if tok.provenance == PRIVATE and private_cb is not None:
        sym = private_cb.symbol(tok.id)
        if sym.startswith("e:") and sym[2:] in private_kg:
            return sym[2:]
        return None
    if tok.provenance == GLOBAL and tok.id >= len(RESERVED):
        sym = global_cb.symbol(tok.id)
        if sym.startswith("e:"):
            for e in sorted(private_kg.entity_ids):
                if phrase_symbol(private_kg.entity(e).name) == sym:
                    return e
    return None


def _entity_token(
    eid: str,
    private_kg: KnowledgeGraph,
    global_cb: Codebook,
    private_cb: Codebook | None,
    sensitivity: SensitivityReport | None,
) -> Token | None:
    options = []
    if private_cb is not None and entity_symbol(eid) in private_cb:
        options.append(_private_token(private_cb, eid))
    sym = phrase_symbol(private_kg.entity(eid).name)
    if sym in global_cb:
        options.append(Token(GLOBAL, global_cb.id_of(sym)))
    if sensitivity is not None and not sensitivity.is_sensitive(eid):
        options.reverse()
    return options[0] if options else None


def _relation_token(label: str, global_cb: Codebook, private_cb: Codebook | None) -> Token | None:
    sym = relation_symbol(label)
    if private_cb is not None and sym in private_cb:
        return Token(PRIVATE, private_cb.id_of(sym))
    if sym in global_cb:
        return Token(GLOBAL, global_cb.id_of(sym))
    return None


def repair_missing(
    stream: TokenStream,
    private_kg: KnowledgeGraph,
    global_cb: Codebook,
    private_cb: Codebook | None = None,
    sensitivity: SensitivityReport | None = None,
) -> TokenStream:
    """Fill single erasures whose two neighbors are joined by a short graph path.

    Two hops away, the middle entity's token goes in (private first for
    sensitive entities, global first otherwise); one hop away, the joining
    relation's token. Everything else, including erasure runs and edge
    positions, is left untouched.
    """
    toks = list(stream.tokens)
    out = list(toks)
    for i in range(1, len(toks) - 1):
        if toks[i].provenance != ERASED:
            continue
        a = _resolve_entity(toks[i - 1], global_cb, private_cb, private_kg)
        b = _resolve_entity(toks[i + 1], global_cb, private_cb, private_kg)
        if a is None or b is None or a == b:
            continue
        path = shortest_path(private_kg, a, b)
        if path is None or len(path) > 3:
            continue
        if len(path) == 3:
            fill = _entity_token(path[1], private_kg, global_cb, private_cb, sensitivity)
        else:
            label = min(t.relation for t in private_kg.incident(a) if {t.head, t.tail} == {a, b})
            fill = _relation_token(label, global_cb, private_cb)
        if fill is not None:
            out[i] = fill
    return stream.with_tokens(out)


# -- naming --------------------------------------------------------------


def token_text(
    tok: Token, global_cb: Codebook, private_cb: Codebook | None, private_kg: KnowledgeGraph | None
) -> str | None:
    """Normalized surface text of a token; None for unknown and erasure tokens."""
    if tok.provenance == ERASED:
        return None
    if tok.provenance == GLOBAL:
        if tok.id in (UNKNOWN_ID, ERASURE_ID):
            return None
        return symbol_text(global_cb.symbol(tok.id))
    if private_cb is None:
        return None
    sym = private_cb.symbol(tok.id)
    if sym.startswith("e:"):
        if private_kg is None or sym[2:] not in private_kg:
            return None
        return " ".join(phrase_key(private_kg.entity(sym[2:]).name))
    return symbol_text(sym)


def stream_texts(
    stream: TokenStream, global_cb: Codebook, private_cb: Codebook | None, private_kg: KnowledgeGraph | None
) -> tuple[set[str], set[str]]:
    """(public texts, private entity texts) carried by a stream.

    Private relation tokens, which only repair produces, count as public.
    """
    public, sensitive = set(), set()
    for tok in stream:
        text = token_text(tok, global_cb, private_cb, private_kg)
        if text is None:
            continue
        if tok.provenance == PRIVATE and private_cb.symbol(tok.id).startswith("e:"):
            sensitive.add(text)
        else:
            public.add(text)
    return public, sensitive
