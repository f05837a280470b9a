"""Fixed-width token codebooks.

The global codebook is reproducible by anyone holding the global graph:
reserved symbols take ids 0 and 1, the remaining symbols follow in sorted
order, and a token's codeword is its id in ``width`` big-endian bits.

A private codebook covers one private graph. Its ids come from a
Fisher-Yates shuffle driven by an HMAC stream under the shared secret, and
its codewords count down from the top of the codeword space
(``2**width - 1 - id``) so the two books never collide as long as their
sizes fit together.
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass, field

from .exceptions import UnknownToken, WidthTooSmall
from .kg import KnowledgeGraph
from .knowledge import SharedSecret
from .text import phrase_key

DEFAULT_WIDTH = 16
UNKNOWN = "<unk>"
ERASURE = "<erase>"
RESERVED = (UNKNOWN, ERASURE)
UNKNOWN_ID = 0
ERASURE_ID = 1


def entity_symbol(key: str) -> str:
    return "e:" + key


def relation_symbol(label: str) -> str:
    return "r:" + label


def phrase_symbol(name: str) -> str:
    """Global symbol for an entity name: its case-folded words."""
    return entity_symbol(" ".join(phrase_key(name)))


def symbol_text(symbol: str) -> str:
    return symbol[2:] if symbol[:2] in ("e:", "r:") else symbol


@dataclass(frozen=True)
class Codebook:
    """Bijection between token ids, symbols and ``width``-bit codewords."""

    scope: str
    width: int
    symbols: tuple[str, ...]
    codewords: tuple[int, ...]
    _by_symbol: dict = field(init=False, repr=False, compare=False)
    _by_codeword: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.scope not in ("global", "private"):
            raise ValueError(f"bad codebook scope {self.scope!r}")
        if len(self.symbols) != len(self.codewords):
            raise ValueError("symbols and codewords differ in length")
        by_symbol = {s: i for i, s in enumerate(self.symbols)}
        by_cw = {c: i for i, c in enumerate(self.codewords)}
        if len(by_symbol) != len(self.symbols) or len(by_cw) != len(self.codewords):
            raise ValueError("codebook is not a bijection")
        if any(not 0 <= c < 1 << self.width for c in self.codewords):
            raise ValueError(f"codeword outside {self.width}-bit range")
        object.__setattr__(self, "_by_symbol", by_symbol)
        object.__setattr__(self, "_by_codeword", by_cw)

    def __len__(self) -> int:
        return len(self.symbols)

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._by_symbol

    def id_of(self, symbol: str) -> int:
        try:
            return self._by_symbol[symbol]
        except KeyError:
            raise UnknownToken(f"{symbol!r} not in {self.scope} codebook") from None

    def symbol(self, token_id: int) -> str:
        if not 0 <= token_id < len(self.symbols):
            raise UnknownToken(f"id {token_id} not in {self.scope} codebook")
        return self.symbols[token_id]

    def codeword(self, token_id: int) -> int:
        if not 0 <= token_id < len(self.codewords):
            raise UnknownToken(f"id {token_id} not in {self.scope} codebook")
        return self.codewords[token_id]

    def bits(self, token_id: int) -> str:
        return format(self.codeword(token_id), f"0{self.width}b")

    def lookup(self, codeword: int) -> int | None:
        """Token id for a codeword, or None when the codeword is unused."""
        return self._by_codeword.get(codeword)

    def to_text(self) -> str:
        return "".join(
            f"{i}\t{s}\t{self.bits(i)}\t{self.scope}\n" for i, s in enumerate(self.symbols)
        )

    @classmethod
    def from_text(cls, text: str) -> Codebook:
        rows = [line.split("\t") for line in text.splitlines() if line.strip()]
        if not rows:
            raise ValueError("empty codebook")
        rows.sort(key=lambda r: int(r[0]))
        if [int(r[0]) for r in rows] != list(range(len(rows))):
            raise ValueError("codebook ids are not contiguous from 0")
        scopes = {r[3] for r in rows}
        if len(scopes) != 1:
            raise ValueError(f"mixed scopes {sorted(scopes)}")
        width = len(rows[0][2])
        return cls(scopes.pop(), width, tuple(r[1] for r in rows), tuple(int(r[2], 2) for r in rows))


def _check_capacity(size: int, width: int) -> None:
    if width < 1:
        raise WidthTooSmall("width must be >= 1")
    if size > 1 << width:
        raise WidthTooSmall(f"{size} symbols do not fit in {width}-bit codewords")


def global_vocabulary(global_kg: KnowledgeGraph) -> list[str]:
    syms = {phrase_symbol(e.name) for e in global_kg.entities if phrase_key(e.name)}
    syms |= {relation_symbol(r) for r in global_kg.relations()}
    return sorted(syms - set(RESERVED))


def build_global_codebook(global_kg: KnowledgeGraph, width: int = DEFAULT_WIDTH) -> Codebook:
    symbols = RESERVED + tuple(global_vocabulary(global_kg))
    _check_capacity(len(symbols), width)
    return Codebook("global", width, symbols, tuple(range(len(symbols))))


class _KeyedStream:
    """Deterministic uniform integers from HMAC-SHA-256 in counter mode."""

    def __init__(self, key: bytes, context: bytes):
        self._key = key
        self._context = context
        self._counter = 0
        self._buf = b""

    def _take(self, n: int) -> bytes:
        while len(self._buf) < n:
            block = hmac.new(
                self._key, self._context + self._counter.to_bytes(8, "big"), hashlib.sha256
            ).digest()
            self._buf += block
            self._counter += 1
        out, self._buf = self._buf[:n], self._buf[n:]
        return out

    def randbelow(self, bound: int) -> int:
        if bound <= 1:
            return 0
        limit = (1 << 64) - (1 << 64) % bound
        while True:
            x = int.from_bytes(self._take(8), "big")
            if x < limit:
                return x % bound


def keyed_permutation(n: int, key: SharedSecret | bytes, context: bytes = b"privsc/codebook") -> list[int]:
    """Fisher-Yates shuffle of ``range(n)`` driven only by ``key``."""
    raw = key.key if isinstance(key, SharedSecret) else bytes(key)
    stream = _KeyedStream(raw, context)
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = stream.randbelow(i + 1)
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def private_vocabulary(private_kg: KnowledgeGraph) -> list[str]:
    syms = {entity_symbol(e.id) for e in private_kg.entities}
    syms |= {relation_symbol(r) for r in private_kg.relations()}
    return sorted(syms)


def build_private_codebook(
    private_kg: KnowledgeGraph, key: SharedSecret, width: int = DEFAULT_WIDTH
) -> Codebook:
    ordered = private_vocabulary(private_kg)
    _check_capacity(len(ordered), width)
    perm = keyed_permutation(len(ordered), key)
    symbols = [""] * len(ordered)
    for rank, sym in enumerate(ordered):
        symbols[perm[rank]] = sym
    top = (1 << width) - 1
    return Codebook("private", width, tuple(symbols), tuple(top - i for i in range(len(ordered))))


def check_disjoint(global_cb: Codebook, private_cb: Codebook) -> None:
    """Both books must share a width and leave no codeword claimed twice."""
    if global_cb.width != private_cb.width:
        raise ValueError("codebooks disagree on width")
    _check_capacity(len(global_cb) + len(private_cb), global_cb.width)
