"""Estimator-style wrappers around the transceiver.

``fit`` injects knowledge (global graph, private graph, shared secret) and
builds codebooks; ``transform`` turns messages into frames or frames into
token streams. Hyperparameters live in ``__init__`` so ``get_params``,
``set_params`` and ``sklearn.base.clone`` work as usual.
"""

from __future__ import annotations

from dataclasses import dataclass

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .codebook import DEFAULT_WIDTH, build_global_codebook, build_private_codebook, check_disjoint
from .codec import (
    DEFAULT_DEPTH,
    DEFAULT_HOPS,
    DEFAULT_TAU,
    BitFrame,
    InferredFact,
    TokenStream,
    align_and_overlay,
    decode_tokens,
    disaggregate,
    encode_tokens,
    infer_semantics,
    recognize_sensitive,
    repair_missing,
    stream_texts,
    tokenize,
)
from .kg import KnowledgeGraph
from .knowledge import SharedSecret
from .validation import check_frames, check_graph, check_int, check_messages, check_unit_interval

DEFAULT_SENSITIVE_CATEGORIES = ("credential",)


@dataclass(frozen=True)
class KnowledgeBase:
    """The knowledge one party holds when it sets up its codec."""

    global_kg: KnowledgeGraph
    private_kg: KnowledgeGraph | None = None
    key: SharedSecret | None = None


def _ids(n, message_ids):
    if message_ids is None:
        return [str(i) for i in range(n)]
    message_ids = list(message_ids)
    if len(message_ids) != n:
        raise ValueError("message_ids length does not match the inputs")
    return message_ids


class SemanticEncoder(TransformerMixin, BaseEstimator):
    """Messages in, frames out.

    Parameters
    ----------
    width : int
        Codeword width in bits.
    tau : float
        Cosine threshold for overlaying a public token with a sensitive one.
    sensitive_categories : tuple of str
        Entity categories flagged as sensitive outright.
    hops : int
        Entities this close to a sensitive-category entity are flagged too.
    overlay : bool
        Turn the alignment/overlay step off for ablations.
    """

    def __init__(
        self,
        width=DEFAULT_WIDTH,
        tau=DEFAULT_TAU,
        sensitive_categories=DEFAULT_SENSITIVE_CATEGORIES,
        hops=DEFAULT_HOPS,
        overlay=True,
    ):
        self.width = width
        self.tau = tau
        self.sensitive_categories = sensitive_categories
        self.hops = hops
        self.overlay = overlay

    def fit(self, knowledge: KnowledgeBase, y=None):
        check_int(self.width, "width")
        check_unit_interval(self.tau, "tau")
        check_int(self.hops, "hops")
        self.global_kg_ = check_graph(knowledge.global_kg, name="global_kg")
        self.private_kg_ = check_graph(knowledge.private_kg, kinds=("private",), name="private_kg")
        if knowledge.key is None:
            raise ValueError("the encoder needs the shared secret")
        self.global_codebook_ = build_global_codebook(self.global_kg_, self.width)
        self.private_codebook_ = build_private_codebook(self.private_kg_, knowledge.key, self.width)
        check_disjoint(self.global_codebook_, self.private_codebook_)
        self.sensitivity_ = recognize_sensitive(self.private_kg_, self.sensitive_categories, self.hops)
        return self

    def tokenize(self, X, message_ids=None) -> list[TokenStream]:
        check_is_fitted(self, "global_codebook_")
        msgs = check_messages(X)
        return [
            tokenize(m, self.global_codebook_, self.private_codebook_, self.private_kg_, self.sensitivity_, mid)
            for m, mid in zip(msgs, _ids(len(msgs), message_ids))
        ]

    def align(self, streams) -> list[TokenStream]:
        check_is_fitted(self, "global_codebook_")
        if not self.overlay:
            return list(streams)
        return [
            align_and_overlay(
                s,
                self.global_kg_,
                self.global_codebook_,
                self.private_kg_,
                self.private_codebook_,
                self.sensitivity_,
                self.tau,
            )
            for s in streams
        ]

    def encode(self, streams) -> list[BitFrame]:
        check_is_fitted(self, "global_codebook_")
        return [encode_tokens(s, self.global_codebook_, self.private_codebook_) for s in streams]

    def transform(self, X, message_ids=None) -> list[BitFrame]:
        return self.encode(self.align(self.tokenize(X, message_ids)))


@dataclass(frozen=True)
class DecodedMessage:
    received: TokenStream
    repaired: TokenStream
    sensitive_entities: tuple[str, ...]
    public_texts: frozenset
    sensitive_texts: frozenset
    facts: tuple[InferredFact, ...]
    undecoded_fraction: float

    @property
    def texts(self) -> frozenset:
        return self.public_texts | self.sensitive_texts


class SemanticDecoder(TransformerMixin, BaseEstimator):
    """Frames in, token streams (``transform``) or decoded semantics (``predict``) out.

    Without a private graph and key the decoder only knows the global
    codebook; every private codeword then decodes as an erasure.

    Parameters
    ----------
    width : int
        Codeword width in bits.
    depth : int
        Inference depth over the private graph.
    repair : bool
        Fill erasures from short paths in the private graph.
    sensitive_categories, hops
        Must match the encoder; they decide whether a repaired entity is
        emitted as a private or a global token.
    """

    def __init__(
        self,
        width=DEFAULT_WIDTH,
        depth=DEFAULT_DEPTH,
        repair=True,
        sensitive_categories=DEFAULT_SENSITIVE_CATEGORIES,
        hops=DEFAULT_HOPS,
    ):
        self.width = width
        self.depth = depth
        self.repair = repair
        self.sensitive_categories = sensitive_categories
        self.hops = hops

    def fit(self, knowledge: KnowledgeBase, y=None):
        check_int(self.width, "width")
        check_int(self.depth, "depth")
        check_int(self.hops, "hops")
        self.global_kg_ = check_graph(knowledge.global_kg, name="global_kg")
        self.global_codebook_ = build_global_codebook(self.global_kg_, self.width)
        self.private_kg_ = None
        self.private_codebook_ = None
        self.sensitivity_ = None
        if knowledge.private_kg is not None and knowledge.key is not None:
            self.private_kg_ = check_graph(knowledge.private_kg, kinds=("private",), name="private_kg")
            self.private_codebook_ = build_private_codebook(self.private_kg_, knowledge.key, self.width)
            check_disjoint(self.global_codebook_, self.private_codebook_)
            self.sensitivity_ = recognize_sensitive(self.private_kg_, self.sensitive_categories, self.hops)
        return self

    def decode(self, X, message_ids=None) -> list[TokenStream]:
        check_is_fitted(self, "global_codebook_")
        frames = check_frames(X, self.width)
        return [
            decode_tokens(f, self.global_codebook_, self.private_codebook_, mid)
            for f, mid in zip(frames, _ids(len(frames), message_ids))
        ]

    def _repair(self, stream: TokenStream) -> TokenStream:
        if not self.repair or self.private_kg_ is None:
            return stream
        return repair_missing(
            stream, self.private_kg_, self.global_codebook_, self.private_codebook_, self.sensitivity_
        )

    def transform(self, X, message_ids=None) -> list[TokenStream]:
        return [self._repair(s) for s in self.decode(X, message_ids)]

    def interpret(self, received: TokenStream) -> DecodedMessage:
        check_is_fitted(self, "global_codebook_")
        repaired = self._repair(received)
        public, sensitive = stream_texts(
            repaired, self.global_codebook_, self.private_codebook_, self.private_kg_
        )
        entities: tuple[str, ...] = ()
        facts: tuple[InferredFact, ...] = ()
        if self.private_kg_ is not None:
            entities = disaggregate(repaired, self.private_kg_, self.private_codebook_).sensitive
            if entities:
                facts = infer_semantics(entities, self.private_kg_, self.depth)
        n = len(received)
        undecoded = len(received.erasures()) / n if n else 0.0
        return DecodedMessage(
            received, repaired, entities, frozenset(public), frozenset(sensitive), facts, undecoded
        )

    def predict(self, X, message_ids=None) -> list[DecodedMessage]:
        return [self.interpret(s) for s in self.decode(X, message_ids)]
