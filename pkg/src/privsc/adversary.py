"""Eavesdroppers and leakage scoring.

Three attacker classes read the tapped frame:

``A_bits``
    Holds no codebook. Counts frames and bits, nothing else.
``B_global``
    Rebuilds the public codebook from global knowledge and decodes what it
    can. Private codewords stay undecoded.
``C_personal``
    Also holds one or both personal graphs. Without the shared secret it
    fuses what it has, guesses a private graph from the public words it
    decoded and runs inference there. Its attempt to query the private
    knowledge store is refused. With the secret (the bound case) it passes
    the store's check and mirrors the legitimate receiver exactly.

Recovery is scored on normalized entity text: the public and sensitive
rates are the shares of the trial's true public and sensitive texts that an
attacker recovered, in any provenance. Inferred facts are compared as
(subject text, relation, object text) triples.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Sequence

from .codebook import DEFAULT_WIDTH, Codebook
from .codec import DEFAULT_DEPTH, DEFAULT_HOPS, BitFrame, InferredFact, TokenStream, infer_semantics, stream_texts
from .estimators import DEFAULT_SENSITIVE_CATEGORIES, KnowledgeBase, SemanticDecoder
from .exceptions import AccessDenied, DisconnectedTerminals, NoEntitiesMatched
from .kg import DEFAULT_MIN_VISITS, DEFAULT_WALK_LENGTH, DEFAULT_WALKS_PER_SEED, KnowledgeGraph
from .knowledge import (
    DEFAULT_THETA,
    PrivateKnowledgeStore,
    SharedSecret,
    analyze_message,
    construct_private_knowledge,
    fuse,
    issue_credential,
)
from .text import phrase_key

A_BITS = "A_bits"
B_GLOBAL = "B_global"
C_PERSONAL = "C_personal"
ATTACKER_CLASSES = (A_BITS, B_GLOBAL, C_PERSONAL)


@dataclass(frozen=True)
class EavesdropperProfile:
    """What one attacker holds, plus the pipeline settings it decodes with."""

    attacker_class: str
    global_kg: KnowledgeGraph | None = None
    personal: tuple[KnowledgeGraph, ...] = ()
    holds_shared_secret: bool = False
    key: SharedSecret | None = field(default=None, repr=False)
    width: int = DEFAULT_WIDTH
    depth: int = DEFAULT_DEPTH
    repair: bool = True
    theta: float = DEFAULT_THETA
    sensitive_categories: tuple[str, ...] = DEFAULT_SENSITIVE_CATEGORIES
    hops: int = DEFAULT_HOPS
    walks_per_seed: int = DEFAULT_WALKS_PER_SEED
    walk_length: int = DEFAULT_WALK_LENGTH
    min_visits: int = DEFAULT_MIN_VISITS
    rng_seed: int = 0
    fused: KnowledgeGraph | None = field(default=None, repr=False)  # own fusion, if precomputed

    def __post_init__(self):
        object.__setattr__(self, "personal", tuple(self.personal))
        cls = self.attacker_class
        if cls not in ATTACKER_CLASSES:
            raise ValueError(f"unknown attacker class {cls!r}")
        if cls == A_BITS and (self.global_kg is not None or self.personal):
            raise ValueError("a bits-only attacker holds no knowledge")
        if cls in (B_GLOBAL, C_PERSONAL) and self.global_kg is None:
            raise ValueError(f"{cls} needs global knowledge")
        if cls == B_GLOBAL and self.personal:
            raise ValueError("a global-knowledge attacker holds no personal knowledge")
        if cls == C_PERSONAL and not 1 <= len(self.personal) <= 2:
            raise ValueError("a personal-knowledge attacker holds one or two personal graphs")
        for g in self.personal:
            if g.kind != "personal":
                raise ValueError("held personal knowledge must be of kind 'personal'")
        if self.fused is not None and (cls != C_PERSONAL or self.fused.kind != "fused"):
            raise ValueError("a precomputed fusion must be a fused graph held by a personal-knowledge attacker")
        if self.holds_shared_secret:
            if cls != C_PERSONAL:
                raise ValueError("only the personal-knowledge bound case may hold the secret")
            if self.key is None:
                raise ValueError("holds_shared_secret needs the key itself")
        elif self.key is not None:
            raise ValueError("key given but holds_shared_secret is False")


@dataclass(frozen=True)
class LeakageReport:
    public_entity_recovery_rate: float = 0.0
    sensitive_entity_recovery_rate: float = 0.0
    inferred_triple_precision: float = 0.0
    inferred_triple_recall: float = 0.0
    inferred_triple_f1: float = 0.0
    frames_observed: int = 0
    undecoded_chunk_fraction: float = 0.0
    entity_recovery_rate: float = 0.0  # public and sensitive texts pooled

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name != "frames_observed" and not 0.0 <= v <= 1.0:
                raise ValueError(f"{f.name}={v} outside [0, 1]")

    def as_dict(self) -> dict:
        return asdict(self)


FactKey = tuple[str, str, str]


@dataclass(frozen=True)
class TrialTruth:
    public_texts: frozenset
    sensitive_texts: frozenset
    facts: frozenset


@dataclass(frozen=True)
class Recovery:
    """What one party extracted from one frame."""

    texts: frozenset = frozenset()
    facts: frozenset = frozenset()
    undecoded_fraction: float = 0.0
    frames_observed: int = 1
    stream: TokenStream | None = None
    access_denied: bool = False


def _text(g: KnowledgeGraph, entity_id: str) -> str:
    return " ".join(phrase_key(g.entity(entity_id).name))


def fact_keys(facts: Iterable[InferredFact], g: KnowledgeGraph) -> frozenset:
    return frozenset((_text(g, f.subject), f.relation, _text(g, f.object)) for f in facts)


def ground_truth(
    sent: TokenStream,
    global_cb: Codebook,
    private_cb: Codebook,
    private_kg: KnowledgeGraph,
    depth: int = DEFAULT_DEPTH,
) -> TrialTruth:
    """Truth sets for one trial, read off the stream the transmitter sent."""
    public, sensitive = stream_texts(sent, global_cb, private_cb, private_kg)
    entities = []
    for tok in sent:
        if tok.provenance == "private":
            sym = private_cb.symbol(tok.id)
            if sym.startswith("e:"):
                entities.append(sym[2:])
    facts = infer_semantics(entities, private_kg, depth) if entities else ()
    return TrialTruth(frozenset(public), frozenset(sensitive), fact_keys(facts, private_kg))


def _rate(found: frozenset, truth: frozenset) -> float:
    return len(found & truth) / len(truth) if truth else 0.0


def score_leakage(truth: TrialTruth, recovered: Recovery) -> LeakageReport:
    """Recovery rates against the trial truth; an empty truth set scores 0."""
    hit = recovered.facts & truth.facts
    precision = len(hit) / len(recovered.facts) if recovered.facts else 0.0
    recall = len(hit) / len(truth.facts) if truth.facts else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return LeakageReport(
        public_entity_recovery_rate=_rate(recovered.texts, truth.public_texts),
        sensitive_entity_recovery_rate=_rate(recovered.texts, truth.sensitive_texts),
        inferred_triple_precision=precision,
        inferred_triple_recall=recall,
        inferred_triple_f1=f1,
        frames_observed=recovered.frames_observed,
        undecoded_chunk_fraction=recovered.undecoded_fraction,
        entity_recovery_rate=_rate(recovered.texts, truth.public_texts | truth.sensitive_texts),
    )


# -- attackers -----------------------------------------------------------


def _require(profile: EavesdropperProfile, cls: str):
    if profile.attacker_class != cls:
        raise ValueError(f"expected a {cls} profile, got {profile.attacker_class}")


def attack_bits(tapped: BitFrame | Sequence[BitFrame] | None, profile: EavesdropperProfile) -> LeakageReport:
    """Bits-only eavesdropping: frames are counted, nothing is understood."""
    _require(profile, A_BITS)
    if tapped is None:
        frames = []
    elif isinstance(tapped, BitFrame):
        frames = [tapped]
    else:
        frames = list(tapped)
    chunks = sum(f.n_codewords for f in frames)
    return LeakageReport(frames_observed=len(frames), undecoded_chunk_fraction=1.0 if chunks else 0.0)


def _decoder(profile: EavesdropperProfile) -> SemanticDecoder:
    return SemanticDecoder(
        width=profile.width,
        depth=profile.depth,
        repair=profile.repair,
        sensitive_categories=tuple(profile.sensitive_categories),
        hops=profile.hops,
    )


def attack_global(tapped: BitFrame, profile: EavesdropperProfile) -> Recovery:
    """Decode against the public codebook only."""
    _require(profile, B_GLOBAL)
    dec = _decoder(profile).fit(KnowledgeBase(profile.global_kg))
    msg = dec.predict([tapped])[0]
    return Recovery(msg.texts, frozenset(), msg.undecoded_fraction, 1, msg.repaired)


def _own_fusion(profile: EavesdropperProfile) -> KnowledgeGraph:
    if profile.fused is not None:
        return profile.fused
    if len(profile.personal) == 2:
        return fuse(profile.personal[0], profile.personal[1], b"eavesdropper", profile.theta)
    return profile.personal[0].copy(kind="fused")


def _guess_facts(profile: EavesdropperProfile, public_texts: Iterable[str]) -> frozenset:
    """Inference over the attacker's own fused graph, seeded by decoded public words."""
    fused = _own_fusion(profile)
    text = " . ".join(sorted(public_texts))
    if not analyze_message(text, fused):
        return frozenset()
    try:
        guess = construct_private_knowledge(
            fused, text, profile.walks_per_seed, profile.walk_length, profile.min_visits, profile.rng_seed
        )
        graph = guess
    except (NoEntitiesMatched, DisconnectedTerminals):
        graph = fused
    seeds = analyze_message(text, fused) & set(graph.entity_ids)
    return fact_keys(infer_semantics(seeds, graph, profile.depth), graph)


def attack_personal(
    tapped: BitFrame,
    profile: EavesdropperProfile,
    store: PrivateKnowledgeStore | None = None,
    session_id: str | None = None,
) -> Recovery:
    """Personal-knowledge eavesdropping, with or without the shared secret."""
    _require(profile, C_PERSONAL)
    if profile.holds_shared_secret:
        if store is None:
            raise ValueError("the bound case needs the private knowledge store")
        cred = issue_credential("eavesdropper", profile.key)
        private = store.query(session_id, cred)
        dec = _decoder(profile).fit(KnowledgeBase(profile.global_kg, private, profile.key))
        msg = dec.predict([tapped])[0]
        return Recovery(msg.texts, fact_keys(msg.facts, private), msg.undecoded_fraction, 1, msg.repaired)

    denied = False
    if store is not None:
        try:
            store.query(session_id, issue_credential("eavesdropper", SharedSecret.derive("guess", profile.rng_seed)))
        except AccessDenied:
            denied = True
    dec = _decoder(profile).fit(KnowledgeBase(profile.global_kg))
    msg = dec.predict([tapped])[0]
    facts = _guess_facts(profile, msg.public_texts)
    return Recovery(msg.texts, facts, msg.undecoded_fraction, 1, msg.repaired, access_denied=denied)


def run_attack(
    profile: EavesdropperProfile,
    tapped: BitFrame | None,
    truth: TrialTruth,
    store: PrivateKnowledgeStore | None = None,
    session_id: str | None = None,
) -> tuple[LeakageReport, Recovery | None]:
    """Run whichever attack ``profile`` describes and score it."""
    if profile.attacker_class == A_BITS:
        return attack_bits(tapped, profile), None
    if tapped is None:
        return LeakageReport(), None
    if profile.attacker_class == B_GLOBAL:
        rec = attack_global(tapped, profile)
    else:
        rec = attack_personal(tapped, profile, store, session_id)
    return score_leakage(truth, rec), rec
