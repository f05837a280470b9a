"""Scenario files, end-to-end trials and batch reporting.

A scenario is a flat ``section.key = value`` text file naming the knowledge
files, the corpus and every free parameter. ``run_trial`` pushes one corpus
message through the whole pipeline and records everything observable in a
:class:`TrialTranscript`; ``run_batch`` does that for every message (and
every swept channel probability) and writes transcripts plus CSV summaries.

Per-trial randomness (walks and channel flips) is derived from the master
seed and the message index only, so a sweep over ``p`` reuses the same walks
and the same uniforms, and flipped positions are nested across ``p``.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .adversary import (
    A_BITS,
    B_GLOBAL,
    C_PERSONAL,
    EavesdropperProfile,
    LeakageReport,
    Recovery,
    TrialTruth,
    fact_keys,
    ground_truth,
    run_attack,
    score_leakage,
)
from .channel import ChannelConfig, transmit
from .codec import DEFAULT_DEPTH, DEFAULT_HOPS, DEFAULT_TAU, BitFrame, TokenStream
from .codebook import DEFAULT_WIDTH, symbol_text
from .estimators import KnowledgeBase, SemanticDecoder, SemanticEncoder
from .exceptions import ParseError, PrivscError, ValidationError
from .kg import DEFAULT_MIN_VISITS, DEFAULT_WALK_LENGTH, DEFAULT_WALKS_PER_SEED, KnowledgeGraph
from .kgio import format_entities, format_triples, read_graph
from .knowledge import (
    DEFAULT_THETA,
    PrivateKnowledgeStore,
    SharedSecret,
    analyze_message,
    construct_private_knowledge,
    fuse,
    issue_credential,
)

log = logging.getLogger(__name__)

C_BOUND = "C_bound"  # class C holding the shared secret
ATTACKERS = (A_BITS, B_GLOBAL, C_PERSONAL, C_BOUND)
RECEIVER = "receiver"
RECEIVER_ON_TAP = "receiver@tap"
C_KNOWLEDGE = ("both", "tx", "rx")

LEAKAGE_COLUMNS = (
    "trial_id",
    "attacker_class",
    "p",
    "public_rate",
    "sensitive_rate",
    "f1",
    "undecoded_fraction",
    "seed",
)
SUMMARY_COLUMNS = (
    "p",
    "attacker_class",
    "n_trials",
    "public_rate",
    "sensitive_rate",
    "f1",
    "undecoded_fraction",
)


# -- scenario ------------------------------------------------------------


@dataclass(frozen=True)
class ScenarioConfig:
    global_entities: Path
    global_triples: Path
    tx_entities: Path
    tx_triples: Path
    rx_entities: Path
    rx_triples: Path
    corpus: Path
    p: float = 0.0
    channel_seed: int = 0
    tap: bool = True
    tap_p: float | None = None
    walks_per_seed: int = DEFAULT_WALKS_PER_SEED
    walk_length: int = DEFAULT_WALK_LENGTH
    min_visits: int = DEFAULT_MIN_VISITS
    theta: float = DEFAULT_THETA
    tau: float = DEFAULT_TAU
    sensitive_categories: tuple[str, ...] = ("credential",)
    hops: int = DEFAULT_HOPS
    depth: int = DEFAULT_DEPTH
    width: int = DEFAULT_WIDTH
    seed: int = 0
    repair: bool = True
    attackers: tuple[str, ...] = ATTACKERS
    c_knowledge: str = "both"
    digest: str = field(default="", compare=False)  # sha256 of the scenario bytes

    def replace(self, **changes) -> ScenarioConfig:
        return dataclasses.replace(self, **changes)

    @property
    def channel(self) -> ChannelConfig:
        return ChannelConfig(self.p, self.channel_seed, self.tap, self.tap_p)


def _parse_bool(text: str) -> bool:
    t = text.lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_list(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _parse_optional_float(text: str) -> float | None:
    return None if text.lower() in ("", "none", "same") else float(text)


# key -> (field, parser); paths are resolved separately
_PATH_KEYS = {
    "global.entities": "global_entities",
    "global.triples": "global_triples",
    "tx.entities": "tx_entities",
    "tx.triples": "tx_triples",
    "rx.entities": "rx_entities",
    "rx.triples": "rx_triples",
    "corpus.path": "corpus",
}
_VALUE_KEYS: dict[str, tuple[str, Callable[[str], object]]] = {
    "channel.p": ("p", float),
    "channel.seed": ("channel_seed", int),
    "channel.tap": ("tap", _parse_bool),
    "channel.tap_p": ("tap_p", _parse_optional_float),
    "walk.k": ("walks_per_seed", int),
    "walk.length": ("walk_length", int),
    "walk.min_visits": ("min_visits", int),
    "fusion.theta": ("theta", float),
    "align.tau": ("tau", float),
    "sensitivity.categories": ("sensitive_categories", _parse_list),
    "sensitivity.hops": ("hops", int),
    "inference.depth": ("depth", int),
    "codec.width": ("width", int),
    "run.seed": ("seed", int),
    "repair.enabled": ("repair", _parse_bool),
    "attack.classes": ("attackers", _parse_list),
    "attack.c_knowledge": ("c_knowledge", str),
}
SCENARIO_KEYS = tuple(_PATH_KEYS) + tuple(_VALUE_KEYS)
_KEY_OF_FIELD = {f: k for k, f in _PATH_KEYS.items()} | {f: k for k, (f, _) in _VALUE_KEYS.items()}


def parse_scenario(text: str, base_dir: Path | str = ".", digest: str = "") -> ScenarioConfig:
    """Parse scenario text; relative paths resolve against ``base_dir``."""
    base_dir = Path(base_dir)
    values: dict[str, object] = {}
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ParseError(f"expected 'section.key = value', got {raw!r}", lineno)
        if "." not in key or " " in key:
            raise ParseError(f"malformed key {key!r}", lineno)
        if key in seen:
            raise ParseError(f"duplicate key {key!r}", lineno)
        seen.add(key)
        if key in _PATH_KEYS:
            if not value:
                raise ValidationError(key, "empty path")
            path = Path(value)
            values[_PATH_KEYS[key]] = path if path.is_absolute() else base_dir / path
        elif key in _VALUE_KEYS:
            name, conv = _VALUE_KEYS[key]
            try:
                values[name] = conv(value)
            except ValueError as exc:
                raise ValidationError(key, str(exc)) from None
        else:
            raise ValidationError(key, "unknown key")
    for key, name in _PATH_KEYS.items():
        if name not in values:
            raise ValidationError(key, "required key missing")
    cfg = ScenarioConfig(**values, digest=digest)
    validate_scenario(cfg)
    return cfg


def validate_scenario(cfg: ScenarioConfig, check_files: bool = True) -> ScenarioConfig:
    def bad(name, msg):
        raise ValidationError(_KEY_OF_FIELD[name], msg)

    for name in ("p", "theta", "tau"):
        v = getattr(cfg, name)
        if not 0.0 <= v <= 1.0:
            bad(name, f"{v} outside [0, 1]")
    if cfg.tap_p is not None and not 0.0 <= cfg.tap_p <= 1.0:
        bad("tap_p", f"{cfg.tap_p} outside [0, 1]")
    for name in ("walks_per_seed", "walk_length", "min_visits", "hops", "depth", "width"):
        if getattr(cfg, name) < 1:
            bad(name, "must be >= 1")
    for name in ("seed", "channel_seed"):
        if getattr(cfg, name) < 0:
            bad(name, "must be >= 0")
    if not cfg.sensitive_categories:
        bad("sensitive_categories", "at least one category is needed")
    unknown = [a for a in cfg.attackers if a not in ATTACKERS]
    if unknown:
        bad("attackers", f"unknown attacker class {unknown[0]!r}")
    if cfg.c_knowledge not in C_KNOWLEDGE:
        bad("c_knowledge", f"expected one of {C_KNOWLEDGE}")
    if check_files:
        for key, name in _PATH_KEYS.items():
            if not getattr(cfg, name).is_file():
                raise ValidationError(key, f"no such file: {getattr(cfg, name)}")
    return cfg


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    data = path.read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not UTF-8: {exc}", 1) from None
    return parse_scenario(text, path.parent, hashlib.sha256(data).hexdigest())


def read_corpus(path) -> list[str]:
    """One message per line; blank lines are skipped."""
    text = Path(path).read_text(encoding="utf-8")
    return [line.strip() for line in text.splitlines() if line.strip()]


# -- knowledge -----------------------------------------------------------


def _u64(*parts) -> int:
    h = hashlib.sha256("/".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(h[:8], "big")


class Scenario:
    """A loaded scenario: knowledge graphs, corpus, fused graph and session key.

    The key and PSI salt are derived from the scenario bytes and master seed;
    neither is ever written out.
    """

    def __init__(self, cfg: ScenarioConfig):
        self.cfg = cfg
        self.global_kg = read_graph(cfg.global_entities, cfg.global_triples, kind="global")
        self.tx_kg = read_graph(cfg.tx_entities, cfg.tx_triples, kind="personal")
        self.rx_kg = read_graph(cfg.rx_entities, cfg.rx_triples, kind="personal")
        self.messages = read_corpus(cfg.corpus)
        self.key = SharedSecret.derive("session-key", cfg.digest, cfg.seed)
        self._salt = hashlib.sha256(f"psi-salt/{cfg.digest}/{cfg.seed}".encode()).digest()
        self._fused: KnowledgeGraph | None = None
        self._attacker_fused: KnowledgeGraph | None = None

    @property
    def fused(self) -> KnowledgeGraph:
        if self._fused is None:
            self._fused = fuse(self.tx_kg, self.rx_kg, self._salt, self.cfg.theta)
        return self._fused

    @property
    def attacker_fused(self) -> KnowledgeGraph:
        """Class C's own fusion of the personal graphs it holds (own salt)."""
        if self._attacker_fused is None:
            held = self.held_personal()
            if len(held) == 2:
                self._attacker_fused = fuse(held[0], held[1], b"eavesdropper", self.cfg.theta)
            else:
                self._attacker_fused = held[0].copy(kind="fused")
        return self._attacker_fused

    def with_config(self, cfg: ScenarioConfig) -> Scenario:
        """Same loaded knowledge under different run parameters (e.g. another ``p``)."""
        other = object.__new__(Scenario)
        other.__dict__.update(self.__dict__)
        other.cfg = cfg
        if cfg.theta != self.cfg.theta:
            other._fused = None
        if (cfg.theta, cfg.c_knowledge) != (self.cfg.theta, self.cfg.c_knowledge):
            other._attacker_fused = None
        return other

    def message_id(self, index: int) -> str:
        return f"m{index:03d}"

    def trial_seed(self, index: int) -> int:
        return _u64("walk", self.cfg.seed, index)

    def channel_seed(self, index: int) -> int:
        return _u64("channel", self.cfg.seed, self.cfg.channel_seed, index)

    def held_personal(self) -> tuple[KnowledgeGraph, ...]:
        return {"both": (self.tx_kg, self.rx_kg), "tx": (self.tx_kg,), "rx": (self.rx_kg,)}[self.cfg.c_knowledge]


# -- trials --------------------------------------------------------------


@dataclass
class TrialTranscript:
    message_id: str
    index: int
    message: str
    p: float
    seed: int
    channel_seed: int
    run_seed: int = 0
    scenario_digest: str = ""
    terminals: tuple[str, ...] = ()
    private_snapshot: str = ""
    sensitive: tuple[str, ...] = ()
    sensitive_hidden: bool = False
    tokens_pre: TokenStream | None = None
    tokens_post: TokenStream | None = None
    frame_sent: BitFrame | None = None
    frame_received: BitFrame | None = None
    frame_tapped: BitFrame | None = None
    tokens_received: TokenStream | None = None
    tokens_repaired: TokenStream | None = None
    truth: TrialTruth | None = None
    reports: dict[str, LeakageReport] = field(default_factory=dict)
    access_denied: dict[str, bool] = field(default_factory=dict)
    error: str | None = None
    unexpected: bool = False

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_text(self) -> str:
        def toks(s):
            return "-" if s is None else (s.to_text() or "(empty)")

        def bits(f):
            return "-" if f is None else (f.to_string() or "(empty)")

        def texts(xs):
            return " | ".join(sorted(xs)) if xs else "-"

        lines = [
            f"message_id: {self.message_id}",
            f"index: {self.index}",
            f"message: {self.message}",
            f"scenario: {self.scenario_digest or '-'}",
            f"run_seed: {self.run_seed}",
            f"p: {self.p!r}",
            f"seed: {self.seed}",
            f"channel_seed: {self.channel_seed}",
            f"error: {self.error or '-'}",
            f"terminals: {' '.join(self.terminals) or '-'}",
            f"private_snapshot: {self.private_snapshot or '-'}",
            f"sensitive: {' '.join(self.sensitive) or '-'}",
            f"sensitive_hidden: {str(self.sensitive_hidden).lower()}",
            f"tokens.pre: {toks(self.tokens_pre)}",
            f"tokens.post: {toks(self.tokens_post)}",
            f"frame.sent: {bits(self.frame_sent)}",
            f"frame.received: {bits(self.frame_received)}",
            f"frame.tapped: {bits(self.frame_tapped)}",
            f"tokens.received: {toks(self.tokens_received)}",
            f"tokens.repaired: {toks(self.tokens_repaired)}",
        ]
        if self.truth is not None:
            lines += [
                f"truth.public: {texts(self.truth.public_texts)}",
                f"truth.sensitive: {texts(self.truth.sensitive_texts)}",
                f"truth.facts: {len(self.truth.facts)}",
            ]
        for name, r in self.reports.items():
            denied = self.access_denied.get(name)
            extra = "" if denied is None else f" access_denied={str(denied).lower()}"
            lines.append(
                f"report.{name}: public={r.public_entity_recovery_rate!r}"
                f" sensitive={r.sensitive_entity_recovery_rate!r}"
                f" precision={r.inferred_triple_precision!r}"
                f" recall={r.inferred_triple_recall!r}"
                f" f1={r.inferred_triple_f1!r}"
                f" frames={r.frames_observed}"
                f" undecoded={r.undecoded_chunk_fraction!r}{extra}"
            )
        return "\n".join(lines) + "\n"


def _snapshot_id(g: KnowledgeGraph) -> str:
    return hashlib.sha256((format_entities(g) + "\0" + format_triples(g)).encode()).hexdigest()[:16]


def _profile(scn: Scenario, name: str, seed: int) -> EavesdropperProfile:
    cfg = scn.cfg
    if name == A_BITS:
        return EavesdropperProfile(A_BITS, width=cfg.width)
    common = dict(
        global_kg=scn.global_kg,
        width=cfg.width,
        depth=cfg.depth,
        repair=cfg.repair,
        theta=cfg.theta,
        sensitive_categories=tuple(cfg.sensitive_categories),
        hops=cfg.hops,
        walks_per_seed=cfg.walks_per_seed,
        walk_length=cfg.walk_length,
        min_visits=cfg.min_visits,
        rng_seed=seed,
    )
    if name == B_GLOBAL:
        return EavesdropperProfile(B_GLOBAL, **common)
    if name == C_PERSONAL:
        return EavesdropperProfile(C_PERSONAL, personal=scn.held_personal(), fused=scn.attacker_fused, **common)
    return EavesdropperProfile(
        C_PERSONAL, personal=(scn.tx_kg, scn.rx_kg), holds_shared_secret=True, key=scn.key, **common
    )


def _as_scenario(cfg_or_scn) -> Scenario:
    return cfg_or_scn if isinstance(cfg_or_scn, Scenario) else Scenario(cfg_or_scn)


def _decoder(cfg: ScenarioConfig, repair: bool | None = None) -> SemanticDecoder:
    return SemanticDecoder(
        width=cfg.width,
        depth=cfg.depth,
        repair=cfg.repair if repair is None else repair,
        sensitive_categories=tuple(cfg.sensitive_categories),
        hops=cfg.hops,
    )


def run_trial(cfg: ScenarioConfig | Scenario, index: int, message: str | None = None) -> TrialTranscript:
    """Run corpus message ``index`` end to end; failures land in ``error``.

    ``message`` overrides the corpus text (the index still picks the seeds).
    """
    scn = _as_scenario(cfg)
    cfg = scn.cfg
    if message is None:
        message = scn.messages[index]
    tr = TrialTranscript(
        scn.message_id(index), index, message, cfg.p, scn.trial_seed(index), scn.channel_seed(index),
        run_seed=cfg.seed, scenario_digest=cfg.digest[:16],
    )
    try:
        _run_pipeline(scn, tr)
    except PrivscError as exc:
        tr.error = f"{type(exc).__name__}: {exc}"
    except Exception as exc:  # noqa: BLE001 - recorded, the batch goes on
        log.exception("trial %s failed unexpectedly", tr.message_id)
        tr.error = f"unexpected {type(exc).__name__}: {exc}"
        tr.unexpected = True
    return tr


def session_knowledge(scn: Scenario, index: int, message: str | None = None) -> KnowledgeGraph:
    """The private graph both ends derive for message ``index``."""
    cfg = scn.cfg
    if message is None:
        message = scn.messages[index]
    return construct_private_knowledge(
        scn.fused, message, cfg.walks_per_seed, cfg.walk_length, cfg.min_visits, scn.trial_seed(index)
    )


def make_encoder(scn: Scenario, private: KnowledgeGraph) -> SemanticEncoder:
    cfg = scn.cfg
    return SemanticEncoder(
        width=cfg.width, tau=cfg.tau, sensitive_categories=tuple(cfg.sensitive_categories), hops=cfg.hops
    ).fit(KnowledgeBase(scn.global_kg, private, scn.key))


def make_decoder(scn: Scenario, private: KnowledgeGraph | None, repair: bool | None = None) -> SemanticDecoder:
    key = scn.key if private is not None else None
    return _decoder(scn.cfg, repair).fit(KnowledgeBase(scn.global_kg, private, key))


def _run_pipeline(scn: Scenario, tr: TrialTranscript) -> None:
    cfg = scn.cfg
    tr.terminals = tuple(sorted(analyze_message(tr.message, scn.fused)))
    private = session_knowledge(scn, tr.index, tr.message)
    tr.private_snapshot = _snapshot_id(private)

    session = f"{tr.message_id}/{tr.seed}"
    store = PrivateKnowledgeStore(scn.key)
    store.put(session, private)
    rx_private = store.query(session, issue_credential(RECEIVER, scn.key))

    enc = make_encoder(scn, private)
    tr.sensitive = tuple(sorted(enc.sensitivity_.flagged))
    tr.tokens_pre = enc.tokenize([tr.message], [tr.message_id])[0]
    tr.tokens_post = enc.align([tr.tokens_pre])[0]
    tr.frame_sent = enc.encode([tr.tokens_post])[0]

    channel = ChannelConfig(cfg.p, tr.channel_seed, cfg.tap, cfg.tap_p)
    tr.frame_received, tr.frame_tapped = transmit(tr.frame_sent, channel, frame_id=tr.index)

    dec = make_decoder(scn, rx_private)
    got = dec.predict([tr.frame_received], [tr.message_id])[0]
    tr.tokens_received, tr.tokens_repaired = got.received, got.repaired

    truth = ground_truth(tr.tokens_post, enc.global_codebook_, enc.private_codebook_, private, cfg.depth)
    tr.truth = truth
    public_vocab = {symbol_text(s) for s in enc.global_codebook_.symbols if s.startswith("e:")}
    tr.sensitive_hidden = not (truth.sensitive_texts & public_vocab)

    def recovery(msg) -> Recovery:
        return Recovery(msg.texts, fact_keys(msg.facts, rx_private), msg.undecoded_fraction, 1, msg.repaired)

    tr.reports[RECEIVER] = score_leakage(truth, recovery(got))
    if tr.frame_tapped is not None:
        on_tap = dec.predict([tr.frame_tapped], [tr.message_id])[0]
        tr.reports[RECEIVER_ON_TAP] = score_leakage(truth, recovery(on_tap))

    for name in cfg.attackers:
        report, rec = run_attack(_profile(scn, name, tr.seed), tr.frame_tapped, truth, store, session)
        tr.reports[name] = report
        if name in (C_PERSONAL, C_BOUND) and rec is not None:
            tr.access_denied[name] = rec.access_denied


# -- batches -------------------------------------------------------------


def _p_label(p: float) -> str:
    return repr(float(p))


def transcript_name(message_id: str, p: float | None = None) -> str:
    return f"{message_id}.txt" if p is None else f"{message_id}_p{_p_label(p)}.txt"


def leakage_rows(transcripts: Iterable[TrialTranscript]) -> list[dict]:
    rows = []
    for tr in transcripts:
        for name, r in tr.reports.items():
            if name == RECEIVER_ON_TAP:
                continue
            rows.append(
                {
                    "trial_id": tr.message_id,
                    "attacker_class": name,
                    "p": _p_label(tr.p),
                    "public_rate": repr(r.public_entity_recovery_rate),
                    "sensitive_rate": repr(r.sensitive_entity_recovery_rate),
                    "f1": repr(r.inferred_triple_f1),
                    "undecoded_fraction": repr(r.undecoded_chunk_fraction),
                    "seed": str(tr.seed),
                }
            )
    return rows


def summarize(rows: Iterable[dict]) -> list[dict]:
    """Per-(p, party) means of the leakage rows."""
    groups: dict[tuple[str, str], list[dict]] = defaultdict(list)
    for row in rows:
        groups[(row["p"], row["attacker_class"])].append(row)
    out = []
    for (p, name), grp in sorted(groups.items(), key=lambda kv: (float(kv[0][0]), kv[0][1])):
        n = len(grp)
        out.append(
            {
                "p": p,
                "attacker_class": name,
                "n_trials": str(n),
                **{c: repr(sum(float(r[c]) for r in grp) / n) for c in SUMMARY_COLUMNS[3:]},
            }
        )
    return out


def write_csv(path, columns: Sequence[str], rows: Iterable[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=list(columns), lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow(row)


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def run_trials(scn: Scenario, sweep: Sequence[float] | None = None) -> list[TrialTranscript]:
    """Every corpus message, once per swept ``p`` (or once at the configured ``p``)."""
    ps = [scn.cfg.p] if not sweep else list(sweep)
    out = []
    for p in ps:
        sub = scn.with_config(scn.cfg.replace(p=float(p)))
        validate_scenario(sub.cfg, check_files=False)
        out.extend(run_trial(sub, i) for i in range(len(scn.messages)))
    return out


def run_batch(
    cfg: ScenarioConfig | Scenario,
    out_dir,
    sweep: Sequence[float] | None = None,
    attackers_only: bool = False,
) -> int:
    """Run the whole corpus and write transcripts, ``leakage.csv`` and ``summary.csv``.

    Returns the exit code: 0, or 1 if any trial failed unexpectedly.
    """
    scn = _as_scenario(cfg)
    out = Path(out_dir)
    (out / "transcripts").mkdir(parents=True, exist_ok=True)
    transcripts = run_trials(scn, sweep)
    for tr in transcripts:
        name = transcript_name(tr.message_id, tr.p if sweep else None)
        (out / "transcripts" / name).write_text(tr.to_text(), encoding="utf-8")
    rows = leakage_rows(transcripts)
    if attackers_only:
        rows = [r for r in rows if r["attacker_class"] != RECEIVER]
    write_csv(out / "leakage.csv", LEAKAGE_COLUMNS, rows)
    write_csv(out / "summary.csv", SUMMARY_COLUMNS, summarize(rows))
    failed = [tr.message_id for tr in transcripts if tr.unexpected]
    if failed:
        log.error("%d trial(s) failed unexpectedly: %s", len(failed), ", ".join(failed))
        return 1
    return 0

