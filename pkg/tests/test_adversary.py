import pytest

from privsc.adversary import (
    A_BITS,
    B_GLOBAL,
    C_PERSONAL,
    EavesdropperProfile,
    LeakageReport,
    Recovery,
    TrialTruth,
    attack_bits,
    attack_global,
    attack_personal,
    ground_truth,
    run_attack,
    score_leakage,
)
from privsc.codec import BitFrame
from privsc.estimators import KnowledgeBase, SemanticEncoder
from privsc.knowledge import PrivateKnowledgeStore, SharedSecret

from conftest import alice_graph, make_graph
from test_codec import public_graph


def truth(public=(), sensitive=(), facts=()):
    return TrialTruth(frozenset(public), frozenset(sensitive), frozenset(facts))


# -- profiles ------------------------------------------------------------------


def test_profile_invariants():
    g = public_graph()
    p = make_graph([("a", "A", "x")], [], kind="personal")
    EavesdropperProfile(A_BITS)
    with pytest.raises(ValueError):
        EavesdropperProfile(A_BITS, global_kg=g)
    with pytest.raises(ValueError):
        EavesdropperProfile(B_GLOBAL)
    with pytest.raises(ValueError):
        EavesdropperProfile(B_GLOBAL, global_kg=g, personal=(p,))
    with pytest.raises(ValueError):
        EavesdropperProfile(C_PERSONAL, global_kg=g)
    with pytest.raises(ValueError):
        EavesdropperProfile(C_PERSONAL, global_kg=g, personal=(public_graph(),))
    with pytest.raises(ValueError):
        EavesdropperProfile(B_GLOBAL, global_kg=g, holds_shared_secret=True, key=SharedSecret.derive(0))
    with pytest.raises(ValueError):
        EavesdropperProfile(C_PERSONAL, global_kg=g, personal=(p,), holds_shared_secret=True)
    with pytest.raises(ValueError):
        EavesdropperProfile(C_PERSONAL, global_kg=g, personal=(p,), key=SharedSecret.derive(0))
    with pytest.raises(ValueError):
        EavesdropperProfile("D")


def test_report_range_checked():
    with pytest.raises(ValueError):
        LeakageReport(public_entity_recovery_rate=1.5)
    assert LeakageReport(frames_observed=7).frames_observed == 7


# -- scoring ----------------------------------------------------------------------


def test_score_examples():
    t = truth({"e1", "e2"}, {"s"}, {("a", "r", "b")})
    r = score_leakage(t, Recovery(frozenset({"e1", "e3"})))
    assert r.public_entity_recovery_rate == 0.5 and r.sensitive_entity_recovery_rate == 0.0
    full = score_leakage(t, Recovery(frozenset({"e1", "e2", "s"}), frozenset({("a", "r", "b")})))
    assert (full.public_entity_recovery_rate, full.sensitive_entity_recovery_rate, full.inferred_triple_f1) == (1.0, 1.0, 1.0)
    empty = score_leakage(t, Recovery())
    assert empty == LeakageReport(frames_observed=1)


def test_score_f1():
    t = truth(facts={(str(i), "r", "x") for i in range(4)})
    r = score_leakage(t, Recovery(facts=frozenset({("0", "r", "x"), ("9", "r", "x")})))
    assert r.inferred_triple_precision == 0.5 and r.inferred_triple_recall == 0.25
    assert r.inferred_triple_f1 == pytest.approx(2 * 0.5 * 0.25 / 0.75)


def test_empty_truth_scores_zero():
    r = score_leakage(truth(), Recovery(frozenset({"x"})))
    assert r.public_entity_recovery_rate == 0.0 and r.entity_recovery_rate == 0.0


# -- attacks ------------------------------------------------------------------------


@pytest.fixture
def sent():
    key = SharedSecret.derive("adv")
    kb = KnowledgeBase(public_graph(), alice_graph(), key)
    enc = SemanticEncoder(sensitive_categories=("credential",), hops=2).fit(kb)
    stream = enc.align(enc.tokenize("Alice logs into Google")) [0]
    frame = enc.encode([stream])[0]
    t = ground_truth(stream, enc.global_codebook_, enc.private_codebook_, alice_graph(), 2)
    return kb, enc, stream, frame, t


def test_bits_attacker(sent):
    *_, frame, _ = sent
    prof = EavesdropperProfile(A_BITS)
    r = attack_bits([frame] * 10, prof)
    assert r.frames_observed == 10 and r.public_entity_recovery_rate == 0.0 and r.undecoded_chunk_fraction == 1.0
    assert attack_bits(None, prof) == LeakageReport()
    assert attack_bits(frame, prof).frames_observed == 1


def test_global_attacker(sent):
    kb, enc, stream, frame, t = sent
    prof = EavesdropperProfile(B_GLOBAL, global_kg=kb.global_kg, sensitive_categories=("credential",), hops=2)
    rep, rec = run_attack(prof, frame, t)
    assert rep.public_entity_recovery_rate == 1.0
    assert rep.sensitive_entity_recovery_rate == 0.0
    assert rep.undecoded_chunk_fraction == 0.25


def test_global_attacker_all_private_frame():
    key = SharedSecret.derive("adv")
    kb = KnowledgeBase(public_graph(), alice_graph(), key)
    enc = SemanticEncoder(sensitive_categories=("credential",), hops=2).fit(kb)
    stream = enc.tokenize("Alice password")[0]
    t = ground_truth(stream, enc.global_codebook_, enc.private_codebook_, alice_graph(), 2)
    rep, _ = run_attack(EavesdropperProfile(B_GLOBAL, global_kg=kb.global_kg), enc.encode([stream])[0], t)
    assert rep.public_entity_recovery_rate == 0.0 and rep.undecoded_chunk_fraction == 1.0


def test_personal_attacker_with_and_without_secret(sent):
    kb, enc, stream, frame, t = sent
    fused_alice = alice_graph(kind="personal")
    store = PrivateKnowledgeStore(kb.key)
    store.put("s", kb.private_kg)
    common = dict(global_kg=kb.global_kg, personal=(fused_alice,), sensitive_categories=("credential",), hops=2)
    blind = attack_personal(frame, EavesdropperProfile(C_PERSONAL, **common), store, "s")
    assert blind.access_denied
    assert score_leakage(t, blind).sensitive_entity_recovery_rate == 0.0
    bound = attack_personal(
        frame, EavesdropperProfile(C_PERSONAL, holds_shared_secret=True, key=kb.key, **common), store, "s"
    )
    assert not bound.access_denied
    assert score_leakage(t, bound).sensitive_entity_recovery_rate == 1.0


def test_bound_case_needs_store(sent):
    kb, *_ = sent
    frame = sent[3]
    prof = EavesdropperProfile(
        C_PERSONAL, global_kg=kb.global_kg, personal=(alice_graph(kind="personal"),), holds_shared_secret=True, key=kb.key
    )
    with pytest.raises(ValueError):
        attack_personal(frame, prof)


def test_wrong_profile_class(sent):
    with pytest.raises(ValueError):
        attack_global(sent[3], EavesdropperProfile(A_BITS))


def test_missing_tap_gives_empty_report(sent):
    kb, *_ = sent
    rep, rec = run_attack(EavesdropperProfile(B_GLOBAL, global_kg=kb.global_kg), None, sent[4])
    assert rep == LeakageReport() and rec is None
