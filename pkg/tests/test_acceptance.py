"""The ten acceptance criteria, each at its stated tolerance and time budget.

A summary line per criterion is printed at the end of the pytest run.
"""

import random
import string
import subprocess
import sys
import time

import numpy as np
import pytest

from privsc import fixture_scenario_path
from privsc.adversary import A_BITS, B_GLOBAL, C_PERSONAL
from privsc.channel import ChannelConfig, transmit
from privsc.codec import BitFrame, infer_semantics
from privsc.harness import C_BOUND, RECEIVER, RECEIVER_ON_TAP, Scenario, load_scenario, run_batch, run_trial
from privsc.kg import KnowledgeGraph, connected_components
from privsc.knowledge import psi_exchange

from conftest import alice_graph, make_graph
from test_kg import check_steiner

BRIDGE_MESSAGES = (19, 23)


def sweep_trials(scn, p, seeds, **overrides):
    out = []
    for k in seeds:
        sub = scn.with_config(scn.cfg.replace(p=p, seed=k, **overrides))
        out.extend(run_trial(sub, i) for i in range(len(scn.messages)))
    return out


@pytest.fixture(scope="module")
def attack_trials(fixture_scenario):
    """100 seeds over the whole corpus at p=0.05, plus a few seeds at p=0 and p=0.1."""
    trials = sweep_trials(fixture_scenario, 0.05, range(100))
    trials += sweep_trials(fixture_scenario, 0.0, range(10))
    trials += sweep_trials(fixture_scenario, 0.1, range(10))
    assert all(t.ok for t in trials)
    return trials


@pytest.mark.criterion(1, "zero-noise fidelity on the fixture corpus")
def test_zero_noise_fidelity(fixture_cfg):
    start = time.perf_counter()
    scn = Scenario(fixture_cfg.replace(p=0.0))
    assert len(scn.messages) >= 20
    assert scn.fused.num_entities >= 50
    for i in range(len(scn.messages)):
        tr = run_trial(scn, i)
        assert tr.ok, tr.error
        r = tr.reports[RECEIVER]
        assert r.public_entity_recovery_rate == 1.0, tr.message
        assert r.sensitive_entity_recovery_rate == 1.0, tr.message
    assert time.perf_counter() - start < 5.0


@pytest.mark.criterion(2, "PSI equals set intersection and leaks no non-shared name")
def test_psi_oracle_equivalence():
    start = time.perf_counter()
    rng = random.Random(20240)
    # Uppercase names can never occur inside lowercase hex digests by accident.
    universe = ["".join(rng.choices(string.ascii_uppercase, k=8)) for _ in range(600)]
    for trial in range(1000):
        a = set(rng.sample(universe, rng.randint(0, 200)))
        b = set(rng.sample(universe, rng.randint(0, 200)))
        salt = rng.randbytes(16)
        got, transcript = psi_exchange(a, b, salt)
        assert got == a & b
        wire = transcript.serialize()
        for name in (a | b) - (a & b):
            assert name.encode() not in wire
    assert time.perf_counter() - start < 10.0


@pytest.mark.criterion(3, "Steiner output valid and within twice the optimum")
def test_steiner_validity_and_quality():
    start = time.perf_counter()
    rng = random.Random(7)
    checked = 0
    while checked < 500:
        n = rng.randint(1, 10)
        ids = [f"v{i}" for i in range(n)]
        density = rng.uniform(0.1, 0.7)
        edges = [(a, "r", b) for i, a in enumerate(ids) for b in ids[i + 1 :] if rng.random() < density]
        g = make_graph([(v, v, "other") for v in ids], edges)
        comp = sorted(max(connected_components(g), key=len))
        terminals = rng.sample(comp, rng.randint(1, len(comp)))
        nodes, _ = check_steiner(g, terminals)
        assert len(connected_components(g.induced_subgraph(nodes))) == 1
        checked += 1
    assert time.perf_counter() - start < 60.0


@pytest.mark.criterion(4, "channel flip rate at p=0.1 over a million bits")
def test_channel_calibration():
    start = time.perf_counter()
    f = BitFrame(np.zeros(1_000_000, dtype=np.uint8), 8)
    rx, tap = transmit(f, ChannelConfig(0.1, 12345))
    assert 0.097 <= rx.bits.mean() <= 0.103
    assert 0.097 <= tap.bits.mean() <= 0.103
    assert time.perf_counter() - start < 5.0


@pytest.mark.criterion(5, "global-knowledge attacker recovers no overlaid sensitive entity")
def test_class_b_sensitive_leakage(attack_trials):
    hidden = [t for t in attack_trials if t.sensitive_hidden]
    assert len({t.seed for t in hidden}) >= 100
    assert all(t.reports[B_GLOBAL].sensitive_entity_recovery_rate == 0.0 for t in hidden)
    # Public recovery is reported, not bounded; it is non-trivial on this fixture.
    assert max(t.reports[B_GLOBAL].public_entity_recovery_rate for t in hidden) > 0.0


@pytest.mark.criterion(6, "personal-knowledge attacker: zero without the secret, receiver-equal with it")
def test_class_c(attack_trials):
    for t in attack_trials:
        assert t.reports[C_PERSONAL].sensitive_entity_recovery_rate == 0.0
        assert t.reports[C_BOUND] == t.reports[RECEIVER_ON_TAP]
        if t.p == 0.0:
            assert t.reports[C_BOUND] == t.reports[RECEIVER]


@pytest.mark.criterion(7, "inference on the Alice account fixture")
def test_inference_fixture():
    g = alice_graph()
    facts = {(f.subject, f.relation, f.object, f.value) for f in infer_semantics(["alice"], g, 2)}
    assert facts == {
        ("google_account", "has_password", "password", "123456"),
        ("alice", "has_account", "google_account", "abcd@gmail"),
    }
    shallow = {(f.subject, f.relation) for f in infer_semantics(["alice"], g, 1)}
    assert shallow == {("alice", "has_account")}


@pytest.mark.criterion(8, "knowledge-based repair never hurts and helps on a bridge message")
def test_repair_benefit(fixture_scenario):
    n = len(fixture_scenario.messages)
    means = {}
    for repair in (True, False):
        trials = sweep_trials(fixture_scenario, 0.05, range(50), repair=repair, attackers=())
        rates = np.array([t.reports[RECEIVER].entity_recovery_rate for t in trials]).reshape(50, n)
        means[repair] = rates.mean(axis=0)
    diff = means[True] - means[False]
    assert (diff >= 0).all()
    assert any(diff[i] > 0 for i in BRIDGE_MESSAGES)


@pytest.mark.criterion(9, "transcripts replay byte-identically, also in a fresh process")
def test_replay_determinism(fixture_cfg, tmp_path):
    cfg = fixture_cfg.replace(p=0.05, seed=99)
    assert run_batch(Scenario(cfg), tmp_path / "a") == 0
    assert run_batch(Scenario(load_scenario(fixture_scenario_path()).replace(p=0.05, seed=99)), tmp_path / "b") == 0
    r = subprocess.run(
        [sys.executable, "-m", "privsc", "run", "--scenario", str(fixture_scenario_path()), "--seed", "99",
         "--out", str(tmp_path / "c"), "--sweep", "channel.p=0.05"],
        capture_output=True,
        text=True,
    )
    assert r.returncode == 0, r.stderr
    names = sorted(p.name for p in (tmp_path / "a" / "transcripts").iterdir())
    assert len(names) == 24
    for name in names:
        a = (tmp_path / "a" / "transcripts" / name).read_bytes()
        assert a == (tmp_path / "b" / "transcripts" / name).read_bytes()
        sweep_name = name.replace(".txt", "_p0.05.txt")
        assert a == (tmp_path / "c" / "transcripts" / sweep_name).read_bytes()
    for csv_name in ("leakage.csv", "summary.csv"):
        assert (tmp_path / "a" / csv_name).read_bytes() == (tmp_path / "b" / csv_name).read_bytes()
    # A single transcript regenerated from its recorded seed and index.
    text = (tmp_path / "a" / "transcripts" / "m019.txt").read_text()
    fields = dict(line.split(": ", 1) for line in text.splitlines())
    again = run_trial(Scenario(fixture_cfg.replace(p=float(fields["p"]), seed=int(fields["run_seed"]))), int(fields["index"]))
    assert fields["scenario"] == fixture_cfg.digest[:16]
    assert again.to_text() == text


@pytest.mark.criterion(10, "attack monotonicity A = 0 <= B <= C with the secret")
def test_attack_monotonicity(attack_trials):
    for t in attack_trials:
        a = t.reports[A_BITS].public_entity_recovery_rate
        b = t.reports[B_GLOBAL].public_entity_recovery_rate
        c = t.reports[C_BOUND].public_entity_recovery_rate
        assert a == 0.0 <= b <= c
