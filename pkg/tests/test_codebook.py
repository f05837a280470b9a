import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from privsc.codebook import (
    ERASURE,
    ERASURE_ID,
    UNKNOWN,
    UNKNOWN_ID,
    Codebook,
    build_global_codebook,
    build_private_codebook,
    check_disjoint,
    keyed_permutation,
)
from privsc.exceptions import UnknownToken, WidthTooSmall
from privsc.knowledge import SharedSecret

from conftest import alice_graph, make_graph


def global_graph():
    return make_graph(
        [("g1", "Glasgow", "place"), ("w", "the", "word"), ("c", "City of Glasgow", "place")],
        [("c", "contains", "g1")],
    )


def test_global_codebook_layout():
    cb = build_global_codebook(global_graph(), 8)
    assert cb.symbols[UNKNOWN_ID] == UNKNOWN and cb.symbols[ERASURE_ID] == ERASURE
    assert list(cb.symbols[2:]) == sorted(cb.symbols[2:])
    assert "e:city of glasgow" in cb and "r:contains" in cb
    assert cb.codewords == tuple(range(len(cb)))


def test_global_codebook_is_reproducible_from_public_knowledge():
    assert build_global_codebook(global_graph()) == build_global_codebook(global_graph().copy())


def test_width_too_small():
    with pytest.raises(WidthTooSmall):
        build_global_codebook(global_graph(), 2)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 300), st.binary(min_size=1, max_size=8))
def test_keyed_permutation_is_a_permutation(n, key):
    perm = keyed_permutation(n, key)
    assert sorted(perm) == list(range(n))
    assert perm == keyed_permutation(n, key)


def test_keyed_permutation_depends_on_key():
    a = keyed_permutation(16, b"k1")
    b = keyed_permutation(16, b"k2")
    assert a != b


def test_keyed_permutation_positions_roughly_uniform():
    # each of 4 elements lands in position 0 about 1/4 of the time
    counts = [0] * 4
    for i in range(2000):
        counts[keyed_permutation(4, i.to_bytes(4, "big"))[0]] += 1
    assert all(400 < c < 600 for c in counts)


def test_private_codebook_keyed_and_disjoint():
    g = alice_graph()
    k1, k2 = SharedSecret.derive("a"), SharedSecret.derive("b")
    p1 = build_private_codebook(g, k1, 8)
    assert p1 == build_private_codebook(g, k1, 8)
    assert set(p1.symbols) == {"e:alice", "e:google_account", "e:password", "r:has_account", "r:has_password"}
    assert min(p1.codewords) == 256 - len(p1)
    gcb = build_global_codebook(global_graph(), 8)
    check_disjoint(gcb, p1)
    assert not set(gcb.codewords) & set(p1.codewords)
    # five symbols give 120 orders; the seeds below differ
    assert any(build_private_codebook(g, SharedSecret.derive(i), 8).symbols != p1.symbols for i in range(5))
    assert build_private_codebook(g, k2, 8).codewords == p1.codewords


def test_check_disjoint_overflow_and_width_mismatch():
    gcb = build_global_codebook(global_graph(), 3)
    with pytest.raises(WidthTooSmall):
        check_disjoint(gcb, build_private_codebook(alice_graph(), SharedSecret.derive(1), 3))
    with pytest.raises(ValueError):
        check_disjoint(gcb, build_private_codebook(alice_graph(), SharedSecret.derive(1), 8))


def test_lookup_and_errors():
    cb = build_global_codebook(global_graph(), 8)
    assert cb.lookup(cb.codeword(3)) == 3
    assert cb.lookup(255) is None
    with pytest.raises(UnknownToken):
        cb.symbol(99)
    with pytest.raises(UnknownToken):
        cb.id_of("e:nowhere")


def test_text_roundtrip():
    cb = build_private_codebook(alice_graph(), SharedSecret.derive(1), 8)
    text = cb.to_text()
    assert text.splitlines()[0].split("\t")[2] == cb.bits(0)
    assert Codebook.from_text(text) == cb


def test_bijection_enforced():
    with pytest.raises(ValueError):
        Codebook("global", 4, ("a", "b"), (1, 1))
    with pytest.raises(ValueError):
        Codebook("global", 2, ("a",), (4,))
