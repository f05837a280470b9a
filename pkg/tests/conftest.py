import networkx as nx
import pytest

from privsc import fixture_scenario_path
from privsc.harness import Scenario, load_scenario
from privsc.kg import Entity, KnowledgeGraph, Triple
from privsc.knowledge import SharedSecret


def make_graph(entities, triples, kind="global"):
    """entities: iterable of (id, name, category[, attrs]); triples: (h, r, t)."""
    g = KnowledgeGraph(kind)
    for row in entities:
        g.add_entity(Entity(*row))
    for t in triples:
        g.add_triple(Triple(*t))
    return g


def to_networkx(g):
    h = nx.Graph()
    h.add_nodes_from(g.entity_ids)
    h.add_edges_from((t.head, t.tail) for t in g.triples if t.head != t.tail)
    return h


def alice_graph(kind="private"):
    """Alice owns a Google account whose password is a credential."""
    return make_graph(
        [
            ("alice", "Alice", "person"),
            ("google_account", "Google account", "account", {"value": "abcd@gmail"}),
            ("password", "password", "credential", {"value": "123456"}),
        ],
        [("alice", "has_account", "google_account"), ("google_account", "has_password", "password")],
        kind=kind,
    )


@pytest.fixture
def key():
    return SharedSecret.derive("tests", 1)


@pytest.fixture(scope="session")
def fixture_cfg():
    return load_scenario(fixture_scenario_path())


@pytest.fixture(scope="session")
def fixture_scenario(fixture_cfg):
    scn = Scenario(fixture_cfg)
    scn.fused  # warm the cache once per session
    return scn


# -- acceptance reporting ------------------------------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when not in ("setup", "call"):
        return
    number, title = mark.args
    if report.when == "call" or report.failed:
        _CRITERIA[number] = (title, report.passed, call.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, passed, seconds = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {title} ({seconds:.2f}s)")
