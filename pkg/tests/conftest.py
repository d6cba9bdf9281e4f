import networkx as nx
import pytest

from locgame.graph import Graph


def from_nx(h: nx.Graph) -> Graph:
    """Relabel a networkx graph to 0..n-1 and convert."""
    h = nx.convert_node_labels_to_integers(h)
    return Graph.from_edges(h.number_of_nodes(), list(h.edges()))


@pytest.fixture
def two_edges() -> Graph:
    return Graph.from_edges(4, [(0, 1), (2, 3)])


# -- acceptance reporting --------------------------------------------------------

_ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion; printed in the terminal summary."""

    def record(criterion: str, ok: bool, detail: str) -> bool:
        _ACCEPTANCE[criterion] = (bool(ok), detail)
        print(f"{criterion}: {'PASS' if ok else 'FAIL'} ({detail})", flush=True)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(_ACCEPTANCE, key=lambda c: int(c.split()[1].rstrip(":"))):
        ok, detail = _ACCEPTANCE[criterion]
        terminalreporter.write_line(f"{criterion}: {'PASS' if ok else 'FAIL'} ({detail})")
