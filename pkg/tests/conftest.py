from __future__ import annotations

import random

import pytest

from itemkit import TemporalGraph, default_catalog


def graph(*edges, isolated=()):
    """Shorthand: ``graph((1, 2, 10), (2, 3, 20))``."""
    return TemporalGraph.from_edges(edges, isolated=isolated)


def random_graph(rng: random.Random, n_vertices: int, n_edges: int, t_max: int, loops: bool = True):
    rows = []
    for _ in range(n_edges):
        u = rng.randrange(n_vertices)
        v = rng.randrange(n_vertices)
        if u == v and not loops:
            v = (u + 1) % n_vertices
        rows.append((u, v, rng.randrange(t_max)))
    return TemporalGraph.from_edges(rows) if rows else TemporalGraph.empty()


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


# acceptance criteria append (label, passed, detail) here; printed at the end
ACCEPTANCE_LINES: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in sorted(ACCEPTANCE_LINES, key=lambda r: int(r[0].split()[1])):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {label}: {detail}")
