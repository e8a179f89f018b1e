import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rhoda import _kernels  # noqa: E402

KERNELS = ("bfs_all_pairs", "next_hops", "push_loads", "hungarian", "greedy_add_edges")
BACKENDS = ["python"] + (["compiled"] if _kernels.compiled is not None else [])


@pytest.fixture(params=BACKENDS)
def backend(request, monkeypatch):
    """Run the test once per available kernel backend."""
    mod = getattr(_kernels, request.param)
    for name in KERNELS:
        monkeypatch.setattr(_kernels, name, getattr(mod, name))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_strong_digraph(rng, n, extra):
    """A Hamiltonian cycle through a random order plus ``extra`` random arcs."""
    order = rng.permutation(n) + 1
    edges = {(int(order[i]), int(order[(i + 1) % n])) for i in range(n)} if n > 1 else set()
    while len(edges) < min(n * (n - 1), n + extra):
        u, v = rng.integers(1, n + 1, size=2)
        if u != v:
            edges.add((int(u), int(v)))
    return sorted(edges)


# criterion number -> (verdict, detail), filled by test_acceptance
ACCEPTANCE: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        verdict, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:>2}: {verdict}  {detail}")
