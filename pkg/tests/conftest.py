import dataclasses

import numpy as np
import pytest
from hypothesis import strategies as st

import dgff.kernels
from dgff import OperatorStack
from dgff.fixtures import standard_fixture
from dgff.graph import from_edges

FIXTURES = ("p4", "p5", "grid5", "tree3")


@st.composite
def small_graphs(draw):
    """Random connected weighted graph: a path spine plus extra chords,
    last vertex exterior."""
    n = draw(st.integers(min_value=3, max_value=8))
    ids = [f"x{i}" for i in range(n)]
    conds = st.floats(min_value=0.1, max_value=10.0, allow_nan=False)
    edges = [(ids[i], ids[i + 1], draw(conds)) for i in range(n - 1)]
    extra = draw(st.sets(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda t: t[0] < t[1] - 1),
        max_size=4))
    for i, j in sorted(extra):
        edges.append((ids[i], ids[j], draw(conds)))
    return from_edges(ids, [ids[-1]], edges)


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # compile the jit kernels before anything times or samples
    dgff.kernels.warmup()


@pytest.fixture(scope="session")
def fixture_set():
    return {name: standard_fixture(name) for name in FIXTURES}


@pytest.fixture(scope="session")
def stack_set(fixture_set):
    return {name: OperatorStack(g, fol) for name, (g, fol) in fixture_set.items()}


def tamper_directed(g, u: str, v: str, c: float):
    """Set a single directed conductance, bypassing parse validation.

    The stationary weights are recomputed as out-sums so the tampered model
    is self-consistent row-wise but no longer reversible.
    """
    cond = dict(g.cond)
    cond[(g.index[u], g.index[v])] = float(c)
    pi = np.zeros(g.n_vertices)
    for i, nbrs in enumerate(g.adj):
        pi[i] = sum(cond[(i, j)] for j in nbrs)
    return dataclasses.replace(g, cond=cond, pi=pi)
