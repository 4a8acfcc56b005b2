"""Weighted-graph data model and the discrete calculus on it.

A graph is a connected, loop-free vertex/edge structure with strictly
positive symmetric conductances. Vertices carry string ids; a dense integer
ordering is fixed at parse time and every array in the package is indexed by
it. The stationary weight pi(x) is the sum of conductances incident to x.

Two input formats are supported:

* edge list - UTF-8 lines ``u v c``, ``#`` starts a comment, and a header
  line ``!exterior u1 u2 ...`` declares grounded vertices;
* JSON - ``{"vertices": [...], "exterior": [...],
  "edges": [{"u":.., "v":.., "c":..}]}`` (``vertices`` may be omitted, in
  which case ids are ordered by first appearance in ``edges``).

The coboundary operator d maps vertex functions to antisymmetric edge
fields, d f(x,y) = sqrt(c(x,y)) (f(x) - f(y)); its adjoint d* maps edge
fields back to vertex functions. The Dirichlet energy is the quadratic form
of d*d: sum over unordered edges of c (f(x) - f(y))^2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import GraphError


@dataclass(frozen=True)
class Graph:
    """Immutable weighted graph. Build via `parse_graph` / `from_edges`.

    The raw constructor trusts its inputs; all validation lives in the
    factories.
    """

    vertices: tuple[str, ...]
    exterior: frozenset[str]
    edge_list: tuple[tuple[int, int], ...]      # one orientation per edge, i < j
    conductances: np.ndarray                    # aligned with edge_list
    cond: dict[tuple[int, int], float]          # both orientations
    pi: np.ndarray
    index: dict[str, int] = field(repr=False)
    adj: tuple[tuple[int, ...], ...] = field(repr=False)  # sorted neighbor ids

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def exterior_indices(self) -> frozenset[int]:
        return frozenset(self.index[v] for v in self.exterior)

    @property
    def interior_indices(self) -> tuple[int, ...]:
        ext = self.exterior_indices
        return tuple(i for i in range(self.n_vertices) if i not in ext)

    def conductance(self, x: int, y: int) -> float:
        return self.cond.get((x, y), 0.0)

    def ids(self, indices) -> tuple[str, ...]:
        return tuple(self.vertices[i] for i in indices)

    def indices_of(self, ids) -> tuple[int, ...]:
        out = []
        for v in ids:
            if v not in self.index:
                raise GraphError(f"unknown vertex id {v!r}", code="UnknownVertex")
            out.append(self.index[v])
        return tuple(out)


def from_edges(vertex_ids, exterior_ids, edges) -> Graph:
    """Validated construction from (u, v, c) triples.

    vertex_ids fixes the dense ordering; pass the ids in the order the
    matrices should use.
    """
    vertices = tuple(vertex_ids)
    index: dict[str, int] = {}
    for v in vertices:
        if not v or any(ch.isspace() for ch in v):
            raise GraphError(f"bad vertex id {v!r}", code="BadFormat")
        if v in index:
            raise GraphError(f"duplicate vertex id {v!r}", code="DuplicateVertex")
        index[v] = len(index)
    exterior = frozenset(exterior_ids)
    for v in exterior:
        if v not in index:
            raise GraphError(f"exterior vertex {v!r} not declared", code="UnknownVertex")

    cond: dict[tuple[int, int], float] = {}
    edge_list: list[tuple[int, int]] = []
    for u, v, c in edges:
        for w in (u, v):
            if w not in index:
                raise GraphError(f"edge endpoint {w!r} not declared", code="UnknownVertex")
        i, j = index[u], index[v]
        if i == j:
            raise GraphError(f"self-loop at {u!r}", code="SelfLoop")
        c = float(c)
        if not c > 0.0:
            raise GraphError(f"conductance {c} on ({u!r}, {v!r}) must be positive",
                             code="NonPositiveConductance")
        if (i, j) in cond:
            if cond[(i, j)] != c:
                raise GraphError(f"edge ({u!r}, {v!r}) repeated with conductance "
                                 f"{c} != {cond[(i, j)]}", code="ConflictingConductance")
            continue
        cond[(i, j)] = c
        cond[(j, i)] = c
        edge_list.append((min(i, j), max(i, j)))

    n = len(vertices)
    adj = tuple(tuple(sorted(j for (i2, j) in cond if i2 == i)) for i in range(n))

    # connectivity over all vertices
    if n:
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != n:
            missing = sorted(set(range(n)) - seen)
            raise GraphError(f"graph is disconnected (e.g. vertex {vertices[missing[0]]!r} "
                             "unreachable)", code="Disconnected")

    return Graph(
        vertices=vertices,
        exterior=exterior,
        edge_list=tuple(edge_list),
        conductances=np.array([cond[e] for e in edge_list], dtype=float),
        cond=cond,
        pi=recompute_pi_from(adj, cond),
        index=index,
        adj=adj,
    )


def recompute_pi_from(adj, cond) -> np.ndarray:
    pi = np.zeros(len(adj))
    for i, nbrs in enumerate(adj):
        s = 0.0
        for j in nbrs:
            s += cond[(i, j)]
        pi[i] = s
    return pi


def recompute_pi(g: Graph) -> np.ndarray:
    """Recompute pi from the stored edges; equals g.pi bit-for-bit."""
    return recompute_pi_from(g.adj, g.cond)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

def parse_graph(data: str | bytes, fmt: str) -> Graph:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    if fmt == "json":
        return _parse_json(data)
    if fmt == "edgelist":
        return _parse_edgelist(data)
    raise GraphError(f"unknown graph format {fmt!r}", code="BadFormat")


def load_graph(path) -> Graph:
    """Read a graph file; `.json` selects the JSON format, anything else the
    edge list."""
    with open(path, "rb") as fh:
        data = fh.read()
    fmt = "json" if str(path).endswith(".json") else "edgelist"
    return parse_graph(data, fmt)


def _parse_edgelist(text: str) -> Graph:
    order: list[str] = []
    seen: set[str] = set()

    def note(v: str):
        if v not in seen:
            seen.add(v)
            order.append(v)

    exterior: list[str] = []
    edges: list[tuple[str, str, float]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "!exterior":
            exterior.extend(parts[1:])
            continue
        if len(parts) != 3:
            raise GraphError(f"line {lineno}: expected 'u v c', got {raw!r}", code="BadFormat")
        u, v, cs = parts
        try:
            c = float(cs)
        except ValueError:
            raise GraphError(f"line {lineno}: bad conductance {cs!r}", code="BadFormat") from None
        note(u)
        note(v)
        edges.append((u, v, c))
    for v in exterior:
        note(v)  # vertex order follows the edge lines; a header-only vertex
        # is isolated and will fail the connectivity check
    return from_edges(order, exterior, edges)


def _parse_json(text: str) -> Graph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphError(f"invalid JSON: {e}", code="BadFormat") from None
    if not isinstance(doc, dict) or "edges" not in doc:
        raise GraphError("expected an object with an 'edges' array", code="BadFormat")
    try:
        edges = [(e["u"], e["v"], e["c"]) for e in doc["edges"]]
    except (TypeError, KeyError):
        raise GraphError("each edge needs 'u', 'v' and 'c'", code="BadFormat") from None
    if "vertices" in doc:
        vertices = list(doc["vertices"])
    else:
        vertices = []
        seen: set[str] = set()
        for u, v, _ in edges:
            for w in (u, v):
                if w not in seen:
                    seen.add(w)
                    vertices.append(w)
        for w in doc.get("exterior", []):
            if w not in seen:
                seen.add(w)
                vertices.append(w)
    return from_edges(vertices, doc.get("exterior", []), edges)


def graph_to_json(g: Graph) -> dict:
    return {
        "vertices": list(g.vertices),
        "exterior": sorted(g.exterior, key=g.index.__getitem__),
        "edges": [
            {"u": g.vertices[i], "v": g.vertices[j], "c": c}
            for (i, j), c in zip(g.edge_list, g.conductances)
        ],
    }


# ---------------------------------------------------------------------------
# Discrete calculus
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EdgeField:
    """Antisymmetric edge function, stored on one orientation per edge."""

    graph: Graph
    values: np.ndarray  # aligned with graph.edge_list (orientation i -> j)

    def value(self, x: int, y: int) -> float:
        """phi(x, y); antisymmetry phi(y, x) = -phi(x, y) by lookup."""
        i, j = (x, y) if x < y else (y, x)
        try:
            k = self.graph.edge_list.index((i, j))
        except ValueError:
            return 0.0
        return float(self.values[k]) if x < y else -float(self.values[k])


def coboundary(g: Graph, f: np.ndarray) -> EdgeField:
    """d f(x, y) = sqrt(c(x, y)) (f(x) - f(y)) on the stored orientation."""
    f = np.asarray(f, dtype=float)
    i = np.fromiter((e[0] for e in g.edge_list), dtype=int, count=len(g.edge_list))
    j = np.fromiter((e[1] for e in g.edge_list), dtype=int, count=len(g.edge_list))
    return EdgeField(g, np.sqrt(g.conductances) * (f[i] - f[j]))


def divergence(g: Graph, phi: EdgeField | np.ndarray) -> np.ndarray:
    """The adjoint d*: d* phi(x) = sum over edges leaving x of sqrt(c) phi."""
    vals = phi.values if isinstance(phi, EdgeField) else np.asarray(phi, dtype=float)
    out = np.zeros(g.n_vertices)
    sq = np.sqrt(g.conductances)
    for k, (i, j) in enumerate(g.edge_list):
        out[i] += sq[k] * vals[k]
        out[j] -= sq[k] * vals[k]
    return out


def dirichlet_inner(g: Graph, f: np.ndarray, h: np.ndarray, support=None) -> float:
    """Dirichlet pairing: sum over edges of c (f(x)-f(y)) (h(x)-h(y)).

    With `support` given (vertex indices), only edges touching the support
    set contribute, matching the energy on that vertex set.
    """
    f = np.asarray(f, dtype=float)
    h = np.asarray(h, dtype=float)
    total = 0.0
    if support is not None:
        support = set(support)
    for k, (i, j) in enumerate(g.edge_list):
        if support is not None and i not in support and j not in support:
            continue
        total += g.conductances[k] * (f[i] - f[j]) * (h[i] - h[j])
    return float(total)


def delta(g: Graph, vertex: str | int) -> np.ndarray:
    """Kronecker vector at a vertex (id or index)."""
    i = g.index[vertex] if isinstance(vertex, str) else int(vertex)
    out = np.zeros(g.n_vertices)
    out[i] = 1.0
    return out
