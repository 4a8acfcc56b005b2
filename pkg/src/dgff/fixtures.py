"""Built-in example graphs: paths, square grids with a grounded outer ring,
and binary trees with grounded leaves. `python -m dgff.fixtures OUTDIR`
writes them as JSON files."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import numpy as np

from .foliation import Foliation, bfs_foliate
from .graph import Graph, from_edges, graph_to_json


def path_graph(k: int, conductances=None, exterior=("first", "last")) -> Graph:
    """Path v0 - v1 - ... - v{k-1}; ends are exterior by default."""
    ids = [f"v{i}" for i in range(k)]
    cs = conductances if conductances is not None else [1.0] * (k - 1)
    edges = [(ids[i], ids[i + 1], cs[i]) for i in range(k - 1)]
    ext = []
    if "first" in exterior:
        ext.append(ids[0])
    if "last" in exterior:
        ext.append(ids[-1])
    return from_edges(ids, ext, edges)


def grid_graph(side: int, conductance=1.0) -> Graph:
    """side x side grid, outer ring exterior, ids r<row>c<col>."""
    ids = [f"r{r}c{c}" for r in range(side) for c in range(side)]
    edges = []
    for r in range(side):
        for c in range(side):
            if c + 1 < side:
                edges.append((f"r{r}c{c}", f"r{r}c{c + 1}", conductance))
            if r + 1 < side:
                edges.append((f"r{r}c{c}", f"r{r + 1}c{c}", conductance))
    ext = [f"r{r}c{c}" for r in range(side) for c in range(side)
           if r in (0, side - 1) or c in (0, side - 1)]
    return from_edges(ids, ext, edges)


def binary_tree(depth: int, conductance=1.0) -> Graph:
    """Complete binary tree of the given depth (heap ids t1..), leaves
    exterior."""
    count = 2 ** (depth + 1) - 1
    ids = [f"t{i}" for i in range(1, count + 1)]
    edges = []
    for i in range(1, count + 1):
        for child in (2 * i, 2 * i + 1):
            if child <= count:
                edges.append((f"t{i}", f"t{child}", conductance))
    leaves = [f"t{i}" for i in range(2 ** depth, count + 1)]
    return from_edges(ids, leaves, edges)


def weighted(g: Graph, seed: int = 20, lo: float = 0.5, hi: float = 2.0) -> Graph:
    """Same topology with reproducible random conductances in [lo, hi)."""
    rng = np.random.default_rng(seed)
    edges = [(g.vertices[i], g.vertices[j], float(rng.uniform(lo, hi)))
             for (i, j) in g.edge_list]
    return from_edges(g.vertices, sorted(g.exterior, key=g.index.__getitem__), edges)


_ROOTS = {
    "p4": ("v1",),
    "p5": ("v1",),
    "grid5": ("r2c2",),
    "tree3": ("t1",),
    "grid13": ("r6c6",),
}


def standard_roots(name: str) -> tuple[str, ...]:
    return _ROOTS[name]


def standard_graph(name: str) -> Graph:
    builders = {
        "p4": lambda: path_graph(4),
        "p5": lambda: path_graph(5),
        "grid5": lambda: grid_graph(5),
        "tree3": lambda: binary_tree(3),
        "grid13": lambda: grid_graph(13),
    }
    return builders[name]()


def standard_fixture(name: str) -> tuple[Graph, Foliation]:
    g = standard_graph(name)
    return g, bfs_foliate(g, standard_roots(name))


FIXTURE_NAMES = ("p4", "p5", "grid5", "tree3", "grid13")


def write_fixture_files(outdir) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for name in FIXTURE_NAMES:
        g, fol = standard_fixture(name)
        gpath = outdir / f"{name}.json"
        gpath.write_text(json.dumps(graph_to_json(g), indent=1) + "\n")
        fpath = outdir / f"{name}_foliation.json"
        fpath.write_text(json.dumps(fol.to_json()) + "\n")
        written.extend([gpath, fpath])
    # one edge-list variant to exercise that parser
    g = standard_graph("p4")
    lines = ["# unit-conductance path on four vertices",
             "!exterior v0 v3"]
    lines += [f"{g.vertices[i]} {g.vertices[j]} {c:g}"
              for (i, j), c in zip(g.edge_list, g.conductances)]
    epath = outdir / "p4.edgelist"
    epath.write_text("\n".join(lines) + "\n")
    written.append(epath)
    return written


if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else "fixtures"
    for p in write_fixture_files(target):
        print(p)
