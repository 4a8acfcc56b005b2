"""The layer-by-layer growth operator and the variational identities behind it.

Per layer n the boundary Green matrix gets a canonical symmetric PSD square
root R_n. Extending R_n harmonically into the cluster gives the kernel
K_n = P_n R_n (rows over the cluster, columns over the layer); stacking the
kernels column-by-column yields the growth operator Q_n, whose column for a
vertex y of layer m is K_m(., y) zero-extended. In layer-major vertex order
Q_n is block upper triangular with the R_m blocks on the diagonal.

Two matrix identities make Q_n useful and are verified numerically here:

* Q_n Q_n^T equals the normalized Green matrix of the cluster, and
* the columns of Q_n are orthonormal in the Dirichlet inner product,
  so Q_n maps white noise to a field with Green covariance.

`OperatorStack` memoizes every per-level operator for a foliated graph and
is the single entry point the sampling and verification layers build on.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .errors import FoliationError
from .foliation import Foliation, GrowthCluster, cluster as make_cluster
from .graph import Graph
from .operators import GreenKernel, boundary_green, green, laplacian, poisson, verify_green_variation


def layer_sqrt(bg: np.ndarray) -> np.ndarray:
    """Symmetric PSD square root of a boundary Green matrix."""
    return linalg.psd_sqrt(bg)


def kernel_K(poisson_n: np.ndarray, sqrt_n: np.ndarray) -> np.ndarray:
    """Harmonic extension of the layer square root: K = P R.

    Rows over the cluster, columns over the layer; restricted to the layer
    the kernel is R itself because the Poisson kernel pins layer values.
    """
    return poisson_n @ sqrt_n


def hadamard_Q(clu: GrowthCluster, kernels: list[np.ndarray]) -> np.ndarray:
    """Assemble the growth operator of cluster n from kernels K_0..K_n.

    Column y (a vertex of layer m) is K_m(., y) zero-extended to the
    cluster; the layer-major prefix ordering makes the extension a zero pad.
    """
    if len(kernels) != clu.n + 1:
        raise FoliationError(f"cluster {clu.n} needs kernels 0..{clu.n}",
                             code="IndexOutOfRange")
    q = np.zeros((clu.size, clu.size))
    for m, k_m in enumerate(kernels):
        rows = k_m.shape[0]
        q[:rows, clu.layer_slice(m)] = k_m
    return q


def verify_hadamard_identity(q: np.ndarray, green_norm: np.ndarray) -> float:
    """Max-abs residual of Q Q^T against the normalized Green matrix."""
    return float(np.abs(q @ q.T - green_norm).max())


def dirichlet_gram(g: Graph, clu: GrowthCluster, q: np.ndarray) -> np.ndarray:
    """Gram matrix of Q's columns in the Dirichlet inner product.

    Computed through the edge route (scaled incidence rows over every edge
    touching the cluster), independent of the Laplacian assembly.
    """
    member = clu.local
    rows = []
    for (i, j), c in zip(g.edge_list, g.conductances):
        li, lj = member.get(i), member.get(j)
        if li is None and lj is None:
            continue
        row = np.zeros(clu.size)
        s = np.sqrt(c)
        if li is not None:
            row[li] = s
        if lj is not None:
            row[lj] -= s
        rows.append(row)
    d = np.array(rows) if rows else np.zeros((0, clu.size))
    dq = d @ q
    return dq.T @ dq


def verify_isometry(g: Graph, clu: GrowthCluster, q: np.ndarray) -> float:
    """Max-abs residual of the Dirichlet Gram matrix against the identity."""
    return float(np.abs(dirichlet_gram(g, clu, q) - np.eye(clu.size)).max())


def solve_growth(stack: "OperatorStack", n: int, b: np.ndarray) -> np.ndarray:
    """Solve Q_n f = b by block back-substitution over layers.

    Walks the layers top down: the diagonal block of layer m is R_m, so the
    layer-m slice of f solves R_m f_m = (b - known columns)_m. A finite
    residual certifies that Q_n is injective.
    """
    clu = stack.cluster(n)
    q = stack.growth(n)
    f = np.zeros(clu.size)
    resid = np.asarray(b, dtype=float).copy()
    for m in range(n, -1, -1):
        sl = clu.layer_slice(m)
        f[sl] = linalg.solve_spd(stack.layer_sqrt(m), resid[sl])
        resid -= q[:, sl] @ f[sl]
    return f


class OperatorStack:
    """Memoized per-level operator family for a foliated graph.

    Levels are computed on first use, so partially valid inputs (the
    tampering controls) can exercise early identities before later
    constructions fail.
    """

    def __init__(self, graph: Graph, fol: Foliation):
        self.graph = graph
        self.foliation = fol
        self._cache: dict[tuple[str, int], object] = {}

    @property
    def depth(self) -> int:
        return self.foliation.depth

    def _memo(self, kind: str, n: int, build):
        key = (kind, n)
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def cluster(self, n: int) -> GrowthCluster:
        return self._memo("cluster", n, lambda: make_cluster(self.foliation, n))

    def laplacian(self, n: int) -> np.ndarray:
        return self._memo("laplacian", n, lambda: laplacian(self.graph, self.cluster(n)))

    def green(self, n: int) -> GreenKernel:
        return self._memo("green", n, lambda: green(self.graph, self.cluster(n)))

    def poisson(self, n: int) -> np.ndarray:
        return self._memo(
            "poisson", n,
            lambda: poisson(self.graph, self.cluster(n), self.cluster(n).top_layer))

    def boundary_green(self, n: int) -> np.ndarray:
        return self._memo(
            "bgreen", n,
            lambda: boundary_green(self.green(n), self.cluster(n).top_layer))

    def layer_sqrt(self, n: int) -> np.ndarray:
        return self._memo("sqrt", n, lambda: layer_sqrt(self.boundary_green(n)))

    def kernel(self, n: int) -> np.ndarray:
        return self._memo("kernel", n, lambda: kernel_K(self.poisson(n), self.layer_sqrt(n)))

    def growth(self, n: int) -> np.ndarray:
        """The growth operator Q_n."""
        return self._memo(
            "growth", n,
            lambda: hadamard_Q(self.cluster(n), [self.kernel(m) for m in range(n + 1)]))

    def variation_residual(self, n: int) -> float:
        return verify_green_variation(
            self.graph, self.foliation, n,
            green_n=self.green(n), green_prev=self.green(n - 1),
            poisson_n=self.poisson(n))

    def growth_adjoint_apply(self, n: int, f: np.ndarray) -> np.ndarray:
        """Q_n^* f on the cluster, for ambient f (restriction built in)."""
        loc = np.asarray(f, dtype=float)[np.array(self.cluster(n).vertices)]
        return self.growth(n).T @ loc

    def layer_energies(self, n: int, f: np.ndarray) -> np.ndarray:
        """Squared norms of Q_n^* f on each layer 0..n (Pythagoras pieces)."""
        qf = self.growth_adjoint_apply(n, f)
        clu = self.cluster(n)
        return np.array([float(qf[clu.layer_slice(m)] @ qf[clu.layer_slice(m)])
                         for m in range(n + 1)])
