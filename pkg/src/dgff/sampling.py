"""Seeded Gaussian fields on foliated graphs and the statistics that verify
their laws.

Randomness is counter based: a draw is a pure function of (seed, stream id,
draw index), with the global vertex index as the stream id. Identical seeds
reproduce identical fields on any platform, and disjoint vertex sets get
independent substreams by construction.

The white noise field (WNF) puts an independent standard normal at every
vertex of its domain. Applying the growth operator of cluster n turns the
WNF on the top cluster into the discrete Gaussian free field (DGFF) on
cluster n, whose covariance is the normalized Green matrix. The per-level
increment equals the harmonic extension of the square-root-weighted layer
noise, a per-sample identity checked exactly. An independent oracle samples
the same law directly through the Cholesky factor of the Green matrix.

Distributional claims are tested through first and second moments: the
empirical covariance of a zero-mean Gaussian sample has per-entry standard
error sqrt((s_xx s_yy + s_xy^2) / N), and every check asserts |z| below a
fixed bound (5 by default, giving a per-entry false alarm rate below 1e-6
at the default N = 1e5).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels, linalg
from .errors import SupportViolationError
from .graph import Graph
from .hadamard import OperatorStack
from .operators import GreenKernel


@dataclass
class GaussianStream:
    """Counter-based source of standard normals with named substreams."""

    seed: int
    counter: int = 0

    def block(self, streams, ndraws: int) -> np.ndarray:
        """(ndraws, len(streams)) normals; advances the draw counter."""
        s = np.asarray(streams, dtype=np.uint64)
        out = kernels.normal_block(self.seed, s, self.counter, ndraws)
        self.counter += ndraws
        return out

    def draw(self, streams) -> np.ndarray:
        return self.block(streams, 1)[0]


@dataclass(frozen=True)
class FieldSample:
    """One realization of a field, with full-graph indexing and provenance."""

    kind: str            # "wnf" | "dgff" | "increment"
    level: int | None    # cluster index, None for a plain-domain WNF
    values: np.ndarray   # ambient vertex order, zero off the support
    seed: int
    draw: int


def sample_wnf(g: Graph, domain, stream: GaussianStream,
               basis: np.ndarray | None = None) -> FieldSample:
    """WNF on `domain` (global vertex indices): i.i.d. N(0,1) per vertex.

    An orthogonal `basis` resamples the same law as a random combination of
    its columns; the distribution does not depend on this choice.
    """
    dom = np.asarray(list(domain), dtype=int)
    draw_index = stream.counter
    z = stream.draw(dom)
    if basis is not None:
        z = basis @ z
    values = np.zeros(g.n_vertices)
    values[dom] = z
    return FieldSample(kind="wnf", level=None, values=values,
                       seed=stream.seed, draw=draw_index)


def wnf_block(domain, stream: GaussianStream, trials: int,
              basis: np.ndarray | None = None) -> np.ndarray:
    """(trials, |domain|) WNF samples in the order of `domain`."""
    z = stream.block(np.asarray(list(domain), dtype=int), trials)
    return z @ basis.T if basis is not None else z


def grow_dgff(stack: OperatorStack, phi: FieldSample, n: int) -> FieldSample:
    """DGFF on cluster n from a WNF: apply the growth operator to the
    restriction of phi to the cluster."""
    clu = stack.cluster(n)
    local = stack.growth(n) @ phi.values[np.array(clu.vertices)]
    values = np.zeros_like(phi.values)
    values[np.array(clu.vertices)] = local
    return FieldSample(kind="dgff", level=n, values=values,
                       seed=phi.seed, draw=phi.draw)


def increment(stack: OperatorStack, phi: FieldSample, n: int) -> FieldSample:
    """The level-n step of the growth process, Psi_n - Psi_{n-1}."""
    if n < 1:
        raise ValueError("increment needs n >= 1")
    hi = grow_dgff(stack, phi, n)
    lo = grow_dgff(stack, phi, n - 1)
    return FieldSample(kind="increment", level=n, values=hi.values - lo.values,
                       seed=phi.seed, draw=phi.draw)


def increment_via_layer_noise(stack: OperatorStack, phi: FieldSample, n: int) -> np.ndarray:
    """Independent route to the same increment: harmonically extend the
    square-root-weighted white noise of layer n. Ambient values."""
    clu = stack.cluster(n)
    layer = np.array(clu.top_layer)
    local = stack.poisson(n) @ (stack.layer_sqrt(n) @ phi.values[layer])
    out = np.zeros_like(phi.values)
    out[np.array(clu.vertices)] = local
    return out


def oracle_dgff(kern: GreenKernel, stream: GaussianStream,
                ambient: int | None = None) -> FieldSample:
    """Direct sampler of the Green-covariance law via the Cholesky factor."""
    low = linalg.cholesky(kern.normalized)
    clu = kern.cluster
    draw_index = stream.counter
    z = stream.draw(np.array(clu.vertices))
    if ambient is None:
        ambient = int(max(clu.vertices)) + 1
    out = np.zeros(ambient)
    out[np.array(clu.vertices)] = low @ z
    return FieldSample(kind="dgff", level=clu.n, values=out,
                       seed=stream.seed, draw=draw_index)


def oracle_block(kern: GreenKernel, stream: GaussianStream, trials: int) -> np.ndarray:
    """(trials, cluster size) oracle samples in cluster order."""
    low = linalg.cholesky(kern.normalized)
    z = stream.block(np.array(kern.cluster.vertices), trials)
    return z @ low.T


def dgff_block(stack: OperatorStack, n: int, phi_block: np.ndarray) -> np.ndarray:
    """DGFF samples on cluster n from WNF rows over the top cluster.

    `phi_block` columns follow the top cluster's vertex order, whose prefix
    is the order of every smaller cluster.
    """
    k = stack.cluster(n).size
    return phi_block[:, :k] @ stack.growth(n).T


# ---------------------------------------------------------------------------
# Covariance statistics
# ---------------------------------------------------------------------------

def known_mean_covariance(x: np.ndarray) -> np.ndarray:
    """Zero-mean empirical covariance, sum x x^T / N."""
    return x.T @ x / x.shape[0]


def covariance_stderr(target: np.ndarray, trials: int) -> np.ndarray:
    """Per-entry standard error of the zero-mean Gaussian covariance
    estimator: sqrt((s_xx s_yy + s_xy^2) / N)."""
    d = np.diag(target)
    return np.sqrt((np.outer(d, d) + target ** 2) / trials)


@dataclass
class CovarianceReport:
    empirical: np.ndarray
    target: np.ndarray
    stderr: np.ndarray
    zscores: np.ndarray
    max_abs_z: float
    trials: int
    seed: int

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "seed": self.seed,
            "max_abs_z": self.max_abs_z,
            "empirical": self.empirical.tolist(),
            "target": self.target.tolist(),
        }


def covariance_report(samples: np.ndarray, target: np.ndarray, seed: int) -> CovarianceReport:
    trials = samples.shape[0]
    emp = known_mean_covariance(samples)
    se = covariance_stderr(target, trials)
    with np.errstate(invalid="ignore", divide="ignore"):
        z = np.where(se > 0, (emp - target) / np.where(se > 0, se, 1.0), 0.0)
    return CovarianceReport(empirical=emp, target=target, stderr=se, zscores=z,
                            max_abs_z=float(np.abs(z).max()), trials=trials, seed=seed)


def cross_covariance_zmax(a: np.ndarray, b: np.ndarray,
                          var_a: np.ndarray, var_b: np.ndarray) -> float:
    """Largest |z| of the empirical cross-covariance of two blocks whose true
    cross-covariance is zero; `var_a`/`var_b` are the exact variances."""
    trials = a.shape[0]
    emp = a.T @ b / trials
    se = np.sqrt(np.outer(var_a, var_b) / trials)
    mask = se > 0
    if not mask.any():
        return 0.0
    return float((np.abs(emp)[mask] / se[mask]).max())


def two_sample_zmax(emp_a: np.ndarray, trials_a: int,
                    emp_b: np.ndarray, trials_b: int,
                    target: np.ndarray) -> float:
    """Largest |z| for the difference of two empirical covariances of the
    same law, using the joint standard error."""
    se = np.sqrt(covariance_stderr(target, trials_a) ** 2
                 + covariance_stderr(target, trials_b) ** 2)
    mask = se > 0
    return float((np.abs(emp_a - emp_b)[mask] / se[mask]).max())


# ---------------------------------------------------------------------------
# Brownian-motion and boundary-average statistics
# ---------------------------------------------------------------------------

@dataclass
class BrownianReport:
    """Pairings F_n = <f, Psi_n> seen as a Brownian motion in the energy
    time ||Q_n^* f||^2."""

    f: np.ndarray
    variance_targets: np.ndarray          # per level n
    layer_energies: list[np.ndarray]      # per level, one entry per layer
    pythagoras_residual: float
    targets_monotone: bool
    empirical: np.ndarray | None = None   # covariance of (F_0..F_N)
    zscores: np.ndarray | None = None
    max_abs_z: float = 0.0
    trials: int = 0
    seed: int = 0

    def to_json(self) -> dict:
        return {
            "variance_targets": self.variance_targets.tolist(),
            "pythagoras_residual": self.pythagoras_residual,
            "targets_monotone": self.targets_monotone,
            "max_abs_z": self.max_abs_z,
            "trials": self.trials,
            "seed": self.seed,
        }


def pairing_block(stack: OperatorStack, f: np.ndarray, phi_block: np.ndarray) -> np.ndarray:
    """(trials, depth+1) matrix of pairings F_n = <f, Psi_n>."""
    cols = []
    for n in range(stack.depth + 1):
        s = dgff_block(stack, n, phi_block)
        f_loc = np.asarray(f, dtype=float)[np.array(stack.cluster(n).vertices)]
        cols.append(s @ f_loc)
    return np.column_stack(cols)


def brownian_check(stack: OperatorStack, f: np.ndarray, trials: int = 0,
                   seed: int = 0, phi_block: np.ndarray | None = None) -> BrownianReport:
    """Deterministic energy bookkeeping for f, plus an optional Monte Carlo
    check that cov(F_n, F_m) equals the smaller energy.

    The exact part: layer energies of Q_n^* f sum to the total energy
    (Pythagoras over the disjoint layers), and the energies grow with n.
    """
    levels = stack.depth + 1
    targets = np.zeros(levels)
    energies = []
    pyth = 0.0
    for n in range(levels):
        qf = stack.growth_adjoint_apply(n, f)
        targets[n] = float(qf @ qf)
        e = stack.layer_energies(n, f)
        energies.append(e)
        pyth = max(pyth, abs(float(e.sum()) - targets[n]))
    monotone = bool(np.all(np.diff(targets) >= -1e-12 * max(targets.max(), 1.0)))

    report = BrownianReport(f=np.asarray(f, dtype=float), variance_targets=targets,
                            layer_energies=energies, pythagoras_residual=pyth,
                            targets_monotone=monotone)
    if trials:
        if phi_block is None:
            stream = GaussianStream(seed)
            phi_block = wnf_block(stack.cluster(stack.depth).vertices, stream, trials)
        pair = pairing_block(stack, f, phi_block)
        target = np.minimum.outer(targets, targets)
        cov = covariance_report(pair, target, seed)
        report.empirical = cov.empirical
        report.zscores = cov.zscores
        report.max_abs_z = cov.max_abs_z
        report.trials = phi_block.shape[0]
        report.seed = seed
    return report


@dataclass
class SweepReport:
    """Boundary averages A_n = <P_n^* f, Psi_n2> for n = n1..n2."""

    f: np.ndarray
    n1: int
    n2: int
    identity_residual: float              # A_n vs F_n2 - F_{n-1}, per sample
    identity_scale: float
    variance_targets: np.ndarray          # T_n2 - T_{n-1}
    empirical: np.ndarray | None = None
    zscores: np.ndarray | None = None
    max_abs_z: float = 0.0
    trials: int = 0
    seed: int = 0

    def to_json(self) -> dict:
        return {
            "n1": self.n1,
            "n2": self.n2,
            "identity_residual": self.identity_residual,
            "variance_targets": self.variance_targets.tolist(),
            "max_abs_z": self.max_abs_z,
            "trials": self.trials,
            "seed": self.seed,
        }


def sweep_average_check(stack: OperatorStack, f: np.ndarray, n1: int, n2: int,
                        trials: int = 0, seed: int = 0,
                        phi_block: np.ndarray | None = None) -> SweepReport:
    """Sweep f onto each layer n in n1..n2 and pair with Psi_n2.

    Per sample the pairing telescopes: A_n(f) = F_n2(f) - F_{n-1}(f),
    because Psi_n2 - Psi_{n-1} is the harmonic extension of Psi_n2's layer-n
    values. Variances follow: Var A_n = T_n2 - T_{n-1} and, for n <= m,
    cov(A_n, A_m) = T_n2 - T_{m-1}.
    """
    if not 1 <= n1 <= n2 <= stack.depth:
        raise ValueError(f"need 1 <= n1 <= n2 <= {stack.depth}")
    f = np.asarray(f, dtype=float)
    support = np.flatnonzero(f)
    allowed = set(stack.cluster(n1).vertices)
    if any(int(v) not in allowed for v in support):
        raise SupportViolationError(
            f"test vector must be supported on cluster {n1}")

    if phi_block is None:
        stream = GaussianStream(seed)
        count = trials if trials else 1
        phi_block = wnf_block(stack.cluster(stack.depth).vertices, stream, count)
    big = dgff_block(stack, n2, phi_block)
    clu2 = stack.cluster(n2)

    levels = list(range(n1, n2 + 1))
    a_cols = []
    for n in levels:
        f_loc = f[np.array(stack.cluster(n).vertices)]
        sweep = stack.poisson(n).T @ f_loc
        a_cols.append(big[:, clu2.layer_slice(n)] @ sweep)
    a = np.column_stack(a_cols)

    f2 = big @ f[np.array(clu2.vertices)]
    resid = 0.0
    scale = max(1.0, float(np.abs(f2).max()))
    for k, n in enumerate(levels):
        prev = dgff_block(stack, n - 1, phi_block)
        f_prev = prev @ f[np.array(stack.cluster(n - 1).vertices)]
        resid = max(resid, float(np.abs(a[:, k] - (f2 - f_prev)).max()))

    t = np.zeros(stack.depth + 1)
    for n in range(stack.depth + 1):
        qf = stack.growth_adjoint_apply(n, f)
        t[n] = float(qf @ qf)
    var_targets = np.array([t[n2] - t[n - 1] for n in levels])
    report = SweepReport(f=f, n1=n1, n2=n2, identity_residual=resid,
                         identity_scale=scale, variance_targets=var_targets)
    if trials:
        target = np.empty((len(levels), len(levels)))
        for i, n in enumerate(levels):
            for j, m in enumerate(levels):
                target[i, j] = t[n2] - t[max(n, m) - 1]
        cov = covariance_report(a, target, seed)
        report.empirical = cov.empirical
        report.zscores = cov.zscores
        report.max_abs_z = cov.max_abs_z
        report.trials = phi_block.shape[0]
        report.seed = seed
    return report


def random_orthogonal(k: int, seed: int) -> np.ndarray:
    """Deterministic random orthogonal matrix (QR with positive diagonal)."""
    z = kernels.normal_block(seed, np.arange(k), 0, k)
    q, r = np.linalg.qr(z)
    return q * np.sign(np.diag(r))[None, :]
