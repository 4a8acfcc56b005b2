"""The verification ladder: every exact operator identity, then every
distributional claim, in dependency order.

Exact identities are checked at a relative max-norm tolerance (1e-10 by
default, 1e-12 for per-sample algebraic identities). Distributional claims
are Monte Carlo checks with a fixed seed; each empirical moment must sit
within `z_max` standard errors of its exact target.

Rungs run in order and later rungs reuse earlier operators, but a failure
does not stop the ladder: each rung records its own statistic, or the error
code that prevented it. This is what gives tampering fixtures a precise
failure point.
"""

from __future__ import annotations

import numpy as np

from .errors import DGFFError
from .foliation import Foliation
from .graph import Graph
from .hadamard import OperatorStack, verify_hadamard_identity, verify_isometry
from .sampling import (
    GaussianStream,
    brownian_check,
    covariance_report,
    cross_covariance_zmax,
    dgff_block,
    known_mean_covariance,
    oracle_block,
    sweep_average_check,
    two_sample_zmax,
    wnf_block,
)

TOL_EXACT = 1e-10
TOL_STRICT = 1e-12
Z_MAX = 5.0
INCREMENT_SAMPLES = 100


class _Ladder:
    def __init__(self):
        self.checks: list[dict] = []

    def run(self, name: str, kind: str, threshold: float, fn) -> None:
        row = {"name": name, "kind": kind, "threshold": threshold}
        try:
            stat = fn()
        except DGFFError as e:
            row.update(statistic=None, passed=False, error=e.code, message=str(e))
        else:
            if stat is None:
                row.update(statistic=None, passed=True, skipped=True)
            else:
                row.update(statistic=float(stat), passed=bool(stat <= threshold))
        self.checks.append(row)


def run_ladder(graph: Graph, fol: Foliation, seed: int = 42, trials: int = 100_000,
               tol_exact: float = TOL_EXACT, tol_strict: float = TOL_STRICT,
               z_max: float = Z_MAX, increment_samples: int = INCREMENT_SAMPLES,
               stack: OperatorStack | None = None, collect_reports: bool = False) -> dict:
    """Run every check on a validated graph + foliation; returns the report.

    A prebuilt (possibly deliberately corrupted) `stack` may be supplied;
    negative-control tests use this to pin down which rung a defect trips.
    With `collect_reports` the result carries the detailed statistical
    reports (empirical and target moments) under a "reports" key.
    """
    if trials < 0:
        raise DGFFError("trials must be nonnegative", code="BadFormat")
    if tol_exact <= 0 or tol_strict <= 0 or z_max <= 0:
        raise DGFFError("tolerances must be positive", code="BadFormat")
    if stack is None:
        stack = OperatorStack(graph, fol)
    depth = stack.depth
    stream = GaussianStream(seed)

    def green_inverse():
        worst = 0.0
        for n in range(depth + 1):
            a = stack.laplacian(n)
            gn = stack.green(n).normalized
            eye = np.eye(a.shape[0])
            worst = max(worst, float(np.abs(a @ gn - eye).max()),
                        float(np.abs(gn @ a - eye).max()))
        return worst

    def green_symmetry():
        worst = 0.0
        for n in range(depth + 1):
            k = stack.green(n)
            weighted = k.pi[:, None] * k.unnormalized
            scale = max(float(np.abs(weighted).max()), 1.0)
            worst = max(worst, float(np.abs(weighted - weighted.T).max()) / scale)
        return worst

    def green_positive():
        worst = 0.0
        for n in range(depth + 1):
            k = stack.green(n)
            scale = max(float(np.abs(k.normalized).max()), 1.0)
            worst = max(worst, max(0.0, -float(k.normalized.min())) / scale,
                        max(0.0, -float(np.diag(k.normalized).min())) / scale)
        return worst

    def poisson_bounds():
        worst = 0.0
        for n in range(depth + 1):
            p = stack.poisson(n)
            worst = max(worst,
                        max(0.0, -float(p.min())),
                        max(0.0, float(p.max()) - 1.0),
                        max(0.0, float(p.sum(axis=1).max()) - 1.0))
        return worst

    def poisson_harmonic():
        worst = 0.0
        for n in range(1, depth + 1):
            a = stack.laplacian(n)
            p = stack.poisson(n)
            interior = a.shape[0] - (stack.cluster(n).layer_start[n + 1]
                                     - stack.cluster(n).layer_start[n])
            resid = (a @ p)[:interior, :]
            worst = max(worst, float(np.abs(resid).max()) / max(float(np.abs(a).max()), 1.0))
        return worst

    def green_variation():
        if depth == 0:
            return None
        worst = 0.0
        for n in range(1, depth + 1):
            scale = max(float(np.abs(stack.green(n).unnormalized).max()), 1.0)
            worst = max(worst, stack.variation_residual(n) / scale)
        return worst

    def green_monotone():
        if depth == 0:
            return None
        worst = 0.0
        for n in range(1, depth + 1):
            g_n = stack.green(n).unnormalized
            k_prev = stack.cluster(n - 1).size
            diff = g_n.copy()
            diff[:k_prev, :k_prev] -= stack.green(n - 1).unnormalized
            scale = max(float(np.abs(g_n).max()), 1.0)
            worst = max(worst, max(0.0, -float(diff.min())) / scale)
        return worst

    def hadamard_identity():
        worst = 0.0
        for n in range(depth + 1):
            gn = stack.green(n).normalized
            scale = max(float(np.abs(gn).max()), 1.0)
            worst = max(worst, verify_hadamard_identity(stack.growth(n), gn) / scale)
        return worst

    def isometry():
        worst = 0.0
        for n in range(depth + 1):
            worst = max(worst, verify_isometry(graph, stack.cluster(n), stack.growth(n)))
        return worst

    def increment_identity():
        if depth == 0:
            return None
        top = stack.cluster(depth)
        block = wnf_block(top.vertices, stream, increment_samples)
        worst = 0.0
        for n in range(1, depth + 1):
            hi = dgff_block(stack, n, block)
            lo = dgff_block(stack, n - 1, block)
            diff = hi.copy()
            diff[:, : lo.shape[1]] -= lo
            layer = top.layer_slice(n)
            other = block[:, layer] @ stack.layer_sqrt(n).T @ stack.poisson(n).T
            scale = max(float(np.abs(diff).max()), 1.0)
            worst = max(worst, float(np.abs(diff - other).max()) / scale)
        return worst

    def increment_harmonic():
        if depth == 0:
            return None
        top = stack.cluster(depth)
        block = wnf_block(top.vertices, stream, increment_samples)
        worst = 0.0
        for n in range(1, depth + 1):
            hi = dgff_block(stack, n, block)
            lo = dgff_block(stack, n - 1, block)
            diff = hi.copy()
            diff[:, : lo.shape[1]] -= lo
            a = stack.laplacian(n)
            interior = stack.cluster(n - 1).size
            resid = (a @ diff.T)[:interior, :]
            scale = max(float(np.abs(diff).max()), 1.0) * max(float(np.abs(a).max()), 1.0)
            worst = max(worst, float(np.abs(resid).max()) / scale)
        return worst

    mc: dict[str, np.ndarray] = {}

    def _need(key: str) -> np.ndarray:
        if key not in mc:
            raise DGFFError(f"prerequisite rung did not produce {key!r}",
                            code="PrerequisiteFailed")
        return mc[key]

    reports: dict[str, dict] = {}

    def dgff_covariance():
        top = stack.cluster(depth)
        mc["phi"] = wnf_block(top.vertices, stream, trials)
        worst = 0.0
        for n in range(depth + 1):
            samples = dgff_block(stack, n, mc["phi"])
            mc[f"dgff{n}"] = known_mean_covariance(samples)
            rep = covariance_report(samples, stack.green(n).normalized, seed)
            worst = max(worst, rep.max_abs_z)
            if collect_reports and n == depth:
                reports["covariance"] = rep.to_json()
        return worst

    def oracle_covariance():
        worst = 0.0
        for n in range(depth + 1):
            samples = oracle_block(stack.green(n), stream, trials)
            mc[f"oracle{n}"] = known_mean_covariance(samples)
            rep = covariance_report(samples, stack.green(n).normalized, seed)
            worst = max(worst, rep.max_abs_z)
        return worst

    def oracle_agreement():
        worst = 0.0
        for n in range(depth + 1):
            target = stack.green(n).normalized
            worst = max(worst, two_sample_zmax(_need(f"dgff{n}"), trials,
                                               _need(f"oracle{n}"), trials, target))
        return worst

    def increment_independence():
        if depth == 0:
            return None
        phi = _need("phi")
        blocks = []
        variances = []
        prev = dgff_block(stack, 0, phi)
        blocks.append(prev)
        variances.append(np.diag(stack.green(0).normalized))
        for n in range(1, depth + 1):
            hi = dgff_block(stack, n, phi)
            diff = hi.copy()
            diff[:, : prev.shape[1]] -= prev
            blocks.append(diff)
            var = np.diag(stack.green(n).normalized).copy()
            var[: prev.shape[1]] -= np.diag(stack.green(n - 1).normalized)
            variances.append(var)
            prev = hi
        worst = 0.0
        for i in range(len(blocks)):
            for j in range(i + 1, len(blocks)):
                worst = max(worst, cross_covariance_zmax(
                    blocks[i], blocks[j], variances[i], variances[j]))
        return worst

    def brownian():
        top = stack.cluster(depth)
        f = np.zeros(graph.n_vertices)
        f[np.array(top.vertices)] = stream.draw(top.vertices)
        rep = brownian_check(stack, f, trials=trials, seed=seed, phi_block=mc.get("phi"))
        if collect_reports:
            reports["brownian"] = rep.to_json()
        if rep.pythagoras_residual > tol_strict * max(rep.variance_targets.max(), 1.0):
            return np.inf
        if not rep.targets_monotone:
            return np.inf
        return rep.max_abs_z

    def sweep():
        if depth == 0:
            return None
        base = stack.cluster(1)
        f = np.zeros(graph.n_vertices)
        f[np.array(base.vertices)] = stream.draw(base.vertices)
        rep = sweep_average_check(stack, f, 1, depth, trials=trials, seed=seed,
                                  phi_block=mc.get("phi"))
        if collect_reports:
            reports["sweep"] = rep.to_json()
        if rep.identity_residual > tol_exact * rep.identity_scale:
            return np.inf
        return rep.max_abs_z

    ladder = _Ladder()
    ladder.run("green_inverse", "exact", tol_exact, green_inverse)
    ladder.run("green_symmetry", "exact", tol_exact, green_symmetry)
    ladder.run("green_positive", "exact", tol_exact, green_positive)
    ladder.run("poisson_bounds", "exact", tol_exact, poisson_bounds)
    ladder.run("poisson_harmonic", "exact", tol_exact, poisson_harmonic)
    ladder.run("green_variation", "exact", tol_exact, green_variation)
    ladder.run("green_monotone", "exact", tol_strict, green_monotone)
    ladder.run("hadamard_identity", "exact", tol_exact, hadamard_identity)
    ladder.run("isometry", "exact", tol_exact, isometry)
    ladder.run("increment_identity", "exact", tol_strict, increment_identity)
    ladder.run("increment_harmonic", "exact", tol_exact, increment_harmonic)
    if trials:
        ladder.run("dgff_covariance", "statistical", z_max, dgff_covariance)
        ladder.run("oracle_covariance", "statistical", z_max, oracle_covariance)
        ladder.run("oracle_agreement", "statistical", z_max, oracle_agreement)
        ladder.run("increment_independence", "statistical", z_max, increment_independence)
        ladder.run("brownian_moments", "statistical", z_max, brownian)
        ladder.run("sweep_moments", "statistical", z_max, sweep)

    out = {
        "schema": 1,
        "seed": seed,
        "trials": trials,
        "depth": depth,
        "tolerances": {"exact": tol_exact, "strict": tol_strict, "z_max": z_max},
        "checks": ladder.checks,
        "pass": all(row["passed"] for row in ladder.checks),
    }
    if collect_reports:
        out["reports"] = reports
    return out
