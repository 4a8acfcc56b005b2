"""Discrete Gaussian free fields on weighted graphs, grown layer by layer.

The package builds the per-cluster operator family of a foliated graph
(Laplacian, Green and Poisson kernels, boundary square roots, the growth
operator), verifies their exact identities, and samples white noise / DGFF
fields with a seeded counter-based generator plus a Cholesky oracle for
cross-checking distributions.
"""

from .errors import (
    ConvergenceError,
    DGFFError,
    FoliationError,
    GraphError,
    NotPositiveDefiniteError,
    NotPositiveSemidefiniteError,
    NotSymmetricError,
    SupportViolationError,
)
from .foliation import (
    Foliation,
    GrowthCluster,
    bfs_foliate,
    cluster,
    load_foliation,
    parse_foliation,
    validate_foliation,
)
from .graph import (
    EdgeField,
    Graph,
    coboundary,
    delta,
    dirichlet_inner,
    divergence,
    from_edges,
    load_graph,
    parse_graph,
    recompute_pi,
)
from .hadamard import (
    OperatorStack,
    hadamard_Q,
    kernel_K,
    layer_sqrt,
    solve_growth,
    verify_hadamard_identity,
    verify_isometry,
)
from .linalg import EigenDecomposition, cholesky, jacobi_eigen, psd_sqrt, solve_spd
from .operators import (
    GreenKernel,
    boundary_green,
    green,
    laplacian,
    poisson,
    verify_green_variation,
)
from .sampling import (
    BrownianReport,
    CovarianceReport,
    FieldSample,
    GaussianStream,
    SweepReport,
    brownian_check,
    covariance_report,
    grow_dgff,
    increment,
    increment_via_layer_noise,
    oracle_dgff,
    sample_wnf,
    sweep_average_check,
)
from .verify import run_ladder

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
