"""Randomized sketch-and-solve least squares with certified per-trial error.

Submodules: ``linalg`` (thin SVD, exact solves, leverage scores),
``sketches`` (leverage, uniform, SRHT and sparse-embedding operators),
``solver`` (sketched solves, error ratios, certificates, best-of-t),
``bounds`` (sample sizes and tail bounds), ``harness`` (seeded Monte Carlo
experiments), ``mmio`` and ``cli``.
"""

__version__ = "0.1.0"

from .errors import (
    CertificateViolation,
    ConfigError,
    DomainError,
    FactorizationError,
    ParseError,
    RankError,
    SamplingError,
    SketchLSRError,
)
from .linalg import (
    LeverageProfile,
    RegressionProblem,
    ThinSVD,
    condition_number,
    exact_lsr,
    gamma,
    leverage_scores,
    orthogonal_residual,
    thin_svd,
)
from .sketches import (
    SamplerConfig,
    SeededRng,
    apply_sketch,
    densify,
    draw_leverage_sketch,
    draw_sparse_embedding,
    draw_srht,
    draw_uniform_sketch,
    fwht,
    leverage_probabilities,
)
from .solver import CertificateReport, SketchedSolution, best_of_t, certify, error_ratio, solve_sketched
