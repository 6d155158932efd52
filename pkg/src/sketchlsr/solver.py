"""Sketch-and-solve least squares, error ratios and per-trial certificates.

``solve_sketched`` replaces (X, y) by (SX, Sy) and solves the small c x d
problem by QR. ``certify`` evaluates, for one realized sketch, every
quantity in the deterministic error chain

    ||y - X b~||^2 = ||y - X b||^2 + ||U z||^2,          U z = X (b - b~)
    ||b - b~||^2  <= ||U z||^2 / sigma_min(X)^2
    ||z||         <= ||(SU)^T S (y - X b)|| / sigma_min(SU)^2
    ||y - X b||^2 <= sigma_max(X)^2 (gamma^-2 - 1) ||b||^2

where b is the exact solution and b~ the sketched one.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg

from .errors import DomainError, SamplingError, SketchLSRError
from .linalg import exact_lsr, gamma, is_full_rank, leverage_scores, thin_svd

__all__ = [
    "SketchedSolution",
    "CertificateReport",
    "solve_sketched",
    "error_ratio",
    "certify",
    "best_of_t",
]

# both residuals below ZERO_RTOL * ||y||^2 count as an exact fit
ZERO_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class SketchedSolution:
    beta_tilde: np.ndarray
    c_realized: int
    sketch_kind: str
    residual_sq_full: float
    residual_sq_sketched: float
    rank_deficient: bool = False
    wall_time: float = 0.0
    timings: dict = field(default_factory=dict)

    def to_dict(self, include_timing=False):
        out = {
            "beta_tilde": self.beta_tilde.tolist(),
            "c_realized": self.c_realized,
            "sketch_kind": self.sketch_kind,
            "residual_sq_full": self.residual_sq_full,
            "residual_sq_sketched": self.residual_sq_sketched,
            "rank_deficient": self.rank_deficient,
        }
        if include_timing:
            out["wall_time"] = self.wall_time
            out["timings"] = dict(self.timings)
        return out


@dataclass(frozen=True)
class CertificateReport:
    """All quantities of the deterministic error chain for one sketch."""

    sigma_min_SU: float
    sigma_max_SU: float
    cross_term: float
    z_norm: float
    uz_norm_sq: float
    equality_gap: float
    z_bound: float
    beta_gap_sq: float
    beta_gap_bound: float
    residual_sq_exact: float
    residual_sq_sketched: float
    gamma: float
    final_bound: float
    y_norm_sq: float
    sigma_min_X: float

    def checks(self, rtol=1e-8):
        """Map each identity/inequality to whether it holds at ``rtol``.

        Slack is relative to the natural scale of each side: ||y||^2 for
        squared residuals, ||y|| for z, ||y||^2 / sigma_min(X)^2 for the
        squared coefficient gap.
        """
        ysq = self.y_norm_sq
        beta_scale = ysq / self.sigma_min_X**2 if self.sigma_min_X > 0 else math.inf
        return {
            "equality": self.equality_gap <= rtol * ysq,
            "beta_gap": self.beta_gap_sq
            <= self.beta_gap_bound * (1 + rtol) + rtol * beta_scale,
            "z_bound": self.z_norm <= self.z_bound * (1 + rtol) + rtol * math.sqrt(ysq),
            "final": self.residual_sq_exact <= self.final_bound * (1 + rtol) + rtol * ysq,
        }

    def violations(self, rtol=1e-8):
        return [name for name, ok in self.checks(rtol).items() if not ok]

    def to_dict(self):
        return asdict(self)


def _sq(v):
    return float(v @ v)


def solve_sketched(problem, op):
    """Minimize ||S y - S X b|| over b.

    Uses QR of SX; falls back to the minimum-norm SVD solution (and sets
    ``rank_deficient``) when SX is rank deficient under the rank tolerance.
    """
    if op.n != problem.n:
        raise DomainError(f"sketch built for n={op.n}, problem has n={problem.n}")
    if op.rows == 0:
        raise SamplingError("sketch realized zero rows")
    t0 = time.perf_counter()
    SX = op.apply(problem.X)
    Sy = op.apply(problem.y)
    t1 = time.perf_counter()
    c, d = SX.shape
    rank_deficient = c < d
    if not rank_deficient:
        Q, R = scipy.linalg.qr(SX, mode="economic", check_finite=False)
        sv = scipy.linalg.svdvals(R, check_finite=False)
        rank_deficient = not is_full_rank(sv, c, d)
    if rank_deficient:
        beta, *_ = np.linalg.lstsq(SX, Sy, rcond=None)
    else:
        beta = scipy.linalg.solve_triangular(R, Q.T @ Sy, check_finite=False)
    t2 = time.perf_counter()
    r_full = problem.y - problem.X @ beta
    r_sk = Sy - SX @ beta
    beta.setflags(write=False)
    return SketchedSolution(
        beta_tilde=beta,
        c_realized=int(c),
        sketch_kind=op.kind,
        residual_sq_full=_sq(r_full),
        residual_sq_sketched=_sq(r_sk),
        rank_deficient=bool(rank_deficient),
        wall_time=time.perf_counter() - t0,
        timings={"apply": t1 - t0, "solve": t2 - t1},
    )


def error_ratio(problem, solution, exact_residual_sq=None):
    """||y - X b~||^2 / ||y - X b||^2, with 0/0 read as 1 and x/0 as +inf."""
    if exact_residual_sq is None:
        _, exact_residual_sq = exact_lsr(problem)
    tol = ZERO_RTOL * _sq(problem.y)
    if exact_residual_sq <= tol:
        return 1.0 if solution.residual_sq_full <= tol else math.inf
    return solution.residual_sq_full / exact_residual_sq


def certify(problem, svd, op, solution, beta_lsr=None):
    """Evaluate the deterministic error chain for one realized sketch.

    ``z`` is computed as U^T X (b - b~), valid because X (b - b~) lies in
    range(U). The cross term is ||(SU)^T (S r)||, never forming U_perp.
    A singular SU gives ``z_bound = inf`` rather than an error.
    """
    if beta_lsr is None:
        beta_lsr, _ = exact_lsr(problem, svd)
    U = svd.U
    y = problem.y
    r = y - problem.X @ beta_lsr
    SU = op.apply(U)
    sv = scipy.linalg.svdvals(SU, check_finite=False) if SU.shape[0] else np.zeros(1)
    d = U.shape[1]
    smin = float(sv[d - 1]) if sv.shape[0] >= d else 0.0
    smax = float(sv[0])
    cross = float(np.linalg.norm(SU.T @ op.apply(r)))
    delta = beta_lsr - solution.beta_tilde
    z = U.T @ (problem.X @ delta)
    uz_sq = _sq(U @ z)
    res_exact = _sq(r)
    res_sketch = _sq(y - problem.X @ solution.beta_tilde)
    if smin == 0.0 or solution.rank_deficient:
        z_bound = math.inf
    else:
        z_bound = cross / smin**2
    g = gamma(problem, svd) if _sq(y) > 0 else 1.0
    bnorm_sq = _sq(beta_lsr)
    final = math.inf if g == 0 else svd.sigma_max**2 * (g**-2 - 1.0) * bnorm_sq
    return CertificateReport(
        sigma_min_SU=smin,
        sigma_max_SU=smax,
        cross_term=cross,
        z_norm=float(np.linalg.norm(z)),
        uz_norm_sq=uz_sq,
        equality_gap=abs(res_sketch - res_exact - uz_sq),
        z_bound=z_bound,
        beta_gap_sq=_sq(delta),
        beta_gap_bound=uz_sq / svd.sigma_min**2,
        residual_sq_exact=res_exact,
        residual_sq_sketched=res_sketch,
        gamma=g,
        final_bound=max(final, 0.0),
        y_norm_sq=_sq(y),
        sigma_min_X=svd.sigma_min,
    )


def best_of_t(problem, sampler, t, rng, svd=None, threads=1):
    """Run ``t`` independent sketches and keep the smallest full residual.

    Trial i draws from stream ``rng.stream + i``. Returns the winning
    solution and the per-trial error ratios (``inf`` for failed trials).
    Errors propagate only if every trial fails.
    """
    if t < 1:
        raise DomainError(f"t must be >= 1, got {t}")
    if svd is None:
        svd = thin_svd(problem.X)
    _, res_exact = exact_lsr(problem, svd)
    profile = leverage_scores(svd) if sampler.kind == "leverage" else None

    def trial(i):
        try:
            op = sampler.draw(problem.n, rng.with_stream(rng.stream + i), profile)
            return solve_sketched(problem, op)
        except SketchLSRError as exc:
            return exc

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(trial, range(t)))
    else:
        results = [trial(i) for i in range(t)]

    ratios = [
        math.inf if isinstance(s, Exception) else error_ratio(problem, s, res_exact)
        for s in results
    ]
    solved = [s for s in results if not isinstance(s, Exception)]
    if not solved:
        raise results[-1]
    best = min(solved, key=lambda s: s.residual_sq_full)
    return best, ratios
