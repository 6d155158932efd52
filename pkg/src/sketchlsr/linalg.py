"""Dense linear algebra for overdetermined least squares.

Thin SVD with a reproducible sign convention, exact least-squares solves,
statistical leverage scores, coherence, the range fraction ``gamma`` of the
response and the residual orthogonal to the column space.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, FactorizationError, RankError

__all__ = [
    "RANK_RTOL",
    "RegressionProblem",
    "ThinSVD",
    "LeverageProfile",
    "thin_svd",
    "is_full_rank",
    "check_full_rank",
    "exact_lsr",
    "leverage_scores",
    "gamma",
    "condition_number",
    "orthogonal_residual",
]

# X is full rank iff sigma_min > RANK_RTOL * max(n, d) * sigma_max.
RANK_RTOL = 1e-12


def _frozen(a):
    a = np.array(a, dtype=np.float64, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class RegressionProblem:
    """The pair (X, y) with X of shape (n, d), n >= d >= 1.

    Arrays are copied and made read-only. Rank is checked lazily by the
    operations that need it (``thin_svd`` consumers), not here.
    """

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = _frozen(self.X)
        y = _frozen(self.y)
        if X.ndim != 2:
            raise DomainError(f"X must be 2-D, got shape {X.shape}")
        if y.ndim == 2 and y.shape[1] == 1:
            y = _frozen(y[:, 0])
        if y.ndim != 1:
            raise DomainError(f"y must be a vector, got shape {y.shape}")
        n, d = X.shape
        if d < 1 or n < d:
            raise DomainError(f"need n >= d >= 1, got n={n}, d={d}")
        if y.shape[0] != n:
            raise DomainError(f"y has length {y.shape[0]}, X has {n} rows")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise DomainError("X and y must be finite")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def d(self):
        return self.X.shape[1]


@dataclass(frozen=True, eq=False)
class ThinSVD:
    """X = U diag(sigma) V^T with U (n, d), sigma nonincreasing, V (d, d)."""

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray

    @property
    def shape(self):
        return self.U.shape

    @property
    def sigma_max(self):
        return float(self.sigma[0])

    @property
    def sigma_min(self):
        return float(self.sigma[-1])


@dataclass(frozen=True, eq=False)
class LeverageProfile:
    scores: np.ndarray
    d: int
    coherence_mu: float

    @property
    def n(self):
        return self.scores.shape[0]


def thin_svd(X):
    """Thin SVD of an (n, d) matrix with n >= d.

    Each singular-vector pair is flipped so that the largest-magnitude entry
    of every column of U is positive, which makes the factors reproducible.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DomainError(f"X must be 2-D, got shape {X.shape}")
    n, d = X.shape
    if n < d:
        raise DomainError(f"thin_svd needs n >= d, got {X.shape}")
    if not np.all(np.isfinite(X)):
        raise DomainError("X must be finite")
    try:
        U, sigma, Vt = np.linalg.svd(X, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(
            f"SVD did not converge for {n}x{d} matrix", shape=(n, d)
        ) from exc
    pivot = np.abs(U).argmax(axis=0)
    flip = np.sign(U[pivot, np.arange(d)])
    flip[flip == 0] = 1.0
    U = U * flip
    V = Vt.T * flip
    return ThinSVD(_frozen(U), _frozen(sigma), _frozen(V))


def is_full_rank(sigma, n, d):
    sigma = np.asarray(sigma)
    if sigma.size == 0 or sigma[0] == 0:
        return False
    return bool(sigma[-1] > RANK_RTOL * max(n, d) * sigma[0])


def check_full_rank(svd):
    n, d = svd.shape
    if not is_full_rank(svd.sigma, n, d):
        ratio = svd.sigma_min / svd.sigma_max if svd.sigma_max > 0 else 0.0
        raise RankError(
            f"matrix of shape {n}x{d} is rank deficient: "
            f"sigma_min/sigma_max = {ratio:.3e}",
            ratio=ratio,
        )


def exact_lsr(problem, svd=None):
    """Exact least-squares solution through the thin SVD.

    Returns ``(beta, residual_sq)`` with ``residual_sq = ||y - X beta||^2``.
    """
    if svd is None:
        svd = thin_svd(problem.X)
    check_full_rank(svd)
    beta = svd.V @ ((svd.U.T @ problem.y) / svd.sigma)
    r = problem.y - problem.X @ beta
    return beta, float(r @ r)


def leverage_scores(svd):
    """Row leverage scores l_i = ||U[i, :]||^2 and the coherence (n/d) max l_i."""
    n, d = svd.shape
    scores = np.einsum("ij,ij->i", svd.U, svd.U)
    np.clip(scores, 0.0, 1.0, out=scores)
    scores.setflags(write=False)
    return LeverageProfile(scores, d, float(n / d * scores.max()))


def gamma(problem, svd):
    """||U U^T y|| / ||y||, the largest admissible range fraction of y."""
    ynorm = np.linalg.norm(problem.y)
    if ynorm == 0:
        raise DomainError("gamma is undefined for y = 0")
    return float(min(np.linalg.norm(svd.U.T @ problem.y) / ynorm, 1.0))


def condition_number(svd):
    check_full_rank(svd)
    return svd.sigma_max / svd.sigma_min


def orthogonal_residual(problem, svd):
    """y - U (U^T y), i.e. the component of y outside range(X)."""
    return problem.y - svd.U @ (svd.U.T @ problem.y)
