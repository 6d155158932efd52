"""Closed-form sample sizes and tail bounds for sketched least squares.

All functions are pure. Chernoff tails are evaluated in log space and
returned unclamped, so they may exceed 1.
"""

import math
from dataclasses import dataclass, field

from .errors import DomainError

__all__ = [
    "UNIFORM_THETA1",
    "UNIFORM_THETA2",
    "UNIFORM_DELTA",
    "UNIFORM_DELTA3",
    "LEVERAGE_EPS_FACTOR",
    "ChernoffParams",
    "BoundReport",
    "theorem1_sample_size",
    "theorem2_sample_size",
    "chernoff_exponent",
    "chernoff_tail",
    "uniform_sample_size",
    "matmul_expected_bound",
    "beta_error_bound",
    "boost_success",
]

# Constants fixing the uniform-sampling guarantee: c = 1000 mu d (ln d + 7)
# holds with probability >= 0.05 and ||z||^2 <= 1.2 ||y - X b||^2.
UNIFORM_THETA1 = 0.9556
UNIFORM_THETA2 = 1.045
UNIFORM_DELTA = 0.0015
UNIFORM_DELTA3 = 0.947
# leverage sampling needs c >= LEVERAGE_EPS_FACTOR * d / eps (plus an O(d ln d) term)
LEVERAGE_EPS_FACTOR = 400.0


def _ceil(x):
    # absorb float noise such as 16000.000000000002
    return int(math.ceil(round(x, 9)))


@dataclass(frozen=True)
class ChernoffParams:
    """Inputs of the matrix Chernoff tail for sums of PSD matrices.

    ``R`` caps lambda_max of each summand; ``xi_min``/``xi_max`` are c times
    the extreme eigenvalues of the mean summand.
    """

    theta1: float
    theta2: float
    R: float
    xi_min: float
    xi_max: float
    d: int

    def __post_init__(self):
        if not 0 < self.theta1 <= 1:
            raise DomainError(f"theta1 must lie in (0, 1], got {self.theta1}")
        if not self.theta2 > 1:
            raise DomainError(f"theta2 must exceed 1, got {self.theta2}")
        if not (self.R > 0 and self.xi_min > 0 and self.xi_max > 0 and self.d >= 1):
            raise DomainError("R, xi_min, xi_max must be positive and d >= 1")


@dataclass(frozen=True)
class BoundReport:
    name: str
    inputs: dict
    value: float
    c_required: int | None = None
    failure_prob: float | None = None
    notes: dict = field(default_factory=dict)

    def to_dict(self):
        out = {"name": self.name, "inputs": dict(self.inputs), "value": self.value}
        if self.c_required is not None:
            out["c_required"] = self.c_required
        if self.failure_prob is not None:
            out["failure_prob"] = self.failure_prob
        if self.notes:
            out["notes"] = dict(self.notes)
        return out


def theorem1_sample_size(d, eps, c_lnd=20.0):
    """ceil(max(c_lnd * d ln d, 400 d / eps)) for leverage-score sampling.

    ``c_lnd`` stands in for the unstated constant of the d ln d term.
    """
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    if not 0 < eps <= 1:
        raise DomainError(f"eps must lie in (0, 1], got {eps}")
    if c_lnd < 0:
        raise DomainError(f"c_lnd must be nonnegative, got {c_lnd}")
    return _ceil(max(c_lnd * d * math.log(d), LEVERAGE_EPS_FACTOR * d / eps))


def theorem2_sample_size(d, mu):
    """ceil(1000 mu d (ln d + 7)) for uniform sampling."""
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d}")
    if mu < 1:
        raise DomainError(f"coherence must be >= 1, got {mu}")
    return _ceil(1000.0 * mu * d * (math.log(d) + 7.0))


def chernoff_exponent(theta):
    """theta ln theta - theta + 1, the per-unit rate in the Chernoff tail."""
    if theta <= 0:
        raise DomainError(f"theta must be positive, got {theta}")
    return theta * math.log(theta) - theta + 1.0


def chernoff_tail(params, side):
    """d * [e^(theta-1) / theta^theta]^(xi/R) for side ``'min'`` or ``'max'``."""
    if side == "min":
        theta, xi = params.theta1, params.xi_min
    elif side == "max":
        theta, xi = params.theta2, params.xi_max
    else:
        raise DomainError(f"side must be 'min' or 'max', got {side!r}")
    return params.d * math.exp(-(xi / params.R) * chernoff_exponent(theta))


def uniform_sample_size(d, mu, theta1, theta2, delta1, delta2):
    """Smallest c making both Chernoff tails at most delta1 and delta2."""
    if not 0 < theta1 < 1 or not theta2 > 1:
        raise DomainError("need theta1 in (0, 1) and theta2 > 1")
    if not (0 < delta1 < 1 and 0 < delta2 < 1):
        raise DomainError("deltas must lie in (0, 1)")
    if d < 1 or mu < 1:
        raise DomainError("need d >= 1 and mu >= 1")
    den1 = chernoff_exponent(theta1)
    den2 = chernoff_exponent(theta2)
    if den1 <= 0 or den2 <= 0:
        raise DomainError("degenerate theta: Chernoff exponent is not positive")
    return _ceil(max(
        mu * d * math.log(d / delta1) / den1,
        mu * d * math.log(d / delta2) / den2,
    ))


def matmul_expected_bound(X_fro, Y_fro, X_spec, c, variant="frobenius", c_spec=1.0):
    """Bound on E||X^T Y - X^T S^T S Y||_F for leverage row sampling.

    ``frobenius``: X_fro * Y_fro / sqrt(c) (constant exactly 1).
    ``spectral``: c_spec * sqrt(ln c / c) * X_spec * X_fro, the self-product
    variant whose constant is unstated.
    """
    if c < 1:
        raise DomainError(f"c must be >= 1, got {c}")
    if variant == "frobenius":
        return X_fro * Y_fro / math.sqrt(c)
    if variant == "spectral":
        if c < 2:
            raise DomainError("spectral variant needs c >= 2")
        return c_spec * math.sqrt(math.log(c) / c) * X_spec * X_fro
    raise DomainError(f"unknown variant {variant!r}")


def beta_error_bound(eps_or_const, kappa, gamma_val, beta_norm):
    """const * kappa^2 (gamma^-2 - 1) ||b||^2; pass 1.2 for uniform sampling."""
    if not 0 <= gamma_val <= 1:
        raise DomainError(f"gamma must lie in [0, 1], got {gamma_val}")
    if gamma_val == 0:
        return math.inf
    return eps_or_const * kappa**2 * (gamma_val**-2 - 1.0) * beta_norm**2


def boost_success(t):
    """1 - 0.95^t: success probability of the best of t independent trials."""
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    return -math.expm1(t * math.log(0.95))
