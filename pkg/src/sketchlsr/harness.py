"""Seeded Monte Carlo experiments for sketched least squares.

A :class:`ProblemSpec` pins down a synthetic problem with prescribed
coherence, condition number and range fraction ``gamma``; an
:class:`ExperimentConfig` adds a sampler, a grid of sketch sizes and a
trial count. :func:`run_experiment` draws every trial from its own stream
``(master_seed, trial_stream(c_index, trial_index))``, so results do not
depend on thread count or on how many trials follow.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from statistics import NormalDist

import jsonschema
import numpy as np

from .errors import CertificateViolation, ConfigError, DomainError
from .linalg import (
    RegressionProblem,
    condition_number,
    exact_lsr,
    gamma,
    leverage_scores,
    thin_svd,
)
from .sketches import KINDS, SamplerConfig, SeededRng, trial_stream
from .solver import certify, error_ratio, solve_sketched

__all__ = [
    "PROFILES",
    "CSV_COLUMNS",
    "EXPERIMENT_SCHEMA",
    "ProblemSpec",
    "GeneratedProblem",
    "ExperimentConfig",
    "CStats",
    "TrialStats",
    "generate_problem",
    "run_experiment",
    "wilson_interval",
    "estimate_success_rate",
]

PROFILES = ("incoherent", "spiked", "one_hot")
CSV_COLUMNS = ("c", "rate", "ci_low", "ci_high", "p50", "p90", "p99", "max", "mean_wall_time")
PARAMETERS_ORIGIN = "desk-scale settings chosen by the user; no published protocol exists"


@dataclass(frozen=True)
class ProblemSpec:
    n: int
    d: int
    coherence: str = "incoherent"
    spike_count: int = 0
    kappa: float = 1.0
    gamma: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.d < 1 or self.n < self.d:
            raise DomainError(f"need n >= d >= 1, got n={self.n}, d={self.d}")
        if self.coherence not in PROFILES:
            raise DomainError(f"coherence must be one of {PROFILES}, got {self.coherence!r}")
        if self.coherence == "spiked" and not 1 <= self.spike_count <= self.d:
            raise DomainError(f"spike_count must lie in [1, d], got {self.spike_count}")
        if self.kappa < 1:
            raise DomainError(f"kappa must be >= 1, got {self.kappa}")
        if self.d == 1 and self.kappa != 1:
            raise DomainError("a single column always has kappa = 1")
        if not 0 < self.gamma <= 1:
            raise DomainError(f"gamma must lie in (0, 1], got {self.gamma}")
        if self.gamma < 1 and self.n == self.d:
            raise DomainError("gamma < 1 needs n > d: range(X) is the whole space")


@dataclass(frozen=True, eq=False)
class GeneratedProblem:
    problem: RegressionProblem
    beta_star: np.ndarray
    mu: float
    gamma: float
    kappa: float


def _orthonormal(gen, n, d):
    Q, R = np.linalg.qr(gen.standard_normal((n, d)))
    return Q * np.sign(np.diag(R))


def generate_problem(spec, rng=None):
    """Build X = U diag(sigma) V^T and y = X b* + w with w orthogonal to range(X).

    ``incoherent`` orthonormalizes a Gaussian matrix; ``spiked`` pins
    ``spike_count`` rows of U to distinct coordinate directions (leverage 1)
    and fills the other columns orthonormally on the remaining rows;
    ``one_hot`` pins all d columns that way. sigma is geometric from kappa
    down to 1. The noise norm is set so that gamma is met exactly.
    """
    gen = (rng or SeededRng(spec.seed)).generator()
    n, d = spec.n, spec.d
    if spec.coherence == "incoherent":
        U = _orthonormal(gen, n, d)
    else:
        k = d if spec.coherence == "one_hot" else spec.spike_count
        spikes = np.sort(gen.choice(n, size=k, replace=False))
        U = np.zeros((n, d))
        U[spikes, np.arange(k)] = 1.0
        if k < d:
            rest = np.setdiff1d(np.arange(n), spikes)
            U[np.ix_(rest, np.arange(k, d))] = _orthonormal(gen, n - k, d - k)
    sigma = np.geomspace(spec.kappa, 1.0, d)
    V = _orthonormal(gen, d, d)
    X = (U * sigma) @ V.T
    beta_star = gen.standard_normal(d)
    y_range = X @ beta_star
    if spec.gamma < 1:
        g = gen.standard_normal(n)
        w = g - U @ (U.T @ g)
        w *= np.linalg.norm(y_range) * math.sqrt(spec.gamma**-2 - 1.0) / np.linalg.norm(w)
        y = y_range + w
    else:
        y = y_range
    problem = RegressionProblem(X, y)
    svd = thin_svd(problem.X)
    return GeneratedProblem(
        problem=problem,
        beta_star=beta_star,
        mu=leverage_scores(svd).coherence_mu,
        gamma=gamma(problem, svd),
        kappa=condition_number(svd),
    )


EXPERIMENT_SCHEMA = {
    "type": "object",
    "required": ["problem", "sampler", "c_grid", "trials"],
    "additionalProperties": False,
    "properties": {
        "problem": {
            "type": "object",
            "required": ["n", "d"],
            "additionalProperties": False,
            "properties": {
                "n": {"type": "integer", "minimum": 1},
                "d": {"type": "integer", "minimum": 1},
                "coherence": {"enum": list(PROFILES)},
                "spike_count": {"type": "integer", "minimum": 0},
                "kappa": {"type": "number", "minimum": 1},
                "gamma": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "seed": {"type": "integer", "minimum": 0},
            },
        },
        "sampler": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": list(KINDS)},
                "literal_weights": {"type": "boolean"},
            },
        },
        "c_grid": {
            "type": "array",
            "minItems": 1,
            "items": {"type": "integer", "minimum": 1},
        },
        "trials": {"type": "integer", "minimum": 1},
        "eps": {"type": "number", "exclusiveMinimum": 0},
        "success_threshold": {"type": "number", "minimum": 1},
        "master_seed": {"type": "integer", "minimum": 0},
    },
}


def _pointer(path):
    return "".join(f"/{p}" for p in path)


@dataclass(frozen=True)
class ExperimentConfig:
    problem: ProblemSpec
    sampler: str
    c_grid: tuple
    trials: int
    eps: float = 0.5
    success_threshold: float | None = None
    master_seed: int = 0
    literal_weights: bool = False

    def __post_init__(self):
        object.__setattr__(self, "c_grid", tuple(int(c) for c in self.c_grid))
        if self.sampler not in KINDS:
            raise ConfigError(f"unknown sampler {self.sampler!r}", "/sampler/kind")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1", "/trials")
        if not self.c_grid:
            raise ConfigError("c_grid must be nonempty", "/c_grid")
        for i, c in enumerate(self.c_grid):
            if c < 1:
                raise ConfigError(f"sketch size {c} must be >= 1", f"/c_grid/{i}")
            if self.sampler in ("uniform", "srht") and c > self.problem.n:
                raise ConfigError(
                    f"sketch size {c} exceeds n={self.problem.n} for sampling without "
                    "replacement", f"/c_grid/{i}",
                )
        if self.success_threshold is None:
            default = 2.2 if self.sampler == "uniform" else 1.0 + self.eps
            object.__setattr__(self, "success_threshold", default)

    @classmethod
    def from_dict(cls, data):
        """Validate against :data:`EXPERIMENT_SCHEMA` and build a config.

        Raises :class:`ConfigError` carrying a JSON pointer to the bad field.
        """
        validator = jsonschema.Draft7Validator(EXPERIMENT_SCHEMA)
        errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
        if errors:
            err = errors[0]
            raise ConfigError(err.message, _pointer(err.absolute_path))
        try:
            problem = ProblemSpec(**data["problem"])
        except DomainError as exc:
            raise ConfigError(str(exc), "/problem") from exc
        sampler = data["sampler"]
        return cls(
            problem=problem,
            sampler=sampler["kind"],
            literal_weights=sampler.get("literal_weights", False),
            c_grid=data["c_grid"],
            trials=data["trials"],
            eps=data.get("eps", 0.5),
            success_threshold=data.get("success_threshold"),
            master_seed=data.get("master_seed", 0),
        )

    def to_dict(self):
        return {
            "problem": asdict(self.problem),
            "sampler": {"kind": self.sampler, "literal_weights": self.literal_weights},
            "c_grid": list(self.c_grid),
            "trials": self.trials,
            "eps": self.eps,
            "success_threshold": self.success_threshold,
            "master_seed": self.master_seed,
        }


def wilson_interval(successes, trials, level=0.95):
    """Wilson score interval for a binomial proportion."""
    if trials < 1 or not 0 <= successes <= trials:
        raise DomainError(f"invalid counts {successes}/{trials}")
    z = NormalDist().inv_cdf(0.5 + level / 2)
    p = successes / trials
    z2n = z * z / trials
    center = (p + z2n / 2) / (1 + z2n)
    half = z / (1 + z2n) * math.sqrt(p * (1 - p) / trials + z2n / (4 * trials))
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True, eq=False)
class CStats:
    """Aggregate over all trials at one sketch size."""

    c: int
    trials: int
    success_count: int
    ratios: tuple
    c_realized: tuple
    wall_times: tuple
    certificate_violations: int
    rank_deficient: int

    @property
    def rate(self):
        return self.success_count / self.trials

    @property
    def wilson(self):
        return wilson_interval(self.success_count, self.trials)

    def quantile(self, q):
        # order statistic, so infinite ratios never produce nan
        return float(np.quantile(np.asarray(self.ratios), q, method="inverted_cdf"))

    @property
    def mean_c_realized(self):
        return float(np.mean(self.c_realized))

    @property
    def mean_wall_time(self):
        return float(np.mean(self.wall_times))

    def to_dict(self, include_timing=False):
        lo, hi = self.wilson
        out = {
            "c": self.c,
            "trials": self.trials,
            "success_count": self.success_count,
            "rate": self.rate,
            "wilson_ci_low": lo,
            "wilson_ci_high": hi,
            "p50": self.quantile(0.5),
            "p90": self.quantile(0.9),
            "p99": self.quantile(0.99),
            "max": self.quantile(1.0),
            "mean_c_realized": self.mean_c_realized,
            "certificate_violations": self.certificate_violations,
            "rank_deficient": self.rank_deficient,
            "ratios": list(self.ratios),
        }
        if include_timing:
            out["mean_wall_time"] = self.mean_wall_time
        return out

    def csv_row(self):
        lo, hi = self.wilson
        values = (self.c, self.rate, lo, hi, self.quantile(0.5), self.quantile(0.9),
                  self.quantile(0.99), self.quantile(1.0), self.mean_wall_time)
        return [repr(v) if isinstance(v, float) else str(v) for v in values]


@dataclass(frozen=True, eq=False)
class TrialStats:
    config: ExperimentConfig
    per_c: tuple
    achieved: dict = field(default_factory=dict)

    def for_c(self, c):
        for s in self.per_c:
            if s.c == c:
                return s
        raise DomainError(f"sketch size {c} is not in the grid")

    def to_dict(self, include_timing=False):
        return {
            "achieved": dict(self.achieved),
            "success_threshold": self.config.success_threshold,
            "parameters_origin": PARAMETERS_ORIGIN,
            "per_c": [s.to_dict(include_timing) for s in self.per_c],
        }

    def csv_lines(self):
        lines = [",".join(CSV_COLUMNS)]
        lines += [",".join(s.csv_row()) for s in self.per_c]
        return "\n".join(lines) + "\n"


def run_experiment(config, threads=1, rtol=1e-8):
    """Run ``config.trials`` sketch-solve-certify trials per grid size.

    A trial succeeds iff its error ratio is at most the success threshold.
    A failed residual identity aborts the run with :class:`CertificateViolation`
    naming the seed and stream; the inequalities of the chain are counted in
    ``certificate_violations`` (expected zero).
    """
    gp = generate_problem(config.problem)
    problem = gp.problem
    svd = thin_svd(problem.X)
    beta_lsr, res_exact = exact_lsr(problem, svd)
    profile = leverage_scores(svd) if config.sampler == "leverage" else None

    def trial(ci, c, ti):
        stream = trial_stream(ci, ti)
        rng = SeededRng(config.master_seed, stream)
        sampler = SamplerConfig(config.sampler, c, literal_weights=config.literal_weights)
        op = sampler.draw(problem.n, rng, profile)
        sol = solve_sketched(problem, op)
        cert = certify(problem, svd, op, sol, beta_lsr)
        checks = cert.checks(rtol)
        if not checks["equality"]:
            raise CertificateViolation(
                f"residual identity off by {cert.equality_gap:.3e} "
                f"(c={c}, trial={ti})", seed=config.master_seed, stream=stream,
            )
        bad = sum(not ok for ok in checks.values())
        return error_ratio(problem, sol, res_exact), sol.c_realized, sol.wall_time, bad, \
            sol.rank_deficient

    per_c = []
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        for ci, c in enumerate(config.c_grid):
            jobs = range(config.trials)
            if pool is None:
                results = [trial(ci, c, ti) for ti in jobs]
            else:
                results = list(pool.map(lambda ti: trial(ci, c, ti), jobs))
            ratios, realized, walls, bad, rankdef = zip(*results)
            per_c.append(CStats(
                c=c,
                trials=config.trials,
                success_count=sum(r <= config.success_threshold for r in ratios),
                ratios=tuple(ratios),
                c_realized=tuple(realized),
                wall_times=tuple(walls),
                certificate_violations=int(sum(bad)),
                rank_deficient=int(sum(rankdef)),
            ))
    finally:
        if pool is not None:
            pool.shutdown()
    achieved = {"mu": gp.mu, "gamma": gp.gamma, "kappa": gp.kappa,
                "residual_sq_exact": res_exact}
    return TrialStats(config=config, per_c=tuple(per_c), achieved=achieved)


def estimate_success_rate(stats, c):
    """(rate, (ci_low, ci_high)) at sketch size ``c`` with a 95% Wilson interval."""
    s = stats.for_c(c)
    return s.rate, s.wilson
