"""Random sketching operators S of shape (c, n).

Four constructions are provided, each kept in structured form and applied
without forming S densely:

* leverage-score row sampling without replacement (independent Bernoulli
  inclusion with probability p_i = min(1, c * l_i / d), rows reweighted),
* uniform row sampling without replacement (unweighted 0/1 selection),
* the subsampled randomized Hadamard transform sqrt(n2/c) R H D,
* the sparse embedding Phi D (one random sign per input row, hashed into
  one of c buckets).

Every draw takes an explicit :class:`SeededRng`; there is no global state.
"""

from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from . import _hadamard
from .errors import DomainError, SamplingError

__all__ = [
    "KINDS",
    "MAX_RETRIES",
    "SeededRng",
    "trial_stream",
    "SketchOperator",
    "LeverageSketch",
    "UniformSketch",
    "SRHTSketch",
    "SparseEmbedding",
    "SamplerConfig",
    "leverage_probabilities",
    "draw_leverage_sketch",
    "draw_uniform_sketch",
    "draw_srht",
    "draw_sparse_embedding",
    "fwht",
    "apply_sketch",
    "densify",
    "sketch_from_dict",
]

KINDS = ("leverage", "uniform", "srht", "sparse")
MAX_RETRIES = 16


@dataclass(frozen=True)
class SeededRng:
    """A (seed, stream) pair naming an independent, replayable PCG64 stream."""

    seed: int
    stream: int = 0

    def generator(self):
        ss = np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream),))
        return np.random.Generator(np.random.PCG64(ss))

    def with_stream(self, stream):
        return SeededRng(self.seed, stream)


def trial_stream(c_index, trial_index):
    """Stream id for trial ``trial_index`` at grid position ``c_index``."""
    if not (0 <= trial_index < 2**32 and 0 <= c_index < 2**31):
        raise DomainError("grid or trial index out of range for stream packing")
    return (int(c_index) << 32) | int(trial_index)


def _as_rows(M, n):
    M = np.asarray(M, dtype=np.float64)
    vector = M.ndim == 1
    if vector:
        M = M[:, None]
    if M.ndim != 2 or M.shape[0] != n:
        raise DomainError(f"sketch expects {n} rows, got shape {np.shape(M)}")
    return M, vector


def _ro(a, dtype):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SketchOperator:
    """Base class. ``n`` is the source dimension, ``c_target`` the requested size."""

    kind: ClassVar[str] = ""
    n: int
    c_target: int

    @property
    def rows(self):
        """Number of rows of S as realized."""
        return self.c_target

    def apply(self, M):
        M, vector = _as_rows(M, self.n)
        out = self._apply(M)
        return out[:, 0] if vector else out

    def to_dense(self):
        """Dense (rows, n) matrix, built independently of :meth:`apply`."""
        raise NotImplementedError

    def to_dict(self):
        raise NotImplementedError

    def _apply(self, M):
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class LeverageSketch(SketchOperator):
    kind: ClassVar[str] = "leverage"
    indices: np.ndarray = field(default=None)
    weights: np.ndarray = field(default=None)
    probabilities: np.ndarray = field(default=None)
    literal_weights: bool = False

    @property
    def rows(self):
        return int(self.indices.shape[0])

    def _apply(self, M):
        return M[self.indices] * self.weights[:, None]

    def to_dense(self):
        S = np.zeros((self.rows, self.n))
        S[np.arange(self.rows), self.indices] = self.weights
        return S

    def to_dict(self):
        return {
            "kind": self.kind,
            "n": self.n,
            "c_target": self.c_target,
            "indices": self.indices.tolist(),
            "probabilities": self.probabilities.tolist(),
            "literal_weights": self.literal_weights,
        }


@dataclass(frozen=True, eq=False)
class UniformSketch(SketchOperator):
    kind: ClassVar[str] = "uniform"
    indices: np.ndarray = field(default=None)

    def _apply(self, M):
        return M[self.indices]

    def to_dense(self):
        S = np.zeros((self.c_target, self.n))
        S[np.arange(self.c_target), self.indices] = 1.0
        return S

    def to_dict(self):
        return {
            "kind": self.kind,
            "n": self.n,
            "c_target": self.c_target,
            "indices": self.indices.tolist(),
        }


@dataclass(frozen=True, eq=False)
class SRHTSketch(SketchOperator):
    kind: ClassVar[str] = "srht"
    n2: int = 0
    signs: np.ndarray = field(default=None)
    selected: np.ndarray = field(default=None)

    @property
    def scale(self):
        return float(np.sqrt(self.n2 / self.c_target))

    def _apply(self, M):
        M = np.ascontiguousarray(M)
        out = np.empty((self.c_target, M.shape[1]))
        bits = _hadamard.choose_block_bits(self.n2, self.c_target)
        _hadamard.subsampled_signed_fwht(M, self.signs, self.n2, self.selected, bits, out)
        # sqrt(n2/c) * (1/sqrt(n2)) from the normalized transform
        out *= 1.0 / np.sqrt(self.c_target)
        return out

    def to_dense(self):
        from scipy.linalg import hadamard

        H = hadamard(self.n2).astype(np.float64) / np.sqrt(self.n2)
        S = self.scale * H[self.selected] * self.signs[None, :]
        return S[:, : self.n]

    def to_dict(self):
        return {
            "kind": self.kind,
            "n": self.n,
            "c_target": self.c_target,
            "n2": self.n2,
            "signs": self.signs.astype(int).tolist(),
            "selected": self.selected.tolist(),
        }


@dataclass(frozen=True, eq=False)
class SparseEmbedding(SketchOperator):
    kind: ClassVar[str] = "sparse"
    buckets: np.ndarray = field(default=None)
    signs: np.ndarray = field(default=None)

    def _apply(self, M):
        out = np.empty((self.c_target, M.shape[1]))
        for j in range(M.shape[1]):
            out[:, j] = np.bincount(
                self.buckets, weights=self.signs * M[:, j], minlength=self.c_target
            )
        return out

    def to_dense(self):
        S = np.zeros((self.c_target, self.n))
        S[self.buckets, np.arange(self.n)] = self.signs
        return S

    def to_dict(self):
        return {
            "kind": self.kind,
            "n": self.n,
            "c_target": self.c_target,
            "buckets": self.buckets.tolist(),
            "signs": self.signs.astype(int).tolist(),
        }


def leverage_probabilities(profile, c):
    """p_i = min(1, c * l_i / d)."""
    if c < 1:
        raise DomainError(f"sketch size must be >= 1, got {c}")
    return np.minimum(1.0, c * profile.scores / profile.d)


def draw_leverage_sketch(
    p, rng, c_target=None, d=None, literal_weights=False, max_retries=MAX_RETRIES
):
    """Include row i independently with probability p_i.

    Selected rows carry weight 1/sqrt(p_i), so that E[S^T S] = I. With
    ``literal_weights`` the weight is 1/p_i instead (rows of diag(1/p)).
    An empty selection is redrawn up to ``max_retries`` times.
    """
    p = np.asarray(p, dtype=np.float64)
    if p.ndim != 1 or np.any(p < 0) or np.any(p > 1) or not np.all(np.isfinite(p)):
        raise DomainError("probabilities must be a finite vector in [0, 1]")
    gen = rng.generator()
    for _ in range(max_retries + 1):
        mask = gen.random(p.shape[0]) < p
        if mask.any():
            break
    else:
        raise SamplingError(f"leverage sample empty after {max_retries} redraws")
    idx = np.flatnonzero(mask)
    pk = p[idx]
    w = 1.0 / pk if literal_weights else 1.0 / np.sqrt(pk)
    if c_target is None:
        c_target = int(round(p.sum()))
    return LeverageSketch(
        n=p.shape[0],
        c_target=int(c_target),
        indices=_ro(idx, np.int64),
        weights=_ro(w, np.float64),
        probabilities=_ro(p, np.float64),
        literal_weights=bool(literal_weights),
    )


def _sample_without_replacement(gen, n, c):
    # partial Fisher-Yates over a virtual identity permutation, O(c) memory
    targets = gen.integers(np.arange(c), n)
    moved = {}
    out = np.empty(c, dtype=np.int64)
    for k in range(c):
        j = int(targets[k])
        out[k] = moved.get(j, j)
        moved[j] = moved.get(k, k)
    out.sort()
    return out


def draw_uniform_sketch(n, c, rng):
    """c distinct rows of I_n, uniformly over all c-subsets, sorted."""
    if not 1 <= c <= n:
        raise DomainError(f"uniform sampling needs 1 <= c <= n, got c={c}, n={n}")
    idx = _sample_without_replacement(rng.generator(), n, c)
    return UniformSketch(n=n, c_target=c, indices=_ro(idx, np.int64))


def _next_pow2(n):
    return 1 << (int(n) - 1).bit_length()


def draw_srht(n, c, rng):
    """sqrt(n2/c) R H D on the input zero-padded to n2 = next power of two."""
    if not 1 <= c <= n:
        raise DomainError(f"SRHT needs 1 <= c <= n, got c={c}, n={n}")
    n2 = _next_pow2(n)
    gen = rng.generator()
    signs = gen.integers(0, 2, n2).astype(np.float64) * 2.0 - 1.0
    selected = _sample_without_replacement(gen, n2, c)
    return SRHTSketch(
        n=n, c_target=c, n2=n2, signs=_ro(signs, np.float64), selected=_ro(selected, np.int64)
    )


def draw_sparse_embedding(n, c, rng):
    if c < 1 or n < 1:
        raise DomainError(f"sparse embedding needs n, c >= 1, got n={n}, c={c}")
    gen = rng.generator()
    buckets = gen.integers(0, c, n)
    signs = gen.integers(0, 2, n).astype(np.float64) * 2.0 - 1.0
    return SparseEmbedding(
        n=n, c_target=c, buckets=_ro(buckets, np.int64), signs=_ro(signs, np.float64)
    )


def fwht(x):
    """Normalized Walsh-Hadamard transform along axis 0 (length a power of two)."""
    a = np.array(x, dtype=np.float64, copy=True, order="C")
    n = a.shape[0] if a.ndim else 0
    if a.ndim not in (1, 2) or n < 1 or n & (n - 1):
        raise DomainError(f"fwht needs a power-of-two length, got shape {a.shape}")
    view = a.reshape(n, -1)
    _hadamard.fwht_inplace(view)
    a /= np.sqrt(n)
    return a


def apply_sketch(op, M):
    return op.apply(M)


def densify(op):
    """Debug oracle: the explicit dense matrix of ``op`` restricted to its n columns."""
    return op.to_dense()


@dataclass(frozen=True)
class SamplerConfig:
    """What to draw: ``kind`` in KINDS and target size ``c``."""

    kind: str
    c: int
    literal_weights: bool = False
    max_retries: int = MAX_RETRIES

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown sketch kind {self.kind!r}; expected one of {KINDS}")
        if self.c < 1:
            raise DomainError(f"sketch size must be >= 1, got {self.c}")

    def draw(self, n, rng, profile=None):
        if self.kind == "leverage":
            if profile is None:
                raise DomainError("leverage sampling needs a LeverageProfile")
            p = leverage_probabilities(profile, self.c)
            return draw_leverage_sketch(
                p, rng, c_target=self.c, literal_weights=self.literal_weights,
                max_retries=self.max_retries,
            )
        if self.kind == "uniform":
            return draw_uniform_sketch(n, self.c, rng)
        if self.kind == "srht":
            return draw_srht(n, self.c, rng)
        return draw_sparse_embedding(n, self.c, rng)


def sketch_from_dict(data):
    """Rebuild an operator serialized with ``to_dict``."""
    kind = data["kind"]
    n, c = int(data["n"]), int(data["c_target"])
    if kind == "leverage":
        p = np.asarray(data["probabilities"], dtype=np.float64)
        idx = np.asarray(data["indices"], dtype=np.int64)
        literal = bool(data.get("literal_weights", False))
        w = 1.0 / p[idx] if literal else 1.0 / np.sqrt(p[idx])
        return LeverageSketch(n=n, c_target=c, indices=_ro(idx, np.int64),
                              weights=_ro(w, np.float64), probabilities=_ro(p, np.float64),
                              literal_weights=literal)
    if kind == "uniform":
        return UniformSketch(n=n, c_target=c, indices=_ro(data["indices"], np.int64))
    if kind == "srht":
        return SRHTSketch(n=n, c_target=c, n2=int(data["n2"]),
                          signs=_ro(data["signs"], np.float64),
                          selected=_ro(data["selected"], np.int64))
    if kind == "sparse":
        return SparseEmbedding(n=n, c_target=c, buckets=_ro(data["buckets"], np.int64),
                               signs=_ro(data["signs"], np.float64))
    raise DomainError(f"unknown sketch kind {kind!r}")
