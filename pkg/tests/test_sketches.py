import json

import numpy as np
import pytest
import scipy.linalg

from sketchlsr.errors import DomainError, SamplingError
from sketchlsr.linalg import LeverageProfile, leverage_scores, thin_svd
from sketchlsr.sketches import (
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
    sketch_from_dict,
    trial_stream,
)


def test_leverage_probabilities_example():
    prof = LeverageProfile(np.array([1.0, 0.5, 0.5]), 2, 1.5)
    np.testing.assert_allclose(leverage_probabilities(prof, 3), [1.0, 0.75, 0.75])


def test_leverage_probabilities_saturate_and_zero():
    prof = LeverageProfile(np.full(5, 0.4), 2, 1.0)
    np.testing.assert_array_equal(leverage_probabilities(prof, 5), np.ones(5))
    prof = LeverageProfile(np.array([1.0, 1.0, 0.0]), 2, 1.5)
    p = leverage_probabilities(prof, 1)
    assert p[2] == 0.0 and np.all(p[:2] > 0)
    assert p.sum() <= 1


def test_leverage_saturated_is_identity(rng):
    op = draw_leverage_sketch(np.ones(6), SeededRng(1))
    M = rng.standard_normal((6, 3))
    np.testing.assert_array_equal(op.indices, np.arange(6))
    np.testing.assert_array_equal(apply_sketch(op, M), M)


def test_leverage_golden_replay():
    # recorded from the first implementation; guards the stream layout
    op = draw_leverage_sketch([1.0, 0.5], SeededRng(42, 0))
    np.testing.assert_array_equal(op.indices, [0])
    np.testing.assert_array_equal(op.weights, [1.0])


def test_uniform_golden_replay():
    np.testing.assert_array_equal(draw_uniform_sketch(10, 4, SeededRng(42, 0)).indices,
                                  [1, 4, 6, 9])


def test_leverage_mean_size():
    p = np.random.default_rng(3).uniform(0.05, 1.0, 40)
    sizes = np.array([draw_leverage_sketch(p, SeededRng(7, s)).rows for s in range(10_000)])
    se = sizes.std(ddof=1) / np.sqrt(sizes.size)
    assert abs(sizes.mean() - p.sum()) <= 3 * se


def test_leverage_weights():
    p = np.array([1.0, 0.25, 0.5, 0.64])
    sqrt_op = draw_leverage_sketch(p, SeededRng(0), max_retries=0)
    lit_op = draw_leverage_sketch(p, SeededRng(0), literal_weights=True)
    np.testing.assert_array_equal(sqrt_op.indices, lit_op.indices)
    np.testing.assert_allclose(sqrt_op.weights, 1 / np.sqrt(p[sqrt_op.indices]))
    np.testing.assert_allclose(lit_op.weights, 1 / p[lit_op.indices])
    assert np.all(np.diff(sqrt_op.indices) > 0)


def test_leverage_empty_sample_raises():
    with pytest.raises(SamplingError):
        draw_leverage_sketch(np.full(5, 1e-300), SeededRng(0), max_retries=3)


def test_leverage_bad_probabilities():
    with pytest.raises(DomainError):
        draw_leverage_sketch([0.5, 1.5], SeededRng(0))


def test_uniform_full_and_structure(rng):
    op = draw_uniform_sketch(7, 7, SeededRng(3))
    M = rng.standard_normal((7, 2))
    np.testing.assert_array_equal(apply_sketch(op, M), M)
    for s in range(50):
        idx = draw_uniform_sketch(30, 12, SeededRng(5, s)).indices
        assert len(set(idx.tolist())) == 12
        assert np.all(np.diff(idx) > 0)
    with pytest.raises(DomainError):
        draw_uniform_sketch(3, 4, SeededRng(0))


def test_uniform_marginals():
    counts = np.bincount(
        [draw_uniform_sketch(3, 1, SeededRng(11, s)).indices[0] for s in range(10_000)],
        minlength=3,
    )
    freq = counts / 10_000
    se = np.sqrt(freq * (1 - freq) / 10_000)
    assert np.all(np.abs(freq - 1 / 3) <= 3 * se)


def test_uniform_subsets_uniform():
    # every 2-subset of 4 elements equally likely (6 subsets)
    seen = {}
    trials = 12_000
    for s in range(trials):
        key = tuple(draw_uniform_sketch(4, 2, SeededRng(2, s)).indices)
        seen[key] = seen.get(key, 0) + 1
    assert len(seen) == 6
    freq = np.array(list(seen.values())) / trials
    se = np.sqrt(freq * (1 - freq) / trials)
    assert np.all(np.abs(freq - 1 / 6) <= 4 * se)


def test_fwht_examples():
    np.testing.assert_allclose(fwht([1.0, 1.0]), [np.sqrt(2), 0.0], atol=1e-15)
    np.testing.assert_allclose(fwht([1.0, 0.0, 0.0, 0.0]), [0.5] * 4)


@pytest.mark.parametrize("n", [1, 2, 4, 8, 64, 256, 2048])
def test_fwht_matches_dense_hadamard(n, rng):
    x = rng.standard_normal((n, 3))
    H = scipy.linalg.hadamard(n) / np.sqrt(n)
    np.testing.assert_allclose(fwht(x), H @ x, atol=1e-12)
    v = x[:, 0]
    assert abs(np.linalg.norm(fwht(v)) - np.linalg.norm(v)) <= 1e-12 * np.linalg.norm(v)


def test_fwht_rejects_non_power_of_two():
    with pytest.raises(DomainError):
        fwht(np.ones(6))


def test_srht_full_transform_is_orthogonal(rng):
    op = draw_srht(16, 16, SeededRng(4))
    x = rng.standard_normal(16)
    assert abs(np.linalg.norm(op.apply(x)) - np.linalg.norm(x)) <= 1e-12 * np.linalg.norm(x)


def test_srht_padding_is_inert(rng):
    op = draw_srht(3, 2, SeededRng(9))
    assert op.n2 == 4
    X = rng.standard_normal((3, 2))
    padded = np.vstack([X, np.zeros((1, 2))])
    from scipy.linalg import hadamard
    H = hadamard(4) / 2.0
    full = op.scale * (H[op.selected] * op.signs) @ padded
    np.testing.assert_allclose(op.apply(X), full, atol=1e-14)
    np.testing.assert_allclose(op.apply(X), densify(op) @ X, atol=1e-14)


@pytest.mark.parametrize("draw", [draw_srht, draw_sparse_embedding])
def test_isometry_in_expectation(draw):
    x = np.random.default_rng(5).standard_normal(13)
    vals = np.array([np.sum(draw(13, 4, SeededRng(21, s)).apply(x) ** 2)
                     for s in range(10_000)])
    se = vals.std(ddof=1) / np.sqrt(vals.size)
    assert abs(vals.mean() - x @ x) <= 3 * se


def test_sparse_structure():
    op = draw_sparse_embedding(50, 7, SeededRng(1))
    S = densify(op)
    assert np.all(np.count_nonzero(S, axis=0) == 1)
    assert np.all(np.abs(S[S != 0]) == 1)


def test_sparse_single_bucket(rng):
    op = draw_sparse_embedding(9, 1, SeededRng(2))
    x = rng.standard_normal(9)
    np.testing.assert_allclose(op.apply(x), [op.signs @ x])


def test_apply_dimension_mismatch():
    op = draw_sparse_embedding(5, 2, SeededRng(0))
    with pytest.raises(DomainError):
        op.apply(np.ones((4, 2)))


def test_determinism():
    p = np.linspace(0.1, 1.0, 30)
    for make in (
        lambda r: draw_leverage_sketch(p, r),
        lambda r: draw_uniform_sketch(30, 9, r),
        lambda r: draw_srht(30, 9, r),
        lambda r: draw_sparse_embedding(30, 9, r),
    ):
        a, b = make(SeededRng(77, 5)), make(SeededRng(77, 5))
        assert a.to_dict() == b.to_dict()
        assert make(SeededRng(77, 6)).to_dict() != a.to_dict()


def test_serialization_round_trip(rng):
    M = rng.standard_normal((20, 3))
    p = np.linspace(0.2, 1.0, 20)
    ops = [draw_leverage_sketch(p, SeededRng(1), literal_weights=True),
           draw_uniform_sketch(20, 5, SeededRng(1)),
           draw_srht(20, 5, SeededRng(1)),
           draw_sparse_embedding(20, 5, SeededRng(1))]
    for op in ops:
        back = sketch_from_dict(json.loads(json.dumps(op.to_dict())))
        assert back.kind == op.kind
        np.testing.assert_array_equal(back.apply(M), op.apply(M))


def _mc_gram(draw, M, trials):
    acc = np.zeros((M.shape[1], M.shape[1]))
    acc_sq = np.zeros_like(acc)
    for s in range(trials):
        SM = draw(s).apply(M)
        G = SM.T @ SM
        acc += G
        acc_sq += G * G
    mean = acc / trials
    se = np.sqrt(np.maximum(acc_sq / trials - mean**2, 0) / trials)
    return mean, se


def test_leverage_gram_unbiased():
    gen = np.random.default_rng(8)
    M = gen.standard_normal((25, 2))
    prof = leverage_scores(thin_svd(M))
    p = leverage_probabilities(prof, 8)
    mean, se = _mc_gram(lambda s: draw_leverage_sketch(p, SeededRng(31, s)), M, 10_000)
    assert np.all(np.abs(mean - M.T @ M) <= 5 * se + 1e-12)


def test_uniform_gram_scaled():
    M = np.random.default_rng(9).standard_normal((25, 2))
    mean, se = _mc_gram(lambda s: draw_uniform_sketch(25, 6, SeededRng(32, s)), M, 10_000)
    assert np.all(np.abs(mean - 6 / 25 * M.T @ M) <= 5 * se)


def test_sampler_config():
    with pytest.raises(DomainError):
        SamplerConfig("gaussian", 3)
    with pytest.raises(DomainError):
        SamplerConfig("uniform", 0)
    with pytest.raises(DomainError):
        SamplerConfig("leverage", 3).draw(10, SeededRng(0))


def test_trial_stream_packing():
    assert trial_stream(0, 0) == 0
    assert trial_stream(1, 0) == 2**32
    assert len({trial_stream(c, t) for c in range(5) for t in range(5)}) == 25
