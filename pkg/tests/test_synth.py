"""Tests for synthetic traverses and synthetic predictors."""

import numpy as np
import pytest

from vpr_consensus.core.descriptors import load_descriptors
from vpr_consensus.core.evaluation import confusion
from vpr_consensus.core.matching import best_matches, distance_matrix
from vpr_consensus.core.predictor import mask_matches
from vpr_consensus.core.synth import degrade_predictions, generate_traverse, perfect_predictions, write_traverse
from vpr_consensus.errors import ValidationError
from vpr_consensus.export.matrix_io import read_index_vector
from vpr_consensus.models.config import PredictorQualityConfig, SynthConfig


def single_frame_errors(cfg):
    refs, queries, gt = generate_traverse(cfg)
    D = distance_matrix(refs, queries, 'euclidean')
    return float(np.mean(~gt.correctness(np.argmin(D.values, axis=0))))


def test_noiseless_traverse_recovers_ground_truth():
    refs, queries, gt = generate_traverse(SynthConfig(n_refs=80, noise_sigma=0.0, alias_rate=0.0))
    D = distance_matrix(refs, queries, 'euclidean')
    assert np.all(np.diag(D.values) == 0.0)
    assert [c.ref for c in best_matches(D)] == gt.gt_ref.tolist()


def test_same_seed_is_bitwise_identical():
    cfg = SynthConfig(n_refs=100, alias_rate=0.2, drift=2, seed=9)
    first = generate_traverse(cfg)
    second = generate_traverse(cfg)
    assert np.array_equal(first[0].matrix, second[0].matrix)
    assert np.array_equal(first[1].matrix, second[1].matrix)
    assert np.array_equal(first[2].gt_ref, second[2].gt_ref)


def test_reference_walk_ignores_query_noise():
    quiet = generate_traverse(SynthConfig(n_refs=60, noise_sigma=0.0, seed=4))
    noisy = generate_traverse(SynthConfig(n_refs=60, noise_sigma=0.5, seed=4))
    assert np.array_equal(quiet[0].matrix, noisy[0].matrix)
    assert np.array_equal(quiet[2].gt_ref, noisy[2].gt_ref)
    assert not np.array_equal(quiet[1].matrix, noisy[1].matrix)


def test_different_seeds_differ():
    a = generate_traverse(SynthConfig(n_refs=50, seed=1))[0].matrix
    b = generate_traverse(SynthConfig(n_refs=50, seed=2))[0].matrix
    assert not np.array_equal(a, b)


def test_alias_rate_sets_single_frame_error_rate():
    error_rate = single_frame_errors(SynthConfig(n_refs=200, noise_sigma=0.05, alias_rate=0.3, seed=42))
    assert 0.2 <= error_rate <= 0.4


def test_clean_traverse_is_nearly_error_free():
    assert single_frame_errors(SynthConfig(n_refs=200, noise_sigma=0.05, alias_rate=0.0)) <= 0.02


def test_fewer_queries_spread_over_references():
    _, queries, gt = generate_traverse(SynthConfig(n_refs=100, n_queries=11, alias_rate=0.0))
    assert queries.count == 11
    assert gt.gt_ref[0] == 0
    assert gt.gt_ref[-1] == 99
    assert np.all(np.diff(gt.gt_ref) > 0)


def test_drift_stays_bounded():
    _, _, gt = generate_traverse(SynthConfig(n_refs=120, drift=3, alias_rate=0.0, seed=5))
    offsets = gt.gt_ref - np.arange(120)
    assert np.all(np.abs(offsets) <= 3)
    assert np.any(offsets != 0)


def test_invalid_config_is_rejected():
    with pytest.raises(ValidationError):
        generate_traverse(SynthConfig(n_refs=15, alias_rate=0.1))
    with pytest.raises(ValidationError):
        generate_traverse(SynthConfig(noise_sigma=-1.0))


def test_zero_flip_probabilities_keep_predictions(traverse):
    D, gt = traverse
    perfect = perfect_predictions(D, gt)
    same = degrade_predictions(perfect, perfect.values == 1, PredictorQualityConfig())
    assert np.array_equal(same.values, perfect.values)
    assert same.source == 'degraded'


def test_certain_flips_give_the_complement(traverse):
    D, gt = traverse
    perfect = perfect_predictions(D, gt)
    flipped = degrade_predictions(perfect, perfect.values == 1, PredictorQualityConfig(1.0, 1.0))
    assert np.array_equal(flipped.values, 1 - perfect.values)


def test_degradation_is_seeded(traverse):
    D, gt = traverse
    perfect = perfect_predictions(D, gt)
    quality = PredictorQualityConfig(0.5, 0.5, seed=3)
    first = degrade_predictions(perfect, perfect.values == 1, quality)
    second = degrade_predictions(perfect, perfect.values == 1, quality)
    assert np.array_equal(first.values, second.values)
    with pytest.raises(ValidationError):
        degrade_predictions(perfect, [True], quality)
    with pytest.raises(ValidationError):
        degrade_predictions(perfect, perfect.values == 1, PredictorQualityConfig(1.5, 0.0))


def test_perfect_predictions_mask_only_good_matches(traverse):
    D, gt = traverse
    perfect = perfect_predictions(D, gt)
    masked = mask_matches(best_matches(D), perfect)
    counts = confusion(masked.accepted, masked.abstained, gt)
    assert counts.fp == 0
    assert counts.fn == 0
    assert counts.precision == 1.0
    assert perfect.i_g0 is None


def test_write_traverse_round_trip(tmp_path):
    refs, queries, gt = generate_traverse(SynthConfig(n_refs=40, alias_rate=0.0))
    for fmt in ('csv', 'bin'):
        refs_path, queries_path, gt_path = write_traverse(refs, queries, gt, tmp_path / fmt, fmt)
        assert np.array_equal(load_descriptors(refs_path).matrix, refs.matrix)
        assert np.array_equal(load_descriptors(queries_path).matrix, queries.matrix)
        assert read_index_vector(gt_path).tolist() == gt.gt_ref.tolist()
